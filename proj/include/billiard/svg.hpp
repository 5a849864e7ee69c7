#pragma once

#include <string>
#include <vector>

namespace billiard {

// Minimal standalone SVG line plots; no display dependency.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_series(const std::string& name, std::vector<double> x, std::vector<double> y);
    void add_points(const std::string& name, std::vector<double> x, std::vector<double> y);

    std::string render() const;
    void write_file(const std::string& path) const;

private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
        bool points_only = false;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace billiard
