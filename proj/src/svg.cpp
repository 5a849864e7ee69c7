#include "billiard/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace billiard {

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr double kWidth = 860, kHeight = 560;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 60;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_series(const std::string& name, std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("series x/y size mismatch");
    series_.push_back({name, std::move(x), std::move(y), false});
}

void SvgPlot::add_points(const std::string& name, std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("series x/y size mismatch");
    series_.push_back({name, std::move(x), std::move(y), true});
}

std::string SvgPlot::render() const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin < xmax)) { xmin -= 1.0; xmax += 1.0; }
    if (!(ymin < ymax)) { ymin -= 1.0; ymax += 1.0; }
    const double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double v) { return kTop + (1.0 - (v - ymin) / (ymax - ymin)) * plot_h; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

    // frame and ticks
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << sx(fx)
            << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"#444\"/>\n"
            << "<text x=\"" << sx(fx) << "\" y=\"" << kTop + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(fx)
            << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << kLeft
            << "\" y2=\"" << sy(fy) << "\" stroke=\"#444\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label_
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << y_label_ << "</text>\n";

    for (std::size_t si = 0; si < series_.size(); ++si) {
        const auto& s = series_[si];
        const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
        if (!s.points_only && s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
            }
            out << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i]))
                    << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
        }
        const double ly = kTop + 16 + 18.0 * si;
        out << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << kWidth - kRight + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void SvgPlot::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << render();
}

} // namespace billiard
