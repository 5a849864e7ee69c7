#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace billiard {

// %.17g keeps doubles round-trippable and byte-stable across reruns
std::string format_double(double v);

// CSV with '#'-prefixed metadata lines, a header row, '.' decimals.
class CsvWriter {
public:
    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void meta(const std::string& key, std::uint64_t value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);

    std::string str() const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// FNV-1a over the canonical config echo; embedded in every output file.
std::uint64_t config_hash(const std::string& canonical);
std::string hash_hex(std::uint64_t h);

} // namespace billiard
