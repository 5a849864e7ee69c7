#include "billiard/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace billiard {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
}

void CsvWriter::meta(const std::string& key, double value) {
    meta_.emplace_back(key, format_double(value));
}

void CsvWriter::meta(const std::string& key, std::uint64_t value) {
    meta_.emplace_back(key, std::to_string(value));
}

void CsvWriter::header(const std::vector<std::string>& columns) { header_ = columns; }

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (!header_.empty() && cells.size() != header_.size())
        throw std::logic_error("csv row width does not match header");
    rows_.push_back(cells);
}

std::string CsvWriter::str() const {
    std::ostringstream out;
    for (const auto& [k, v] : meta_) out << "# " << k << " = " << v << "\n";
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ",";
            out << cells[i];
        }
        out << "\n";
    };
    if (!header_.empty()) emit(header_);
    for (const auto& r : rows_) emit(r);
    return out.str();
}

void CsvWriter::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << str();
}

std::uint64_t config_hash(const std::string& canonical) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace billiard
