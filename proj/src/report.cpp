#include "splitsim/report.hpp"

#include <cstdio>
#include <fstream>

#include "splitsim/errors.hpp"

namespace splitsim {

void Report::put(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void Report::put(const std::string& key, double value) { put(key, format_double(value)); }

void Report::put(const std::string& key, std::int64_t value) { put(key, std::to_string(value)); }

void Report::put(const std::string& key, std::uint64_t value) { put(key, std::to_string(value)); }

void Report::put(const std::string& key, bool value) {
    put(key, std::string(value ? "true" : "false"));
}

void Report::put_array(const std::string& key, const std::vector<double>& values) {
    arrays_.emplace_back(key, values);
}

std::string Report::to_text() const {
    std::string out;
    for (const auto& [key, value] : entries_) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    for (const auto& [key, values] : arrays_) {
        out += "array ";
        out += key;
        out += ' ';
        out += std::to_string(values.size());
        out += '\n';
        for (double v : values) {
            out += format_double(v);
            out += '\n';
        }
    }
    return out;
}

void Report::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("report: cannot open " + path);
    const std::string text = to_text();
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw DataError("report: write failed for " + path);
}

std::string Report::format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

}  // namespace splitsim
