#include "splitsim/series_io.hpp"

#include <cstdlib>
#include <fstream>
#include <string>

#include "splitsim/errors.hpp"
#include "splitsim/report.hpp"

namespace splitsim {
namespace {

bool try_parse(const std::string& line, double& out) {
    const char* s = line.c_str();
    char* end = nullptr;
    out = std::strtod(s, &end);
    if (end == s) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

bool is_blank(const std::string& line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

}  // namespace

std::vector<double> parse_series(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("series: cannot open " + path);

    std::vector<double> values;
    std::string line;
    std::int64_t lineno = 0;
    bool seen_content = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        double v;
        if (!try_parse(line, v)) {
            if (!seen_content) {  // leading non-numeric line is a header
                seen_content = true;
                continue;
            }
            throw DataError("series: non-numeric value at line " + std::to_string(lineno) +
                            " in " + path);
        }
        seen_content = true;
        values.push_back(v);
    }
    if (values.size() < 2)
        throw DataError("series: need at least 2 values in " + path + ", found " +
                        std::to_string(values.size()));
    return values;
}

void save_series(const std::string& path, const std::vector<double>& values,
                 const std::string& header) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("series: cannot open " + path);
    std::string text;
    if (!header.empty()) {
        text += header;
        text += '\n';
    }
    for (double v : values) {
        text += Report::format_double(v);
        text += '\n';
    }
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw DataError("series: write failed for " + path);
}

}  // namespace splitsim
