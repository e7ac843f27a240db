#pragma once

#include <string>
#include <vector>

namespace splitsim {

// Reads one value per line; blank lines are skipped; a non-numeric first
// line is treated as a header. Any other non-numeric line is a data error
// reported with its 1-based line number. At least 2 values are required.
std::vector<double> parse_series(const std::string& path);

// One value per line, round-trip precision; parse_series(save) == values.
void save_series(const std::string& path, const std::vector<double>& values,
                 const std::string& header = "");

}  // namespace splitsim
