#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace splitsim {

// Ordered key-value report with optional named arrays. Serialization is
// byte-stable: insertion order is preserved, doubles are printed with
// round-trip precision, and no locale-dependent formatting is used.
class Report {
public:
    void put(const std::string& key, const std::string& value);
    void put(const std::string& key, double value);
    void put(const std::string& key, std::int64_t value);
    void put(const std::string& key, std::uint64_t value);
    void put(const std::string& key, bool value);
    void put_array(const std::string& key, const std::vector<double>& values);

    // "key = value" lines, then one "array <key> <n>" header plus one value
    // per line for each array, in insertion order.
    std::string to_text() const;
    void save(const std::string& path) const;

    // Round-trip decimal formatting used for every double in reports and
    // table files ("%.17g").
    static std::string format_double(double value);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::pair<std::string, std::vector<double>>> arrays_;
};

}  // namespace splitsim
