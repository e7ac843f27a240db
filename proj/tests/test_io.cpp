#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "splitsim/errors.hpp"
#include "splitsim/report.hpp"
#include "splitsim/series_io.hpp"

using namespace splitsim;

namespace {

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

}  // namespace

TEST_CASE("series files parse one value per line") {
    const std::string path = "io_plain.tmp";
    write_file(path, "1.0\n2.0\n3.0\n");
    CHECK(parse_series(path) == std::vector<double>{1.0, 2.0, 3.0});
    std::remove(path.c_str());
}

TEST_CASE("a non-numeric first line is a header, later ones are errors") {
    const std::string path = "io_header.tmp";
    write_file(path, "value\n1.0\n2.0\n");
    CHECK(parse_series(path) == std::vector<double>{1.0, 2.0});

    write_file(path, "value\n1.0\nx\n");
    CHECK_THROWS_WITH_AS((void)parse_series(path), doctest::Contains("line 3"), DataError);
    std::remove(path.c_str());
}

TEST_CASE("blank lines are skipped and short series rejected") {
    const std::string path = "io_blank.tmp";
    write_file(path, "\n1.5\n\n\n-2.5\n\n");
    CHECK(parse_series(path) == std::vector<double>{1.5, -2.5});

    write_file(path, "7.0\n");
    CHECK_THROWS_AS((void)parse_series(path), DataError);
    CHECK_THROWS_AS((void)parse_series("io_missing.tmp"), DataError);
    std::remove(path.c_str());
}

TEST_CASE("series round-trip preserves every bit") {
    const std::string path = "io_round.tmp";
    const std::vector<double> values{0.1, -1.0 / 3.0, 1e-300, 12345.678901234567, 0.0};
    save_series(path, values);
    CHECK(parse_series(path) == values);
    save_series(path, values, "simulated path");
    CHECK(parse_series(path) == values);
    std::remove(path.c_str());
}

TEST_CASE("reports serialize in insertion order with stable formatting") {
    Report r;
    r.put("alpha", 0.25);
    r.put("n", static_cast<std::int64_t>(100));
    r.put("label", std::string("demo"));
    r.put("reject", true);
    r.put_array("quantiles", {1.5, 2.5});
    const std::string expected =
        "alpha = 0.25\n"
        "n = 100\n"
        "label = demo\n"
        "reject = true\n"
        "array quantiles 2\n"
        "1.5\n"
        "2.5\n";
    CHECK(r.to_text() == expected);
}

TEST_CASE("report doubles round-trip through their text form") {
    for (double v : {1.0 / 3.0, 0.1, 1e308, -2.2250738585072014e-308, 3.0}) {
        CHECK(std::stod(Report::format_double(v)) == v);
    }
}

TEST_CASE("report save writes the exact text") {
    Report r;
    r.put("statistic", 1.6196);
    const std::string path = "io_report.tmp";
    r.save(path);
    std::ifstream in(path, std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body == r.to_text());
    std::remove(path.c_str());
    CHECK_THROWS_AS(r.save("/nonexistent_dir_xyz/out.txt"), DataError);
}
