#include <doctest.h>

#include <cmath>
#include <vector>

#include "splitsim/errors.hpp"
#include "splitsim/increments.hpp"
#include "splitsim/process.hpp"
#include "splitsim/reference.hpp"
#include "splitsim/rng.hpp"

using namespace splitsim;

TEST_CASE("normalization constant at the closed-form point") {
    WindowRule rule;
    rule.form = WindowRule::Form::Proportional;
    rule.c = 1.0;  // a_T = T, so the bracket collapses to log log T
    const double T = std::exp(std::exp(1.0));
    CHECK(beta(rule, T) == doctest::Approx(0.18164).epsilon(1e-4));
    CHECK(beta(rule, T) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * T)).epsilon(1e-12));
}

TEST_CASE("normalization decreases as the window grows") {
    WindowRule narrow, wide;
    narrow.form = WindowRule::Form::Proportional;
    narrow.c = 0.25;
    wide.form = WindowRule::Form::Proportional;
    wide.c = 0.5;
    const double T = 1000.0;
    CHECK(beta(wide, T) < beta(narrow, T));
}

TEST_CASE("normalization preconditions") {
    WindowRule rule;
    CHECK_THROWS_AS((void)beta(rule, std::exp(1.0)), SpecError);
    CHECK_THROWS_AS((void)beta(rule, 2.0), SpecError);
    WindowRule bad;
    bad.form = WindowRule::Form::Power;
    bad.rho = 1.5;
    CHECK_THROWS_AS((void)beta(bad, 100.0), SpecError);
}

TEST_CASE("window rule evaluations") {
    WindowRule power;
    power.form = WindowRule::Form::Power;
    power.rho = 0.6;
    CHECK(power.a(100000.0) == doctest::Approx(std::pow(100000.0, 0.6)).epsilon(1e-12));
    WindowRule prop;
    prop.form = WindowRule::Form::Proportional;
    prop.c = 0.5;
    CHECK(prop.a(1000.0) == 500.0);
}

TEST_CASE("window scan on a constant path") {
    const std::vector<double> vals(50, 3.0);
    const WindowMax wm = window_max(vals, 7);
    CHECK(wm.value == 21.0);
    CHECK(wm.k == 1);
    CHECK(wm.l == 7);
}

TEST_CASE("window scan on the enumerated three-point path") {
    const std::vector<double> vals{1.0, -1.0, 2.0};
    const WindowMax wm = window_max(vals, 2);
    CHECK(wm.value == 1.0);
    CHECK(wm.k == 1);
    CHECK(wm.l == 1);
}

TEST_CASE("window scan is monotone in the window bound") {
    ProcessSpec spec;
    spec.kind = RecurrenceParams{0.5, 100};
    const SamplePath path = generate(spec, 400, 9);
    double prev = 0.0;
    for (std::int64_t a : {1, 5, 20, 100, 399}) {
        const double v = window_max(path.values, a).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("window scan equals the serial reference on random paths") {
    ProcessSpec spec;
    spec.kind = RecurrenceParams{0.7, 100};
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const std::int64_t n = 20 + static_cast<std::int64_t>(seed * 7 % 180);
        const SamplePath path = generate(spec, n, seed);
        for (std::int64_t a : {std::int64_t{1}, std::int64_t{2}, n / 3, n - 1}) {
            if (a < 1) continue;
            const WindowMax fast = window_max(path.values, a);
            const WindowMax ref = reference::window_max(path.values, a);
            CHECK(fast.value == ref.value);
            CHECK(fast.k == ref.k);
            CHECK(fast.l == ref.l);
        }
    }
}

TEST_CASE("window scan validates the bound") {
    const std::vector<double> vals{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)window_max(vals, 0), SpecError);
    CHECK_THROWS_AS((void)window_max(vals, 3), SpecError);
}

TEST_CASE("strided scan is a lower bound and includes the boundary length") {
    ProcessSpec spec;
    spec.kind = RecurrenceParams{0.5, 100};
    const SamplePath path = generate(spec, 2000, 13);
    const WindowMax exact = window_max(path.values, 500);
    const WindowMax coarse = window_max_strided(path.values, 500, 1.5);
    CHECK(coarse.value <= exact.value);
    CHECK(coarse.value >= 0.5 * exact.value);
    CHECK_THROWS_AS((void)window_max_strided(path.values, 500, 1.0), SpecError);

    // constant path: the maximum lives at l = a, which the grid must keep
    const std::vector<double> flat(100, 1.0);
    CHECK(window_max_strided(flat, 30, 3.0).value == 30.0);
}

TEST_CASE("increment statistic basics") {
    WindowRule rule;
    rule.form = WindowRule::Form::Power;
    rule.rho = 0.6;

    const std::vector<double> zeros(100, 0.0);
    CHECK(increment_statistic(zeros, rule, 1.0) == 0.0);

    ProcessSpec spec;
    spec.kind = MDepParams{0, {1.0}};
    const SamplePath path = generate(spec, 5000, 3);
    const double base = increment_statistic(path.values, rule, 1.0);
    CHECK(base > 0.0);

    // scale path by a power of two and sigma alongside: bitwise unchanged
    std::vector<double> scaled = path.values;
    for (double& v : scaled) v *= 4.0;
    CHECK(increment_statistic(scaled, rule, 4.0) == base);

    CHECK_THROWS_AS((void)increment_statistic(path.values, rule, 0.0), SpecError);
}

TEST_CASE("gaussian replication medians drift toward one") {
    ProcessSpec spec;
    spec.kind = MDepParams{0, {1.0}};
    WindowRule rule;
    rule.form = WindowRule::Form::Power;
    rule.rho = 0.6;
    // median at n = 30000 should be in a loose band around 1
    std::vector<double> stats;
    for (std::uint64_t r = 0; r < 9; ++r) {
        const SamplePath path = generate(spec, 30000, child_seed(55, r));
        stats.push_back(increment_statistic(path.values, rule, 1.0));
    }
    std::sort(stats.begin(), stats.end());
    CHECK(stats[4] > 0.7);
    CHECK(stats[4] < 1.3);
}
