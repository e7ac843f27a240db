#include <doctest.h>

#include <cmath>
#include <vector>

#include "splitsim/dependence.hpp"
#include "splitsim/errors.hpp"
#include "splitsim/process.hpp"
#include "splitsim/rng.hpp"

using namespace splitsim;

namespace {

ProcessSpec linear_expo(double rho, bool causal) {
    ProcessSpec spec;
    CoefficientRule rule;
    rule.kind = CoefficientRule::Kind::Exponential;
    rule.decay = rho;
    rule.causal = causal;
    spec.kind = LinearParams{rule};
    return spec;
}

}  // namespace

TEST_CASE("estimate_delta is exactly zero past an exact dependence span") {
    ProcessSpec spec;
    spec.kind = MDepParams{3, {1.0, 0.5, 0.25, 0.125}};
    const RateEstimate est = estimate_delta(spec, 3, 2.0, 200, 99);
    CHECK(est.value == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("estimate_delta tracks the closed-form tail for a linear filter") {
    const ProcessSpec spec = linear_expo(0.5, false);
    for (int m : {2, 4, 8}) {
        const RateEstimate est = estimate_delta(spec, m, 2.0, 20000, 7);
        const double expect = std::sqrt(closed_form_delta2(spec, m));
        CHECK(std::fabs(est.value - expect) < 3.0 * est.std_error);
        CHECK(est.std_error > 0.0);
        CHECK(est.std_error < 0.05 * expect);
    }
}

TEST_CASE("estimate_delta estimates are nonincreasing in m up to noise") {
    const ProcessSpec spec = linear_expo(0.5, false);
    double prev = 1e300;
    for (int m : {2, 4, 8, 16}) {
        const RateEstimate est = estimate_delta(spec, m, 2.0, 10000, 7);
        CHECK(est.value < prev + 3.0 * est.std_error);
        prev = est.value;
    }
}

TEST_CASE("estimate_delta validates its inputs") {
    const ProcessSpec spec = linear_expo(0.5, true);
    CHECK_THROWS_AS((void)estimate_delta(spec, 2, 2.0, 50, 1), SpecError);
    CHECK_THROWS_AS((void)estimate_delta(spec, -1, 2.0, 1000, 1), SpecError);
    CHECK_THROWS_AS((void)estimate_delta(spec, 2, 0.5, 1000, 1), SpecError);
}

TEST_CASE("fit_rate recovers synthetic decay laws exactly") {
    std::vector<RateEstimate> poly, expo, zero;
    for (int m : {2, 4, 8, 16, 32}) {
        RateEstimate e;
        e.m = m;
        e.value = std::pow(static_cast<double>(m), -2.0);
        poly.push_back(e);
        e.value = std::exp(-0.5 * m);
        expo.push_back(e);
        e.value = 0.0;
        zero.push_back(e);
    }
    const RateFit fp = fit_rate(poly);
    CHECK(fp.kind == RateFit::Kind::Polynomial);
    CHECK(fp.exponent == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fp.fit_quality == doctest::Approx(1.0).epsilon(1e-9));

    const RateFit fe = fit_rate(expo);
    CHECK(fe.kind == RateFit::Kind::Exponential);
    CHECK(fe.exponent == doctest::Approx(0.5).epsilon(1e-9));

    const RateFit fz = fit_rate(zero);
    CHECK(fz.kind == RateFit::Kind::ExactMDependent);
    CHECK(fz.fit_quality == 1.0);
}

TEST_CASE("fit_rate rejects unusable inputs") {
    std::vector<RateEstimate> two;
    for (int m : {2, 4}) {
        RateEstimate e;
        e.m = m;
        e.value = 1.0 / m;
        two.push_back(e);
    }
    CHECK_THROWS_AS((void)fit_rate(two), SpecError);

    std::vector<RateEstimate> rising;
    for (int m : {2, 4, 8, 16}) {
        RateEstimate e;
        e.m = m;
        e.value = static_cast<double>(m);
        rising.push_back(e);
    }
    CHECK_THROWS_AS((void)fit_rate(rising), SpecError);
}

TEST_CASE("fit_rate classifies a measured linear filter as exponential") {
    const ProcessSpec spec = linear_expo(0.5, true);
    std::vector<RateEstimate> pts;
    for (int m : {2, 6, 10, 14, 18})
        pts.push_back(estimate_delta(spec, m, 2.0, 20000, 11));
    const RateFit fit = fit_rate(pts);
    CHECK(fit.kind == RateFit::Kind::Exponential);
    // Truncation at floor(m/2) gives value ~ rho^(m/2): decay rate -log(rho)/2.
    CHECK(fit.exponent == doctest::Approx(-std::log(0.5) / 2.0).epsilon(0.25));
}

TEST_CASE("long_run_variance approaches the known white-noise value") {
    ProcessSpec iid;
    iid.kind = MDepParams{0, {1.0}};
    const SamplePath path = generate(iid, 50000, 17);
    CHECK(long_run_variance(path.values) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(long_run_variance(path.values, 0) > 0.9);  // bandwidth 0: plain variance
}

TEST_CASE("long_run_variance validates and floors") {
    std::vector<double> tiny(10, 1.0);
    CHECK_THROWS_AS((void)long_run_variance(tiny), SpecError);
    std::vector<double> flat(100, 2.5);
    CHECK(long_run_variance(flat) > 0.0);  // demeaned constant hits the floor
    std::vector<double> v(100, 0.0);
    CHECK_THROWS_AS((void)long_run_variance(v, 100), SpecError);
    CHECK_THROWS_AS((void)long_run_variance(v, -1), SpecError);
}

TEST_CASE("moment_growth on iid normal matches the exact gaussian moments") {
    ProcessSpec iid;
    iid.kind = MDepParams{0, {1.0}};
    const std::vector<std::int64_t> grid{100, 400};
    const auto pts2 = moment_growth(iid, 2.0, grid, 2000, 5);
    REQUIRE(pts2.size() == 2);
    for (const auto& pt : pts2) {
        CHECK(std::fabs(pt.ratio - 1.0) < 3.0 * pt.std_error);
        CHECK(pt.max_ratio >= pt.ratio);
    }
    const auto pts4 = moment_growth(iid, 4.0, grid, 2000, 5);
    for (const auto& pt : pts4)
        CHECK(std::fabs(pt.ratio - 3.0) < 3.0 * pt.std_error);
}

TEST_CASE("moment_growth validates the grid") {
    ProcessSpec iid;
    iid.kind = MDepParams{0, {1.0}};
    const std::vector<std::int64_t> empty;
    CHECK_THROWS_AS((void)moment_growth(iid, 2.0, empty, 1000, 1), SpecError);
    const std::vector<std::int64_t> bad{0, 10};
    CHECK_THROWS_AS((void)moment_growth(iid, 2.0, bad, 1000, 1), SpecError);
    const std::vector<std::int64_t> ok{10};
    CHECK_THROWS_AS((void)moment_growth(iid, 1.5, ok, 1000, 1), SpecError);
}

TEST_CASE("power inequality holds on hand-picked triples") {
    CHECK(check_power_inequality(1.0, 1.0, 2.0));
    CHECK(check_power_inequality(-3.0, 2.0, 3.5));
    CHECK(check_power_inequality(0.0, 5.0, 1.0));
    CHECK(check_power_inequality(4.0, 0.0, 7.9));
    CHECK(check_power_inequality(-2.5, -2.5, 6.0));
    CHECK(check_power_inequality(1e-8, -1e8, 2.0));
}
