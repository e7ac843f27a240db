#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splitsim/process.hpp"

namespace splitsim {

// Monte Carlo estimate of the coupling distance ||Y - Y_approx(m)||_p.
struct RateEstimate {
    int m = 0;
    double p = 2.0;
    double value = 0.0;      // (E|Y - Y_approx|^p)^(1/p), >= 0
    double std_error = 0.0;  // delta-method standard error of `value`
    int64_t reps = 0;
};

// Fitted decay law of the coupling distance as a function of m.
struct RateFit {
    enum class Kind { Polynomial, Exponential, ExactMDependent };
    Kind kind = Kind::Polynomial;
    // Polynomial: value ~ C m^-A (exponent = A).
    // Exponential: value ~ C exp(-rho m) (exponent = rho).
    double exponent = 0.0;
    double fit_quality = 0.0;  // R^2 of the winning log-scale regression
};

// Estimates ||Y - Y_approx(m)||_p at a single coordinate by Monte Carlo over
// `reps` independent coupled replications. The coordinate choice is
// irrelevant by stationarity of the construction.
RateEstimate estimate_delta(const ProcessSpec& spec, int m, double p, std::int64_t reps,
                            std::uint64_t seed);

// Selects between polynomial and exponential decay by comparing log-log and
// log-linear least-squares fits; all-zero inputs report exact m-dependence.
// Needs >= 3 points with distinct m and positive values for a fit.
RateFit fit_rate(std::span<const RateEstimate> points);

// Bartlett-kernel long-run variance of a demeaned path:
// gamma0_hat + 2 sum_{k=1..b} (1 - k/b) gammak_hat, clamped below at a small
// positive floor. Default bandwidth floor(n^(1/3)).
double long_run_variance(std::span<const double> values,
                         std::optional<int> bandwidth = std::nullopt);

struct MomentGrowthPoint {
    std::int64_t n = 0;
    double ratio = 0.0;      // E|S_n|^p / n^(p/2)
    double std_error = 0.0;  // MC standard error of `ratio`
    double max_ratio = 0.0;  // E max_{k<=n} |S_k|^p / n^(p/2)
};

// Measures E|S_n|^p / n^(p/2) (and the running-maximum variant) across a grid
// of path lengths, reusing one path of length max(n_grid) per replication so
// the grid points are evaluated on nested sums.
std::vector<MomentGrowthPoint> moment_growth(const ProcessSpec& spec, double p,
                                             std::span<const std::int64_t> n_grid,
                                             std::int64_t reps, std::uint64_t seed);

// True iff |a+b|^p <= |a|^p + |b|^p +
//   sum_{k=1..floor(p)} C(p,k) (|a|^k |b|^(p-k) + |b|^k |a|^(p-k)),
// with C(p,k) the generalized binomial coefficient, up to relative slack 1e-12.
bool check_power_inequality(double a, double b, double p);

}  // namespace splitsim
