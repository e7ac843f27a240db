#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitsim/dependence.hpp"

namespace splitsim {

// Weighted maximal centered-increment statistic over all index pairs:
// UI(n, alpha) = n^(-1/2) max_{1<=i<j<=n} |S_j - S_i - (j-i) S_n / n|
//                / [((j-i)/n)(1 - (j-i)/n)]^alpha.
// The full-span pair has numerator identically 0; its 0/0 is defined as 0.
struct UiValue {
    double value = 0.0;
    std::int64_t i = 0;
    std::int64_t j = 0;
};

struct UIConfig {
    double alpha = 0.25;      // weight exponent, in [0, 1/2)
    double level = 0.05;      // test level, in (0, 1)
    std::optional<double> sigma;  // external sigma; plugin estimate if absent
};

// Monte Carlo sample of the weighted Brownian-bridge supremum.
struct CriticalValueTable {
    double alpha = 0.0;
    std::int64_t grid = 0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // sorted ascending
};

struct TestResult {
    double statistic = 0.0;  // UI / sigma_hat
    double sigma_hat = 0.0;
    double p_value = 1.0;
    bool reject = false;
    std::int64_t i = 0;      // argmax pair of the UI scan
    std::int64_t j = 0;
    double alpha = 0.0;
    double level = 0.0;
};

// Exact maximum over all pairs via prefix sums, O(n^2); ties broken by
// smallest i, then smallest j. Requires n >= 2 and 0 <= alpha < 1/2.
UiValue ui_statistic(std::span<const double> values, double alpha);

// Restricted variant for large n: spans j - i >= 2 on a strided pair grid.
// A lower bound on the exact scan; never used implicitly.
UiValue ui_statistic_strided(std::span<const double> values, double alpha,
                             std::int64_t max_pairs_per_span);

// Simulates `reps` discrete bridges B(t_i) = W(t_i) - t_i W(1) on the grid
// t_i = i/grid and records the weighted pair supremum of each, sorted.
// Requires grid >= 256, reps >= 1000.
CriticalValueTable simulate_null_reference(double alpha, std::int64_t grid, std::int64_t reps,
                                           std::uint64_t seed);

// Order-statistic quantile of the table sample (index ceil(q * reps)).
double table_quantile(const CriticalValueTable& table, double q);

// Upper tail of the asymptotic distribution of the bridge range (max minus
// min): P(V >= x) = sum_{k>=1} 2 (4 k^2 x^2 - 1) exp(-2 k^2 x^2).
double kuiper_tail(double x);
// Quantile of that distribution: smallest x with P(V >= x) <= 1 - q.
double kuiper_quantile(double q);

// Full test: statistic = UI/sigma_hat, p-value from the table's right tail
// with (r+1)/(reps+1) smoothing, decision at config.level, argmax interval.
// The table's alpha must equal config.alpha.
TestResult epidemic_test(std::span<const double> values, const UIConfig& config,
                         const CriticalValueTable& table);

// Finite-n drift of an interior mean shift:
// (l (n - l))^(1-alpha) |delta| / n^(3/2 - 2 alpha).
double consistency_drift(std::int64_t n, std::int64_t l, double delta, double alpha);

struct PowerPoint {
    double delta = 0.0;
    double power = 0.0;
    double std_error = 0.0;  // binomial SE of `power`
    double drift = 0.0;
};

// Rejection rate per shift size over `reps` simulated paths with an epidemic
// segment of length l centered in the sample.
std::vector<PowerPoint> power_curve(const ProcessSpec& spec, std::int64_t n,
                                    const UIConfig& config, const CriticalValueTable& table,
                                    std::span<const double> deltas, std::int64_t l,
                                    std::int64_t reps, std::uint64_t seed);

struct AdmissibleAlpha {
    double eta_min = 0.0;    // smallest eta consistent with the fitted decay
    double alpha_max = 0.0;  // admissible weight exponents are (0, alpha_max)
    bool valid = false;      // false when no eta satisfies the moment condition
    std::string note;        // advisory label
};

// Advisory map from a fitted decay law and moment exponent p to the weight
// exponents compatible with the working criterion (1+eta)/p < 1/2 - alpha.
AdmissibleAlpha admissible_alpha(const RateFit& fit, double p);

// Table file round trip: one header line "alpha=.. grid=.. reps=.. seed=..",
// then the sorted values, one per line, full precision.
void save_table(const CriticalValueTable& table, const std::string& path);
CriticalValueTable load_table(const std::string& path);

}  // namespace splitsim
