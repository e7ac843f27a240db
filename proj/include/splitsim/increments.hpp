#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace splitsim {

// Window-length rule a_T as a function of the horizon T.
struct WindowRule {
    enum class Form { Power, Proportional };
    Form form = Form::Power;
    double rho = 0.6;  // Power: a_T = T^rho, rho in (0, 1]
    double c = 0.5;    // Proportional: a_T = c T, c in (0, 1]

    double a(double T) const;
};

// Increment normalization beta_T = (2 a_T [log(T/a_T) + log log T])^(-1/2).
// Requires T > e and a positive bracket.
double beta(const WindowRule& rule, double T);

struct WindowMax {
    double value = 0.0;
    std::int64_t k = 0;  // window start: increment is S_{k+l} - S_k
    std::int64_t l = 0;  // window length
};

// Exact maximum of |S_{k+l} - S_k| over 1 <= k <= n - a, 1 <= l <= a via
// prefix sums; ties broken by smallest k, then smallest l.
WindowMax window_max(std::span<const double> values, std::int64_t a);

// Coarsened scan: l runs over a geometric grid (ratio ~ stride_ratio) plus
// l = a. A lower bound on the exact maximum; never used implicitly.
WindowMax window_max_strided(std::span<const double> values, std::int64_t a,
                             double stride_ratio);

// beta_n * window_max(values, floor(a_n)) / sigma_hat.
double increment_statistic(std::span<const double> values, const WindowRule& rule,
                           double sigma_hat);

}  // namespace splitsim
