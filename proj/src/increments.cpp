#include "splitsim/increments.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "splitsim/errors.hpp"

namespace splitsim {
namespace {

constexpr double kE = 2.718281828459045235360287471353;

std::vector<double> prefix_sums(std::span<const double> values) {
    std::vector<double> p(values.size() + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) p[i + 1] = p[i] + values[i];
    return p;
}

struct Candidate {
    double value = -1.0;
    std::int64_t k = 0;
    std::int64_t l = 0;
    // Total order: larger value wins; ties prefer smaller k, then smaller l.
    bool beats(const Candidate& other) const {
        if (value != other.value) return value > other.value;
        if (k != other.k) return k < other.k;
        return l < other.l;
    }
};

// Dense scan when `lengths` is empty (every l in 1..a), otherwise restricted
// to the given lengths. Per-thread bests merge under the candidate total
// order, so the result is independent of the thread count.
WindowMax scan(std::span<const double> values, std::int64_t a,
               const std::vector<std::int64_t>& lengths) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (a < 1 || a > n - 1) throw SpecError("window_max: need 1 <= a <= n - 1");
    const std::vector<double> p = prefix_sums(values);

    Candidate best;
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Candidate local;
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
        for (std::int64_t k = 1; k <= n - a; ++k) {
            const double pk = p[static_cast<std::size_t>(k)];
            if (lengths.empty()) {
                // Reduction first with independent accumulators (max carries
                // no rounding, so the split is exact); argmin-l rescan only
                // on improvement finds the smallest l attaining the maximum.
                double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
                const double* q = p.data() + k;
                std::int64_t l = 1;
                for (; l + 3 <= a; l += 4) {
                    m0 = std::max(m0, std::fabs(q[l] - pk));
                    m1 = std::max(m1, std::fabs(q[l + 1] - pk));
                    m2 = std::max(m2, std::fabs(q[l + 2] - pk));
                    m3 = std::max(m3, std::fabs(q[l + 3] - pk));
                }
                for (; l <= a; ++l) m0 = std::max(m0, std::fabs(q[l] - pk));
                const double m = std::max(std::max(m0, m1), std::max(m2, m3));
                if (m > local.value || (m == local.value && k < local.k)) {
                    for (std::int64_t l = 1; l <= a; ++l) {
                        if (std::fabs(p[static_cast<std::size_t>(k + l)] - pk) == m) {
                            local = Candidate{m, k, l};
                            break;
                        }
                    }
                }
            } else {
                for (std::int64_t l : lengths) {
                    const Candidate c{std::fabs(p[static_cast<std::size_t>(k + l)] - pk), k, l};
                    if (c.beats(local)) local = c;
                }
            }
        }
#ifdef _OPENMP
#pragma omp critical(splitsim_window_max)
#endif
        if (local.beats(best)) best = local;
    }
    return WindowMax{best.value, best.k, best.l};
}

}  // namespace

double WindowRule::a(double T) const {
    switch (form) {
        case Form::Power:
            if (!(rho > 0.0 && rho <= 1.0))
                throw SpecError("window rule: power form needs rho in (0, 1]");
            return std::pow(T, rho);
        case Form::Proportional:
            if (!(c > 0.0 && c <= 1.0))
                throw SpecError("window rule: proportional form needs c in (0, 1]");
            return c * T;
    }
    throw SpecError("window rule: unknown form");
}

double beta(const WindowRule& rule, double T) {
    if (!(T > kE)) throw SpecError("beta: need T > e");
    const double aT = rule.a(T);
    if (!(aT > 0.0 && aT <= T)) throw SpecError("beta: need 0 < a_T <= T");
    const double bracket = std::log(T / aT) + std::log(std::log(T));
    if (!(bracket > 0.0)) throw SpecError("beta: normalization bracket must be positive");
    return 1.0 / std::sqrt(2.0 * aT * bracket);
}

WindowMax window_max(std::span<const double> values, std::int64_t a) {
    return scan(values, a, {});
}

WindowMax window_max_strided(std::span<const double> values, std::int64_t a,
                             double stride_ratio) {
    if (!(stride_ratio > 1.0)) throw SpecError("window_max_strided: stride ratio must be > 1");
    std::vector<std::int64_t> lengths;
    for (std::int64_t l = 1; l < a;) {
        lengths.push_back(l);
        l = std::max(l + 1, static_cast<std::int64_t>(
                                std::floor(static_cast<double>(l) * stride_ratio)));
    }
    if (a >= 1) lengths.push_back(a);
    return scan(values, a, lengths);
}

double increment_statistic(std::span<const double> values, const WindowRule& rule,
                           double sigma_hat) {
    if (!(sigma_hat > 0.0)) throw SpecError("increment_statistic: sigma_hat must be > 0");
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    const double T = static_cast<double>(n);
    const double b = beta(rule, T);
    std::int64_t a = static_cast<std::int64_t>(std::floor(rule.a(T)));
    a = std::max<std::int64_t>(1, std::min<std::int64_t>(a, n - 1));
    return b * window_max(values, a).value / sigma_hat;
}

}  // namespace splitsim
