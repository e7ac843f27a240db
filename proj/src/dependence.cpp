#include "splitsim/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "splitsim/errors.hpp"
#include "splitsim/numerics.hpp"
#include "splitsim/rng.hpp"

namespace splitsim {

RateEstimate estimate_delta(const ProcessSpec& spec, int m, double p, std::int64_t reps,
                            std::uint64_t seed) {
    if (reps < 100) throw SpecError("estimate_delta: reps must be >= 100");
    if (!(p >= 1.0)) throw SpecError("estimate_delta: p must be >= 1");
    if (m < 0) throw SpecError("estimate_delta: m must be >= 0");
    validate(spec);

    // One coupled coordinate per replication; the construction is stationary,
    // so a single coordinate carries the full marginal law of Y - Y_approx.
    std::vector<double> powered(static_cast<std::size_t>(reps));
    double* out = powered.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
        const CoupledPath cp =
            generate_coupled(spec, 1, m, child_seed(seed, static_cast<std::uint64_t>(r)));
        out[r] = std::pow(std::fabs(cp.y[0] - cp.y_approx[0]), p);
    }

    RateEstimate est;
    est.m = m;
    est.p = p;
    est.reps = reps;
    const double mp = mean(powered);
    est.value = (mp > 0.0) ? std::pow(mp, 1.0 / p) : 0.0;
    if (mp > 0.0 && reps >= 2) {
        const double se_mp = std::sqrt(sample_variance(powered) / static_cast<double>(reps));
        // Delta method on value = mp^(1/p).
        est.std_error = (1.0 / p) * std::pow(mp, 1.0 / p - 1.0) * se_mp;
    }
    return est;
}

RateFit fit_rate(std::span<const RateEstimate> points) {
    std::vector<double> ms, vals;
    bool any_zero = false;
    for (const auto& pt : points) {
        if (pt.value > 0.0) {
            if (std::find(ms.begin(), ms.end(), static_cast<double>(pt.m)) == ms.end()) {
                ms.push_back(static_cast<double>(pt.m));
                vals.push_back(pt.value);
            }
        } else {
            any_zero = true;
        }
    }
    if (ms.empty()) {
        if (!any_zero) throw SpecError("fit_rate: no points");
        RateFit fit;
        fit.kind = RateFit::Kind::ExactMDependent;
        fit.exponent = 0.0;
        fit.fit_quality = 1.0;
        return fit;
    }
    if (ms.size() < 3)
        throw SpecError("fit_rate: need >= 3 points with distinct m and positive values");

    std::vector<double> log_m(ms.size()), log_v(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ms[i] <= 0.0) throw SpecError("fit_rate: m must be positive for a decay fit");
        log_m[i] = std::log(ms[i]);
        log_v[i] = std::log(vals[i]);
    }
    const LineFit poly = fit_line(log_m, log_v);  // log v = c - A log m
    const LineFit expo = fit_line(ms, log_v);     // log v = c - rho m

    RateFit fit;
    if (poly.r2 >= expo.r2) {
        fit.kind = RateFit::Kind::Polynomial;
        fit.exponent = -poly.slope;
        fit.fit_quality = poly.r2;
    } else {
        fit.kind = RateFit::Kind::Exponential;
        fit.exponent = -expo.slope;
        fit.fit_quality = expo.r2;
    }
    if (!(fit.exponent > 0.0))
        throw SpecError("fit_rate: values do not decay in m (fitted exponent <= 0)");
    return fit;
}

double long_run_variance(std::span<const double> values, std::optional<int> bandwidth) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (n < 30) throw SpecError("long_run_variance: need n >= 30");
    int b = bandwidth ? *bandwidth
                      : static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
    if (bandwidth && (*bandwidth < 0 || *bandwidth >= n))
        throw SpecError("long_run_variance: bandwidth must be in [0, n)");
    if (b < 0) b = 0;

    const double mu = mean(values);
    std::vector<double> centered(values.begin(), values.end());
    for (double& v : centered) v -= mu;

    auto gamma_hat = [&](int k) {
        double acc = 0.0;
        for (std::int64_t i = 0; i + k < n; ++i)
            acc += centered[static_cast<std::size_t>(i)] * centered[static_cast<std::size_t>(i + k)];
        return acc / static_cast<double>(n);
    };

    const double g0 = gamma_hat(0);
    double s2 = g0;
    for (int k = 1; k <= b && k < n; ++k)
        s2 += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(b)) * gamma_hat(k);

    const double floor_val = 1e-10 * (g0 + 1e-30);
    return std::max(s2, floor_val);
}

std::vector<MomentGrowthPoint> moment_growth(const ProcessSpec& spec, double p,
                                             std::span<const std::int64_t> n_grid,
                                             std::int64_t reps, std::uint64_t seed) {
    if (!(p >= 2.0)) throw SpecError("moment_growth: p must be >= 2");
    if (reps < 100) throw SpecError("moment_growth: reps must be >= 100");
    if (n_grid.empty()) throw SpecError("moment_growth: empty n grid");
    std::vector<std::int64_t> grid(n_grid.begin(), n_grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() < 1) throw SpecError("moment_growth: grid entries must be >= 1");
    validate(spec);

    const std::size_t g = grid.size();
    const std::int64_t n_max = grid.back();
    // One path per replication; every grid point reads a nested partial sum.
    std::vector<std::vector<double>> endp(g), maxp(g);
    for (std::size_t i = 0; i < g; ++i) {
        endp[i].resize(static_cast<std::size_t>(reps));
        maxp[i].resize(static_cast<std::size_t>(reps));
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
        const SamplePath path =
            generate(spec, n_max, child_seed(seed, static_cast<std::uint64_t>(r)));
        double s = 0.0, running_max = 0.0;
        std::size_t gi = 0;
        for (std::int64_t k = 1; k <= n_max && gi < g; ++k) {
            s += path.values[static_cast<std::size_t>(k - 1)];
            running_max = std::max(running_max, std::fabs(s));
            if (k == grid[gi]) {
                endp[gi][static_cast<std::size_t>(r)] = std::pow(std::fabs(s), p);
                maxp[gi][static_cast<std::size_t>(r)] = std::pow(running_max, p);
                ++gi;
            }
        }
    }

    std::vector<MomentGrowthPoint> out(g);
    for (std::size_t i = 0; i < g; ++i) {
        const double scale = std::pow(static_cast<double>(grid[i]), p / 2.0);
        MomentGrowthPoint& pt = out[i];
        pt.n = grid[i];
        pt.ratio = mean(endp[i]) / scale;
        pt.std_error =
            std::sqrt(sample_variance(endp[i]) / static_cast<double>(reps)) / scale;
        pt.max_ratio = mean(maxp[i]) / scale;
    }
    return out;
}

bool check_power_inequality(double a, double b, double p) {
    if (!(p >= 1.0)) throw SpecError("check_power_inequality: p must be >= 1");
    const double aa = std::fabs(a), bb = std::fabs(b);
    const double lhs = std::pow(std::fabs(a + b), p);
    double rhs = std::pow(aa, p) + std::pow(bb, p);
    const int kmax = static_cast<int>(std::floor(p));
    double coeff = 1.0;  // generalized binomial C(p, k), built incrementally
    for (int k = 1; k <= kmax; ++k) {
        coeff *= (p - static_cast<double>(k - 1)) / static_cast<double>(k);
        rhs += coeff * (std::pow(aa, k) * std::pow(bb, p - k) +
                        std::pow(bb, k) * std::pow(aa, p - k));
    }
    return lhs <= rhs + 1e-12 * std::max({lhs, rhs, 1.0});
}

}  // namespace splitsim
