#pragma once

// Deterministic aggregation helpers. Reductions over replication arrays use
// fixed-order pairwise summation so results do not depend on thread count or
// chunking, only on the array contents.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "splitsim/errors.hpp"

namespace splitsim {

// Pairwise (cascade) summation in index order.
inline double pairwise_sum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n <= 32) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw SpecError("mean: empty input");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

// Unbiased sample variance, two-pass.
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw SpecError("sample_variance: need at least 2 values");
    const double m = mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
    return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw SpecError("pearson_correlation: inputs must have equal length >= 2");
    const double ma = mean(a);
    const double mb = mean(b);
    std::vector<double> paa(a.size()), pbb(a.size()), pab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        paa[i] = da * da;
        pbb[i] = db * db;
        pab[i] = da * db;
    }
    const double caa = pairwise_sum(paa);
    const double cbb = pairwise_sum(pbb);
    if (caa == 0.0 || cbb == 0.0) throw SpecError("pearson_correlation: degenerate input");
    return pairwise_sum(pab) / std::sqrt(caa * cbb);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw SpecError("fit_line: inputs must have equal length >= 2");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw SpecError("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace splitsim
