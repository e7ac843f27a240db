#pragma once

// Distribution-test helpers shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace teststat {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov distribution K(x) = P(sup|B(t)| <= x) for the limiting law of
// sqrt(n) * D_n.
inline double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::max(0.0, 1.0 - 2.0 * sum);
}

// Two-sided Kolmogorov-Smirnov p-value of a sample against a continuous CDF.
inline double ks_pvalue(std::span<const double> sample,
                        const std::function<double(double)>& cdf) {
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    return 1.0 - kolmogorov_cdf(std::sqrt(n) * d);
}

}  // namespace teststat
