#include "splitsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "splitsim/errors.hpp"
#include "splitsim/rng.hpp"

namespace splitsim::reference {

UiValue ui_statistic(std::span<const double> values, double alpha) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (n < 2) throw SpecError("ui_statistic: need n >= 2");
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw SpecError("weight exponent alpha must satisfy 0 <= alpha < 1/2");

    std::vector<double> p(static_cast<std::size_t>(n + 1), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i + 1)] = p[static_cast<std::size_t>(i)] + values[static_cast<std::size_t>(i)];
    const double mean_step = p[static_cast<std::size_t>(n)] / static_cast<double>(n);

    UiValue best;
    best.value = -1.0;
    for (std::int64_t i = 1; i < n; ++i) {
        for (std::int64_t j = i + 1; j <= n; ++j) {
            const std::int64_t d = j - i;
            const double t = static_cast<double>(d) / static_cast<double>(n);
            const double w = std::pow(t * (1.0 - t), -alpha);
            const double num = std::fabs(p[static_cast<std::size_t>(j)] -
                                         p[static_cast<std::size_t>(i)] -
                                         static_cast<double>(d) * mean_step);
            const double v = num * w;
            if (v > best.value) {
                best.value = v;
                best.i = i;
                best.j = j;
            }
        }
    }
    best.value /= std::sqrt(static_cast<double>(n));
    return best;
}

WindowMax window_max(std::span<const double> values, std::int64_t a) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (n < 2) throw SpecError("window_max: need n >= 2");
    if (!(a >= 1 && a <= n - 1)) throw SpecError("window_max: need 1 <= a <= n - 1");

    std::vector<double> p(static_cast<std::size_t>(n + 1), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i + 1)] = p[static_cast<std::size_t>(i)] + values[static_cast<std::size_t>(i)];

    WindowMax best;
    best.value = -1.0;
    for (std::int64_t k = 1; k <= n - a; ++k) {
        for (std::int64_t l = 1; l <= a; ++l) {
            const double v = std::fabs(p[static_cast<std::size_t>(k + l)] -
                                       p[static_cast<std::size_t>(k)]);
            if (v > best.value) {
                best.value = v;
                best.k = k;
                best.l = l;
            }
        }
    }
    return best;
}

CriticalValueTable simulate_null_reference(double alpha, std::int64_t grid, std::int64_t reps,
                                           std::uint64_t seed) {
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw SpecError("weight exponent alpha must satisfy 0 <= alpha < 1/2");
    if (grid < 256) throw SpecError("simulate_null_reference: grid must be >= 256");
    if (reps < 1000) throw SpecError("simulate_null_reference: reps must be >= 1000");

    const double step_sd = 1.0 / std::sqrt(static_cast<double>(grid));
    CriticalValueTable table;
    table.alpha = alpha;
    table.grid = grid;
    table.reps = reps;
    table.seed = seed;
    table.values.resize(static_cast<std::size_t>(reps));
    std::vector<double> bridge(static_cast<std::size_t>(grid + 1));
    for (std::int64_t r = 0; r < reps; ++r) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(r)));
        double w = 0.0;
        for (std::int64_t i = 1; i <= grid; ++i) {
            w += step_sd * rng.normal();
            bridge[static_cast<std::size_t>(i)] = w;
        }
        const double w1 = w;
        for (std::int64_t i = 1; i <= grid; ++i)
            bridge[static_cast<std::size_t>(i)] -=
                (static_cast<double>(i) / static_cast<double>(grid)) * w1;
        bridge[0] = 0.0;
        bridge[static_cast<std::size_t>(grid)] = 0.0;

        double best = 0.0;
        for (std::int64_t d = 1; d < grid; ++d) {
            const double t = static_cast<double>(d) / static_cast<double>(grid);
            const double w_inv = std::pow(t * (1.0 - t), -alpha);
            double m = 0.0;
            for (std::int64_t i = 0; i + d <= grid; ++i)
                m = std::max(m, std::fabs(bridge[static_cast<std::size_t>(i + d)] -
                                          bridge[static_cast<std::size_t>(i)]));
            best = std::max(best, m * w_inv);
        }
        table.values[static_cast<std::size_t>(r)] = best;
    }
    std::sort(table.values.begin(), table.values.end());
    return table;
}

}  // namespace splitsim::reference
