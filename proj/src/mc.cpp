#include "splitsim/mc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splitsim/errors.hpp"
#include "splitsim/numerics.hpp"
#include "splitsim/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace splitsim {

QuantileEstimate empirical_quantile(std::span<const double> sorted, double q) {
    const std::int64_t n = static_cast<std::int64_t>(sorted.size());
    if (n < 1) throw SpecError("empirical_quantile: empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw SpecError("empirical_quantile: q must be in (0, 1]");
    if (!std::is_sorted(sorted.begin(), sorted.end()))
        throw SpecError("empirical_quantile: sample must be sorted ascending");

    auto order_stat = [&](std::int64_t idx1) {  // 1-based, clamped
        idx1 = std::max<std::int64_t>(1, std::min(n, idx1));
        return sorted[static_cast<std::size_t>(idx1 - 1)];
    };

    QuantileEstimate est;
    est.q = q;
    est.n = n;
    est.value = order_stat(static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n))));

    // Binomial order-statistic bounds around index n*q at 95%.
    const double z = 1.959963984540054;
    const double sd = std::sqrt(static_cast<double>(n) * q * (1.0 - q));
    const double center = static_cast<double>(n) * q;
    est.ci_lo = order_stat(static_cast<std::int64_t>(std::floor(center - z * sd + 0.5)));
    est.ci_hi = order_stat(static_cast<std::int64_t>(std::ceil(center + z * sd + 0.5)));
    return est;
}

RunSummary run(const ExperimentConfig& config,
               const std::function<double(std::int64_t, std::uint64_t)>& payload) {
    if (config.reps < 1) throw SpecError("run: reps must be >= 1");
    if (config.parallelism < 1) throw SpecError("run: parallelism must be >= 1");
    if (!payload) throw SpecError("run: missing payload");

    RunSummary out;
    out.reps = config.reps;
    out.label = config.label;
    out.version = kVersion;
    out.values.resize(static_cast<std::size_t>(config.reps));

    const std::int64_t reps = config.reps;
    double* values = out.values.data();
    // Exceptions may not cross a parallel region; capture the lowest-index
    // failure and rethrow it with the replication index attached.
    std::int64_t failed_rep = -1;
    std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallelism)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
        try {
            values[r] = payload(r, child_seed(config.root_seed, static_cast<std::uint64_t>(r)));
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical(splitsim_run_failure)
#endif
            if (failed_rep < 0 || r < failed_rep) {
                failed_rep = r;
                failure = e.what();
            }
        }
    }
    if (failed_rep >= 0)
        throw SpecError("replication " + std::to_string(failed_rep) + ": " + failure);

    out.mean = mean(out.values);
    if (reps >= 2) {
        out.variance = sample_variance(out.values);
        out.std_error = std::sqrt(out.variance / static_cast<double>(reps));
    }
    return out;
}

}  // namespace splitsim
