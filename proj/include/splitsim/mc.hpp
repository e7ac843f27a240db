#pragma once

// Replication engine. Each replication derives its own seed from the root
// seed and its index, computes independently, and writes into a slot of a
// preallocated array. Aggregation happens afterwards in fixed index order,
// so reports are bitwise identical for any parallelism level.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "splitsim/rng.hpp"

namespace splitsim {

struct QuantileEstimate {
    double q = 0.0;
    double value = 0.0;
    // 95% order-statistic confidence interval (normal approximation to the
    // binomial counts; adequate for n >= ~100).
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::int64_t n = 0;
};

// Empirical quantile of an ascending-sorted sample: the order statistic at
// the 1-based ceiling index ceil(q * n). q = 1 yields the maximum.
QuantileEstimate empirical_quantile(std::span<const double> sorted, double q);

struct ExperimentConfig {
    std::uint64_t root_seed = 0;
    std::int64_t reps = 0;
    int parallelism = 1;  // execution detail only; never affects results
    std::string label;
};

struct RunSummary {
    std::int64_t reps = 0;
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    std::vector<double> values;  // per-replication values, in index order
    std::string label;
    std::string version;
};

// Runs payload(rep_index, child_seed(root_seed, rep_index)) for every index.
RunSummary run(const ExperimentConfig& config,
               const std::function<double(std::int64_t, std::uint64_t)>& payload);

}  // namespace splitsim
