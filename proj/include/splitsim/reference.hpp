#pragma once

// Serial reference implementations of the parallel kernels. Each one uses a
// direct enumeration with no span grouping, no striding, and no worker
// threads, so the optimized kernels can be checked for exact agreement.
// These are kept for tests and benchmarks; production code paths never call
// them implicitly.

#include <cstdint>
#include <span>

#include "splitsim/changepoint.hpp"
#include "splitsim/increments.hpp"

namespace splitsim::reference {

// Direct loop over every pair 1 <= i < j <= n.
UiValue ui_statistic(std::span<const double> values, double alpha);

// Direct loop over every window start and length.
WindowMax window_max(std::span<const double> values, std::int64_t a);

// Sequential bridge simulation; the weighted supremum is evaluated by the
// generic pair loop even at alpha = 0, exercising the range-scan shortcut of
// the optimized kernel.
CriticalValueTable simulate_null_reference(double alpha, std::int64_t grid, std::int64_t reps,
                                           std::uint64_t seed);

}  // namespace splitsim::reference
