// Benchmark of the parallel kernels against their serial reference
// implementations, verifying exact agreement on the way.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "splitsim/changepoint.hpp"
#include "splitsim/increments.hpp"
#include "splitsim/process.hpp"
#include "splitsim/reference.hpp"

namespace {

using namespace splitsim;

double time_ms(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, equal ? "outputs equal" : "OUTPUTS DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    ProcessSpec spec;
    spec.kind = RecurrenceParams{0.5, 1000};

    {
        const SamplePath path = generate(spec, 1500, 42);
        UiValue a, b;
        const double ts = time_ms([&] { a = reference::ui_statistic(path.values, 0.25); }, 3);
        const double tp = time_ms([&] { b = ui_statistic(path.values, 0.25); }, 3);
        row("ui_statistic n=1500", ts, tp,
            a.value == b.value && a.i == b.i && a.j == b.j);
    }
    {
        const SamplePath path = generate(spec, 60000, 43);
        const std::int64_t a_len = 760;
        WindowMax a, b;
        const double ts = time_ms([&] { a = reference::window_max(path.values, a_len); }, 3);
        const double tp = time_ms([&] { b = window_max(path.values, a_len); }, 3);
        row("window_max n=60000 a=760", ts, tp,
            a.value == b.value && a.k == b.k && a.l == b.l);
    }
    {
        CriticalValueTable a, b;
        const double ts =
            time_ms([&] { a = reference::simulate_null_reference(0.25, 256, 1000, 7); }, 1);
        const double tp = time_ms([&] { b = simulate_null_reference(0.25, 256, 1000, 7); }, 1);
        row("null table g=256 r=1000", ts, tp, a.values == b.values);
    }
    {
        CriticalValueTable a, b;
        const double ts =
            time_ms([&] { a = reference::simulate_null_reference(0.0, 512, 1000, 8); }, 1);
        const double tp = time_ms([&] { b = simulate_null_reference(0.0, 512, 1000, 8); }, 1);
        row("null table alpha=0 g=512", ts, tp, a.values == b.values);
    }
    return 0;
}
