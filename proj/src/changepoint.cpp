#include "splitsim/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "splitsim/errors.hpp"
#include "splitsim/numerics.hpp"
#include "splitsim/report.hpp"
#include "splitsim/rng.hpp"

namespace splitsim {
namespace {

struct PairCandidate {
    double value = -1.0;
    std::int64_t i = 0;
    std::int64_t j = 0;
    bool beats(const PairCandidate& other) const {
        if (value != other.value) return value > other.value;
        if (i != other.i) return i < other.i;
        return j < other.j;
    }
};

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw SpecError("weight exponent alpha must satisfy 0 <= alpha < 1/2");
}

// Inverse span weights [((d/n)(1-(d/n)))^alpha]^-1 for d = 1..n-1.
std::vector<double> inverse_weights(std::int64_t n, double alpha) {
    std::vector<double> invw(static_cast<std::size_t>(n));
    for (std::int64_t d = 1; d < n; ++d) {
        const double t = static_cast<double>(d) / static_cast<double>(n);
        invw[static_cast<std::size_t>(d)] = std::pow(t * (1.0 - t), -alpha);
    }
    return invw;
}

UiValue ui_scan(std::span<const double> values, double alpha,
                const std::vector<std::int64_t>& spans, std::int64_t max_pairs_per_span) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (n < 2) throw SpecError("ui_statistic: need n >= 2");
    check_alpha(alpha);

    std::vector<double> p(static_cast<std::size_t>(n + 1), 0.0);
    for (std::int64_t i = 0; i < n; ++i) p[static_cast<std::size_t>(i + 1)] = p[static_cast<std::size_t>(i)] + values[static_cast<std::size_t>(i)];
    const double mean_step = p[static_cast<std::size_t>(n)] / static_cast<double>(n);
    const std::vector<double> invw = inverse_weights(n, alpha);

    PairCandidate best;
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        PairCandidate local;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16) nowait
#endif
        for (std::size_t si = 0; si < spans.size(); ++si) {
            const std::int64_t d = spans[si];
            const double shift = static_cast<double>(d) * mean_step;
            const double w = invw[static_cast<std::size_t>(d)];
            const std::int64_t i_hi = n - d;  // pairs (i, i + d), 1 <= i <= n - d
            const std::int64_t stride =
                (max_pairs_per_span > 0 && i_hi > max_pairs_per_span)
                    ? (i_hi + max_pairs_per_span - 1) / max_pairs_per_span
                    : 1;
            double m = -1.0;
            for (std::int64_t i = 1; i <= i_hi; i += stride)
                m = std::max(m, std::fabs(p[static_cast<std::size_t>(i + d)] -
                                          p[static_cast<std::size_t>(i)] - shift));
            const double v = m * w;
            if (v > local.value) {
                for (std::int64_t i = 1; i <= i_hi; i += stride) {
                    if (std::fabs(p[static_cast<std::size_t>(i + d)] -
                                  p[static_cast<std::size_t>(i)] - shift) == m) {
                        local = PairCandidate{v, i, i + d};
                        break;
                    }
                }
            } else if (v == local.value) {
                // A span tie can still win on the pair order (smaller i/j).
                for (std::int64_t i = 1; i <= i_hi && i <= local.i; i += stride) {
                    if (std::fabs(p[static_cast<std::size_t>(i + d)] -
                                  p[static_cast<std::size_t>(i)] - shift) == m) {
                        const PairCandidate c{v, i, i + d};
                        if (c.beats(local)) local = c;
                        break;
                    }
                }
            }
        }
#ifdef _OPENMP
#pragma omp critical(splitsim_ui_scan)
#endif
        if (local.beats(best)) best = local;
    }

    UiValue out;
    out.value = best.value / std::sqrt(static_cast<double>(n));
    out.i = best.i;
    out.j = best.j;
    return out;
}

// Weighted pair supremum of a discrete bridge; values indexed 0..grid with
// zero endpoints. The full span contributes nothing (zero numerator; for
// alpha > 0 its 0/0 is defined as 0), so spans stop at grid - 1.
double bridge_supremum(std::span<const double> bridge, double alpha,
                       const std::vector<double>& invw) {
    const std::int64_t g = static_cast<std::int64_t>(bridge.size()) - 1;
    if (alpha == 0.0) {
        double lo = 0.0, hi = 0.0;
        for (double v : bridge) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    }
    double best = 0.0;
    for (std::int64_t d = 1; d < g; ++d) {
        double m = 0.0;
        for (std::int64_t i = 0; i + d <= g; ++i)
            m = std::max(m, std::fabs(bridge[static_cast<std::size_t>(i + d)] -
                                      bridge[static_cast<std::size_t>(i)]));
        best = std::max(best, m * invw[static_cast<std::size_t>(d)]);
    }
    return best;
}

}  // namespace

UiValue ui_statistic(std::span<const double> values, double alpha) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (n < 2) throw SpecError("ui_statistic: need n >= 2");
    std::vector<std::int64_t> spans(static_cast<std::size_t>(n - 1));
    for (std::int64_t d = 1; d < n; ++d) spans[static_cast<std::size_t>(d - 1)] = d;
    return ui_scan(values, alpha, spans, 0);
}

UiValue ui_statistic_strided(std::span<const double> values, double alpha,
                             std::int64_t max_pairs_per_span) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (n < 3) throw SpecError("ui_statistic_strided: need n >= 3");
    if (max_pairs_per_span < 1)
        throw SpecError("ui_statistic_strided: max_pairs_per_span must be >= 1");
    std::vector<std::int64_t> spans;
    for (std::int64_t d = 2; d < n; ++d) spans.push_back(d);
    return ui_scan(values, alpha, spans, max_pairs_per_span);
}

CriticalValueTable simulate_null_reference(double alpha, std::int64_t grid, std::int64_t reps,
                                           std::uint64_t seed) {
    check_alpha(alpha);
    if (grid < 256) throw SpecError("simulate_null_reference: grid must be >= 256");
    if (reps < 1000) throw SpecError("simulate_null_reference: reps must be >= 1000");

    const std::vector<double> invw = inverse_weights(grid, alpha);
    const double step_sd = 1.0 / std::sqrt(static_cast<double>(grid));

    CriticalValueTable table;
    table.alpha = alpha;
    table.grid = grid;
    table.reps = reps;
    table.seed = seed;
    table.values.resize(static_cast<std::size_t>(reps));
    double* out = table.values.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(r)));
        std::vector<double> bridge(static_cast<std::size_t>(grid + 1));
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
        out[r] = bridge_supremum(bridge, alpha, invw);
    }
    std::sort(table.values.begin(), table.values.end());
    return table;
}

double table_quantile(const CriticalValueTable& table, double q) {
    if (table.values.empty()) throw SpecError("table_quantile: empty table");
    if (!(q > 0.0 && q <= 1.0)) throw SpecError("table_quantile: q must be in (0, 1]");
    const std::int64_t n = static_cast<std::int64_t>(table.values.size());
    std::int64_t idx = static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n)));
    idx = std::max<std::int64_t>(1, std::min(n, idx));
    return table.values[static_cast<std::size_t>(idx - 1)];
}

double kuiper_tail(double x) {
    // Below the left edge of the support the tail is 1 to double precision
    // (the distribution function there is under 1e-23) and the series would
    // need order 1/x terms to cancel, so short-circuit instead.
    if (x < 0.15) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double kk = static_cast<double>(k) * static_cast<double>(k);
        const double e = std::exp(-2.0 * kk * x * x);
        const double term = 2.0 * (4.0 * kk * x * x - 1.0) * e;
        sum += term;
        if (std::fabs(term) < 1e-16 && k > 2) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}

double kuiper_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw SpecError("kuiper_quantile: q must be in (0, 1)");
    double lo = 0.3, hi = 5.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kuiper_tail(mid) > 1.0 - q)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

TestResult epidemic_test(std::span<const double> values, const UIConfig& config,
                         const CriticalValueTable& table) {
    check_alpha(config.alpha);
    if (!(config.level > 0.0 && config.level < 1.0))
        throw SpecError("epidemic_test: level must be in (0, 1)");
    if (table.alpha != config.alpha)
        throw SpecError("epidemic_test: table weight exponent does not match the config");
    if (static_cast<std::int64_t>(table.values.size()) < 1000)
        throw SpecError("epidemic_test: table needs >= 1000 replications");

    double sigma_hat;
    if (config.sigma) {
        if (!(*config.sigma > 0.0)) throw SpecError("epidemic_test: sigma must be > 0");
        sigma_hat = *config.sigma;
    } else {
        if (values.size() < 30)
            throw SpecError("epidemic_test: need n >= 30 for the plugin variance estimate");
        sigma_hat = std::sqrt(long_run_variance(values));
    }

    const UiValue ui = ui_statistic(values, config.alpha);

    TestResult res;
    res.statistic = ui.value / sigma_hat;
    res.sigma_hat = sigma_hat;
    res.i = ui.i;
    res.j = ui.j;
    res.alpha = config.alpha;
    res.level = config.level;
    const auto lb = std::lower_bound(table.values.begin(), table.values.end(), res.statistic);
    const std::int64_t r = static_cast<std::int64_t>(table.values.end() - lb);
    res.p_value = static_cast<double>(r + 1) / static_cast<double>(table.values.size() + 1);
    res.reject = res.p_value < config.level;
    return res;
}

double consistency_drift(std::int64_t n, std::int64_t l, double delta, double alpha) {
    if (!(l >= 1 && l <= n - 1)) throw SpecError("consistency_drift: need 1 <= l <= n - 1");
    check_alpha(alpha);
    const double ln = static_cast<double>(l) * static_cast<double>(n - l);
    return std::pow(ln, 1.0 - alpha) * std::fabs(delta) /
           std::pow(static_cast<double>(n), 1.5 - 2.0 * alpha);
}

std::vector<PowerPoint> power_curve(const ProcessSpec& spec, std::int64_t n,
                                    const UIConfig& config, const CriticalValueTable& table,
                                    std::span<const double> deltas, std::int64_t l,
                                    std::int64_t reps, std::uint64_t seed) {
    if (reps < 200) throw SpecError("power_curve: reps must be >= 200");
    if (!(l >= 1 && l <= n - 2)) throw SpecError("power_curve: need 1 <= l <= n - 2");
    validate(spec);
    const std::int64_t m1 = (n - l) / 2;
    if (m1 < 1) throw SpecError("power_curve: epidemic segment leaves no margin");

    std::vector<PowerPoint> out;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        const std::uint64_t dseed = child_seed(seed, static_cast<std::uint64_t>(di));
        std::vector<unsigned char> rejects(static_cast<std::size_t>(reps), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (std::int64_t r = 0; r < reps; ++r) {
            SamplePath path = generate(spec, n, child_seed(dseed, static_cast<std::uint64_t>(r)));
            inject_epidemic(path, m1, m1 + l, deltas[di]);
            const TestResult res = epidemic_test(path.values, config, table);
            rejects[static_cast<std::size_t>(r)] = res.reject ? 1 : 0;
        }
        std::int64_t count = 0;
        for (unsigned char v : rejects) count += v;
        PowerPoint pt;
        pt.delta = deltas[di];
        pt.power = static_cast<double>(count) / static_cast<double>(reps);
        pt.std_error = std::sqrt(pt.power * (1.0 - pt.power) / static_cast<double>(reps));
        pt.drift = consistency_drift(n, l, deltas[di], config.alpha);
        out.push_back(pt);
    }
    return out;
}

AdmissibleAlpha admissible_alpha(const RateFit& fit, double p) {
    AdmissibleAlpha out;
    out.note = "advisory: working criterion (1+eta)/p < 1/2 - alpha";
    if (!(p > 2.0)) {
        out.valid = false;
        out.note += "; requires p > 2";
        return out;
    }
    switch (fit.kind) {
        case RateFit::Kind::Polynomial: {
            const double A = fit.exponent;
            if (!(A > 0.0)) {
                out.valid = false;
                out.note += "; polynomial fit needs a positive exponent";
                return out;
            }
            out.eta_min = (p - 2.0) * (p - 1.0) / (2.0 * A * p + p - 2.0);
            break;
        }
        case RateFit::Kind::Exponential:
        case RateFit::Kind::ExactMDependent:
            out.eta_min = 0.0;  // any eta > 0 is admissible for fast decay
            break;
    }
    out.alpha_max = 0.5 - (1.0 + out.eta_min) / p;
    out.valid = out.alpha_max > 0.0;
    if (!out.valid) out.note += "; no positive alpha satisfies the criterion";
    return out;
}

void save_table(const CriticalValueTable& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("save_table: cannot open " + path);
    os << "alpha=" << Report::format_double(table.alpha) << " grid=" << table.grid
       << " reps=" << table.reps << " seed=" << table.seed << "\n";
    for (double v : table.values) os << Report::format_double(v) << "\n";
    if (!os) throw DataError("save_table: write failed for " + path);
}

CriticalValueTable load_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("load_table: cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw DataError("load_table: empty file " + path);

    CriticalValueTable table;
    std::istringstream hs(header);
    std::string tok;
    bool saw_alpha = false, saw_grid = false, saw_reps = false, saw_seed = false;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw DataError("load_table: malformed header token '" + tok + "' in " + path);
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        try {
            if (key == "alpha") {
                table.alpha = std::stod(val);
                saw_alpha = true;
            } else if (key == "grid") {
                table.grid = std::stoll(val);
                saw_grid = true;
            } else if (key == "reps") {
                table.reps = std::stoll(val);
                saw_reps = true;
            } else if (key == "seed") {
                table.seed = std::stoull(val);
                saw_seed = true;
            } else {
                throw DataError("load_table: unknown header key '" + key + "' in " + path);
            }
        } catch (const std::invalid_argument&) {
            throw DataError("load_table: bad value for '" + key + "' in " + path);
        } catch (const std::out_of_range&) {
            throw DataError("load_table: out-of-range value for '" + key + "' in " + path);
        }
    }
    if (!saw_alpha || !saw_grid || !saw_reps || !saw_seed)
        throw DataError("load_table: header must carry alpha, grid, reps, seed: " + path);

    std::string line;
    std::int64_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        while (end && *end == ' ') ++end;
        if (!end || *end != '\0')
            throw DataError("load_table: non-numeric value at line " + std::to_string(lineno) +
                            " in " + path);
        table.values.push_back(v);
    }
    if (static_cast<std::int64_t>(table.values.size()) != table.reps)
        throw DataError("load_table: expected " + std::to_string(table.reps) + " values, found " +
                        std::to_string(table.values.size()) + " in " + path);
    if (!std::is_sorted(table.values.begin(), table.values.end()))
        throw DataError("load_table: values are not sorted ascending in " + path);
    return table;
}

}  // namespace splitsim
