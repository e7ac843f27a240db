// Acceptance gate: one PASS/FAIL line per criterion, exit code = number of
// failures. argv[1] is the committed reference-data directory, argv[2] the
// command-line binary. Tolerances and committed seeds are pinned here.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "splitsim/blocking.hpp"
#include "splitsim/changepoint.hpp"
#include "splitsim/dependence.hpp"
#include "splitsim/increments.hpp"
#include "splitsim/mc.hpp"
#include "splitsim/numerics.hpp"
#include "splitsim/process.hpp"
#include "splitsim/reference.hpp"
#include "splitsim/rng.hpp"

using namespace splitsim;

namespace {

// Committed seeds: calibrated once against the tolerances below and then
// frozen. Changing any of them invalidates the recorded reference data.
constexpr std::uint64_t kDeltaSeed = 11;
constexpr std::uint64_t kLrvSeed = 1;
constexpr std::uint64_t kMomentSeed = 21;
constexpr std::uint64_t kCrossSeed = 31;
constexpr std::uint64_t kKuiperSeed = 101;
constexpr std::uint64_t kTableSeed = 1;
constexpr std::uint64_t kSizeSeed = 41;
constexpr std::uint64_t kPowerSeed = 51;
constexpr std::uint64_t kIncSeed = 61;
constexpr std::uint64_t kOracleSeed = 71;

std::string g_data_dir;
std::string g_cli;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

ProcessSpec iid_gaussian() {
    ProcessSpec spec;
    spec.kind = MDepParams{0, {1.0}};
    return spec;
}

ProcessSpec linear_expo(bool causal) {
    CoefficientRule rule;
    rule.kind = CoefficientRule::Kind::Exponential;
    rule.decay = 0.5;
    rule.causal = causal;
    ProcessSpec spec;
    spec.kind = LinearParams{rule};
    return spec;
}

// Committed reference files: "key value" per line.
std::map<std::string, double> read_reference(const std::string& name) {
    std::ifstream in(g_data_dir + "/" + name);
    if (!in) throw std::runtime_error("missing reference data: " + name);
    std::map<std::string, double> out;
    std::string key;
    double value;
    while (in >> key >> value) out[key] = value;
    return out;
}

// ---- criterion 1: coupling-distance closed form ----
Outcome criterion1() {
    const ProcessSpec spec = linear_expo(false);
    std::ostringstream detail;
    bool pass = true;
    for (int m : {2, 4, 8}) {
        const RateEstimate est =
            estimate_delta(spec, m, 2.0, 100000, child_seed(kDeltaSeed, static_cast<std::uint64_t>(m)));
        const double target = std::sqrt(closed_form_delta2(spec, m));
        const double err = std::fabs(est.value - target);
        pass = pass && err <= 3.0 * est.std_error;
        detail << "m=" << m << " err=" << fmt(err) << " 3se=" << fmt(3.0 * est.std_error) << " ";
    }
    return {pass, detail.str()};
}

// ---- criterion 2: long-run variance oracle ----
Outcome criterion2() {
    const ProcessSpec spec = linear_expo(true);
    const SamplePath path = generate(spec, 100000, kLrvSeed);
    const double lrv = long_run_variance(path.values);
    const double target = theoretical_sigma2(spec).value();
    const bool pass = std::fabs(lrv - target) <= 0.1 * target;
    return {pass, "lrv=" + fmt(lrv) + " target=" + fmt(target)};
}

// ---- criterion 3: moment growth ratios ----
Outcome criterion3() {
    const std::vector<std::int64_t> grid{100, 1000, 10000};
    bool pass = true;
    std::ostringstream detail;

    const auto iid2 = moment_growth(iid_gaussian(), 2.0, grid, 2000, kMomentSeed);
    for (const auto& pt : iid2) {
        pass = pass && std::fabs(pt.ratio - 1.0) <= 3.0 * pt.std_error;
        detail << "p2@" << pt.n << "=" << fmt(pt.ratio) << " ";
    }
    const auto iid4 = moment_growth(iid_gaussian(), 4.0, grid, 4000, kMomentSeed + 1);
    for (const auto& pt : iid4) {
        pass = pass && std::fabs(pt.ratio - 3.0) <= 3.0 * pt.std_error;
        detail << "p4@" << pt.n << "=" << fmt(pt.ratio) << " ";
    }
    const auto lin4 = moment_growth(linear_expo(true), 4.0, grid, 2000, kMomentSeed + 2);
    std::vector<double> lx, ly;
    for (const auto& pt : lin4) {
        lx.push_back(std::log(static_cast<double>(pt.n)));
        ly.push_back(std::log(pt.ratio));
    }
    const double slope = fit_line(lx, ly).slope;
    pass = pass && std::fabs(slope) <= 0.1;
    detail << "slope=" << fmt(slope);
    return {pass, detail.str()};
}

// ---- criterion 4: derived exponents and the deterministic ladder slope ----
Outcome criterion4() {
    const SplitParams params = derive_params(6.0, 1.0, 0.1, 0.5);
    bool pass = std::fabs(params.alpha - 0.9) <= 1e-12 &&
                std::fabs(params.beta - 0.81) <= 1e-12 &&
                std::fabs(params.delta - 81.0 / 190.0) <= 1e-12 &&
                std::fabs(params.gamma - 181.0 / 190.0) <= 1e-12;

    const BlockLayout layout = build_layout(1000000, params);
    const VarianceLadder ladder = exact_ladder(layout, 1.0);
    const ScalingReport rep = verify_scaling(ladder, layout, 1.0);
    const double target = (1.0 + params.beta) / (1.0 + params.alpha);
    const double err = std::fabs(rep.t2_slope - target);
    pass = pass && err <= 0.01;
    return {pass, "alpha=" + fmt(params.alpha) + " beta=" + fmt(params.beta) +
                      " delta=" + fmt(params.delta, 6) + " gamma=" + fmt(params.gamma, 6) +
                      " slope_err=" + fmt(err)};
}

// ---- criterion 5: near-independence of the two block groups ----
Outcome criterion5() {
    const SplitParams params = derive_params(6.0, 1.0, 0.1, 0.5);
    const BlockLayout layout = build_layout(100000, params);
    const double corr = cross_group_correlation(linear_expo(true), layout, 200, kCrossSeed);
    return {std::fabs(corr) <= 0.1, "corr=" + fmt(corr)};
}

// ---- criterion 6: unweighted null table against the range asymptote ----
Outcome criterion6() {
    const CriticalValueTable table = simulate_null_reference(0.0, 4096, 20000, kKuiperSeed);
    const double d90 = table_quantile(table, 0.90) - kuiper_quantile(0.90);
    const double d95 = table_quantile(table, 0.95) - kuiper_quantile(0.95);
    const bool pass = std::fabs(d90) <= 0.02 && std::fabs(d95) <= 0.02;
    return {pass, "q90_diff=" + fmt(d90) + " q95_diff=" + fmt(d95)};
}

// Shared weighted table for criteria 7 and 8, built once.
const CriticalValueTable& shared_table() {
    static const CriticalValueTable table = simulate_null_reference(0.25, 2000, 20000, kTableSeed);
    return table;
}

// ---- criterion 7: size calibration under the null ----
Outcome criterion7() {
    const CriticalValueTable& table = shared_table();
    const ProcessSpec spec = iid_gaussian();
    UIConfig cfg;
    cfg.alpha = 0.25;
    cfg.level = 0.05;
    int rejects = 0;
    for (int r = 0; r < 1000; ++r) {
        const SamplePath path =
            generate(spec, 2000, child_seed(kSizeSeed, static_cast<std::uint64_t>(r)));
        if (epidemic_test(path.values, cfg, table).reject) ++rejects;
    }
    const double rate = rejects / 1000.0;
    return {rate >= 0.03 && rate <= 0.08, "size=" + fmt(rate)};
}

// ---- criterion 8: power trend with a committed floor ----
Outcome criterion8() {
    const auto ref = read_reference("power_threshold.txt");
    const double threshold = ref.at("threshold");

    const CriticalValueTable& table = shared_table();
    UIConfig cfg;
    cfg.alpha = 0.25;
    cfg.level = 0.05;
    const std::vector<double> deltas{0.25, 0.5, 1.0};
    const auto pts = power_curve(iid_gaussian(), 2000, cfg, table, deltas, 400, 400, kPowerSeed);

    bool pass = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double oracle = consistency_drift(2000, 400, deltas[i], 0.25);
        pass = pass && std::fabs(pts[i].drift - oracle) <= 1e-9;
        detail << "p(" << fmt(deltas[i], 3) << ")=" << fmt(pts[i].power) << " ";
    }
    // Trend: the full sweep rises by more than twice its pooled SE, and no
    // consecutive step falls by more than twice the pooled SE (flat segments
    // at the 1.0 ceiling are not a trend violation).
    const double total = pts.back().power - pts.front().power;
    const double total_se =
        std::sqrt(pts.back().std_error * pts.back().std_error +
                  pts.front().std_error * pts.front().std_error);
    pass = pass && total > 2.0 * total_se;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double se = std::sqrt(pts[i].std_error * pts[i].std_error +
                                    pts[i + 1].std_error * pts[i + 1].std_error);
        pass = pass && pts[i + 1].power >= pts[i].power - 2.0 * se;
    }
    pass = pass && pts.back().power >= threshold;
    detail << "rise=" << fmt(total) << " floor=" << fmt(threshold);
    return {pass, detail.str()};
}

// ---- criterion 9: increment statistic inside the committed band ----
Outcome criterion9() {
    const auto ref = read_reference("increments_band.txt");
    const double lo = ref.at("lo"), hi = ref.at("hi");
    const int min_pass = static_cast<int>(ref.at("min_pass"));

    const ProcessSpec spec = iid_gaussian();
    WindowRule rule;
    rule.form = WindowRule::Form::Power;
    rule.rho = 0.6;
    int inside = 0;
    double vmin = 1e300, vmax = -1e300;
    for (int r = 1; r <= 20; ++r) {
        const SamplePath path =
            generate(spec, 100000, child_seed(kIncSeed, static_cast<std::uint64_t>(r)));
        const double stat = increment_statistic(path.values, rule, 1.0);
        vmin = std::min(vmin, stat);
        vmax = std::max(vmax, stat);
        if (stat >= lo && stat <= hi) ++inside;
    }
    return {inside >= min_pass, "inside=" + std::to_string(inside) + "/20 range=[" +
                                    fmt(vmin) + "," + fmt(vmax) + "] band=[" + fmt(lo) + "," +
                                    fmt(hi) + "]"};
}

// ---- criterion 10: exact oracles, inequality fuzz, invariances ----
Outcome criterion10() {
    std::ostringstream detail;

    // Pair statistic vs direct enumeration.
    const double alphas[] = {0.0, 0.1, 0.25, 0.45};
    int ui_bad = 0;
    for (int t = 0; t < 500; ++t) {
        Rng rng(child_seed(kOracleSeed, 1, static_cast<std::uint64_t>(t)));
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_u64() % 299);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (double& v : x) v = rng.normal();
        const double alpha = alphas[t % 4];
        const UiValue a = ui_statistic(x, alpha);
        const UiValue b = reference::ui_statistic(x, alpha);
        if (a.value != b.value || a.i != b.i || a.j != b.j) ++ui_bad;
    }
    detail << "ui_mismatch=" << ui_bad << " ";

    // Window maximum vs direct enumeration.
    int win_bad = 0;
    for (int t = 0; t < 500; ++t) {
        Rng rng(child_seed(kOracleSeed, 2, static_cast<std::uint64_t>(t)));
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_u64() % 199);
        const std::int64_t a = 1 + static_cast<std::int64_t>(rng.next_u64() %
                                                             static_cast<std::uint64_t>(n - 1));
        std::vector<double> x(static_cast<std::size_t>(n));
        for (double& v : x) v = rng.normal();
        const WindowMax f = window_max(x, a);
        const WindowMax g = reference::window_max(x, a);
        if (f.value != g.value || f.k != g.k || f.l != g.l) ++win_bad;
    }
    detail << "window_mismatch=" << win_bad << " ";

    // Power-inequality fuzz.
    int fuzz_bad = 0;
    Rng fuzz(child_seed(kOracleSeed, 3));
    for (int t = 0; t < 100000; ++t) {
        const double a = -10.0 + 20.0 * fuzz.uniform01();
        const double b = -10.0 + 20.0 * fuzz.uniform01();
        const double p = 1.0 + 7.0 * fuzz.uniform01();
        if (!check_power_inequality(a, b, p)) ++fuzz_bad;
    }
    detail << "fuzz_violations=" << fuzz_bad << " ";

    // Invariances: shifts cancel in the centered pair statistic; binary
    // scalings pass through every kernel bit for bit.
    int inv_bad = 0;
    WindowRule rule;
    rule.rho = 0.6;
    for (int t = 0; t < 50; ++t) {
        Rng rng(child_seed(kOracleSeed, 4, static_cast<std::uint64_t>(t)));
        const std::int64_t n = 20 + static_cast<std::int64_t>(rng.next_u64() % 180);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (double& v : x) v = rng.normal();
        std::vector<double> shifted = x, scaled = x;
        for (double& v : shifted) v += 3.7;
        for (double& v : scaled) v *= 128.0;

        const UiValue base = ui_statistic(x, 0.25);
        const UiValue sh = ui_statistic(shifted, 0.25);
        const UiValue sc = ui_statistic(scaled, 0.25);
        if (std::fabs(sh.value - base.value) > 1e-9 * std::max(1.0, base.value)) ++inv_bad;
        if (sc.value != 128.0 * base.value || sc.i != base.i || sc.j != base.j) ++inv_bad;

        const std::int64_t a = std::max<std::int64_t>(1, n / 3);
        const WindowMax wb = window_max(x, a);
        const WindowMax ws = window_max(scaled, a);
        if (ws.value != 128.0 * wb.value || ws.k != wb.k || ws.l != wb.l) ++inv_bad;
        if (increment_statistic(scaled, rule, 128.0 * 2.0) !=
            increment_statistic(x, rule, 2.0))
            ++inv_bad;
    }
    detail << "invariance_failures=" << inv_bad;
    return {ui_bad == 0 && win_bad == 0 && fuzz_bad == 0 && inv_bad == 0, detail.str()};
}

// ---- criterion 11: byte-identical reports across thread counts ----
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + g_cli + "\" " + args + " >accept_stdout.tmp 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome criterion11() {
    // Library level: the experiment driver at 1 and 8 workers.
    ExperimentConfig cfg;
    cfg.root_seed = 97;
    cfg.reps = 200;
    auto payload = [](std::int64_t, std::uint64_t seed) {
        Rng rng(seed);
        double s = 0.0;
        for (int i = 0; i < 100; ++i) s += rng.normal();
        return s;
    };
    cfg.parallelism = 1;
    const RunSummary one = run(cfg, payload);
    cfg.parallelism = 8;
    const RunSummary eight = run(cfg, payload);
    if (one.values != eight.values) return {false, "library driver differs across workers"};

    // Command level: every subcommand, same flags, workers 1 vs 8.
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"simulate", "simulate --process ar1 --phi 0.4 --n 2000 --seed 3 "
                     "--out-series accept_series.tmp --out accept_rep.txt"},
        {"depcheck", "depcheck --process linear --coeff exponential --decay 0.5 --two-sided "
                     "--m 2 --m 4 --m 8 --p 2 --reps 2000 --seed 1 --out accept_rep.txt"},
        {"blocks", "blocks --n 20000 --mode poly --reps 120 --seed 2 --out accept_rep.txt"},
        {"increments", "increments --n 5000 --reps 50 --seed 4 --out accept_rep.txt"},
        {"critvals", "critvals --alpha 0.25 --grid 512 --reps 2000 --seed 5 "
                     "--out-table accept_table.tmp --out accept_rep.txt"},
        {"detect", "detect --series accept_series.tmp --table accept_table.tmp "
                   "--out accept_rep.txt"},
        {"power", "power --process mdep --m0 0 --weights 1 --n 300 --l 60 --deltas 0 1.5 "
                  "--reps 200 --seed 6 --table accept_table.tmp --out accept_rep.txt"},
    };
    std::ostringstream detail;
    bool pass = true;
    for (const auto& [name, args] : cases) {
        if (run_cli("--threads 1 " + args) != 0) {
            pass = false;
            detail << name << "=error ";
            continue;
        }
        const std::string first = slurp("accept_rep.txt");
        if (run_cli("--threads 8 " + args) != 0) {
            pass = false;
            detail << name << "=error ";
            continue;
        }
        const bool same = first == slurp("accept_rep.txt") && !first.empty();
        pass = pass && same;
        detail << name << (same ? "=ok " : "=DIFFERS ");
    }
    for (const char* f : {"accept_stdout.tmp", "accept_rep.txt", "accept_series.tmp",
                          "accept_table.tmp"})
        std::remove(f);
    return {pass, detail.str()};
}

struct Criterion {
    int id;
    const char* label;
    Outcome (*fn)();
    double budget_s;  // 0 = no stated budget
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <data-dir> <cli-binary>\n";
        return 1;
    }
    g_data_dir = argv[1];
    g_cli = argv[2];

    const Criterion criteria[] = {
        {1, "coupling distance matches its closed form", criterion1, 60},
        {2, "long-run variance matches the filter oracle", criterion2, 10},
        {3, "partial-sum moment ratios are flat at the limit", criterion3, 300},
        {4, "derived exponents and deterministic ladder slope", criterion4, 60},
        {5, "block groups are nearly uncorrelated", criterion5, 300},
        {6, "unweighted null table matches the range asymptote", criterion6, 600},
        {7, "test size is calibrated under the null", criterion7, 900},
        {8, "power rises across shift sizes above the committed floor", criterion8, 0},
        {9, "increment statistics stay inside the committed band", criterion9, 300},
        {10, "exact oracles, inequality fuzz, and invariances", criterion10, 0},
        {11, "reports are byte-identical across worker counts", criterion11, 0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = c.budget_s <= 0.0 || elapsed < c.budget_s;
        const bool pass = out.pass && in_budget;
        if (!pass) ++failures;
        std::printf("%s criterion %d: %s (%s) [%.1fs%s]\n", pass ? "PASS" : "FAIL", c.id,
                    c.label, out.detail.c_str(), elapsed,
                    in_budget ? "" : ", over budget");
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("all %d criteria passed\n",
                    static_cast<int>(std::size(criteria)));
    else
        std::printf("%d criteria failed\n", failures);
    return failures;
}
