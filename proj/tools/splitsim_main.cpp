// Command-line surface. Single-threaded dispatcher; replication-level
// parallelism lives in the library and never changes report bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "splitsim/blocking.hpp"
#include "splitsim/changepoint.hpp"
#include "splitsim/dependence.hpp"
#include "splitsim/errors.hpp"
#include "splitsim/increments.hpp"
#include "splitsim/mc.hpp"
#include "splitsim/process.hpp"
#include "splitsim/report.hpp"
#include "splitsim/series_io.hpp"
#include "splitsim/version.hpp"

namespace {

using namespace splitsim;

// ---- process flag bundle --------------------------------------------------

struct ProcessOptions {
    std::string process = "linear";
    std::string dist = "normal";
    double df = 4.0;
    std::uint64_t stream = 0;
    // mdep
    int m0 = 1;
    std::vector<double> weights{1.0, 1.0};
    // linear / lineardep coefficient rule
    std::string coeff = "exponential";
    std::vector<double> coeffs;
    double decay = 0.5;
    bool causal = true;
    // ar1
    double phi = 0.5;
    int burn_in = 1000;
    // auggarch
    double omega = 0.1;
    double alpha1 = 0.1;
    double beta1 = 0.8;
    // doubling
    std::string periodic = "cos";
    int depth = 64;
};

void add_process_options(CLI::App* cmd, ProcessOptions& o, const std::string& pfx,
                         bool allow_nested) {
    auto name = [&pfx](const char* base) { return "--" + pfx + base; };
    std::vector<std::string> kinds{"mdep", "linear", "ar1", "auggarch", "doubling"};
    if (allow_nested) kinds.push_back("lineardep");
    cmd->add_option(name("process"), o.process, "Process kind")
        ->check(CLI::IsMember(kinds))
        ->capture_default_str();
    cmd->add_option(name("dist"), o.dist, "Innovation distribution")
        ->check(CLI::IsMember({"normal", "rademacher", "bit", "student"}))
        ->capture_default_str();
    cmd->add_option(name("df"), o.df, "Student-t degrees of freedom (> 2)")->capture_default_str();
    cmd->add_option(name("stream"), o.stream, "Innovation stream id")->capture_default_str();
    cmd->add_option(name("m0"), o.m0, "mdep: moving-average span")->capture_default_str();
    cmd->add_option(name("weights"), o.weights, "mdep: weights w_0..w_m0");
    cmd->add_option(name("coeff"), o.coeff, "linear: coefficient rule")
        ->check(CLI::IsMember({"explicit", "exponential", "polynomial"}))
        ->capture_default_str();
    cmd->add_option(name("coeffs"), o.coeffs, "linear: explicit coefficients");
    cmd->add_option(name("decay"), o.decay,
                    "linear: exponential base in (0,1) or polynomial exponent A > 0")
        ->capture_default_str();
    cmd->add_flag(name("causal") + ",!" + name("two-sided"), o.causal,
                  "linear: causal (one-sided) filter");
    cmd->add_option(name("phi"), o.phi, "ar1: contraction coefficient, |phi| < 1")
        ->capture_default_str();
    cmd->add_option(name("burn-in"), o.burn_in, "ar1/auggarch: burn-in length")
        ->capture_default_str();
    cmd->add_option(name("omega"), o.omega, "auggarch: variance intercept")->capture_default_str();
    cmd->add_option(name("alpha1"), o.alpha1, "auggarch: squared-innovation load")
        ->capture_default_str();
    cmd->add_option(name("beta1"), o.beta1, "auggarch: variance persistence")
        ->capture_default_str();
    cmd->add_option(name("periodic"), o.periodic, "doubling: periodic function")
        ->check(CLI::IsMember({"cos", "sin", "triangle"}))
        ->capture_default_str();
    cmd->add_option(name("depth"), o.depth, "doubling: dyadic digit depth, 1..64")
        ->capture_default_str();
}

Distribution parse_dist(const std::string& s) {
    if (s == "normal") return Distribution::StandardNormal;
    if (s == "rademacher") return Distribution::Rademacher;
    if (s == "bit") return Distribution::UniformBit;
    return Distribution::StudentT;
}

CoefficientRule make_rule(const ProcessOptions& o) {
    CoefficientRule rule;
    rule.causal = o.causal;
    rule.decay = o.decay;
    rule.coeffs = o.coeffs;
    if (o.coeff == "explicit")
        rule.kind = CoefficientRule::Kind::Explicit;
    else if (o.coeff == "polynomial")
        rule.kind = CoefficientRule::Kind::Polynomial;
    else
        rule.kind = CoefficientRule::Kind::Exponential;
    return rule;
}

PeriodicFunction parse_periodic(const std::string& s) {
    if (s == "sin") return PeriodicFunction::SinTwoPi;
    if (s == "triangle") return PeriodicFunction::Triangle;
    return PeriodicFunction::CosTwoPi;
}

ProcessSpec make_spec(const ProcessOptions& o, const ProcessOptions* inner) {
    ProcessSpec spec;
    spec.innovations.distribution = parse_dist(o.dist);
    spec.innovations.df = o.df;
    spec.innovations.seed = o.stream;
    if (o.process == "mdep") {
        spec.kind = MDepParams{o.m0, o.weights};
    } else if (o.process == "linear") {
        spec.kind = LinearParams{make_rule(o)};
    } else if (o.process == "ar1") {
        spec.kind = RecurrenceParams{o.phi, o.burn_in};
    } else if (o.process == "auggarch") {
        spec.kind = AugGarchParams{o.omega, o.alpha1, o.beta1, o.burn_in};
    } else if (o.process == "doubling") {
        spec.kind = ErgodicDoublingParams{parse_periodic(o.periodic), o.depth};
    } else if (o.process == "lineardep") {
        if (inner == nullptr)
            throw SpecError("lineardep requires the --inner-* process options");
        if (inner->process == "lineardep")
            throw SpecError("the inner process of lineardep cannot itself be lineardep "
                            "on the command line");
        auto inner_spec = std::make_shared<ProcessSpec>(make_spec(*inner, nullptr));
        spec.kind = LinearDependentParams{make_rule(o), inner_spec};
    } else {
        throw SpecError("unknown process kind: " + o.process);
    }
    validate(spec);
    return spec;
}

void echo_process(Report& r, const ProcessOptions& o, const std::string& pfx) {
    r.put(pfx + "process", o.process);
    r.put(pfx + "dist", o.dist);
    if (o.dist == "student") r.put(pfx + "df", o.df);
    r.put(pfx + "stream", o.stream);
    if (o.process == "mdep") {
        r.put(pfx + "m0", static_cast<std::int64_t>(o.m0));
        r.put_array(pfx + "weights", o.weights);
    } else if (o.process == "linear" || o.process == "lineardep") {
        r.put(pfx + "coeff", o.coeff);
        if (o.coeff == "explicit")
            r.put_array(pfx + "coeffs", o.coeffs);
        else
            r.put(pfx + "decay", o.decay);
        r.put(pfx + "causal", o.causal);
    } else if (o.process == "ar1") {
        r.put(pfx + "phi", o.phi);
        r.put(pfx + "burn-in", static_cast<std::int64_t>(o.burn_in));
    } else if (o.process == "auggarch") {
        r.put(pfx + "omega", o.omega);
        r.put(pfx + "alpha1", o.alpha1);
        r.put(pfx + "beta1", o.beta1);
        r.put(pfx + "burn-in", static_cast<std::int64_t>(o.burn_in));
    } else if (o.process == "doubling") {
        r.put(pfx + "periodic", o.periodic);
        r.put(pfx + "depth", static_cast<std::int64_t>(o.depth));
    }
}

// ---- output plumbing --------------------------------------------------------

void emit(const Report& r, const std::string& out_path) {
    const std::string text = r.to_text();
    std::fwrite(text.data(), 1, text.size(), stdout);
    if (!out_path.empty()) r.save(out_path);
}

void write_plot(const std::string& path, std::span<const double> x, std::span<const double> y) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("plot: cannot open " + path);
    std::string text;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        text += Report::format_double(x[i]);
        text += ' ';
        text += Report::format_double(y[i]);
        text += '\n';
    }
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw DataError("plot: write failed for " + path);
}

int resolve_threads(int threads) {
#ifdef _OPENMP
    if (threads >= 1) omp_set_num_threads(threads);
    return threads >= 1 ? threads : omp_get_max_threads();
#else
    return 1;
#endif
}

// ---- per-command option bundles ---------------------------------------------

struct SimulateOpts {
    ProcessOptions proc, inner;
    std::int64_t n = 1000;
    std::uint64_t seed = 1;
    std::string out_series;
    std::int64_t inject_m1 = 0, inject_m2 = 0;
    double inject_delta = 0.0;
    std::string out, plot_prefix;
};

void run_simulate(const SimulateOpts& o) {
    const ProcessSpec spec = make_spec(o.proc, &o.inner);
    SamplePath path = generate(spec, o.n, o.seed);
    if (o.inject_m1 != 0 || o.inject_m2 != 0)
        inject_epidemic(path, o.inject_m1, o.inject_m2, o.inject_delta);
    save_series(o.out_series, path.values);

    Report r;
    r.put("command", std::string("simulate"));
    r.put("n", o.n);
    r.put("seed", o.seed);
    echo_process(r, o.proc, "");
    if (o.proc.process == "lineardep") echo_process(r, o.inner, "inner-");
    if (path.epidemic) {
        r.put("inject-m1", path.epidemic->m1);
        r.put("inject-m2", path.epidemic->m2);
        r.put("inject-delta", path.epidemic->delta);
    }
    if (const auto s2 = theoretical_sigma2(spec)) r.put("sigma2-theory", *s2);
    r.put("series", o.out_series);
    if (!o.plot_prefix.empty()) {
        std::vector<double> xs(path.values.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i + 1);
        write_plot(o.plot_prefix + "_series.dat", xs, path.values);
        r.put("plot-series", o.plot_prefix + "_series.dat");
    }
    emit(r, o.out);
}

struct DepcheckOpts {
    ProcessOptions proc, inner;
    std::vector<int> m_list{2, 4, 8, 16};
    double p = 2.0;
    std::int64_t reps = 10000;
    std::uint64_t seed = 1;
    double p_moment = 0.0;
    std::string out, plot_prefix;
};

void run_depcheck(const DepcheckOpts& o) {
    const ProcessSpec spec = make_spec(o.proc, &o.inner);
    std::vector<RateEstimate> points;
    for (std::size_t i = 0; i < o.m_list.size(); ++i)
        points.push_back(estimate_delta(spec, o.m_list[i], o.p, o.reps,
                                        child_seed(o.seed, static_cast<std::uint64_t>(i))));

    Report r;
    r.put("command", std::string("depcheck"));
    echo_process(r, o.proc, "");
    if (o.proc.process == "lineardep") echo_process(r, o.inner, "inner-");
    r.put("p", o.p);
    r.put("reps", o.reps);
    r.put("seed", o.seed);

    std::vector<double> ms, deltas, ses;
    for (const auto& pt : points) {
        ms.push_back(static_cast<double>(pt.m));
        deltas.push_back(pt.value);
        ses.push_back(pt.std_error);
    }
    r.put_array("m", ms);
    r.put_array("delta", deltas);
    r.put_array("delta-se", ses);

    bool have_fit = false;
    RateFit fit;
    try {
        fit = fit_rate(points);
        have_fit = true;
    } catch (const SpecError& e) {
        r.put("fit-kind", std::string("none"));
        r.put("fit-note", std::string(e.what()));
    }
    if (have_fit) {
        const char* kind = fit.kind == RateFit::Kind::Polynomial     ? "polynomial"
                           : fit.kind == RateFit::Kind::Exponential ? "exponential"
                                                                    : "exact-m-dependent";
        r.put("fit-kind", std::string(kind));
        r.put("fit-exponent", fit.exponent);
        r.put("fit-r2", fit.fit_quality);
        if (o.p_moment > 2.0) {
            const AdmissibleAlpha adm = admissible_alpha(fit, o.p_moment);
            r.put("admissible-p", o.p_moment);
            r.put("admissible-eta-min", adm.eta_min);
            r.put("admissible-alpha-max", adm.alpha_max);
            r.put("admissible-valid", adm.valid);
            r.put("admissible-note", adm.note);
        }
    }
    if (!o.plot_prefix.empty()) {
        write_plot(o.plot_prefix + "_delta.dat", ms, deltas);
        r.put("plot-delta", o.plot_prefix + "_delta.dat");
    }
    emit(r, o.out);
}

struct BlocksOpts {
    ProcessOptions proc, inner;
    std::int64_t n = 100000;
    double p = 6.0, eta = 1.0, eps0 = 0.1, eps1 = 0.5;
    std::string mode = "poly";
    double sigma2 = 1.0;
    std::int64_t reps = 0;
    std::uint64_t seed = 1;
    std::string out, plot_prefix;
};

void run_blocks(const BlocksOpts& o) {
    const BlockMode mode =
        o.mode == "log" ? BlockMode::ExponentialLogBlocks : BlockMode::Polynomial;
    const SplitParams params = derive_params(o.p, o.eta, o.eps0, o.eps1, mode);
    const BlockLayout layout = build_layout(o.n, params);

    VarianceLadder ladder;
    double sigma2_ref = o.sigma2;
    bool mc_ladder = o.reps > 0;
    if (mc_ladder) {
        const ProcessSpec spec = make_spec(o.proc, &o.inner);
        ladder = estimate_block_variances(spec, layout, o.reps, o.seed);
        if (const auto s2 = theoretical_sigma2(spec)) sigma2_ref = *s2;
    } else {
        ladder = exact_ladder(layout, o.sigma2);
    }

    Report r;
    r.put("command", std::string("blocks"));
    r.put("n", o.n);
    r.put("p", o.p);
    r.put("eta", o.eta);
    r.put("eps0", o.eps0);
    r.put("eps1", o.eps1);
    r.put("mode", o.mode);
    r.put("alpha", params.alpha);
    r.put("beta", params.beta);
    r.put("delta", params.delta);
    r.put("gamma", params.gamma);
    r.put("a-min", params.a_min);
    r.put("eps1-effective", layout.eps1_effective);
    r.put("blocks", static_cast<std::int64_t>(layout.blocks.size()));
    r.put("complete-pairs", layout.complete_pairs);
    if (mc_ladder) {
        echo_process(r, o.proc, "");
        if (o.proc.process == "lineardep") echo_process(r, o.inner, "inner-");
        r.put("reps", o.reps);
        r.put("seed", o.seed);
    }
    r.put("sigma2-ref", sigma2_ref);

    std::vector<double> ks, isz, jsz, msch;
    for (std::int64_t k = 1; k <= layout.complete_pairs; ++k) {
        ks.push_back(static_cast<double>(k));
        msch.push_back(static_cast<double>(layout.m_schedule[static_cast<std::size_t>(k - 1)]));
    }
    for (const Block& b : layout.blocks) {
        if (b.partial) continue;
        (b.kind == Block::Kind::I ? isz : jsz).push_back(static_cast<double>(b.size()));
    }
    isz.resize(ks.size());
    jsz.resize(ks.size());
    r.put_array("pair", ks);
    r.put_array("i-size", isz);
    r.put_array("j-size", jsz);
    r.put_array("m-schedule", msch);

    if (layout.complete_pairs >= 10) {
        const ScalingReport sc = verify_scaling(ladder, layout, sigma2_ref);
        r.put("t2-slope", sc.t2_slope);
        r.put("t2-slope-r2", sc.t2_slope_r2);
        r.put("max-s2-jump", sc.max_s2_jump);
        r.put("max-t2-jump", sc.max_t2_jump);
        r.put("bounded-ratio-max", sc.bounded_ratio_max);
        std::vector<double> ns;
        for (std::int64_t v : sc.n_points) ns.push_back(static_cast<double>(v));
        r.put_array("n-points", ns);
        r.put_array("s2-over-n", sc.s2_over_n);
        r.put_array("t2", sc.t2_points);
        if (!o.plot_prefix.empty()) {
            write_plot(o.plot_prefix + "_s2.dat", ns, sc.s2_over_n);
            write_plot(o.plot_prefix + "_t2.dat", ns, sc.t2_points);
            r.put("plot-s2", o.plot_prefix + "_s2.dat");
            r.put("plot-t2", o.plot_prefix + "_t2.dat");
        }
    } else {
        r.put("scaling", std::string("skipped: needs >= 10 complete pairs"));
    }
    emit(r, o.out);
}

struct IncrementsOpts {
    ProcessOptions proc, inner;
    std::string series;
    std::int64_t n = 10000;
    std::int64_t reps = 0;
    std::uint64_t seed = 1;
    std::string rule = "power";
    double rho = 0.6, c = 0.5;
    std::optional<double> sigma;
    std::string out, plot_prefix;
};

void run_increments(const IncrementsOpts& o) {
    WindowRule rule;
    rule.form = o.rule == "prop" ? WindowRule::Form::Proportional : WindowRule::Form::Power;
    rule.rho = o.rho;
    rule.c = o.c;

    Report r;
    r.put("command", std::string("increments"));
    r.put("rule", o.rule);
    r.put(o.rule == "prop" ? "c" : "rho", o.rule == "prop" ? o.c : o.rho);

    if (!o.series.empty()) {
        const std::vector<double> values = parse_series(o.series);
        const std::int64_t n = static_cast<std::int64_t>(values.size());
        const double sigma_hat = o.sigma ? *o.sigma : std::sqrt(long_run_variance(values));
        const double stat = increment_statistic(values, rule, sigma_hat);
        const double a_real = rule.a(static_cast<double>(n));
        const auto a = std::max<std::int64_t>(
            1, std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::floor(a_real))));
        const WindowMax wm = window_max(values, a);
        r.put("series", o.series);
        r.put("n", n);
        r.put("a", a);
        r.put("beta", beta(rule, static_cast<double>(n)));
        r.put("sigma-hat", sigma_hat);
        r.put("window-max", wm.value);
        r.put("window-k", wm.k);
        r.put("window-l", wm.l);
        r.put("statistic", stat);
        emit(r, o.out);
        return;
    }

    if (o.reps < 2) throw SpecError("increments: give --series or --reps >= 2");
    const ProcessSpec spec = make_spec(o.proc, &o.inner);
    ExperimentConfig cfg;
    cfg.root_seed = o.seed;
    cfg.reps = o.reps;
    cfg.label = "increment-statistic";
    const RunSummary summary = run(cfg, [&](std::int64_t, std::uint64_t seed) {
        const SamplePath path = generate(spec, o.n, seed);
        const double sigma_hat =
            o.sigma ? *o.sigma : std::sqrt(long_run_variance(path.values));
        return increment_statistic(path.values, rule, sigma_hat);
    });

    echo_process(r, o.proc, "");
    if (o.proc.process == "lineardep") echo_process(r, o.inner, "inner-");
    r.put("n", o.n);
    r.put("reps", o.reps);
    r.put("seed", o.seed);
    if (o.sigma) r.put("sigma", *o.sigma);
    r.put("mean", summary.mean);
    r.put("std-error", summary.std_error);
    std::vector<double> sorted = summary.values;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.5, 0.9, 0.95, 0.99}) {
        const QuantileEstimate qe = empirical_quantile(sorted, q);
        r.put("q" + std::to_string(static_cast<int>(q * 100)), qe.value);
    }
    r.put_array("statistics", summary.values);
    if (!o.plot_prefix.empty()) {
        std::vector<double> ecdf(sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            ecdf[i] = static_cast<double>(i + 1) / static_cast<double>(sorted.size());
        write_plot(o.plot_prefix + "_ecdf.dat", sorted, ecdf);
        r.put("plot-ecdf", o.plot_prefix + "_ecdf.dat");
    }
    emit(r, o.out);
}

struct CritvalsOpts {
    double alpha = 0.25;
    std::int64_t grid = 2000;
    std::int64_t reps = 20000;
    std::uint64_t seed = 1;
    std::string out_table, load;
    std::vector<double> qs{0.90, 0.95, 0.99};
    std::string out, plot_prefix;
};

void run_critvals(const CritvalsOpts& o) {
    CriticalValueTable table;
    if (!o.load.empty()) {
        table = load_table(o.load);
    } else {
        table = simulate_null_reference(o.alpha, o.grid, o.reps, o.seed);
        if (!o.out_table.empty()) save_table(table, o.out_table);
    }

    Report r;
    r.put("command", std::string("critvals"));
    r.put("alpha", table.alpha);
    r.put("grid", table.grid);
    r.put("reps", table.reps);
    r.put("seed", table.seed);
    if (!o.load.empty()) r.put("load", o.load);
    if (!o.out_table.empty()) r.put("table", o.out_table);
    for (double q : o.qs) {
        const QuantileEstimate qe = empirical_quantile(table.values, q);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", q);
        const std::string tag(buf);
        r.put("q" + tag, qe.value);
        r.put("q" + tag + "-ci-lo", qe.ci_lo);
        r.put("q" + tag + "-ci-hi", qe.ci_hi);
        if (table.alpha == 0.0) r.put("q" + tag + "-range-asymptote", kuiper_quantile(q));
    }
    if (!o.plot_prefix.empty()) {
        std::vector<double> ecdf(table.values.size());
        for (std::size_t i = 0; i < ecdf.size(); ++i)
            ecdf[i] = static_cast<double>(i + 1) / static_cast<double>(ecdf.size());
        write_plot(o.plot_prefix + "_cdf.dat", table.values, ecdf);
        r.put("plot-cdf", o.plot_prefix + "_cdf.dat");
    }
    emit(r, o.out);
}

struct DetectOpts {
    std::string series, table;
    double alpha = 0.25, level = 0.05;
    std::optional<double> sigma;
    std::string out;
};

void run_detect(const DetectOpts& o) {
    const CriticalValueTable table = load_table(o.table);
    const std::vector<double> values = parse_series(o.series);
    UIConfig cfg;
    cfg.alpha = o.alpha;
    cfg.level = o.level;
    cfg.sigma = o.sigma;
    const TestResult res = epidemic_test(values, cfg, table);

    Report r;
    r.put("command", std::string("detect"));
    r.put("series", o.series);
    r.put("table", o.table);
    r.put("n", static_cast<std::int64_t>(values.size()));
    r.put("alpha", res.alpha);
    r.put("level", res.level);
    r.put("table-grid", table.grid);
    r.put("table-reps", table.reps);
    r.put("sigma-hat", res.sigma_hat);
    r.put("statistic", res.statistic);
    r.put("p-value", res.p_value);
    r.put("reject", res.reject);
    r.put("argmax-i", res.i);
    r.put("argmax-j", res.j);
    emit(r, o.out);
}

struct PowerOpts {
    ProcessOptions proc, inner;
    std::int64_t n = 2000, l = 400;
    std::vector<double> deltas{0.25, 0.5, 1.0};
    std::int64_t reps = 500;
    std::uint64_t seed = 1;
    double alpha = 0.25, level = 0.05;
    std::optional<double> sigma;
    std::string table;
    std::string out, plot_prefix;
};

void run_power(const PowerOpts& o) {
    const CriticalValueTable table = load_table(o.table);
    const ProcessSpec spec = make_spec(o.proc, &o.inner);
    UIConfig cfg;
    cfg.alpha = o.alpha;
    cfg.level = o.level;
    cfg.sigma = o.sigma;
    const std::vector<PowerPoint> pts =
        power_curve(spec, o.n, cfg, table, o.deltas, o.l, o.reps, o.seed);

    Report r;
    r.put("command", std::string("power"));
    echo_process(r, o.proc, "");
    if (o.proc.process == "lineardep") echo_process(r, o.inner, "inner-");
    r.put("n", o.n);
    r.put("l", o.l);
    r.put("reps", o.reps);
    r.put("seed", o.seed);
    r.put("alpha", o.alpha);
    r.put("level", o.level);
    if (o.sigma) r.put("sigma", *o.sigma);
    r.put("table", o.table);
    std::vector<double> ds, pw, se, dr;
    for (const PowerPoint& pt : pts) {
        ds.push_back(pt.delta);
        pw.push_back(pt.power);
        se.push_back(pt.std_error);
        dr.push_back(pt.drift);
    }
    r.put_array("delta", ds);
    r.put_array("power", pw);
    r.put_array("power-se", se);
    r.put_array("drift", dr);
    if (!o.plot_prefix.empty()) {
        write_plot(o.plot_prefix + "_power.dat", ds, pw);
        r.put("plot-power", o.plot_prefix + "_power.dat");
    }
    emit(r, o.out);
}

void add_common_output(CLI::App* cmd, std::string& out, std::string& plot_prefix) {
    cmd->add_option("--out", out, "Also write the report to this file");
    cmd->add_option("--plot-prefix", plot_prefix, "Write two-column plot data files");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split invariance toolkit: simulation, dependence diagnostics, "
                 "block ladders, increment statistics, and epidemic change tests"};
    app.set_version_flag("--version", std::string(splitsim::kVersion));
    app.set_config("--config", "", "INI config file (sections per command; flags override)");
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (results never depend on this)");
    app.require_subcommand(1);

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate a process path into a series file");
    c_sim->add_option("--n", sim.n, "Path length")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Root seed")->capture_default_str();
    c_sim->add_option("--out-series", sim.out_series, "Output series file")->required();
    c_sim->add_option("--inject-m1", sim.inject_m1, "Epidemic: last index before the segment");
    c_sim->add_option("--inject-m2", sim.inject_m2, "Epidemic: last index of the segment");
    c_sim->add_option("--inject-delta", sim.inject_delta, "Epidemic: mean shift");
    add_process_options(c_sim, sim.proc, "", true);
    add_process_options(c_sim, sim.inner, "inner-", false);
    add_common_output(c_sim, sim.out, sim.plot_prefix);
    c_sim->callback([&] {
        resolve_threads(threads);
        run_simulate(sim);
    });

    DepcheckOpts dep;
    auto* c_dep = app.add_subcommand("depcheck", "Estimate the coupling-distance curve and fit "
                                                 "its decay law");
    c_dep->add_option("--m", dep.m_list, "Window sizes");
    c_dep->add_option("--p", dep.p, "Norm order")->capture_default_str();
    c_dep->add_option("--reps", dep.reps, "Replications per point")->capture_default_str();
    c_dep->add_option("--seed", dep.seed, "Root seed")->capture_default_str();
    c_dep->add_option("--p-moment", dep.p_moment,
                      "Moment exponent for the advisory weight-exponent bound (0 = off)");
    add_process_options(c_dep, dep.proc, "", true);
    add_process_options(c_dep, dep.inner, "inner-", false);
    add_common_output(c_dep, dep.out, dep.plot_prefix);
    c_dep->callback([&] {
        resolve_threads(threads);
        run_depcheck(dep);
    });

    BlocksOpts blk;
    auto* c_blk = app.add_subcommand("blocks", "Derive split parameters, tile the index range, "
                                               "and report the variance ladder scaling");
    c_blk->add_option("--n", blk.n, "Index range length")->capture_default_str();
    c_blk->add_option("--p", blk.p, "Moment exponent")->capture_default_str();
    c_blk->add_option("--eta", blk.eta, "Moment margin")->capture_default_str();
    c_blk->add_option("--eps0", blk.eps0, "Slack parameter in (0, 1/2)")->capture_default_str();
    c_blk->add_option("--eps1", blk.eps1, "Window-schedule scale")->capture_default_str();
    c_blk->add_option("--mode", blk.mode, "Block growth: poly or log")
        ->check(CLI::IsMember({"poly", "log"}))
        ->capture_default_str();
    c_blk->add_option("--sigma2", blk.sigma2, "Per-pair variance for the exact ladder and the "
                                              "scaling reference")
        ->capture_default_str();
    c_blk->add_option("--reps", blk.reps, "Monte Carlo replications (0 = exact ladder)")
        ->capture_default_str();
    c_blk->add_option("--seed", blk.seed, "Root seed")->capture_default_str();
    add_process_options(c_blk, blk.proc, "", true);
    add_process_options(c_blk, blk.inner, "inner-", false);
    add_common_output(c_blk, blk.out, blk.plot_prefix);
    c_blk->callback([&] {
        resolve_threads(threads);
        run_blocks(blk);
    });

    IncrementsOpts inc;
    auto* c_inc = app.add_subcommand("increments", "Normalized maximal window increment of a "
                                                   "series or a replication study");
    c_inc->add_option("--series", inc.series, "Series file (data mode)");
    c_inc->add_option("--n", inc.n, "Path length (study mode)")->capture_default_str();
    c_inc->add_option("--reps", inc.reps, "Replications (study mode)")->capture_default_str();
    c_inc->add_option("--seed", inc.seed, "Root seed")->capture_default_str();
    c_inc->add_option("--rule", inc.rule, "Window rule: power or prop")
        ->check(CLI::IsMember({"power", "prop"}))
        ->capture_default_str();
    c_inc->add_option("--rho", inc.rho, "Power rule: a_T = T^rho")->capture_default_str();
    c_inc->add_option("--c", inc.c, "Proportional rule: a_T = c T")->capture_default_str();
    c_inc->add_option("--sigma", inc.sigma, "External sigma (plugin estimate if absent)");
    add_process_options(c_inc, inc.proc, "", true);
    add_process_options(c_inc, inc.inner, "inner-", false);
    add_common_output(c_inc, inc.out, inc.plot_prefix);
    c_inc->callback([&] {
        resolve_threads(threads);
        run_increments(inc);
    });

    CritvalsOpts cv;
    auto* c_cv = app.add_subcommand("critvals", "Build or load a null critical-value table");
    c_cv->add_option("--alpha", cv.alpha, "Weight exponent in [0, 1/2)")->capture_default_str();
    c_cv->add_option("--grid", cv.grid, "Bridge grid size")->capture_default_str();
    c_cv->add_option("--reps", cv.reps, "Bridge replications")->capture_default_str();
    c_cv->add_option("--seed", cv.seed, "Root seed")->capture_default_str();
    c_cv->add_option("--out-table", cv.out_table, "Write the table to this file");
    c_cv->add_option("--load", cv.load, "Load an existing table instead of simulating");
    c_cv->add_option("--q", cv.qs, "Quantiles to report");
    add_common_output(c_cv, cv.out, cv.plot_prefix);
    c_cv->callback([&] {
        resolve_threads(threads);
        run_critvals(cv);
    });

    DetectOpts det;
    auto* c_det = app.add_subcommand("detect", "Run the epidemic-change test on a series file");
    c_det->add_option("--series", det.series, "Series file")->required();
    c_det->add_option("--table", det.table, "Critical-value table file")->required();
    c_det->add_option("--alpha", det.alpha, "Weight exponent in [0, 1/2)")->capture_default_str();
    c_det->add_option("--level", det.level, "Test level")->capture_default_str();
    c_det->add_option("--sigma", det.sigma, "External sigma (plugin estimate if absent)");
    c_det->add_option("--out", det.out, "Also write the report to this file");
    c_det->callback([&] {
        resolve_threads(threads);
        run_detect(det);
    });

    PowerOpts pow;
    auto* c_pow = app.add_subcommand("power", "Rejection-rate curve across epidemic shift sizes");
    c_pow->add_option("--n", pow.n, "Path length")->capture_default_str();
    c_pow->add_option("--l", pow.l, "Epidemic segment length")->capture_default_str();
    c_pow->add_option("--deltas", pow.deltas, "Shift sizes");
    c_pow->add_option("--reps", pow.reps, "Replications per shift")->capture_default_str();
    c_pow->add_option("--seed", pow.seed, "Root seed")->capture_default_str();
    c_pow->add_option("--alpha", pow.alpha, "Weight exponent in [0, 1/2)")->capture_default_str();
    c_pow->add_option("--level", pow.level, "Test level")->capture_default_str();
    c_pow->add_option("--sigma", pow.sigma, "External sigma (plugin estimate if absent)");
    c_pow->add_option("--table", pow.table, "Critical-value table file")->required();
    add_process_options(c_pow, pow.proc, "", true);
    add_process_options(c_pow, pow.inner, "inner-", false);
    add_common_output(c_pow, pow.out, pow.plot_prefix);
    c_pow->callback([&] {
        resolve_threads(threads);
        run_power(pow);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const splitsim::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const splitsim::SpecError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
