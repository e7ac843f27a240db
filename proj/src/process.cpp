#include "splitsim/process.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "splitsim/errors.hpp"
#include "splitsim/rng.hpp"

namespace splitsim {
namespace {

// Stream tags keep the innovation stream, the per-coordinate auxiliary
// streams, and the nested inner-process stream disjoint.
constexpr std::uint64_t kTagInnovation = 0xA001;
constexpr std::uint64_t kTagAux = 0xA002;
constexpr std::uint64_t kTagInner = 0xA003;
// Fixed seed of the AugGarch stationarity screen; a given configuration
// either always passes validation or never does.
constexpr std::uint64_t kScreenSeed = 0x5C12EE11D00DULL;
constexpr int kScreenDraws = 200000;

double draw(Rng& rng, const InnovationSpec& innov) {
    switch (innov.distribution) {
        case Distribution::StandardNormal: return rng.normal();
        case Distribution::Rademacher: return rng.rademacher();
        case Distribution::UniformBit: return rng.bit();
        case Distribution::StudentT: return rng.student_t_standardized(innov.df);
    }
    throw SpecError("unknown innovation distribution");
}

void validate_innovations(const InnovationSpec& innov, bool is_doubling) {
    if (innov.distribution == Distribution::StudentT && !(innov.df > 2.0))
        throw SpecError("innovations: student-t requires df > 2");
    if (is_doubling && innov.distribution != Distribution::UniformBit)
        throw SpecError(
            "doubling process: innovations must be uniform-bit (the digit supply)");
    if (!is_doubling && innov.distribution == Distribution::UniformBit)
        throw SpecError(
            "innovations: uniform-bit is not mean zero; it is only valid as the digit "
            "supply of the doubling process");
}

// Monte Carlo stationarity screen for the variance recursion: requires
// E log(beta1 + alpha1 e^2) < 0. Memoized; the estimate is deterministic.
double screen_e_log_c(double beta1, double alpha1, const InnovationSpec& innov) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, int, double>, double> memo;
    const auto key = std::make_tuple(beta1, alpha1, static_cast<int>(innov.distribution),
                                     innov.distribution == Distribution::StudentT ? innov.df : 0.0);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    Rng rng(kScreenSeed);
    double acc = 0.0;
    for (int i = 0; i < kScreenDraws; ++i) {
        const double e = draw(rng, innov);
        acc += std::log(beta1 + alpha1 * e * e);
    }
    const double est = acc / kScreenDraws;
    std::lock_guard<std::mutex> lock(mu);
    memo[key] = est;
    return est;
}

double periodic_eval(PeriodicFunction f, double x) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    switch (f) {
        case PeriodicFunction::CosTwoPi: return std::cos(kTwoPi * x);
        case PeriodicFunction::SinTwoPi: return std::sin(kTwoPi * x);
        case PeriodicFunction::Triangle: return 4.0 * std::fabs(x - 0.5) - 1.0;
    }
    throw SpecError("unknown periodic function");
}

struct StreamContext {
    InnovationSpec effective;       // distribution/df of the spec, derived seed
    std::uint64_t aux_base = 0;     // per-coordinate auxiliary streams hang off this
    std::uint64_t inner_seed = 0;   // seed for a nested inner process
};

StreamContext make_context(const ProcessSpec& spec, std::uint64_t call_seed) {
    StreamContext ctx;
    ctx.effective = spec.innovations;
    ctx.effective.seed = child_seed(call_seed, spec.innovations.seed);
    ctx.aux_base = child_seed(ctx.effective.seed, kTagAux);
    ctx.inner_seed = child_seed(call_seed, kTagInner);
    return ctx;
}

std::vector<double> gen_range(const ProcessSpec& spec, std::int64_t lo, std::int64_t hi,
                              std::uint64_t call_seed);

struct RangeCoupled {
    std::vector<double> y;
    std::vector<double> y_approx;
};

RangeCoupled gen_range_coupled(const ProcessSpec& spec, std::int64_t lo, std::int64_t hi,
                               std::span<const int> w, std::uint64_t call_seed);

// Digit stream used by the doubling construction: one bit per index, a pure
// function of (seed, index) like every innovation value.
std::vector<std::uint8_t> digit_stream(const InnovationSpec& innov, std::int64_t lo,
                                       std::int64_t hi) {
    const std::uint64_t base = child_seed(innov.seed, kTagInnovation);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(hi - lo + 1));
    const std::int64_t n = hi - lo + 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        Rng rng(child_seed(base, static_cast<std::uint64_t>(lo + i)));
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    }
    return bits;
}

// ---- plain generation per kind ------------------------------------------

std::vector<double> gen_mdep(const MDepParams& p, const StreamContext& ctx, std::int64_t lo,
                             std::int64_t hi) {
    const std::int64_t elo = lo - p.m0;
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, hi);
    auto e = [&](std::int64_t k) { return eps[static_cast<std::size_t>(k - elo)]; };
    std::vector<double> y(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t k = lo; k <= hi; ++k) {
        double s = 0.0;
        for (int i = 0; i <= p.m0; ++i) s += p.weights[static_cast<std::size_t>(i)] * e(k - i);
        y[static_cast<std::size_t>(k - lo)] = s;
    }
    return y;
}

std::vector<double> gen_linear(const LinearParams& p, const StreamContext& ctx, std::int64_t lo,
                               std::int64_t hi) {
    const MaterializedCoefficients co = materialize_coefficients(p.rule);
    const std::int64_t elo = lo - co.j_hi();
    const std::int64_t ehi = hi - co.j_lo;
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, ehi);
    const std::int64_t n = hi - lo + 1;
    std::vector<double> y(static_cast<std::size_t>(n));
    const std::int64_t width = static_cast<std::int64_t>(co.a.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t k = lo; k <= hi; ++k) {
        // Y_k = sum_j a_j e_{k-j}; iterate j descending so eps is read ascending.
        const double* ebase = eps.data() + (k - co.j_hi() - elo);
        double s = 0.0;
        for (std::int64_t t = 0; t < width; ++t)
            s += co.a[static_cast<std::size_t>(width - 1 - t)] * ebase[t];
        y[static_cast<std::size_t>(k - lo)] = s;
    }
    return y;
}

std::vector<double> gen_recurrence(const RecurrenceParams& p, const StreamContext& ctx,
                                   std::int64_t lo, std::int64_t hi) {
    const std::int64_t elo = lo - p.burn_in;
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, hi);
    std::vector<double> y(static_cast<std::size_t>(hi - lo + 1));
    double state = 0.0;
    for (std::int64_t i = elo; i <= hi; ++i) {
        state = p.phi * state + eps[static_cast<std::size_t>(i - elo)];
        if (i >= lo) y[static_cast<std::size_t>(i - lo)] = state;
    }
    return y;
}

std::vector<double> gen_auggarch(const AugGarchParams& p, const StreamContext& ctx,
                                 std::int64_t lo, std::int64_t hi) {
    const std::int64_t elo = lo - p.burn_in;
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, hi);
    auto e = [&](std::int64_t k) { return eps[static_cast<std::size_t>(k - elo)]; };
    std::vector<double> y(static_cast<std::size_t>(hi - lo + 1));
    double v = p.omega;
    if (elo >= lo) y[static_cast<std::size_t>(elo - lo)] = std::sqrt(v) * e(elo);
    for (std::int64_t i = elo + 1; i <= hi; ++i) {
        const double c = p.beta1 + p.alpha1 * e(i - 1) * e(i - 1);
        v = p.omega + c * v;
        if (i >= lo) y[static_cast<std::size_t>(i - lo)] = std::sqrt(v) * e(i);
    }
    return y;
}

std::vector<double> gen_lineardep(const LinearDependentParams& p, const StreamContext& ctx,
                                  std::int64_t lo, std::int64_t hi) {
    const MaterializedCoefficients co = materialize_coefficients(p.rule);
    const std::int64_t ilo = lo - co.j_hi();
    const std::int64_t ihi = hi - co.j_lo;
    const std::vector<double> inner = gen_range(*p.inner, ilo, ihi, ctx.inner_seed);
    auto yin = [&](std::int64_t k) { return inner[static_cast<std::size_t>(k - ilo)]; };
    std::vector<double> z(static_cast<std::size_t>(hi - lo + 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t k = lo; k <= hi; ++k) {
        double s = 0.0;
        for (std::int64_t j = co.j_lo; j <= co.j_hi(); ++j)
            s += co.a[static_cast<std::size_t>(j - co.j_lo)] * yin(k - j);
        z[static_cast<std::size_t>(k - lo)] = s;
    }
    return z;
}

std::vector<double> gen_doubling(const ErgodicDoublingParams& p, const StreamContext& ctx,
                                 std::int64_t lo, std::int64_t hi) {
    const std::int64_t dlo = lo + 1;
    const std::int64_t dhi = hi + p.digit_depth;
    const std::vector<std::uint8_t> bits = digit_stream(ctx.effective, dlo, dhi);
    auto bit = [&](std::int64_t i) { return bits[static_cast<std::size_t>(i - dlo)]; };
    std::vector<double> y(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t k = lo; k <= hi; ++k) {
        // omega = sum_{j=1..depth} bit(k+j) 2^-j, evaluated by an exact dyadic Horner pass.
        double om = 0.0;
        for (int j = p.digit_depth; j >= 1; --j) om = 0.5 * (om + bit(k + j));
        y[static_cast<std::size_t>(k - lo)] = periodic_eval(p.f, om);
    }
    return y;
}

std::vector<double> gen_range(const ProcessSpec& spec, std::int64_t lo, std::int64_t hi,
                              std::uint64_t call_seed) {
    const StreamContext ctx = make_context(spec, call_seed);
    return std::visit(
        [&](const auto& p) -> std::vector<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MDepParams>) return gen_mdep(p, ctx, lo, hi);
            else if constexpr (std::is_same_v<T, LinearParams>) return gen_linear(p, ctx, lo, hi);
            else if constexpr (std::is_same_v<T, RecurrenceParams>)
                return gen_recurrence(p, ctx, lo, hi);
            else if constexpr (std::is_same_v<T, AugGarchParams>)
                return gen_auggarch(p, ctx, lo, hi);
            else if constexpr (std::is_same_v<T, LinearDependentParams>)
                return gen_lineardep(p, ctx, lo, hi);
            else
                return gen_doubling(p, ctx, lo, hi);
        },
        spec.kind);
}

// ---- coupled generation per kind -----------------------------------------
// The y part must be bit-identical to gen_range for the same (lo, hi, seed).

RangeCoupled coupled_mdep(const MDepParams& p, const StreamContext& ctx, std::int64_t lo,
                          std::int64_t hi, std::span<const int> w) {
    RangeCoupled out;
    out.y = gen_mdep(p, ctx, lo, hi);
    out.y_approx.resize(out.y.size());
    for (std::size_t i = 0; i < out.y.size(); ++i)
        out.y_approx[i] = (w[i] >= p.m0) ? out.y[i] : 0.0;
    return out;
}

RangeCoupled coupled_linear(const LinearParams& p, const StreamContext& ctx, std::int64_t lo,
                            std::int64_t hi, std::span<const int> w) {
    const MaterializedCoefficients co = materialize_coefficients(p.rule);
    const std::int64_t elo = lo - co.j_hi();
    const std::int64_t ehi = hi - co.j_lo;
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, ehi);
    auto e = [&](std::int64_t k) { return eps[static_cast<std::size_t>(k - elo)]; };
    RangeCoupled out;
    const std::int64_t n = hi - lo + 1;
    out.y.resize(static_cast<std::size_t>(n));
    out.y_approx.resize(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t k = lo; k <= hi; ++k) {
        double s = 0.0;
        for (std::int64_t j = co.j_hi(); j >= co.j_lo; --j)
            s += co.a[static_cast<std::size_t>(j - co.j_lo)] * e(k - j);
        const std::int64_t h = w[static_cast<std::size_t>(k - lo)] / 2;
        const std::int64_t tlo = std::max(co.j_lo, -h);
        const std::int64_t thi = std::min(co.j_hi(), h);
        double sa = 0.0;
        for (std::int64_t j = thi; j >= tlo; --j)
            sa += co.a[static_cast<std::size_t>(j - co.j_lo)] * e(k - j);
        out.y[static_cast<std::size_t>(k - lo)] = s;
        out.y_approx[static_cast<std::size_t>(k - lo)] = sa;
    }
    return out;
}

RangeCoupled coupled_recurrence(const RecurrenceParams& p, const StreamContext& ctx,
                                std::int64_t lo, std::int64_t hi, std::span<const int> w) {
    const int wmax = w.empty() ? 0 : *std::max_element(w.begin(), w.end());
    const std::int64_t elo = lo - std::max<std::int64_t>(p.burn_in, wmax);
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, hi);
    auto e = [&](std::int64_t k) { return eps[static_cast<std::size_t>(k - elo)]; };

    RangeCoupled out;
    out.y.resize(static_cast<std::size_t>(hi - lo + 1));
    {  // plain path: recursion starts at lo - burn_in exactly as gen_recurrence
        double state = 0.0;
        for (std::int64_t i = lo - p.burn_in; i <= hi; ++i) {
            state = p.phi * state + e(i);
            if (i >= lo) out.y[static_cast<std::size_t>(i - lo)] = state;
        }
    }
    out.y_approx.resize(out.y.size());
    const std::int64_t n = hi - lo + 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (std::int64_t idx = 0; idx < n; ++idx) {
        const std::int64_t k = lo + idx;
        const int wk = w[static_cast<std::size_t>(idx)];
        Rng aux(child_seed(ctx.aux_base, static_cast<std::uint64_t>(k)));
        double state = 0.0;
        for (std::int64_t i = k - wk - p.burn_in; i <= k; ++i) {
            const double ei = (i >= k - wk) ? e(i) : draw(aux, ctx.effective);
            state = p.phi * state + ei;
        }
        out.y_approx[static_cast<std::size_t>(idx)] = state;
    }
    return out;
}

RangeCoupled coupled_auggarch(const AugGarchParams& p, const StreamContext& ctx, std::int64_t lo,
                              std::int64_t hi, std::span<const int> w) {
    const int wmax = w.empty() ? 0 : *std::max_element(w.begin(), w.end());
    const std::int64_t elo = lo - std::max<std::int64_t>(p.burn_in, static_cast<std::int64_t>(wmax) + 1);
    const std::vector<double> eps = innovation_stream(ctx.effective, elo, hi);
    auto e = [&](std::int64_t k) { return eps[static_cast<std::size_t>(k - elo)]; };

    RangeCoupled out;
    out.y.resize(static_cast<std::size_t>(hi - lo + 1));
    {
        double v = p.omega;
        const std::int64_t i0 = lo - p.burn_in;
        if (i0 >= lo) out.y[static_cast<std::size_t>(i0 - lo)] = std::sqrt(v) * e(i0);
        for (std::int64_t i = i0 + 1; i <= hi; ++i) {
            const double c = p.beta1 + p.alpha1 * e(i - 1) * e(i - 1);
            v = p.omega + c * v;
            if (i >= lo) out.y[static_cast<std::size_t>(i - lo)] = std::sqrt(v) * e(i);
        }
    }
    out.y_approx.resize(out.y.size());
    const std::int64_t n = hi - lo + 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (std::int64_t idx = 0; idx < n; ++idx) {
        const std::int64_t k = lo + idx;
        const int wk = w[static_cast<std::size_t>(idx)];
        Rng aux(child_seed(ctx.aux_base, static_cast<std::uint64_t>(k)));
        const std::int64_t start = k - wk - p.burn_in;
        double v = p.omega;
        double eprev = (start >= k - wk) ? e(start) : draw(aux, ctx.effective);
        for (std::int64_t i = start + 1; i <= k; ++i) {
            v = p.omega + (p.beta1 + p.alpha1 * eprev * eprev) * v;
            eprev = (i >= k - wk) ? e(i) : draw(aux, ctx.effective);
        }
        out.y_approx[static_cast<std::size_t>(idx)] = std::sqrt(v) * e(k);
    }
    return out;
}

RangeCoupled coupled_lineardep(const LinearDependentParams& p, const StreamContext& ctx,
                               std::int64_t lo, std::int64_t hi, std::span<const int> w) {
    const MaterializedCoefficients co = materialize_coefficients(p.rule);
    const std::int64_t ilo = lo - co.j_hi();
    const std::int64_t ihi = hi - co.j_lo;
    const std::int64_t n = hi - lo + 1;
    const std::int64_t ni = ihi - ilo + 1;

    // Window budget: floor(m/4) per side for the outer truncation, the rest
    // for the inner approximation, so the composite dependence radius stays
    // within m. An inner coordinate used by several outer coordinates gets
    // the smallest inner window among its users (never larger than budgeted).
    std::vector<int> win(static_cast<std::size_t>(ni), -1);
    for (std::int64_t k = lo; k <= hi; ++k) {
        const int wk = w[static_cast<std::size_t>(k - lo)];
        const int hout = wk / 4;
        const int min_ = wk - 2 * hout;
        const std::int64_t jlo = std::max(co.j_lo, static_cast<std::int64_t>(-hout));
        const std::int64_t jhi = std::min(co.j_hi(), static_cast<std::int64_t>(hout));
        for (std::int64_t j = jlo; j <= jhi; ++j) {
            auto& slot = win[static_cast<std::size_t>(k - j - ilo)];
            slot = (slot < 0) ? min_ : std::min(slot, min_);
        }
    }
    for (auto& v : win)
        if (v < 0) v = 0;  // inner coordinates never read by the approximation

    const RangeCoupled inner = gen_range_coupled(*p.inner, ilo, ihi, win, ctx.inner_seed);
    auto yin = [&](std::int64_t k) { return inner.y[static_cast<std::size_t>(k - ilo)]; };
    auto yin_a = [&](std::int64_t k) { return inner.y_approx[static_cast<std::size_t>(k - ilo)]; };

    RangeCoupled out;
    out.y.resize(static_cast<std::size_t>(n));
    out.y_approx.resize(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t k = lo; k <= hi; ++k) {
        double s = 0.0;
        for (std::int64_t j = co.j_lo; j <= co.j_hi(); ++j)
            s += co.a[static_cast<std::size_t>(j - co.j_lo)] * yin(k - j);
        const int wk = w[static_cast<std::size_t>(k - lo)];
        const int hout = wk / 4;
        const std::int64_t jlo = std::max(co.j_lo, static_cast<std::int64_t>(-hout));
        const std::int64_t jhi = std::min(co.j_hi(), static_cast<std::int64_t>(hout));
        double sa = 0.0;
        for (std::int64_t j = jlo; j <= jhi; ++j)
            sa += co.a[static_cast<std::size_t>(j - co.j_lo)] * yin_a(k - j);
        out.y[static_cast<std::size_t>(k - lo)] = s;
        out.y_approx[static_cast<std::size_t>(k - lo)] = sa;
    }
    return out;
}

RangeCoupled coupled_doubling(const ErgodicDoublingParams& p, const StreamContext& ctx,
                              std::int64_t lo, std::int64_t hi, std::span<const int> w) {
    const std::int64_t dlo = lo + 1;
    const std::int64_t dhi = hi + p.digit_depth;
    const std::vector<std::uint8_t> bits = digit_stream(ctx.effective, dlo, dhi);
    auto bit = [&](std::int64_t i) { return bits[static_cast<std::size_t>(i - dlo)]; };
    RangeCoupled out;
    const std::int64_t n = hi - lo + 1;
    out.y.resize(static_cast<std::size_t>(n));
    out.y_approx.resize(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t k = lo; k <= hi; ++k) {
        double om = 0.0;
        for (int j = p.digit_depth; j >= 1; --j) om = 0.5 * (om + bit(k + j));
        out.y[static_cast<std::size_t>(k - lo)] = periodic_eval(p.f, om);

        const int wk = std::min(w[static_cast<std::size_t>(k - lo)], p.digit_depth);
        if (wk >= p.digit_depth) {
            out.y_approx[static_cast<std::size_t>(k - lo)] = out.y[static_cast<std::size_t>(k - lo)];
            continue;
        }
        Rng aux(child_seed(ctx.aux_base, static_cast<std::uint64_t>(k)));
        std::uint8_t auxbits[64];
        for (int j = wk + 1; j <= p.digit_depth; ++j)
            auxbits[j - wk - 1] = static_cast<std::uint8_t>(aux.next_u64() >> 63);
        double oma = 0.0;
        for (int j = p.digit_depth; j >= 1; --j) {
            const double b = (j <= wk) ? bit(k + j) : auxbits[j - wk - 1];
            oma = 0.5 * (oma + b);
        }
        out.y_approx[static_cast<std::size_t>(k - lo)] = periodic_eval(p.f, oma);
    }
    return out;
}

RangeCoupled gen_range_coupled(const ProcessSpec& spec, std::int64_t lo, std::int64_t hi,
                               std::span<const int> w, std::uint64_t call_seed) {
    const StreamContext ctx = make_context(spec, call_seed);
    return std::visit(
        [&](const auto& p) -> RangeCoupled {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MDepParams>) return coupled_mdep(p, ctx, lo, hi, w);
            else if constexpr (std::is_same_v<T, LinearParams>)
                return coupled_linear(p, ctx, lo, hi, w);
            else if constexpr (std::is_same_v<T, RecurrenceParams>)
                return coupled_recurrence(p, ctx, lo, hi, w);
            else if constexpr (std::is_same_v<T, AugGarchParams>)
                return coupled_auggarch(p, ctx, lo, hi, w);
            else if constexpr (std::is_same_v<T, LinearDependentParams>)
                return coupled_lineardep(p, ctx, lo, hi, w);
            else
                return coupled_doubling(p, ctx, lo, hi, w);
        },
        spec.kind);
}

}  // namespace

MaterializedCoefficients materialize_coefficients(const CoefficientRule& rule) {
    MaterializedCoefficients out;
    switch (rule.kind) {
        case CoefficientRule::Kind::Explicit: {
            if (rule.coeffs.empty()) throw SpecError("coefficients: explicit list is empty");
            for (double c : rule.coeffs)
                if (!std::isfinite(c)) throw SpecError("coefficients: non-finite value");
            if (!rule.causal && rule.coeffs.size() % 2 == 0)
                throw SpecError(
                    "coefficients: two-sided explicit list must have odd length (centered)");
            out.a = rule.coeffs;
            out.j_lo = rule.causal ? 0 : -static_cast<std::int64_t>(rule.coeffs.size() / 2);
            return out;
        }
        case CoefficientRule::Kind::Exponential: {
            const double rho = rule.decay;
            if (!(rho > 0.0 && rho < 1.0))
                throw SpecError("coefficients: exponential rule needs rho in (0, 1)");
            // Smallest J whose omitted L1 mass (both sides for a symmetric
            // filter) is below 1e-14: factor * rho^(J+1) / (1 - rho).
            const double factor = rule.causal ? 1.0 : 2.0;
            const double cut = 1e-14 * (1.0 - rho) / factor;
            std::int64_t J =
                static_cast<std::int64_t>(std::ceil(std::log(cut) / std::log(rho) - 1.0));
            J = std::max<std::int64_t>(J, 1);
            while (J < 65536 && std::pow(rho, static_cast<double>(J + 1)) >= cut) ++J;
            J = std::min<std::int64_t>(J, 65536);
            std::vector<double> one_side(static_cast<std::size_t>(J + 1));
            for (std::int64_t j = 0; j <= J; ++j)
                one_side[static_cast<std::size_t>(j)] = std::pow(rho, static_cast<double>(j));
            if (rule.causal) {
                out.a = std::move(one_side);
                out.j_lo = 0;
            } else {
                out.a.resize(static_cast<std::size_t>(2 * J + 1));
                for (std::int64_t j = -J; j <= J; ++j)
                    out.a[static_cast<std::size_t>(j + J)] =
                        one_side[static_cast<std::size_t>(std::llabs(j))];
                out.j_lo = -J;
            }
            return out;
        }
        case CoefficientRule::Kind::Polynomial: {
            const double A = rule.decay;
            if (!(A > 0.0)) throw SpecError("coefficients: polynomial rule needs A > 0");
            // L1 tail ~ J^-A / A; capped, so heavy tails define the model as
            // its truncation (all closed forms use the same window).
            double Jreal = std::pow(A * 1e14, 1.0 / A);
            std::int64_t J = (Jreal > 16384.0) ? 16384 : static_cast<std::int64_t>(std::ceil(Jreal));
            J = std::max<std::int64_t>(J, 1);
            std::vector<double> one_side(static_cast<std::size_t>(J + 1));
            one_side[0] = 1.0;
            for (std::int64_t j = 1; j <= J; ++j)
                one_side[static_cast<std::size_t>(j)] =
                    std::pow(static_cast<double>(j), -(A + 1.0));
            if (rule.causal) {
                out.a = std::move(one_side);
                out.j_lo = 0;
            } else {
                out.a.resize(static_cast<std::size_t>(2 * J + 1));
                for (std::int64_t j = -J; j <= J; ++j)
                    out.a[static_cast<std::size_t>(j + J)] =
                        one_side[static_cast<std::size_t>(std::llabs(j))];
                out.j_lo = -J;
            }
            return out;
        }
    }
    throw SpecError("unknown coefficient rule");
}

void validate(const ProcessSpec& spec) {
    const bool is_doubling = std::holds_alternative<ErgodicDoublingParams>(spec.kind);
    validate_innovations(spec.innovations, is_doubling);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MDepParams>) {
                if (p.m0 < 0) throw SpecError("mdep: m0 must be >= 0");
                if (p.weights.size() != static_cast<std::size_t>(p.m0 + 1))
                    throw SpecError("mdep: weights must have length m0 + 1");
                for (double v : p.weights)
                    if (!std::isfinite(v)) throw SpecError("mdep: non-finite weight");
            } else if constexpr (std::is_same_v<T, LinearParams>) {
                materialize_coefficients(p.rule);
            } else if constexpr (std::is_same_v<T, RecurrenceParams>) {
                if (!(std::fabs(p.phi) < 1.0))
                    throw SpecError("recurrence: contraction requires |phi| < 1");
                if (p.burn_in < 1) throw SpecError("recurrence: burn_in must be >= 1");
            } else if constexpr (std::is_same_v<T, AugGarchParams>) {
                if (!(p.omega > 0.0)) throw SpecError("auggarch: omega must be > 0");
                if (p.alpha1 < 0.0 || p.beta1 < 0.0)
                    throw SpecError("auggarch: alpha1 and beta1 must be >= 0");
                if (p.burn_in < 1) throw SpecError("auggarch: burn_in must be >= 1");
                if (p.alpha1 > 0.0 || p.beta1 > 0.0) {
                    const double est = screen_e_log_c(p.beta1, p.alpha1, spec.innovations);
                    if (!(est < 0.0)) {
                        std::ostringstream os;
                        os << "auggarch: stationarity screen failed, E log(beta1 + alpha1 e^2) "
                              "estimated as "
                           << est << " (must be < 0)";
                        throw SpecError(os.str());
                    }
                }
            } else if constexpr (std::is_same_v<T, LinearDependentParams>) {
                if (!p.inner) throw SpecError("lineardep: missing inner process");
                materialize_coefficients(p.rule);
                validate(*p.inner);
            } else {
                if (p.digit_depth < 1 || p.digit_depth > 64)
                    throw SpecError("doubling: digit_depth must be in [1, 64]");
            }
        },
        spec.kind);
}

SamplePath generate(const ProcessSpec& spec, std::int64_t n, std::uint64_t seed) {
    validate(spec);
    if (n < 1) throw SpecError("generate: n must be >= 1");
    SamplePath path;
    path.values = gen_range(spec, 1, n, seed);
    path.seed = seed;
    path.spec = spec;
    return path;
}

CoupledPath generate_coupled(const ProcessSpec& spec, std::int64_t n, int m, std::uint64_t seed) {
    validate(spec);
    if (n < 1) throw SpecError("generate_coupled: n must be >= 1");
    if (m < 0) throw SpecError("generate_coupled: m must be >= 0");
    const std::vector<int> w(static_cast<std::size_t>(n), m);
    RangeCoupled rc = gen_range_coupled(spec, 1, n, w, seed);
    CoupledPath out;
    out.y = std::move(rc.y);
    out.y_approx = std::move(rc.y_approx);
    out.m = m;
    out.seed = seed;
    return out;
}

CoupledPath generate_coupled_scheduled(const ProcessSpec& spec, std::int64_t n,
                                       std::span<const int> m_by_index, std::uint64_t seed) {
    validate(spec);
    if (n < 1) throw SpecError("generate_coupled_scheduled: n must be >= 1");
    if (static_cast<std::int64_t>(m_by_index.size()) != n)
        throw SpecError("generate_coupled_scheduled: schedule length must equal n");
    for (int v : m_by_index)
        if (v < 0) throw SpecError("generate_coupled_scheduled: windows must be >= 0");
    RangeCoupled rc = gen_range_coupled(spec, 1, n, m_by_index, seed);
    CoupledPath out;
    out.y = std::move(rc.y);
    out.y_approx = std::move(rc.y_approx);
    out.m = -1;
    out.seed = seed;
    out.m_schedule.assign(m_by_index.begin(), m_by_index.end());
    return out;
}

void inject_epidemic(SamplePath& path, std::int64_t m1, std::int64_t m2, double delta) {
    const std::int64_t n = static_cast<std::int64_t>(path.values.size());
    if (!(1 <= m1 && m1 < m2 && m2 <= n))
        throw SpecError("inject_epidemic: need 1 <= m1 < m2 <= n");
    if (!std::isfinite(delta)) throw SpecError("inject_epidemic: delta must be finite");
    for (std::int64_t i = m1; i < m2; ++i) path.values[static_cast<std::size_t>(i)] += delta;
    // 0-based: values[m1..m2-1] are the 1-based coordinates m1+1..m2.
    path.epidemic = EpidemicShift{m1, m2, delta};
}

double innovation_variance(const InnovationSpec& innov) {
    switch (innov.distribution) {
        case Distribution::StandardNormal: return 1.0;
        case Distribution::Rademacher: return 1.0;
        case Distribution::UniformBit: return 0.25;
        case Distribution::StudentT: return 1.0;  // standardized
    }
    throw SpecError("unknown innovation distribution");
}

std::optional<double> theoretical_sigma2(const ProcessSpec& spec) {
    const double var = innovation_variance(spec.innovations);
    if (const auto* md = std::get_if<MDepParams>(&spec.kind)) {
        double s = 0.0;
        for (double wgt : md->weights) s += wgt;
        return s * s * var;
    }
    if (const auto* lin = std::get_if<LinearParams>(&spec.kind)) {
        const MaterializedCoefficients co = materialize_coefficients(lin->rule);
        double s = 0.0;
        for (double c : co.a) s += c;
        return s * s * var;
    }
    return std::nullopt;
}

double closed_form_delta2(const ProcessSpec& spec, int m) {
    if (m < 0) throw SpecError("closed_form_delta2: m must be >= 0");
    const double var = innovation_variance(spec.innovations);
    if (const auto* md = std::get_if<MDepParams>(&spec.kind)) {
        if (m >= md->m0) return 0.0;
        double s = 0.0;
        for (double wgt : md->weights) s += wgt * wgt;
        return s * var;
    }
    if (const auto* lin = std::get_if<LinearParams>(&spec.kind)) {
        const MaterializedCoefficients co = materialize_coefficients(lin->rule);
        const std::int64_t h = m / 2;
        double s = 0.0;
        for (std::int64_t j = co.j_lo; j <= co.j_hi(); ++j)
            if (std::llabs(j) > h) {
                const double c = co.a[static_cast<std::size_t>(j - co.j_lo)];
                s += c * c;
            }
        return s * var;
    }
    throw SpecError("closed_form_delta2: only available for mdep and linear kinds");
}

std::vector<double> innovation_stream(const InnovationSpec& innov, std::int64_t lo,
                                      std::int64_t hi) {
    if (hi < lo) throw SpecError("innovation_stream: empty range");
    if (innov.distribution == Distribution::StudentT && !(innov.df > 2.0))
        throw SpecError("innovations: student-t requires df > 2");
    // Each value is a pure function of (distribution, df, seed, index), so
    // overlapping ranges agree and internal range extensions cannot shift
    // the stream.
    const std::uint64_t base = child_seed(innov.seed, kTagInnovation);
    const std::int64_t n = hi - lo + 1;
    std::vector<double> out(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        Rng rng(child_seed(base, static_cast<std::uint64_t>(lo + i)));
        out[static_cast<std::size_t>(i)] = draw(rng, innov);
    }
    return out;
}

}  // namespace splitsim
