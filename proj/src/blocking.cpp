#include "splitsim/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "splitsim/errors.hpp"
#include "splitsim/numerics.hpp"
#include "splitsim/rng.hpp"

namespace splitsim {
namespace {

std::int64_t long_len(std::int64_t k, const SplitParams& prm) {
    if (prm.mode == BlockMode::ExponentialLogBlocks) return k;
    const double v = std::floor(std::pow(static_cast<double>(k), prm.alpha));
    return std::max<std::int64_t>(static_cast<std::int64_t>(v), 1);
}

std::int64_t short_len(std::int64_t k, const SplitParams& prm) {
    if (prm.mode == BlockMode::ExponentialLogBlocks)
        return static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(k) + 2.0)));
    const double v = std::floor(std::pow(static_cast<double>(k), prm.beta));
    return std::max<std::int64_t>(static_cast<std::int64_t>(v), 1);
}

// Coupling window at a long block's first coordinate. The power schedule
// grows like the short-block length by construction of delta; the log-block
// mode pairs logarithmic windows with its logarithmic short blocks.
int window_at(std::int64_t start, const SplitParams& prm, double eps1) {
    const double s = static_cast<double>(start);
    const double v = (prm.mode == BlockMode::ExponentialLogBlocks)
                         ? eps1 * std::log(s + 1.0)
                         : eps1 * std::pow(s, prm.delta);
    return static_cast<int>(std::floor(v));
}

struct TilingResult {
    std::vector<Block> blocks;
    std::vector<int> m_schedule;
    std::int64_t complete_pairs = 0;
    std::int64_t first_violation = 0;  // smallest k with |J_k| <= m_k, 0 if none
};

TilingResult tile(std::int64_t n, const SplitParams& prm, double eps1) {
    TilingResult out;
    std::int64_t pos = 1;
    for (std::int64_t k = 1; pos <= n; ++k) {
        Block jb;
        jb.kind = Block::Kind::J;
        jb.index = k;
        jb.start = pos;
        jb.end = std::min(n, pos + short_len(k, prm) - 1);
        jb.partial = (jb.end - jb.start + 1) < short_len(k, prm);
        pos = jb.end + 1;
        out.blocks.push_back(jb);

        const int m_k = window_at(jb.end + 1, prm, eps1);
        out.m_schedule.push_back(m_k);

        if (pos > n) break;
        Block ib;
        ib.kind = Block::Kind::I;
        ib.index = k;
        ib.start = pos;
        ib.end = std::min(n, pos + long_len(k, prm) - 1);
        ib.partial = (ib.end - ib.start + 1) < long_len(k, prm);
        pos = ib.end + 1;
        out.blocks.push_back(ib);

        if (!jb.partial && !ib.partial) {
            out.complete_pairs = k;
            if (short_len(k, prm) <= m_k && out.first_violation == 0) out.first_violation = k;
        }
    }
    return out;
}

VarianceLadder assemble_ladder(const BlockLayout& layout, std::span<const double> b2,
                               std::span<const double> h2) {
    VarianceLadder lad;
    lad.n = layout.n;
    lad.b2.assign(b2.begin(), b2.end());
    lad.h2.assign(h2.begin(), h2.end());
    lad.sigma2.assign(static_cast<std::size_t>(layout.n), 0.0);
    lad.tau2.assign(static_cast<std::size_t>(layout.n), 0.0);
    for (const Block& blk : layout.blocks) {
        if (blk.partial || blk.index > layout.complete_pairs) continue;
        const double v = (blk.kind == Block::Kind::I)
                             ? b2[static_cast<std::size_t>(blk.index - 1)]
                             : h2[static_cast<std::size_t>(blk.index - 1)];
        auto& dst = (blk.kind == Block::Kind::I) ? lad.sigma2 : lad.tau2;
        for (std::int64_t pos = blk.start; pos <= blk.end; ++pos)
            dst[static_cast<std::size_t>(pos - 1)] = v;
    }
    lad.s2.resize(lad.sigma2.size());
    lad.t2.resize(lad.tau2.size());
    double cs = 0.0, ct = 0.0;
    for (std::size_t i = 0; i < lad.sigma2.size(); ++i) {
        cs += lad.sigma2[i];
        ct += lad.tau2[i];
        lad.s2[i] = cs;
        lad.t2[i] = ct;
    }
    return lad;
}

}  // namespace

SplitParams derive_params(double p, double eta, double eps0, double eps1, BlockMode mode) {
    if (!(p > 2.0)) throw SpecError("derive_params: p must be > 2");
    if (!(eta > 0.0)) throw SpecError("derive_params: eta must be > 0");
    if (!(eps0 > 0.0 && eps0 < 0.5)) throw SpecError("derive_params: eps0 must be in (0, 1/2)");
    if (!(eps1 > 0.0)) throw SpecError("derive_params: eps1 must be > 0");
    if (!((1.0 + eta) / p < 0.5)) {
        std::ostringstream os;
        os << "derive_params: moment condition violated: (1+eta)/p = " << ((1.0 + eta) / p)
           << " must be < 1/2";
        throw SpecError(os.str());
    }
    SplitParams prm;
    prm.p = p;
    prm.eta = eta;
    prm.eps0 = eps0;
    prm.eps1 = eps1;
    prm.mode = mode;
    prm.alpha = 2.0 * eta * (1.0 - eps0) / (p - 2.0 * (1.0 + eta));
    prm.beta = (1.0 - eps0) * prm.alpha;
    prm.delta = prm.beta / (1.0 + prm.alpha);
    prm.gamma = 1.0 - eps0 * 2.0 * eta * (1.0 - eps0) / (p - 2.0 * (1.0 + eta * eps0));
    prm.a_min = std::max(
        (p - 2.0) / (2.0 * eta * (1.0 - eps0) * (1.0 - eps0)) * (1.0 - (1.0 + eta) / p), 1.0);
    if (!(prm.gamma > 0.0 && prm.gamma < 1.0))
        throw SpecError("derive_params: derived gamma falls outside (0, 1)");
    return prm;
}

BlockLayout build_layout(std::int64_t n, const SplitParams& params) {
    if (n < 2) throw SpecError("build_layout: n must be >= 2");
    // Halve eps1 until every complete pair satisfies |J_k| > m_k. The retry
    // budget is deliberately small: a wildly oversized eps1 is a caller error
    // and must surface as one rather than silently collapse to m_k = 0.
    constexpr int kMaxRetries = 10;
    double eps1 = params.eps1;
    TilingResult tr = tile(n, params, eps1);
    for (int retry = 0; tr.first_violation != 0 && retry < kMaxRetries; ++retry) {
        eps1 *= 0.5;
        tr = tile(n, params, eps1);
    }
    if (tr.first_violation != 0) {
        std::ostringstream os;
        os << "build_layout: separation |J_k| > m_k violated at k=" << tr.first_violation
           << " (still failing at eps1=" << eps1 << " after " << kMaxRetries << " halvings)";
        throw SpecError(os.str());
    }
    BlockLayout layout;
    layout.n = n;
    layout.params = params;
    layout.blocks = std::move(tr.blocks);
    layout.m_schedule = std::move(tr.m_schedule);
    layout.eps1_effective = eps1;
    layout.complete_pairs = tr.complete_pairs;
    return layout;
}

BlockSums block_sums(std::span<const double> values, const BlockLayout& layout) {
    if (static_cast<std::int64_t>(values.size()) != layout.n)
        throw SpecError("block_sums: path length does not match layout");
    BlockSums out;
    for (const Block& blk : layout.blocks) {
        if (blk.partial || blk.index > layout.complete_pairs) continue;
        double s = 0.0;
        for (std::int64_t pos = blk.start; pos <= blk.end; ++pos)
            s += values[static_cast<std::size_t>(pos - 1)];
        if (blk.kind == Block::Kind::I)
            out.xi.push_back(s);
        else
            out.eta_sums.push_back(s);
    }
    return out;
}

BlockSums block_sums(const CoupledPath& path, const BlockLayout& layout) {
    return block_sums(std::span<const double>(path.y_approx), layout);
}

std::vector<int> per_coordinate_windows(const BlockLayout& layout) {
    std::vector<int> w(static_cast<std::size_t>(layout.n), 0);
    for (const Block& blk : layout.blocks) {
        const int m_k = layout.m_schedule[static_cast<std::size_t>(blk.index - 1)];
        for (std::int64_t pos = blk.start; pos <= blk.end; ++pos)
            w[static_cast<std::size_t>(pos - 1)] = m_k;
    }
    return w;
}

VarianceLadder estimate_block_variances(const ProcessSpec& spec, const BlockLayout& layout,
                                        std::int64_t reps, std::uint64_t seed) {
    if (reps < 100) throw SpecError("estimate_block_variances: reps must be >= 100");
    validate(spec);
    const std::vector<int> windows = per_coordinate_windows(layout);
    const std::size_t nk = static_cast<std::size_t>(layout.complete_pairs);

    std::vector<std::vector<double>> xi(nk), eta(nk);
    for (std::size_t k = 0; k < nk; ++k) {
        xi[k].resize(static_cast<std::size_t>(reps));
        eta[k].resize(static_cast<std::size_t>(reps));
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
        const CoupledPath cp = generate_coupled_scheduled(
            spec, layout.n, windows, child_seed(seed, static_cast<std::uint64_t>(r)));
        const BlockSums bs = block_sums(cp, layout);
        for (std::size_t k = 0; k < nk; ++k) {
            xi[k][static_cast<std::size_t>(r)] = bs.xi[k];
            eta[k][static_cast<std::size_t>(r)] = bs.eta_sums[k];
        }
    }

    std::vector<double> b2(nk), h2(nk);
    std::size_t ik = 0, jk = 0;
    for (const Block& blk : layout.blocks) {
        if (blk.partial || blk.index > layout.complete_pairs) continue;
        if (blk.kind == Block::Kind::I)
            b2[ik++] = sample_variance(xi[static_cast<std::size_t>(blk.index - 1)]) /
                       static_cast<double>(blk.size());
        else
            h2[jk++] = sample_variance(eta[static_cast<std::size_t>(blk.index - 1)]) /
                       static_cast<double>(blk.size());
    }
    return assemble_ladder(layout, b2, h2);
}

VarianceLadder exact_ladder(const BlockLayout& layout, double sigma2) {
    const std::size_t nk = static_cast<std::size_t>(layout.complete_pairs);
    std::vector<double> b2(nk, sigma2), h2(nk, sigma2);
    return assemble_ladder(layout, b2, h2);
}

ScalingReport verify_scaling(const VarianceLadder& ladder, const BlockLayout& layout,
                             double sigma2_ref) {
    if (layout.complete_pairs < 10)
        throw SpecError("verify_scaling: need >= 10 complete block pairs");
    if (!(sigma2_ref > 0.0)) throw SpecError("verify_scaling: sigma2_ref must be > 0");
    if (ladder.n != layout.n) throw SpecError("verify_scaling: ladder/layout length mismatch");

    ScalingReport rep;
    std::vector<double> long_counts;  // cumulative long-block coordinates
    double long_total = 0.0;
    for (const Block& blk : layout.blocks) {
        if (blk.kind != Block::Kind::I || blk.partial || blk.index > layout.complete_pairs)
            continue;
        const std::int64_t nend = blk.end;
        long_total += static_cast<double>(blk.size());
        rep.n_points.push_back(nend);
        rep.s2_over_n.push_back(ladder.s2[static_cast<std::size_t>(nend - 1)] /
                                (sigma2_ref * static_cast<double>(nend)));
        rep.t2_points.push_back(ladder.t2[static_cast<std::size_t>(nend - 1)]);
        long_counts.push_back(long_total);
    }

    for (double v : ladder.sigma2) rep.max_s2_jump = std::max(rep.max_s2_jump, v / sigma2_ref);
    for (double v : ladder.tau2) rep.max_t2_jump = std::max(rep.max_t2_jump, v / sigma2_ref);

    // Fitted t2 exponent over the trailing decade. The regressor is the
    // long-block coordinate count (the s-support size): it carries all but a
    // vanishing fraction of the indices, and unlike the raw total it is free
    // of the slowly decaying short-block correction, so the fit reaches its
    // limit exponent at practical sizes.
    std::vector<double> lx, ly;
    const double n_hi = long_counts.back();
    for (std::size_t i = 0; i < long_counts.size(); ++i) {
        if (long_counts[i] >= n_hi / 10.0 && rep.t2_points[i] > 0.0) {
            lx.push_back(std::log(long_counts[i]));
            ly.push_back(std::log(rep.t2_points[i]));
        }
    }
    if (lx.size() >= 3) {
        const LineFit fit = fit_line(lx, ly);
        rep.t2_slope = fit.slope;
        rep.t2_slope_r2 = fit.r2;
    }

    for (std::size_t i = 0; i < rep.n_points.size(); ++i) {
        const double nn = static_cast<double>(rep.n_points[i]);
        const double s2 = rep.s2_over_n[i] * sigma2_ref * nn;
        if (nn >= 2.0 && s2 > 0.0)
            rep.bounded_ratio_max =
                std::max(rep.bounded_ratio_max, rep.t2_points[i] * std::log(nn) / s2);
    }
    return rep;
}

double cross_group_correlation(const ProcessSpec& spec, const BlockLayout& layout,
                               std::int64_t reps, std::uint64_t seed) {
    if (reps < 100) throw SpecError("cross_group_correlation: reps must be >= 100");
    validate(spec);
    std::vector<double> u(static_cast<std::size_t>(reps)), v(static_cast<std::size_t>(reps));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
        const SamplePath path =
            generate(spec, layout.n, child_seed(seed, static_cast<std::uint64_t>(r)));
        const BlockSums bs = block_sums(path.values, layout);
        double su = 0.0, sv = 0.0;
        for (double x : bs.xi) su += x;
        for (double x : bs.eta_sums) sv += x;
        u[static_cast<std::size_t>(r)] = su;
        v[static_cast<std::size_t>(r)] = sv;
    }
    return pearson_correlation(u, v);
}

}  // namespace splitsim
