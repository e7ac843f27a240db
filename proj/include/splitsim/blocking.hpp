#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitsim/process.hpp"

namespace splitsim {

enum class BlockMode { Polynomial, ExponentialLogBlocks };

// Parameter bundle for the block decomposition. Derived fields follow from
// (p, eta, eps0); eps1 scales the m-schedule.
struct SplitParams {
    double p = 0.0;      // moment exponent, > 2
    double eta = 0.0;    // > 0
    double eps0 = 0.0;   // in (0, 1/2)
    double eps1 = 0.5;   // > 0
    double a_min = 0.0;  // smallest admissible polynomial decay exponent
    double alpha = 0.0;  // long-block growth exponent
    double beta = 0.0;   // short-block growth exponent
    double delta = 0.0;  // m-schedule exponent
    double gamma = 0.0;  // secondary variance scale exponent
    BlockMode mode = BlockMode::Polynomial;
};

struct Block {
    enum class Kind { I, J };
    Kind kind = Kind::J;
    std::int64_t index = 0;  // 1-based block pair index k
    std::int64_t start = 0;  // 1-based first coordinate
    std::int64_t end = 0;    // 1-based last coordinate (inclusive)
    bool partial = false;    // true for a truncated final block
    std::int64_t size() const { return end - start + 1; }
};

// Alternating tiling J1, I1, J2, I2, ... of {1..n} plus the per-pair coupling
// window schedule m_k evaluated at each long block's first coordinate.
struct BlockLayout {
    std::int64_t n = 0;
    SplitParams params;
    std::vector<Block> blocks;
    std::vector<int> m_schedule;      // m_k for pair k (1-based -> index k-1)
    double eps1_effective = 0.0;      // after any automatic halving
    std::int64_t complete_pairs = 0;  // pairs with both blocks complete
};

// Per-coordinate variance ladder: sigma2 carries I-coordinates, tau2 carries
// J-coordinates; exactly one of the two is nonzero at every coordinate.
struct VarianceLadder {
    std::int64_t n = 0;
    std::vector<double> b2;      // per complete pair: Var(xi_k)/|I_k|
    std::vector<double> h2;      // per complete pair: Var(eta_k)/|J_k|
    std::vector<double> sigma2;  // per coordinate
    std::vector<double> tau2;    // per coordinate
    std::vector<double> s2;      // cumulative sum of sigma2
    std::vector<double> t2;      // cumulative sum of tau2
};

struct ScalingReport {
    std::vector<std::int64_t> n_points;  // coordinate counts at pair ends
    std::vector<double> s2_over_n;       // s2 / (sigma2_ref * n)
    std::vector<double> t2_points;
    // Log-log slope of t2 against the long-block coordinate count over the
    // trailing decade; the short blocks hold a vanishing index fraction.
    double t2_slope = 0.0;
    double t2_slope_r2 = 0.0;
    double max_s2_jump = 0.0;  // largest per-coordinate increment / sigma2_ref
    double max_t2_jump = 0.0;
    double bounded_ratio_max = 0.0;  // max of t2 * log(n) / s2 (log-block mode)
};

// Derives the block-growth exponents from (p, eta, eps0) and validates the
// moment condition (1+eta)/p < 1/2.
SplitParams derive_params(double p, double eta, double eps0, double eps1,
                          BlockMode mode = BlockMode::Polynomial);

// Tiles {1..n}. Long blocks |I_k| = max(floor(k^alpha), 1) and short blocks
// |J_k| = max(floor(k^beta), 1) in polynomial mode; lengths ceil(k) and
// ceil(log(k+2)) in log-block mode. The window schedule must satisfy
// m_k < |J_k| for every complete pair; eps1 is halved automatically (bounded
// retries) until that holds.
BlockLayout build_layout(std::int64_t n, const SplitParams& params);

struct BlockSums {
    std::vector<double> xi;        // one per complete I block
    std::vector<double> eta_sums;  // one per complete J block
};

// Sums path coordinates over complete blocks. A CoupledPath contributes its
// y_approx values (the approximation with the layout's window schedule).
BlockSums block_sums(std::span<const double> values, const BlockLayout& layout);
BlockSums block_sums(const CoupledPath& path, const BlockLayout& layout);

// Expands the layout's per-pair window schedule to one window per coordinate,
// for generating a coupled path whose approximation matches the layout.
std::vector<int> per_coordinate_windows(const BlockLayout& layout);

// Monte Carlo per-block variances b_k^2 = Var(xi_k)/|I_k| and
// h_k^2 = Var(eta_k)/|J_k| over `reps` coupled replications, assembled into
// the per-coordinate ladder.
VarianceLadder estimate_block_variances(const ProcessSpec& spec, const BlockLayout& layout,
                                        std::int64_t reps, std::uint64_t seed);

// Deterministic ladder with b_k^2 = h_k^2 = sigma2 on every complete pair;
// isolates the combinatorial scaling of the tiling from Monte Carlo noise.
VarianceLadder exact_ladder(const BlockLayout& layout, double sigma2);

// Slope/trajectory diagnostics of a ladder against a reference variance.
// Needs >= 10 complete pairs.
ScalingReport verify_scaling(const VarianceLadder& ladder, const BlockLayout& layout,
                             double sigma2_ref);

// Correlation between the normalized I-group sum and J-group sum over the
// same layout, estimated from `reps` independent paths.
double cross_group_correlation(const ProcessSpec& spec, const BlockLayout& layout,
                               std::int64_t reps, std::uint64_t seed);

}  // namespace splitsim
