#pragma once

// Stationary process constructions with explicit m-window couplings.
// Every process kind provides, alongside the path Y_1..Y_n, an approximation
// Y^(m) that depends on the shared innovations only within a window of m
// around each coordinate (plus per-coordinate auxiliary streams that are
// independent across coordinates), so that coordinates more than m apart
// are independent. This is the operational backbone for everything else:
// coupling-distance estimation, blocking, and the invariance checks.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace splitsim {

enum class Distribution { StandardNormal, Rademacher, UniformBit, StudentT };

struct InnovationSpec {
    Distribution distribution = Distribution::StandardNormal;
    double df = 0.0;         // StudentT only; must be > 2
    std::uint64_t seed = 0;  // stream id, mixed with the per-call seed
};

// Coefficient sequences for the linear stages. Rule-based sequences are
// materialized to a finite window large enough that the omitted tail is
// numerically negligible (see materialize_coefficients).
struct CoefficientRule {
    enum class Kind { Explicit, Polynomial, Exponential };
    Kind kind = Kind::Explicit;
    // Explicit: causal ? (a_0..a_L) : (a_{-h}..a_h), odd length when two-sided.
    std::vector<double> coeffs;
    double decay = 0.0;  // Polynomial: exponent A > 0 (a_j ~ |j|^-(A+1)); Exponential: rho in (0,1)
    bool causal = false;
};

// Moving average of fixed span m0: Y_k = sum_{i=0..m0} w_i e_{k-i}.
// The window-m approximation is Y itself for m >= m0 and 0 otherwise.
struct MDepParams {
    int m0 = 0;
    std::vector<double> weights;  // size m0 + 1
};

// Two-sided or causal linear process Y_k = sum_j a_j e_{k-j}; the window-m
// approximation truncates the sum to |j| <= floor(m/2).
struct LinearParams {
    CoefficientRule rule;
};

// Affine contraction recursion Y_k = phi * Y_{k-1} + e_k, |phi| < 1.
// The window-m approximation regenerates the recursion with auxiliary
// innovations for all indices below k - m, keeping the true innovations on
// [k-m, k].
struct RecurrenceParams {
    double phi = 0.0;
    int burn_in = 1000;
};

// Augmented GARCH(1,1) with identity link: v_k = omega + (beta1 + alpha1 *
// e_{k-1}^2) * v_{k-1}, Y_k = sqrt(v_k) * e_k. Validation runs a Monte Carlo
// stationarity screen requiring E log(beta1 + alpha1 e^2) < 0. Coupling as
// for Recurrence.
struct AugGarchParams {
    double omega = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    int burn_in = 1000;
};

struct ProcessSpec;

// Linear filter over a dependent inner process: Z_k = sum_j a_j Y_{k-j}.
// The window-m approximation splits the window budget between the outer
// truncation (floor(m/4) per side) and the inner approximation so that the
// composite still depends on shared randomness only within m.
struct LinearDependentParams {
    CoefficientRule rule;
    std::shared_ptr<const ProcessSpec> inner;
};

enum class PeriodicFunction { CosTwoPi, SinTwoPi, Triangle };

// Dyadic doubling-map process: with i.i.d. digits e_i in {0,1}, Y_k =
// f(sum_{j=1..depth} e_{k+j} 2^-j) for a 1-periodic mean-zero Lipschitz f.
// The window-m approximation replaces digits beyond j = m with an auxiliary
// stream, giving |Y - Y^(m)| <= Lip(f) * 2^-m. Requires UniformBit
// innovations (the digit supply).
struct ErgodicDoublingParams {
    PeriodicFunction f = PeriodicFunction::CosTwoPi;
    int digit_depth = 64;  // in [1, 64]
};

struct ProcessSpec {
    std::variant<MDepParams, LinearParams, RecurrenceParams, AugGarchParams,
                 LinearDependentParams, ErgodicDoublingParams>
        kind;
    InnovationSpec innovations;
};

struct EpidemicShift {
    std::int64_t m1 = 0;  // last index before the shifted segment
    std::int64_t m2 = 0;  // last shifted index
    double delta = 0.0;
};

struct SamplePath {
    std::vector<double> values;  // Y_1..Y_n
    std::uint64_t seed = 0;
    std::optional<ProcessSpec> spec;
    std::optional<EpidemicShift> epidemic;
};

struct CoupledPath {
    std::vector<double> y;         // Y_1..Y_n
    std::vector<double> y_approx;  // Y^(m)_1..Y^(m)_n, same innovations
    int m = 0;                     // -1 when a per-index window schedule was used
    std::uint64_t seed = 0;
    std::vector<int> m_schedule;   // nonempty iff m == -1
};

// Throws SpecError on any invariant violation (including the AugGarch
// stationarity screen).
void validate(const ProcessSpec& spec);

SamplePath generate(const ProcessSpec& spec, std::int64_t n, std::uint64_t seed);

CoupledPath generate_coupled(const ProcessSpec& spec, std::int64_t n, int m, std::uint64_t seed);

// Per-index window schedule; m_by_index[k-1] is the window for coordinate k.
CoupledPath generate_coupled_scheduled(const ProcessSpec& spec, std::int64_t n,
                                       std::span<const int> m_by_index, std::uint64_t seed);

// Adds delta to values at indices m1+1..m2 (1-based); requires 1 <= m1 < m2 <= n.
void inject_epidemic(SamplePath& path, std::int64_t m1, std::int64_t m2, double delta);

// Exact long-run variance (sum of all autocovariances) for MDep and Linear
// kinds: (sum_j a_j)^2 * Var(e). Empty for other kinds.
std::optional<double> theoretical_sigma2(const ProcessSpec& spec);

// Exact squared L2 coupling distance E (Y - Y^(m))^2 for MDep and Linear
// kinds, computed from the same materialized coefficients the generator
// uses. Throws SpecError for other kinds.
double closed_form_delta2(const ProcessSpec& spec, int m);

// The innovation stream for absolute indices lo..hi, determined by the
// InnovationSpec alone. Exposed so tests can check path identities.
std::vector<double> innovation_stream(const InnovationSpec& innov, std::int64_t lo,
                                      std::int64_t hi);

double innovation_variance(const InnovationSpec& innov);

// Materialized coefficient window of a rule: values a_{j_lo..j_hi} and the
// offset j_lo. Explicit rules keep their support; Polynomial and Exponential
// rules are truncated where the tail mass is negligible (capped, so very
// heavy tails define the model as its truncation).
struct MaterializedCoefficients {
    std::vector<double> a;
    std::int64_t j_lo = 0;
    std::int64_t j_hi() const { return j_lo + static_cast<std::int64_t>(a.size()) - 1; }
};

MaterializedCoefficients materialize_coefficients(const CoefficientRule& rule);

}  // namespace splitsim
