#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "capkit/content.hpp"
#include "capkit/exec.hpp"
#include "capkit/grid.hpp"
#include "capkit/ladder.hpp"

namespace capkit {

struct OscillationResult {
    DyadicCube cube;
    double c_q = 0.0;         // minimizing constant (smallest minimizer on ties)
    double oscillation = 0.0; // (1/side^beta) * min_c ∫|u-c| dH
};

/// Minimizes g(c) = ∫_Q |u-c| dH over c. g is convex (pointwise convexity plus
/// monotone sublinear integral), so a golden-section search on [min u, max u]
/// to 1e-10 is combined with a convex ternary search over the distinct values
/// of u; the smallest minimizer wins ties.
OscillationResult best_constant(const GridFunction& u, const DyadicCube& q, const ContentParams& p);

/// Exact sup of the oscillation over all dyadic subcubes of the root.
double seminorm_dyadic(const GridFunction& u, const ContentParams& p, Exec ex = Exec::Serial);

/// Lower bound on the all-parallel-subcubes seminorm: max of the dyadic
/// seminorm over `shifts` leaf-aligned translated lattices (shift 0 = dyadic).
struct SampledSeminorm {
    double dyadic = 0.0;
    double sampled = 0.0;
    int shifts = 1;
};
SampledSeminorm seminorm_sampled(const GridFunction& u, const ContentParams& p, int shifts,
                                 Exec ex = Exec::Serial);

/// Superlevel contents of |u - c_Q| on a cube with a log-linear tail fit
/// log C(t) ~ log C_fit - c_fit * t / norm on t >= (1+2^beta) * norm.
struct DecayFit {
    std::vector<double> thresholds;
    std::vector<double> contents;
    double c_fit = 0.0;
    double C_fit = 0.0;
    double r_squared = 0.0;
    std::size_t tail_points = 0;
    double norm = 0.0;  // dyadic seminorm used for scaling
};
DecayFit decay_curve(const GridFunction& u, const DyadicCube& q, const ContentParams& p,
                     Exec ex = Exec::Serial);

/// Exponential-decay constants: c_beta = 1 + 2^beta,
/// C = c_equiv * exp(1/(cprime * e) + 1), c = (1/c_equiv) / (cprime * c_beta * e).
/// cprime is the measured quasi-additivity constant and must exceed 1.
struct JNConstants {
    double c_beta = 0.0;
    double c_prime = 0.0;
    double c_equiv = 1.0;
    double big_c = 0.0;
    double small_c = 0.0;
};
JNConstants jn_constants(const ContentParams& p, double cprime, double c_equiv);

struct JNVerifyReport {
    double norm = 0.0;
    std::size_t cubes = 0;
    std::size_t thresholds = 0;
    double max_ratio = 0.0;  // content / bound over all cubes and thresholds
    DyadicCube worst_cube;
    double worst_t = 0.0;
    bool pass = false;
};

/// Checks content({|u-c_Q| >= t}) <= C * side^beta * exp(-c t / norm) for every
/// dyadic subcube and every level-set breakpoint.
JNVerifyReport jn_verify(const GridFunction& u, const ContentParams& p, const JNConstants& k,
                         Exec ex = Exec::Serial);

/// Choquet integral of exp(cprime_exp |u~ - c_Q|) over q, with u~ = u scaled to
/// unit seminorm. Requires cprime_exp < k.small_c (the bound integral diverges
/// otherwise).
double exp_integrability(const GridFunction& u, const DyadicCube& q, const ContentParams& p,
                         double cprime_exp, const JNConstants& k, Exec ex = Exec::Serial);

struct ExpIntReport {
    double bound_constant = 0.0;  // 1 + C / (c/c' - 1)
    double worst_ratio = 0.0;     // integral / (bound_constant * side^beta)
    DyadicCube worst_cube;
    std::size_t cubes = 0;
    bool pass = false;
};
/// The exp-integrability check over every dyadic subcube.
ExpIntReport exp_integrability_sweep(const GridFunction& u, const ContentParams& p, double cprime_exp,
                                     const JNConstants& k, Exec ex = Exec::Serial);

/// sup over cubes of ((1/side^beta) min_c ∫|u-c|^p dH)^{1/p}; p = 1 recovers
/// seminorm_dyadic exactly.
double p_seminorm(const GridFunction& u, const ContentParams& p, double pexp, Exec ex = Exec::Serial);

/// Piecewise-linear map given by ascending breakpoints; extended linearly
/// beyond the ends with the boundary slopes.
struct PiecewiseLinear {
    std::vector<double> xs, ys;

    PiecewiseLinear(std::vector<double> xs_, std::vector<double> ys_);
    static PiecewiseLinear linear(double slope);
    static PiecewiseLinear abs_value();

    double operator()(double x) const;
    double lipschitz() const;
};

struct ComposeReport {
    double lhs = 0.0;  // seminorm of phi(u)
    double rhs = 0.0;  // Lip(phi) * seminorm of u
    double lip = 0.0;
    bool pass = false;
};
/// Verifies the Lipschitz composition bound; phi(0) must vanish.
ComposeReport compose_lipschitz(const GridFunction& u, const PiecewiseLinear& phi,
                                const ContentParams& p, Exec ex = Exec::Serial);

/// Classical dyadic BMO seminorm (Lebesgue averages, median minimizer); the
/// independent route used to cross-check the beta = d case.
double classical_bmo_dyadic(const GridFunction& u, Exec ex = Exec::Serial);

struct RestrictReport {
    int k = 0;
    double slice_classical = 0.0;   // classical dyadic BMO of the slice
    double full_seminorm = 0.0;     // seminorm of u at beta = k
    double ratio = 0.0;             // slice / full (1 when both vanish)
};
/// Extracts the k-dimensional axis slice at the given leaf-aligned offsets of
/// the dropped trailing axes and compares seminorms.
std::pair<GridFunction, RestrictReport> restrict_hyperplane(const GridFunction& u, int k,
                                                            std::span<const std::int64_t> offset,
                                                            Exec ex = Exec::Serial);

struct NestingReport {
    double norm_alpha = 0.0;
    double norm_beta = 0.0;
    double ratio = 0.0;            // norm_beta / norm_alpha
    double bound_constant = 0.0;   // C^{beta/alpha} * alpha / (c * beta)
    double max_power_excess = 0.0; // content power inequality slack
    double max_integrated_excess = 0.0;
    std::size_t power_violations = 0;
    bool pass = false;
};
/// Per-superlevel power inequality C_beta <= C_alpha^{beta/alpha} on the unit
/// root cube plus the integrated oscillation bound with the decay constants at
/// alpha (measured cprime).
NestingReport nesting_check(const GridFunction& u, const ContentParams& alpha,
                            const ContentParams& beta, double cprime, Exec ex = Exec::Serial);

/// Visits every dyadic subcube with its minimizing constant, oscillation and
/// the ladder of |u - c_Q|. The callback runs concurrently on distinct cubes in
/// Parallel mode.
using OscVisitor = void (*)(void* ctx, const DyadicCube& cube, double c_q, double osc,
                            const Ladder& ladder, double cap);
void sweep_oscillations(const GridFunction& u, const ContentParams& p, Exec ex, void* ctx,
                        OscVisitor visit);

}  // namespace capkit
