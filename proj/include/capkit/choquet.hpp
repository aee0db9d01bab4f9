#pragma once

#include <span>
#include <utility>
#include <vector>

#include "capkit/content.hpp"
#include "capkit/exec.hpp"
#include "capkit/grid.hpp"

namespace capkit {

/// Sorted distinct values of a nonnegative grid function on a cube with the
/// content of each superlevel set {f >= t_i}, subordinate to the cube.
/// {f > t} equals {f >= t_i} on every layer interior, so the jump convention
/// does not affect integrals; thresholds collate by exact float equality.
struct LayerCake {
    std::vector<double> thresholds;
    std::vector<double> contents;
};

LayerCake layer_cake(const GridFunction& f, const ContentParams& p, const DyadicCube& over,
                     Exec ex = Exec::Serial);

/// Layer-cake Choquet integral of f >= 0 over a cube; exact for step functions.
/// Signed input is rejected (use l1_norm).
double choquet_integral(const GridFunction& f, const ContentParams& p, const DyadicCube& over,
                        Exec ex = Exec::Serial);
double choquet_integral(const GridFunction& f, const ContentParams& p, Exec ex = Exec::Serial);

/// Choquet integral of |f|: the discrete L^1 norm against the dyadic content.
double l1_norm(const GridFunction& f, const ContentParams& p, const DyadicCube& over,
               Exec ex = Exec::Serial);
double l1_norm(const GridFunction& f, const ContentParams& p, Exec ex = Exec::Serial);

/// Linear integral of |f| against a discrete measure.
double measure_integral_abs(const GridFunction& f, const DiscreteMeasure& nu);

struct SublinearityIssue {
    std::string kind;  // "homogeneity" | "subadditivity" | "monotone-chain"
    std::size_t sample = 0;
    double lhs = 0.0, rhs = 0.0;
};

struct SublinearityReport {
    std::size_t samples = 0;
    double max_homogeneity_rel = 0.0;   // |∫cf - c∫f| / c∫f
    double max_subadd_excess = 0.0;     // (∫(f+g) - ∫f - ∫g) / scale
    std::vector<SublinearityIssue> violations;
    bool pass() const { return violations.empty(); }
};

/// Homogeneity (exact to 1e-12), subadditivity (1e-9) and monotone convergence
/// along the finite chain f_m = min(f, quantiles) for each nonnegative sample.
SublinearityReport sublinearity_report(std::span<const std::pair<GridFunction, GridFunction>> samples,
                                       const ContentParams& p, Exec ex = Exec::Serial);

struct DualPairingReport {
    double pairing = 0.0;      // ∫|f| dν
    double l1 = 0.0;           // ∫|f| dH
    double ratio = 0.0;
    double morrey_norm = 0.0;  // of ν, dyadic cubes
    bool impossible = false;   // nonzero pairing with zero capacitary norm
};

/// Ratio of the measure pairing to the capacitary L^1 norm for a
/// Morrey-normalized measure (norm <= 1 enforced).
DualPairingReport dual_pairing_check(const GridFunction& f, const DiscreteMeasure& nu,
                                     const ContentParams& p, Exec ex = Exec::Serial);

}  // namespace capkit
