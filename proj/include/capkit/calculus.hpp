#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "capkit/content.hpp"
#include "capkit/exec.hpp"
#include "capkit/grid.hpp"
#include "capkit/levels.hpp"

namespace capkit {

/// Pairwise non-overlapping dyadic cubes of one root cube.
struct CubeFamily {
    RootCube root;
    std::vector<DyadicCube> cubes;

    CubeFamily() = default;
    CubeFamily(RootCube root_, std::vector<DyadicCube> cubes_);  // validates non-overlap
};

struct OVSelection {
    CubeFamily subfamily;  // original cubes the scan reached directly
    CubeFamily ancestors;  // non-overlapping heavy covering cubes
    double packing_constant_observed = 0.0;  // max over dyadic Q of subfamily weight / side^beta
};

/// Covering selection: top-down stopping-time scan. A cube is heavy when the
/// side^beta weight of family cubes below it reaches its own side^beta; the
/// maximal heavy cubes (never the family cubes themselves) become ancestors
/// and their subtrees are skipped. Family cubes reached by the scan form the
/// subfamily. Verified postconditions, violation throws:
///   (1) every family cube lies in the subfamily or below an ancestor,
///   (2) subfamily packing: weight below any dyadic cube <= 2 side^beta,
///   (3) each ancestor is heavy for the original family.
OVSelection melnikov_select(const CubeFamily& family, const ContentParams& p);

/// Wraps a caller-supplied family as the subfamily of a selection (no
/// ancestors); validates the packing condition (2).
OVSelection selection_from_subfamily(const CubeFamily& family, const ContentParams& p);

struct PackingIntegralReport {
    double numerator = 0.0;    // sum of per-cube Choquet integrals of |f|
    double denominator = 0.0;  // Choquet integral of |f| over the union
    double ratio = 0.0;
    bool impossible = false;   // nonzero numerator over zero denominator
};

/// Quasi-additivity ratio of the Choquet integral over a packing subfamily.
PackingIntegralReport packing_integral_check(const OVSelection& sel, const GridFunction& f,
                                             const ContentParams& p, Exec ex = Exec::Serial);

/// Choquet integrals of |f| over every dyadic cube of the subtree, each
/// subordinate to its own cube (equal to the root-subordinate value by locality).
LevelTable integral_table(const GridFunction& f, const ContentParams& p, const DyadicCube& within,
                          Exec ex = Exec::Serial);

/// Normalized averages (1/side^beta) * integral; leaf entries are |f| itself
/// (the leaf average equals the leaf value identically).
LevelTable average_table(const GridFunction& f, const ContentParams& p, const DyadicCube& within,
                         Exec ex = Exec::Serial);

/// Per leaf, the largest normalized Choquet average of |f| over the ancestor
/// chain (leaf through root).
GridFunction maximal_function(const GridFunction& f, const ContentParams& p, Exec ex = Exec::Serial);

struct WeakTypeReport {
    double t = 0.0;
    double level_set_content = 0.0;  // H({Mf > t})
    double integral = 0.0;           // ∫|f| dH
    double integral_over_t = 0.0;    // the bound shy of its constant
    double ratio = 0.0;              // t * content / integral
};
WeakTypeReport weak_type_check(const GridFunction& f, const ContentParams& p, double t,
                               Exec ex = Exec::Serial);

/// Density ratios C(E ∩ Q')/side(Q')^beta along the ancestor chain of a leaf
/// of E, from the root down to the leaf (where the ratio is exactly 1).
std::vector<std::pair<int, double>> density_curve(const DyadicSet& E, std::size_t leaf,
                                                  const ContentParams& p);

struct DifferentiationReport {
    bool leaf_average_exact = false;
    // max over leaves of |sup_{levels >= m0} average - |f|(leaf)| for each m0.
    std::vector<double> max_deviation_by_level;
};
DifferentiationReport differentiation_check(const GridFunction& f, const ContentParams& p,
                                            Exec ex = Exec::Serial);

/// Stopping-time decomposition at height lambda: maximal dyadic cubes whose
/// normalized average exceeds lambda. Averages land in (lambda, 2^beta lambda]
/// and every unselected leaf satisfies |f| <= lambda.
struct CZDecomposition {
    double lambda = 0.0;
    CubeFamily cubes;
    std::vector<double> averages;
};
CZDecomposition cz_decompose(const GridFunction& f, const DyadicCube& within, const ContentParams& p,
                             double lambda, Exec ex = Exec::Serial);

}  // namespace capkit
