#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "capkit/exec.hpp"
#include "capkit/grid.hpp"
#include "capkit/levels.hpp"

namespace capkit {

struct ContentParams {
    double beta = 1.0;

    ContentParams() = default;
    explicit ContentParams(double b) : beta(b) {}
};

/// Throws "beta must lie in (0, d]" when out of range.
void validate_beta(const ContentParams& p, int d);

/// Exact dyadic Hausdorff content of E within `within`, covers subordinate to
/// `within`. Recursion: leaf costs side^beta when marked, interior nodes take
/// min(side^beta, children sum). Exact for leaf-cell unions.
double dyadic_content(const DyadicSet& E, const ContentParams& p, const DyadicCube& within,
                      Exec ex = Exec::Serial);
double dyadic_content(const DyadicSet& E, const ContentParams& p, Exec ex = Exec::Serial);

/// Grid-scale stand-in for content-null sets: at finite resolution the only
/// null set is the empty one, so every "almost everywhere" statement upstream
/// is checked on every leaf.
bool content_measure_zero(const DyadicSet& E);

/// Contents of E inside every dyadic cube of the subtree, each subordinate to
/// that cube (equal, by locality, to the value subordinate to any ancestor).
LevelTable content_table(const DyadicSet& E, const ContentParams& p, const DyadicCube& within,
                         Exec ex = Exec::Serial);

/// Antichain cover achieving the content minimum. When a cube's own cost ties
/// the children sum the coarse cube is recorded.
std::vector<DyadicCube> optimal_cover(const DyadicSet& E, const ContentParams& p,
                                      const DyadicCube& within);

/// pi^{beta/2} / Gamma(beta/2 + 1), the ball-cover normalization.
double omega_beta(double beta);

/// Bracket around the spherical (ball-cover) content. `upper` prices the
/// circumscribed ball of each cube in the optimal dyadic cover; `lower` divides
/// the dyadic value by the declared equivalence constant, recorded in
/// `c_beta_equiv` so alternate conventions can rescale.
struct ContentBracket {
    double lower = 0.0;
    double upper = 0.0;
    double dyadic_value = 0.0;
    double c_beta_equiv = 1.0;
};
ContentBracket spherical_bracket(const DyadicSet& E, const ContentParams& p);

struct AxiomViolation {
    std::string kind;  // "monotone" | "subadditive" | "strong-subadditive"
    std::size_t pair_index = 0;
    double lhs = 0.0, rhs = 0.0;
};

struct AxiomReport {
    std::size_t pairs = 0;
    std::size_t monotone_pairs = 0;
    double max_rel_excess = 0.0;
    std::vector<AxiomViolation> violations;
    bool pass() const { return violations.empty(); }
};

/// Checks monotonicity (nested pairs and intersections), subadditivity and
/// strong subadditivity of the content on each (E, F) sample.
AxiomReport capacity_axiom_report(std::span<const std::pair<DyadicSet, DyadicSet>> samples,
                                  const ContentParams& p, Exec ex = Exec::Serial,
                                  double rel_tol = 1e-9);

}  // namespace capkit
