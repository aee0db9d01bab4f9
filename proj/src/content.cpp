#include "capkit/content.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

void validate_beta(const ContentParams& p, int d) {
    if (!(p.beta > 0.0) || !(p.beta <= static_cast<double>(d)) || !std::isfinite(p.beta))
        throw std::invalid_argument("beta must lie in (0, d]");
}

namespace {

void mask_to_leaf_costs(const DyadicSet& E, const DyadicCube& within, double beta,
                        std::vector<double>& out) {
    std::vector<std::uint8_t> box;
    extract_mask_box(E.mask, E.root, within, box);
    const int k = E.root.n - within.level;
    const double leaf_cost = std::pow(cube_side(E.root, within) * std::ldexp(1.0, -k), beta);
    out.resize(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) out[i] = box[i] ? leaf_cost : 0.0;
}

}  // namespace

double dyadic_content(const DyadicSet& E, const ContentParams& p, const DyadicCube& within, Exec ex) {
    validate_beta(p, E.root.d);
    validate_cube(E.root, within);
    std::vector<double> leaf;
    mask_to_leaf_costs(E, within, p.beta, leaf);
    const int k = E.root.n - within.level;
    if (k == 0) return leaf[0];
    LevelTable t = content_levels(leaf, E.root.d, k, cube_side(E.root, within), p.beta, ex);
    return t.level[0][0];
}

double dyadic_content(const DyadicSet& E, const ContentParams& p, Exec ex) {
    return dyadic_content(E, p, DyadicCube{}, ex);
}

bool content_measure_zero(const DyadicSet& E) { return E.empty(); }

LevelTable content_table(const DyadicSet& E, const ContentParams& p, const DyadicCube& within, Exec ex) {
    validate_beta(p, E.root.d);
    validate_cube(E.root, within);
    std::vector<double> leaf;
    mask_to_leaf_costs(E, within, p.beta, leaf);
    return content_levels(leaf, E.root.d, E.root.n - within.level, cube_side(E.root, within), p.beta, ex);
}

std::vector<DyadicCube> optimal_cover(const DyadicSet& E, const ContentParams& p,
                                      const DyadicCube& within) {
    LevelTable t = content_table(E, p, within, Exec::Serial);
    const double side = cube_side(E.root, within);
    std::vector<DyadicCube> cover;

    // Walk down; a node whose own cost is <= its children sum covers itself.
    struct Item {
        int j;
        std::size_t flat;
        DyadicCube rel;
    };
    std::vector<Item> stack{{0, 0, DyadicCube{}}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        const double val = t.value(it.j, it.flat);
        if (val == 0.0) continue;
        if (it.j == t.depth) {
            cover.push_back(compose_cubes(within, it.rel, E.root.d));
            continue;
        }
        const double cap = std::pow(side * std::ldexp(1.0, -it.j), p.beta);
        const double kids = children_sum(t, it.j, it.flat);
        if (cap <= kids) {
            cover.push_back(compose_cubes(within, it.rel, E.root.d));
            continue;
        }
        // Descend, lexicographic offsets; push reversed so the pop order is stable.
        const int d = E.root.d;
        for (int off = (1 << d) - 1; off >= 0; --off) {
            DyadicCube rel;
            rel.level = it.rel.level + 1;
            std::size_t flat = 0;
            const std::size_t M2 = std::size_t{1} << (it.j + 1);
            for (int tax = 0; tax < d; ++tax) {
                const int bit = (off >> (d - 1 - tax)) & 1;
                rel.index[tax] = 2 * it.rel.index[tax] + bit;
                flat = flat * M2 + static_cast<std::size_t>(rel.index[tax]);
            }
            stack.push_back({it.j + 1, flat, rel});
        }
    }
    return cover;
}

double omega_beta(double beta) {
    return std::pow(3.14159265358979323846, beta / 2.0) / std::tgamma(beta / 2.0 + 1.0);
}

ContentBracket spherical_bracket(const DyadicSet& E, const ContentParams& p) {
    validate_beta(p, E.root.d);
    ContentBracket out;
    const double om = omega_beta(p.beta);
    const double sqrt_d = std::sqrt(static_cast<double>(E.root.d));
    out.c_beta_equiv = om * std::pow(sqrt_d / 2.0, p.beta) * std::pow(2.0, p.beta);
    if (E.empty()) return out;
    out.dyadic_value = dyadic_content(E, p);
    out.lower = out.dyadic_value / out.c_beta_equiv;
    double upper = 0.0;
    for (const DyadicCube& q : optimal_cover(E, p, DyadicCube{})) {
        const double l = cube_side(E.root, q);
        upper += om * std::pow(sqrt_d * l / 2.0, p.beta);
    }
    out.upper = upper;
    return out;
}

AxiomReport capacity_axiom_report(std::span<const std::pair<DyadicSet, DyadicSet>> samples,
                                  const ContentParams& p, Exec ex, double rel_tol) {
    AxiomReport rep;
    rep.pairs = samples.size();
    if (samples.empty()) return rep;
    validate_beta(p, samples[0].first.root.d);
    for (const auto& [E, F] : samples)
        if (!E.root.same_shape(F.root))
            throw std::invalid_argument("sets live on different root cubes");

    struct Row {
        double excess_mono = 0.0, excess_sub = 0.0, excess_strong = 0.0;
        double lhs_mono = 0.0, rhs_mono = 0.0, lhs_sub = 0.0, rhs_sub = 0.0, lhs_strong = 0.0,
               rhs_strong = 0.0;
        bool has_mono = false;
    };
    std::vector<Row> rows(samples.size());

    const auto rel_excess = [](double lhs, double rhs) {
        const double scale = std::max(std::max(lhs, rhs), 1e-30);
        return (lhs - rhs) / scale;
    };

    const bool par = ex == Exec::Parallel && samples.size() > 8;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (par)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples.size()); ++i) {
        const auto& [E, F] = samples[static_cast<std::size_t>(i)];
        const double cE = dyadic_content(E, p);
        const double cF = dyadic_content(F, p);
        const double cU = dyadic_content(set_union(E, F), p);
        const double cI = dyadic_content(set_intersection(E, F), p);
        Row& r = rows[static_cast<std::size_t>(i)];
        // E∩F ⊂ E always gives a monotone check; nested samples add C(E) <= C(F).
        if (set_subset(E, F)) {
            r.has_mono = true;
            r.lhs_mono = cE;
            r.rhs_mono = cF;
            r.excess_mono = rel_excess(cE, cF);
        } else {
            r.has_mono = true;
            r.lhs_mono = cI;
            r.rhs_mono = std::min(cE, cF);
            r.excess_mono = rel_excess(r.lhs_mono, r.rhs_mono);
        }
        r.lhs_sub = cU;
        r.rhs_sub = cE + cF;
        r.excess_sub = rel_excess(cU, cE + cF);
        r.lhs_strong = cU + cI;
        r.rhs_strong = cE + cF;
        r.excess_strong = rel_excess(cU + cI, cE + cF);
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        if (r.has_mono) {
            ++rep.monotone_pairs;
            rep.max_rel_excess = std::max(rep.max_rel_excess, r.excess_mono);
            if (r.excess_mono > rel_tol) rep.violations.push_back({"monotone", i, r.lhs_mono, r.rhs_mono});
        }
        rep.max_rel_excess = std::max({rep.max_rel_excess, r.excess_sub, r.excess_strong});
        if (r.excess_sub > rel_tol) rep.violations.push_back({"subadditive", i, r.lhs_sub, r.rhs_sub});
        if (r.excess_strong > rel_tol)
            rep.violations.push_back({"strong-subadditive", i, r.lhs_strong, r.rhs_strong});
    }
    return rep;
}

}  // namespace capkit
