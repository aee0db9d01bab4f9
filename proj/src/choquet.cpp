#include "capkit/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capkit/ladder.hpp"
#include "capkit/levels.hpp"

namespace capkit {

namespace {

thread_local LadderWorkspace tl_ws;

void check_nonnegative(std::span<const double> vals) {
    for (double v : vals)
        if (v < 0.0)
            throw std::invalid_argument("negative values: the Choquet integral needs f >= 0, use l1_norm");
}

double box_integral(std::span<const double> vals, int d, int k, double side, double beta, Exec ex) {
    return box_choquet(vals, d, k, side, beta, tl_ws, ex);
}

}  // namespace

LayerCake layer_cake(const GridFunction& f, const ContentParams& p, const DyadicCube& over, Exec ex) {
    validate_beta(p, f.root.d);
    validate_cube(f.root, over);
    std::vector<double> vals;
    extract_box(f.values, f.root, over, vals);
    check_nonnegative(vals);
    const int k = f.root.n - over.level;
    const double side = cube_side(f.root, over);
    Ladder lad = top_ladder(vals, f.root.d, k, side, p.beta, tl_ws, ex);
    LayerCake cake;
    const bool has_zero = std::any_of(vals.begin(), vals.end(), [](double v) { return v == 0.0; });
    if (has_zero) {
        cake.thresholds.push_back(0.0);
        cake.contents.push_back(std::pow(side, p.beta));
    }
    cake.thresholds.insert(cake.thresholds.end(), lad.values.begin(), lad.values.end());
    cake.contents.insert(cake.contents.end(), lad.contents.begin(), lad.contents.end());
    return cake;
}

double choquet_integral(const GridFunction& f, const ContentParams& p, const DyadicCube& over, Exec ex) {
    validate_beta(p, f.root.d);
    validate_cube(f.root, over);
    std::vector<double> vals;
    extract_box(f.values, f.root, over, vals);
    check_nonnegative(vals);
    return box_integral(vals, f.root.d, f.root.n - over.level, cube_side(f.root, over), p.beta, ex);
}

double choquet_integral(const GridFunction& f, const ContentParams& p, Exec ex) {
    return choquet_integral(f, p, DyadicCube{}, ex);
}

double l1_norm(const GridFunction& f, const ContentParams& p, const DyadicCube& over, Exec ex) {
    validate_beta(p, f.root.d);
    validate_cube(f.root, over);
    std::vector<double> vals;
    extract_box(f.values, f.root, over, vals);
    for (double& v : vals) v = std::abs(v);
    return box_integral(vals, f.root.d, f.root.n - over.level, cube_side(f.root, over), p.beta, ex);
}

double l1_norm(const GridFunction& f, const ContentParams& p, Exec ex) {
    return l1_norm(f, p, DyadicCube{}, ex);
}

double measure_integral_abs(const GridFunction& f, const DiscreteMeasure& nu) {
    if (!f.root.same_shape(nu.root))
        throw std::invalid_argument("function and measure live on different root cubes");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += std::abs(f.values[i]) * nu.masses[i];
    return s;
}

SublinearityReport sublinearity_report(std::span<const std::pair<GridFunction, GridFunction>> samples,
                                       const ContentParams& p, Exec ex) {
    SublinearityReport rep;
    rep.samples = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [f, g] = samples[i];
        if (!f.root.same_shape(g.root)) throw std::invalid_argument("sample pair on different root cubes");
        const double If = choquet_integral(f, p, ex);
        const double Ig = choquet_integral(g, p, ex);

        // Homogeneity at c = 2.
        GridFunction cf = f;
        for (double& v : cf.values) v *= 2.0;
        const double Icf = choquet_integral(cf, p, ex);
        const double hom_rel = std::abs(Icf - 2.0 * If) / std::max(2.0 * If, 1e-30);
        rep.max_homogeneity_rel = std::max(rep.max_homogeneity_rel, hom_rel);
        if (hom_rel > 1e-12) rep.violations.push_back({"homogeneity", i, Icf, 2.0 * If});

        // Subadditivity.
        GridFunction fg = f;
        for (std::size_t t = 0; t < fg.values.size(); ++t) fg.values[t] += g.values[t];
        const double Ifg = choquet_integral(fg, p, ex);
        const double sub_excess = (Ifg - (If + Ig)) / std::max(If + Ig, 1e-30);
        rep.max_subadd_excess = std::max(rep.max_subadd_excess, sub_excess);
        if (sub_excess > 1e-9) rep.violations.push_back({"subadditivity", i, Ifg, If + Ig});

        // Monotone chain f_m = min(f, m-th cutoff) increasing to f.
        const double fmax = *std::max_element(f.values.begin(), f.values.end());
        double prev = -1.0;
        for (int m = 1; m <= 4; ++m) {
            GridFunction fm = f;
            const double cut = fmax * static_cast<double>(m) / 4.0;
            for (double& v : fm.values) v = std::min(v, cut);
            const double Im = choquet_integral(fm, p, ex);
            if (Im < prev - 1e-12 * std::max(1.0, prev))
                rep.violations.push_back({"monotone-chain", i, Im, prev});
            prev = Im;
        }
        if (std::abs(prev - If) > 1e-12 * std::max(1.0, If))
            rep.violations.push_back({"monotone-chain", i, prev, If});
    }
    return rep;
}

DualPairingReport dual_pairing_check(const GridFunction& f, const DiscreteMeasure& nu,
                                     const ContentParams& p, Exec ex) {
    validate_beta(p, f.root.d);
    DualPairingReport rep;
    // Morrey norm of nu over dyadic cubes (max of mass / side^beta).
    LevelTable masses = sum_levels(nu.masses, nu.root.d, nu.root.n);
    for (int j = 0; j <= masses.depth; ++j) {
        const double cap = std::pow(nu.root.side * std::ldexp(1.0, -j), p.beta);
        for (double m : masses.level[static_cast<std::size_t>(j)])
            rep.morrey_norm = std::max(rep.morrey_norm, m / cap);
    }
    if (rep.morrey_norm > 1.0 + 1e-12)
        throw std::invalid_argument("measure must be Morrey-normalized (norm <= 1)");
    rep.pairing = measure_integral_abs(f, nu);
    rep.l1 = l1_norm(f, p, ex);
    rep.impossible = rep.l1 == 0.0 && rep.pairing > 0.0;
    rep.ratio = rep.l1 > 0.0 ? rep.pairing / rep.l1 : 0.0;
    return rep;
}

}  // namespace capkit
