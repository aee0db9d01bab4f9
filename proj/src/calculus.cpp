#include "capkit/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "capkit/choquet.hpp"
#include "capkit/ladder.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

namespace {

thread_local LadderWorkspace tl_ws;

std::string cube_str(const DyadicCube& c, int d) {
    std::ostringstream os;
    os << c.level << ":";
    for (int t = 0; t < d; ++t) os << (t ? "," : "") << c.index[t];
    return os.str();
}

double side_pow(const RootCube& root, int level, double beta) {
    return std::pow(root.side * std::ldexp(1.0, -level), beta);
}

// Per-level side^beta weights of a cube list.
std::vector<std::vector<double>> level_weights(const RootCube& root, const std::vector<DyadicCube>& cubes,
                                               double beta) {
    std::vector<std::vector<double>> w(static_cast<std::size_t>(root.n) + 1);
    for (int j = 0; j <= root.n; ++j)
        w[static_cast<std::size_t>(j)].assign(std::size_t{1} << static_cast<unsigned>(root.d * j), 0.0);
    for (const DyadicCube& c : cubes)
        w[static_cast<std::size_t>(c.level)][cube_flat(c, root.d)] += side_pow(root, c.level, beta);
    return w;
}

}  // namespace

CubeFamily::CubeFamily(RootCube root_, std::vector<DyadicCube> cubes_)
    : root(root_), cubes(std::move(cubes_)) {
    // Two dyadic cubes overlap iff one contains the other: mark each cube's
    // node and walk ancestors.
    std::vector<std::vector<std::uint8_t>> mark(static_cast<std::size_t>(root.n) + 1);
    for (int j = 0; j <= root.n; ++j)
        mark[static_cast<std::size_t>(j)].assign(std::size_t{1} << static_cast<unsigned>(root.d * j), 0);
    for (const DyadicCube& c : cubes) {
        validate_cube(root, c);
        mark[static_cast<std::size_t>(c.level)][cube_flat(c, root.d)] = 1;
    }
    for (const DyadicCube& c : cubes) {
        for (int j = 0; j < c.level; ++j) {
            const DyadicCube a = ancestor_at(c, j, root.d);
            if (mark[static_cast<std::size_t>(j)][cube_flat(a, root.d)])
                throw std::invalid_argument("overlapping cube family: " + cube_str(c, root.d) +
                                            " lies inside " + cube_str(a, root.d));
        }
    }
    std::size_t dup = 0;
    for (const DyadicCube& c : cubes) {
        auto& m = mark[static_cast<std::size_t>(c.level)][cube_flat(c, root.d)];
        if (m == 2) ++dup;
        m = 2;
    }
    if (dup) throw std::invalid_argument("overlapping cube family: duplicate cube");
}

namespace {

void verify_selection(const CubeFamily& family, const OVSelection& sel, const ContentParams& p) {
    const RootCube& root = family.root;
    const double tol = 1e-12;

    // (3) ancestors heavy for the original family.
    LevelTable sigma = accumulate_levels(level_weights(root, family.cubes, p.beta), root.d);
    for (const DyadicCube& a : sel.ancestors.cubes) {
        const double w = sigma.value(a.level, cube_flat(a, root.d));
        const double cap = side_pow(root, a.level, p.beta);
        if (w < cap * (1.0 - tol))
            throw std::logic_error("covering selection postcondition (3) failed at ancestor " +
                                   cube_str(a, root.d) + ": weight " + std::to_string(w) + " < " +
                                   std::to_string(cap));
    }

    // (1) every family cube in the subfamily or below an ancestor.
    std::vector<std::vector<std::uint8_t>> anc_mark(static_cast<std::size_t>(root.n) + 1);
    for (int j = 0; j <= root.n; ++j)
        anc_mark[static_cast<std::size_t>(j)].assign(std::size_t{1} << static_cast<unsigned>(root.d * j), 0);
    for (const DyadicCube& a : sel.ancestors.cubes)
        anc_mark[static_cast<std::size_t>(a.level)][cube_flat(a, root.d)] = 1;
    std::vector<std::vector<std::uint8_t>> sub_mark = anc_mark;
    for (auto& lvl : sub_mark) std::fill(lvl.begin(), lvl.end(), 0);
    for (const DyadicCube& c : sel.subfamily.cubes)
        sub_mark[static_cast<std::size_t>(c.level)][cube_flat(c, root.d)] = 1;
    for (const DyadicCube& c : family.cubes) {
        bool covered = sub_mark[static_cast<std::size_t>(c.level)][cube_flat(c, root.d)] != 0;
        for (int j = 0; !covered && j <= c.level; ++j)
            covered = anc_mark[static_cast<std::size_t>(j)][cube_flat(ancestor_at(c, j, root.d), root.d)] != 0;
        if (!covered)
            throw std::logic_error("covering selection postcondition (1) failed: cube " +
                                   cube_str(c, root.d) + " is uncovered");
    }
}

double packing_ratio(const CubeFamily& subfamily, const ContentParams& p) {
    const RootCube& root = subfamily.root;
    LevelTable sigma = accumulate_levels(level_weights(root, subfamily.cubes, p.beta), root.d);
    double worst = 0.0;
    for (int j = 0; j <= sigma.depth; ++j) {
        const double cap = side_pow(root, j, p.beta);
        for (double w : sigma.level[static_cast<std::size_t>(j)])
            if (w > 0.0) worst = std::max(worst, w / cap);
    }
    return worst;
}

}  // namespace

OVSelection melnikov_select(const CubeFamily& family, const ContentParams& p) {
    const RootCube& root = family.root;
    validate_beta(p, root.d);

    std::vector<std::vector<std::uint8_t>> fam_mark(static_cast<std::size_t>(root.n) + 1);
    for (int j = 0; j <= root.n; ++j)
        fam_mark[static_cast<std::size_t>(j)].assign(std::size_t{1} << static_cast<unsigned>(root.d * j), 0);
    for (const DyadicCube& c : family.cubes)
        fam_mark[static_cast<std::size_t>(c.level)][cube_flat(c, root.d)] = 1;

    LevelTable sigma = accumulate_levels(level_weights(root, family.cubes, p.beta), root.d);

    OVSelection sel;
    std::vector<DyadicCube> stack{DyadicCube{}};
    std::vector<DyadicCube> sub, anc;
    while (!stack.empty()) {
        const DyadicCube c = stack.back();
        stack.pop_back();
        const std::size_t flat = cube_flat(c, root.d);
        const double w = sigma.value(c.level, flat);
        if (w == 0.0) continue;
        if (fam_mark[static_cast<std::size_t>(c.level)][flat]) {
            sub.push_back(c);
            continue;
        }
        if (w >= side_pow(root, c.level, p.beta)) {
            anc.push_back(c);
            continue;
        }
        if (c.level < root.n)
            for (const DyadicCube& ch : cube_children(root, c)) stack.push_back(ch);
    }
    std::sort(sub.begin(), sub.end(), cube_less);
    std::sort(anc.begin(), anc.end(), cube_less);
    sel.subfamily = CubeFamily(root, std::move(sub));
    sel.ancestors = CubeFamily(root, std::move(anc));
    sel.packing_constant_observed = packing_ratio(sel.subfamily, p);

    verify_selection(family, sel, p);
    if (sel.packing_constant_observed > 2.0 * (1.0 + 1e-12))
        throw std::logic_error("covering selection postcondition (2) failed: packing constant " +
                               std::to_string(sel.packing_constant_observed) + " exceeds 2");
    return sel;
}

OVSelection selection_from_subfamily(const CubeFamily& family, const ContentParams& p) {
    validate_beta(p, family.root.d);
    OVSelection sel;
    sel.subfamily = family;
    sel.ancestors = CubeFamily(family.root, {});
    sel.packing_constant_observed = packing_ratio(sel.subfamily, p);
    if (sel.packing_constant_observed > 2.0 * (1.0 + 1e-12))
        throw std::invalid_argument("family violates the packing condition: constant " +
                                    std::to_string(sel.packing_constant_observed));
    return sel;
}

PackingIntegralReport packing_integral_check(const OVSelection& sel, const GridFunction& f,
                                             const ContentParams& p, Exec ex) {
    const RootCube& root = sel.subfamily.root;
    if (!f.root.same_shape(root)) throw std::invalid_argument("function and family on different roots");
    PackingIntegralReport rep;
    for (const DyadicCube& q : sel.subfamily.cubes) rep.numerator += l1_norm(f, p, q, ex);

    std::vector<double> masked(f.values.size(), 0.0);
    std::vector<double> box;
    for (const DyadicCube& q : sel.subfamily.cubes) {
        // Copy |f| on the leaves below q.
        const int k = root.n - q.level;
        extract_box(f.values, root, q, box);
        // Write back into the union grid.
        std::array<std::int64_t, kMaxDim> start{0, 0, 0};
        for (int t = 0; t < root.d; ++t) start[t] = q.index[t] << k;
        const std::int64_t len = std::int64_t{1} << k;
        const std::int64_t axis = root.leaves_per_axis();
        std::size_t src = 0;
        if (root.d == 1) {
            for (std::int64_t a = 0; a < len; ++a) masked[static_cast<std::size_t>(start[0] + a)] = std::abs(box[src++]);
        } else if (root.d == 2) {
            for (std::int64_t a = 0; a < len; ++a)
                for (std::int64_t b = 0; b < len; ++b)
                    masked[static_cast<std::size_t>((start[0] + a) * axis + start[1] + b)] = std::abs(box[src++]);
        } else {
            for (std::int64_t a = 0; a < len; ++a)
                for (std::int64_t b = 0; b < len; ++b)
                    for (std::int64_t c = 0; c < len; ++c)
                        masked[static_cast<std::size_t>(((start[0] + a) * axis + start[1] + b) * axis + start[2] + c)] =
                            std::abs(box[src++]);
        }
    }
    rep.denominator = box_choquet(masked, root.d, root.n, root.side, p.beta, tl_ws, ex);
    rep.impossible = rep.denominator == 0.0 && rep.numerator > 0.0;
    rep.ratio = rep.denominator > 0.0 ? rep.numerator / rep.denominator : 0.0;
    return rep;
}

LevelTable integral_table(const GridFunction& f, const ContentParams& p, const DyadicCube& within,
                          Exec ex) {
    validate_beta(p, f.root.d);
    validate_cube(f.root, within);
    std::vector<double> vals;
    extract_box(f.values, f.root, within, vals);
    for (double& v : vals) v = std::abs(v);
    const int k = f.root.n - within.level;
    LevelTable t;
    t.d = f.root.d;
    t.depth = k;
    t.level.resize(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j)
        t.level[static_cast<std::size_t>(j)].resize(std::size_t{1} << static_cast<unsigned>(f.root.d * j));
    ladder_sweep(vals, f.root.d, k, cube_side(f.root, within), p.beta, tl_ws, ex,
                 [&](int j, std::size_t flat, const LadderView& L) {
                     t.level[static_cast<std::size_t>(j)][flat] = ladder_integral(L);
                 });
    return t;
}

LevelTable average_table(const GridFunction& f, const ContentParams& p, const DyadicCube& within,
                         Exec ex) {
    LevelTable t = integral_table(f, p, within, ex);
    const double side = cube_side(f.root, within);
    for (int j = 0; j < t.depth; ++j) {
        const double cap = std::pow(side * std::ldexp(1.0, -j), p.beta);
        for (double& v : t.level[static_cast<std::size_t>(j)]) v /= cap;
    }
    // Leaf averages equal the leaf values identically; write them directly.
    std::vector<double> vals;
    extract_box(f.values, f.root, within, vals);
    auto& leaves = t.level[static_cast<std::size_t>(t.depth)];
    for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i] = std::abs(vals[i]);
    return t;
}

GridFunction maximal_function(const GridFunction& f, const ContentParams& p, Exec ex) {
    LevelTable avg = average_table(f, p, DyadicCube{}, ex);
    const int d = f.root.d, n = f.root.n;
    std::vector<double> cur = avg.level[0];
    for (int j = 1; j <= n; ++j) {
        std::vector<double>& next = avg.level[static_cast<std::size_t>(j)];
        const std::size_t pm = std::size_t{1} << (j - 1);
        const bool par = ex == Exec::Parallel && pm >= 64;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
        for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(cur.size()); ++pi) {
            const auto pp = static_cast<std::size_t>(pi);
            const double up = cur[pp];
            if (d == 1) {
                for (int o = 0; o < 2; ++o) {
                    double& x = next[2 * pp + static_cast<std::size_t>(o)];
                    x = std::max(x, up);
                }
            } else if (d == 2) {
                const std::size_t M2 = 2 * pm, a = pp / pm, b = pp % pm;
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob) {
                        double& x = next[(2 * a + oa) * M2 + (2 * b + ob)];
                        x = std::max(x, up);
                    }
            } else {
                const std::size_t M2 = 2 * pm, a = pp / (pm * pm), rb = pp % (pm * pm), b = rb / pm,
                                  c = rb % pm;
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob)
                        for (int oc = 0; oc < 2; ++oc) {
                            double& x = next[((2 * a + oa) * M2 + (2 * b + ob)) * M2 + (2 * c + oc)];
                            x = std::max(x, up);
                        }
            }
        }
        cur = next;
    }
    return GridFunction(f.root, std::move(cur));
}

WeakTypeReport weak_type_check(const GridFunction& f, const ContentParams& p, double t, Exec ex) {
    if (!(t > 0.0)) throw std::invalid_argument("threshold t must be positive");
    WeakTypeReport rep;
    rep.t = t;
    GridFunction mf = maximal_function(f, p, ex);
    std::vector<std::uint8_t> mask(mf.values.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mf.values[i] > t ? 1 : 0;
    rep.level_set_content = dyadic_content(DyadicSet(f.root, std::move(mask)), p, ex);
    rep.integral = l1_norm(f, p, ex);
    rep.integral_over_t = rep.integral / t;
    rep.ratio = rep.integral > 0.0 ? t * rep.level_set_content / rep.integral : 0.0;
    return rep;
}

std::vector<std::pair<int, double>> density_curve(const DyadicSet& E, std::size_t leaf,
                                                  const ContentParams& p) {
    validate_beta(p, E.root.d);
    if (leaf >= E.mask.size()) throw std::invalid_argument("leaf index out of range");
    if (!E.mask[leaf]) throw std::invalid_argument("leaf does not belong to the set");
    LevelTable t = content_table(E, p, DyadicCube{});
    std::vector<std::pair<int, double>> curve;
    curve.reserve(static_cast<std::size_t>(E.root.n) + 1);
    for (int j = 0; j <= E.root.n; ++j) {
        const DyadicCube a = leaf_ancestor(E.root, leaf, j);
        const double cap = side_pow(E.root, j, p.beta);
        curve.emplace_back(j, t.value(j, cube_flat(a, E.root.d)) / cap);
    }
    return curve;
}

DifferentiationReport differentiation_check(const GridFunction& f, const ContentParams& p, Exec ex) {
    LevelTable avg = average_table(f, p, DyadicCube{}, ex);
    const int n = f.root.n;
    DifferentiationReport rep;
    rep.max_deviation_by_level.assign(static_cast<std::size_t>(n) + 1, 0.0);
    rep.leaf_average_exact = true;

    const std::size_t L = f.values.size();
    std::vector<double> chain(static_cast<std::size_t>(n) + 1);
    for (std::size_t leaf = 0; leaf < L; ++leaf) {
        const double fx = std::abs(f.values[leaf]);
        for (int j = 0; j <= n; ++j)
            chain[static_cast<std::size_t>(j)] =
                avg.value(j, cube_flat(leaf_ancestor(f.root, leaf, j), f.root.d));
        if (chain[static_cast<std::size_t>(n)] != fx) rep.leaf_average_exact = false;
        // Suffix maxima: the best average at scales finer than each level.
        double run = 0.0;
        std::vector<double>& dev = rep.max_deviation_by_level;
        for (int j = n; j >= 0; --j) {
            run = std::max(run, chain[static_cast<std::size_t>(j)]);
            dev[static_cast<std::size_t>(j)] = std::max(dev[static_cast<std::size_t>(j)], std::abs(run - fx));
        }
    }
    return rep;
}

CZDecomposition cz_decompose(const GridFunction& f, const DyadicCube& within, const ContentParams& p,
                             double lambda, Exec ex) {
    validate_beta(p, f.root.d);
    validate_cube(f.root, within);
    LevelTable avg = average_table(f, p, within, ex);
    if (!(lambda >= avg.value(0, 0)))
        throw std::invalid_argument("lambda " + std::to_string(lambda) +
                                    " is below the root average " + std::to_string(avg.value(0, 0)));

    CZDecomposition out;
    out.lambda = lambda;
    std::vector<DyadicCube> picked;
    std::vector<double> averages;

    struct Item {
        int j;
        std::size_t flat;
        DyadicCube rel;
    };
    std::vector<Item> stack{{0, 0, DyadicCube{}}};
    const int d = f.root.d;
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        const double a = avg.value(it.j, it.flat);
        if (a > lambda) {
            picked.push_back(compose_cubes(within, it.rel, d));
            averages.push_back(a);
            const double bound = std::pow(2.0, p.beta) * lambda;
            if (a > bound * (1.0 + 1e-12))
                throw std::logic_error("selected cube average " + std::to_string(a) +
                                       " exceeds 2^beta * lambda = " + std::to_string(bound));
            continue;
        }
        if (it.j == avg.depth) continue;
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
    out.cubes = CubeFamily(f.root, std::move(picked));
    out.averages = std::move(averages);
    return out;
}

}  // namespace capkit
