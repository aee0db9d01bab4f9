#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "capkit/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

// Superlevel ladder of a nonnegative step function g on a dyadic box:
// strictly increasing positive thresholds v_1 < ... < v_k, with
// contents[i] = H({g >= v_i}) computed subordinate to the box itself.
// Choquet integrals, decay curves and level-set checks all read off ladders.
struct Ladder {
    std::vector<double> values;
    std::vector<double> contents;
};

/// View of one node's ladder during a sweep. `cap` is side(node)^beta.
struct LadderView {
    const double* v = nullptr;
    const double* c = nullptr;
    std::size_t len = 0;
    double cap = 0.0;
};

/// Choquet integral from a ladder: sum of (v_i - v_{i-1}) contents[i], v_0 = 0.
inline double ladder_integral(const LadderView& L) {
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < L.len; ++i) {
        acc += (L.v[i] - prev) * L.c[i];
        prev = L.v[i];
    }
    return acc;
}

/// Choquet integral of phi(g) for increasing phi >= 0; phi0 = phi(0).
template <class Phi>
double ladder_phi_integral(const LadderView& L, Phi&& phi, double phi0) {
    double acc = phi0 * L.cap, prev = phi0;
    for (std::size_t i = 0; i < L.len; ++i) {
        const double cur = phi(L.v[i]);
        acc += (cur - prev) * L.c[i];
        prev = cur;
    }
    return acc;
}

namespace detail {

// Ladders of all nodes at one tree depth, as slices [beg[p], end[p]) of flat
// arrays. Total occupancy never exceeds the leaf count of the swept box.
struct LadderLevel {
    std::vector<double> v, c;
    std::vector<std::size_t> beg, end;
};

}  // namespace detail

/// Reusable buffers for ladder sweeps; hot loops run allocation-free once warm.
class LadderWorkspace {
  public:
    void ensure(std::size_t leaves) {
        if (cap_ >= leaves) return;
        cap_ = leaves;
        for (detail::LadderLevel* l : {&a_, &b_}) {
            l->v.resize(leaves);
            l->c.resize(leaves);
            l->beg.resize(leaves + 1);
            l->end.resize(leaves + 1);
        }
    }

    detail::LadderLevel& level_a() { return a_; }
    detail::LadderLevel& level_b() { return b_; }

    std::vector<double> scratch;

  private:
    detail::LadderLevel a_, b_;
    std::size_t cap_ = 0;
};

namespace detail {

inline void gather_child_slices(int d, int j, std::size_t p, const LadderLevel& child,
                                std::size_t* cbeg, std::size_t* cend) {
    // Children of parent p at depth j live at depth j+1; lexicographic offsets.
    if (d == 1) {
        for (int o = 0; o < 2; ++o) {
            const std::size_t f = 2 * p + static_cast<std::size_t>(o);
            cbeg[o] = child.beg[f];
            cend[o] = child.end[f];
        }
    } else if (d == 2) {
        const std::size_t M = std::size_t{1} << j, M2 = 2 * M;
        const std::size_t a = p / M, b = p % M;
        int o = 0;
        for (int oa = 0; oa < 2; ++oa)
            for (int ob = 0; ob < 2; ++ob, ++o) {
                const std::size_t f = (2 * a + oa) * M2 + (2 * b + ob);
                cbeg[o] = child.beg[f];
                cend[o] = child.end[f];
            }
    } else {
        const std::size_t M = std::size_t{1} << j, M2 = 2 * M;
        const std::size_t a = p / (M * M), rb = p % (M * M), b = rb / M, cc = rb % M;
        int o = 0;
        for (int oa = 0; oa < 2; ++oa)
            for (int ob = 0; ob < 2; ++ob)
                for (int oc = 0; oc < 2; ++oc, ++o) {
                    const std::size_t f = ((2 * a + oa) * M2 + (2 * b + ob)) * M2 + (2 * cc + oc);
                    cbeg[o] = child.beg[f];
                    cend[o] = child.end[f];
                }
    }
}

// Merge the 2^d child ladders of parent p; write ascending slice at [wbeg, ...).
// Descending value walk keeps one running content per child, clipped by `cap`.
inline std::size_t merge_node(int d, int j, std::size_t p, double cap, const LadderLevel& child,
                              LadderLevel& parent, std::size_t wbeg) {
    std::size_t cbeg[8], cend[8];
    gather_child_slices(d, j, p, child, cbeg, cend);
    const int nc = 1 << d;

    struct Src {
        const double* v;
        const double* c;
        std::ptrdiff_t i;
        double cur;
    } s[8];
    for (int t = 0; t < nc; ++t)
        s[t] = {child.v.data() + cbeg[t], child.c.data() + cbeg[t],
                static_cast<std::ptrdiff_t>(cend[t] - cbeg[t]) - 1, 0.0};

    double sum = 0.0;
    std::size_t w = wbeg;
    for (;;) {
        double vmax = 0.0;  // ladder values are strictly positive
        for (int t = 0; t < nc; ++t)
            if (s[t].i >= 0 && s[t].v[s[t].i] > vmax) vmax = s[t].v[s[t].i];
        if (vmax == 0.0) break;
        for (int t = 0; t < nc; ++t)
            if (s[t].i >= 0 && s[t].v[s[t].i] == vmax) {
                sum += s[t].c[s[t].i] - s[t].cur;
                s[t].cur = s[t].c[s[t].i];
                --s[t].i;
            }
        parent.v[w] = vmax;
        parent.c[w] = std::min(cap, sum);
        ++w;
    }
    std::reverse(parent.v.begin() + static_cast<std::ptrdiff_t>(wbeg), parent.v.begin() + static_cast<std::ptrdiff_t>(w));
    std::reverse(parent.c.begin() + static_cast<std::ptrdiff_t>(wbeg), parent.c.begin() + static_cast<std::ptrdiff_t>(w));
    return w;
}

}  // namespace detail

/// Bottom-up sweep over the full subtree of a box of 2^k leaves per axis.
/// `g` holds the (nonnegative) leaf values row-major; `top_side` the box side.
/// visit(depth j, flat index within depth, LadderView) runs for every node,
/// leaf depth k first, top node (j=0) last. In Parallel mode nodes of one depth
/// are visited concurrently (distinct nodes only).
template <class Visit>
void ladder_sweep(std::span<const double> g, int d, int k, double top_side, double beta,
                  LadderWorkspace& ws, Exec ex, Visit&& visit) {
    const std::size_t leaves = g.size();
    ws.ensure(leaves);
    detail::LadderLevel* child = &ws.level_a();
    detail::LadderLevel* parent = &ws.level_b();

    const double leaf_content = std::pow(top_side * std::ldexp(1.0, -k), beta);

    // Leaf depth: one slot per leaf.
    {
        auto& L = *child;
        const bool par = ex == Exec::Parallel && leaves >= 4096;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(leaves); ++i) {
            const auto u = static_cast<std::size_t>(i);
            L.beg[u] = u;
            if (g[u] > 0.0) {
                L.v[u] = g[u];
                L.c[u] = leaf_content;
                L.end[u] = u + 1;
            } else {
                L.end[u] = u;
            }
            visit(k, u, LadderView{L.v.data() + u, L.c.data() + u, L.end[u] - u, leaf_content});
        }
    }

    for (int j = k - 1; j >= 0; --j) {
        const std::size_t nodes = std::size_t{1} << static_cast<unsigned>(d * j);
        const double cap = std::pow(top_side * std::ldexp(1.0, -j), beta);

        // Slice starts from child occupancy prefix (serial, cheap).
        std::size_t acc = 0;
        std::size_t cbeg[8], cend[8];
        for (std::size_t p = 0; p < nodes; ++p) {
            parent->beg[p] = acc;
            detail::gather_child_slices(d, j, p, *child, cbeg, cend);
            for (int t = 0; t < (1 << d); ++t) acc += cend[t] - cbeg[t];
        }
        parent->beg[nodes] = acc;

        const bool par = ex == Exec::Parallel && nodes >= 64;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
        for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(nodes); ++pi) {
            const auto p = static_cast<std::size_t>(pi);
            parent->end[p] = detail::merge_node(d, j, p, cap, *child, *parent, parent->beg[p]);
            visit(j, p,
                  LadderView{parent->v.data() + parent->beg[p], parent->c.data() + parent->beg[p],
                             parent->end[p] - parent->beg[p], cap});
        }
        std::swap(child, parent);
    }
}

/// Ladder of the whole box (top node only).
Ladder top_ladder(std::span<const double> g, int d, int k, double top_side, double beta,
                  LadderWorkspace& ws, Exec ex = Exec::Serial);

/// Choquet integral of g over the box, subordinate content.
double box_choquet(std::span<const double> g, int d, int k, double top_side, double beta,
                   LadderWorkspace& ws, Exec ex = Exec::Serial);

}  // namespace capkit
