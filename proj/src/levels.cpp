#include "capkit/levels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

namespace {

// parent[p] = min(cap, sum of children) when Clip, plain sum otherwise.
template <bool Clip>
void fold_level(int d, std::size_t pm, const std::vector<double>& child, std::vector<double>& parent,
                double cap, Exec ex) {
    const bool par = ex == Exec::Parallel && pm >= (d == 1 ? std::size_t{4096} : std::size_t{64});
    if (d == 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
        for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(pm); ++a) {
            const double s = child[2 * a] + child[2 * a + 1];
            parent[static_cast<std::size_t>(a)] = Clip ? std::min(cap, s) : s;
        }
    } else if (d == 2) {
        const std::size_t cm = 2 * pm;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
        for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(pm); ++a) {
            const double* r0 = child.data() + (2 * a) * static_cast<std::ptrdiff_t>(cm);
            const double* r1 = child.data() + (2 * a + 1) * static_cast<std::ptrdiff_t>(cm);
            double* pr = parent.data() + a * static_cast<std::ptrdiff_t>(pm);
            for (std::size_t b = 0; b < pm; ++b) {
                const double s = r0[2 * b] + r0[2 * b + 1] + r1[2 * b] + r1[2 * b + 1];
                pr[b] = Clip ? std::min(cap, s) : s;
            }
        }
    } else {
        const std::size_t cm = 2 * pm;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
        for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(pm); ++a) {
            for (std::size_t b = 0; b < pm; ++b) {
                double* pr = parent.data() + (static_cast<std::size_t>(a) * pm + b) * pm;
                for (std::size_t c = 0; c < pm; ++c) {
                    double s = 0.0;
                    for (int oa = 0; oa < 2; ++oa)
                        for (int ob = 0; ob < 2; ++ob)
                            for (int oc = 0; oc < 2; ++oc)
                                s += child[((2 * static_cast<std::size_t>(a) + oa) * cm + (2 * b + ob)) * cm +
                                           (2 * c + oc)];
                    pr[c] = Clip ? std::min(cap, s) : s;
                }
            }
        }
    }
}

template <bool Clip>
LevelTable build(std::span<const double> leaf_vals, int d, int k, double top_side, double beta,
                 Exec ex) {
    if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    LevelTable t;
    t.d = d;
    t.depth = k;
    t.level.resize(static_cast<std::size_t>(k) + 1);
    t.level[static_cast<std::size_t>(k)].assign(leaf_vals.begin(), leaf_vals.end());
    for (int j = k - 1; j >= 0; --j) {
        const std::size_t pm = std::size_t{1} << j;
        t.level[static_cast<std::size_t>(j)].resize(std::size_t{1} << static_cast<unsigned>(d * j));
        const double cap = Clip ? std::pow(top_side * std::ldexp(1.0, -j), beta) : 0.0;
        fold_level<Clip>(d, pm, t.level[static_cast<std::size_t>(j) + 1], t.level[static_cast<std::size_t>(j)],
                         cap, ex);
    }
    return t;
}

}  // namespace

LevelTable sum_levels(std::span<const double> leaf_vals, int d, int k, Exec ex) {
    return build<false>(leaf_vals, d, k, 0.0, 0.0, ex);
}

LevelTable content_levels(std::span<const double> leaf_vals, int d, int k, double top_side,
                          double beta, Exec ex) {
    return build<true>(leaf_vals, d, k, top_side, beta, ex);
}

LevelTable accumulate_levels(std::vector<std::vector<double>> seeds, int d, Exec ex) {
    if (seeds.empty()) throw std::invalid_argument("accumulate_levels needs at least one level");
    LevelTable t;
    t.d = d;
    t.depth = static_cast<int>(seeds.size()) - 1;
    t.level = std::move(seeds);
    for (int j = t.depth - 1; j >= 0; --j) {
        const std::size_t pm = std::size_t{1} << j;
        std::vector<double> folded(t.level[static_cast<std::size_t>(j)].size());
        fold_level<false>(d, pm, t.level[static_cast<std::size_t>(j) + 1], folded, 0.0, ex);
        auto& own = t.level[static_cast<std::size_t>(j)];
        for (std::size_t p = 0; p < own.size(); ++p) own[p] += folded[p];
    }
    return t;
}

double children_sum(const LevelTable& t, int j, std::size_t p) {
    const auto& ch = t.level[static_cast<std::size_t>(j) + 1];
    if (t.d == 1) return ch[2 * p] + ch[2 * p + 1];
    if (t.d == 2) {
        const std::size_t M = std::size_t{1} << j, M2 = 2 * M;
        const std::size_t a = p / M, b = p % M;
        return ch[(2 * a) * M2 + 2 * b] + ch[(2 * a) * M2 + 2 * b + 1] + ch[(2 * a + 1) * M2 + 2 * b] +
               ch[(2 * a + 1) * M2 + 2 * b + 1];
    }
    const std::size_t M = std::size_t{1} << j, M2 = 2 * M;
    const std::size_t a = p / (M * M), rb = p % (M * M), b = rb / M, c = rb % M;
    double s = 0.0;
    for (int oa = 0; oa < 2; ++oa)
        for (int ob = 0; ob < 2; ++ob)
            for (int oc = 0; oc < 2; ++oc)
                s += ch[((2 * a + oa) * M2 + (2 * b + ob)) * M2 + (2 * c + oc)];
    return s;
}

}  // namespace capkit
