#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "capkit/exec.hpp"

namespace capkit {

/// Per-node values for every dyadic cube of a subtree; level[j] has 2^{d j}
/// entries, level[depth] the leaves. Children of node p at level j are the
/// 2^d nodes (2*idx + offset) at level j+1, lexicographic offsets.
struct LevelTable {
    int d = 1;
    int depth = 0;
    std::vector<std::vector<double>> level;

    double value(int j, std::size_t flat) const { return level[static_cast<std::size_t>(j)][flat]; }
};

/// Bottom-up plain sums (mass aggregation over the tree).
LevelTable sum_levels(std::span<const double> leaf_vals, int d, int k, Exec ex = Exec::Serial);

/// Bottom-up min(side^beta, children sum): the exact-cover content recursion.
/// Children are added in fixed lexicographic order, sequential summation.
LevelTable content_levels(std::span<const double> leaf_vals, int d, int k, double top_side,
                          double beta, Exec ex = Exec::Serial);

/// Sum of the 2^d child entries of node p, in lexicographic order.
double children_sum(const LevelTable& t, int j, std::size_t p);

/// sigma[j][p] = seeds[j][p] + sum of children sigma[j+1]; bottom-up.
/// seeds[j] must have 2^{d j} entries, j = 0..depth.
LevelTable accumulate_levels(std::vector<std::vector<double>> seeds, int d, Exec ex = Exec::Serial);

}  // namespace capkit
