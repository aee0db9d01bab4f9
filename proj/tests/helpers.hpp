#pragma once

#include <vector>

#include "capkit/grid.hpp"
#include "capkit/rng.hpp"

namespace capkit::testing {

inline GridFunction grid1d(std::vector<double> vals, int n, double side = 1.0) {
    return GridFunction(RootCube(1, {0, 0, 0}, side, n), std::move(vals));
}

inline DyadicSet set1d(std::vector<std::uint8_t> mask, int n) {
    return DyadicSet(RootCube::unit(1, static_cast<int>(n)), std::move(mask));
}

inline DyadicCube cube1(int level, std::int64_t i) { return DyadicCube(level, {i, 0, 0}); }
inline DyadicCube cube2(int level, std::int64_t i, std::int64_t j) {
    return DyadicCube(level, {i, j, 0});
}

inline DyadicSet random_set(const RootCube& root, Rng& rng, double p = 0.4) {
    std::vector<std::uint8_t> mask(root.leaf_count());
    for (auto& b : mask) b = rng.coin(p) ? 1 : 0;
    return DyadicSet(root, std::move(mask));
}

inline GridFunction random_grid(const RootCube& root, Rng& rng, double lo = 0.0, double hi = 2.0) {
    std::vector<double> vals(root.leaf_count());
    for (double& v : vals) v = rng.uniform(lo, hi);
    return GridFunction(root, std::move(vals));
}

}  // namespace capkit::testing
