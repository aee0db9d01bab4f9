#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace capkit {

inline constexpr int kMaxDim = 3;

/// Global cap on d*n so leaf arrays stay addressable. Default 30 bits.
int resolution_bit_cap();
void set_resolution_bit_cap(int bits);

/// Axis-aligned half-open cube [origin, origin+side)^d subdivided into
/// 2^{d n} leaf cells of side `side * 2^-n`. Immutable after construction.
struct RootCube {
    int d = 1;
    std::array<double, kMaxDim> origin{0.0, 0.0, 0.0};
    double side = 1.0;
    int n = 0;

    RootCube() = default;
    RootCube(int d_, std::array<double, kMaxDim> origin_, double side_, int n_);

    static RootCube unit(int d_, int n_);

    std::size_t leaf_count() const { return std::size_t{1} << static_cast<unsigned>(d * n); }
    std::int64_t leaves_per_axis() const { return std::int64_t{1} << n; }
    double leaf_side() const;
    bool same_shape(const RootCube& o) const;
};

/// Address of a cell in the dyadic tree: level in [0, n], per-axis index in [0, 2^level).
struct DyadicCube {
    int level = 0;
    std::array<std::int64_t, kMaxDim> index{0, 0, 0};

    DyadicCube() = default;
    DyadicCube(int level_, std::array<std::int64_t, kMaxDim> index_)
        : level(level_), index(index_) {}

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Deterministic ordering (level, then index lexicographic); used for stable output.
bool cube_less(const DyadicCube& a, const DyadicCube& b);

double cube_side(const RootCube& root, const DyadicCube& c);
std::array<double, kMaxDim> cube_corner(const RootCube& root, const DyadicCube& c);
void validate_cube(const RootCube& root, const DyadicCube& c);

/// The 2^d children tiling c, in lexicographic offset order.
std::vector<DyadicCube> cube_children(const RootCube& root, const DyadicCube& c);

/// outer contains inner (as tree ancestor or equal).
bool cube_contains(const DyadicCube& outer, const DyadicCube& inner, int d);
DyadicCube ancestor_at(const DyadicCube& c, int level, int d);

/// Cube addressed relative to the subtree under `base`, mapped to absolute coordinates.
DyadicCube compose_cubes(const DyadicCube& base, const DyadicCube& rel, int d);

/// Row-major flat index of a cube among the 2^{d*level} cubes of its level.
std::size_t cube_flat(const DyadicCube& c, int d);
DyadicCube cube_from_flat(int level, std::size_t flat, int d);

/// Row-major leaf addressing, last axis fastest.
std::size_t leaf_flat(const RootCube& root, std::span<const std::int64_t> idx);
DyadicCube leaf_cube(const RootCube& root, std::size_t flat);
DyadicCube leaf_ancestor(const RootCube& root, std::size_t flat, int level);
std::array<double, kMaxDim> leaf_center(const RootCube& root, std::size_t flat);

/// Real values constant on leaf cells; the discrete stand-in for functions on the cube.
struct GridFunction {
    RootCube root;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(RootCube root_, std::vector<double> values_);
};

/// Subset of leaf cells.
struct DyadicSet {
    RootCube root;
    std::vector<std::uint8_t> mask;

    DyadicSet() = default;
    DyadicSet(RootCube root_, std::vector<std::uint8_t> mask_);

    bool empty() const;
    std::size_t count() const;
};

/// Nonnegative mass per leaf cell.
struct DiscreteMeasure {
    RootCube root;
    std::vector<double> masses;

    DiscreteMeasure() = default;
    DiscreteMeasure(RootCube root_, std::vector<double> masses_);

    double total() const;
};

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b);
DyadicSet set_intersection(const DyadicSet& a, const DyadicSet& b);
bool set_subset(const DyadicSet& a, const DyadicSet& b);

/// Root cube describing the subtree under c (resolution n - c.level).
RootCube subcube_root(const RootCube& root, const DyadicCube& c);

/// Sub-grid of f on c, values copied.
GridFunction restrict_to(const GridFunction& f, const DyadicCube& c);

/// Copy the leaf box below c into `out` (row-major within the box, 2^{d(n-level)} entries).
void extract_box(std::span<const double> values, const RootCube& root, const DyadicCube& c,
                 std::vector<double>& out);

/// Same, but for an arbitrary leaf-aligned box of 2^k leaves per axis starting at
/// `leaf_start` (per-axis leaf indices). The box must lie inside the root.
void extract_box_at(std::span<const double> values, const RootCube& root,
                    std::span<const std::int64_t> leaf_start, int k, std::vector<double>& out);

void extract_mask_box(std::span<const std::uint8_t> mask, const RootCube& root,
                      const DyadicCube& c, std::vector<std::uint8_t>& out);

}  // namespace capkit
