#include "capkit/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace capkit {

namespace {
int g_bit_cap = 30;
}

int resolution_bit_cap() { return g_bit_cap; }

void set_resolution_bit_cap(int bits) {
    if (bits < 0 || bits > 48) throw std::invalid_argument("resolution bit cap must lie in [0, 48]");
    g_bit_cap = bits;
}

RootCube::RootCube(int d_, std::array<double, kMaxDim> origin_, double side_, int n_)
    : d(d_), origin(origin_), side(side_), n(n_) {
    if (d < 1 || d > kMaxDim)
        throw std::invalid_argument("dimension d=" + std::to_string(d) + " not supported (d must be 1, 2 or 3)");
    if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("root cube side must be positive and finite");
    if (n < 0) throw std::invalid_argument("resolution n must be nonnegative");
    if (d * n > resolution_bit_cap())
        throw std::invalid_argument("resolution too fine: d*n = " + std::to_string(d * n) +
                                    " exceeds cap " + std::to_string(resolution_bit_cap()));
    for (int t = 0; t < d; ++t)
        if (!std::isfinite(origin[t])) throw std::invalid_argument("root cube origin must be finite");
}

RootCube RootCube::unit(int d_, int n_) { return RootCube(d_, {0.0, 0.0, 0.0}, 1.0, n_); }

double RootCube::leaf_side() const { return side * std::ldexp(1.0, -n); }

bool RootCube::same_shape(const RootCube& o) const {
    if (d != o.d || n != o.n || side != o.side) return false;
    for (int t = 0; t < d; ++t)
        if (origin[t] != o.origin[t]) return false;
    return true;
}

bool cube_less(const DyadicCube& a, const DyadicCube& b) {
    if (a.level != b.level) return a.level < b.level;
    return a.index < b.index;
}

double cube_side(const RootCube& root, const DyadicCube& c) {
    return root.side * std::ldexp(1.0, -c.level);
}

std::array<double, kMaxDim> cube_corner(const RootCube& root, const DyadicCube& c) {
    std::array<double, kMaxDim> corner{0.0, 0.0, 0.0};
    const double s = cube_side(root, c);
    for (int t = 0; t < root.d; ++t) corner[t] = root.origin[t] + static_cast<double>(c.index[t]) * s;
    return corner;
}

void validate_cube(const RootCube& root, const DyadicCube& c) {
    if (c.level < 0 || c.level > root.n)
        throw std::invalid_argument("cube level " + std::to_string(c.level) + " out of range [0, " +
                                    std::to_string(root.n) + "]");
    const std::int64_t lim = std::int64_t{1} << c.level;
    for (int t = 0; t < root.d; ++t)
        if (c.index[t] < 0 || c.index[t] >= lim)
            throw std::invalid_argument("cube index out of range at level " + std::to_string(c.level));
}

std::vector<DyadicCube> cube_children(const RootCube& root, const DyadicCube& c) {
    validate_cube(root, c);
    if (c.level >= root.n) throw std::invalid_argument("leaf has no children");
    std::vector<DyadicCube> out;
    out.reserve(std::size_t{1} << root.d);
    const int nb = 1 << root.d;
    for (int off = 0; off < nb; ++off) {
        DyadicCube ch;
        ch.level = c.level + 1;
        for (int t = 0; t < root.d; ++t) {
            const int bit = (off >> (root.d - 1 - t)) & 1;
            ch.index[t] = 2 * c.index[t] + bit;
        }
        out.push_back(ch);
    }
    return out;
}

bool cube_contains(const DyadicCube& outer, const DyadicCube& inner, int d) {
    if (outer.level > inner.level) return false;
    const int shift = inner.level - outer.level;
    for (int t = 0; t < d; ++t)
        if ((inner.index[t] >> shift) != outer.index[t]) return false;
    return true;
}

DyadicCube ancestor_at(const DyadicCube& c, int level, int d) {
    if (level > c.level) throw std::invalid_argument("ancestor level must not exceed cube level");
    DyadicCube a;
    a.level = level;
    const int shift = c.level - level;
    for (int t = 0; t < d; ++t) a.index[t] = c.index[t] >> shift;
    return a;
}

DyadicCube compose_cubes(const DyadicCube& base, const DyadicCube& rel, int d) {
    DyadicCube out;
    out.level = base.level + rel.level;
    for (int t = 0; t < d; ++t) out.index[t] = (base.index[t] << rel.level) + rel.index[t];
    return out;
}

std::size_t cube_flat(const DyadicCube& c, int d) {
    std::size_t f = 0;
    for (int t = 0; t < d; ++t) f = (f << c.level) + static_cast<std::size_t>(c.index[t]);
    return f;
}

DyadicCube cube_from_flat(int level, std::size_t flat, int d) {
    DyadicCube c;
    c.level = level;
    const std::size_t m = (std::size_t{1} << level) - 1;
    for (int t = d - 1; t >= 0; --t) {
        c.index[t] = static_cast<std::int64_t>(flat & m);
        flat >>= level;
    }
    return c;
}

std::size_t leaf_flat(const RootCube& root, std::span<const std::int64_t> idx) {
    std::size_t f = 0;
    for (int t = 0; t < root.d; ++t) f = (f << root.n) + static_cast<std::size_t>(idx[t]);
    return f;
}

DyadicCube leaf_cube(const RootCube& root, std::size_t flat) {
    DyadicCube c;
    c.level = root.n;
    const std::size_t m = root.leaves_per_axis() - 1;
    for (int t = root.d - 1; t >= 0; --t) {
        c.index[t] = static_cast<std::int64_t>(flat & m);
        flat >>= root.n;
    }
    return c;
}

DyadicCube leaf_ancestor(const RootCube& root, std::size_t flat, int level) {
    return ancestor_at(leaf_cube(root, flat), level, root.d);
}

std::array<double, kMaxDim> leaf_center(const RootCube& root, std::size_t flat) {
    const DyadicCube c = leaf_cube(root, flat);
    std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
    const double h = root.leaf_side();
    for (int t = 0; t < root.d; ++t)
        x[t] = root.origin[t] + (static_cast<double>(c.index[t]) + 0.5) * h;
    return x;
}

GridFunction::GridFunction(RootCube root_, std::vector<double> values_)
    : root(root_), values(std::move(values_)) {
    if (values.size() != root.leaf_count())
        throw std::invalid_argument("grid payload length " + std::to_string(values.size()) +
                                    " does not match 2^(d*n) = " + std::to_string(root.leaf_count()));
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("grid values must be finite");
}

DyadicSet::DyadicSet(RootCube root_, std::vector<std::uint8_t> mask_)
    : root(root_), mask(std::move(mask_)) {
    if (mask.size() != root.leaf_count())
        throw std::invalid_argument("set payload length " + std::to_string(mask.size()) +
                                    " does not match 2^(d*n) = " + std::to_string(root.leaf_count()));
    for (auto b : mask)
        if (b > 1) throw std::invalid_argument("set mask entries must be 0 or 1");
}

bool DyadicSet::empty() const {
    for (auto b : mask)
        if (b) return false;
    return true;
}

std::size_t DyadicSet::count() const {
    std::size_t k = 0;
    for (auto b : mask) k += b;
    return k;
}

DiscreteMeasure::DiscreteMeasure(RootCube root_, std::vector<double> masses_)
    : root(root_), masses(std::move(masses_)) {
    if (masses.size() != root.leaf_count())
        throw std::invalid_argument("measure payload length " + std::to_string(masses.size()) +
                                    " does not match 2^(d*n) = " + std::to_string(root.leaf_count()));
    for (double m : masses)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("measure masses must be nonnegative and finite");
}

double DiscreteMeasure::total() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

namespace {
void require_same_root(const DyadicSet& a, const DyadicSet& b) {
    if (!a.root.same_shape(b.root)) throw std::invalid_argument("sets live on different root cubes");
}
}  // namespace

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b) {
    require_same_root(a, b);
    std::vector<std::uint8_t> m(a.mask.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.mask[i] | b.mask[i];
    return DyadicSet(a.root, std::move(m));
}

DyadicSet set_intersection(const DyadicSet& a, const DyadicSet& b) {
    require_same_root(a, b);
    std::vector<std::uint8_t> m(a.mask.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.mask[i] & b.mask[i];
    return DyadicSet(a.root, std::move(m));
}

bool set_subset(const DyadicSet& a, const DyadicSet& b) {
    require_same_root(a, b);
    for (std::size_t i = 0; i < a.mask.size(); ++i)
        if (a.mask[i] && !b.mask[i]) return false;
    return true;
}

RootCube subcube_root(const RootCube& root, const DyadicCube& c) {
    validate_cube(root, c);
    const auto corner = cube_corner(root, c);
    return RootCube(root.d, corner, cube_side(root, c), root.n - c.level);
}

namespace {

// Per-axis leaf start/extent loops, specialized on d.
template <class T>
void copy_box(std::span<const T> src, const RootCube& root, std::span<const std::int64_t> start,
              int k, std::vector<T>& out) {
    const std::int64_t len = std::int64_t{1} << k;
    const std::int64_t axis = root.leaves_per_axis();
    for (int t = 0; t < root.d; ++t)
        if (start[t] < 0 || start[t] + len > axis)
            throw std::invalid_argument("box does not lie inside the root cube");
    out.resize(std::size_t{1} << static_cast<unsigned>(root.d * k));
    switch (root.d) {
        case 1: {
            const T* s = src.data() + start[0];
            for (std::int64_t a = 0; a < len; ++a) out[static_cast<std::size_t>(a)] = s[a];
            break;
        }
        case 2: {
            for (std::int64_t a = 0; a < len; ++a) {
                const T* row = src.data() + (start[0] + a) * axis + start[1];
                T* dst = out.data() + a * len;
                for (std::int64_t b = 0; b < len; ++b) dst[b] = row[b];
            }
            break;
        }
        default: {
            for (std::int64_t a = 0; a < len; ++a)
                for (std::int64_t b = 0; b < len; ++b) {
                    const T* row = src.data() + ((start[0] + a) * axis + (start[1] + b)) * axis + start[2];
                    T* dst = out.data() + (a * len + b) * len;
                    for (std::int64_t c = 0; c < len; ++c) dst[c] = row[c];
                }
            break;
        }
    }
}

}  // namespace

GridFunction restrict_to(const GridFunction& f, const DyadicCube& c) {
    validate_cube(f.root, c);
    std::vector<double> vals;
    extract_box(f.values, f.root, c, vals);
    return GridFunction(subcube_root(f.root, c), std::move(vals));
}

void extract_box(std::span<const double> values, const RootCube& root, const DyadicCube& c,
                 std::vector<double>& out) {
    validate_cube(root, c);
    const int k = root.n - c.level;
    std::array<std::int64_t, kMaxDim> start{0, 0, 0};
    for (int t = 0; t < root.d; ++t) start[t] = c.index[t] << k;
    copy_box(values, root, std::span<const std::int64_t>(start.data(), root.d), k, out);
}

void extract_box_at(std::span<const double> values, const RootCube& root,
                    std::span<const std::int64_t> leaf_start, int k, std::vector<double>& out) {
    copy_box(values, root, leaf_start, k, out);
}

void extract_mask_box(std::span<const std::uint8_t> mask, const RootCube& root,
                      const DyadicCube& c, std::vector<std::uint8_t>& out) {
    validate_cube(root, c);
    const int k = root.n - c.level;
    std::array<std::int64_t, kMaxDim> start{0, 0, 0};
    for (int t = 0; t < root.d; ++t) start[t] = c.index[t] << k;
    copy_box(mask, root, std::span<const std::int64_t>(start.data(), root.d), k, out);
}

}  // namespace capkit
