#include "capkit/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "capkit/bmo.hpp"
#include "capkit/choquet.hpp"
#include "capkit/levels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

namespace {

double parse_num(const std::string& tok, const char* what) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw std::invalid_argument(std::string("bad ") + what + " '" + tok + "' in IFS spec");
    return v;
}

int dyadic_ratio_log2(double r) {
    for (int j = 1; j <= 30; ++j)
        if (r == std::ldexp(1.0, -j)) return j;
    const int near = std::max(1, static_cast<int>(std::lround(-std::log2(std::max(r, 1e-12)))));
    std::ostringstream os;
    os << "IFS ratio " << r << " is not dyadic; nearest dyadic ratio is 2^-" << near << " = "
       << std::ldexp(1.0, -near);
    throw std::invalid_argument(os.str());
}

}  // namespace

IFSSpec parse_ifs_spec(std::istream& in, int d) {
    IFSSpec spec;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head) || head[0] == '#') continue;
        if (head != "map")
            throw std::invalid_argument("IFS spec line " + std::to_string(line_no) +
                                        ": expected 'map r=... t=... w=...'");
        std::string tok;
        if (!(ss >> tok) || tok.rfind("r=", 0) != 0)
            throw std::invalid_argument("IFS spec line " + std::to_string(line_no) + ": expected r=<ratio>");
        IFSMap m;
        m.ratio_log2 = dyadic_ratio_log2(parse_num(tok.substr(2), "ratio"));
        if (!(ss >> tok) || tok.rfind("t=", 0) != 0)
            throw std::invalid_argument("IFS spec line " + std::to_string(line_no) + ": expected t=<translation>");
        m.translate[0] = parse_num(tok.substr(2), "translation");
        for (int t = 1; t < d; ++t) {
            if (!(ss >> tok))
                throw std::invalid_argument("IFS spec line " + std::to_string(line_no) +
                                            ": translation needs d coordinates");
            m.translate[static_cast<std::size_t>(t)] = parse_num(tok, "translation");
        }
        if (!(ss >> tok) || tok.rfind("w=", 0) != 0)
            throw std::invalid_argument("IFS spec line " + std::to_string(line_no) + ": expected w=<weight>");
        m.weight = parse_num(tok.substr(2), "weight");
        spec.maps.push_back(m);
    }
    if (spec.maps.empty()) throw std::invalid_argument("IFS spec has no maps");
    return spec;
}

IFSSpec load_ifs_spec(const std::filesystem::path& path, int d) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open file");
    return parse_ifs_spec(in, d);
}

namespace {

// Index of the root image of one map as a dyadic cube, validated aligned.
DyadicCube map_image(const IFSMap& m, const RootCube& root) {
    DyadicCube c;
    c.level = m.ratio_log2;
    const double r = std::ldexp(1.0, -m.ratio_log2);
    const std::int64_t cells = std::int64_t{1} << m.ratio_log2;
    for (int t = 0; t < root.d; ++t) {
        const double corner = r * root.origin[static_cast<std::size_t>(t)] +
                              m.translate[static_cast<std::size_t>(t)];
        const double rel = (corner - root.origin[static_cast<std::size_t>(t)]) / root.side *
                           static_cast<double>(cells);
        const double snapped = std::round(rel);
        if (std::abs(rel - snapped) > 1e-9)
            throw std::invalid_argument("IFS map image is not aligned to the dyadic grid (offset " +
                                        std::to_string(rel) + " cells); use dyadic translations");
        const auto k = static_cast<std::int64_t>(snapped);
        if (k < 0 || k >= cells)
            throw std::invalid_argument("IFS map image leaves the root cube");
        c.index[static_cast<std::size_t>(t)] = k;
    }
    return c;
}

}  // namespace

void validate_ifs(const IFSSpec& spec, const RootCube& root) {
    double wsum = 0.0;
    std::vector<DyadicCube> images;
    for (const IFSMap& m : spec.maps) {
        if (!(m.weight > 0.0)) throw std::invalid_argument("IFS weights must be positive");
        wsum += m.weight;
        images.push_back(map_image(m, root));
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("IFS weights must sum to 1, got " + std::to_string(wsum));
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            if (cube_contains(images[i], images[j], root.d) || cube_contains(images[j], images[i], root.d))
                throw std::invalid_argument("IFS map images overlap (open-set condition fails)");
}

DiscreteMeasure hutchinson_measure(const IFSSpec& spec, const RootCube& root) {
    validate_ifs(spec, root);
    std::vector<DyadicCube> images;
    images.reserve(spec.maps.size());
    for (const IFSMap& m : spec.maps) images.push_back(map_image(m, root));

    std::vector<double> masses(root.leaf_count(), 0.0);

    struct Node {
        DyadicCube cube;
        double mass;
    };
    std::vector<Node> stack{{DyadicCube{}, 1.0}};
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        if (nd.cube.level == root.n) {
            std::array<std::int64_t, kMaxDim> idx = nd.cube.index;
            masses[leaf_flat(root, std::span<const std::int64_t>(idx.data(), root.d))] += nd.mass;
            continue;
        }
        for (std::size_t i = 0; i < spec.maps.size(); ++i) {
            const int jl = spec.maps[i].ratio_log2;
            DyadicCube next;
            next.level = nd.cube.level + jl;
            for (int t = 0; t < root.d; ++t)
                next.index[static_cast<std::size_t>(t)] =
                    (nd.cube.index[static_cast<std::size_t>(t)] << jl) +
                    images[i].index[static_cast<std::size_t>(t)];
            const double mass = nd.mass * spec.maps[i].weight;
            if (next.level <= root.n) {
                stack.push_back({next, mass});
            } else {
                // Image below leaf scale: deposit on the containing leaf.
                const int over = next.level - root.n;
                DyadicCube leaf;
                leaf.level = root.n;
                for (int t = 0; t < root.d; ++t)
                    leaf.index[static_cast<std::size_t>(t)] =
                        next.index[static_cast<std::size_t>(t)] >> over;
                std::array<std::int64_t, kMaxDim> idx = leaf.index;
                masses[leaf_flat(root, std::span<const std::int64_t>(idx.data(), root.d))] += mass;
            }
        }
    }
    return DiscreteMeasure(root, std::move(masses));
}

MorreyNorm morrey_norm(const DiscreteMeasure& mu, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    LevelTable t = sum_levels(mu.masses, mu.root.d, mu.root.n);
    MorreyNorm out;
    for (int j = 0; j <= t.depth; ++j) {
        const double cap = std::pow(mu.root.side * std::ldexp(1.0, -j), beta);
        const auto& lvl = t.level[static_cast<std::size_t>(j)];
        for (std::size_t f = 0; f < lvl.size(); ++f) {
            const double r = lvl[f] / cap;
            if (r > out.value) {
                out.value = r;
                out.cube = cube_from_flat(j, f, mu.root.d);
            }
        }
    }
    return out;
}

DensityReport density_bounds(const DiscreteMeasure& mu, double beta) {
    LevelTable t = sum_levels(mu.masses, mu.root.d, mu.root.n);
    DensityReport rep;
    rep.min_ratio = HUGE_VAL;
    for (int j = 0; j <= t.depth; ++j) {
        const double cap = std::pow(mu.root.side * std::ldexp(1.0, -j), beta);
        for (double m : t.level[static_cast<std::size_t>(j)]) {
            if (m <= 0.0) continue;
            const double r = m / cap;
            rep.min_ratio = std::min(rep.min_ratio, r);
            rep.max_ratio = std::max(rep.max_ratio, r);
            ++rep.support_cubes;
        }
    }
    if (rep.support_cubes == 0) rep.min_ratio = 0.0;
    return rep;
}

double riesz_gamma(int d, double alpha) {
    const double pi = 3.14159265358979323846;
    return std::pow(pi, static_cast<double>(d) / 2.0) * std::pow(2.0, alpha) *
           std::tgamma(alpha / 2.0) / std::tgamma((static_cast<double>(d) - alpha) / 2.0);
}

namespace {

// Average of |y|^{alpha-d} over the unit cell [-1/2,1/2]^d. Self-similar
// reduction: A = S / (1 - 2^-alpha) with S the integral over the shell between
// the cell and its half-size copy, integrated per smooth sub-box by Gauss rule.
double unit_cell_kernel_average(int d, double alpha) {
    if (d == 1) return std::pow(2.0, 1.0 - alpha) / alpha;

    static thread_local std::map<std::pair<int, double>, double> cache;
    const auto key = std::make_pair(d, alpha);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    // 12-point Gauss-Legendre on [0,1].
    static const double gx[12] = {0.009219682876640378, 0.047941371814762546, 0.11504866290284765,
                                  0.20634102285669127,  0.31608425050090994,  0.43738329574426554,
                                  0.5626167042557344,   0.6839157494990901,   0.7936589771433087,
                                  0.8849513370971523,   0.9520586281852375,   0.9907803171233596};
    static const double gw[12] = {0.023587668193255914, 0.05346966299765921, 0.08003916427167311,
                                  0.10158371336153296,  0.11674626826917741, 0.124573522906701,
                                  0.124573522906701,    0.11674626826917741, 0.10158371336153296,
                                  0.08003916427167311,  0.05346966299765921, 0.023587668193255914};

    // Partition the cell into 4^d boxes of side 1/4; those not in the central
    // 2^d block form the shell, where the integrand is smooth.
    double shell = 0.0;
    const int boxes = 1 << (2 * d);  // 4^d
    for (int b = 0; b < boxes; ++b) {
        int digit[kMaxDim];
        int rem = b;
        bool central = true;
        for (int t = 0; t < d; ++t) {
            digit[t] = rem % 4;
            rem /= 4;
            central = central && (digit[t] == 1 || digit[t] == 2);
        }
        if (central) continue;
        // Box [lo, lo+1/4)^d with lo = -1/2 + digit/4, tensor Gauss rule.
        const double h = 0.25;
        double acc = 0.0;
        const int pts = 12;
        if (d == 2) {
            for (int i = 0; i < pts; ++i)
                for (int j = 0; j < pts; ++j) {
                    const double x = -0.5 + (digit[0] + gx[i]) * h;
                    const double y = -0.5 + (digit[1] + gx[j]) * h;
                    acc += gw[i] * gw[j] * std::pow(x * x + y * y, 0.5 * (alpha - d));
                }
        } else {
            for (int i = 0; i < pts; ++i)
                for (int j = 0; j < pts; ++j)
                    for (int k2 = 0; k2 < pts; ++k2) {
                        const double x = -0.5 + (digit[0] + gx[i]) * h;
                        const double y = -0.5 + (digit[1] + gx[j]) * h;
                        const double z = -0.5 + (digit[2] + gx[k2]) * h;
                        acc += gw[i] * gw[j] * gw[k2] *
                               std::pow(x * x + y * y + z * z, 0.5 * (alpha - d));
                    }
        }
        shell += acc * std::pow(h, d);
    }
    const double a = shell / (1.0 - std::pow(2.0, -alpha));
    cache[key] = a;
    return a;
}

// Quadrature offsets (cell units, centered) and weights for neighbor cells.
void neighbor_rule(int d, std::vector<std::array<double, kMaxDim>>& pts, std::vector<double>& wts) {
    pts.clear();
    wts.clear();
    if (d == 1) {
        // 4-point Gauss-Legendre on the cell.
        const double n1 = 0.3399810435848563, n2 = 0.8611363115940526;
        const double w1 = 0.6521451548625461 / 2.0, w2 = 0.3478548451374538 / 2.0;
        pts = {{-0.5 * n2, 0, 0}, {-0.5 * n1, 0, 0}, {0.5 * n1, 0, 0}, {0.5 * n2, 0, 0}};
        wts = {w2, w1, w1, w2};
        return;
    }
    const double g = 0.5 / std::sqrt(3.0);  // 2-point Gauss per axis
    if (d == 2) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                pts.push_back({i ? g : -g, j ? g : -g, 0});
                wts.push_back(0.25);
            }
    } else {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    pts.push_back({i ? g : -g, j ? g : -g, k ? g : -g});
                    wts.push_back(0.125);
                }
    }
}

}  // namespace

GridFunction riesz_potential(const DiscreteMeasure& mu, double alpha, Exec ex) {
    const int d = mu.root.d;
    if (!(alpha > 0.0) || !(alpha < static_cast<double>(d)))
        throw std::invalid_argument("alpha must lie in (0, d)");
    const double gamma = riesz_gamma(d, alpha);
    const double expo = alpha - static_cast<double>(d);  // kernel |x-y|^expo
    const double h = mu.root.leaf_side();
    const double self_avg = unit_cell_kernel_average(d, alpha) * std::pow(h, expo);

    std::vector<std::array<double, kMaxDim>> qpts;
    std::vector<double> qwts;
    neighbor_rule(d, qpts, qwts);

    // Support cells only; the kernel sum skips empty cells.
    struct Src {
        std::int64_t ix[kMaxDim];
        double mass;
    };
    std::vector<Src> support;
    const std::int64_t axis = mu.root.leaves_per_axis();
    for (std::size_t f = 0; f < mu.masses.size(); ++f) {
        if (mu.masses[f] == 0.0) continue;
        const DyadicCube c = leaf_cube(mu.root, f);
        Src s{};
        for (int t = 0; t < d; ++t) s.ix[t] = c.index[static_cast<std::size_t>(t)];
        s.mass = mu.masses[f];
        support.push_back(s);
    }

    std::vector<double> pot(mu.masses.size(), 0.0);
    const std::size_t L = pot.size();
    const bool par = ex == Exec::Parallel && L >= 256;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (std::ptrdiff_t fi = 0; fi < static_cast<std::ptrdiff_t>(L); ++fi) {
        const auto f = static_cast<std::size_t>(fi);
        std::int64_t tix[kMaxDim] = {0, 0, 0};
        {
            std::size_t rem = f;
            for (int t = d - 1; t >= 0; --t) {
                tix[t] = static_cast<std::int64_t>(rem & static_cast<std::size_t>(axis - 1));
                rem >>= mu.root.n;
            }
        }
        double acc = 0.0;
        for (const Src& s : support) {
            std::int64_t cheb = 0;
            double dist2 = 0.0;
            for (int t = 0; t < d; ++t) {
                const std::int64_t dt = tix[t] - s.ix[t];
                cheb = std::max(cheb, std::abs(dt));
                dist2 += static_cast<double>(dt) * static_cast<double>(dt);
            }
            if (cheb == 0) {
                acc += s.mass * self_avg;
            } else if (cheb == 1) {
                double avg = 0.0;
                for (std::size_t r = 0; r < qpts.size(); ++r) {
                    double dd = 0.0;
                    for (int t = 0; t < d; ++t) {
                        const double delta =
                            (static_cast<double>(tix[t] - s.ix[t]) - qpts[r][static_cast<std::size_t>(t)]) * h;
                        dd += delta * delta;
                    }
                    avg += qwts[r] * std::pow(dd, 0.5 * expo);
                }
                acc += s.mass * avg;
            } else {
                acc += s.mass * std::pow(dist2 * h * h, 0.5 * expo);
            }
        }
        pot[f] = acc / gamma;
    }
    return GridFunction(mu.root, std::move(pot));
}

double measure_energy(const GridFunction& pot, const DiscreteMeasure& mu) {
    if (!pot.root.same_shape(mu.root))
        throw std::invalid_argument("potential and measure on different root cubes");
    double s = 0.0;
    for (std::size_t i = 0; i < pot.values.size(); ++i) s += pot.values[i] * mu.masses[i];
    return s;
}

AdamsReport adams_embedding_check(const DiscreteMeasure& mu, double alpha, double eps, Exec ex) {
    const int d = mu.root.d;
    if (!(alpha > 0.0) || !(alpha < static_cast<double>(d)))
        throw std::invalid_argument("alpha must lie in (0, d)");
    if (!(eps > 0.0) || !(eps <= alpha)) throw std::invalid_argument("eps must lie in (0, alpha]");
    AdamsReport rep;
    rep.alpha = alpha;
    rep.eps = eps;
    rep.beta = static_cast<double>(d) - alpha + eps;
    rep.gamma = riesz_gamma(d, alpha);
    const GridFunction pot = riesz_potential(mu, alpha, ex);
    rep.seminorm = seminorm_dyadic(pot, ContentParams(rep.beta), ex);
    rep.morrey = morrey_norm(mu, static_cast<double>(d) - alpha).value;
    if (rep.morrey == 0.0) throw std::invalid_argument("measure has no mass");
    rep.ratio = rep.seminorm / rep.morrey;
    // Dyadic splitting series, summed directly to convergence.
    const double da = static_cast<double>(d) - alpha;
    for (int m = 1; m < 4096; ++m) {
        const double term = std::pow(std::ldexp(1.0, -m), -da) * std::pow(std::ldexp(1.0, -m + 1), da + eps);
        rep.series_near += term;
        if (term < 1e-16 * rep.series_near) break;
    }
    for (int m = 1; m < 4096; ++m) {
        const double term = std::pow(std::ldexp(1.0, m), -(da + 1.0)) * std::pow(std::ldexp(1.0, m + 1), da);
        rep.series_far += term;
        if (term < 1e-16 * rep.series_far) break;
    }
    return rep;
}

DivergenceReport divergence_example(const IFSSpec& spec, int d, std::array<double, kMaxDim> origin,
                                    double side, double alpha, std::span<const int> n_sweep,
                                    double eps_contrast, Exec ex) {
    if (n_sweep.size() < 2) throw std::invalid_argument("resolution sweep needs at least two points");
    DivergenceReport rep;
    rep.eps_contrast = eps_contrast;

    // d - alpha regularity asks weight = ratio^{d-alpha} per map.
    rep.dimension_matched = true;
    for (const IFSMap& m : spec.maps) {
        const double want = std::pow(std::ldexp(1.0, -m.ratio_log2), static_cast<double>(d) - alpha);
        if (std::abs(m.weight - want) > 1e-9) rep.dimension_matched = false;
    }

    for (int n : n_sweep) {
        RootCube root(d, origin, side, n);
        const DiscreteMeasure mu = hutchinson_measure(spec, root);
        const GridFunction pot = riesz_potential(mu, alpha, ex);
        DivergencePoint pt;
        pt.n = n;
        pt.energy = measure_energy(pot, mu);
        pt.l1_endpoint = l1_norm(pot, ContentParams(static_cast<double>(d) - alpha), ex);
        pt.l1_eps = l1_norm(pot, ContentParams(static_cast<double>(d) - alpha + eps_contrast), ex);
        rep.points.push_back(pt);
    }

    rep.energy_increasing = true;
    rep.endpoint_increasing = true;
    for (std::size_t i = 1; i < rep.points.size(); ++i) {
        rep.energy_increasing = rep.energy_increasing && rep.points[i].energy > rep.points[i - 1].energy;
        rep.endpoint_increasing =
            rep.endpoint_increasing && rep.points[i].l1_endpoint > rep.points[i - 1].l1_endpoint;
    }
    rep.increments_non_collapsing = true;
    if (rep.points.size() >= 3) {
        const auto& p = rep.points;
        const std::size_t m = p.size();
        const double de_last = p[m - 1].energy - p[m - 2].energy;
        const double de_prev = p[m - 2].energy - p[m - 3].energy;
        const double dn_last = p[m - 1].l1_endpoint - p[m - 2].l1_endpoint;
        const double dn_prev = p[m - 2].l1_endpoint - p[m - 3].l1_endpoint;
        rep.increments_non_collapsing = de_last >= 0.5 * de_prev && dn_last >= 0.5 * dn_prev;
    }
    {
        const auto& p = rep.points;
        const std::size_t m = p.size();
        rep.eps_last_rel_change = std::abs(p[m - 1].l1_eps - p[m - 2].l1_eps) /
                                  std::max(p[m - 1].l1_eps, 1e-30);
        rep.eps_norm_stable = rep.eps_last_rel_change < 0.05;
    }
    return rep;
}

}  // namespace capkit
