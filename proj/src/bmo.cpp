#include "capkit/bmo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capkit/choquet.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

namespace {

thread_local LadderWorkspace tl_ws;
thread_local std::vector<double> tl_box, tl_diff, tl_cand;

struct BoxView {
    const double* vals = nullptr;
    std::size_t len = 0;
    int d = 1;
    int k = 0;
    double side = 1.0;
};

// ∫ phi(|u - c|) dH over the box, subordinate content. phi increasing, phi(0) = phi0.
template <class Phi>
double eval_phi(const BoxView& B, double beta, double c, Phi&& phi, double phi0) {
    tl_diff.resize(B.len);
    for (std::size_t i = 0; i < B.len; ++i) tl_diff[i] = std::abs(B.vals[i] - c);
    double out = 0.0;
    ladder_sweep(std::span<const double>(tl_diff), B.d, B.k, B.side, beta, tl_ws, Exec::Serial,
                 [&](int j, std::size_t, const LadderView& L) {
                     if (j == 0) out = ladder_phi_integral(L, phi, phi0);
                 });
    return out;
}

struct BoxBest {
    double c_q = 0.0;
    double objective = 0.0;  // min_c ∫ phi(|u-c|)
};

// Golden-section on [min, max] plus convex ternary search over the distinct
// values; the smallest minimizer wins ties.
template <class Eval>
BoxBest minimize_convex(const BoxView& B, Eval&& eval) {
    double lo = B.vals[0], hi = B.vals[0];
    for (std::size_t i = 1; i < B.len; ++i) {
        lo = std::min(lo, B.vals[i]);
        hi = std::max(hi, B.vals[i]);
    }
    if (lo == hi) return {lo, eval(lo)};

    constexpr double invphi = 0.6180339887498949;
    constexpr double invphi2 = 1.0 - invphi;
    double a = lo, b = hi, h = b - a;
    double x1 = a + invphi2 * h, x2 = a + invphi * h;
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 200 && h > 1e-13; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            h = b - a;
            x1 = a + invphi2 * h;
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            h = b - a;
            x2 = a + invphi * h;
            f2 = eval(x2);
        }
    }
    const double gs_c = 0.5 * (a + b);
    const double gs_f = eval(gs_c);

    // Distinct values, ascending.
    tl_cand.assign(B.vals, B.vals + B.len);
    std::sort(tl_cand.begin(), tl_cand.end());
    tl_cand.erase(std::unique(tl_cand.begin(), tl_cand.end()), tl_cand.end());

    // Convex ternary over candidate indices; the window always contains the
    // leftmost minimizer of the candidate sequence.
    std::ptrdiff_t wl = 0, wr = static_cast<std::ptrdiff_t>(tl_cand.size()) - 1;
    while (wr - wl > 6) {
        const std::ptrdiff_t m1 = wl + (wr - wl) / 3;
        const std::ptrdiff_t m2 = wr - (wr - wl) / 3;
        const double g1 = eval(tl_cand[static_cast<std::size_t>(m1)]);
        const double g2 = eval(tl_cand[static_cast<std::size_t>(m2)]);
        if (g1 < g2)
            wr = m2 - 1;
        else if (g1 > g2)
            wl = m1 + 1;
        else
            wr = m2;
    }
    BoxBest best{gs_c, gs_f};
    for (std::ptrdiff_t i = wl; i <= wr; ++i) {
        const double c = tl_cand[static_cast<std::size_t>(i)];
        const double g = eval(c);
        if (g < best.objective || (g == best.objective && c < best.c_q)) best = {c, g};
    }
    return best;
}

BoxBest best_abs_on_box(const BoxView& B, double beta) {
    return minimize_convex(B, [&](double c) {
        return eval_phi(B, beta, c, [](double s) { return s; }, 0.0);
    });
}

BoxBest best_pow_on_box(const BoxView& B, double beta, double pexp) {
    if (pexp == 1.0) return best_abs_on_box(B, beta);
    return minimize_convex(B, [&](double c) {
        return eval_phi(B, beta, c, [pexp](double s) { return std::pow(s, pexp); }, 0.0);
    });
}

// Cube ordinals, level-major, for flat parallel loops over all dyadic subcubes.
struct CubeIndexer {
    int d = 1, n = 0;
    std::vector<std::size_t> offset;  // offset[j] = first ordinal of level j

    CubeIndexer(int d_, int n_) : d(d_), n(n_) {
        offset.resize(static_cast<std::size_t>(n) + 2);
        offset[0] = 0;
        for (int j = 0; j <= n; ++j)
            offset[static_cast<std::size_t>(j) + 1] =
                offset[static_cast<std::size_t>(j)] + (std::size_t{1} << static_cast<unsigned>(d * j));
    }
    std::size_t total() const { return offset.back(); }
    DyadicCube cube(std::size_t ordinal) const {
        int j = 0;
        while (ordinal >= offset[static_cast<std::size_t>(j) + 1]) ++j;
        return cube_from_flat(j, ordinal - offset[static_cast<std::size_t>(j)], d);
    }
};

}  // namespace

OscillationResult best_constant(const GridFunction& u, const DyadicCube& q, const ContentParams& p) {
    validate_beta(p, u.root.d);
    validate_cube(u.root, q);
    std::vector<double> box;
    extract_box(u.values, u.root, q, box);
    const BoxView B{box.data(), box.size(), u.root.d, u.root.n - q.level, cube_side(u.root, q)};
    const BoxBest r = best_abs_on_box(B, p.beta);
    return {q, r.c_q, r.objective / std::pow(B.side, p.beta)};
}

namespace {

template <class PerCube>
void for_all_cubes(const GridFunction& u, Exec ex, PerCube&& per_cube) {
    const CubeIndexer ix(u.root.d, u.root.n);
    const std::size_t total = ix.total();
    const bool par = ex == Exec::Parallel && total > 16;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (par)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
        const auto ord = static_cast<std::size_t>(i);
        per_cube(ord, ix.cube(ord));
    }
}

}  // namespace

double seminorm_dyadic(const GridFunction& u, const ContentParams& p, Exec ex) {
    validate_beta(p, u.root.d);
    const CubeIndexer ix(u.root.d, u.root.n);
    std::vector<double> osc(ix.total());
    for_all_cubes(u, ex, [&](std::size_t ord, const DyadicCube& q) {
        extract_box(u.values, u.root, q, tl_box);
        const BoxView B{tl_box.data(), tl_box.size(), u.root.d, u.root.n - q.level,
                        cube_side(u.root, q)};
        osc[ord] = best_abs_on_box(B, p.beta).objective / std::pow(B.side, p.beta);
    });
    return *std::max_element(osc.begin(), osc.end());
}

void sweep_oscillations(const GridFunction& u, const ContentParams& p, Exec ex, void* ctx,
                        OscVisitor visit) {
    validate_beta(p, u.root.d);
    for_all_cubes(u, ex, [&](std::size_t, const DyadicCube& q) {
        extract_box(u.values, u.root, q, tl_box);
        const BoxView B{tl_box.data(), tl_box.size(), u.root.d, u.root.n - q.level,
                        cube_side(u.root, q)};
        const BoxBest r = best_abs_on_box(B, p.beta);
        tl_diff.resize(B.len);
        for (std::size_t i = 0; i < B.len; ++i) tl_diff[i] = std::abs(B.vals[i] - r.c_q);
        const Ladder lad = top_ladder(tl_diff, B.d, B.k, B.side, p.beta, tl_ws);
        const double cap = std::pow(B.side, p.beta);
        visit(ctx, q, r.c_q, r.objective / cap, lad, cap);
    });
}

SampledSeminorm seminorm_sampled(const GridFunction& u, const ContentParams& p, int shifts, Exec ex) {
    validate_beta(p, u.root.d);
    if (shifts < 1) throw std::invalid_argument("shifts must be >= 1");
    SampledSeminorm out;
    out.shifts = shifts;
    out.dyadic = seminorm_dyadic(u, p, ex);
    out.sampled = out.dyadic;
    const std::int64_t axis = u.root.leaves_per_axis();
    for (int s = 1; s < shifts; ++s) {
        const std::int64_t tau = static_cast<std::int64_t>(
            (static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(axis)) /
            static_cast<std::uint64_t>(shifts));
        if (tau == 0) continue;
        for (int m = 0; m <= u.root.n; ++m) {
            const std::int64_t size = axis >> m;
            const std::int64_t q0 = tau % size;
            std::vector<std::int64_t> starts;
            for (std::int64_t q = q0; q + size <= axis; q += size) starts.push_back(q);
            if (starts.empty()) continue;
            // All per-axis combinations of the shifted starts.
            const std::size_t count = starts.size();
            std::size_t combos = 1;
            for (int t = 0; t < u.root.d; ++t) combos *= count;
            for (std::size_t cb = 0; cb < combos; ++cb) {
                std::array<std::int64_t, kMaxDim> at{0, 0, 0};
                std::size_t rem = cb;
                for (int t = u.root.d - 1; t >= 0; --t) {
                    at[static_cast<std::size_t>(t)] = starts[rem % count];
                    rem /= count;
                }
                extract_box_at(u.values, u.root, std::span<const std::int64_t>(at.data(), u.root.d),
                               u.root.n - m, tl_box);
                const BoxView B{tl_box.data(), tl_box.size(), u.root.d, u.root.n - m,
                                u.root.side * std::ldexp(1.0, -m)};
                const double osc = best_abs_on_box(B, p.beta).objective / std::pow(B.side, p.beta);
                out.sampled = std::max(out.sampled, osc);
            }
        }
    }
    return out;
}

DecayFit decay_curve(const GridFunction& u, const DyadicCube& q, const ContentParams& p, Exec ex) {
    validate_beta(p, u.root.d);
    DecayFit fit;
    fit.norm = seminorm_dyadic(u, p, ex);
    if (fit.norm == 0.0) throw std::invalid_argument("zero seminorm: decay curve needs a nonconstant function");

    const OscillationResult bc = best_constant(u, q, p);
    std::vector<double> box;
    extract_box(u.values, u.root, q, box);
    for (double& v : box) v = std::abs(v - bc.c_q);
    Ladder lad = top_ladder(box, u.root.d, u.root.n - q.level, cube_side(u.root, q), p.beta, tl_ws);
    fit.thresholds = std::move(lad.values);
    fit.contents = std::move(lad.contents);

    const double c_beta = 1.0 + std::pow(2.0, p.beta);
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < fit.thresholds.size(); ++i)
        if (fit.contents[i] > 0.0 && fit.thresholds[i] >= c_beta * fit.norm) pts.push_back(i);
    if (pts.size() < 2) {
        // Bounded functions may have no breakpoints past the tail cutoff; fall
        // back to the last few positive-content rungs.
        pts.clear();
        for (std::size_t i = 0; i < fit.thresholds.size(); ++i)
            if (fit.contents[i] > 0.0) pts.push_back(i);
        if (pts.size() > 5) pts.erase(pts.begin(), pts.end() - 5);
    }
    fit.tail_points = pts.size();
    if (pts.size() < 2) {
        fit.C_fit = pts.empty() ? 0.0 : fit.contents[pts[0]];
        fit.c_fit = 0.0;
        fit.r_squared = 0.0;
        return fit;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    const double m = static_cast<double>(pts.size());
    for (std::size_t i : pts) {
        const double x = fit.thresholds[i] / fit.norm;
        const double y = std::log(fit.contents[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double den = m * sxx - sx * sx;
    const double slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
    const double inter = (sy - slope * sx) / m;
    fit.c_fit = -slope;
    fit.C_fit = std::exp(inter);
    const double ss_tot = syy - sy * sy / m;
    double ss_res = 0.0;
    for (std::size_t i : pts) {
        const double x = fit.thresholds[i] / fit.norm;
        const double r = std::log(fit.contents[i]) - (inter + slope * x);
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

JNConstants jn_constants(const ContentParams& p, double cprime, double c_equiv) {
    if (!(cprime > 1.0))
        throw std::invalid_argument("measured quasi-additivity constant must exceed 1");
    if (!(c_equiv > 0.0)) throw std::invalid_argument("equivalence constant must be positive");
    JNConstants k;
    k.c_beta = 1.0 + std::pow(2.0, p.beta);
    k.c_prime = cprime;
    k.c_equiv = c_equiv;
    const double e = 2.718281828459045;
    k.big_c = c_equiv * std::exp(1.0 / (cprime * e) + 1.0);
    k.small_c = (1.0 / c_equiv) / (cprime * k.c_beta * e);
    return k;
}

JNVerifyReport jn_verify(const GridFunction& u, const ContentParams& p, const JNConstants& k, Exec ex) {
    JNVerifyReport rep;
    rep.norm = seminorm_dyadic(u, p, ex);
    if (rep.norm == 0.0) throw std::invalid_argument("constant function: nothing to verify");

    struct Ctx {
        const JNConstants* k;
        double norm;
        std::size_t cubes = 0, thresholds = 0;
        double max_ratio = 0.0;
        DyadicCube worst;
        double worst_t = 0.0;
    } ctx{&k, rep.norm, 0, 0, 0.0, DyadicCube{}, 0.0};

    sweep_oscillations(u, p, ex, &ctx,
                       [](void* vc, const DyadicCube& q, double, double, const Ladder& lad, double cap) {
                           Ctx& c = *static_cast<Ctx*>(vc);
                           double local = 0.0;
                           double local_t = 0.0;
                           for (std::size_t i = 0; i < lad.values.size(); ++i) {
                               const double bound =
                                   c.k->big_c * cap *
                                   std::exp(-c.k->small_c * lad.values[i] / c.norm);
                               const double r = lad.contents[i] / bound;
                               if (r > local) {
                                   local = r;
                                   local_t = lad.values[i];
                               }
                           }
#ifdef _OPENMP
#pragma omp critical(capkit_jn_verify)
#endif
                           {
                               c.cubes += 1;
                               c.thresholds += lad.values.size();
                               if (local > c.max_ratio) {
                                   c.max_ratio = local;
                                   c.worst = q;
                                   c.worst_t = local_t;
                               }
                           }
                       });
    rep.cubes = ctx.cubes;
    rep.thresholds = ctx.thresholds;
    rep.max_ratio = ctx.max_ratio;
    rep.worst_cube = ctx.worst;
    rep.worst_t = ctx.worst_t;
    rep.pass = rep.max_ratio <= 1.0 + 1e-12;
    return rep;
}

namespace {

double exp_integral_on_cube(const GridFunction& u, const DyadicCube& q, const ContentParams& p,
                            double cexp, double norm) {
    std::vector<double> box;
    extract_box(u.values, u.root, q, box);
    if (norm > 0.0)
        for (double& v : box) v /= norm;
    const BoxView B{box.data(), box.size(), u.root.d, u.root.n - q.level, cube_side(u.root, q)};
    const BoxBest r = best_abs_on_box(B, p.beta);
    return eval_phi(B, p.beta, r.c_q, [cexp](double s) { return std::exp(cexp * s); }, 1.0);
}

}  // namespace

double exp_integrability(const GridFunction& u, const DyadicCube& q, const ContentParams& p,
                         double cprime_exp, const JNConstants& k, Exec ex) {
    validate_beta(p, u.root.d);
    if (!(cprime_exp < k.small_c))
        throw std::invalid_argument("exponent must stay below the decay rate c (bound diverges)");
    const double norm = seminorm_dyadic(u, p, ex);
    return exp_integral_on_cube(u, q, p, cprime_exp, norm);
}

ExpIntReport exp_integrability_sweep(const GridFunction& u, const ContentParams& p, double cprime_exp,
                                     const JNConstants& k, Exec ex) {
    validate_beta(p, u.root.d);
    if (!(cprime_exp < k.small_c))
        throw std::invalid_argument("exponent must stay below the decay rate c (bound diverges)");
    ExpIntReport rep;
    rep.bound_constant = 1.0 + k.big_c / (k.small_c / cprime_exp - 1.0);
    const double norm = seminorm_dyadic(u, p, ex);

    const CubeIndexer ix(u.root.d, u.root.n);
    std::vector<double> ratio(ix.total());
    for_all_cubes(u, ex, [&](std::size_t ord, const DyadicCube& q) {
        const double integral = exp_integral_on_cube(u, q, p, cprime_exp, norm);
        const double cap = std::pow(cube_side(u.root, q), p.beta);
        ratio[ord] = integral / (rep.bound_constant * cap);
    });
    rep.cubes = ratio.size();
    const auto it = std::max_element(ratio.begin(), ratio.end());
    rep.worst_ratio = *it;
    rep.worst_cube = ix.cube(static_cast<std::size_t>(it - ratio.begin()));
    rep.pass = rep.worst_ratio <= 1.0 + 1e-12;
    return rep;
}

double p_seminorm(const GridFunction& u, const ContentParams& p, double pexp, Exec ex) {
    validate_beta(p, u.root.d);
    if (!(pexp >= 1.0)) throw std::invalid_argument("p must be >= 1");
    const CubeIndexer ix(u.root.d, u.root.n);
    std::vector<double> osc(ix.total());
    for_all_cubes(u, ex, [&](std::size_t ord, const DyadicCube& q) {
        extract_box(u.values, u.root, q, tl_box);
        const BoxView B{tl_box.data(), tl_box.size(), u.root.d, u.root.n - q.level,
                        cube_side(u.root, q)};
        const BoxBest r = best_pow_on_box(B, p.beta, pexp);
        osc[ord] = std::pow(r.objective / std::pow(B.side, p.beta), 1.0 / pexp);
    });
    return *std::max_element(osc.begin(), osc.end());
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs_, std::vector<double> ys_)
    : xs(std::move(xs_)), ys(std::move(ys_)) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("piecewise-linear map needs >= 2 breakpoints");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("breakpoints must be strictly increasing");
}

PiecewiseLinear PiecewiseLinear::linear(double slope) {
    return PiecewiseLinear({0.0, 1.0}, {0.0, slope});
}

PiecewiseLinear PiecewiseLinear::abs_value() {
    return PiecewiseLinear({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});
}

double PiecewiseLinear::operator()(double x) const {
    const std::size_t n = xs.size();
    std::size_t i;
    if (x <= xs[0])
        i = 0;
    else if (x >= xs[n - 1])
        i = n - 2;
    else
        i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

double PiecewiseLinear::lipschitz() const {
    double lip = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        lip = std::max(lip, std::abs((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])));
    return lip;
}

ComposeReport compose_lipschitz(const GridFunction& u, const PiecewiseLinear& phi,
                                const ContentParams& p, Exec ex) {
    validate_beta(p, u.root.d);
    if (std::abs(phi(0.0)) > 1e-14)
        throw std::invalid_argument("composition map must fix the origin, phi(0) = 0");
    GridFunction pu = u;
    for (double& v : pu.values) v = phi(v);
    ComposeReport rep;
    rep.lip = phi.lipschitz();
    rep.lhs = seminorm_dyadic(pu, p, ex);
    rep.rhs = rep.lip * seminorm_dyadic(u, p, ex);
    rep.pass = rep.lhs <= rep.rhs + 1e-9;
    return rep;
}

double classical_bmo_dyadic(const GridFunction& u, Exec ex) {
    const CubeIndexer ix(u.root.d, u.root.n);
    std::vector<double> osc(ix.total());
    for_all_cubes(u, ex, [&](std::size_t ord, const DyadicCube& q) {
        extract_box(u.values, u.root, q, tl_box);
        std::sort(tl_box.begin(), tl_box.end());
        const double med = tl_box[(tl_box.size() - 1) / 2];
        double s = 0.0;
        for (double v : tl_box) s += std::abs(v - med);
        osc[ord] = s / static_cast<double>(tl_box.size());
    });
    return *std::max_element(osc.begin(), osc.end());
}

std::pair<GridFunction, RestrictReport> restrict_hyperplane(const GridFunction& u, int k,
                                                            std::span<const std::int64_t> offset,
                                                            Exec ex) {
    const int d = u.root.d;
    if (k < 1 || k > d) throw std::invalid_argument("slice dimension k must lie in [1, d]");
    if (static_cast<int>(offset.size()) != d - k)
        throw std::invalid_argument("offset needs one leaf coordinate per dropped axis");
    const std::int64_t axis = u.root.leaves_per_axis();
    for (std::int64_t o : offset)
        if (o < 0 || o >= axis) throw std::invalid_argument("offset coordinate out of range");

    std::array<double, kMaxDim> sorigin{0.0, 0.0, 0.0};
    for (int t = 0; t < k; ++t) sorigin[static_cast<std::size_t>(t)] = u.root.origin[static_cast<std::size_t>(t)];
    RootCube sroot(k, sorigin, u.root.side, u.root.n);

    std::vector<double> svals(sroot.leaf_count());
    std::array<std::int64_t, kMaxDim> idx{0, 0, 0};
    for (std::size_t f = 0; f < svals.size(); ++f) {
        std::size_t rem = f;
        for (int t = k - 1; t >= 0; --t) {
            idx[static_cast<std::size_t>(t)] = static_cast<std::int64_t>(rem & static_cast<std::size_t>(axis - 1));
            rem >>= u.root.n;
        }
        for (int t = k; t < d; ++t) idx[static_cast<std::size_t>(t)] = offset[static_cast<std::size_t>(t - k)];
        svals[f] = u.values[leaf_flat(u.root, std::span<const std::int64_t>(idx.data(), d))];
    }
    GridFunction slice(sroot, std::move(svals));

    RestrictReport rep;
    rep.k = k;
    rep.slice_classical = classical_bmo_dyadic(slice, ex);
    rep.full_seminorm = seminorm_dyadic(u, ContentParams(static_cast<double>(k)), ex);
    rep.ratio = rep.full_seminorm > 0.0 ? rep.slice_classical / rep.full_seminorm
                                        : (rep.slice_classical > 0.0 ? HUGE_VAL : 1.0);
    return {std::move(slice), rep};
}

NestingReport nesting_check(const GridFunction& u, const ContentParams& alpha,
                            const ContentParams& beta, double cprime, Exec ex) {
    validate_beta(alpha, u.root.d);
    validate_beta(beta, u.root.d);
    if (alpha.beta > beta.beta) throw std::invalid_argument("need alpha <= beta");
    if (u.root.side != 1.0)
        throw std::invalid_argument("the power inequality needs the unit root cube");

    NestingReport rep;
    rep.norm_alpha = seminorm_dyadic(u, alpha, ex);
    rep.norm_beta = seminorm_dyadic(u, beta, ex);
    rep.ratio = rep.norm_alpha > 0.0 ? rep.norm_beta / rep.norm_alpha : 1.0;
    const JNConstants k = jn_constants(alpha, cprime, 1.0);
    const double q = beta.beta / alpha.beta;
    rep.bound_constant = std::pow(k.big_c, q) * alpha.beta / (k.small_c * beta.beta);

    if (rep.norm_alpha == 0.0) {
        rep.pass = rep.norm_beta == 0.0;
        return rep;
    }

    struct Ctx {
        const GridFunction* u;
        const ContentParams* beta;
        double q;
        double bound;  // bound_constant * norm_alpha
        double max_power_excess = 0.0;
        double max_integrated_excess = 0.0;
        std::size_t power_violations = 0;
    } ctx{&u, &beta, q, rep.bound_constant * rep.norm_alpha};

    // Sweep at alpha; per cube, rebuild the ladder of |u - c_Q| at exponent beta.
    sweep_oscillations(u, alpha, ex, &ctx,
                       [](void* vc, const DyadicCube& qq, double c_q, double, const Ladder& lad_a,
                          double) {
                           Ctx& c = *static_cast<Ctx*>(vc);
                           thread_local std::vector<double> box;
                           thread_local LadderWorkspace ws;
                           extract_box(c.u->values, c.u->root, qq, box);
                           for (double& v : box) v = std::abs(v - c_q);
                           const Ladder lad_b = top_ladder(box, c.u->root.d, c.u->root.n - qq.level,
                                                           cube_side(c.u->root, qq), c.beta->beta, ws);
                           double power_excess = 0.0;
                           std::size_t viol = 0;
                           for (std::size_t i = 0; i < lad_b.values.size(); ++i) {
                               const double rhs = std::pow(lad_a.contents[i], c.q);
                               const double excess = (lad_b.contents[i] - rhs) /
                                                     std::max(std::max(lad_b.contents[i], rhs), 1e-30);
                               power_excess = std::max(power_excess, excess);
                               if (excess > 1e-9) ++viol;
                           }
                           double integral = 0.0, prev = 0.0;
                           for (std::size_t i = 0; i < lad_b.values.size(); ++i) {
                               integral += (lad_b.values[i] - prev) * lad_b.contents[i];
                               prev = lad_b.values[i];
                           }
                           const double osc_b =
                               integral / std::pow(cube_side(c.u->root, qq), c.beta->beta);
                           const double iexc = (osc_b - c.bound) / std::max(c.bound, 1e-30);
#ifdef _OPENMP
#pragma omp critical(capkit_nesting)
#endif
                           {
                               c.max_power_excess = std::max(c.max_power_excess, power_excess);
                               c.power_violations += viol;
                               c.max_integrated_excess = std::max(c.max_integrated_excess, iexc);
                           }
                       });
    rep.max_power_excess = ctx.max_power_excess;
    rep.power_violations = ctx.power_violations;
    rep.max_integrated_excess = ctx.max_integrated_excess;
    rep.pass = rep.power_violations == 0 && rep.max_integrated_excess <= 1e-9;
    return rep;
}

}  // namespace capkit
