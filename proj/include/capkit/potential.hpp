#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include "capkit/exec.hpp"
#include "capkit/grid.hpp"

namespace capkit {

/// One similarity map x -> 2^{-ratio_log2} x + translate. Only dyadic ratios
/// are supported so iterated images are exact dyadic cubes.
struct IFSMap {
    int ratio_log2 = 1;
    std::array<double, kMaxDim> translate{0.0, 0.0, 0.0};
    double weight = 0.0;
};

struct IFSSpec {
    std::vector<IFSMap> maps;
};

/// Text format: one "map r=<dyadic rational> t=<d decimals> w=<decimal>" per
/// line; blank lines and #-comments allowed.
IFSSpec parse_ifs_spec(std::istream& in, int d);
IFSSpec load_ifs_spec(const std::filesystem::path& path, int d);

/// Weights sum to one, images lie inside the root on dyadic cells, images are
/// pairwise disjoint (open-set condition on dyadic cells).
void validate_ifs(const IFSSpec& spec, const RootCube& root);

/// Self-similar measure of the IFS pushed to leaf resolution: unit mass split
/// by branch weights along composed map images. A branch whose image falls
/// below leaf scale deposits its mass on the containing leaf.
DiscreteMeasure hutchinson_measure(const IFSSpec& spec, const RootCube& root);

struct MorreyNorm {
    double value = 0.0;
    DyadicCube cube;  // first achiever in (level, index) order
};
/// max over dyadic cubes of mu(Q) / side^beta, one bottom-up aggregation.
MorreyNorm morrey_norm(const DiscreteMeasure& mu, double beta);

struct DensityReport {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    std::size_t support_cubes = 0;
};
/// min/max of mu(Q)/side^beta over all dyadic cubes with mu(Q) > 0.
DensityReport density_bounds(const DiscreteMeasure& mu, double beta);

/// Normalization gamma(alpha) = pi^{d/2} 2^alpha Gamma(alpha/2) / Gamma((d-alpha)/2).
double riesz_gamma(int d, double alpha);

/// Potential (1/gamma) sum_cells mass / dist^{d-alpha} at leaf centers.
/// Self cells use the analytic cell average of the kernel, touching neighbors
/// a small Gauss quadrature, all other cells the center distance.
GridFunction riesz_potential(const DiscreteMeasure& mu, double alpha, Exec ex = Exec::Serial);

/// sum over leaves of pot * mass: the discrete energy ∫ I_alpha(mu) d mu.
double measure_energy(const GridFunction& pot, const DiscreteMeasure& mu);

struct AdamsReport {
    double alpha = 0.0, eps = 0.0;
    double beta = 0.0;          // d - alpha + eps
    double seminorm = 0.0;      // of the potential at beta
    double morrey = 0.0;        // of mu at d - alpha
    double ratio = 0.0;
    double series_near = 0.0;   // dyadic splitting series, near part
    double series_far = 0.0;    // dyadic splitting series, far part
    double gamma = 0.0;
};
/// Embedding ratio seminorm(I_alpha mu, d-alpha+eps) / morrey(mu, d-alpha) with
/// the two dyadic-splitting series evaluated as diagnostics. The root cube is
/// used with an implicit zero-mass collar; boundary truncation is inherent.
AdamsReport adams_embedding_check(const DiscreteMeasure& mu, double alpha, double eps,
                                  Exec ex = Exec::Serial);

struct DivergencePoint {
    int n = 0;
    double energy = 0.0;
    double l1_endpoint = 0.0;  // L^1(H^{d-alpha}) norm of the potential
    double l1_eps = 0.0;       // same at d-alpha+eps
};

struct DivergenceReport {
    std::vector<DivergencePoint> points;
    double eps_contrast = 0.0;
    bool dimension_matched = false;  // weights equal ratio^{d-alpha}
    bool energy_increasing = false;
    bool endpoint_increasing = false;
    bool increments_non_collapsing = false;  // last increment >= 0.5 * previous
    double eps_last_rel_change = 0.0;
    bool eps_norm_stable = false;            // < 5% over the last step
};
/// Resolution sweep exhibiting the endpoint blow-up of the potential of a
/// dimension-matched measure against the stabilizing eps > 0 norm.
DivergenceReport divergence_example(const IFSSpec& spec, int d, std::array<double, kMaxDim> origin,
                                    double side, double alpha, std::span<const int> n_sweep,
                                    double eps_contrast, Exec ex = Exec::Serial);

}  // namespace capkit
