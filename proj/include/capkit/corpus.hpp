#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "capkit/grid.hpp"
#include "capkit/rng.hpp"

namespace capkit {

enum class CorpusKind { LogSingularity, CantorIndicator, RandomStep, Ramp };

CorpusKind corpus_kind_from_string(const std::string& s);
std::string corpus_kind_name(CorpusKind k);

/// -log distance to the root center, sampled at leaf centers (the center is a
/// cell corner for n >= 1, so every sample is finite).
GridFunction make_log_singularity(const RootCube& root);

/// Per-axis quarter-Cantor product set: an axis index belongs when its leading
/// base-4 digits (one per two levels) are all 0 or 3.
DyadicSet make_cantor_set(const RootCube& root);

/// Dyadic martingale: independent +-1/2 increments per cube on each level.
GridFunction make_random_step(const RootCube& root, Rng& rng);

/// Strictly increasing ramp (flat + 0.5) / 2^{dn}.
GridFunction make_ramp(const RootCube& root);

GridFunction indicator_grid(const DyadicSet& s);

struct CorpusEntry {
    std::string name;
    GridFunction u;
};

/// The verification battery: log singularity, Cantor indicator, two seeded
/// martingales, ramp.
std::vector<CorpusEntry> standard_corpus(const RootCube& root, std::uint64_t seed);

/// Writes the files for one corpus kind into outdir; deterministic in
/// (seed, kind, root). Returns the written paths.
std::vector<std::filesystem::path> corpus_generate(std::uint64_t seed, CorpusKind kind,
                                                   const RootCube& root,
                                                   const std::filesystem::path& outdir);

}  // namespace capkit
