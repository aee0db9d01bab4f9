#include "capkit/corpus.hpp"

#include <cmath>
#include <stdexcept>

#include "capkit/io.hpp"
#include "capkit/levels.hpp"

namespace capkit {

CorpusKind corpus_kind_from_string(const std::string& s) {
    if (s == "log-singularity") return CorpusKind::LogSingularity;
    if (s == "cantor-indicator") return CorpusKind::CantorIndicator;
    if (s == "random-step") return CorpusKind::RandomStep;
    if (s == "ramp") return CorpusKind::Ramp;
    throw std::invalid_argument("unknown corpus kind '" + s +
                                "' (log-singularity, cantor-indicator, random-step, ramp)");
}

std::string corpus_kind_name(CorpusKind k) {
    switch (k) {
        case CorpusKind::LogSingularity: return "log-singularity";
        case CorpusKind::CantorIndicator: return "cantor-indicator";
        case CorpusKind::RandomStep: return "random-step";
        default: return "ramp";
    }
}

GridFunction make_log_singularity(const RootCube& root) {
    std::vector<double> vals(root.leaf_count());
    std::array<double, kMaxDim> x0{0.0, 0.0, 0.0};
    for (int t = 0; t < root.d; ++t) x0[static_cast<std::size_t>(t)] = root.origin[static_cast<std::size_t>(t)] + root.side / 2.0;
    for (std::size_t f = 0; f < vals.size(); ++f) {
        const auto c = leaf_center(root, f);
        double d2 = 0.0;
        for (int t = 0; t < root.d; ++t) {
            const double dt = c[static_cast<std::size_t>(t)] - x0[static_cast<std::size_t>(t)];
            d2 += dt * dt;
        }
        vals[f] = -0.5 * std::log(d2);
    }
    return GridFunction(root, std::move(vals));
}

namespace {

bool cantor_axis(std::int64_t ix, int n) {
    // Leading base-4 digits of the n-bit index must be 0 or 3.
    const int gens = n / 2;
    for (int g = 0; g < gens; ++g) {
        const int shift = n - 2 * (g + 1);
        const int digit = static_cast<int>((ix >> shift) & 3);
        if (digit != 0 && digit != 3) return false;
    }
    return true;
}

}  // namespace

DyadicSet make_cantor_set(const RootCube& root) {
    std::vector<std::uint8_t> mask(root.leaf_count(), 0);
    for (std::size_t f = 0; f < mask.size(); ++f) {
        const DyadicCube c = leaf_cube(root, f);
        bool in = true;
        for (int t = 0; t < root.d && in; ++t) in = cantor_axis(c.index[static_cast<std::size_t>(t)], root.n);
        mask[f] = in ? 1 : 0;
    }
    return DyadicSet(root, std::move(mask));
}

GridFunction make_random_step(const RootCube& root, Rng& rng) {
    // Accumulate signed half-steps down the levels; value = sum along the chain.
    std::vector<double> cur(1, 0.0);
    for (int j = 1; j <= root.n; ++j) {
        std::vector<double> next(std::size_t{1} << static_cast<unsigned>(root.d * j));
        for (std::size_t f = 0; f < next.size(); ++f) {
            const DyadicCube c = cube_from_flat(j, f, root.d);
            const DyadicCube par = ancestor_at(c, j - 1, root.d);
            next[f] = cur[cube_flat(par, root.d)] + (rng.coin() ? 0.5 : -0.5);
        }
        cur = std::move(next);
    }
    return GridFunction(root, std::move(cur));
}

GridFunction make_ramp(const RootCube& root) {
    std::vector<double> vals(root.leaf_count());
    const double scale = 1.0 / static_cast<double>(root.leaf_count());
    for (std::size_t f = 0; f < vals.size(); ++f) vals[f] = (static_cast<double>(f) + 0.5) * scale;
    return GridFunction(root, std::move(vals));
}

GridFunction indicator_grid(const DyadicSet& s) {
    std::vector<double> vals(s.mask.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = s.mask[i] ? 1.0 : 0.0;
    return GridFunction(s.root, std::move(vals));
}

std::vector<CorpusEntry> standard_corpus(const RootCube& root, std::uint64_t seed) {
    std::vector<CorpusEntry> out;
    out.push_back({"log-singularity", make_log_singularity(root)});
    out.push_back({"cantor-indicator", indicator_grid(make_cantor_set(root))});
    Rng r1(seed), r2(seed + 1);
    out.push_back({"random-step-a", make_random_step(root, r1)});
    out.push_back({"random-step-b", make_random_step(root, r2)});
    out.push_back({"ramp", make_ramp(root)});
    return out;
}

std::vector<std::filesystem::path> corpus_generate(std::uint64_t seed, CorpusKind kind,
                                                   const RootCube& root,
                                                   const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    std::vector<std::filesystem::path> written;
    const std::string stem = corpus_kind_name(kind) + "-d" + std::to_string(root.d) + "-n" +
                             std::to_string(root.n);
    switch (kind) {
        case CorpusKind::LogSingularity: {
            const auto p = outdir / (stem + ".dgf");
            write_grid(p, make_log_singularity(root));
            written.push_back(p);
            break;
        }
        case CorpusKind::CantorIndicator: {
            const DyadicSet s = make_cantor_set(root);
            const auto ps = outdir / (stem + ".dst");
            write_set(ps, s);
            written.push_back(ps);
            const auto pg = outdir / (stem + ".dgf");
            write_grid(pg, indicator_grid(s));
            written.push_back(pg);
            break;
        }
        case CorpusKind::RandomStep: {
            Rng rng(seed);
            const auto p = outdir / (stem + "-s" + std::to_string(seed) + ".dgf");
            write_grid(p, make_random_step(root, rng));
            written.push_back(p);
            break;
        }
        case CorpusKind::Ramp: {
            const auto p = outdir / (stem + ".dgf");
            write_grid(p, make_ramp(root));
            written.push_back(p);
            break;
        }
    }
    return written;
}

}  // namespace capkit
