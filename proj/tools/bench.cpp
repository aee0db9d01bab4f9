// Benchmark of the OpenMP kernels against the serial reference path.
// Prints per-kernel wall times, speedup, and the worst relative deviation
// between the two results (contract: <= 1e-12).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "capkit/bmo.hpp"
#include "capkit/calculus.hpp"
#include "capkit/content.hpp"
#include "capkit/corpus.hpp"
#include "capkit/potential.hpp"
#include "capkit/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace capkit;

namespace {

double now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

double rel_diff(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
    return worst;
}

struct Row {
    const char* name;
    double serial_s, parallel_s, rdiff;
};

void print(const Row& r) {
    std::printf("%-28s %9.3f ms %9.3f ms %6.2fx   max rel diff %.2e\n", r.name, 1e3 * r.serial_s,
                1e3 * r.parallel_s, r.serial_s / std::max(r.parallel_s, 1e-9), r.rdiff);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%-28s %12s %12s %8s\n", "kernel", "serial", "parallel", "speedup");

    Rng rng(42);

    {  // content DP, d=1, 4M leaves
        const RootCube root = RootCube::unit(1, 22);
        std::vector<std::uint8_t> mask(root.leaf_count());
        for (auto& b : mask) b = rng.coin(0.35) ? 1 : 0;
        const DyadicSet E(root, std::move(mask));
        const ContentParams p(0.5);
        double t0 = now();
        const double cs = dyadic_content(E, p, Exec::Serial);
        double t1 = now();
        const double cp = dyadic_content(E, p, Exec::Parallel);
        double t2 = now();
        print({"content-dp d=1 n=22", t1 - t0, t2 - t1, rel_diff(cs, cp)});
    }

    {  // maximal function, d=2, 1M leaves
        const RootCube root = RootCube::unit(2, 10);
        Rng r2(7);
        GridFunction f = make_random_step(root, r2);
        const ContentParams p(1.3);
        double t0 = now();
        const GridFunction ms = maximal_function(f, p, Exec::Serial);
        double t1 = now();
        const GridFunction mp = maximal_function(f, p, Exec::Parallel);
        double t2 = now();
        print({"maximal d=2 n=10", t1 - t0, t2 - t1, rel_diff(ms.values, mp.values)});
    }

    {  // Riesz potential, d=1, 4096 cells dense support
        IFSSpec cantor;
        cantor.maps = {{2, {0.0, 0, 0}, 0.5}, {2, {0.75, 0, 0}, 0.5}};
        const RootCube root = RootCube::unit(1, 14);
        const DiscreteMeasure mu = hutchinson_measure(cantor, root);
        double t0 = now();
        const GridFunction ps = riesz_potential(mu, 0.5, Exec::Serial);
        double t1 = now();
        const GridFunction pp = riesz_potential(mu, 0.5, Exec::Parallel);
        double t2 = now();
        print({"riesz d=1 n=14 cantor", t1 - t0, t2 - t1, rel_diff(ps.values, pp.values)});
    }

    {  // seminorm sweep, d=2 n=5
        const RootCube root = RootCube::unit(2, 5);
        const GridFunction u = make_log_singularity(root);
        const ContentParams p(1.3);
        double t0 = now();
        const double ss = seminorm_dyadic(u, p, Exec::Serial);
        double t1 = now();
        const double sp = seminorm_dyadic(u, p, Exec::Parallel);
        double t2 = now();
        print({"bmo-seminorm d=2 n=5", t1 - t0, t2 - t1, rel_diff(ss, sp)});
    }

    return 0;
}
