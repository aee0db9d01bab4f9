#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capkit/bmo.hpp"
#include "capkit/calculus.hpp"
#include "capkit/choquet.hpp"
#include "capkit/content.hpp"
#include "capkit/corpus.hpp"
#include "capkit/potential.hpp"
#include "capkit/rng.hpp"
#include "helpers.hpp"

using namespace capkit;
using namespace capkit::testing;

// The OpenMP kernels promise agreement with the serial reference within 1e-12
// relative tolerance; no kernel reorders a floating sum, so they currently
// agree bitwise and the checks below pin that down.

namespace {

void check_close(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    CHECK(std::abs(a - b) <= 1e-12 * std::max(scale, 1.0));
}

}  // namespace

TEST_CASE("content kernels agree across execution modes") {
    Rng rng(3);
    for (int d = 1; d <= 2; ++d) {
        const RootCube root = RootCube::unit(d, d == 1 ? 12 : 6);
        for (int trial = 0; trial < 5; ++trial) {
            const DyadicSet E = random_set(root, rng);
            const ContentParams p(0.5 + 0.4 * trial / 4.0);
            CHECK(dyadic_content(E, p, Exec::Serial) == dyadic_content(E, p, Exec::Parallel));
        }
    }
}

TEST_CASE("choquet integrals agree across execution modes") {
    Rng rng(5);
    const RootCube root = RootCube::unit(1, 12);
    for (int trial = 0; trial < 5; ++trial) {
        const GridFunction f = random_grid(root, rng);
        CHECK(choquet_integral(f, ContentParams(0.7), Exec::Serial) ==
              choquet_integral(f, ContentParams(0.7), Exec::Parallel));
    }
}

TEST_CASE("maximal function agrees across execution modes") {
    Rng rng(7);
    const RootCube root = RootCube::unit(2, 5);
    const GridFunction f = random_grid(root, rng);
    const GridFunction a = maximal_function(f, ContentParams(1.3), Exec::Serial);
    const GridFunction b = maximal_function(f, ContentParams(1.3), Exec::Parallel);
    CHECK(a.values == b.values);
}

TEST_CASE("seminorm sweep agrees across execution modes") {
    const RootCube root = RootCube::unit(1, 8);
    const GridFunction u = make_log_singularity(root);
    check_close(seminorm_dyadic(u, ContentParams(0.5), Exec::Serial),
                seminorm_dyadic(u, ContentParams(0.5), Exec::Parallel));
    check_close(p_seminorm(u, ContentParams(0.5), 2.0, Exec::Serial),
                p_seminorm(u, ContentParams(0.5), 2.0, Exec::Parallel));
}

TEST_CASE("riesz potential agrees across execution modes") {
    IFSSpec cantor;
    cantor.maps = {{2, {0.0, 0, 0}, 0.5}, {2, {0.75, 0, 0}, 0.5}};
    const DiscreteMeasure mu = hutchinson_measure(cantor, RootCube::unit(1, 10));
    const GridFunction a = riesz_potential(mu, 0.5, Exec::Serial);
    const GridFunction b = riesz_potential(mu, 0.5, Exec::Parallel);
    CHECK(a.values == b.values);
}

TEST_CASE("axiom suite agrees across execution modes") {
    Rng rng(11);
    const RootCube root = RootCube::unit(2, 4);
    std::vector<std::pair<DyadicSet, DyadicSet>> samples;
    for (int i = 0; i < 40; ++i) samples.emplace_back(random_set(root, rng), random_set(root, rng));
    const AxiomReport a = capacity_axiom_report(samples, ContentParams(1.3), Exec::Serial);
    const AxiomReport b = capacity_axiom_report(samples, ContentParams(1.3), Exec::Parallel);
    CHECK(a.pass());
    CHECK(b.pass());
    CHECK(a.max_rel_excess == b.max_rel_excess);
}
