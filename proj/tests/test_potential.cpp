#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "capkit/choquet.hpp"
#include "capkit/potential.hpp"
#include "capkit/rng.hpp"
#include "helpers.hpp"

using namespace capkit;
using namespace capkit::testing;

namespace {

IFSSpec quarter_cantor() {
    IFSSpec s;
    s.maps = {{2, {0.0, 0, 0}, 0.5}, {2, {0.75, 0, 0}, 0.5}};
    return s;
}

IFSSpec uniform_halves() {
    IFSSpec s;
    s.maps = {{1, {0.0, 0, 0}, 0.5}, {1, {0.5, 0, 0}, 0.5}};
    return s;
}

}  // namespace

TEST_CASE("IFS spec parsing") {
    SUBCASE("well-formed file") {
        std::istringstream in("# quarter construction\nmap r=0.25 t=0 w=0.5\nmap r=0.25 t=0.75 w=0.5\n");
        const IFSSpec s = parse_ifs_spec(in, 1);
        REQUIRE(s.maps.size() == 2);
        CHECK(s.maps[0].ratio_log2 == 2);
        CHECK(s.maps[1].translate[0] == 0.75);
    }
    SUBCASE("non-dyadic ratio names the nearest one") {
        std::istringstream in("map r=0.3 t=0 w=1\n");
        try {
            static_cast<void>(parse_ifs_spec(in, 1));
            FAIL("expected rejection");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("2^-2") != std::string::npos);
        }
    }
    SUBCASE("weights must sum to one") {
        IFSSpec s;
        s.maps = {{1, {0.0, 0, 0}, 0.4}, {1, {0.5, 0, 0}, 0.4}};
        CHECK_THROWS_AS(validate_ifs(s, RootCube::unit(1, 4)), std::invalid_argument);
    }
    SUBCASE("overlapping images are rejected") {
        IFSSpec s;
        s.maps = {{1, {0.0, 0, 0}, 0.5}, {2, {0.25, 0, 0}, 0.5}};  // [0,1/2) contains [1/4,1/2)
        CHECK_THROWS_AS(validate_ifs(s, RootCube::unit(1, 4)), std::invalid_argument);
    }
    SUBCASE("misaligned translation is rejected") {
        IFSSpec s;
        s.maps = {{1, {0.1, 0, 0}, 0.5}, {1, {0.5, 0, 0}, 0.5}};
        CHECK_THROWS_AS(validate_ifs(s, RootCube::unit(1, 4)), std::invalid_argument);
    }
}

TEST_CASE("self-similar measures") {
    SUBCASE("two half maps give the uniform measure") {
        const DiscreteMeasure mu = hutchinson_measure(uniform_halves(), RootCube::unit(1, 6));
        const double per_leaf = 1.0 / static_cast<double>(mu.masses.size());
        for (double m : mu.masses) CHECK(m == doctest::Approx(per_leaf).epsilon(1e-12));
        const DensityReport rep = density_bounds(mu, 1.0);
        CHECK(rep.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("quarter construction: masses, norm and density window") {
        const RootCube root = RootCube::unit(1, 8);
        const DiscreteMeasure mu = hutchinson_measure(quarter_cantor(), root);
        CHECK(mu.total() == doctest::Approx(1.0).epsilon(1e-12));
        // Generation-m construction cubes carry mass 2^-m on side 4^-m.
        LevelTable t = sum_levels(mu.masses, 1, root.n);
        for (int g = 1; g <= 4; ++g) {
            const int level = 2 * g;
            // Leftmost construction cube has index 0 at its level.
            CHECK(t.value(level, 0) == doctest::Approx(std::pow(2.0, -g)).epsilon(1e-12));
            const double ratio = t.value(level, 0) / std::pow(std::ldexp(1.0, -level), 0.5);
            CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
        }
        const MorreyNorm norm = morrey_norm(mu, 0.5);
        CHECK(norm.value == doctest::Approx(1.0).epsilon(1e-12));
        const DensityReport rep = density_bounds(mu, 0.5);
        CHECK(rep.min_ratio >= 0.5 - 1e-12);
        CHECK(rep.max_ratio <= 2.0 + 1e-12);
    }
    SUBCASE("single map concentrates mass, small-beta norm grows with depth") {
        IFSSpec s;
        s.maps = {{1, {0.0, 0, 0}, 1.0}};
        double prev = 0.0;
        for (int n : {4, 6, 8}) {
            const DiscreteMeasure mu = hutchinson_measure(s, RootCube::unit(1, n));
            CHECK(mu.masses[0] == doctest::Approx(1.0));
            const double norm = morrey_norm(mu, 0.1).value;
            CHECK(norm > prev);
            prev = norm;
        }
    }
    SUBCASE("point mass norm is attained at the leaf") {
        const RootCube root = RootCube::unit(1, 4);
        std::vector<double> masses(root.leaf_count(), 0.0);
        masses[5] = 0.25;
        const MorreyNorm norm = morrey_norm(DiscreteMeasure(root, std::move(masses)), 0.5);
        CHECK(norm.value == doctest::Approx(0.25 / std::pow(root.leaf_side(), 0.5)).epsilon(1e-12));
        CHECK(norm.cube.level == root.n);
        CHECK(norm.cube.index[0] == 5);
    }
}

TEST_CASE("potential evaluation") {
    const RootCube root = RootCube::unit(1, 6);
    const double alpha = 0.5;
    const double gamma = riesz_gamma(1, alpha);
    SUBCASE("single far mass uses the center-distance kernel exactly") {
        std::vector<double> masses(root.leaf_count(), 0.0);
        masses[0] = 1.0;
        const GridFunction pot = riesz_potential(DiscreteMeasure(root, std::move(masses)), alpha);
        const double h = root.leaf_side();
        for (std::size_t i = 2; i < root.leaf_count(); ++i) {
            const double dist = static_cast<double>(i) * h;
            CHECK(pot.values[i] ==
                  doctest::Approx(std::pow(dist, alpha - 1.0) / gamma).epsilon(1e-14));
        }
        CHECK(std::isfinite(pot.values[0]));
        CHECK(pot.values[0] > pot.values[1]);
    }
    SUBCASE("translation equivariance away from the boundary") {
        Rng rng(7);
        std::vector<double> masses(root.leaf_count(), 0.0);
        for (std::size_t i = 8; i < 24; ++i) masses[i] = rng.uniform();
        const DiscreteMeasure mu(root, masses);
        std::vector<double> shifted(root.leaf_count(), 0.0);
        for (std::size_t i = 8; i < 24; ++i) shifted[i + 1] = masses[i];
        const GridFunction a = riesz_potential(mu, alpha);
        const GridFunction b = riesz_potential(DiscreteMeasure(root, std::move(shifted)), alpha);
        for (std::size_t i = 4; i + 5 < root.leaf_count(); ++i)
            CHECK(b.values[i + 1] == doctest::Approx(a.values[i]).epsilon(1e-12));
    }
    SUBCASE("linear in the measure") {
        Rng rng(11);
        std::vector<double> m1(root.leaf_count()), m2(root.leaf_count());
        for (std::size_t i = 0; i < m1.size(); ++i) {
            m1[i] = rng.uniform();
            m2[i] = rng.uniform();
        }
        std::vector<double> sum(root.leaf_count());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = m1[i] + m2[i];
        const GridFunction a = riesz_potential(DiscreteMeasure(root, m1), alpha);
        const GridFunction b = riesz_potential(DiscreteMeasure(root, m2), alpha);
        const GridFunction c = riesz_potential(DiscreteMeasure(root, sum), alpha);
        for (std::size_t i = 0; i < sum.size(); ++i)
            CHECK(c.values[i] == doctest::Approx(a.values[i] + b.values[i]).epsilon(1e-12));
    }
    SUBCASE("uniform measure: symmetry, center maximum, quadrature oracles") {
        const RootCube r8 = RootCube::unit(1, 8);
        std::vector<double> masses(r8.leaf_count(), 1.0 / static_cast<double>(r8.leaf_count()));
        const DiscreteMeasure mu(r8, std::move(masses));
        const GridFunction pot = riesz_potential(mu, alpha);
        const std::size_t L = pot.values.size();
        for (std::size_t i = 0; i < L / 2; ++i)
            CHECK(pot.values[i] == doctest::Approx(pot.values[L - 1 - i]).epsilon(1e-12));
        const double center = std::max(pot.values[L / 2 - 1], pot.values[L / 2]);
        for (std::size_t i = 0; i < L; ++i) CHECK(pot.values[i] <= center + 1e-15);
        // Closed form for the uniform density: (2 sqrt(x) + 2 sqrt(1-x)) / gamma.
        for (std::size_t i : {std::size_t{10}, L / 3, L - 7}) {
            const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(L);
            const double expect = (2.0 * std::sqrt(x) + 2.0 * std::sqrt(1.0 - x)) / gamma;
            CHECK(pot.values[i] == doctest::Approx(expect).epsilon(1e-3));
        }
        // Quadrature oracle at 10x resolution: midpoint rule far away, exact
        // antiderivative on the cells near the singularity.
        for (std::size_t i : {std::size_t{5}, L / 2, L - 12}) {
            const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(L);
            double acc = 0.0;
            const std::size_t fine = 10 * L;
            const double hf = 1.0 / static_cast<double>(fine);
            const auto prim = [&](double y) {  // antiderivative of |x-y|^{-1/2} in y
                return y < x ? -2.0 * std::sqrt(x - y) : 2.0 * std::sqrt(y - x);
            };
            for (std::size_t j = 0; j < fine; ++j) {
                const double lo = static_cast<double>(j) * hf, hi = lo + hf;
                const double mid = (lo + hi) / 2;
                if (std::abs(mid - x) <= 8.5 * hf)
                    acc += prim(hi) - prim(lo);
                else
                    acc += hf * std::pow(std::abs(x - mid), alpha - 1.0);
            }
            CHECK(pot.values[i] == doctest::Approx(acc / gamma).epsilon(1e-3));
        }
    }
    SUBCASE("alpha out of range") {
        std::vector<double> masses(root.leaf_count(), 0.0);
        masses[0] = 1.0;
        const DiscreteMeasure mu(root, std::move(masses));
        CHECK_THROWS_AS(static_cast<void>(riesz_potential(mu, 1.0)), std::invalid_argument);
        CHECK_THROWS_AS(static_cast<void>(riesz_potential(mu, 0.0)), std::invalid_argument);
    }
}

TEST_CASE("embedding check") {
    SUBCASE("ratio is invariant under measure scaling") {
        const RootCube root = RootCube::unit(1, 6);
        const DiscreteMeasure mu = hutchinson_measure(quarter_cantor(), root);
        std::vector<double> doubled = mu.masses;
        for (double& m : doubled) m *= 2.0;
        const AdamsReport a = adams_embedding_check(mu, 0.5, 0.25);
        const AdamsReport b =
            adams_embedding_check(DiscreteMeasure(root, std::move(doubled)), 0.5, 0.25);
        CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(1e-10));
        CHECK(a.beta == doctest::Approx(0.75));
        CHECK(a.series_near > 0.0);
        CHECK(a.series_far > 0.0);
    }
    SUBCASE("eps out of range") {
        const DiscreteMeasure mu = hutchinson_measure(quarter_cantor(), RootCube::unit(1, 4));
        CHECK_THROWS_AS(static_cast<void>(adams_embedding_check(mu, 0.5, 0.0)), std::invalid_argument);
        CHECK_THROWS_AS(static_cast<void>(adams_embedding_check(mu, 0.5, 0.6)), std::invalid_argument);
    }
}

TEST_CASE("endpoint sweep") {
    SUBCASE("dimension-matched construction blows up, eps norm stabilizes") {
        const std::vector<int> sweep{4, 6, 8};
        const DivergenceReport rep =
            divergence_example(quarter_cantor(), 1, {0, 0, 0}, 1.0, 0.5, sweep, 0.25);
        CHECK(rep.dimension_matched);
        CHECK(rep.energy_increasing);
        CHECK(rep.endpoint_increasing);
    }
    SUBCASE("uniform control case does not diverge") {
        const std::vector<int> sweep{4, 6, 8};
        const DivergenceReport rep =
            divergence_example(uniform_halves(), 1, {0, 0, 0}, 1.0, 0.5, sweep, 0.25);
        CHECK(!rep.dimension_matched);  // weights 1/2 differ from ratio^{d-alpha}
        const auto& pts = rep.points;
        const double rel = std::abs(pts.back().l1_endpoint - pts[pts.size() - 2].l1_endpoint) /
                           pts.back().l1_endpoint;
        CHECK(rel < 0.05);
    }
}
