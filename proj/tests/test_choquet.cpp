#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capkit/choquet.hpp"
#include "capkit/content.hpp"
#include "capkit/rng.hpp"
#include "helpers.hpp"

using namespace capkit;
using namespace capkit::testing;

namespace {

// Riemann integration of t -> C({f > t}) on a 10x refined threshold grid; the
// independent oracle for the layer-cake formula.
double riemann_oracle(const GridFunction& f, double beta) {
    std::vector<double> cuts = f.values;
    cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const double step = (hi - lo) / 10.0;
        for (int s = 0; s < 10; ++s) {
            const double t = lo + (s + 0.5) * step;
            std::vector<std::uint8_t> mask(f.values.size());
            for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = f.values[j] > t ? 1 : 0;
            acc += step * dyadic_content(DyadicSet(f.root, std::move(mask)), ContentParams(beta));
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("constant function integrates to c * side^beta") {
    const GridFunction f = grid1d({3, 3, 3, 3}, 2);
    CHECK(choquet_integral(f, ContentParams(0.5)) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(choquet_integral(f, ContentParams(0.5), cube1(1, 0)) ==
          doctest::Approx(3.0 * std::pow(0.5, 0.5)).epsilon(1e-15));
}

TEST_CASE("indicator integrates to the content") {
    Rng rng(5);
    const RootCube root = RootCube::unit(1, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const DyadicSet E = random_set(root, rng);
        std::vector<double> vals(E.mask.size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = E.mask[i];
        const GridFunction f(root, std::move(vals));
        CHECK(choquet_integral(f, ContentParams(0.7)) == dyadic_content(E, ContentParams(0.7)));
    }
}

TEST_CASE("two-layer example") {
    const GridFunction f = grid1d({2, 1}, 1);
    CHECK(choquet_integral(f, ContentParams(0.5)) ==
          doctest::Approx(1.7071067811865475).epsilon(1e-15));
}

TEST_CASE("layer cake lists thresholds with nonincreasing contents") {
    const GridFunction f = grid1d({2, 1, 0, 1}, 2);
    const LayerCake cake = layer_cake(f, ContentParams(0.5), DyadicCube{});
    REQUIRE(cake.thresholds.size() == 3);  // 0, 1, 2
    CHECK(cake.thresholds[0] == 0.0);
    for (std::size_t i = 1; i < cake.thresholds.size(); ++i) {
        CHECK(cake.thresholds[i] > cake.thresholds[i - 1]);
        CHECK(cake.contents[i] <= cake.contents[i - 1]);
    }
}

TEST_CASE("negative input is routed to l1_norm") {
    const GridFunction f = grid1d({-1, 1}, 1);
    try {
        static_cast<void>(choquet_integral(f, ContentParams(1.0)));
        FAIL("expected rejection of signed input");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("l1_norm") != std::string::npos);
    }
    CHECK(l1_norm(f, ContentParams(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("l1 norm basics") {
    CHECK(l1_norm(grid1d({0, 0, 0, 0}, 2), ContentParams(0.5)) == 0.0);
    // chi_E - chi_F with disjoint E, F has |f| = chi_{E union F}.
    const GridFunction f = grid1d({1, -1, 0, 0}, 2);
    const DyadicSet u = set1d({1, 1, 0, 0}, 2);
    CHECK(l1_norm(f, ContentParams(0.6)) == dyadic_content(u, ContentParams(0.6)));
}

TEST_CASE("layer cake matches the refined Riemann oracle") {
    Rng rng(7);
    for (int d = 1; d <= 2; ++d) {
        const RootCube root = RootCube::unit(d, d == 1 ? 4 : 2);
        for (int trial = 0; trial < 10; ++trial) {
            const GridFunction f = random_grid(root, rng);
            for (double beta : {0.5, 1.0}) {
                const double got = choquet_integral(f, ContentParams(beta));
                CHECK(got == doctest::Approx(riemann_oracle(f, beta)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("monotone in the integrand") {
    Rng rng(9);
    const RootCube root = RootCube::unit(1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const GridFunction f = random_grid(root, rng);
        GridFunction g = f;
        for (double& v : g.values) v += rng.uniform();
        CHECK(choquet_integral(f, ContentParams(0.5)) <=
              choquet_integral(g, ContentParams(0.5)) * (1 + 1e-12));
    }
}

TEST_CASE("Chebychev inequality") {
    Rng rng(13);
    const RootCube root = RootCube::unit(1, 5);
    const ContentParams p(0.5);
    for (int trial = 0; trial < 20; ++trial) {
        const GridFunction f = random_grid(root, rng);
        const double integral = choquet_integral(f, p);
        for (double t : {0.1, 0.5, 1.0, 1.9}) {
            std::vector<std::uint8_t> mask(f.values.size());
            for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = f.values[j] > t ? 1 : 0;
            const double content = dyadic_content(DyadicSet(root, std::move(mask)), p);
            CHECK(content <= integral / t * (1 + 1e-12));
        }
    }
}

TEST_CASE("sublinearity report") {
    Rng rng(15);
    const RootCube root = RootCube::unit(1, 4);
    std::vector<std::pair<GridFunction, GridFunction>> samples;
    for (int i = 0; i < 20; ++i) samples.emplace_back(random_grid(root, rng), random_grid(root, rng));
    // The worked pair: integrals 2 vs 2 * 2 * 2^{-1/2}.
    samples.emplace_back(grid1d({2, 0}, 1), grid1d({0, 2}, 1));
    const SublinearityReport rep = sublinearity_report(samples, ContentParams(0.5));
    CHECK(rep.pass());

    const GridFunction f = grid1d({2, 0}, 1);
    const GridFunction g = grid1d({0, 2}, 1);
    GridFunction fg = f;
    fg.values[1] = 2;
    CHECK(choquet_integral(fg, ContentParams(0.5)) == doctest::Approx(2.0));
    CHECK(choquet_integral(f, ContentParams(0.5)) + choquet_integral(g, ContentParams(0.5)) ==
          doctest::Approx(2 * std::pow(2.0, 0.5)));
}

TEST_CASE("dual pairing") {
    const RootCube root = RootCube::unit(1, 3);
    const ContentParams p(0.5);
    SUBCASE("uniform measure against the full cube indicator") {
        std::vector<double> masses(root.leaf_count(), 1.0 / 8.0);  // nu(Q0) = 1 = l(Q0)^beta
        const DiscreteMeasure nu(root, std::move(masses));
        std::vector<double> ones(root.leaf_count(), 1.0);
        const DualPairingReport rep = dual_pairing_check(GridFunction(root, std::move(ones)), nu, p);
        CHECK(rep.ratio <= 1.0 + 1e-12);
        CHECK(!rep.impossible);
    }
    SUBCASE("point mass scaled to unit Morrey norm") {
        const double side_beta = std::pow(root.leaf_side(), 0.5);
        std::vector<double> masses(root.leaf_count(), 0.0);
        masses[3] = side_beta;
        const DiscreteMeasure nu(root, std::move(masses));
        std::vector<double> vals(root.leaf_count(), 0.0);
        vals[3] = 1.0;
        const DualPairingReport rep = dual_pairing_check(GridFunction(root, std::move(vals)), nu, p);
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("random trials stay finite") {
        Rng rng(19);
        const RootCube r6 = RootCube::unit(1, 6);
        // Normalized uniform measure.
        std::vector<double> masses(r6.leaf_count(), 1.0 / static_cast<double>(r6.leaf_count()));
        const DiscreteMeasure nu(r6, std::move(masses));
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const GridFunction f = random_grid(r6, rng);
            const DualPairingReport rep = dual_pairing_check(f, nu, p);
            CHECK(!rep.impossible);
            worst = std::max(worst, rep.ratio);
        }
        CHECK(worst > 0.0);
        CHECK(std::isfinite(worst));
    }
    SUBCASE("unnormalized measure is rejected") {
        std::vector<double> masses(root.leaf_count(), 1.0);
        const DiscreteMeasure nu(root, std::move(masses));
        std::vector<double> ones(root.leaf_count(), 1.0);
        CHECK_THROWS_AS(
            static_cast<void>(dual_pairing_check(GridFunction(root, std::move(ones)), nu, p)),
            std::invalid_argument);
    }
}
