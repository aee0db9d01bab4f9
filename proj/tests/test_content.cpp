#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capkit/content.hpp"
#include "capkit/rng.hpp"
#include "helpers.hpp"

using namespace capkit;
using namespace capkit::testing;

namespace {

// Brute-force minimum over all antichain covers, by full enumeration of the
// cover options of every E-touching node (no min-fusion inside the tree).
void enumerate_costs(const DyadicSet& E, double beta, const DyadicCube& node,
                     std::vector<double>& out) {
    const RootCube& root = E.root;
    std::vector<std::uint8_t> box;
    extract_mask_box(E.mask, root, node, box);
    bool touched = false;
    for (auto b : box) touched |= b != 0;
    if (!touched) {
        out.assign(1, 0.0);
        return;
    }
    const double own = std::pow(cube_side(root, node), beta);
    if (node.level == root.n) {
        out.assign(1, own);
        return;
    }
    std::vector<double> acc{0.0};
    for (const DyadicCube& ch : cube_children(root, node)) {
        std::vector<double> childcosts;
        enumerate_costs(E, beta, ch, childcosts);
        std::vector<double> next;
        next.reserve(acc.size() * childcosts.size());
        for (double a : acc)
            for (double c : childcosts) next.push_back(a + c);
        acc = std::move(next);
    }
    acc.push_back(own);
    out = std::move(acc);
}

double brute_min_cover(const DyadicSet& E, double beta) {
    std::vector<double> costs;
    enumerate_costs(E, beta, DyadicCube{}, costs);
    return *std::min_element(costs.begin(), costs.end());
}

}  // namespace

TEST_CASE("full cube costs its own side power") {
    // Children cost 2^{d-beta} side^beta >= side^beta for beta <= d.
    const DyadicSet E = set1d({1, 1, 1, 1}, 2);
    CHECK(dyadic_content(E, ContentParams(0.5)) == 1.0);
}

TEST_CASE("single leaf is its own cheapest cover") {
    std::vector<std::uint8_t> mask(8, 0);
    mask[5] = 1;
    const DyadicSet E = set1d(std::move(mask), 3);
    CHECK(dyadic_content(E, ContentParams(0.5)) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("two far leaves, fractional exponent") {
    const DyadicSet E = set1d({1, 0, 0, 1}, 2);
    CHECK(dyadic_content(E, ContentParams(0.6)) ==
          doctest::Approx(0.8705505632961241).epsilon(1e-15));
}

TEST_CASE("beta out of range is rejected") {
    const DyadicSet E = set1d({1, 0}, 1);
    CHECK_THROWS_WITH_AS(static_cast<void>(dyadic_content(E, ContentParams(0.0))),
                         "beta must lie in (0, d]", std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(dyadic_content(E, ContentParams(1.5))), std::invalid_argument);
}

TEST_CASE("grid-scale null sets are empty sets") {
    CHECK(content_measure_zero(set1d({0, 0}, 1)));
    CHECK(!content_measure_zero(set1d({1, 0}, 1)));
    CHECK(!content_measure_zero(set1d({1, 1}, 1)));
}

TEST_CASE("matches exhaustive antichain enumeration") {
    Rng rng(23);
    SUBCASE("1d all subsets at n=2") {
        const RootCube root = RootCube::unit(1, 2);
        for (std::size_t bits = 0; bits < 16; ++bits) {
            std::vector<std::uint8_t> mask(4);
            for (std::size_t i = 0; i < 4; ++i) mask[i] = (bits >> i) & 1;
            const DyadicSet E(root, std::move(mask));
            for (double beta : {0.3, 0.7, 1.0})
                CHECK(dyadic_content(E, ContentParams(beta)) ==
                      doctest::Approx(brute_min_cover(E, beta)).epsilon(1e-14));
        }
    }
    SUBCASE("2d random sets at n=2") {
        const RootCube root = RootCube::unit(2, 2);
        for (int trial = 0; trial < 40; ++trial) {
            const DyadicSet E = random_set(root, rng);
            for (double beta : {0.5, 1.3, 2.0})
                CHECK(dyadic_content(E, ContentParams(beta)) ==
                      doctest::Approx(brute_min_cover(E, beta)).epsilon(1e-14));
        }
    }
}

TEST_CASE("locality: content inside a subcube ignores the ambient root") {
    Rng rng(29);
    const RootCube root = RootCube::unit(2, 3);
    for (int trial = 0; trial < 20; ++trial) {
        // E inside one quadrant.
        DyadicCube q = cube2(1, static_cast<std::int64_t>(rng.below(2)),
                             static_cast<std::int64_t>(rng.below(2)));
        std::vector<std::uint8_t> mask(root.leaf_count(), 0);
        const std::int64_t k = 2, len = 4, axis = 8;
        for (std::int64_t a = 0; a < len; ++a)
            for (std::int64_t b = 0; b < len; ++b)
                if (rng.coin(0.4))
                    mask[static_cast<std::size_t>(((q.index[0] << k) + a) * axis + (q.index[1] << k) + b)] = 1;
        const DyadicSet E(root, std::move(mask));
        const ContentParams p(0.8);
        CHECK(dyadic_content(E, p, DyadicCube{}) == dyadic_content(E, p, q));
    }
}

TEST_CASE("beta = d reduces to Lebesgue measure of the leaf union") {
    Rng rng(31);
    for (int d = 1; d <= 2; ++d) {
        const RootCube root = RootCube::unit(d, 3);
        for (int trial = 0; trial < 10; ++trial) {
            const DyadicSet E = random_set(root, rng);
            const double lebesgue =
                static_cast<double>(E.count()) * std::pow(root.leaf_side(), d);
            CHECK(dyadic_content(E, ContentParams(static_cast<double>(d))) ==
                  doctest::Approx(lebesgue).epsilon(1e-12));
        }
    }
}

TEST_CASE("power inequality and monotonicity in beta on the unit cube") {
    Rng rng(37);
    const RootCube root = RootCube::unit(1, 5);
    for (int trial = 0; trial < 50; ++trial) {
        const DyadicSet E = random_set(root, rng);
        const double c5 = dyadic_content(E, ContentParams(0.5));
        const double c8 = dyadic_content(E, ContentParams(0.8));
        const double c1 = dyadic_content(E, ContentParams(1.0));
        CHECK(c8 <= std::pow(c5, 0.8 / 0.5) * (1 + 1e-12));
        CHECK(c1 <= std::pow(c5, 2.0) * (1 + 1e-12));
        // Contents on the unit cube stay <= 1, so they are monotone in beta.
        CHECK(c1 <= c8 * (1 + 1e-12));
        CHECK(c8 <= c5 * (1 + 1e-12));
    }
}

TEST_CASE("spherical bracket") {
    SUBCASE("single leaf, beta = 1") {
        std::vector<std::uint8_t> mask(4, 0);
        mask[0] = 1;
        const ContentBracket b = spherical_bracket(set1d(std::move(mask), 2), ContentParams(1.0));
        CHECK(b.dyadic_value == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(b.upper == doctest::Approx(0.25).epsilon(1e-12));  // omega_1 * (side/2)
        CHECK(b.lower <= b.upper);
        CHECK(b.lower == doctest::Approx(b.dyadic_value / b.c_beta_equiv));
    }
    SUBCASE("empty set") {
        const ContentBracket b = spherical_bracket(set1d({0, 0}, 1), ContentParams(0.7));
        CHECK(b.lower == 0.0);
        CHECK(b.upper == 0.0);
    }
    SUBCASE("full unit interval, beta = 1: one ball of radius 1/2") {
        const ContentBracket b = spherical_bracket(set1d({1, 1, 1, 1}, 2), ContentParams(1.0));
        CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("optimal cover keeps the coarse cube on ties") {
    // beta = d: children sum equals the parent cost everywhere, so the cover
    // of the full cube is the root alone.
    const DyadicSet E = set1d({1, 1, 1, 1}, 2);
    const auto cover = optimal_cover(E, ContentParams(1.0), DyadicCube{});
    REQUIRE(cover.size() == 1);
    CHECK(cover[0] == DyadicCube{});
}

TEST_CASE("capacity axioms hold on random pairs") {
    Rng rng(41);
    const RootCube root = RootCube::unit(2, 3);
    std::vector<std::pair<DyadicSet, DyadicSet>> samples;
    for (int i = 0; i < 60; ++i) {
        DyadicSet E = random_set(root, rng);
        if (i % 3 == 0)
            samples.emplace_back(E, set_union(E, random_set(root, rng)));  // nested
        else
            samples.emplace_back(E, random_set(root, rng));
    }
    const AxiomReport rep = capacity_axiom_report(samples, ContentParams(1.3));
    CHECK(rep.pass());
    CHECK(rep.monotone_pairs == samples.size());
}

TEST_CASE("beta = d is additive on disjoint leaf unions") {
    const DyadicSet E = set1d({1, 0, 0, 0}, 2);
    const DyadicSet F = set1d({0, 0, 1, 0}, 2);
    const ContentParams p(1.0);
    CHECK(dyadic_content(set_union(E, F), p) ==
          dyadic_content(E, p) + dyadic_content(F, p));
}

TEST_CASE("three dimensions") {
    const RootCube root = RootCube::unit(3, 2);
    std::vector<std::uint8_t> full(root.leaf_count(), 1);
    CHECK(dyadic_content(DyadicSet(root, std::move(full)), ContentParams(1.5)) == 1.0);

    std::vector<std::uint8_t> one(root.leaf_count(), 0);
    one[17] = 1;
    const DyadicSet single(root, std::move(one));
    CHECK(dyadic_content(single, ContentParams(1.5)) ==
          doctest::Approx(std::pow(0.25, 1.5)).epsilon(1e-14));
    CHECK(dyadic_content(single, ContentParams(3.0)) ==
          doctest::Approx(std::pow(0.25, 3.0)).epsilon(1e-14));

    Rng rng(91);
    const DyadicSet E = random_set(root, rng);
    const double lebesgue = static_cast<double>(E.count()) * std::pow(root.leaf_side(), 3);
    CHECK(dyadic_content(E, ContentParams(3.0)) == doctest::Approx(lebesgue).epsilon(1e-12));
}

TEST_CASE("mismatched roots are rejected") {
    const DyadicSet E = set1d({1, 0}, 1);
    const DyadicSet F = set1d({1, 0, 0, 0}, 2);
    std::vector<std::pair<DyadicSet, DyadicSet>> samples{{E, F}};
    CHECK_THROWS_AS(static_cast<void>(capacity_axiom_report(samples, ContentParams(0.5))),
                    std::invalid_argument);
}
