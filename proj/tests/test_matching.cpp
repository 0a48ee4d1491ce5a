#include "doctest.h"

#include <cmath>

#include "cdsurf/matching.hpp"
#include "cdsurf/rng.hpp"
#include "oracles.hpp"

using namespace cdsurf;

TEST_CASE("two nodes take the single edge") {
    const auto pairs = min_weight_perfect_matching(2, {{0, 1, 3.5}});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair{0, 1});
}

TEST_CASE("four-node cycle with alternating weights") {
    const std::vector<WeightedEdge> edges{{0, 1, 1}, {1, 2, 2}, {2, 3, 1}, {3, 0, 2}};
    const auto pairs = min_weight_perfect_matching(4, edges);
    CHECK(matching_total_weight(pairs, edges) == doctest::Approx(2.0));
}

TEST_CASE("odd vertex count is rejected") {
    CHECK_THROWS_AS(min_weight_perfect_matching(3, {{0, 1, 1.0}}), std::invalid_argument);
}

TEST_CASE("graph without a perfect matching is rejected") {
    // Star: center 0 with three leaves; no perfect matching on 4 vertices.
    CHECK_THROWS_AS(min_weight_perfect_matching(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("matcher equals the exhaustive optimum on random graphs") {
    Rng rng(2718);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 * (1 + static_cast<int>(rng.next_below(6)));  // 2..12 vertices
        std::vector<WeightedEdge> edges;
        const bool complete = rng.next_below(2) == 0;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                if (complete || rng.next_below(100) < 70) {
                    edges.push_back({u, v, rng.next_double() * 10.0});
                }
            }
        }
        const double oracle = oracles::brute_force_mwpm(n, edges);
        if (!std::isfinite(oracle)) {
            CHECK_THROWS_AS(min_weight_perfect_matching(n, edges), std::invalid_argument);
            continue;
        }
        const auto pairs = min_weight_perfect_matching(n, edges);
        CHECK(static_cast<int>(pairs.size()) == n / 2);
        CHECK(matching_total_weight(pairs, edges) == doctest::Approx(oracle).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked > 700);
}

TEST_CASE("matching is deterministic") {
    Rng rng(99);
    std::vector<WeightedEdge> edges;
    const int n = 10;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v, rng.next_double()});
    }
    const auto a = min_weight_perfect_matching(n, edges);
    const auto b = min_weight_perfect_matching(n, edges);
    CHECK(a == b);
}

TEST_CASE("max weight matching may leave vertices single") {
    // Two heavy disjoint edges beat one light middle edge.
    const std::vector<WeightedEdge> edges{{0, 1, 5}, {1, 2, 1}, {2, 3, 5}};
    const auto mate = max_weight_matching(4, edges, false);
    CHECK(mate[0] == 1);
    CHECK(mate[2] == 3);

    // A single expensive edge is preferred to nothing when positive.
    const auto mate2 = max_weight_matching(2, {{0, 1, 0.25}}, false);
    CHECK(mate2[0] == 1);
}
