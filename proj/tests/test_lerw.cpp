#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lapwalk/lattice.hpp"
#include "lapwalk/lerw.hpp"
#include "lapwalk/rng.hpp"
#include "lapwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace lw;

namespace {

Domain grid(int w, int h) {
    return Domain::box_rect({0, 0}, {w - 1, h - 1}, FramePolicy::open);
}

bool self_avoiding(const std::vector<Vertex>& p) {
    std::set<Vertex> seen(p.begin(), p.end());
    return seen.size() == p.size();
}

// exhaustively sampled counts for one distribution
std::vector<long long> sample_counts(const Domain& d, Vertex s, Vertex w,
                                     const PathDistribution& table, int n, std::uint64_t seed) {
    std::vector<long long> counts(table.paths.size(), 0);
    SplitMix64 rng(seed);
    for (int k = 0; k < n; ++k) {
        std::vector<Vertex> p = sample_lerw(d, s, w, rng);
        int idx = table.find(p);
        REQUIRE(idx >= 0);
        ++counts[std::size_t(idx)];
    }
    return counts;
}

}  // namespace

TEST_CASE("loop erasure removes cycles in order") {
    std::vector<Vertex> path{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}, {0, -1}};
    std::vector<Vertex> erased = loop_erase(path);
    CHECK(erased == std::vector<Vertex>{{0, 0}, {0, -1}});

    std::vector<Vertex> no_loop{{0, 0}, {1, 0}, {2, 0}};
    CHECK(loop_erase(no_loop) == no_loop);

    std::vector<Vertex> single{{5, 5}};
    CHECK(loop_erase(single) == single);

    // double loop through the same vertex
    std::vector<Vertex> twice{{0, 0}, {1, 0}, {1, 1}, {1, 0}, {2, 0}, {1, 0}, {0, 0}, {0, 1}};
    CHECK(loop_erase(twice) == std::vector<Vertex>{{0, 0}, {0, 1}});
}

TEST_CASE("loop-erased samples are self-avoiding walks between the endpoints") {
    Domain d = grid(4, 4);
    SplitMix64 rng(31);
    for (int k = 0; k < 500; ++k) {
        std::vector<Vertex> p = sample_lerw(d, {0, 0}, {3, 3}, rng);
        REQUIRE(p.size() >= 2);
        CHECK(p.front() == Vertex{0, 0});
        CHECK(p.back() == Vertex{3, 3});
        CHECK(self_avoiding(p));
        for (std::size_t s = 1; s < p.size(); ++s) {
            Vertex step = p[s] - p[s - 1];
            CHECK(std::abs(step.re) + std::abs(step.im) == 1);
        }
    }
}

TEST_CASE("degenerate endpoints give the single-vertex path") {
    Domain d = grid(3, 3);
    SplitMix64 rng(1);
    CHECK(sample_lerw(d, {1, 1}, {1, 1}, rng) == std::vector<Vertex>{{1, 1}});
}

TEST_CASE("exact alpha=1 law on the 3x3 grid") {
    Domain d = grid(3, 3);
    PathDistribution table = exact_alpha1_distribution({0, 0}, {2, 2}, d);
    REQUIRE(table.paths.size() == 12);
    CHECK(table.deficit == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(table.total() == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> probs = table.probabilities;
    std::sort(probs.begin(), probs.end());
    CHECK(probs.front() == doctest::Approx(1.0 / 192).epsilon(1e-10));
    // the two L-shaped geodesics lead, a quarter-turn pair behind them
    CHECK(probs[11] == doctest::Approx(0.1875).epsilon(1e-10));
    CHECK(probs[10] == doctest::Approx(0.1875).epsilon(1e-10));
    CHECK(probs[9] == doctest::Approx(25.0 / 192).epsilon(1e-10));
    CHECK(probs[8] == doctest::Approx(25.0 / 192).epsilon(1e-10));

    for (const auto& p : table.paths) {
        CHECK(p.front() == Vertex{0, 0});
        CHECK(p.back() == Vertex{2, 2});
        CHECK(self_avoiding(p));
    }

    // find() is exact-match only
    CHECK(table.find(table.paths[5]) == 5);
    CHECK(table.find({{0, 0}, {1, 0}}) == -1);
}

TEST_CASE("exact law rejects oversized domains and infinite alpha") {
    Domain big = Domain::box({0, 0}, 4, FramePolicy::open);
    CHECK_THROWS_AS(exact_alpha_distribution({0, 0}, {1, 1}, big, AlphaSpec::finite(1.0)),
                    std::invalid_argument);
    Domain d = grid(3, 3);
    CHECK_THROWS_AS(exact_alpha_distribution({0, 0}, {2, 2}, d, AlphaSpec::infinity()),
                    std::invalid_argument);
}

TEST_CASE("LERW sampling matches the alpha=1 law on the 3x3 grid") {
    Domain d = grid(3, 3);
    PathDistribution table = exact_alpha1_distribution({0, 0}, {2, 2}, d);
    auto counts = sample_counts(d, {0, 0}, {2, 2}, table, 20000, 2026);
    ChiSquare c = chi_square_compare(counts, table);
    CHECK(c.dof > 0);
    CHECK(c.p_value > 0.001);
}

TEST_CASE("LERW sampling matches the alpha=1 law on the 2x3 grid") {
    // the smallest domain with unequal-length competing routes
    Domain d = grid(3, 2);
    PathDistribution table = exact_alpha1_distribution({0, 0}, {2, 1}, d);
    CHECK(table.paths.size() >= 3);
    auto counts = sample_counts(d, {0, 0}, {2, 1}, table, 20000, 515);
    ChiSquare c = chi_square_compare(counts, table);
    CHECK(c.p_value > 0.001);
}

TEST_CASE("negative control: alpha=0 walk paths break the alpha=1 fit") {
    Domain d = grid(3, 3);
    PathDistribution table = exact_alpha1_distribution({0, 0}, {2, 2}, d);
    std::vector<long long> counts(table.paths.size(), 0);
    int collected = 0;
    std::uint64_t item = 0;
    while (collected < 20000) {
        Trajectory t = run_walk({0, 0}, {2, 2}, d, AlphaSpec::finite(0.0), TieRule{},
                                SolverConfig{}, SplitMix64::stream(99, item++).next(), 64);
        if (t.termination != Termination::hit_target) continue;  // trapped mass is conditioned out
        int idx = table.find(t.vertices);
        REQUIRE(idx >= 0);
        ++counts[std::size_t(idx)];
        ++collected;
    }
    ChiSquare c = chi_square_compare(counts, table);
    CHECK(c.p_value < 0.001);
}

TEST_CASE("chi-square helper pools thin cells") {
    PathDistribution table;
    table.paths = {{{0, 0}}, {{1, 0}}, {{2, 0}}, {{3, 0}}};
    table.probabilities = {0.5, 0.45, 0.049, 0.001};
    ChiSquare c = chi_square_compare({500, 450, 49, 1}, table);
    CHECK(c.pooled_cells == 3);  // the two thin cells merge into one bucket
    CHECK(c.dof == 2);
    CHECK(c.statistic == doctest::Approx(0.0));
    CHECK(c.p_value > 0.999);

    ChiSquare bad = chi_square_compare({1, 450, 49, 500}, table);
    CHECK(bad.p_value < 1e-10);
}
