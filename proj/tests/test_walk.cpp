#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lapwalk/lattice.hpp"
#include "lapwalk/rng.hpp"
#include "lapwalk/walk.hpp"

#include <cmath>
#include <vector>

using namespace lw;

TEST_CASE("step distribution: probabilities over neighbors, zero on the past") {
    Domain d = Domain::box({0, 0}, 3, FramePolicy::absorb0);
    std::vector<Vertex> path{{0, 0}, {1, 0}};
    StepDistribution s = step_distribution(path, {3, 0}, d, 1.0);
    REQUIRE_FALSE(s.trapped);
    REQUIRE(s.probabilities.size() == 4);

    double total = 0.0;
    for (const auto& [v, p] : s.probabilities) {
        total += p;
        if (v == Vertex{0, 0}) CHECK(p == 0.0);  // own past carries no mass
        if (v == Vertex{2, 0}) CHECK(p > 0.5);   // toward the target dominates
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha 0 is uniform over neighbors that can still reach the target") {
    Domain d = Domain::box({0, 0}, 3, FramePolicy::absorb0);
    std::vector<Vertex> path{{0, 0}};
    StepDistribution s = step_distribution(path, {2, 2}, d, 0.0);
    int positive = 0;
    for (const auto& [v, p] : s.probabilities)
        if (p > 0) {
            ++positive;
            CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
        }
    CHECK(positive == 4);
}

TEST_CASE("large alpha approaches the argmax step") {
    Domain d = Domain::box({0, 0}, 4, FramePolicy::absorb0);
    std::vector<Vertex> path{{0, 0}};
    StepDistribution s = step_distribution(path, {3, 1}, d, 60.0);
    double p_east = 0.0;
    for (const auto& [v, p] : s.probabilities)
        if (v == Vertex{1, 0}) p_east = p;
    CHECK(p_east > 0.999);
}

TEST_CASE("infinity step picks the strict argmax without a tie") {
    Domain d = Domain::box({0, 0}, 4, FramePolicy::absorb0);
    SplitMix64 rng(5);
    InfinityStep s = step_infinity({{0, 0}}, {3, 1}, d, TieRule{}, SolverConfig{}, rng);
    CHECK_FALSE(s.trapped);
    CHECK(s.next == Vertex{1, 0});
    CHECK(s.tie_size == 1);
}

TEST_CASE("diagonal target declares a two-way first-step tie") {
    Domain d = Domain::box({0, 0}, 12, FramePolicy::open);
    int east = 0, north = 0;
    for (int k = 0; k < 200; ++k) {
        SplitMix64 rng = SplitMix64::stream(11, std::uint64_t(k));
        InfinityStep s = step_infinity({{0, 0}}, {3, 3}, d, TieRule{}, SolverConfig{}, rng);
        REQUIRE_FALSE(s.trapped);
        CHECK(s.tie_size == 2);
        if (s.next == Vertex{1, 0}) ++east;
        if (s.next == Vertex{0, 1}) ++north;
    }
    CHECK(east + north == 200);
    CHECK(east > 60);  // both arms actually drawn
    CHECK(north > 60);
}

TEST_CASE("walled-in start is trapped immediately") {
    Domain d = Domain::box({0, 0}, 6, FramePolicy::absorb0);
    for (Vertex v : {Vertex{1, 0}, Vertex{0, 1}, Vertex{-1, 0}, Vertex{0, -1}})
        d.add_overlay(v, 0.0);
    Trajectory t = run_walk({0, 0}, {4, 0}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            1, 100);
    CHECK(t.termination == Termination::trapped);
    CHECK(t.steps == 0);
    CHECK(t.vertices.size() == 1);
}

TEST_CASE("frozen walk: target (8,3) on the open box of radius 32") {
    Domain d = Domain::box({0, 0}, 32, FramePolicy::open);
    Trajectory t = run_walk({0, 0}, {8, 3}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            1, 64);
    CHECK(t.termination == Termination::hit_target);
    CHECK(t.steps == 11);
    CHECK(t.vertices.back() == Vertex{8, 3});
    CHECK(t.ties.empty());
    CHECK(t.self_avoiding());
    // straight along the axis through t = 7, first deviation at t = 8
    for (int k = 0; k <= 7; ++k) CHECK(t.vertices[std::size_t(k)] == Vertex{k, 0});
    CHECK(t.vertices[8] != Vertex{8, 0});
}

TEST_CASE("frozen walk: target (25,6) on the absorbing box of radius 100") {
    Domain d = Domain::box({0, 0}, 100, FramePolicy::absorb0);
    Trajectory t = run_walk({0, 0}, {25, 6}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            1, 120);
    CHECK(t.termination == Termination::hit_target);
    CHECK(t.steps == 31);
    CHECK(t.ties.empty());
    for (int k = 0; k <= 23; ++k) CHECK(t.vertices[std::size_t(k)] == Vertex{k, 0});
    CHECK(t.vertices[24] != Vertex{24, 0});
}

TEST_CASE("tie-free walks ignore the seed; tied walks reproduce per seed") {
    Domain d = Domain::box({0, 0}, 16, FramePolicy::open);
    Trajectory a = run_walk({0, 0}, {4, 1}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            1, 64);
    Trajectory b = run_walk({0, 0}, {4, 1}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            999, 64);
    CHECK(a.vertices == b.vertices);

    Trajectory c = run_walk({0, 0}, {4, 4}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            3, 64);
    Trajectory e = run_walk({0, 0}, {4, 4}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            3, 64);
    CHECK(c.vertices == e.vertices);
    CHECK(c.ties.size() == e.ties.size());
    CHECK(c.seed == 3);
}

TEST_CASE("reflecting the target reflects the tie-free path") {
    Domain d = Domain::box({0, 0}, 24, FramePolicy::open);
    Trajectory t1 = run_walk({0, 0}, {6, 2}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                             1, 64);
    Trajectory t2 = run_walk({0, 0}, {2, 6}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                             1, 64);
    REQUIRE(t1.ties.empty());
    REQUIRE(t2.ties.empty());
    REQUIRE(t1.vertices.size() == t2.vertices.size());
    Isometry mirror = Isometry::reflect_D();
    for (std::size_t k = 0; k < t1.vertices.size(); ++k)
        CHECK(apply_isometry(mirror, t1.vertices[k]) == t2.vertices[k]);
}

TEST_CASE("finite-alpha walk hits the adjacent target or reports the frame") {
    Domain d = Domain::box({0, 0}, 8, FramePolicy::absorb0);
    int hits = 0, frames = 0, traps = 0;
    for (int k = 0; k < 30; ++k) {
        Trajectory t = run_walk({0, 0}, {2, 0}, d, AlphaSpec::finite(1.0), TieRule{},
                                SolverConfig{}, SplitMix64::stream(17, std::uint64_t(k)).next(),
                                500);
        CHECK(t.self_avoiding());
        switch (t.termination) {
            case Termination::hit_target: ++hits; break;
            case Termination::frame_hit: ++frames; break;
            case Termination::trapped: ++traps; break;
            default: break;
        }
        if (t.termination == Termination::hit_target) CHECK(t.vertices.back() == Vertex{2, 0});
    }
    CHECK(hits + frames + traps == 30);
    CHECK(hits > 5);
}

TEST_CASE("horizon stops a walk that cannot finish") {
    Domain d = Domain::box({0, 0}, 10, FramePolicy::open);
    Trajectory t = run_walk({0, 0}, {9, 9}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                            1, 3);
    CHECK(t.termination == Termination::horizon_reached);
    CHECK(t.steps == 3);
}

TEST_CASE("termination names") {
    CHECK(std::string(termination_name(Termination::hit_target)) == "hit_target");
    CHECK(std::string(termination_name(Termination::trapped)) == "trapped");
    CHECK(std::string(termination_name(Termination::frame_hit)) == "frame_hit");
    CHECK(std::string(termination_name(Termination::horizon_reached)) == "horizon_reached");
}

TEST_CASE("degenerate queries are rejected") {
    Domain d = Domain::box({0, 0}, 5, FramePolicy::absorb0);
    CHECK_THROWS_AS(run_walk({2, 1}, {2, 1}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{},
                             1, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(step_distribution({}, {1, 1}, d, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(step_distribution({{0, 0}, {1, 1}}, {1, 1}, d, 1.0), std::invalid_argument);
}

TEST_CASE("walk engine exposes the incremental state") {
    Domain d = Domain::box({0, 0}, 8, FramePolicy::open);
    detail::WalkEngine eng({0, 0}, {4, 1}, d, AlphaSpec::infinity(), TieRule{}, SolverConfig{}, 1);
    CHECK_FALSE(eng.finished());
    CHECK(eng.advance());
    CHECK(eng.path().size() == 2);
    CHECK(eng.path()[1] == Vertex{1, 0});
    while (!eng.finished()) eng.advance();
    CHECK(eng.termination() == Termination::hit_target);
    Trajectory t = std::move(eng).take(1);
    CHECK(t.vertices.back() == Vertex{4, 1});
}
