#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lapwalk/lattice.hpp"
#include "lapwalk/rng.hpp"
#include "lapwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace lw;

TEST_CASE("vertex arithmetic and norms") {
    Vertex a{3, -2}, b{1, 5};
    CHECK(a + b == Vertex{4, 3});
    CHECK(a - b == Vertex{2, -7});
    CHECK(cheb_norm(a) == 3);
    CHECK(cheb_norm(Vertex{-1, 7}) == 7);
    CHECK(l2_norm(Vertex{3, 4}) == doctest::Approx(5.0));
    CHECK(kSteps[0] == Vertex{1, 0});
    CHECK(kSteps[1] == Vertex{0, 1});
    CHECK(kSteps[2] == Vertex{-1, 0});
    CHECK(kSteps[3] == Vertex{0, -1});
}

TEST_CASE("box membership, frame, indexing") {
    Domain d = Domain::box({0, 0}, 3, FramePolicy::absorb0);
    CHECK(d.size() == 49);
    CHECK(d.contains({3, -3}));
    CHECK_FALSE(d.contains({4, 0}));
    CHECK(d.on_frame({3, 1}));
    CHECK(d.on_frame({-2, -3}));
    CHECK_FALSE(d.on_frame({2, 2}));

    // index/vertex_at round-trip over the whole box
    for (int i = 0; i < d.size(); ++i) CHECK(d.index(d.vertex_at(i)) == i);

    CHECK_THROWS_AS((void)d.index({5, 0}), std::domain_error);
}

TEST_CASE("box neighbors respect the frame policy") {
    Domain open = Domain::box({0, 0}, 2, FramePolicy::open);
    std::array<Vertex, 4> buf;
    // corner of an open box keeps only in-box neighbors (grid graph)
    int n = open.neighbors({2, 2}, buf);
    CHECK(n == 2);
    std::set<Vertex> got(buf.begin(), buf.begin() + n);
    CHECK(got == std::set<Vertex>{{1, 2}, {2, 1}});

    // interior vertex has all four, in fixed step order
    n = open.neighbors({0, 0}, buf);
    CHECK(n == 4);
    CHECK(buf[0] == Vertex{1, 0});
    CHECK(buf[1] == Vertex{0, 1});
    CHECK(buf[2] == Vertex{-1, 0});
    CHECK(buf[3] == Vertex{0, -1});
}

TEST_CASE("torus wraps coordinates and step deltas") {
    Domain t = Domain::torus(10);
    CHECK(t.size() == 100);
    CHECK(t.canon({-1, 12}) == Vertex{9, 2});
    CHECK(t.contains({-100, 100}));
    CHECK_FALSE(t.on_frame({0, 0}));

    std::array<Vertex, 4> buf;
    int n = t.neighbors({0, 0}, buf);
    CHECK(n == 4);
    CHECK(buf[2] == Vertex{9, 0});  // -1 wraps

    // wrap step reads as a unit delta, not a jump across the square
    CHECK(t.step_delta({9, 0}, {0, 0}) == Vertex{1, 0});
    CHECK(t.step_delta({0, 0}, {9, 0}) == Vertex{-1, 0});
    CHECK(t.step_delta({4, 4}, {4, 5}) == Vertex{0, 1});
}

TEST_CASE("describe strings name the domain") {
    CHECK(Domain::torus(20).describe() == "torus:20");
    std::string s = Domain::box({0, 0}, 4, FramePolicy::absorb1).describe();
    CHECK(s.find("box") != std::string::npos);
    CHECK(s.find("absorb1") != std::string::npos);
}

TEST_CASE("interval and diagonal kill sets") {
    auto I = build_interval(2);
    CHECK(I.size() == 3);
    CHECK(std::find(I.begin(), I.end(), Vertex{0, 0}) != I.end());
    CHECK(std::find(I.begin(), I.end(), Vertex{-2, 0}) != I.end());
    CHECK(std::find(I.begin(), I.end(), Vertex{1, 0}) == I.end());

    auto D = build_diagonal(3);
    CHECK(D.size() == 7);
    CHECK(std::find(D.begin(), D.end(), Vertex{-3, -3}) != D.end());

    auto Dstar = build_diagonal_star(2);
    CHECK(std::find(Dstar.begin(), Dstar.end(), Vertex{2, -2}) != Dstar.end());

    CHECK_THROWS_AS(build_interval(0), std::invalid_argument);
}

TEST_CASE("isometries act as advertised") {
    Vertex v{3, 1};
    CHECK(Isometry::reflect_D()(v) == Vertex{1, 3});
    CHECK(Isometry::reflect_Dstar()(v) == Vertex{-1, -3});
    CHECK(Isometry::reflect_real_axis()(v) == Vertex{3, -1});
    CHECK(Isometry::reflect_imag_axis()(v) == Vertex{-3, 1});
    CHECK(Isometry::translate({2, -2})(v) == Vertex{5, -1});
    CHECK(apply_isometry(Isometry::reflect_D(), Vertex{0, 7}) == Vertex{7, 0});

    // reflections are involutions
    for (auto iso : {Isometry::reflect_D(), Isometry::reflect_Dstar(),
                     Isometry::reflect_real_axis(), Isometry::reflect_imag_axis()})
        CHECK(iso(iso(v)) == v);
}

TEST_CASE("overlay validation") {
    Domain d = Domain::box({0, 0}, 2);
    d.add_overlay({1, 1}, 0.0);
    CHECK(d.overlay().size() == 1);
    CHECK_THROWS_AS(d.add_overlay({9, 9}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(d.add_overlay({0, 0}, 1.5), std::invalid_argument);
}

TEST_CASE("splitmix64 reproduces and streams decorrelate") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());

    SplitMix64 s0 = SplitMix64::stream(7, 0);
    SplitMix64 s1 = SplitMix64::stream(7, 1);
    SplitMix64 s0_again = SplitMix64::stream(7, 0);
    CHECK(s0.next() == s0_again.next());
    CHECK(s0.next() != s1.next());

    SplitMix64 g(123);
    for (int i = 0; i < 1000; ++i) {
        double u = g.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(g.next_below(4) < 4);
    }
    CHECK(g.next_below(1) == 0);
}

TEST_CASE("next_below is close to uniform") {
    SplitMix64 g(2024);
    int counts[4] = {0, 0, 0, 0};
    const int n = 40000;
    for (int i = 0; i < n; ++i) ++counts[g.next_below(4)];
    for (int c : counts) CHECK(std::abs(c - n / 4) < 5 * std::sqrt(n * 0.25 * 0.75));
}

TEST_CASE("chi-square p-values match table anchors") {
    // classical 5% critical values
    CHECK(chi_square_p_value(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(chi_square_p_value(11.070, 5) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(chi_square_p_value(0.0, 3) == doctest::Approx(1.0));
    CHECK(chi_square_p_value(1000.0, 3) < 1e-12);
    CHECK(chi_square_p_value(5.0, 0) == doctest::Approx(1.0));
}

TEST_CASE("line fit recovers an exact line") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 10; ++i) pts.emplace_back(i, 3.5 - 2.0 * i);
    LineFit f = fit_line(pts);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
}
