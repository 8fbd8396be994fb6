#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lapwalk/harmonic.hpp"
#include "lapwalk/lattice.hpp"
#include "lapwalk/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace lw;

namespace {

// Independent dense Gaussian-elimination oracle for cross-checks: builds the
// full free-vertex system from scratch (degree * f(v) - sum of free neighbor
// values = sum of boundary neighbor values) and eliminates with partial
// pivoting. Only sane for a few hundred unknowns.
std::vector<double> dense_oracle(const DirichletProblem& p) {
    const Domain& d = p.domain();
    std::vector<int> free_of(std::size_t(d.size()), -1);
    std::vector<int> vert_of;
    for (int i = 0; i < d.size(); ++i)
        if (!p.is_boundary_index(i)) {
            free_of[std::size_t(i)] = int(vert_of.size());
            vert_of.push_back(i);
        }
    int n = int(vert_of.size());
    std::vector<double> A(std::size_t(n) * std::size_t(n), 0.0), rhs(std::size_t(n), 0.0);
    for (int k = 0; k < n; ++k) {
        Vertex v = d.vertex_at(vert_of[std::size_t(k)]);
        for (Vertex u : d.neighbor_list(v)) {
            A[std::size_t(k) * n + k] += 1.0;
            if (p.is_boundary(u))
                rhs[std::size_t(k)] += p.boundary_value(u);
            else
                A[std::size_t(k) * n + free_of[std::size_t(d.index(u))]] -= 1.0;
        }
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[std::size_t(r) * n + c]) > std::abs(A[std::size_t(piv) * n + c]))
                piv = r;
        for (int j = c; j < n; ++j) std::swap(A[std::size_t(c) * n + j], A[std::size_t(piv) * n + j]);
        std::swap(rhs[std::size_t(c)], rhs[std::size_t(piv)]);
        for (int r = c + 1; r < n; ++r) {
            double m = A[std::size_t(r) * n + c] / A[std::size_t(c) * n + c];
            if (m == 0.0) continue;
            for (int j = c; j < n; ++j) A[std::size_t(r) * n + j] -= m * A[std::size_t(c) * n + j];
            rhs[std::size_t(r)] -= m * rhs[std::size_t(c)];
        }
    }
    std::vector<double> x(std::size_t(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = rhs[std::size_t(r)];
        for (int j = r + 1; j < n; ++j) s -= A[std::size_t(r) * n + j] * x[std::size_t(j)];
        x[std::size_t(r)] = s / A[std::size_t(r) * n + r];
    }
    std::vector<double> full(std::size_t(d.size()), 0.0);
    for (int i = 0; i < d.size(); ++i)
        full[std::size_t(i)] = p.is_boundary_index(i) ? p.boundary_value(d.vertex_at(i))
                                                      : x[std::size_t(free_of[std::size_t(i)])];
    return full;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("gambler's ruin on a 1-d strip is exactly linear") {
    const int N = 20;
    Domain d = Domain::box_rect({0, 0}, {N, 0}, FramePolicy::open);
    DirichletProblem p(d, {{{0, 0}, 0.0}, {{N, 0}, 1.0}});
    HarmonicField f = solve(p, {SolveMethod::direct});
    for (int k = 0; k <= N; ++k)
        CHECK(f.at({k, 0}) == doctest::Approx(double(k) / N).epsilon(1e-10));
}

TEST_CASE("gambler's ruin embedded in a 2-d box") {
    // prescribe x/N on the whole frame; the interior solution must be x/N
    const int W = 12, H = 9;
    Domain d = Domain::box_rect({0, 0}, {W, H}, FramePolicy::open);
    std::vector<std::pair<Vertex, double>> bnd;
    for (int i = 0; i < d.size(); ++i) {
        Vertex v = d.vertex_at(i);
        if (d.on_frame(v)) bnd.push_back({v, double(v.re) / W});
    }
    DirichletProblem p(d, bnd);
    HarmonicField f = solve(p);
    for (int i = 0; i < d.size(); ++i) {
        Vertex v = d.vertex_at(i);
        CHECK(std::abs(f.at(v) - double(v.re) / W) < 1e-10);
    }
}

TEST_CASE("5x5 box, unit charge at the center, absorbing frame") {
    Domain d = Domain::box({0, 0}, 2, FramePolicy::absorb0);
    DirichletProblem p(d, {{{0, 0}, 1.0}});
    HarmonicField f = solve(p, {SolveMethod::direct});
    // by symmetry: 4a = 1 + 2b, 4b = 2a  =>  a = 1/3, b = 1/6
    CHECK(f.at({1, 0}) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(f.at({1, 1}) == doctest::Approx(1.0 / 6).epsilon(1e-12));
    CHECK(f.at({0, -1}) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(f.at({2, 2}) == 0.0);
}

TEST_CASE("direct solve matches the dense elimination oracle") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        int radius = 2 + int(rng.next_below(3));
        FramePolicy fp = trial % 3 == 0   ? FramePolicy::open
                         : trial % 3 == 1 ? FramePolicy::absorb0
                                          : FramePolicy::absorb1;
        Domain d = Domain::box({0, 0}, radius, fp);
        std::vector<std::pair<Vertex, double>> bnd;
        int pins = 1 + int(rng.next_below(4));
        for (int k = 0; k < pins; ++k) {
            Vertex v = d.vertex_at(int(rng.next_below(std::uint32_t(d.size()))));
            bnd.push_back({v, rng.next_double()});
        }
        DirichletProblem p(d, bnd);
        HarmonicField f = solve(p, {SolveMethod::direct});
        CHECK(max_diff(f.values(), dense_oracle(p)) < 1e-10);
    }
}

TEST_CASE("direct and iterative solvers agree") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        int radius = 5 + int(rng.next_below(10));
        Domain d = Domain::box({0, 0}, radius, FramePolicy::absorb0);
        Vertex w = d.vertex_at(int(rng.next_below(std::uint32_t(d.size()))));
        if (d.on_frame(w)) w = Vertex{0, 0};
        DirichletProblem p(d, {{w, 1.0}});

        SolveStats sd, si;
        HarmonicField fd = solve(p, {SolveMethod::direct}, nullptr, &sd);
        HarmonicField fi = solve(p, {SolveMethod::iterative}, nullptr, &si);
        CHECK(sd.used_direct);
        CHECK_FALSE(si.used_direct);
        CHECK(si.iterations > 0);
        CHECK(max_diff(fd.values(), fi.values()) < 1e-10);
    }
}

TEST_CASE("residual semantics: max deviation from the neighbor mean") {
    Domain d = Domain::box({0, 0}, 8, FramePolicy::absorb0);
    DirichletProblem p(d, {{{0, 0}, 1.0}});
    SolveStats st;
    HarmonicField f = solve(p, {}, nullptr, &st);
    CHECK(st.residual <= 1e-12);
    CHECK(residual(p, f) <= 1e-12);

    // perturb one free value; the reported residual must see it
    HarmonicField g = f;
    g.mutable_values()[std::size_t(d.index({3, 2}))] += 1e-3;
    CHECK(residual(p, g) > 1e-4);
}

TEST_CASE("iteration budget failure carries the achieved residual") {
    Domain d = Domain::box({0, 0}, 12, FramePolicy::absorb0);
    DirichletProblem p(d, {{{0, 0}, 1.0}});
    SolverConfig cfg{SolveMethod::iterative, 1e-12, 2};
    CHECK_THROWS_AS(solve(p, cfg), IterationBudgetExceeded);
    try {
        solve(p, cfg);
    } catch (const IterationBudgetExceeded& e) {
        CHECK(e.achieved_residual > 0.0);
    }
}

TEST_CASE("warm start from a pinned previous solution converges faster") {
    Domain d = Domain::box({0, 0}, 30, FramePolicy::absorb0);
    DirichletProblem p(d, {{{25, 0}, 1.0}});
    SolverConfig cfg{SolveMethod::iterative, 1e-12, 0};
    SolveStats cold0;
    HarmonicField f = solve(p, cfg, nullptr, &cold0);

    auto [p2, guess] = pin_vertex(p, f, {1, 0}, 0.0);
    SolveStats warm, cold;
    HarmonicField fw = solve(p2, cfg, &guess, &warm);
    HarmonicField fc = solve(p2, cfg, nullptr, &cold);
    CHECK(warm.iterations < cold.iterations);
    CHECK(max_diff(fw.values(), fc.values()) < 1e-9);
    CHECK(fw.at({1, 0}) == 0.0);
}

TEST_CASE("pin moves a vertex to the boundary") {
    Domain d = Domain::box({0, 0}, 3, FramePolicy::absorb0);
    DirichletProblem p(d, {{{0, 0}, 1.0}});
    int before = p.free_count();
    p.pin({1, 1}, 0.0);
    CHECK(p.free_count() == before - 1);
    CHECK(p.is_boundary({1, 1}));
    CHECK(p.boundary_value({1, 1}) == 0.0);
    HarmonicField f = solve(p);
    CHECK(f.at({1, 1}) == 0.0);
}

TEST_CASE("later boundary entries override earlier ones") {
    Domain d = Domain::box({0, 0}, 3, FramePolicy::absorb1);
    // the explicit 0 at a frame vertex must win over the frame's 1
    DirichletProblem p(d, {{{3, 0}, 0.0}});
    CHECK(p.boundary_value({3, 0}) == 0.0);
    DirichletProblem q(d, {{{1, 0}, 0.3}, {{1, 0}, 0.7}});
    CHECK(q.boundary_value({1, 0}) == 0.7);
}

TEST_CASE("every vertex prescribed leaves nothing to solve") {
    Domain d = Domain::box({0, 0}, 1, FramePolicy::absorb0);
    DirichletProblem p(d, {{{0, 0}, 0.5}});
    CHECK(p.free_count() == 0);
    HarmonicField f = solve(p);
    CHECK(f.at({0, 0}) == 0.5);
    CHECK(f.at({1, 0}) == 0.0);
}

TEST_CASE("unconstrained problem is rejected") {
    Domain d = Domain::box({0, 0}, 2, FramePolicy::open);
    DirichletProblem p(d, {});
    CHECK_THROWS_AS(solve(p), IllPosedProblem);
}
