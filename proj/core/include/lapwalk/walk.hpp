#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lapwalk/harmonic.hpp"
#include "lapwalk/lattice.hpp"
#include "lapwalk/rng.hpp"

namespace lw {

// Exponent of the Laplacian-alpha walk. Conventions: 0^alpha = 0 for every
// alpha (including alpha <= 0), v^0 = 1 for v > 0. Negative alpha is legal
// but experimental.
struct AlphaSpec {
    bool infinite = false;
    double alpha = 1.0;

    static AlphaSpec infinity() { return {true, 0.0}; }
    static AlphaSpec finite(double a) { return {false, a}; }
};

// Near-ties are declared real only after the solver is re-run tighter up to
// max_refinements times; genuine symmetry ties survive, spurious ones split.
struct TieRule {
    double rel_epsilon = 1e-9;
    double refine_factor = 1e-3;
    int max_refinements = 3;
};

enum class Termination { hit_target, trapped, frame_hit, horizon_reached };

const char* termination_name(Termination t);

struct TieEvent {
    int step = 0;  // index of the vertex chosen by this tie-break
    int size = 0;  // number of tied candidates
};

struct Trajectory {
    std::vector<Vertex> vertices;
    Termination termination = Termination::horizon_reached;
    int steps = 0;
    std::uint64_t seed = 0;
    std::vector<TieEvent> ties;

    bool self_avoiding() const;
};

// One-step law of the finite-alpha walk from the last vertex of `path`:
// probabilities over its neighbors proportional to f^alpha, where f solves
// the Dirichlet problem with boundary 1 at w and 0 on the whole path.
struct StepDistribution {
    bool trapped = false;
    std::vector<std::pair<Vertex, double>> probabilities;  // zero entries included
};
StepDistribution step_distribution(const std::vector<Vertex>& path, Vertex w, const Domain& d,
                                   double alpha, const SolverConfig& cfg = {});

struct InfinityStep {
    bool trapped = false;
    Vertex next{};
    int tie_size = 1;      // >1 when the choice came from a declared tie
    int refinements = 0;   // tighter re-solves spent on near-tie separation
};
InfinityStep step_infinity(const std::vector<Vertex>& path, Vertex w, const Domain& d,
                           const TieRule& tie, const SolverConfig& cfg, SplitMix64& rng);

// Iterate the walk from s toward w until hit_target / trapped / frame_hit /
// horizon. Incremental: one Dirichlet solve per step, warm-started from the
// previous field with the new vertex pinned to 0.
Trajectory run_walk(Vertex s, Vertex w, const Domain& d, AlphaSpec alpha, const TieRule& tie,
                    const SolverConfig& cfg, std::uint64_t seed, int horizon);

namespace detail {

// Step-by-step driver behind run_walk; experiments use it to stop sweeps at
// the first deviation instead of paying for the full horizon.
class WalkEngine {
  public:
    WalkEngine(Vertex s, Vertex w, const Domain& d, AlphaSpec alpha, const TieRule& tie,
               const SolverConfig& cfg, std::uint64_t seed);

    // Advances one step; false when the walk has terminated.
    bool advance();
    bool finished() const { return finished_; }
    Termination termination() const { return termination_; }
    const std::vector<Vertex>& path() const { return path_; }
    const std::vector<TieEvent>& ties() const { return ties_; }
    const HarmonicField& field() const { return field_; }
    const DirichletProblem& problem() const { return problem_; }
    int warm_iterations_last() const { return warm_iters_last_; }
    Trajectory take(std::uint64_t seed) &&;

  private:
    Domain domain_;
    Vertex target_;
    AlphaSpec alpha_;
    TieRule tie_;
    SolverConfig cfg_;
    SplitMix64 rng_;
    DirichletProblem problem_;
    // Large automatic-mode problems run on the incremental pin solver (one
    // back-substitution per step, reported as a single iteration); it drains
    // into the warm-start path when its pin capacity is exhausted.
    std::unique_ptr<detail::IncrementalPinSolver> pinned_;
    HarmonicField field_;
    std::vector<Vertex> path_;
    std::vector<TieEvent> ties_;
    bool has_field_ = false;
    bool finished_ = false;
    Termination termination_ = Termination::horizon_reached;
    int warm_iters_last_ = 0;

    void finish(Termination t) {
        finished_ = true;
        termination_ = t;
    }
};

}  // namespace detail

}  // namespace lw
