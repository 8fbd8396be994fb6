#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lapwalk/lattice.hpp"

namespace lw {

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllPosedProblem : SolveError {
    using SolveError::SolveError;
};
struct IterationBudgetExceeded : SolveError {
    IterationBudgetExceeded(const std::string& what, double achieved)
        : SolveError(what), achieved_residual(achieved) {}
    double achieved_residual;
};

enum class SolveMethod { automatic, direct, iterative };

struct SolverConfig {
    SolveMethod method = SolveMethod::automatic;
    double rel_tolerance = 1e-12;  // bounds the harmonic residual (boundary scale is 1)
    int max_iterations = 0;        // 0 = derive from problem size
};

struct SolveStats {
    int iterations = 0;      // 0 for direct solves
    double residual = 0.0;   // max over free v of |f(v) - mean over neighbors|
    bool used_direct = false;
};

// Values of the Dirichlet solution on every vertex of the domain,
// indexed by Domain::index. Immutable once returned by solve().
class HarmonicField {
  public:
    HarmonicField() = default;
    HarmonicField(Domain d, std::vector<double> values)
        : domain_(std::move(d)), values_(std::move(values)) {}

    double at(Vertex v) const { return values_[std::size_t(domain_.index(v))]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    const Domain& domain() const { return domain_; }
    bool empty() const { return values_.empty(); }

  private:
    Domain domain_;
    std::vector<double> values_;
};

// The discrete Dirichlet problem: prescribed values on a boundary set
// (target 1, forbidden 0, frame per policy, plus the domain overlay),
// harmonic everywhere else.
class DirichletProblem {
  public:
    DirichletProblem(Domain d, const std::vector<std::pair<Vertex, double>>& boundary);

    const Domain& domain() const { return domain_; }
    int free_count() const { return free_count_; }
    bool is_boundary(Vertex v) const { return boundary_mask_[std::size_t(domain_.index(v))] != 0; }
    bool is_boundary_index(int idx) const { return boundary_mask_[std::size_t(idx)] != 0; }
    double boundary_value(Vertex v) const;
    const std::vector<std::uint8_t>& boundary_mask() const { return boundary_mask_; }
    const std::vector<double>& boundary_values() const { return boundary_values_; }

    // Move a free vertex to the boundary (the walk pinning its last step).
    void pin(Vertex v, double value);

  private:
    Domain domain_;
    std::vector<std::uint8_t> boundary_mask_;  // per domain index
    std::vector<double> boundary_values_;      // per domain index, 0 where free
    int free_count_ = 0;
};

// Solve to cfg.rel_tolerance; direct below 2,000 free vertices under
// `automatic`, warm-startable diagonally-preconditioned CG above.
HarmonicField solve(const DirichletProblem& p, const SolverConfig& cfg = {},
                    const HarmonicField* warm_start = nullptr, SolveStats* stats = nullptr);

// Pin v to `value` and hand back the updated problem plus a warm-start field
// (the previous solution with the one entry clamped).
std::pair<DirichletProblem, HarmonicField> pin_vertex(const DirichletProblem& p,
                                                      const HarmonicField& f, Vertex v,
                                                      double value);

// max over free v of |f(v) - mean over neighbors(v) of f|.
double residual(const DirichletProblem& p, const HarmonicField& f);

namespace detail {

// Walk-engine workhorse for large domains: factor the base problem once,
// then absorb each newly pinned vertex as a rank-one update through the
// stored Green columns. One back-substitution per pin, values exact to
// machine precision; Green storage grows with the pin count, so callers
// fall back to plain solves once pin_count() reaches pin_capacity().
class IncrementalPinSolver {
  public:
    explicit IncrementalPinSolver(const DirichletProblem& base);
    ~IncrementalPinSolver();
    IncrementalPinSolver(IncrementalPinSolver&&) noexcept;
    IncrementalPinSolver& operator=(IncrementalPinSolver&&) noexcept;

    void add_pin(Vertex v, double value);
    double value_at(Vertex v) const;
    HarmonicField full_field() const;
    int pin_count() const;
    int pin_capacity() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace detail

}  // namespace lw
