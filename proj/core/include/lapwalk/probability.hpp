#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lapwalk/harmonic.hpp"
#include "lapwalk/lattice.hpp"
#include "lapwalk/rng.hpp"

namespace lw {

// Rigorous truncation bracket for an infinite-lattice hitting probability:
// lower = frame absorbing at 0 (escape counts as failure), upper = frame at 1
// (escape counts as success). The true Z^2 value lies between.
struct ProbabilityBracket {
    double lower = 0.0;
    double upper = 1.0;
    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
};

struct HitQuery {
    Vertex start{};
    Vertex target{};
    std::vector<Vertex> forbidden;
    int radius = 32;
};

ProbabilityBracket hit_prob_bracket(const HitQuery& q);

// Shares one factorization of the kill-set Laplacian on Box(R) across many
// targets: each target costs a single back-substitution.
namespace detail {
class TruncationKernelImpl;
class TruncationKernel {
  public:
    TruncationKernel(int R, std::vector<Vertex> kill);
    ~TruncationKernel();
    TruncationKernel(TruncationKernel&&) noexcept;
    TruncationKernel& operator=(TruncationKernel&&) noexcept;

    int radius() const;
    bool is_free(Vertex v) const;
    // Bracket of Pr_z[T(w) < T(kill)] for a free target w, evaluated at z.
    ProbabilityBracket bracket(Vertex w, Vertex z) const;
    // All four first-step brackets at the neighbors of the origin.
    std::array<ProbabilityBracket, 4> origin_neighbor_brackets(Vertex w) const;

  private:
    std::unique_ptr<TruncationKernelImpl> impl_;
};
}  // namespace detail

// First-step certificate at the origin with kill set {0}: brackets of
// Pr_e[T(w) < T(0)] for e in {+1, +i, -1, -i}. `separated` certifies the
// expected argmax strictly at this R; the diagonal case instead requires the
// e=1 and e=i brackets to overlap and both to dominate e=-1 and e=-i.
struct FirstStepResult {
    std::array<ProbabilityBracket, 4> brackets;  // fixed order +1, +i, -1, -i
    bool diagonal_case = false;
    bool separated = false;
    Vertex midpoint_argmax{};  // diagnostic only, not a certificate
};

class Lemma3Batch {
  public:
    explicit Lemma3Batch(int R);
    FirstStepResult run(Vertex w) const;
    int radius() const;

  private:
    detail::TruncationKernel kernel_;
};

FirstStepResult lemma3_first_step(Vertex w, int R);

// Bracketed version of Pr_1[T(w) < T(I)] vs Pr_i[T(w) < T(I)].
struct RatioResult {
    ProbabilityBracket pr_1, pr_i;
    double ratio_lower = 0.0;     // lower(Pr_1) / upper(Pr_i)
    double ratio_upper = 0.0;     // upper(Pr_1) / lower(Pr_i) (inf if degenerate)
    double midpoint_ratio = 0.0;  // diagnostic only
};

class Lemma2Batch {
  public:
    Lemma2Batch(int x, int R);
    RatioResult run(Vertex w) const;

  private:
    detail::TruncationKernel kernel_;
    int x_;
};

RatioResult lemma2_ratio(Vertex w, int x, int R);

// Pr_i[T(w) < T(I u D)] <= C |w|^{-1/2} Pr_i[T(w) < T(I)], w on the diagonal.
struct Lemma1Result {
    ProbabilityBracket numerator, denominator;
    double ratio = 0.0;       // upper(num) / lower(den)
    double product = 0.0;     // ratio * sqrt(|w|)
    double kill_ratio = 0.0;  // lower(num) / lower(den), frame-killed diagnostic
};

Lemma1Result lemma1_ratio(Vertex w, int x, int R);

// Pr_i[T(0,r) < T(I), Re(X) >= 0 at exit]: boundary 1 on exit vertices of the
// radius-r disc with Re >= 0, 0 on exit vertices with Re < 0 and on I.
// Kill values win where the exit ring meets the kill set.
double escape_slit_prob(int r, int x);

// Pr_i[T(0,r) < T(D)]: boundary 1 on the radius-r exit, 0 on the diagonal.
double escape_diag_prob(int r);

// Exact time-bounded avoidance of I = [-x,0]: kill-on-landing DP, mass
// confined to the radius-t box around the start.
class AvoidanceTable {
  public:
    AvoidanceTable(Vertex y, int t, int x);

    int horizon() const { return t_; }
    int interval_length() const { return x_; }
    double mass_at(Vertex v, int time) const;
    double survival(int time) const;   // total surviving mass
    double absorbed(int time) const;   // cumulative absorbed mass
    double survival_probability() const { return survival(t_); }

  private:
    int t_, x_, radius_;
    Vertex origin_;
    std::vector<std::vector<double>> mass_;  // per time, flat over the DP box
    std::vector<double> absorbed_;
    int flat(Vertex v) const;
};

AvoidanceTable avoidance_table(Vertex y, int t, int x);
double avoidance_probability(Vertex y, int t, int x);

// Exact integer form: surviving paths count / 4^t (lossless through t = 26).
struct ExactAvoidance {
    std::uint64_t count = 0;
    int t = 0;
    double value() const;
};
ExactAvoidance avoidance_probability_exact(Vertex y, int t, int x);

// Mirror coupling of Lemma 2: X is SRW from (1,0), Y_s = reflect_D(X_s)
// until tau = T(D), equal afterwards.
struct StopSet {
    std::string name;
    std::vector<Vertex> members;
};

struct HitTimes {
    std::string name;
    int x_hit = -1;
    int y_hit = -1;
};

struct CoupledPair {
    std::vector<Vertex> X, Y;
    int tau = -1;  // first index with X on D, -1 if not within horizon
    std::vector<HitTimes> hits;

    bool invariants_ok() const;  // Y = reflect_D(X) before tau, Y = X from tau on
};

CoupledPair sample_coupled_pair(SplitMix64& rng, int horizon,
                                const std::vector<StopSet>& stop_sets = {});

}  // namespace lw
