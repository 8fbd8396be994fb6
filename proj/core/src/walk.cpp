#include "lapwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace lw {

namespace {

constexpr double kZeroCutoff = 1e-9;  // f at or below this (vs boundary scale 1) counts as 0

double alpha_power(double f, double alpha) {
    if (f <= kZeroCutoff) return 0.0;  // 0^alpha = 0 for every alpha
    if (alpha == 0.0) return 1.0;      // v^0 = 1 for v > 0
    return std::pow(f, alpha);
}

void check_walk_inputs(const std::vector<Vertex>& path, Vertex w, const Domain& d) {
    if (path.empty()) throw std::invalid_argument("walk step: empty path");
    for (Vertex v : path) {
        if (!d.contains(d.canon(v))) throw std::domain_error("walk step: path leaves domain");
        if (d.canon(v) == d.canon(w)) throw std::invalid_argument("walk step: target already on path");
    }
}

DirichletProblem path_problem(const std::vector<Vertex>& path, Vertex w, const Domain& d) {
    std::vector<std::pair<Vertex, double>> boundary;
    boundary.reserve(path.size() + 1);
    for (Vertex v : path) boundary.emplace_back(v, 0.0);
    boundary.emplace_back(w, 1.0);
    return DirichletProblem(d, boundary);
}

}  // namespace

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::hit_target: return "hit_target";
        case Termination::trapped: return "trapped";
        case Termination::frame_hit: return "frame_hit";
        case Termination::horizon_reached: return "horizon_reached";
    }
    return "?";
}

bool Trajectory::self_avoiding() const {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(vertices.size() * 2);
    for (Vertex v : vertices) {
        std::uint64_t key = (std::uint64_t(std::uint32_t(v.re)) << 32) | std::uint32_t(v.im);
        if (!seen.insert(key).second) return false;
    }
    return true;
}

StepDistribution step_distribution(const std::vector<Vertex>& path, Vertex w, const Domain& d,
                                   double alpha, const SolverConfig& cfg) {
    check_walk_inputs(path, w, d);
    DirichletProblem p = path_problem(path, w, d);
    HarmonicField f = solve(p, cfg);
    Vertex cur = d.canon(path.back());

    StepDistribution out;
    double total = 0.0;
    for (Vertex u : d.neighbor_list(cur)) {
        double weight = alpha_power(f.at(u), alpha);
        out.probabilities.emplace_back(u, weight);
        total += weight;
    }
    if (total <= 0.0) {
        out.trapped = true;
        for (auto& [u, pr] : out.probabilities) pr = 0.0;
        return out;
    }
    for (auto& [u, pr] : out.probabilities) pr /= total;
    return out;
}

namespace detail {

namespace {

struct InfinityDecision {
    bool trapped = false;
    int choice = -1;   // index into the neighbor list
    int tie_size = 1;
    int refinements = 0;
};

// Argmax with adaptive near-tie refinement. `resolve` re-solves the field at
// a tighter tolerance and must refresh `values`.
template <typename Resolve>
InfinityDecision decide_infinity(std::vector<double>& values, const TieRule& tie,
                                 Resolve&& resolve, SplitMix64& rng) {
    InfinityDecision dec;
    auto near_tie = [&]() {
        double best = *std::max_element(values.begin(), values.end());
        if (best <= tie.rel_epsilon) return false;  // trapped, not a tie
        int close = 0;
        for (double v : values)
            if (best - v <= tie.rel_epsilon * best) ++close;
        return close > 1;
    };
    while (near_tie() && dec.refinements < tie.max_refinements) {
        ++dec.refinements;
        resolve(dec.refinements);
    }
    double best = *std::max_element(values.begin(), values.end());
    if (best <= tie.rel_epsilon) {
        dec.trapped = true;
        return dec;
    }
    std::vector<int> tied;
    for (int i = 0; i < int(values.size()); ++i)
        if (best - values[std::size_t(i)] <= tie.rel_epsilon * best) tied.push_back(i);
    dec.tie_size = int(tied.size());
    dec.choice = tied.size() == 1
                     ? tied[0]
                     : tied[std::size_t(rng.next_below(std::uint32_t(tied.size())))];
    return dec;
}

}  // namespace

WalkEngine::WalkEngine(Vertex s, Vertex w, const Domain& d, AlphaSpec alpha, const TieRule& tie,
                       const SolverConfig& cfg, std::uint64_t seed)
    : domain_(d),
      target_(d.canon(w)),
      alpha_(alpha),
      tie_(tie),
      cfg_(cfg),
      rng_(SplitMix64(seed)),
      problem_(path_problem({d.canon(s)}, d.canon(w), d)),
      path_{d.canon(s)} {
    if (d.canon(s) == d.canon(w)) throw std::invalid_argument("run_walk: start equals target");
    if (cfg.method == SolveMethod::automatic && problem_.free_count() >= 2000) {
        pinned_ = std::make_unique<detail::IncrementalPinSolver>(problem_);
        field_ = pinned_->full_field();
        has_field_ = true;
    }
}

bool WalkEngine::advance() {
    if (finished_) return false;
    Vertex cur = path_.back();
    std::vector<Vertex> nbs = domain_.neighbor_list(cur);
    std::vector<double> values(nbs.size());
    if (pinned_) {
        for (std::size_t i = 0; i < nbs.size(); ++i) values[i] = pinned_->value_at(nbs[i]);
        warm_iters_last_ = 1;  // one back-substitution per step
    } else {
        SolveStats stats;
        field_ = solve(problem_, cfg_, has_field_ ? &field_ : nullptr, &stats);
        warm_iters_last_ = stats.iterations;
        has_field_ = true;
        for (std::size_t i = 0; i < nbs.size(); ++i) values[i] = field_.at(nbs[i]);
    }

    Vertex next{};
    if (alpha_.infinite) {
        auto resolve = [&](int k) {
            if (pinned_) return;  // values are already direct-solver exact
            SolverConfig tight = cfg_;
            tight.rel_tolerance = std::max(cfg_.rel_tolerance * std::pow(tie_.refine_factor, k),
                                           5e-15);
            field_ = solve(problem_, tight, &field_, nullptr);
            for (std::size_t i = 0; i < nbs.size(); ++i) values[i] = field_.at(nbs[i]);
        };
        InfinityDecision dec = decide_infinity(values, tie_, resolve, rng_);
        if (dec.trapped) {
            finish(Termination::trapped);
            return false;
        }
        if (dec.tie_size > 1) ties_.push_back({int(path_.size()), dec.tie_size});
        next = nbs[std::size_t(dec.choice)];
    } else {
        double total = 0.0;
        std::vector<double> weights(nbs.size());
        for (std::size_t i = 0; i < nbs.size(); ++i) {
            weights[i] = alpha_power(values[i], alpha_.alpha);
            total += weights[i];
        }
        if (total <= 0.0) {
            finish(Termination::trapped);
            return false;
        }
        double u = rng_.next_double() * total;  // exactly one draw per step
        std::size_t pick = weights.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        // skip zero-weight cells the accumulator may land on via rounding
        while (weights[pick] == 0.0 && pick > 0) --pick;
        next = nbs[pick];
    }

    path_.push_back(next);
    if (next == target_) {
        finish(Termination::hit_target);
        return false;
    }
    if (domain_.on_frame(next) && domain_.frame_policy() != FramePolicy::open) {
        finish(Termination::frame_hit);
        return false;
    }
    if (problem_.is_boundary(next)) {
        // stepped into an absorbing overlay vertex: absorbed away from the target
        finish(Termination::trapped);
        return false;
    }
    if (pinned_) {
        problem_.pin(next, 0.0);
        if (pinned_->pin_count() < pinned_->pin_capacity()) {
            pinned_->add_pin(next, 0.0);
        } else {
            // Green storage is full: drain into the classic warm-start path
            field_ = pinned_->full_field();
            field_.mutable_values()[std::size_t(domain_.index(next))] = 0.0;
            pinned_.reset();
        }
        return true;
    }
    auto [p2, warm] = pin_vertex(problem_, field_, next, 0.0);
    problem_ = std::move(p2);
    field_ = std::move(warm);
    return true;
}

Trajectory WalkEngine::take(std::uint64_t seed) && {
    Trajectory t;
    t.vertices = std::move(path_);
    t.termination = termination_;
    t.steps = int(t.vertices.size()) - 1;
    t.seed = seed;
    t.ties = std::move(ties_);
    return t;
}

}  // namespace detail

InfinityStep step_infinity(const std::vector<Vertex>& path, Vertex w, const Domain& d,
                           const TieRule& tie, const SolverConfig& cfg, SplitMix64& rng) {
    check_walk_inputs(path, w, d);
    DirichletProblem p = path_problem(path, w, d);
    HarmonicField f = solve(p, cfg);
    Vertex cur = d.canon(path.back());
    std::vector<Vertex> nbs = d.neighbor_list(cur);
    std::vector<double> values(nbs.size());
    for (std::size_t i = 0; i < nbs.size(); ++i) values[i] = f.at(nbs[i]);

    auto resolve = [&](int k) {
        SolverConfig tight = cfg;
        tight.rel_tolerance =
            std::max(cfg.rel_tolerance * std::pow(tie.refine_factor, k), 5e-15);
        f = solve(p, tight, &f, nullptr);
        for (std::size_t i = 0; i < nbs.size(); ++i) values[i] = f.at(nbs[i]);
    };
    detail::InfinityDecision dec; // declared in anonymous namespace above
    dec = detail::decide_infinity(values, tie, resolve, rng);

    InfinityStep out;
    out.trapped = dec.trapped;
    out.refinements = dec.refinements;
    if (!dec.trapped) {
        out.next = nbs[std::size_t(dec.choice)];
        out.tie_size = dec.tie_size;
    }
    return out;
}

Trajectory run_walk(Vertex s, Vertex w, const Domain& d, AlphaSpec alpha, const TieRule& tie,
                    const SolverConfig& cfg, std::uint64_t seed, int horizon) {
    detail::WalkEngine engine(s, w, d, alpha, tie, cfg, seed);
    for (int t = 0; t < horizon && engine.advance(); ++t) {
    }
    return std::move(engine).take(seed);
}

}  // namespace lw
