#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lapwalk/lattice.hpp"
#include "lapwalk/stats.hpp"
#include "lapwalk/walk.hpp"

namespace lw {

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;  // names the values compared so failures are auditable
};

// Common envelope of every experiment: config echo, master seed, assertion
// outcomes. Per-case payloads live on the concrete report types. The duration
// is measured wall clock and stays out of the primary JSON (metadata sidecar)
// so identical seeds reproduce identical bytes.
struct ExperimentReport {
    std::string name;
    std::string config_echo;
    std::uint64_t master_seed = 0;
    std::vector<Assertion> assertions;
    double duration_seconds = 0.0;

    bool passed() const {
        for (const auto& a : assertions)
            if (!a.pass) return false;
        return true;
    }
};

// One (a,b) cell of the Theorem 1 sweep: does the infinity-path from the
// origin toward (a,b) on Box(R_factor*a) track (t,0) for all t <= 2a?
struct SweepCell {
    int a = 0, b = 0;
    bool straight = false;
    int deviation_step = -1;  // first t with gamma_t != (t,0); -1 when straight
    int steps = 0;            // steps taken before the cell stopped
    int tie_count = 0;
    bool error = false;
    std::string error_text;
};

struct DiagonalCase {
    int a = 0;
    bool tie_declared = false;
    int tie_size = 0;
    int refinements = 0;
};

struct Theorem1Report : ExperimentReport {
    int a_max = 0, b_min = 0, R_factor = 0;
    std::vector<SweepCell> cells;  // both signs of b, ordered (a asc, b asc)
    std::vector<DiagonalCase> diagonals;
    // Per a (index a_min..a_max): smallest |b| >= b_min whose both-sign cells
    // are straight; a itself when no tested |b| preserves the straight line.
    std::vector<int> threshold_b;
    int first_a = 0;  // a value of threshold_b[0]
    int failures_above_threshold = 0;
};

struct SweepOptions {
    int R_factor = 4;
    int threads = 1;
    std::uint64_t seed = 0x4c415057414c4bULL;  // fixed default, reproducible
};

Theorem1Report theorem1_sweep(int a_max, int b_min, const SweepOptions& opts = {});

// Empirical stand-in for Theorem 1's unspecified constant: per a, binary
// search over |b| for the smallest straight-line-preserving value, assuming
// straightness is monotone in |b| (the theorem's regime is large |b|).
struct ConstantRow {
    int a = 0;
    int threshold_b = 0;  // smallest straight |b| in [1, a-1]; a when none
    int probes = 0;
};

struct ConstantReport : ExperimentReport {
    std::vector<ConstantRow> rows;
};

ConstantReport empirical_constant(const std::vector<int>& a_list, const SweepOptions& opts = {});

// Full infinity-path on Torus(n) from the origin. Records the first turn
// (first t with a step delta different from the first step's) and optional
// warm-vs-cold solver iteration samples for the performance check.
struct StepStat {
    int step = 0;
    int warm_iterations = 0;
    int cold_iterations = -1;  // -1 when not sampled
};

struct TorusReport : ExperimentReport {
    int n = 0;
    Vertex target{};
    int first_turn = -1;  // -1: no turn (straight to the end)
    Vertex first_turn_position{};
    int path_steps = 0;
    bool self_avoiding = false;
    std::string termination;
    std::vector<StepStat> solver_samples;
    double warm_cold_ratio = 0.0;  // mean cold iters / mean warm iters, sampled steps
};

struct TorusOptions {
    std::uint64_t seed = 0x4c415057414c4bULL;
    int horizon = 0;           // 0: derive 8*n*n
    int cold_sample_every = 0;  // 0: no cold re-solves
    int cold_sample_after = 0;
};

std::pair<Trajectory, TorusReport> torus_run(int n, Vertex w, const TorusOptions& opts = {});

// Least-squares line on (log r, log value); the exponent under test.
struct ScalingPoint {
    int r = 0;
    double value = 0.0;
};

LineFit scaling_fit(const std::vector<ScalingPoint>& series);

struct ScalingReport : ExperimentReport {
    std::string which;  // "slit" or "diag"
    std::vector<ScalingPoint> series;
    LineFit fit;
};

// slit: escape_slit_prob(r, r) — the kill interval grows with r, the regime
// where the r^{-1/2} law is visible; diag: escape_diag_prob(r), law r^{-1}.
ScalingReport escape_scaling(const std::string& which, const std::vector<int>& radii);

}  // namespace lw
