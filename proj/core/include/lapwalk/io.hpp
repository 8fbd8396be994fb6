#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lapwalk/experiments.hpp"
#include "lapwalk/harmonic.hpp"
#include "lapwalk/lerw.hpp"
#include "lapwalk/probability.hpp"
#include "lapwalk/walk.hpp"

namespace lw {

// %.17g: value round-trips to the same double.
std::string format_double(double v);

// Primary JSON payloads are deterministic functions of their inputs; wall
// clock and timestamps go to the metadata sidecar only.
std::string trajectory_json(const Trajectory& t, const Domain& d, const std::string& config_echo);
std::string bracket_json(const ProbabilityBracket& b, const HitQuery& q,
                         const std::string& config_echo, std::uint64_t seed, double tolerance);
std::string distribution_json(const PathDistribution& p);
std::string chi_square_json(const ChiSquare& c, const PathDistribution& expected,
                            const std::vector<long long>& observed,
                            const std::string& config_echo, std::uint64_t seed);
std::string report_json(const Theorem1Report& r);
std::string report_json(const ConstantReport& r);
std::string report_json(const TorusReport& r);
std::string report_json(const ScalingReport& r);
std::string avoidance_json(const AvoidanceTable& p1, const AvoidanceTable& pi,
                           const std::string& config_echo);
std::string meta_sidecar_json(const std::string& command_line, double duration_seconds);

std::string scaling_csv(const std::vector<ScalingPoint>& series);

struct SvgOptions {
    int cell = 8;          // pixels per lattice unit
    bool heatmap = false;  // grayscale harmonic field under the path
};

// Figure-1 style: the path as a polyline over the domain, start and target
// marked; torus wrap steps break the polyline instead of crossing the board.
std::string trajectory_svg(const Trajectory& t, const Domain& d,
                           const HarmonicField* field = nullptr, const SvgOptions& opts = {});

// Binary PGM (P5) heatmap of a harmonic field, 0..255 grayscale.
std::string field_pgm(const HarmonicField& f);

// re,im,f rows in the PGM's row-major order.
std::string field_csv(const HarmonicField& f);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lw
