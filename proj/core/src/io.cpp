#include "lapwalk/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace lw {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

ordered_json vertex_json(Vertex v) { return ordered_json::array({v.re, v.im}); }

ordered_json vertices_json(const std::vector<Vertex>& vs) {
    ordered_json arr = ordered_json::array();
    for (Vertex v : vs) arr.push_back(vertex_json(v));
    return arr;
}

ordered_json assertions_json(const std::vector<Assertion>& as) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : as)
        arr.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    return arr;
}

ordered_json envelope(const ExperimentReport& r) {
    ordered_json j;
    j["name"] = r.name;
    j["config"] = r.config_echo;
    j["seed"] = r.master_seed;
    j["assertions"] = assertions_json(r.assertions);
    j["pass"] = r.passed();
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string trajectory_json(const Trajectory& t, const Domain& d,
                            const std::string& config_echo) {
    ordered_json j;
    j["config"] = config_echo;
    j["seed"] = t.seed;
    j["domain"] = d.describe();
    j["termination"] = termination_name(t.termination);
    j["steps"] = t.steps;
    ordered_json ties = ordered_json::array();
    for (const auto& e : t.ties) ties.push_back({{"step", e.step}, {"size", e.size}});
    j["ties"] = ties;
    j["vertices"] = vertices_json(t.vertices);
    return dump(j);
}

std::string bracket_json(const ProbabilityBracket& b, const HitQuery& q,
                         const std::string& config_echo, std::uint64_t seed, double tolerance) {
    ordered_json j;
    j["config"] = config_echo;
    j["seed"] = seed;
    j["query"] = {{"start", vertex_json(q.start)},
                  {"target", vertex_json(q.target)},
                  {"forbidden", vertices_json(q.forbidden)},
                  {"radius", q.radius}};
    j["bracket"] = {{"lower", b.lower}, {"upper", b.upper}, {"width", b.width()}};
    j["tolerance"] = tolerance;
    return dump(j);
}

std::string distribution_json(const PathDistribution& p) {
    ordered_json arr = ordered_json::array();
    for (std::size_t k = 0; k < p.paths.size(); ++k)
        arr.push_back({{"path", vertices_json(p.paths[k])}, {"prob", p.probabilities[k]}});
    ordered_json j;
    j["paths"] = arr;
    j["deficit"] = p.deficit;
    return dump(j);
}

std::string chi_square_json(const ChiSquare& c, const PathDistribution& expected,
                            const std::vector<long long>& observed,
                            const std::string& config_echo, std::uint64_t seed) {
    ordered_json j;
    j["config"] = config_echo;
    j["seed"] = seed;
    j["statistic"] = c.statistic;
    j["dof"] = c.dof;
    j["pooled_cells"] = c.pooled_cells;
    j["p_value"] = c.p_value;
    ordered_json cells = ordered_json::array();
    for (std::size_t k = 0; k < expected.paths.size(); ++k)
        cells.push_back({{"path", vertices_json(expected.paths[k])},
                         {"prob", expected.probabilities[k]},
                         {"observed", observed[k]}});
    j["cells"] = cells;
    j["deficit"] = expected.deficit;
    return dump(j);
}

std::string report_json(const Theorem1Report& r) {
    ordered_json j = envelope(r);
    j["a_max"] = r.a_max;
    j["b_min"] = r.b_min;
    j["R_factor"] = r.R_factor;
    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) {
        ordered_json cj{{"a", c.a},
                        {"b", c.b},
                        {"straight", c.straight},
                        {"deviation_step", c.deviation_step},
                        {"steps", c.steps},
                        {"ties", c.tie_count}};
        if (c.error) cj["error"] = c.error_text;
        cells.push_back(cj);
    }
    j["cells"] = cells;
    ordered_json diags = ordered_json::array();
    for (const auto& dc : r.diagonals)
        diags.push_back({{"a", dc.a},
                         {"tie_declared", dc.tie_declared},
                         {"tie_size", dc.tie_size},
                         {"refinements", dc.refinements}});
    j["diagonals"] = diags;
    ordered_json th = ordered_json::array();
    for (std::size_t k = 0; k < r.threshold_b.size(); ++k)
        th.push_back({{"a", r.first_a + int(k)}, {"threshold_b", r.threshold_b[k]}});
    j["threshold_b"] = th;
    j["failures_above_threshold"] = r.failures_above_threshold;
    return dump(j);
}

std::string report_json(const ConstantReport& r) {
    ordered_json j = envelope(r);
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"a", row.a}, {"threshold_b", row.threshold_b}, {"probes", row.probes}});
    j["rows"] = rows;
    return dump(j);
}

std::string report_json(const TorusReport& r) {
    ordered_json j = envelope(r);
    j["n"] = r.n;
    j["target"] = vertex_json(r.target);
    j["termination"] = r.termination;
    j["path_steps"] = r.path_steps;
    j["self_avoiding"] = r.self_avoiding;
    j["first_turn"] = r.first_turn;
    j["first_turn_position"] = vertex_json(r.first_turn_position);
    ordered_json samples = ordered_json::array();
    for (const auto& s : r.solver_samples)
        samples.push_back(
            {{"step", s.step}, {"warm", s.warm_iterations}, {"cold", s.cold_iterations}});
    j["solver_samples"] = samples;
    j["warm_cold_ratio"] = r.warm_cold_ratio;
    return dump(j);
}

std::string report_json(const ScalingReport& r) {
    ordered_json j = envelope(r);
    j["which"] = r.which;
    ordered_json series = ordered_json::array();
    for (const auto& p : r.series) series.push_back({{"r", p.r}, {"value", p.value}});
    j["series"] = series;
    j["fit"] = {{"slope", r.fit.slope},
                {"intercept", r.fit.intercept},
                {"residual", r.fit.residual}};
    return dump(j);
}

std::string avoidance_json(const AvoidanceTable& p1, const AvoidanceTable& pi,
                           const std::string& config_echo) {
    ordered_json j;
    j["config"] = config_echo;
    j["t"] = p1.horizon();
    j["x"] = p1.interval_length();
    j["p_(1,0)"] = p1.survival_probability();
    j["p_(0,1)"] = pi.survival_probability();
    double a = p1.survival_probability(), b = pi.survival_probability();
    j["relative_gap"] = b > 0.0 ? (a - b) / b : 0.0;
    return dump(j);
}

std::string meta_sidecar_json(const std::string& command_line, double duration_seconds) {
    ordered_json j;
    j["command"] = command_line;
    j["duration_seconds"] = duration_seconds;
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["written_at"] = buf;
    return dump(j);
}

std::string scaling_csv(const std::vector<ScalingPoint>& series) {
    std::string out = "r,value\n";
    for (const auto& p : series) out += std::to_string(p.r) + "," + format_double(p.value) + "\n";
    return out;
}

namespace {

int gray_of(double v) {
    if (!(v >= 0.0)) v = 0.0;
    if (v > 1.0) v = 1.0;
    return int(std::lround(255.0 * v));
}

}  // namespace

std::string trajectory_svg(const Trajectory& t, const Domain& d, const HarmonicField* field,
                           const SvgOptions& opts) {
    const int cell = opts.cell;
    const int w = d.width() * cell;
    const int h = d.height() * cell;
    auto px = [&](Vertex v) {
        v = d.canon(v);
        double x = (v.re - d.lo().re + 0.5) * cell;
        double y = (d.hi().im - v.im + 0.5) * cell;
        return std::pair<double, double>{x, y};
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
           "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
           std::to_string(h) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (opts.heatmap && field && !field->empty()) {
        for (int idx = 0; idx < d.size(); ++idx) {
            Vertex v = d.vertex_at(idx);
            int g = gray_of(field->values()[std::size_t(idx)]);
            if (g == 255) continue;  // white background already
            auto [x, y] = px(v);
            svg += "<rect x=\"" + format_double(x - 0.5 * cell) + "\" y=\"" +
                   format_double(y - 0.5 * cell) + "\" width=\"" + std::to_string(cell) +
                   "\" height=\"" + std::to_string(cell) + "\" fill=\"rgb(" + std::to_string(g) +
                   "," + std::to_string(g) + "," + std::to_string(g) + ")\"/>\n";
        }
    }

    // Polyline segments; a torus wrap (|delta| > 1 in raw coordinates) breaks
    // the stroke rather than drawing across the board.
    std::string points;
    auto flush = [&]() {
        if (!points.empty()) {
            svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" +
                   format_double(cell * 0.25) + "\" points=\"" + points + "\"/>\n";
            points.clear();
        }
    };
    for (std::size_t k = 0; k < t.vertices.size(); ++k) {
        if (k > 0) {
            Vertex raw = d.canon(t.vertices[k]) - d.canon(t.vertices[k - 1]);
            if (std::abs(raw.re) + std::abs(raw.im) != 1) flush();
        }
        auto [x, y] = px(t.vertices[k]);
        if (!points.empty()) points += " ";
        points += format_double(x) + "," + format_double(y);
    }
    flush();

    if (!t.vertices.empty()) {
        auto [sx, sy] = px(t.vertices.front());
        auto [ex, ey] = px(t.vertices.back());
        svg += "<circle cx=\"" + format_double(sx) + "\" cy=\"" + format_double(sy) + "\" r=\"" +
               format_double(cell * 0.45) + "\" fill=\"forestgreen\"/>\n";
        svg += "<circle cx=\"" + format_double(ex) + "\" cy=\"" + format_double(ey) + "\" r=\"" +
               format_double(cell * 0.45) + "\" fill=\"crimson\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string field_pgm(const HarmonicField& f) {
    const Domain& d = f.domain();
    std::string out = "P5\n" + std::to_string(d.width()) + " " + std::to_string(d.height()) +
                      "\n255\n";
    for (int im = d.hi().im; im >= d.lo().im; --im)
        for (int re = d.lo().re; re <= d.hi().re; ++re)
            out.push_back(char(gray_of(f.at({re, im}))));
    return out;
}

std::string field_csv(const HarmonicField& f) {
    const Domain& d = f.domain();
    std::string out = "re,im,f\n";
    for (int im = d.hi().im; im >= d.lo().im; --im)
        for (int re = d.lo().re; re <= d.hi().re; ++re)
            out += std::to_string(re) + "," + std::to_string(im) + "," +
                   format_double(f.at({re, im})) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(content.data(), std::streamsize(content.size()));
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace lw
