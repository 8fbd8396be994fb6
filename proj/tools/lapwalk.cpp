#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "lapwalk/experiments.hpp"
#include "lapwalk/io.hpp"
#include "lapwalk/lerw.hpp"
#include "lapwalk/probability.hpp"
#include "lapwalk/walk.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 0x4c415057414c4bULL;

lw::Vertex parse_vertex(const std::string& s) {
    int re = 0, im = 0;
    char comma = 0;
    std::istringstream is(s);
    if (!(is >> re >> comma >> im) || comma != ',' || !is.eof())
        throw CLI::ValidationError("expected a vertex as re,im: " + s);
    return {re, im};
}

lw::Domain parse_domain(const std::string& s, lw::FramePolicy box_fp = lw::FramePolicy::open) {
    auto colon = s.find(':');
    if (colon != std::string::npos) {
        std::string kind = s.substr(0, colon);
        int arg = 0;
        try {
            arg = std::stoi(s.substr(colon + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("bad domain size in: " + s);
        }
        if (kind == "box") return lw::Domain::box({0, 0}, arg, box_fp);
        if (kind == "torus") return lw::Domain::torus(arg);
    }
    throw CLI::ValidationError("expected box:R or torus:n, got: " + s);
}

lw::FramePolicy parse_frame(const std::string& s) {
    if (s == "open") return lw::FramePolicy::open;
    if (s == "absorb0") return lw::FramePolicy::absorb0;
    if (s == "absorb1") return lw::FramePolicy::absorb1;
    throw CLI::ValidationError("expected open, absorb0 or absorb1, got: " + s);
}

std::vector<lw::Vertex> parse_forbid(const std::string& s) {
    if (s.empty() || s == "none") return {};
    if (s.rfind("interval:", 0) == 0) {
        int x = 0;
        try {
            x = std::stoi(s.substr(9));
        } catch (const std::exception&) {
            throw CLI::ValidationError("bad interval length in: " + s);
        }
        return lw::build_interval(x);
    }
    throw CLI::ValidationError("expected interval:x or none, got: " + s);
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", std::gmtime(&now));
    return buf;
}

void write_outputs(const std::string& dir, const std::string& basename,
                   const std::vector<std::pair<std::string, std::string>>& files,
                   const std::string& command_echo, double duration) {
    std::filesystem::create_directories(dir);
    for (const auto& [ext, content] : files)
        lw::write_text_file(dir + "/" + basename + ext, content);
    lw::write_text_file(dir + "/" + basename + ".meta.json",
                        lw::meta_sidecar_json(command_echo, duration));
}

struct GlobalOpts {
    std::uint64_t seed = kDefaultSeed;
    int threads = int(std::thread::hardware_concurrency());
    std::string out = "out";
};

int run_walk_cmd(const GlobalOpts& g, const std::string& alpha_str, const std::string& start_str,
                 const std::string& target_str, const std::string& domain_str, int horizon) {
    lw::AlphaSpec alpha = alpha_str == "inf" ? lw::AlphaSpec::infinity()
                                             : lw::AlphaSpec::finite(std::stod(alpha_str));
    lw::Domain d = parse_domain(domain_str);
    lw::Vertex start = parse_vertex(start_str);
    lw::Vertex target = parse_vertex(target_str);
    if (horizon <= 0) horizon = 4 * d.size();

    std::ostringstream echo;
    echo << "walk run alpha=" << alpha_str << " start=" << start_str << " target=" << target_str
         << " domain=" << domain_str << " seed=" << g.seed << " horizon=" << horizon;

    auto t0 = std::chrono::steady_clock::now();
    lw::Trajectory traj = lw::run_walk(start, target, d, alpha, lw::TieRule{}, lw::SolverConfig{},
                                       g.seed, horizon);
    double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string json = lw::trajectory_json(traj, d, echo.str());
    std::string svg = lw::trajectory_svg(traj, d);
    write_outputs(g.out, "walk-" + std::to_string(g.seed), {{".json", json}, {".svg", svg}},
                  echo.str(), dur);
    std::cout << json;
    return 0;
}

int walk_field_cmd(const GlobalOpts& g, const std::string& target_str,
                   const std::string& domain_str, const std::string& frame_str,
                   const std::vector<std::string>& pin_strs) {
    lw::Domain d = parse_domain(domain_str, parse_frame(frame_str));
    std::vector<std::pair<lw::Vertex, double>> boundary{{parse_vertex(target_str), 1.0}};
    for (const std::string& p : pin_strs) boundary.emplace_back(parse_vertex(p), 0.0);

    std::ostringstream echo;
    echo << "walk field target=" << target_str << " domain=" << domain_str
         << " frame=" << frame_str << " pins=" << pin_strs.size();

    auto t0 = std::chrono::steady_clock::now();
    lw::DirichletProblem problem(d, boundary);
    lw::SolveStats stats;
    lw::HarmonicField f = lw::solve(problem, lw::SolverConfig{}, nullptr, &stats);
    double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string basename = "field-" + std::to_string(g.seed);
    write_outputs(g.out, basename, {{".pgm", lw::field_pgm(f)}, {".csv", lw::field_csv(f)}},
                  echo.str(), dur);
    std::cout << "{\n  \"config\": \"" << echo.str() << "\",\n  \"seed\": " << g.seed
              << ",\n  \"width\": " << d.width() << ",\n  \"height\": " << d.height()
              << ",\n  \"residual\": " << lw::format_double(stats.residual)
              << ",\n  \"files\": [\"" << basename << ".pgm\", \"" << basename << ".csv\"]\n}\n";
    return 0;
}

int prob_hit_cmd(const GlobalOpts& g, const std::string& start_str, const std::string& target_str,
                 const std::string& forbid_str, int radius) {
    lw::HitQuery q;
    q.start = parse_vertex(start_str);
    q.target = parse_vertex(target_str);
    q.forbidden = parse_forbid(forbid_str);
    q.radius = radius;

    std::ostringstream echo;
    echo << "prob hit start=" << start_str << " target=" << target_str
         << " forbid=" << (forbid_str.empty() ? "none" : forbid_str) << " radius=" << radius;

    lw::ProbabilityBracket b = lw::hit_prob_bracket(q);
    std::cout << lw::bracket_json(b, q, echo.str(), g.seed, lw::SolverConfig{}.rel_tolerance);
    return 0;
}

int prob_scaling_cmd(const GlobalOpts& g, const std::string& which, std::vector<int> radii) {
    std::cerr << "scaling " << which << ": " << radii.size() << " radii\n";
    lw::ScalingReport rep = lw::escape_scaling(which, radii);
    std::cout << lw::scaling_csv(rep.series);
    std::cout << "# slope," << lw::format_double(rep.fit.slope) << ",intercept,"
              << lw::format_double(rep.fit.intercept) << ",residual,"
              << lw::format_double(rep.fit.residual) << "\n";

    std::string basename = rep.name + "-" + std::to_string(g.seed) + "-" + timestamp_utc();
    write_outputs(g.out, basename,
                  {{".json", lw::report_json(rep)}, {".csv", lw::scaling_csv(rep.series)}},
                  rep.name + " " + rep.config_echo, rep.duration_seconds);
    return rep.passed() ? 0 : 1;
}

int prob_avoid_cmd(const GlobalOpts&, int t, int x) {
    lw::AvoidanceTable p1 = lw::avoidance_table({1, 0}, t, x);
    lw::AvoidanceTable pi = lw::avoidance_table({0, 1}, t, x);
    std::ostringstream echo;
    echo << "prob avoid t=" << t << " x=" << x;
    std::cout << lw::avoidance_json(p1, pi, echo.str());
    return p1.survival_probability() > pi.survival_probability() ? 0 : 1;
}

int lerw_test_cmd(const GlobalOpts& g, int grid, long long samples) {
    if (grid < 2 || grid > 4)
        throw CLI::ValidationError("--grid must be 2, 3 or 4 (enumeration is exponential)");
    lw::Domain d = lw::Domain::box_rect({0, 0}, {grid - 1, grid - 1}, lw::FramePolicy::open);
    lw::Vertex s{0, 0}, w{grid - 1, grid - 1};

    std::cerr << "enumerating alpha=1 paths on the " << grid << "x" << grid << " grid\n";
    lw::PathDistribution exact = lw::exact_alpha1_distribution(s, w, d);
    std::vector<long long> counts(exact.paths.size(), 0);
    lw::SplitMix64 rng = lw::SplitMix64::stream(g.seed, 0);
    std::cerr << "sampling " << samples << " loop-erased walks\n";
    for (long long k = 0; k < samples; ++k) {
        std::vector<lw::Vertex> path = lw::sample_lerw(d, s, w, rng);
        int idx = exact.find(path);
        if (idx < 0) throw std::logic_error("sampled path missing from the exact table");
        ++counts[std::size_t(idx)];
    }
    lw::ChiSquare c = lw::chi_square_compare(counts, exact);

    std::ostringstream echo;
    echo << "lerw test grid=" << grid << " samples=" << samples << " seed=" << g.seed;
    std::cout << lw::chi_square_json(c, exact, counts, echo.str(), g.seed);
    return c.p_value > 0.001 ? 0 : 1;
}

int exp_theorem1_cmd(const GlobalOpts& g, int amax, int bmin, int rfactor) {
    lw::SweepOptions opts;
    opts.R_factor = rfactor;
    opts.threads = g.threads;
    opts.seed = g.seed;
    std::cerr << "theorem1 sweep: a<=" << amax << ", |b|>=" << bmin << ", R=" << rfactor
              << "a, threads=" << g.threads << "\n";
    lw::Theorem1Report rep = lw::theorem1_sweep(amax, bmin, opts);
    std::cerr << "sweep finished in " << rep.duration_seconds << "s\n";

    std::string json = lw::report_json(rep);
    std::string basename = rep.name + "-" + std::to_string(g.seed) + "-" + timestamp_utc();
    write_outputs(g.out, basename, {{".json", json}}, rep.name + " " + rep.config_echo,
                  rep.duration_seconds);
    std::cout << json;
    return rep.passed() ? 0 : 1;
}

int exp_torus_cmd(const GlobalOpts& g, int n, const std::string& target_str) {
    lw::TorusOptions opts;
    opts.seed = g.seed;
    lw::Vertex w = target_str.empty() ? lw::Vertex{n / 2, n / 2} : parse_vertex(target_str);
    std::cerr << "torus run: n=" << n << " target=(" << w.re << "," << w.im << ")\n";
    auto [traj, rep] = lw::torus_run(n, w, opts);
    std::cerr << "finished: " << rep.termination << " after " << rep.path_steps << " steps\n";

    lw::Domain d = lw::Domain::torus(n);
    std::string basename = rep.name + "-" + std::to_string(g.seed) + "-" + timestamp_utc();
    write_outputs(g.out, basename,
                  {{".json", lw::report_json(rep)},
                   {"-trajectory.json", lw::trajectory_json(traj, d, rep.config_echo)},
                   {".svg", lw::trajectory_svg(traj, d)}},
                  rep.name + " " + rep.config_echo, rep.duration_seconds);
    std::cout << lw::report_json(rep);
    return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laplacian-alpha walks, hitting-probability oracles and experiments on Z^2"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed (fixed default, overridable)")
        ->envname("LW_SEED");
    app.add_option("--threads", g.threads, "worker threads for sweeps");
    app.add_option("--out", g.out, "output directory");

    // walk run
    auto* walk = app.add_subcommand("walk", "run a single walk");
    auto* walk_run = walk->add_subcommand("run", "Laplacian-alpha walk toward a target");
    std::string alpha_str = "inf", start_str = "0,0", target_str, domain_str = "box:32";
    int horizon = 0;
    walk_run->add_option("--alpha", alpha_str, "exponent, a real number or 'inf'");
    walk_run->add_option("--start", start_str, "start vertex re,im");
    walk_run->add_option("--target", target_str, "target vertex re,im")->required();
    walk_run->add_option("--domain", domain_str, "box:R or torus:n");
    walk_run->add_option("--horizon", horizon, "step cap (default 4*|domain|)");

    // walk field (render the potential a walk steps on)
    auto* walk_field = walk->add_subcommand("field", "render a Dirichlet field as PGM + CSV");
    std::string field_target, field_domain = "box:32", field_frame = "absorb0";
    std::vector<std::string> field_pins;
    walk_field->add_option("--target", field_target, "target vertex re,im (pinned to 1)")
        ->required();
    walk_field->add_option("--domain", field_domain, "box:R or torus:n");
    walk_field->add_option("--frame", field_frame, "box frame: open, absorb0 or absorb1");
    walk_field->add_option("--pin", field_pins, "vertex re,im pinned to 0 (repeatable)");

    // prob hit | scaling | avoid
    auto* prob = app.add_subcommand("prob", "hitting-probability oracles");
    auto* prob_hit = prob->add_subcommand("hit", "truncation bracket of a hitting probability");
    std::string hit_start = "0,1", hit_target, hit_forbid = "none";
    int hit_radius = 64;
    prob_hit->add_option("--start", hit_start, "start vertex re,im");
    prob_hit->add_option("--target", hit_target, "target vertex re,im")->required();
    prob_hit->add_option("--forbid", hit_forbid, "forbidden set: interval:x or none");
    prob_hit->add_option("--radius", hit_radius, "truncation radius R");

    auto* prob_scaling = prob->add_subcommand("scaling", "escape-probability scaling series");
    std::string scaling_which = "slit";
    std::string scaling_r = "8,16,32,64,128";
    prob_scaling->add_option("--which", scaling_which, "slit or diag");
    prob_scaling->add_option("--r", scaling_r, "comma-separated radii");

    auto* prob_avoid = prob->add_subcommand("avoid", "exact interval-avoidance DP");
    int avoid_t = 3, avoid_x = 1;
    prob_avoid->add_option("--t", avoid_t, "time horizon");
    prob_avoid->add_option("--x", avoid_x, "interval length");

    // lerw test
    auto* lerw = app.add_subcommand("lerw", "loop-erased random walk");
    auto* lerw_test = lerw->add_subcommand("test", "LERW vs exact alpha=1 law, chi-square");
    int lerw_grid = 3;
    long long lerw_samples = 100000;
    lerw_test->add_option("--grid", lerw_grid, "grid side (2-4)");
    lerw_test->add_option("--samples", lerw_samples, "number of LERW samples");

    // exp theorem1 | torus
    auto* exp = app.add_subcommand("exp", "seeded experiment suites");
    auto* exp_theorem1 = exp->add_subcommand("theorem1", "Theorem 1 straightness sweep");
    int amax = 25, bmin = 3, rfactor = 4;
    exp_theorem1->add_option("--amax", amax, "largest target abscissa");
    exp_theorem1->add_option("--bmin", bmin, "smallest |b|");
    exp_theorem1->add_option("--rfactor", rfactor, "box radius per unit of a");

    auto* exp_torus = exp->add_subcommand("torus", "full infinity-path on Torus(n)");
    int torus_n = 20;
    std::string torus_target;
    exp_torus->add_option("--n", torus_n, "torus side");
    exp_torus->add_option("--target", torus_target, "target re,im (default antipode)");

    // the global --seed/--threads/--out may appear after the subcommand words
    for (CLI::App* s : {walk, walk_run, walk_field, prob, prob_hit, prob_scaling, prob_avoid, lerw,
                        lerw_test, exp, exp_theorem1, exp_torus})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help or the parse diagnostic
        return code == 0 ? 0 : 2;
    }

    try {
        if (walk_run->parsed())
            return run_walk_cmd(g, alpha_str, start_str, target_str, domain_str, horizon);
        if (walk_field->parsed())
            return walk_field_cmd(g, field_target, field_domain, field_frame, field_pins);
        if (prob_hit->parsed())
            return prob_hit_cmd(g, hit_start, hit_target, hit_forbid, hit_radius);
        if (prob_scaling->parsed()) {
            std::vector<int> radii;
            std::istringstream is(scaling_r);
            for (std::string tok; std::getline(is, tok, ',');) radii.push_back(std::stoi(tok));
            return prob_scaling_cmd(g, scaling_which, radii);
        }
        if (prob_avoid->parsed()) return prob_avoid_cmd(g, avoid_t, avoid_x);
        if (lerw_test->parsed()) return lerw_test_cmd(g, lerw_grid, lerw_samples);
        if (exp_theorem1->parsed()) return exp_theorem1_cmd(g, amax, bmin, rfactor);
        if (exp_torus->parsed()) return exp_torus_cmd(g, torus_n, torus_target);
        std::cerr << app.help();
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const lw::IterationBudgetExceeded& e) {
        std::cerr << "non-convergence: " << e.what() << " (residual " << e.achieved_residual
                  << ")\n";
        return 3;
    } catch (const lw::SolveError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
