#include "lapwalk/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace lw {
namespace detail {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

bool in_interval(Vertex v, int x) { return v.im == 0 && v.re <= 0 && v.re >= -x; }

}  // namespace

// Box(R) with boundary = frame u kill. One LDLT factorization serves every
// target: lower(z) = y(z)/y(w) with A y = e_w, and the upper field is
// u(z) + (1 - u(w)) * lower(z) where u is the target-independent frame-1
// field. Kill wins over the frame where the two sets meet.
class TruncationKernelImpl {
  public:
    TruncationKernelImpl(int R, std::vector<Vertex> kill) : R_(R), side_(2 * R + 1) {
        if (R < 2) throw std::invalid_argument("TruncationKernel: radius must be >= 2");
        const int total = side_ * side_;
        boundary_.assign(std::size_t(total), 0);
        killed_.assign(std::size_t(total), 0);
        for (Vertex v : kill) {
            if (cheb_norm(v) > R)
                throw std::invalid_argument("TruncationKernel: kill vertex outside the box");
            killed_[std::size_t(flat(v))] = 1;
            boundary_[std::size_t(flat(v))] = 1;
        }
        for (int i = 0; i < total; ++i)
            if (on_frame(i)) boundary_[std::size_t(i)] = 1;

        compact_.assign(std::size_t(total), -1);
        int n = 0;
        for (int i = 0; i < total; ++i)
            if (!boundary_[std::size_t(i)]) compact_[std::size_t(i)] = n++;
        free_count_ = n;
        if (free_count_ == 0) throw std::invalid_argument("TruncationKernel: no free vertices");

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(std::size_t(free_count_) * 5);
        Eigen::VectorXd frame_rhs = Eigen::VectorXd::Zero(free_count_);
        for (int i = 0; i < total; ++i) {
            int row = compact_[std::size_t(i)];
            if (row < 0) continue;
            trip.emplace_back(row, row, 4.0);
            Vertex v = vertex_of(i);
            for (Vertex s : kSteps) {
                Vertex u = v + s;
                int j = flat(u);  // every in-box neighbor of a free vertex exists
                int col = compact_[std::size_t(j)];
                if (col >= 0)
                    trip.emplace_back(row, col, -1.0);
                else if (!killed_[std::size_t(j)])
                    frame_rhs[row] += 1.0;  // frame at value 1 for the upper field
            }
        }
        Eigen::SparseMatrix<double> A(free_count_, free_count_);
        A.setFromTriplets(trip.begin(), trip.end());
        ldlt_.compute(A);
        if (ldlt_.info() != Eigen::Success)
            throw SolveError("TruncationKernel: factorization failed");
        u_ = ldlt_.solve(frame_rhs);
        if (ldlt_.info() != Eigen::Success)
            throw SolveError("TruncationKernel: frame field solve failed");
    }

    int radius() const { return R_; }

    bool inside(Vertex v) const { return cheb_norm(v) <= R_; }

    bool is_free(Vertex v) const {
        return inside(v) && compact_[std::size_t(flat(v))] >= 0;
    }

    ProbabilityBracket bracket(Vertex w, Vertex z) const {
        ensure_target(w);
        if (!inside(z)) throw std::invalid_argument("TruncationKernel: evaluation point outside the box");
        if (z == w) return {1.0, 1.0};
        int zi = flat(z);
        if (killed_[std::size_t(zi)]) return {0.0, 0.0};
        int zc = compact_[std::size_t(zi)];
        if (zc < 0) return {0.0, 1.0};  // on the frame: the brackets carry no information
        double lower = clamp01(y_[zc] * inv_yw_);
        double upper = clamp01(u_[zc] + (1.0 - uw_) * lower);
        return {lower, std::max(lower, upper)};
    }

    std::array<ProbabilityBracket, 4> origin_neighbor_brackets(Vertex w) const {
        std::array<ProbabilityBracket, 4> out;
        for (std::size_t k = 0; k < kSteps.size(); ++k) out[k] = bracket(w, kSteps[k]);
        return out;
    }

  private:
    int flat(Vertex v) const { return (v.re + R_) + (v.im + R_) * side_; }
    Vertex vertex_of(int i) const { return {i % side_ - R_, i / side_ - R_}; }
    bool on_frame(int i) const {
        Vertex v = vertex_of(i);
        return v.re == -R_ || v.re == R_ || v.im == -R_ || v.im == R_;
    }

    void ensure_target(Vertex w) const {
        if (have_target_ && w == target_) return;
        if (!inside(w) || !is_free(w))
            throw std::invalid_argument("TruncationKernel: target must be a free vertex of the box");
        Eigen::VectorXd e = Eigen::VectorXd::Zero(free_count_);
        int wc = compact_[std::size_t(flat(w))];
        e[wc] = 1.0;
        y_ = ldlt_.solve(e);
        if (ldlt_.info() != Eigen::Success)
            throw SolveError("TruncationKernel: target solve failed");
        double yw = y_[wc];
        if (!(yw > 0.0)) throw SolveError("TruncationKernel: degenerate Green value at target");
        inv_yw_ = 1.0 / yw;
        uw_ = u_[wc];
        target_ = w;
        have_target_ = true;
    }

    int R_, side_;
    int free_count_ = 0;
    std::vector<std::uint8_t> boundary_, killed_;
    std::vector<int> compact_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    Eigen::VectorXd u_;

    mutable bool have_target_ = false;
    mutable Vertex target_{};
    mutable Eigen::VectorXd y_;
    mutable double inv_yw_ = 0.0, uw_ = 0.0;
};

TruncationKernel::TruncationKernel(int R, std::vector<Vertex> kill)
    : impl_(std::make_unique<TruncationKernelImpl>(R, std::move(kill))) {}
TruncationKernel::~TruncationKernel() = default;
TruncationKernel::TruncationKernel(TruncationKernel&&) noexcept = default;
TruncationKernel& TruncationKernel::operator=(TruncationKernel&&) noexcept = default;

int TruncationKernel::radius() const { return impl_->radius(); }
bool TruncationKernel::is_free(Vertex v) const { return impl_->is_free(v); }
ProbabilityBracket TruncationKernel::bracket(Vertex w, Vertex z) const {
    return impl_->bracket(w, z);
}
std::array<ProbabilityBracket, 4> TruncationKernel::origin_neighbor_brackets(Vertex w) const {
    return impl_->origin_neighbor_brackets(w);
}

}  // namespace detail

ProbabilityBracket hit_prob_bracket(const HitQuery& q) {
    for (Vertex f : q.forbidden)
        if (f == q.target)
            throw std::invalid_argument("hit_prob_bracket: target belongs to the forbidden set");
    if (q.start == q.target) return {1.0, 1.0};
    detail::TruncationKernel kernel(q.radius, q.forbidden);
    if (!kernel.is_free(q.target))
        throw std::invalid_argument("hit_prob_bracket: target must lie strictly inside the box");
    if (cheb_norm(q.start) > q.radius)
        throw std::invalid_argument("hit_prob_bracket: start lies outside the box");
    return kernel.bracket(q.target, q.start);
}

namespace {

bool disjoint(const ProbabilityBracket& a, const ProbabilityBracket& b) {
    return a.lower > b.upper || b.lower > a.upper;
}

}  // namespace

Lemma3Batch::Lemma3Batch(int R) : kernel_(R, {Vertex{0, 0}}) {}

int Lemma3Batch::radius() const { return kernel_.radius(); }

FirstStepResult Lemma3Batch::run(Vertex w) const {
    if (w == Vertex{0, 0}) throw std::invalid_argument("lemma3_first_step: target is the origin");
    int aim = w.im < 0 ? -w.im : w.im;
    if (w.re < aim)
        throw std::invalid_argument(
            "lemma3_first_step: target must satisfy Re(w) >= |Im(w)| (reflect first)");
    if (2.0 * l2_norm(w) >= kernel_.radius())
        throw std::invalid_argument("lemma3_first_step: target too close to the frame (|w| >= R/2)");

    FirstStepResult res;
    res.brackets = kernel_.origin_neighbor_brackets(w);
    res.diagonal_case = (w.re == w.im && w.re > 0);

    const auto& b = res.brackets;  // order +1, +i, -1, -i
    if (res.diagonal_case) {
        bool overlap = !disjoint(b[0], b[1]);
        bool dominate = b[0].lower > b[2].upper && b[0].lower > b[3].upper &&
                        b[1].lower > b[2].upper && b[1].lower > b[3].upper;
        res.separated = overlap && dominate;
    } else {
        res.separated = b[0].lower > b[1].upper && b[0].lower > b[2].upper &&
                        b[0].lower > b[3].upper;
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < b.size(); ++k)
        if (b[k].midpoint() > b[best].midpoint()) best = k;
    res.midpoint_argmax = kSteps[best];
    return res;
}

FirstStepResult lemma3_first_step(Vertex w, int R) { return Lemma3Batch(R).run(w); }

Lemma2Batch::Lemma2Batch(int x, int R) : kernel_(R, build_interval(x)), x_(x) {}

RatioResult Lemma2Batch::run(Vertex w) const {
    if (detail::in_interval(w, x_))
        throw std::invalid_argument("lemma2_ratio: target lies on the interval");
    if (2.0 * l2_norm(w) >= kernel_.radius())
        throw std::invalid_argument("lemma2_ratio: target too close to the frame (|w| >= R/2)");

    RatioResult res;
    res.pr_1 = kernel_.bracket(w, {1, 0});
    res.pr_i = kernel_.bracket(w, {0, 1});
    constexpr double inf = std::numeric_limits<double>::infinity();
    res.ratio_lower = res.pr_i.upper > 0.0 ? res.pr_1.lower / res.pr_i.upper : inf;
    res.ratio_upper = res.pr_i.lower > 0.0 ? res.pr_1.upper / res.pr_i.lower : inf;
    res.midpoint_ratio = res.pr_i.midpoint() > 0.0 ? res.pr_1.midpoint() / res.pr_i.midpoint() : inf;
    return res;
}

RatioResult lemma2_ratio(Vertex w, int x, int R) { return Lemma2Batch(x, R).run(w); }

Lemma1Result lemma1_ratio(Vertex w, int x, int R) {
    if (w.re != w.im || w.re < 1)
        throw std::invalid_argument("lemma1_ratio: target must lie on the positive diagonal");
    if (2.0 * l2_norm(w) >= R)
        throw std::invalid_argument("lemma1_ratio: target too close to the frame (|w| >= R/2)");

    std::vector<Vertex> kill_num = build_interval(x);
    for (Vertex v : build_diagonal(R - 1))
        if (v != w) kill_num.push_back(v);

    detail::TruncationKernel num_kernel(R, std::move(kill_num));
    detail::TruncationKernel den_kernel(R, build_interval(x));
    const Vertex start{0, 1};

    Lemma1Result res;
    res.numerator = num_kernel.bracket(w, start);
    res.denominator = den_kernel.bracket(w, start);
    constexpr double inf = std::numeric_limits<double>::infinity();
    res.ratio = res.denominator.lower > 0.0 ? res.numerator.upper / res.denominator.lower : inf;
    res.product = res.ratio * std::sqrt(l2_norm(w));
    res.kill_ratio =
        res.denominator.lower > 0.0 ? res.numerator.lower / res.denominator.lower : inf;
    return res;
}

double escape_slit_prob(int r, int x) {
    if (r < 2) throw std::invalid_argument("escape_slit_prob: r must be >= 2");
    if (x < 1) throw std::invalid_argument("escape_slit_prob: x must be >= 1");
    const int R = r + 2;
    Domain d = Domain::box({0, 0}, R, FramePolicy::open);
    std::vector<std::pair<Vertex, double>> boundary;
    const double rr = double(r) * r;
    for (int im = -R; im <= R; ++im)
        for (int re = -R; re <= R; ++re)
            if (double(re) * re + double(im) * im >= rr)
                boundary.push_back({{re, im}, re >= 0 ? 1.0 : 0.0});
    for (Vertex v : build_interval(x)) boundary.push_back({v, 0.0});  // kill wins on overlap
    DirichletProblem p(d, boundary);
    SolverConfig cfg;
    cfg.method = SolveMethod::direct;
    return solve(p, cfg).at({0, 1});
}

double escape_diag_prob(int r) {
    if (r < 2) throw std::invalid_argument("escape_diag_prob: r must be >= 2");
    const int R = r + 2;
    Domain d = Domain::box({0, 0}, R, FramePolicy::open);
    std::vector<std::pair<Vertex, double>> boundary;
    const double rr = double(r) * r;
    for (int im = -R; im <= R; ++im)
        for (int re = -R; re <= R; ++re)
            if (double(re) * re + double(im) * im >= rr) boundary.push_back({{re, im}, 1.0});
    for (Vertex v : build_diagonal(R)) boundary.push_back({v, 0.0});  // kill wins on overlap
    DirichletProblem p(d, boundary);
    SolverConfig cfg;
    cfg.method = SolveMethod::direct;
    return solve(p, cfg).at({0, 1});
}

AvoidanceTable::AvoidanceTable(Vertex y, int t, int x) : t_(t), x_(x), origin_(y) {
    if (t < 0) throw std::invalid_argument("AvoidanceTable: t must be >= 0");
    if (x < 1) throw std::invalid_argument("AvoidanceTable: x must be >= 1");
    radius_ = t + 1;
    const int side = 2 * radius_ + 1;
    const std::size_t cells = std::size_t(side) * side;

    mass_.assign(std::size_t(t) + 1, std::vector<double>(cells, 0.0));
    absorbed_.assign(std::size_t(t) + 1, 0.0);
    if (detail::in_interval(y, x)) {
        absorbed_[0] = 1.0;
    } else {
        mass_[0][std::size_t(flat(y))] = 1.0;
    }

    for (int s = 0; s < t; ++s) {
        const auto& cur = mass_[std::size_t(s)];
        auto& next = mass_[std::size_t(s) + 1];
        double killed = 0.0;
        for (int im = -s; im <= s; ++im) {
            for (int re = -s; re <= s; ++re) {
                Vertex v = origin_ + Vertex{re, im};
                double m = cur[std::size_t(flat(v))];
                if (m == 0.0) continue;
                double quarter = 0.25 * m;
                for (Vertex step : kSteps) {
                    Vertex u = v + step;
                    if (detail::in_interval(u, x))
                        killed += quarter;  // killed on landing
                    else
                        next[std::size_t(flat(u))] += quarter;
                }
            }
        }
        absorbed_[std::size_t(s) + 1] = absorbed_[std::size_t(s)] + killed;
    }
}

int AvoidanceTable::flat(Vertex v) const {
    Vertex d = v - origin_;
    if (cheb_norm(d) > radius_) return -1;
    return (d.re + radius_) + (d.im + radius_) * (2 * radius_ + 1);
}

double AvoidanceTable::mass_at(Vertex v, int time) const {
    if (time < 0 || time > t_) throw std::out_of_range("AvoidanceTable: time outside [0,t]");
    int f = flat(v);
    return f < 0 ? 0.0 : mass_[std::size_t(time)][std::size_t(f)];
}

double AvoidanceTable::survival(int time) const {
    if (time < 0 || time > t_) throw std::out_of_range("AvoidanceTable: time outside [0,t]");
    double s = 0.0;
    for (double m : mass_[std::size_t(time)]) s += m;
    return s;
}

double AvoidanceTable::absorbed(int time) const {
    if (time < 0 || time > t_) throw std::out_of_range("AvoidanceTable: time outside [0,t]");
    return absorbed_[std::size_t(time)];
}

AvoidanceTable avoidance_table(Vertex y, int t, int x) { return AvoidanceTable(y, t, x); }

double avoidance_probability(Vertex y, int t, int x) {
    return AvoidanceTable(y, t, x).survival_probability();
}

double ExactAvoidance::value() const { return std::ldexp(double(count), -2 * t); }

ExactAvoidance avoidance_probability_exact(Vertex y, int t, int x) {
    if (t < 0 || t > 26)
        throw std::invalid_argument("avoidance_probability_exact: t must lie in [0,26]");
    if (x < 1) throw std::invalid_argument("avoidance_probability_exact: x must be >= 1");
    if (detail::in_interval(y, x)) return {0, t};

    const int radius = t + 1;
    const int side = 2 * radius + 1;
    auto flat = [&](Vertex d) { return (d.re + radius) + (d.im + radius) * side; };
    std::vector<std::uint64_t> cur(std::size_t(side) * side, 0), next;
    cur[std::size_t(flat({0, 0}))] = 1;

    for (int s = 0; s < t; ++s) {
        next.assign(cur.size(), 0);
        for (int im = -s; im <= s; ++im) {
            for (int re = -s; re <= s; ++re) {
                std::uint64_t c = cur[std::size_t(flat({re, im}))];
                if (c == 0) continue;
                for (Vertex step : kSteps) {
                    Vertex d{re + step.re, im + step.im};
                    if (!detail::in_interval(y + d, x)) next[std::size_t(flat(d))] += c;
                }
            }
        }
        cur.swap(next);
    }

    std::uint64_t total = 0;
    for (std::uint64_t c : cur) total += c;
    return {total, t};
}

namespace {

bool on_main_diagonal(Vertex v) { return v.re == v.im; }

bool member(const std::vector<Vertex>& set, Vertex v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

bool CoupledPair::invariants_ok() const {
    if (X.size() != Y.size() || X.empty()) return false;
    const Isometry mirror = Isometry::reflect_D();
    int first_diag = -1;
    for (std::size_t s = 0; s < X.size(); ++s) {
        if (first_diag < 0 && on_main_diagonal(X[s])) first_diag = int(s);
        bool met = tau >= 0 && int(s) >= tau;
        if (met ? (Y[s] != X[s]) : (Y[s] != mirror(X[s]))) return false;
    }
    return tau == first_diag;
}

CoupledPair sample_coupled_pair(SplitMix64& rng, int horizon,
                                const std::vector<StopSet>& stop_sets) {
    if (horizon < 0) throw std::invalid_argument("sample_coupled_pair: horizon must be >= 0");
    CoupledPair cp;
    cp.X.reserve(std::size_t(horizon) + 1);
    cp.Y.reserve(std::size_t(horizon) + 1);
    cp.hits.reserve(stop_sets.size());
    for (const auto& s : stop_sets) cp.hits.push_back({s.name, -1, -1});

    const Isometry mirror = Isometry::reflect_D();
    Vertex x{1, 0};
    auto record = [&](int step) {
        if (cp.tau < 0 && on_main_diagonal(x)) cp.tau = step;
        Vertex y = cp.tau >= 0 ? x : mirror(x);
        cp.X.push_back(x);
        cp.Y.push_back(y);
        for (std::size_t k = 0; k < stop_sets.size(); ++k) {
            if (cp.hits[k].x_hit < 0 && member(stop_sets[k].members, x)) cp.hits[k].x_hit = step;
            if (cp.hits[k].y_hit < 0 && member(stop_sets[k].members, y)) cp.hits[k].y_hit = step;
        }
    };

    record(0);
    for (int step = 1; step <= horizon; ++step) {
        x = x + kSteps[rng.next_below(4)];
        record(step);
    }
    return cp;
}

}  // namespace lw
