#include "lapwalk/harmonic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

namespace lw {

namespace {

// Compact free-vertex view of the 5-point Laplacian: per free vertex its
// degree, the compact indices of free neighbors (-1 slots unused), and the
// boundary contribution to the right-hand side.
struct FreeSystem {
    std::vector<int> free_idx;          // compact -> domain index
    std::vector<int> compact_of;        // domain index -> compact or -1
    std::vector<std::array<int, 4>> nb; // compact neighbor indices, -1 = none/boundary
    std::vector<double> degree;
    std::vector<double> rhs;
};

FreeSystem build_system(const DirichletProblem& p) {
    const Domain& d = p.domain();
    const auto& mask = p.boundary_mask();
    const auto& bval = p.boundary_values();
    FreeSystem s;
    s.compact_of.assign(std::size_t(d.size()), -1);
    s.free_idx.reserve(std::size_t(p.free_count()));
    for (int idx = 0; idx < d.size(); ++idx) {
        if (!mask[std::size_t(idx)]) {
            s.compact_of[std::size_t(idx)] = int(s.free_idx.size());
            s.free_idx.push_back(idx);
        }
    }
    int n = int(s.free_idx.size());
    s.nb.assign(std::size_t(n), {-1, -1, -1, -1});
    s.degree.assign(std::size_t(n), 0.0);
    s.rhs.assign(std::size_t(n), 0.0);
    std::array<Vertex, 4> buf;
    for (int i = 0; i < n; ++i) {
        Vertex v = d.vertex_at(s.free_idx[std::size_t(i)]);
        int cnt = d.neighbors(v, buf);
        if (cnt == 0) throw IllPosedProblem("solve: free vertex with no neighbors");
        s.degree[std::size_t(i)] = double(cnt);
        for (int k = 0; k < cnt; ++k) {
            int uidx = d.index(buf[std::size_t(k)]);
            if (mask[std::size_t(uidx)]) {
                s.rhs[std::size_t(i)] += bval[std::size_t(uidx)];
            } else {
                s.nb[std::size_t(i)][std::size_t(k)] = s.compact_of[std::size_t(uidx)];
            }
        }
    }
    return s;
}

// y = A x with A = D - adjacency over free vertices (SPD).
void apply(const FreeSystem& s, const std::vector<double>& x, std::vector<double>& y) {
    int n = int(s.free_idx.size());
    for (int i = 0; i < n; ++i) {
        double acc = s.degree[std::size_t(i)] * x[std::size_t(i)];
        for (int j : s.nb[std::size_t(i)])
            if (j >= 0) acc -= x[std::size_t(j)];
        y[std::size_t(i)] = acc;
    }
}

// Residual in the harmonic semantics: max_i |r_i| / degree_i.
double harmonic_residual(const FreeSystem& s, const std::vector<double>& r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        worst = std::max(worst, std::fabs(r[i]) / s.degree[i]);
    return worst;
}

void solve_direct(const FreeSystem& s, std::vector<double>& x) {
    int n = int(s.free_idx.size());
    Eigen::SparseMatrix<double> A(n, n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(n) * 5);
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, i, s.degree[std::size_t(i)]);
        for (int j : s.nb[std::size_t(i)])
            if (j >= 0) trips.emplace_back(i, j, -1.0);
    }
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw SolveError("direct solve: factorization failed");
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = s.rhs[std::size_t(i)];
    Eigen::VectorXd sol = ldlt.solve(b);
    x.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) x[std::size_t(i)] = sol[i];
}

int solve_cg(const FreeSystem& s, std::vector<double>& x, double tol, int max_iter) {
    int n = int(s.free_idx.size());
    std::vector<double> r(std::size_t(n), 0.0), z(std::size_t(n), 0.0), q(std::size_t(n), 0.0),
        pdir(std::size_t(n), 0.0);
    apply(s, x, r);
    for (int i = 0; i < n; ++i) r[std::size_t(i)] = s.rhs[std::size_t(i)] - r[std::size_t(i)];
    if (harmonic_residual(s, r) <= tol) return 0;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[std::size_t(i)] = r[std::size_t(i)] / s.degree[std::size_t(i)];
        rz += r[std::size_t(i)] * z[std::size_t(i)];
    }
    pdir = z;
    for (int it = 1; it <= max_iter; ++it) {
        apply(s, pdir, q);
        double pq = 0.0;
        for (int i = 0; i < n; ++i) pq += pdir[std::size_t(i)] * q[std::size_t(i)];
        if (pq <= 0.0) return it;  // numerical breakdown: x is as good as it gets
        double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            x[std::size_t(i)] += alpha * pdir[std::size_t(i)];
            r[std::size_t(i)] -= alpha * q[std::size_t(i)];
        }
        if (harmonic_residual(s, r) <= tol) return it;
        double rz_next = 0.0;
        for (int i = 0; i < n; ++i) {
            z[std::size_t(i)] = r[std::size_t(i)] / s.degree[std::size_t(i)];
            rz_next += r[std::size_t(i)] * z[std::size_t(i)];
        }
        double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i)
            pdir[std::size_t(i)] = z[std::size_t(i)] + beta * pdir[std::size_t(i)];
    }
    throw IterationBudgetExceeded("iterative solve: budget exhausted", harmonic_residual(s, r));
}

}  // namespace

DirichletProblem::DirichletProblem(Domain d,
                                   const std::vector<std::pair<Vertex, double>>& boundary)
    : domain_(std::move(d)) {
    boundary_mask_.assign(std::size_t(domain_.size()), 0);
    boundary_values_.assign(std::size_t(domain_.size()), 0.0);
    auto set = [&](Vertex v, double value) {
        if (!domain_.contains(domain_.canon(v)))
            throw std::invalid_argument("DirichletProblem: boundary vertex outside domain");
        int idx = domain_.index(v);
        boundary_mask_[std::size_t(idx)] = 1;
        boundary_values_[std::size_t(idx)] = value;
    };
    if (domain_.kind() == DomainKind::box && domain_.frame_policy() != FramePolicy::open) {
        double fv = domain_.frame_policy() == FramePolicy::absorb0 ? 0.0 : 1.0;
        for (int idx = 0; idx < domain_.size(); ++idx)
            if (domain_.on_frame(domain_.vertex_at(idx))) set(domain_.vertex_at(idx), fv);
    }
    for (const auto& [v, value] : domain_.overlay()) set(v, value);
    for (const auto& [v, value] : boundary) set(v, value);  // explicit entries win
    free_count_ = 0;
    for (auto m : boundary_mask_)
        if (!m) ++free_count_;
}

double DirichletProblem::boundary_value(Vertex v) const {
    int idx = domain_.index(v);
    if (!boundary_mask_[std::size_t(idx)])
        throw std::invalid_argument("boundary_value: vertex is free");
    return boundary_values_[std::size_t(idx)];
}

void DirichletProblem::pin(Vertex v, double value) {
    int idx = domain_.index(v);
    if (boundary_mask_[std::size_t(idx)])
        throw std::invalid_argument("pin: vertex already on the boundary");
    boundary_mask_[std::size_t(idx)] = 1;
    boundary_values_[std::size_t(idx)] = value;
    --free_count_;
}

HarmonicField solve(const DirichletProblem& p, const SolverConfig& cfg,
                    const HarmonicField* warm_start, SolveStats* stats) {
    const Domain& d = p.domain();
    bool any_boundary = p.free_count() < d.size();
    if (!any_boundary) throw IllPosedProblem("solve: empty boundary set");

    FreeSystem s = build_system(p);
    int n = int(s.free_idx.size());

    bool direct = cfg.method == SolveMethod::direct ||
                  (cfg.method == SolveMethod::automatic && n < 2000);
    std::vector<double> x(std::size_t(n), 0.0);
    int iters = 0;
    if (n > 0) {
        if (direct) {
            solve_direct(s, x);
        } else {
            if (warm_start != nullptr) {
                const auto& wv = warm_start->values();
                if (int(wv.size()) != d.size())
                    throw std::invalid_argument("solve: warm start domain mismatch");
                for (int i = 0; i < n; ++i)
                    x[std::size_t(i)] = wv[std::size_t(s.free_idx[std::size_t(i)])];
            }
            int budget = cfg.max_iterations > 0
                             ? cfg.max_iterations
                             : 40 * std::max(d.width(), d.height()) + 2000;
            iters = solve_cg(s, x, cfg.rel_tolerance, budget);
        }
    }

    std::vector<double> full(p.boundary_values());
    for (int i = 0; i < n; ++i)
        full[std::size_t(s.free_idx[std::size_t(i)])] = x[std::size_t(i)];
    HarmonicField f(d, std::move(full));
    if (stats != nullptr) {
        std::vector<double> r(std::size_t(n), 0.0);
        apply(s, x, r);
        for (int i = 0; i < n; ++i) r[std::size_t(i)] = s.rhs[std::size_t(i)] - r[std::size_t(i)];
        stats->iterations = iters;
        stats->residual = n > 0 ? harmonic_residual(s, r) : 0.0;
        stats->used_direct = direct;
    }
    return f;
}

std::pair<DirichletProblem, HarmonicField> pin_vertex(const DirichletProblem& p,
                                                      const HarmonicField& f, Vertex v,
                                                      double value) {
    DirichletProblem p2 = p;
    p2.pin(v, value);
    HarmonicField warm = f;
    warm.mutable_values()[std::size_t(p.domain().index(v))] = value;
    return {std::move(p2), std::move(warm)};
}

namespace detail {

struct IncrementalPinSolver::Impl {
    DirichletProblem base;
    FreeSystem sys;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::VectorXd x_base;
    std::vector<Eigen::VectorXd> greens;  // one A^-1 column per pin
    Eigen::MatrixXd gram;                 // (A^-1)_{SS}
    Eigen::VectorXd coeff;
    std::vector<int> pin_compact;
    std::vector<double> pin_value;
    std::vector<int> pin_slot_of_domain;  // domain index -> pin order or -1
    int capacity = 0;

    explicit Impl(const DirichletProblem& p) : base(p), sys(build_system(p)) {
        int n = int(sys.free_idx.size());
        if (n == 0) throw IllPosedProblem("pin solver: no free vertices");
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(std::size_t(n) * 5);
        for (int i = 0; i < n; ++i) {
            trips.emplace_back(i, i, sys.degree[std::size_t(i)]);
            for (int j : sys.nb[std::size_t(i)])
                if (j >= 0) trips.emplace_back(i, j, -1.0);
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trips.begin(), trips.end());
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success)
            throw SolveError("pin solver: factorization failed");
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) b[i] = sys.rhs[std::size_t(i)];
        x_base = ldlt.solve(b);
        pin_slot_of_domain.assign(std::size_t(base.domain().size()), -1);
        // cap the Green-column storage near 256 MB
        capacity = std::max(64, int(33'000'000 / std::max(1, n)));
    }

    double free_value(int compact) const {
        double v = x_base[compact];
        for (std::size_t j = 0; j < greens.size(); ++j) v -= coeff[Eigen::Index(j)] * greens[j][compact];
        return v;
    }
};

IncrementalPinSolver::IncrementalPinSolver(const DirichletProblem& base)
    : impl_(std::make_unique<Impl>(base)) {}
IncrementalPinSolver::~IncrementalPinSolver() = default;
IncrementalPinSolver::IncrementalPinSolver(IncrementalPinSolver&&) noexcept = default;
IncrementalPinSolver& IncrementalPinSolver::operator=(IncrementalPinSolver&&) noexcept = default;

int IncrementalPinSolver::pin_count() const { return int(impl_->pin_compact.size()); }
int IncrementalPinSolver::pin_capacity() const { return impl_->capacity; }

void IncrementalPinSolver::add_pin(Vertex v, double value) {
    Impl& im = *impl_;
    int idx = im.base.domain().index(v);
    if (im.base.is_boundary_index(idx) || im.pin_slot_of_domain[std::size_t(idx)] >= 0)
        throw std::invalid_argument("pin solver: vertex already pinned");
    int compact = im.sys.compact_of[std::size_t(idx)];

    int k = int(im.greens.size());
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(im.x_base.size());
    unit[compact] = 1.0;
    im.greens.push_back(im.ldlt.solve(unit));
    im.pin_compact.push_back(compact);
    im.pin_value.push_back(value);
    im.pin_slot_of_domain[std::size_t(idx)] = k;

    im.gram.conservativeResize(k + 1, k + 1);
    const Eigen::VectorXd& g = im.greens.back();
    for (int j = 0; j <= k; ++j) {
        double gij = g[im.pin_compact[std::size_t(j)]];  // symmetry of A^-1
        im.gram(k, j) = gij;
        im.gram(j, k) = gij;
    }
    Eigen::VectorXd rhs(k + 1);
    for (int j = 0; j <= k; ++j)
        rhs[j] = im.x_base[im.pin_compact[std::size_t(j)]] - im.pin_value[std::size_t(j)];
    im.coeff = im.gram.ldlt().solve(rhs);
}

double IncrementalPinSolver::value_at(Vertex v) const {
    const Impl& im = *impl_;
    int idx = im.base.domain().index(v);
    if (im.base.is_boundary_index(idx)) return im.base.boundary_values()[std::size_t(idx)];
    int slot = im.pin_slot_of_domain[std::size_t(idx)];
    if (slot >= 0) return im.pin_value[std::size_t(slot)];
    return im.free_value(im.sys.compact_of[std::size_t(idx)]);
}

HarmonicField IncrementalPinSolver::full_field() const {
    const Impl& im = *impl_;
    const Domain& d = im.base.domain();
    std::vector<double> full(im.base.boundary_values());
    for (std::size_t c = 0; c < im.sys.free_idx.size(); ++c)
        full[std::size_t(im.sys.free_idx[c])] = im.free_value(int(c));
    for (std::size_t j = 0; j < im.pin_compact.size(); ++j)
        full[std::size_t(im.sys.free_idx[std::size_t(im.pin_compact[j])])] = im.pin_value[j];
    return HarmonicField(d, std::move(full));
}

}  // namespace detail

double residual(const DirichletProblem& p, const HarmonicField& f) {
    const Domain& d = p.domain();
    if (int(f.values().size()) != d.size())
        throw std::invalid_argument("residual: field/problem domain mismatch");
    std::array<Vertex, 4> buf;
    double worst = 0.0;
    for (int idx = 0; idx < d.size(); ++idx) {
        if (p.is_boundary_index(idx)) continue;
        Vertex v = d.vertex_at(idx);
        int cnt = d.neighbors(v, buf);
        double mean = 0.0;
        for (int k = 0; k < cnt; ++k) mean += f.values()[std::size_t(d.index(buf[std::size_t(k)]))];
        mean /= double(cnt);
        worst = std::max(worst, std::fabs(f.values()[std::size_t(idx)] - mean));
    }
    return worst;
}

}  // namespace lw
