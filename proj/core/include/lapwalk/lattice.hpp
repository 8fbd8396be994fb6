#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lw {

// Lattice point of Z^2, complex-style: (re, im) <-> re + im*i.
struct Vertex {
    int re = 0;
    int im = 0;

    friend bool operator==(Vertex a, Vertex b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(Vertex a, Vertex b) { return !(a == b); }
    friend bool operator<(Vertex a, Vertex b) {
        return a.im != b.im ? a.im < b.im : a.re < b.re;
    }
    friend Vertex operator+(Vertex a, Vertex b) { return {a.re + b.re, a.im + b.im}; }
    friend Vertex operator-(Vertex a, Vertex b) { return {a.re - b.re, a.im - b.im}; }
};

struct VertexHash {
    std::size_t operator()(Vertex v) const {
        std::uint64_t k = (std::uint64_t(std::uint32_t(v.re)) << 32) | std::uint32_t(v.im);
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        return std::size_t(k);
    }
};

inline int cheb_norm(Vertex v) {
    int a = v.re < 0 ? -v.re : v.re;
    int b = v.im < 0 ? -v.im : v.im;
    return a > b ? a : b;
}

inline double l2_norm(Vertex v) {
    return std::sqrt(double(v.re) * v.re + double(v.im) * v.im);
}

// Step offsets in the fixed enumeration order +1, +i, -1, -i.
inline constexpr std::array<Vertex, 4> kSteps{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// What the outermost ring of a Box means for Dirichlet problems:
//   open    - frame vertices are ordinary free vertices with reduced degree
//   absorb0 - frame vertices are boundary at value 0 (lower truncation bracket)
//   absorb1 - frame vertices are boundary at value 1 (upper truncation bracket)
enum class FramePolicy { open, absorb0, absorb1 };

enum class DomainKind { box, torus };

// Finite lattice graph: a truncated box of Z^2 or an n x n torus, plus an
// optional absorbing overlay (vertices clamped to fixed values in [0,1]).
class Domain {
  public:
    static Domain box(Vertex center, int radius, FramePolicy fp = FramePolicy::open) {
        if (radius < 0) throw std::invalid_argument("Domain::box: radius must be >= 0");
        return box_rect({center.re - radius, center.im - radius},
                        {center.re + radius, center.im + radius}, fp);
    }
    // Rectangular generalization (degenerate rows/columns allowed): covers the
    // path-graph and even-sided grid-graph cases the square constructor cannot.
    static Domain box_rect(Vertex lo, Vertex hi, FramePolicy fp = FramePolicy::open) {
        if (lo.re > hi.re || lo.im > hi.im)
            throw std::invalid_argument("Domain::box_rect: empty box");
        Domain d;
        d.kind_ = DomainKind::box;
        d.lo_ = lo;
        d.hi_ = hi;
        d.frame_policy_ = fp;
        return d;
    }
    static Domain torus(int n) {
        if (n < 3) throw std::invalid_argument("Domain::torus: n must be >= 3");
        Domain d;
        d.kind_ = DomainKind::torus;
        d.lo_ = {0, 0};
        d.hi_ = {n - 1, n - 1};
        d.torus_n_ = n;
        return d;
    }

    DomainKind kind() const { return kind_; }
    FramePolicy frame_policy() const { return frame_policy_; }
    int torus_n() const { return torus_n_; }
    Vertex lo() const { return lo_; }
    Vertex hi() const { return hi_; }
    int width() const { return hi_.re - lo_.re + 1; }
    int height() const { return hi_.im - lo_.im + 1; }
    int size() const { return width() * height(); }

    // Torus coordinates are canonicalized to [0,n)^2; boxes pass through.
    Vertex canon(Vertex v) const {
        if (kind_ == DomainKind::box) return v;
        int n = torus_n_;
        int re = v.re % n;
        int im = v.im % n;
        if (re < 0) re += n;
        if (im < 0) im += n;
        return {re, im};
    }

    bool contains(Vertex v) const {
        if (kind_ == DomainKind::torus) return true;  // after canon every point maps in
        return v.re >= lo_.re && v.re <= hi_.re && v.im >= lo_.im && v.im <= hi_.im;
    }

    bool on_frame(Vertex v) const {
        if (kind_ != DomainKind::box) return false;
        return v.re == lo_.re || v.re == hi_.re || v.im == lo_.im || v.im == hi_.im;
    }

    int index(Vertex v) const {
        v = canon(v);
        if (!contains(v)) throw std::domain_error("Domain::index: vertex outside domain");
        return (v.re - lo_.re) + (v.im - lo_.im) * width();
    }

    Vertex vertex_at(int idx) const {
        return {lo_.re + idx % width(), lo_.im + idx / width()};
    }

    // Neighbors in the fixed order +1, +i, -1, -i; boxes drop out-of-range
    // slots, tori wrap. Returns the count written into `out`.
    int neighbors(Vertex v, std::array<Vertex, 4>& out) const {
        v = canon(v);
        if (!contains(v)) throw std::domain_error("Domain::neighbors: vertex outside domain");
        int n = 0;
        for (Vertex s : kSteps) {
            if (kind_ == DomainKind::torus) {
                out[n++] = canon(v + s);
            } else if (contains(v + s)) {
                out[n++] = v + s;
            }
        }
        return n;
    }

    std::vector<Vertex> neighbor_list(Vertex v) const {
        std::array<Vertex, 4> buf;
        int n = neighbors(v, buf);
        return std::vector<Vertex>(buf.begin(), buf.begin() + n);
    }

    // Signed single-step delta from -> to, unwrapping torus coordinates;
    // needed by turn detection, where a wrap step (0,0)->(0,n-1) must read
    // as (0,-1) rather than (0,n-1).
    Vertex step_delta(Vertex from, Vertex to) const {
        Vertex d = canon(to) - canon(from);
        if (kind_ == DomainKind::torus) {
            int n = torus_n_;
            if (d.re > n / 2) d.re -= n;
            if (d.re < -(n / 2)) d.re += n;
            if (d.im > n / 2) d.im -= n;
            if (d.im < -(n / 2)) d.im += n;
        }
        return d;
    }

    const std::vector<std::pair<Vertex, double>>& overlay() const { return overlay_; }
    void add_overlay(Vertex v, double value) {
        if (!contains(canon(v)))
            throw std::invalid_argument("Domain::add_overlay: vertex outside domain");
        if (value < 0.0 || value > 1.0)
            throw std::invalid_argument("Domain::add_overlay: value outside [0,1]");
        overlay_.emplace_back(canon(v), value);
    }

    std::string describe() const {
        if (kind_ == DomainKind::torus) return "torus:" + std::to_string(torus_n_);
        std::string fp = frame_policy_ == FramePolicy::open      ? "open"
                         : frame_policy_ == FramePolicy::absorb0 ? "absorb0"
                                                                 : "absorb1";
        return "box[(" + std::to_string(lo_.re) + "," + std::to_string(lo_.im) + ")..(" +
               std::to_string(hi_.re) + "," + std::to_string(hi_.im) + ")," + fp + "]";
    }

  private:
    DomainKind kind_ = DomainKind::box;
    Vertex lo_{0, 0}, hi_{0, 0};
    FramePolicy frame_policy_ = FramePolicy::open;
    int torus_n_ = 0;
    std::vector<std::pair<Vertex, double>> overlay_;
};

// I = [-x,0] on the real axis: {(-x,0), ..., (0,0)}, size x+1.
inline std::vector<Vertex> build_interval(int x) {
    if (x < 1) throw std::invalid_argument("build_interval: x must be >= 1");
    std::vector<Vertex> out;
    out.reserve(std::size_t(x) + 1);
    for (int k = -x; k <= 0; ++k) out.push_back({k, 0});
    return out;
}

// Discrete diagonal D = {(k,k) : |k| <= R}.
inline std::vector<Vertex> build_diagonal(int radius) {
    if (radius < 1) throw std::invalid_argument("build_diagonal: radius must be >= 1");
    std::vector<Vertex> out;
    out.reserve(std::size_t(2) * radius + 1);
    for (int k = -radius; k <= radius; ++k) out.push_back({k, k});
    return out;
}

// Opposite diagonal D* = {(k,-k) : |k| <= R}.
inline std::vector<Vertex> build_diagonal_star(int radius) {
    if (radius < 1) throw std::invalid_argument("build_diagonal_star: radius must be >= 1");
    std::vector<Vertex> out;
    out.reserve(std::size_t(2) * radius + 1);
    for (int k = -radius; k <= radius; ++k) out.push_back({k, -k});
    return out;
}

// The adjacency-preserving bijections of Z^2 used in the reflection arguments.
struct Isometry {
    enum class Kind { reflect_D, reflect_Dstar, reflect_real_axis, reflect_imag_axis, translate };
    Kind kind = Kind::reflect_D;
    Vertex shift{0, 0};  // translate only

    Vertex operator()(Vertex v) const {
        switch (kind) {
            case Kind::reflect_D: return {v.im, v.re};
            case Kind::reflect_Dstar: return {-v.im, -v.re};
            case Kind::reflect_real_axis: return {v.re, -v.im};
            case Kind::reflect_imag_axis: return {-v.re, v.im};
            case Kind::translate: return v + shift;
        }
        return v;
    }

    static Isometry reflect_D() { return {Kind::reflect_D, {0, 0}}; }
    static Isometry reflect_Dstar() { return {Kind::reflect_Dstar, {0, 0}}; }
    static Isometry reflect_real_axis() { return {Kind::reflect_real_axis, {0, 0}}; }
    static Isometry reflect_imag_axis() { return {Kind::reflect_imag_axis, {0, 0}}; }
    static Isometry translate(Vertex by) { return {Kind::translate, by}; }
};

inline Vertex apply_isometry(const Isometry& iso, Vertex v) { return iso(v); }

}  // namespace lw
