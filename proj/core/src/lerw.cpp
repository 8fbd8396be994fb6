#include "lapwalk/lerw.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "lapwalk/stats.hpp"

namespace lw {

std::vector<Vertex> loop_erase(const std::vector<Vertex>& path) {
    if (path.empty()) return {};
    std::vector<Vertex> out;
    std::unordered_map<Vertex, std::size_t, VertexHash> pos;
    out.reserve(path.size());
    for (Vertex v : path) {
        auto it = pos.find(v);
        if (it != pos.end()) {
            while (out.size() > it->second + 1) {
                pos.erase(out.back());
                out.pop_back();
            }
        } else {
            pos.emplace(v, out.size());
            out.push_back(v);
        }
    }
    return out;
}

std::vector<Vertex> sample_lerw(const Domain& d, Vertex s, Vertex w, SplitMix64& rng,
                                long long max_steps) {
    s = d.canon(s);
    w = d.canon(w);
    if (!d.contains(s) || !d.contains(w))
        throw std::invalid_argument("sample_lerw: endpoints must lie in the domain");
    std::vector<Vertex> raw{s};
    Vertex cur = s;
    long long steps = 0;
    std::array<Vertex, 4> nb;
    while (cur != w) {
        if (++steps > max_steps)
            throw std::runtime_error("sample_lerw: step budget exhausted before absorption");
        int deg = d.neighbors(cur, nb);
        if (deg == 0) throw std::invalid_argument("sample_lerw: isolated start vertex");
        cur = nb[rng.next_below(std::uint64_t(deg))];
        raw.push_back(cur);
    }
    return loop_erase(raw);
}

int PathDistribution::find(const std::vector<Vertex>& path) const {
    for (std::size_t k = 0; k < paths.size(); ++k)
        if (paths[k] == path) return int(k);
    return -1;
}

double PathDistribution::total() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), deficit);
}

namespace {

void enumerate(std::vector<Vertex>& path, Vertex w, const Domain& d, double alpha,
               double product, PathDistribution& out) {
    StepDistribution step = step_distribution(path, w, d, alpha);
    if (step.trapped) {
        out.deficit += product;
        return;
    }
    for (const auto& [v, p] : step.probabilities) {
        if (p <= 0.0) continue;
        path.push_back(v);
        if (v == w) {
            out.paths.push_back(path);
            out.probabilities.push_back(product * p);
        } else {
            enumerate(path, w, d, alpha, product * p, out);
        }
        path.pop_back();
    }
}

}  // namespace

PathDistribution exact_alpha_distribution(Vertex s, Vertex w, const Domain& d, AlphaSpec alpha) {
    if (d.size() > 16)
        throw std::invalid_argument("exact_alpha_distribution: domain larger than 16 vertices");
    if (alpha.infinite)
        throw std::invalid_argument("exact_alpha_distribution: alpha must be finite");
    s = d.canon(s);
    w = d.canon(w);
    if (!d.contains(s) || !d.contains(w))
        throw std::invalid_argument("exact_alpha_distribution: endpoints must lie in the domain");
    PathDistribution out;
    if (s == w) {
        out.paths.push_back({s});
        out.probabilities.push_back(1.0);
        return out;
    }
    std::vector<Vertex> path{s};
    enumerate(path, w, d, alpha.alpha, 1.0, out);
    return out;
}

PathDistribution exact_alpha1_distribution(Vertex s, Vertex w, const Domain& d) {
    return exact_alpha_distribution(s, w, d, AlphaSpec::finite(1.0));
}

ChiSquare chi_square_compare(const std::vector<long long>& observed,
                             const PathDistribution& expected) {
    if (observed.empty()) throw std::invalid_argument("chi_square_compare: empty observation set");
    if (observed.size() != expected.paths.size())
        throw std::invalid_argument("chi_square_compare: counts misaligned with the distribution");

    long long n = std::accumulate(observed.begin(), observed.end(), 0LL);
    if (n <= 0) throw std::invalid_argument("chi_square_compare: no observations");
    double mass = 0.0;
    for (double p : expected.probabilities) mass += p;
    if (mass <= 0.0) throw std::invalid_argument("chi_square_compare: distribution without mass");

    // Cells sorted by expected count ascending; pool the small tail until the
    // pooled bucket itself reaches the threshold.
    const double kMinExpected = 5.0;
    std::vector<std::size_t> order(observed.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return expected.probabilities[a] < expected.probabilities[b];
    });

    double pooled_exp = 0.0;
    long long pooled_obs = 0;
    std::size_t cut = 0;
    for (; cut < order.size(); ++cut) {
        double e = double(n) * expected.probabilities[order[cut]] / mass;
        if (e >= kMinExpected && pooled_exp >= kMinExpected) break;
        if (e >= kMinExpected && pooled_exp == 0.0) break;
        pooled_exp += e;
        pooled_obs += observed[order[cut]];
    }

    ChiSquare res;
    double stat = 0.0;
    int cells = 0;
    if (pooled_exp > 0.0) {
        stat += (double(pooled_obs) - pooled_exp) * (double(pooled_obs) - pooled_exp) / pooled_exp;
        ++cells;
    }
    for (std::size_t k = cut; k < order.size(); ++k) {
        double e = double(n) * expected.probabilities[order[k]] / mass;
        double o = double(observed[order[k]]);
        stat += (o - e) * (o - e) / e;
        ++cells;
    }
    res.statistic = stat;
    res.pooled_cells = cells;
    res.dof = cells > 1 ? cells - 1 : 0;
    res.p_value = chi_square_p_value(stat, res.dof);
    return res;
}

}  // namespace lw
