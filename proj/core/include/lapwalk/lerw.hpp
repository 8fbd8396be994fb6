#pragma once

#include <vector>

#include "lapwalk/lattice.hpp"
#include "lapwalk/rng.hpp"
#include "lapwalk/walk.hpp"

namespace lw {

// Chronological loop erasure: whenever the path revisits a vertex, the cycle
// in between is removed. Output is self-avoiding with the same endpoints.
std::vector<Vertex> loop_erase(const std::vector<Vertex>& path);

// Simple random walk on the domain graph from s, absorbed at w, loops erased.
// Uniform over graph neighbors (reduced degree at an open frame).
std::vector<Vertex> sample_lerw(const Domain& d, Vertex s, Vertex w, SplitMix64& rng,
                                long long max_steps = 10'000'000);

// Exhaustive law of the Laplacian-alpha walk on a tiny domain: every
// self-avoiding path s -> w with its exact probability, one Dirichlet solve
// per prefix. `deficit` collects the mass of trapped prefixes.
struct PathDistribution {
    std::vector<std::vector<Vertex>> paths;  // DFS order, fixed neighbor order
    std::vector<double> probabilities;
    double deficit = 0.0;

    int find(const std::vector<Vertex>& path) const;
    double total() const;  // sum of probabilities + deficit
};

PathDistribution exact_alpha_distribution(Vertex s, Vertex w, const Domain& d, AlphaSpec alpha);
PathDistribution exact_alpha1_distribution(Vertex s, Vertex w, const Domain& d);

struct ChiSquare {
    double statistic = 0.0;
    double p_value = 1.0;
    int dof = 0;
    int pooled_cells = 0;  // retained cells after tail pooling
};

// Goodness of fit of per-path sample counts against the exact distribution;
// cells with expected count < 5 are pooled into a tail cell.
ChiSquare chi_square_compare(const std::vector<long long>& observed,
                             const PathDistribution& expected);

}  // namespace lw
