#pragma once

#include <utility>
#include <vector>

namespace cdsurf {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double weight = 0.0;
};

// Exact maximum weight matching on a general graph (Galil's primal-dual
// blossom method, O(V^3)). Returns mate[v] = partner vertex or -1.
// With max_cardinality set, maximizes weight among maximum-cardinality
// matchings.
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

// Exact minimum weight perfect matching; throws std::invalid_argument when no
// perfect matching exists (odd vertex count included). Pairs are reported
// with u < v, sorted by u.
std::vector<std::pair<int, int>> min_weight_perfect_matching(int num_vertices,
                                                             const std::vector<WeightedEdge>& edges);

double matching_total_weight(const std::vector<std::pair<int, int>>& pairs,
                             const std::vector<WeightedEdge>& edges);

}  // namespace cdsurf
