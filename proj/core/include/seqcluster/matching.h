// Copyright 2026 The seqcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact weighted matching on general graphs (Edmonds' blossom algorithm with
// integer dual variables) and the minimum-weight perfect matching built on it.

#ifndef SEQCLUSTER_MATCHING_H
#define SEQCLUSTER_MATCHING_H

#include <cstdint>
#include <vector>

namespace seqcluster {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    int64_t weight = 0;
};

/// Maximum-weight matching. With `max_cardinality` the result is the
/// maximum-weight matching among those of maximum cardinality. Returns the mate
/// of every vertex (-1 if unmatched). Throws std::invalid_argument on self-loops
/// or endpoints outside [0, num_vertices).
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge> &edges,
                                     bool max_cardinality = false);

struct PerfectMatching {
    std::vector<int> mate;
    int64_t weight = 0;
};

/// Minimum-weight perfect matching. Weights must be nonnegative. Throws
/// std::runtime_error if the graph has no perfect matching.
PerfectMatching min_weight_perfect_matching(int num_vertices, const std::vector<WeightedEdge> &edges);

}  // namespace seqcluster

#endif  // SEQCLUSTER_MATCHING_H
