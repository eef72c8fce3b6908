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

// Target graphs of the sequential preparation scheme: arbitrary graphs, the
// cubic lattice with shifted periodic boundary, and the bcc (Raussendorf)
// lattice with sparse cubic-grid labels.

#ifndef SEQCLUSTER_GRAPHS_H
#define SEQCLUSTER_GRAPHS_H

#include <array>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

namespace seqcluster {

/// 0-based cubic-grid coordinates.
struct Coord {
    int x = 0;
    int y = 0;
    int z = 0;
    bool operator==(const Coord &other) const = default;
};

enum class Plane { Vxy, Vyz, Vzx, Absent };
enum class Sublattice { Primal, Dual, None };

const char *plane_name(Plane plane);
const char *sublattice_name(Sublattice sublattice);

/// Plane and sublattice of a grid site of the bcc lattice.
struct SiteClass {
    Plane plane = Plane::Absent;
    Sublattice sublattice = Sublattice::None;
    bool operator==(const SiteClass &other) const = default;
};

/// Default parity offset. Along each axis an offset of 0 makes the primal
/// sublattice rough (and the dual smooth); an offset of 1 does the reverse.
/// (0,1,1) leaves the primal sublattice rough on the x faces only, so it
/// carries exactly one logical qubit of distance (L+1)/2.
inline constexpr std::array<int, 3> kDefaultParityOffset = {0, 1, 1};

/// Side lengths of a bcc lattice plus the parity offset selecting which
/// cubic-grid sites are present.
struct LatticeSpec {
    int L = 1;
    int M = 1;
    int N = 1;
    std::array<int, 3> parity_offset = kDefaultParityOffset;

    static LatticeSpec cube(int L, std::array<int, 3> offset = kDefaultParityOffset);

    /// Throws std::invalid_argument on nonpositive sides or offsets outside {0,1}.
    void validate() const;
    /// Throws std::invalid_argument unless L = M = N and L is odd.
    void validate_memory() const;
    int64_t grid_size() const { return int64_t(L) * M * N; }
    /// Code distance (L+1)/2 of a memory lattice.
    int distance() const { return (L + 1) / 2; }
    bool in_grid(const Coord &c) const;
    /// Number of odd coordinates after adding the parity offset.
    int odd_count(const Coord &c) const;
    bool operator==(const LatticeSpec &other) const = default;
};

/// label = 1 + x + L*y + L*M*z. Throws std::out_of_range outside the grid.
int64_t coords_label(const LatticeSpec &spec, const Coord &c);
/// Inverse of coords_label. Throws std::out_of_range outside [1, LMN].
Coord label_coords(const LatticeSpec &spec, int64_t label);
/// Plane/sublattice of the site with the given label (Absent for missing sites).
SiteClass classify_site(const LatticeSpec &spec, int64_t label);
/// Classification by coordinates; does not check the grid range.
SiteClass classify_coords(const LatticeSpec &spec, const Coord &c);

/// Immutable undirected simple graph on a set of positive integer labels.
/// Labels may be sparse (the bcc lattice keeps the gaps of the cubic grid).
class Graph {
   public:
    Graph() = default;

    /// Graph on the labels 1..n. Throws std::invalid_argument on self-loops,
    /// out-of-range endpoints or duplicate edges.
    static Graph from_edges(int n, const std::vector<std::pair<int, int>> &edges);
    /// Graph on an explicit (sparse) label set.
    static Graph from_labels(const std::vector<int> &labels, const std::vector<std::pair<int, int>> &edges);
    /// {"n": int, "edges": [[i, j], ...]} with 1-based labels.
    static Graph from_json(const nlohmann::json &doc);
    static Graph load_json(const std::string &path);
    nlohmann::json to_json() const;

    /// Largest label that may appear (the label space is 1..max_label).
    int max_label() const { return max_label_; }
    /// Present labels in ascending order.
    const std::vector<int> &vertices() const { return vertices_; }
    size_t num_vertices() const { return vertices_.size(); }
    size_t num_edges() const { return num_edges_; }
    bool has_vertex(int label) const;
    bool has_edge(int a, int b) const;
    /// Neighbours of a present vertex, ascending.
    const std::vector<int> &neighbors(int label) const;
    size_t degree(int label) const { return neighbors(label).size(); }
    size_t max_degree() const;
    /// Every edge once, as (smaller, larger), sorted.
    std::vector<std::pair<int, int>> edges() const;
    /// Subgraph induced on the given labels.
    Graph induced(const std::vector<int> &labels) const;

   private:
    static uint64_t key(int a, int b);
    void add_edge_checked(int a, int b);

    int max_label_ = 0;
    std::vector<int> vertices_;
    std::vector<char> present_;
    std::vector<std::vector<int>> adjacency_;
    std::unordered_set<uint64_t> edge_keys_;
    size_t num_edges_ = 0;
};

/// Cubic lattice G_c on labels 1..LMN with edges (i,i+1), (i,i+L), (i,i+LM).
Graph build_cubic(int L, int M, int N);
/// bcc lattice: grid sites with 1 or 2 odd offset-adjusted coordinates, joined
/// at unit grid distance. Throws std::invalid_argument if no site is present.
Graph build_bcc(const LatticeSpec &spec);

}  // namespace seqcluster

#endif  // SEQCLUSTER_GRAPHS_H
