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

#include "seqcluster/graphs.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace seqcluster {

const char *plane_name(Plane plane) {
    switch (plane) {
        case Plane::Vxy:
            return "xy";
        case Plane::Vyz:
            return "yz";
        case Plane::Vzx:
            return "zx";
        default:
            return "absent";
    }
}

const char *sublattice_name(Sublattice sublattice) {
    switch (sublattice) {
        case Sublattice::Primal:
            return "primal";
        case Sublattice::Dual:
            return "dual";
        default:
            return "none";
    }
}

LatticeSpec LatticeSpec::cube(int L, std::array<int, 3> offset) {
    LatticeSpec spec;
    spec.L = spec.M = spec.N = L;
    spec.parity_offset = offset;
    return spec;
}

void LatticeSpec::validate() const {
    if (L < 1 || M < 1 || N < 1) {
        throw std::invalid_argument(
            "lattice sides must be positive, got " + std::to_string(L) + "x" + std::to_string(M) + "x" +
            std::to_string(N));
    }
    for (int o : parity_offset) {
        if (o != 0 && o != 1) {
            throw std::invalid_argument("parity offset entries must be 0 or 1");
        }
    }
}

void LatticeSpec::validate_memory() const {
    validate();
    if (L != M || M != N) {
        throw std::invalid_argument("memory lattices must be cubic (L = M = N)");
    }
    if (L % 2 == 0) {
        throw std::invalid_argument("L must be odd for memory runs, got " + std::to_string(L));
    }
}

bool LatticeSpec::in_grid(const Coord &c) const {
    return c.x >= 0 && c.x < L && c.y >= 0 && c.y < M && c.z >= 0 && c.z < N;
}

int LatticeSpec::odd_count(const Coord &c) const {
    return ((c.x + parity_offset[0]) & 1) + ((c.y + parity_offset[1]) & 1) + ((c.z + parity_offset[2]) & 1);
}

int64_t coords_label(const LatticeSpec &spec, const Coord &c) {
    if (!spec.in_grid(c)) {
        throw std::out_of_range(
            "coordinates (" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) +
            ") outside the grid");
    }
    return 1 + int64_t(c.x) + int64_t(spec.L) * c.y + int64_t(spec.L) * spec.M * c.z;
}

Coord label_coords(const LatticeSpec &spec, int64_t label) {
    if (label < 1 || label > spec.grid_size()) {
        throw std::out_of_range("label " + std::to_string(label) + " outside the grid");
    }
    int64_t r = label - 1;
    Coord c;
    c.x = int(r % spec.L);
    r /= spec.L;
    c.y = int(r % spec.M);
    c.z = int(r / spec.M);
    return c;
}

SiteClass classify_coords(const LatticeSpec &spec, const Coord &c) {
    int px = (c.x + spec.parity_offset[0]) & 1;
    int py = (c.y + spec.parity_offset[1]) & 1;
    int pz = (c.z + spec.parity_offset[2]) & 1;
    int odd = px + py + pz;
    SiteClass result;
    if (odd == 2) {
        // Face qubit: its neighbours lie in the plane normal to the even axis.
        result.sublattice = Sublattice::Primal;
        result.plane = !pz ? Plane::Vxy : (!px ? Plane::Vyz : Plane::Vzx);
    } else if (odd == 1) {
        // Edge qubit: its neighbours lie in the plane normal to the odd axis.
        result.sublattice = Sublattice::Dual;
        result.plane = pz ? Plane::Vxy : (px ? Plane::Vyz : Plane::Vzx);
    }
    return result;
}

SiteClass classify_site(const LatticeSpec &spec, int64_t label) {
    return classify_coords(spec, label_coords(spec, label));
}

uint64_t Graph::key(int a, int b) {
    if (a > b) {
        std::swap(a, b);
    }
    return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}

bool Graph::has_vertex(int label) const {
    return label >= 1 && label <= max_label_ && present_[label];
}

bool Graph::has_edge(int a, int b) const {
    if (!has_vertex(a) || !has_vertex(b) || a == b) {
        return false;
    }
    return edge_keys_.count(key(a, b)) != 0;
}

const std::vector<int> &Graph::neighbors(int label) const {
    if (!has_vertex(label)) {
        throw std::out_of_range("vertex " + std::to_string(label) + " is not in the graph");
    }
    return adjacency_[label];
}

size_t Graph::max_degree() const {
    size_t best = 0;
    for (int v : vertices_) {
        best = std::max(best, adjacency_[v].size());
    }
    return best;
}

void Graph::add_edge_checked(int a, int b) {
    if (a == b) {
        throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
    }
    if (!has_vertex(a) || !has_vertex(b)) {
        throw std::invalid_argument(
            "edge (" + std::to_string(a) + "," + std::to_string(b) + ") references a missing vertex");
    }
    if (!edge_keys_.insert(key(a, b)).second) {
        throw std::invalid_argument("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    num_edges_++;
}

Graph Graph::from_labels(const std::vector<int> &labels, const std::vector<std::pair<int, int>> &edges) {
    Graph g;
    for (int v : labels) {
        if (v < 1) {
            throw std::invalid_argument("vertex labels must be positive");
        }
        g.max_label_ = std::max(g.max_label_, v);
    }
    g.present_.assign(g.max_label_ + 1, 0);
    g.adjacency_.resize(g.max_label_ + 1);
    for (int v : labels) {
        if (g.present_[v]) {
            throw std::invalid_argument("duplicate vertex label " + std::to_string(v));
        }
        g.present_[v] = 1;
    }
    g.vertices_ = labels;
    std::sort(g.vertices_.begin(), g.vertices_.end());
    g.edge_keys_.reserve(edges.size() * 2);
    for (const auto &[a, b] : edges) {
        g.add_edge_checked(a, b);
    }
    for (auto &adj : g.adjacency_) {
        std::sort(adj.begin(), adj.end());
    }
    return g;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>> &edges) {
    if (n < 0) {
        throw std::invalid_argument("vertex count must be nonnegative");
    }
    std::vector<int> labels(n);
    for (int i = 0; i < n; i++) {
        labels[i] = i + 1;
    }
    return from_labels(labels, edges);
}

Graph Graph::from_json(const nlohmann::json &doc) {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
        throw std::invalid_argument("graph JSON must be an object with keys \"n\" and \"edges\"");
    }
    for (const auto &item : doc.items()) {
        if (item.key() != "n" && item.key() != "edges") {
            throw std::invalid_argument("unknown key in graph JSON: " + item.key());
        }
    }
    int n = doc.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto &e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("each edge must be a pair [i, j]");
        }
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return from_edges(n, edges);
}

Graph Graph::load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open graph file " + path);
    }
    return from_json(nlohmann::json::parse(in));
}

nlohmann::json Graph::to_json() const {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &[a, b] : this->edges()) {
        edges.push_back({a, b});
    }
    return {{"n", max_label_}, {"edges", edges}};
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(num_edges_);
    for (int v : vertices_) {
        for (int w : adjacency_[v]) {
            if (v < w) {
                out.emplace_back(v, w);
            }
        }
    }
    return out;
}

Graph Graph::induced(const std::vector<int> &labels) const {
    std::vector<char> keep(max_label_ + 1, 0);
    for (int v : labels) {
        if (!has_vertex(v)) {
            throw std::invalid_argument("induced subgraph label " + std::to_string(v) + " is not a vertex");
        }
        keep[v] = 1;
    }
    std::vector<std::pair<int, int>> sub;
    for (const auto &[a, b] : edges()) {
        if (keep[a] && keep[b]) {
            sub.emplace_back(a, b);
        }
    }
    return from_labels(labels, sub);
}

Graph build_cubic(int L, int M, int N) {
    if (L < 1 || M < 1 || N < 1) {
        throw std::invalid_argument("cubic lattice sides must be positive");
    }
    int64_t n64 = int64_t(L) * M * N;
    if (n64 > (int64_t(1) << 30)) {
        throw std::invalid_argument("cubic lattice too large");
    }
    int n = int(n64);
    int lm = L * M;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(size_t(3) * n);
    for (int i = 1; i + 1 <= n; i++) {
        edges.emplace_back(i, i + 1);
    }
    for (int i = 1; i + L <= n; i++) {
        if (L != 1) {
            edges.emplace_back(i, i + L);
        }
    }
    for (int i = 1; i + lm <= n; i++) {
        if (lm != 1 && lm != L) {
            edges.emplace_back(i, i + lm);
        }
    }
    return Graph::from_edges(n, edges);
}

Graph build_bcc(const LatticeSpec &spec) {
    spec.validate();
    std::vector<int> labels;
    std::vector<std::pair<int, int>> edges;
    auto present = [&](const Coord &c) {
        int odd = spec.odd_count(c);
        return spec.in_grid(c) && (odd == 1 || odd == 2);
    };
    for (int z = 0; z < spec.N; z++) {
        for (int y = 0; y < spec.M; y++) {
            for (int x = 0; x < spec.L; x++) {
                Coord c{x, y, z};
                if (!present(c)) {
                    continue;
                }
                int label = int(coords_label(spec, c));
                labels.push_back(label);
                const Coord forward[3] = {{x + 1, y, z}, {x, y + 1, z}, {x, y, z + 1}};
                for (const Coord &d : forward) {
                    if (present(d)) {
                        edges.emplace_back(label, int(coords_label(spec, d)));
                    }
                }
            }
        }
    }
    if (labels.empty()) {
        throw std::invalid_argument("lattice spec leaves no present sites");
    }
    return Graph::from_labels(labels, edges);
}

}  // namespace seqcluster
