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

#include "seqcluster/decoder.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "seqcluster/matching.h"

namespace seqcluster {

namespace {

constexpr int64_t kUnreached = std::numeric_limits<int64_t>::max() / 4;

int axis_value(const Coord &c, int axis) { return axis == 0 ? c.x : (axis == 1 ? c.y : c.z); }

void set_axis(Coord &c, int axis, int value) {
    if (axis == 0) {
        c.x = value;
    } else if (axis == 1) {
        c.y = value;
    } else {
        c.z = value;
    }
}

/// Union-find with path halving over a fixed node count.
struct DisjointSets {
    explicit DisjointSets(int n) : parent(size_t(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // Keep the smaller id as the root so roots are deterministic.
        if (a < b) std::swap(a, b);
        parent[a] = b;
    }
    std::vector<int> parent;
};

}  // namespace

// ---------------------------------------------------------------------------
// Sublattice graph

SublatticeGraph::SublatticeGraph(const LatticeSpec &spec, Sublattice sublattice)
    : spec_(spec), sublattice_(sublattice) {
    spec.validate();
    if (sublattice == Sublattice::None) {
        throw std::invalid_argument("decoder sublattice must be primal or dual");
    }
    const int cell_parity = sublattice == Sublattice::Primal ? 1 : 0;
    const int64_t n = spec.grid_size();
    cell_lookup_.assign(size_t(n) + 1, -1);
    for (int64_t label = 1; label <= n; label++) {
        Coord c = label_coords(spec, label);
        Coord adj{c.x + spec.parity_offset[0], c.y + spec.parity_offset[1], c.z + spec.parity_offset[2]};
        if ((adj.x & 1) == cell_parity && (adj.y & 1) == cell_parity && (adj.z & 1) == cell_parity) {
            cell_lookup_[label] = int(cells_.size());
            cells_.push_back(adj);
        }
    }

    // Every qubit of the sublattice joins the two cells one step along its "cell" axis:
    // the even axis of a face qubit (primal) or the odd axis of an edge qubit (dual).
    struct RawEdge {
        int label;
        int a;       // cell index or -1
        int b;       // cell index or -1
        int axis;
        int side_a;  // side of the missing endpoint when a/b is -1
    };
    std::vector<RawEdge> raw;
    std::set<std::pair<int, int>> rough;
    for (int64_t label = 1; label <= n; label++) {
        SiteClass cls = classify_site(spec, label);
        if (cls.sublattice != sublattice) continue;
        Coord c = label_coords(spec, label);
        int axis = -1;
        for (int a = 0; a < 3; a++) {
            int parity = (axis_value(c, a) + spec.parity_offset[a]) & 1;
            if (parity != cell_parity) axis = a;
        }
        int ends[2];
        for (int side = 0; side < 2; side++) {
            Coord nb = c;
            set_axis(nb, axis, axis_value(c, axis) + (side == 0 ? -1 : 1));
            if (spec.in_grid(nb)) {
                ends[side] = cell_lookup_[coords_label(spec, nb)];
            } else {
                ends[side] = -1;
                rough.insert({axis, side});
            }
        }
        if (ends[0] < 0 && ends[1] < 0) {
            throw std::invalid_argument("lattice is too thin to decode (a qubit touches two rough faces)");
        }
        raw.push_back(RawEdge{int(label), ends[0], ends[1], axis, ends[0] < 0 ? 0 : 1});
    }
    rough_faces_.assign(rough.begin(), rough.end());
    if (rough_faces_.size() == 2 && rough_faces_[0].first == rough_faces_[1].first) {
        num_boundaries_ = 2;
        logical_axis_ = rough_faces_[0].first;
    } else {
        num_boundaries_ = rough_faces_.empty() ? 0 : 1;
    }

    const int C = num_cells();
    edge_of_label_.assign(size_t(n) + 1, {-1, -1});
    adjacency_.assign(size_t(num_nodes()), {});
    for (const RawEdge &e : raw) {
        int a = e.a, b = e.b;
        if (a < 0) a = C + (num_boundaries_ == 2 ? e.side_a : 0);
        if (b < 0) b = C + (num_boundaries_ == 2 ? e.side_a : 0);
        edge_of_label_[e.label] = {a, b};
        adjacency_[a].push_back({b, e.label});
        adjacency_[b].push_back({a, e.label});
    }
}

int SublatticeGraph::cell_index(const Coord &adjusted) const {
    Coord c{adjusted.x - spec_.parity_offset[0], adjusted.y - spec_.parity_offset[1],
            adjusted.z - spec_.parity_offset[2]};
    if (!spec_.in_grid(c)) return -1;
    return cell_lookup_[coords_label(spec_, c)];
}

std::pair<int, int> SublatticeGraph::qubit_nodes(int label) const {
    if (label < 1 || size_t(label) >= edge_of_label_.size()) return {-1, -1};
    return edge_of_label_[label];
}

std::vector<int> SublatticeGraph::cell_qubits(int index) const {
    std::vector<int> out;
    for (const Adjacent &a : adjacency_[index]) out.push_back(a.label);
    std::sort(out.begin(), out.end());
    return out;
}

MatchingProblem SublatticeGraph::build_matching(const std::vector<int> &flipped_labels,
                                                const std::vector<int> &lost_labels) const {
    const int C = num_cells();
    const int N = num_nodes();
    MatchingProblem problem;
    problem.sublattice = sublattice_;
    problem.has_logical = num_boundaries_ == 2;

    std::vector<char> lost(edge_of_label_.size(), 0);
    DisjointSets sets(N);
    for (int label : lost_labels) {
        auto [a, b] = qubit_nodes(label);
        if (a < 0) continue;
        lost[label] = 1;
        sets.unite(a, b);
    }
    std::vector<char> parity(static_cast<size_t>(N), 0);
    std::vector<std::pair<int, int>> intact_flips;
    for (int label : flipped_labels) {
        auto [a, b] = qubit_nodes(label);
        if (a < 0 || lost[label]) continue;
        int ra = sets.find(a), rb = sets.find(b);
        parity[ra] ^= 1;
        parity[rb] ^= 1;
        intact_flips.emplace_back(ra, rb);
    }
    int root0 = num_boundaries_ >= 1 ? sets.find(C) : -1;
    int root1 = num_boundaries_ == 2 ? sets.find(C + 1) : -1;
    problem.logical_erased = problem.has_logical && root0 == root1;
    if (problem.logical_erased) {
        // The outcome is a coin flip whatever the matching does.
        return problem;
    }
    if (problem.has_logical) {
        for (auto [ra, rb] : intact_flips) {
            if ((ra == root0) != (rb == root0)) problem.cut_parity ^= 1;
        }
    }

    std::vector<int> defect_roots;
    std::vector<char> seen(static_cast<size_t>(N), 0);
    for (int v = 0; v < C; v++) {
        int r = sets.find(v);
        if (!parity[r] || r == root0 || r == root1 || seen[r]) continue;
        seen[r] = 1;
        problem.defect_cells.push_back(v);
        defect_roots.push_back(r);
    }

    const size_t k = problem.defect_cells.size();
    problem.distance.assign(k, std::vector<int64_t>(k, 0));
    problem.boundary_distance.assign(k, -1);
    problem.boundary_side.assign(k, 0);
    std::vector<int64_t> dist(static_cast<size_t>(N));
    std::deque<int> queue;
    for (size_t i = 0; i < k; i++) {
        std::fill(dist.begin(), dist.end(), kUnreached);
        int source = problem.defect_cells[i];
        dist[source] = 0;
        queue.push_back(source);
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            if (u >= C) continue;  // paths never pass through a boundary node
            for (const Adjacent &adj : adjacency_[u]) {
                int64_t w = lost[adj.label] ? 0 : 1;
                if (dist[u] + w < dist[adj.node]) {
                    dist[adj.node] = dist[u] + w;
                    if (w == 0) {
                        queue.push_front(adj.node);
                    } else {
                        queue.push_back(adj.node);
                    }
                }
            }
        }
        for (size_t j = 0; j < k; j++) problem.distance[i][j] = dist[problem.defect_cells[j]];
        if (num_boundaries_ >= 1) {
            int64_t b0 = dist[C];
            int64_t b1 = num_boundaries_ == 2 ? dist[C + 1] : kUnreached;
            problem.boundary_side[i] = b1 < b0 ? 1 : 0;
            problem.boundary_distance[i] = std::min(b0, b1);
        }
    }
    return problem;
}

bool SublatticeGraph::logical_failure(const MatchingProblem &problem, const Pairing &pairing, Rng &rng) const {
    if (!problem.has_logical) return false;
    if (problem.logical_erased) return (rng() & 1) != 0;
    int parity = problem.cut_parity;
    for (size_t i = 0; i < pairing.partner.size(); i++) {
        if (pairing.partner[i] < 0 && problem.boundary_side[i] == 0) parity ^= 1;
    }
    return parity != 0;
}

// ---------------------------------------------------------------------------
// Matching

Pairing mwpm(const MatchingProblem &problem) {
    const int k = int(problem.defect_cells.size());
    Pairing out;
    out.partner.assign(size_t(k), -1);
    if (k == 0) return out;
    const bool boundary = !problem.boundary_distance.empty() && problem.boundary_distance[0] >= 0;
    if (!boundary && k % 2 == 1) {
        throw std::runtime_error("odd number of defects on a sublattice without rough boundary");
    }
    // Defects are vertices 0..k-1; with a boundary each defect i gets a twin k+i
    // (edge weight = boundary distance) and twins pair among themselves for free.
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < k; i++) {
        for (int j = i + 1; j < k; j++) {
            int64_t d = problem.distance[i][j];
            if (d >= kUnreached) continue;
            // A pair is never better than both boundary matches when d >= b_i + b_j.
            if (boundary && d >= problem.boundary_distance[i] + problem.boundary_distance[j]) continue;
            edges.push_back({i, j, d});
        }
    }
    int n = k;
    if (boundary) {
        n = 2 * k;
        for (int i = 0; i < k; i++) edges.push_back({i, k + i, problem.boundary_distance[i]});
        for (int i = 0; i < k; i++) {
            for (int j = i + 1; j < k; j++) edges.push_back({k + i, k + j, 0});
        }
    }
    PerfectMatching pm = min_weight_perfect_matching(n, edges);
    out.weight = pm.weight;
    for (int i = 0; i < k; i++) {
        int m = pm.mate[i];
        out.partner[i] = m < k ? m : -1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decoder

Decoder::Decoder(const LatticeSpec &spec)
    : spec_(spec), primal_(spec, Sublattice::Primal), dual_(spec, Sublattice::Dual) {}

void Decoder::check_labels(const std::vector<int> &labels, const char *what) const {
    for (int label : labels) {
        if (label < 1 || label > spec_.grid_size() || classify_site(spec_, label).plane == Plane::Absent) {
            throw std::invalid_argument(std::string(what) + " on absent site " + std::to_string(label));
        }
    }
}

Syndrome Decoder::extract_syndrome(const FlipSet &flips, const std::vector<int> &lost) const {
    check_labels(flips.z_flips, "flip");
    check_labels(lost, "loss");
    Syndrome out;
    std::set<int> lost_set(lost.begin(), lost.end());
    out.loss_mask.assign(lost_set.begin(), lost_set.end());
    for (const SublatticeGraph *g : {&primal_, &dual_}) {
        std::vector<char> parity(size_t(g->num_cells()), 0);
        for (int label : flips.z_flips) {
            if (lost_set.count(label)) continue;
            auto [a, b] = g->qubit_nodes(label);
            if (a < 0) continue;
            if (a < g->num_cells()) parity[a] ^= 1;
            if (b < g->num_cells()) parity[b] ^= 1;
        }
        auto &defects = g->sublattice() == Sublattice::Primal ? out.primal_defects : out.dual_defects;
        for (int c = 0; c < g->num_cells(); c++) {
            if (parity[c]) defects.push_back(g->cell(c));
        }
    }
    return out;
}

MatchingProblem Decoder::build_matching(Sublattice s, const std::vector<int> &flipped_labels,
                                        const std::vector<int> &lost_labels) const {
    return graph(s).build_matching(flipped_labels, lost_labels);
}

DecodeOutcome Decoder::decode(const std::vector<int> &flipped_labels, const std::vector<int> &lost_labels,
                              Rng &rng) const {
    DecodeOutcome out;
    MatchingProblem primal = primal_.build_matching(flipped_labels, lost_labels);
    out.primal_fail = primal_.logical_failure(primal, mwpm(primal), rng);
    if (dual_.num_boundaries() == 2) {
        MatchingProblem dual = dual_.build_matching(flipped_labels, lost_labels);
        out.dual_fail = dual_.logical_failure(dual, mwpm(dual), rng);
    }
    return out;
}

DecodeOutcome Decoder::decode(const ErrorSample &sample, Rng &rng) const {
    std::vector<int> touched(sample.touched);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    std::vector<int> flipped, lost;
    for (int v : touched) {
        if (sample.flipped[v]) flipped.push_back(v);
        if (sample.lost[v]) lost.push_back(v);
    }
    return decode(flipped, lost, rng);
}

nlohmann::json Decoder::debug_json(Sublattice s, const std::vector<int> &flipped_labels,
                                   const std::vector<int> &lost_labels) const {
    const SublatticeGraph &g = graph(s);
    MatchingProblem problem = g.build_matching(flipped_labels, lost_labels);
    Pairing pairing = mwpm(problem);
    nlohmann::json defects = nlohmann::json::array();
    for (size_t i = 0; i < problem.defect_cells.size(); i++) {
        const Coord &c = g.cell(problem.defect_cells[i]);
        defects.push_back({{"cell", {c.x, c.y, c.z}},
                           {"boundary_distance", problem.boundary_distance[i]},
                           {"boundary_side", problem.boundary_side[i]},
                           {"partner", pairing.partner[i]}});
    }
    return {{"sublattice", sublattice_name(s)},
            {"flipped", flipped_labels},
            {"lost", lost_labels},
            {"has_logical", problem.has_logical},
            {"logical_erased", problem.logical_erased},
            {"cut_parity", problem.cut_parity},
            {"defects", defects},
            {"weight", pairing.weight}};
}

Syndrome extract_syndrome(const FlipSet &flips, const LatticeSpec &spec, const std::vector<int> &lost) {
    return Decoder(spec).extract_syndrome(flips, lost);
}

DecodeOutcome logical_failure(const Decoder &decoder, const FlipSet &flips, const std::vector<int> &lost, Rng &rng) {
    return decoder.decode(flips.z_flips, lost, rng);
}

}  // namespace seqcluster
