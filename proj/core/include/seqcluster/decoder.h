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

// Minimum-weight perfect matching decoder for the bcc cluster-state memory:
// cell syndromes on the primal and dual sublattices, loss handling by merging
// cells that share a lost qubit into superchecks, exact matching and the
// logical-failure test.

#ifndef SEQCLUSTER_DECODER_H
#define SEQCLUSTER_DECODER_H

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "seqcluster/errors.h"
#include "seqcluster/graphs.h"
#include "seqcluster/random.h"

namespace seqcluster {

/// Defect cells (centres in offset-adjusted coordinates) and lost data labels.
struct Syndrome {
    std::vector<Coord> primal_defects;
    std::vector<Coord> dual_defects;
    std::vector<int> loss_mask;
    bool operator==(const Syndrome &other) const = default;
};

/// Matching instance for one sublattice. Defects are superchecks with odd parity;
/// each may be paired with another defect or with the boundary.
struct MatchingProblem {
    Sublattice sublattice = Sublattice::Primal;
    /// Smallest member cell of each defect supercheck, ascending.
    std::vector<int> defect_cells;
    /// Pairwise distances between defects (lost qubits cost 0, intact ones 1).
    std::vector<std::vector<int64_t>> distance;
    /// Distance of each defect to the nearest rough boundary (-1 if there is none).
    std::vector<int64_t> boundary_distance;
    /// Which rough boundary is nearest: 0 or 1 (ties go to 0).
    std::vector<int> boundary_side;
    /// True if the sublattice has two separate rough boundaries (a logical qubit).
    bool has_logical = false;
    /// True if lost qubits connect the two rough boundaries (logical information erased).
    bool logical_erased = false;
    /// Parity of flipped intact qubits on the cut around the boundary-0 supercheck.
    int cut_parity = 0;
};

/// Partner defect per defect (-1: matched to the boundary) and the total weight.
struct Pairing {
    std::vector<int> partner;
    int64_t weight = 0;
};

struct DecodeOutcome {
    bool primal_fail = false;
    bool dual_fail = false;
    bool operator==(const DecodeOutcome &other) const = default;
};

/// Cell graph of one sublattice: cells are nodes, the sublattice's qubits are
/// edges; qubits on a rough face end at a boundary node.
class SublatticeGraph {
   public:
    SublatticeGraph(const LatticeSpec &spec, Sublattice sublattice);

    Sublattice sublattice() const { return sublattice_; }
    int num_cells() const { return int(cells_.size()); }
    /// Number of boundary nodes: 0, 1 (all rough faces connected) or 2 (a logical qubit).
    int num_boundaries() const { return num_boundaries_; }
    int num_nodes() const { return num_cells() + num_boundaries_; }
    /// Offset-adjusted centre of a cell.
    const Coord &cell(int index) const { return cells_[index]; }
    /// Cell index of an adjusted centre, or -1.
    int cell_index(const Coord &adjusted) const;
    /// Endpoints (node ids) of the edge carried by a data label, or {-1, -1} if the
    /// label is not a qubit of this sublattice.
    std::pair<int, int> qubit_nodes(int label) const;
    /// Data labels of the qubits around a cell (its faces).
    std::vector<int> cell_qubits(int index) const;
    /// Rough faces as (axis, side) pairs with side 0 = low, 1 = high.
    const std::vector<std::pair<int, int>> &rough_faces() const { return rough_faces_; }
    /// Axis along which the logical operator runs (-1 if no logical qubit).
    int logical_axis() const { return logical_axis_; }

    MatchingProblem build_matching(const std::vector<int> &flipped_labels, const std::vector<int> &lost_labels) const;
    /// Decides failure for a solved problem (coin flip when the logical is erased).
    bool logical_failure(const MatchingProblem &problem, const Pairing &pairing, Rng &rng) const;

    struct Adjacent {
        int node;
        int label;
    };
    const std::vector<Adjacent> &adjacent(int node) const { return adjacency_[node]; }

   private:
    LatticeSpec spec_;
    Sublattice sublattice_;
    std::vector<Coord> cells_;
    std::vector<int> cell_lookup_;
    std::vector<std::pair<int, int>> rough_faces_;
    int num_boundaries_ = 0;
    int logical_axis_ = -1;
    std::vector<std::pair<int, int>> edge_of_label_;
    std::vector<std::vector<Adjacent>> adjacency_;
};

/// Exact minimum-weight pairing of the defects (pairs or boundary matches).
/// Throws std::runtime_error if no valid pairing exists (odd defect count
/// without a boundary).
Pairing mwpm(const MatchingProblem &problem);

/// Decoder for one lattice; immutable after construction and safe to share.
class Decoder {
   public:
    explicit Decoder(const LatticeSpec &spec);

    const LatticeSpec &spec() const { return spec_; }
    const SublatticeGraph &primal() const { return primal_; }
    const SublatticeGraph &dual() const { return dual_; }
    const SublatticeGraph &graph(Sublattice s) const { return s == Sublattice::Dual ? dual_ : primal_; }

    /// Throws std::invalid_argument on flips or losses of absent sites.
    Syndrome extract_syndrome(const FlipSet &flips, const std::vector<int> &lost) const;
    MatchingProblem build_matching(Sublattice s, const std::vector<int> &flipped_labels,
                                   const std::vector<int> &lost_labels) const;
    /// Full decode. The dual sublattice is only decoded when it carries a logical qubit.
    DecodeOutcome decode(const std::vector<int> &flipped_labels, const std::vector<int> &lost_labels, Rng &rng) const;
    DecodeOutcome decode(const ErrorSample &sample, Rng &rng) const;

    /// Syndrome, matching problem and pairing for inspection tools.
    nlohmann::json debug_json(Sublattice s, const std::vector<int> &flipped_labels, const std::vector<int> &lost_labels) const;

   private:
    void check_labels(const std::vector<int> &labels, const char *what) const;

    LatticeSpec spec_;
    SublatticeGraph primal_;
    SublatticeGraph dual_;
};

/// Free-function forms.
Syndrome extract_syndrome(const FlipSet &flips, const LatticeSpec &spec, const std::vector<int> &lost = {});
DecodeOutcome logical_failure(const Decoder &decoder, const FlipSet &flips, const std::vector<int> &lost, Rng &rng);

}  // namespace seqcluster

#endif  // SEQCLUSTER_DECODER_H
