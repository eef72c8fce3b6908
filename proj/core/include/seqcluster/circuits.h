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

// Time-ordered operation schedules of the sequential preparation algorithms
// and of the two bcc-lattice protocols built on them.

#ifndef SEQCLUSTER_CIRCUITS_H
#define SEQCLUSTER_CIRCUITS_H

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqcluster/graphs.h"

namespace seqcluster {

/// Qubit id of the controllable ancilla in schedules and fault locations.
/// Data qubits use their (positive) graph labels.
inline constexpr int kAncilla = 0;

enum class OpKind {
    InitQPlus,     ///< prepare the ancilla in |+>
    InitDataZero,  ///< prepare data qubit `qubit` in |0>
    CX_Q,          ///< controlled-X, control ancilla, target `qubit`
    CZ_Q,          ///< controlled-Z between ancilla and `qubit`
    H_Q,           ///< Hadamard on the ancilla
    MeasureQ_Z,    ///< Z-basis measurement of the ancilla
    ResetQPlus,    ///< re-initialise the ancilla in |+>
    CorrectionZ,   ///< classically controlled Z on `qubit`, conditioned on op `condition`
    MeasureData,   ///< measurement of data qubit `qubit` in `basis`
};

enum class Basis { X, Z };

enum class Protocol { Algorithm1, Algorithm2, ProtocolA, ProtocolB };

const char *op_kind_name(OpKind kind);
OpKind op_kind_from_name(const std::string &name);
const char *protocol_name(Protocol protocol);
Protocol protocol_from_name(const std::string &name);

struct Op {
    OpKind kind = OpKind::InitQPlus;
    int qubit = kAncilla;
    Basis basis = Basis::Z;
    /// For CorrectionZ: index (into Schedule::ops) of the measurement it is conditioned on.
    int condition = -1;
    int time_step = 0;
    /// Data label of the loop iteration that emitted the op (0 for the initial InitQPlus
    /// and for post-processing measurements).
    int block = 0;

    bool is_gate() const { return kind == OpKind::CX_Q || kind == OpKind::CZ_Q || kind == OpKind::H_Q; }
    /// True if the op acts on the given qubit (frame corrections excluded).
    bool touches(int q) const;
    bool operator==(const Op &other) const = default;
};

/// Half-open op-index range [begin, end) of one loop iteration's gate block,
/// including the data qubit's initialisation.
struct BlockRange {
    size_t begin = 0;
    size_t end = 0;
    bool operator==(const BlockRange &other) const = default;
};

/// A spacetime fault location: a Pauli inserted immediately before ops[position]
/// (position == ops.size() means after the last op) on `qubit`.
struct FaultLocation {
    size_t position = 0;
    int qubit = kAncilla;
    bool operator==(const FaultLocation &other) const = default;
    bool operator<(const FaultLocation &other) const {
        return position != other.position ? position < other.position : qubit < other.qubit;
    }
};

/// Immutable operation schedule.
struct Schedule {
    Protocol protocol = Protocol::Algorithm1;
    /// Graph the preparation loop runs on (G, G_c or G_bcc).
    Graph graph;
    /// Data labels in preparation order.
    std::vector<int> ordering;
    std::vector<Op> ops;
    /// Gate block per data label (indexed by label; unused labels are empty).
    std::vector<BlockRange> blocks;
    /// Position of each label in `ordering` (indexed by label, -1 if absent).
    std::vector<int> position;
    /// Index into ops of the CX_Q op per data label (-1 if absent).
    std::vector<int> cx_index;
    /// Target bcc lattice for the lattice protocols.
    std::optional<LatticeSpec> target;
    /// Protocol A: bcc label of each cubic label (0 if the site is measured out).
    std::vector<int> cubic_to_bcc;
    int num_time_steps = 0;

    size_t num_data() const { return ordering.size(); }
    /// Label of the data qubit prepared right after `label`, or 0 for the last one.
    int next_in_order(int label) const;
    /// Label of the data qubit prepared right before `label`, or 0 for the first one.
    int prev_in_order(int label) const;
    /// Data labels carried by the final state (all, or the bcc-mapped sites for Protocol A).
    std::vector<int> final_labels() const;

    nlohmann::json to_json() const;
    static Schedule from_json(const nlohmann::json &doc);
};

/// Algorithm 1 on G with the given preparation order (a permutation of the vertices).
/// Throws std::invalid_argument if `ordering` is not a permutation.
Schedule schedule_algorithm1(const Graph &g, const std::vector<int> &ordering);
/// Algorithm 2 (no intermediate ancilla measurements).
Schedule schedule_algorithm2(const Graph &g, const std::vector<int> &ordering);
/// Algorithm 1 on the (L+2)x(M+2)x(N+2) cubic lattice, Z measure-out of every site
/// outside the L x M x N bcc target (with neighbour corrections), then X measurement
/// of the remaining sites.
Schedule schedule_protocolA(const LatticeSpec &target);
/// Algorithm 1 on the bcc lattice in label order, then X measurement of every site.
Schedule schedule_protocolB(const LatticeSpec &target);

/// Number of time steps data qubit `label` spends in the delay lines: time step of its
/// last gate minus the time step of its CX_Q. Throws std::out_of_range for unknown qubits.
int delay_exposure(const Schedule &s, int label);

/// Every distinct fault location: before the first and after every op touching each
/// qubit. Sorted by (position, qubit).
std::vector<FaultLocation> fault_locations(const Schedule &s);

/// Cubic lattice and bcc lattice coordinate shift used by Protocol A.
inline constexpr int kProtocolAPad = 1;

}  // namespace seqcluster

#endif  // SEQCLUSTER_CIRCUITS_H
