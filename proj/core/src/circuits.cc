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

#include "seqcluster/circuits.h"

#include <algorithm>
#include <stdexcept>

namespace seqcluster {

namespace {

struct KindName {
    OpKind kind;
    const char *name;
};

constexpr KindName kKindNames[] = {
    {OpKind::InitQPlus, "InitQPlus"},   {OpKind::InitDataZero, "InitDataZero"},
    {OpKind::CX_Q, "CX_Q"},             {OpKind::CZ_Q, "CZ_Q"},
    {OpKind::H_Q, "H_Q"},               {OpKind::MeasureQ_Z, "MeasureQ_Z"},
    {OpKind::ResetQPlus, "ResetQPlus"}, {OpKind::CorrectionZ, "CorrectionZ"},
    {OpKind::MeasureData, "MeasureData"},
};

void check_ordering(const Graph &g, const std::vector<int> &ordering) {
    if (ordering.size() != g.num_vertices()) {
        throw std::invalid_argument("ordering must list every vertex exactly once");
    }
    std::vector<char> seen(g.max_label() + 1, 0);
    for (int v : ordering) {
        if (!g.has_vertex(v) || seen[v]) {
            throw std::invalid_argument("ordering is not a permutation of the vertex set");
        }
        seen[v] = 1;
    }
}

Schedule empty_schedule(Protocol protocol, const Graph &g, const std::vector<int> &ordering) {
    check_ordering(g, ordering);
    if (ordering.empty()) {
        throw std::invalid_argument("cannot schedule an empty graph");
    }
    Schedule s;
    s.protocol = protocol;
    s.graph = g;
    s.ordering = ordering;
    s.blocks.assign(g.max_label() + 1, BlockRange{});
    s.position.assign(g.max_label() + 1, -1);
    s.cx_index.assign(g.max_label() + 1, -1);
    for (size_t k = 0; k < ordering.size(); k++) {
        s.position[ordering[k]] = int(k);
    }
    return s;
}

void push(Schedule &s, OpKind kind, int qubit, int t, int block, int condition = -1, Basis basis = Basis::Z) {
    Op op;
    op.kind = kind;
    op.qubit = qubit;
    op.time_step = t;
    op.block = block;
    op.condition = condition;
    op.basis = basis;
    if (kind == OpKind::CX_Q) {
        s.cx_index[qubit] = int(s.ops.size());
    }
    s.ops.push_back(op);
}

// Shared main loop. `cz_targets(k)` lists the CZ partners of the k-th prepared qubit.
template <typename CzTargets>
void emit_loop(Schedule &s, bool measure_between, CzTargets cz_targets) {
    const auto &order = s.ordering;
    const Graph &g = s.graph;
    int t = 0;
    push(s, OpKind::InitQPlus, kAncilla, t, 0);
    for (size_t k = 0; k < order.size(); k++) {
        int j = order[k];
        size_t begin = s.ops.size();
        push(s, OpKind::InitDataZero, j, t, j);
        for (int i : cz_targets(k)) {
            push(s, OpKind::CZ_Q, i, t, j);
        }
        push(s, OpKind::CX_Q, j, t, j);
        push(s, OpKind::H_Q, kAncilla, t, j);
        s.blocks[j] = BlockRange{begin, s.ops.size()};
        t++;
        bool last = k + 1 == order.size();
        if (measure_between && (last || !g.has_edge(j, order[k + 1]))) {
            int m = int(s.ops.size());
            push(s, OpKind::MeasureQ_Z, kAncilla, t, j);
            push(s, OpKind::CorrectionZ, j, t, j, m);
            if (!last) {
                push(s, OpKind::ResetQPlus, kAncilla, t, j);
            }
            t++;
        }
    }
    s.num_time_steps = t;
}

}  // namespace

const char *op_kind_name(OpKind kind) {
    for (const auto &kn : kKindNames) {
        if (kn.kind == kind) {
            return kn.name;
        }
    }
    return "?";
}

OpKind op_kind_from_name(const std::string &name) {
    for (const auto &kn : kKindNames) {
        if (name == kn.name) {
            return kn.kind;
        }
    }
    throw std::invalid_argument("unknown op kind: " + name);
}

const char *protocol_name(Protocol protocol) {
    switch (protocol) {
        case Protocol::Algorithm1:
            return "algorithm1";
        case Protocol::Algorithm2:
            return "algorithm2";
        case Protocol::ProtocolA:
            return "A";
        case Protocol::ProtocolB:
            return "B";
    }
    return "?";
}

Protocol protocol_from_name(const std::string &name) {
    if (name == "algorithm1") return Protocol::Algorithm1;
    if (name == "algorithm2") return Protocol::Algorithm2;
    if (name == "A") return Protocol::ProtocolA;
    if (name == "B") return Protocol::ProtocolB;
    throw std::invalid_argument("unknown protocol: " + name + " (expected A, B, algorithm1 or algorithm2)");
}

bool Op::touches(int q) const {
    switch (kind) {
        case OpKind::InitQPlus:
        case OpKind::H_Q:
        case OpKind::MeasureQ_Z:
        case OpKind::ResetQPlus:
            return q == kAncilla;
        case OpKind::InitDataZero:
        case OpKind::MeasureData:
            return q == qubit;
        case OpKind::CX_Q:
        case OpKind::CZ_Q:
            return q == kAncilla || q == qubit;
        case OpKind::CorrectionZ:
            return false;
    }
    return false;
}

int Schedule::next_in_order(int label) const {
    int k = position.at(label);
    if (k < 0) {
        throw std::out_of_range("label " + std::to_string(label) + " is not prepared by this schedule");
    }
    return size_t(k) + 1 < ordering.size() ? ordering[k + 1] : 0;
}

int Schedule::prev_in_order(int label) const {
    int k = position.at(label);
    if (k < 0) {
        throw std::out_of_range("label " + std::to_string(label) + " is not prepared by this schedule");
    }
    return k > 0 ? ordering[k - 1] : 0;
}

std::vector<int> Schedule::final_labels() const {
    if (protocol != Protocol::ProtocolA) {
        return graph.vertices();
    }
    std::vector<int> out;
    for (int v : graph.vertices()) {
        if (cubic_to_bcc[v] != 0) {
            out.push_back(v);
        }
    }
    return out;
}

Schedule schedule_algorithm1(const Graph &g, const std::vector<int> &ordering) {
    Schedule s = empty_schedule(Protocol::Algorithm1, g, ordering);
    emit_loop(s, true, [&](size_t k) {
        // Earlier neighbours except the immediate predecessor, ascending.
        std::vector<int> targets;
        for (int i : g.neighbors(ordering[k])) {
            if (s.position[i] + 1 < int(k)) {
                targets.push_back(i);
            }
        }
        return targets;
    });
    return s;
}

Schedule schedule_algorithm2(const Graph &g, const std::vector<int> &ordering) {
    Schedule s = empty_schedule(Protocol::Algorithm2, g, ordering);
    emit_loop(s, false, [&](size_t k) {
        int j = ordering[k];
        int prev = k > 0 ? ordering[k - 1] : 0;
        std::vector<int> targets;
        for (int i : g.neighbors(j)) {
            if (s.position[i] < int(k) && i != prev) {
                targets.push_back(i);
            }
        }
        if (prev != 0 && !g.has_edge(prev, j)) {
            targets.push_back(prev);
            std::sort(targets.begin(), targets.end());
        }
        return targets;
    });
    int last = ordering.back();
    push(s, OpKind::CZ_Q, last, s.num_time_steps, last);
    s.num_time_steps++;
    return s;
}

Schedule schedule_protocolB(const LatticeSpec &target) {
    Graph g = build_bcc(target);
    Schedule s = schedule_algorithm1(g, g.vertices());
    s.protocol = Protocol::ProtocolB;
    s.target = target;
    int t = s.num_time_steps - 1;
    for (int v : g.vertices()) {
        push(s, OpKind::MeasureData, v, t, 0, -1, Basis::X);
    }
    return s;
}

Schedule schedule_protocolA(const LatticeSpec &target) {
    target.validate();
    int pad = kProtocolAPad;
    LatticeSpec cubic_spec = target;
    cubic_spec.L += 2 * pad;
    cubic_spec.M += 2 * pad;
    cubic_spec.N += 2 * pad;
    Graph gc = build_cubic(cubic_spec.L, cubic_spec.M, cubic_spec.N);
    Schedule s = schedule_algorithm1(gc, gc.vertices());
    s.protocol = Protocol::ProtocolA;
    s.target = target;
    s.cubic_to_bcc.assign(gc.max_label() + 1, 0);
    for (int v : gc.vertices()) {
        Coord c = label_coords(cubic_spec, v);
        Coord b{c.x - pad, c.y - pad, c.z - pad};
        if (target.in_grid(b)) {
            int odd = target.odd_count(b);
            if (odd == 1 || odd == 2) {
                s.cubic_to_bcc[v] = int(coords_label(target, b));
            }
        }
    }
    int t = s.num_time_steps - 1;
    for (int v : gc.vertices()) {
        if (s.cubic_to_bcc[v] != 0) {
            continue;
        }
        int m = int(s.ops.size());
        push(s, OpKind::MeasureData, v, t, 0, -1, Basis::Z);
        for (int w : gc.neighbors(v)) {
            push(s, OpKind::CorrectionZ, w, t, 0, m);
        }
    }
    for (int v : gc.vertices()) {
        if (s.cubic_to_bcc[v] != 0) {
            push(s, OpKind::MeasureData, v, t, 0, -1, Basis::X);
        }
    }
    return s;
}

int delay_exposure(const Schedule &s, int label) {
    if (label < 1 || size_t(label) >= s.cx_index.size() || s.cx_index[label] < 0) {
        throw std::out_of_range("qubit " + std::to_string(label) + " is not a data qubit of the schedule");
    }
    int start = s.ops[s.cx_index[label]].time_step;
    int last = start;
    for (size_t k = s.cx_index[label]; k < s.ops.size(); k++) {
        const Op &op = s.ops[k];
        if (op.is_gate() && op.qubit == label) {
            last = op.time_step;
        }
    }
    return last - start;
}

std::vector<FaultLocation> fault_locations(const Schedule &s) {
    std::vector<FaultLocation> out;
    std::vector<char> seen(s.graph.max_label() + 1, 0);
    auto visit = [&](int q, size_t k) {
        if (!seen[q]) {
            seen[q] = 1;
            out.push_back({k, q});
        }
        out.push_back({k + 1, q});
    };
    for (size_t k = 0; k < s.ops.size(); k++) {
        const Op &op = s.ops[k];
        if (op.touches(kAncilla)) {
            visit(kAncilla, k);
        }
        if (op.qubit != kAncilla && op.touches(op.qubit)) {
            visit(op.qubit, k);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

nlohmann::json Schedule::to_json() const {
    nlohmann::json doc;
    doc["schema"] = "seqcluster.schedule/1";
    doc["protocol"] = protocol_name(protocol);
    nlohmann::json labels = graph.vertices();
    doc["graph"] = {{"labels", labels}, {"edges", graph.to_json()["edges"]}};
    doc["ordering"] = ordering;
    if (target) {
        doc["target"] = {{"L", target->L},
                         {"M", target->M},
                         {"N", target->N},
                         {"parity_offset", target->parity_offset}};
    }
    nlohmann::json ops_json = nlohmann::json::array();
    for (const Op &op : ops) {
        nlohmann::json o = {{"kind", op_kind_name(op.kind)}, {"t", op.time_step}, {"block", op.block}};
        if (op.qubit != kAncilla) {
            o["qubit"] = op.qubit;
        }
        if (op.kind == OpKind::MeasureData) {
            o["basis"] = op.basis == Basis::X ? "X" : "Z";
        }
        if (op.condition >= 0) {
            o["condition"] = op.condition;
        }
        ops_json.push_back(o);
    }
    doc["ops"] = ops_json;
    return doc;
}

Schedule Schedule::from_json(const nlohmann::json &doc) {
    if (doc.value("schema", "") != "seqcluster.schedule/1") {
        throw std::invalid_argument("not a seqcluster schedule document");
    }
    std::vector<int> labels = doc.at("graph").at("labels").get<std::vector<int>>();
    std::vector<std::pair<int, int>> edges;
    for (const auto &e : doc.at("graph").at("edges")) {
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    Graph g = Graph::from_labels(labels, edges);
    Schedule s = empty_schedule(protocol_from_name(doc.at("protocol").get<std::string>()), g,
                                doc.at("ordering").get<std::vector<int>>());
    if (doc.contains("target")) {
        LatticeSpec spec;
        spec.L = doc["target"].at("L");
        spec.M = doc["target"].at("M");
        spec.N = doc["target"].at("N");
        spec.parity_offset = doc["target"].at("parity_offset").get<std::array<int, 3>>();
        s.target = spec;
    }
    int max_t = -1;
    for (const auto &o : doc.at("ops")) {
        Basis basis = o.value("basis", "Z") == "X" ? Basis::X : Basis::Z;
        push(s, op_kind_from_name(o.at("kind").get<std::string>()), o.value("qubit", kAncilla), o.at("t").get<int>(),
             o.at("block").get<int>(), o.value("condition", -1), basis);
        max_t = std::max(max_t, s.ops.back().time_step);
    }
    // Rebuild derived block ranges.
    for (size_t k = 0; k < s.ops.size(); k++) {
        const Op &op = s.ops[k];
        if (op.kind == OpKind::InitDataZero) {
            s.blocks[op.qubit].begin = k;
        } else if (op.kind == OpKind::H_Q && op.block > 0) {
            s.blocks[op.block].end = k + 1;
        }
    }
    if (s.protocol == Protocol::ProtocolA && s.target) {
        // Recompute the measure-out map from the target geometry.
        Schedule fresh = schedule_protocolA(*s.target);
        s.cubic_to_bcc = fresh.cubic_to_bcc;
    }
    // The last gate step is the final time step of the loop; measurements share it.
    int gate_max = -1;
    for (const Op &op : s.ops) {
        if (op.kind != OpKind::MeasureData && op.kind != OpKind::CorrectionZ) {
            gate_max = std::max(gate_max, op.time_step);
        }
    }
    s.num_time_steps = gate_max + 1;
    (void)max_t;
    return s;
}

}  // namespace seqcluster
