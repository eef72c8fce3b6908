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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "seqcluster/circuits.h"
#include "test_util.h"

namespace seqcluster {
namespace {

std::vector<OpKind> kinds(const Schedule &s) {
    std::vector<OpKind> out;
    for (const Op &op : s.ops) out.push_back(op.kind);
    return out;
}

std::vector<int> measured_after_blocks(const Schedule &s) {
    std::vector<int> out;
    for (const Op &op : s.ops) {
        if (op.kind == OpKind::MeasureQ_Z) out.push_back(op.block);
    }
    return out;
}

// Gate block content as (kind, qubit) pairs, excluding the data initialisation.
std::vector<std::pair<OpKind, int>> block_gates(const Schedule &s, int label) {
    std::vector<std::pair<OpKind, int>> out;
    const BlockRange &b = s.blocks.at(label);
    for (size_t k = b.begin; k < b.end; k++) {
        if (s.ops[k].is_gate()) out.emplace_back(s.ops[k].kind, s.ops[k].qubit);
    }
    return out;
}

// Five-vertex example graph with (3,4) not an edge: only the j=3 iteration measures.
Graph five_vertex_example() { return Graph::from_edges(5, {{1, 2}, {2, 3}, {2, 5}, {1, 4}, {4, 5}}); }

TEST(Algorithm1, SingleVertex) {
    Schedule s = schedule_algorithm1(Graph::from_edges(1, {}), {1});
    std::vector<OpKind> expected = {OpKind::InitQPlus, OpKind::InitDataZero, OpKind::CX_Q,
                                    OpKind::H_Q,       OpKind::MeasureQ_Z,   OpKind::CorrectionZ};
    std::vector<OpKind> got = kinds(s);
    got.erase(std::remove(got.begin(), got.end(), OpKind::MeasureData), got.end());
    EXPECT_EQ(got, expected);
}

TEST(Algorithm1, MeasuresOnlyWhenNextIsNotAdjacent) {
    Schedule s = schedule_algorithm1(five_vertex_example(), {1, 2, 3, 4, 5});
    EXPECT_EQ(measured_after_blocks(s), (std::vector<int>{3, 5}));
}

TEST(Algorithm1, CubicLatticeHasNoIntermediateMeasurement) {
    Graph g = build_cubic(3, 4, 2);
    Schedule s = schedule_algorithm1(g, g.vertices());
    EXPECT_EQ(measured_after_blocks(s), (std::vector<int>{24}));
}

TEST(Algorithm1, CzSetSkipsImmediatePredecessor) {
    Graph g = build_cubic(3, 3, 3);
    Schedule s = schedule_algorithm1(g, g.vertices());
    // Block 14 of the 3x3x3 cubic lattice: Z_{Q,5} Z_{Q,11} X_{Q,14} H_Q.
    std::vector<std::pair<OpKind, int>> expected = {
        {OpKind::CZ_Q, 5}, {OpKind::CZ_Q, 11}, {OpKind::CX_Q, 14}, {OpKind::H_Q, kAncilla}};
    EXPECT_EQ(block_gates(s, 14), expected);
}

TEST(Algorithm1, RejectsNonPermutation) {
    Graph g = Graph::from_edges(3, {{1, 2}});
    EXPECT_THROW(schedule_algorithm1(g, {1, 2}), std::invalid_argument);
    EXPECT_THROW(schedule_algorithm1(g, {1, 2, 2}), std::invalid_argument);
    EXPECT_THROW(schedule_algorithm2(g, {1, 2, 4}), std::invalid_argument);
}

TEST(Algorithm1, CxPrecedesLaterCz) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; trial++) {
        Graph g = testing::random_graph(8, 0.4, rng);
        Schedule s = schedule_algorithm1(g, testing::random_ordering(g, rng));
        for (size_t k = 0; k < s.ops.size(); k++) {
            if (s.ops[k].kind == OpKind::CZ_Q) {
                int q = s.ops[k].qubit;
                EXPECT_LT(s.cx_index[q], int(k));
            }
        }
        for (int v : g.vertices()) {
            EXPECT_EQ(std::count_if(s.ops.begin(), s.ops.end(),
                                    [&](const Op &op) { return op.kind == OpKind::CX_Q && op.qubit == v; }),
                      1);
        }
    }
}

TEST(Algorithm2, NoMeasurementsAndFinalCz) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; trial++) {
        Graph g = testing::random_graph(7, 0.4, rng);
        Schedule s = schedule_algorithm2(g, testing::random_ordering(g, rng));
        EXPECT_TRUE(measured_after_blocks(s).empty());
        auto it = std::find_if(s.ops.rbegin(), s.ops.rend(), [](const Op &op) { return op.is_gate(); });
        ASSERT_NE(it, s.ops.rend());
        EXPECT_EQ(it->kind, OpKind::CZ_Q);
        EXPECT_EQ(it->qubit, s.ordering.back());
    }
}

TEST(Algorithm2, IsolatedPairUsesPredecessorCz) {
    Schedule s = schedule_algorithm2(Graph::from_edges(2, {}), {1, 2});
    std::vector<std::pair<OpKind, int>> expected = {{OpKind::CZ_Q, 1}, {OpKind::CX_Q, 2}, {OpKind::H_Q, kAncilla}};
    EXPECT_EQ(block_gates(s, 2), expected);
}

TEST(Algorithm2, MatchesAlgorithm1OnHamiltonianOrder) {
    Graph g = build_cubic(3, 3, 2);
    Schedule a1 = schedule_algorithm1(g, g.vertices());
    Schedule a2 = schedule_algorithm2(g, g.vertices());
    for (int v : g.vertices()) {
        EXPECT_EQ(block_gates(a1, v), block_gates(a2, v)) << v;
    }
}

TEST(ProtocolA, BlocksMatchCubicGateBlocks) {
    LatticeSpec spec = LatticeSpec::cube(3);
    Schedule s = schedule_protocolA(spec);
    int L = 5, LM = 25;
    ASSERT_EQ(s.graph.num_vertices(), 125u);
    for (int j : s.ordering) {
        std::vector<std::pair<OpKind, int>> expected;
        if (j - LM >= 1) expected.emplace_back(OpKind::CZ_Q, j - LM);
        if (j - L >= 1) expected.emplace_back(OpKind::CZ_Q, j - L);
        expected.emplace_back(OpKind::CX_Q, j);
        expected.emplace_back(OpKind::H_Q, kAncilla);
        EXPECT_EQ(block_gates(s, j), expected) << j;
    }
    EXPECT_EQ(measured_after_blocks(s), (std::vector<int>{125}));
}

TEST(ProtocolA, MeasuredOutSetForSmallestTarget) {
    LatticeSpec spec{1, 1, 1, {0, 0, 1}};
    Schedule s = schedule_protocolA(spec);
    std::vector<int> z_measured;
    for (const Op &op : s.ops) {
        if (op.kind == OpKind::MeasureData && op.basis == Basis::Z) z_measured.push_back(op.qubit);
    }
    std::vector<int> finals = s.final_labels();
    EXPECT_EQ(finals.size(), 1u);
    EXPECT_EQ(z_measured.size() + finals.size(), 27u);
    EXPECT_EQ(finals[0], 14);
}

TEST(ProtocolB, BlocksFollowSitePlanes) {
    LatticeSpec spec = LatticeSpec::cube(5);
    Schedule s = schedule_protocolB(spec);
    int L = 5, LM = 25;
    for (int j : s.ordering) {
        Plane plane = classify_site(spec, j).plane;
        std::vector<std::pair<OpKind, int>> expected;
        auto add = [&](int i) {
            if (i >= 1 && s.graph.has_vertex(i) && s.graph.has_edge(i, j) && i != s.prev_in_order(j)) {
                expected.emplace_back(OpKind::CZ_Q, i);
            }
        };
        if (plane == Plane::Vxy) {
            add(j - L);
        } else if (plane == Plane::Vyz) {
            add(j - LM);
            add(j - L);
        } else {
            add(j - LM);
        }
        expected.emplace_back(OpKind::CX_Q, j);
        expected.emplace_back(OpKind::H_Q, kAncilla);
        EXPECT_EQ(block_gates(s, j), expected) << j;
    }
}

TEST(ProtocolB, MeasurementsExactlyWhereNextIsNotAdjacent) {
    LatticeSpec spec = LatticeSpec::cube(5);
    Schedule s = schedule_protocolB(spec);
    std::vector<int> expected;
    for (size_t k = 0; k < s.ordering.size(); k++) {
        int j = s.ordering[k];
        if (k + 1 == s.ordering.size() || !s.graph.has_edge(j, s.ordering[k + 1])) expected.push_back(j);
    }
    EXPECT_EQ(measured_after_blocks(s), expected);
    // One step per block plus one per measure/reset pair (the last has no reset).
    EXPECT_EQ(s.num_time_steps, int(s.ordering.size() + expected.size()));
    // Each measure/reset pair shares a time step distinct from the blocks.
    for (size_t k = 0; k < s.ops.size(); k++) {
        if (s.ops[k].kind == OpKind::ResetQPlus) {
            EXPECT_EQ(s.ops[k].time_step, s.ops[k - 2].time_step);
        }
    }
}

TEST(DelayExposure, BulkQubitsWithLayerNeighbourSpendAboutLSquaredSteps) {
    LatticeSpec spec = LatticeSpec::cube(5);
    Schedule s = schedule_protocolB(spec);
    int bulk = 0;
    for (int v : s.ordering) {
        Coord c = label_coords(spec, v);
        if (c.x == 0 || c.y == 0 || c.z == 0 || c.x == 4 || c.y == 4 || c.z == 4) continue;
        if (!s.graph.has_edge(v, v + 25)) continue;
        int ell = delay_exposure(s, v);
        // L^2 = 25 block steps plus the interleaved measure/reset steps.
        EXPECT_GE(ell, 25) << v;
        EXPECT_LE(ell, 29) << v;
        bulk++;
    }
    EXPECT_GT(bulk, 0);
    EXPECT_FALSE(s.graph.has_vertex(2));
    EXPECT_THROW(delay_exposure(s, 2), std::out_of_range);
}

TEST(DelayExposure, NoLaterNeighbours) {
    Schedule s = schedule_algorithm1(Graph::from_edges(2, {}), {1, 2});
    EXPECT_EQ(delay_exposure(s, 1), 0);
    EXPECT_EQ(delay_exposure(s, 2), 0);
}

TEST(FaultLocations, SingleVertex) {
    Schedule s = schedule_algorithm1(Graph::from_edges(1, {}), {1});
    auto locs = fault_locations(s);
    int cx = s.cx_index[1];
    auto has = [&](size_t pos, int q) {
        return std::find(locs.begin(), locs.end(), FaultLocation{pos, q}) != locs.end();
    };
    // The ancilla slot before CX is the one right after InitQPlus (InitDataZero does
    // not act on the ancilla).
    EXPECT_EQ(s.ops[0].kind, OpKind::InitQPlus);
    EXPECT_TRUE(has(1, kAncilla));
    EXPECT_FALSE(has(size_t(cx), kAncilla) && cx != 1);
    EXPECT_TRUE(has(size_t(cx) + 1, kAncilla));
    EXPECT_TRUE(has(size_t(cx) + 2, kAncilla));
    EXPECT_TRUE(has(size_t(cx), 1));
    EXPECT_TRUE(has(size_t(cx) + 1, 1));
    EXPECT_TRUE(std::is_sorted(locs.begin(), locs.end()));
    EXPECT_EQ(std::adjacent_find(locs.begin(), locs.end()), locs.end());
}

TEST(FaultLocations, FourAncillaSlotsPerInteriorCubicBlock) {
    Graph g = build_cubic(3, 3, 3);
    Schedule s = schedule_algorithm1(g, g.vertices());
    auto locs = fault_locations(s);
    const BlockRange &b = s.blocks[14];
    int count = 0;
    for (const auto &loc : locs) {
        // Slots after each of the four gates touching Q: two CZs, CX, H (the slot
        // before the block is the previous block's last slot).
        if (loc.qubit == kAncilla && loc.position > b.begin && loc.position <= b.end) count++;
    }
    EXPECT_EQ(count, 4);
}

TEST(Schedule, JsonRoundTrip) {
    for (const Schedule &s : {schedule_algorithm1(five_vertex_example(), {2, 1, 3, 5, 4}),
                              schedule_algorithm2(five_vertex_example(), {1, 2, 3, 4, 5}),
                              schedule_protocolA(LatticeSpec::cube(1)), schedule_protocolB(LatticeSpec::cube(3))}) {
        Schedule back = Schedule::from_json(s.to_json());
        EXPECT_EQ(back.ops, s.ops);
        EXPECT_EQ(back.ordering, s.ordering);
        EXPECT_EQ(back.blocks, s.blocks);
        EXPECT_EQ(back.cubic_to_bcc, s.cubic_to_bcc);
        EXPECT_EQ(back.num_time_steps, s.num_time_steps);
        EXPECT_EQ(back.to_json().dump(), s.to_json().dump());
    }
}

}  // namespace
}  // namespace seqcluster
