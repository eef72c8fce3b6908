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

#include <random>
#include <stdexcept>

#include "seqcluster/stabsim.h"
#include "test_util.h"

namespace seqcluster {
namespace {

// Cluster-state generators over tableau indices: X_v prod_{w ~ v} Z_w for the graph
// given by `edges` on the index list `qubits` of an n-qubit register.
std::vector<PauliString> cluster_generators(size_t n, const std::vector<size_t> &qubits,
                                            const std::vector<std::pair<size_t, size_t>> &edges) {
    std::vector<PauliString> gens;
    for (size_t v : qubits) {
        PauliString p(n);
        p.set_x(v, true);
        for (auto [a, b] : edges) {
            if (a == v) p.set_z(b, true);
            if (b == v) p.set_z(a, true);
        }
        gens.push_back(p);
    }
    return gens;
}

void random_clifford(Tableau &t, size_t qubits, int depth, std::mt19937_64 &rng) {
    std::uniform_int_distribution<size_t> pick(0, qubits - 1);
    for (int k = 0; k < depth; k++) {
        switch (rng() % 3) {
            case 0:
                t.h(pick(rng));
                break;
            case 1:
                t.s(pick(rng));
                break;
            default: {
                size_t a = pick(rng), b = pick(rng);
                if (a != b) t.cx(a, b);
            }
        }
    }
}

TEST(PauliString, SingleQubitProductPhases) {
    // P * Q = i^k R for all single-qubit pairs.
    const char *names = "_XYZ";
    // log_i[P][Q] for P, Q in I, X, Y, Z.
    const unsigned expected[4][4] = {{0, 0, 0, 0}, {0, 0, 1, 3}, {0, 3, 0, 1}, {0, 1, 3, 0}};
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            PauliString p = PauliString::from_text(std::string(1, names[a]));
            PauliString q = PauliString::from_text(std::string(1, names[b]));
            unsigned got =
                PauliString::product_log_i(p.xs().data(), p.zs().data(), q.xs().data(), q.zs().data(), 1);
            EXPECT_EQ(got, expected[a][b]) << names[a] << names[b];
        }
    }
}

TEST(PauliString, MultiQubitProductSign) {
    PauliString a = PauliString::from_text("+XZ");
    PauliString b = PauliString::from_text("+ZX");
    // (X Z)(Z X) = (XZ)(ZX) = (-iY)(iY) = +YY.
    a.mul_assign(b);
    EXPECT_EQ(a.str(), "+YY");
    PauliString c = PauliString::from_text("+X_");
    EXPECT_THROW(c.mul_assign(PauliString::from_text("+Z_")), std::logic_error);
    EXPECT_FALSE(c.commutes(PauliString::from_text("+Z_")));
    EXPECT_TRUE(c.commutes(PauliString::from_text("+_Z")));
}

TEST(PauliString, WideProductsMatchQubitwiseProducts) {
    std::mt19937_64 rng(3);
    const char *names = "_XYZ";
    const unsigned table[4][4] = {{0, 0, 0, 0}, {0, 0, 1, 3}, {0, 3, 0, 1}, {0, 1, 3, 0}};
    for (int trial = 0; trial < 200; trial++) {
        size_t n = 1 + rng() % 150;
        std::string sa, sb;
        unsigned total = 0;
        for (size_t q = 0; q < n; q++) {
            int a = int(rng() % 4), b = int(rng() % 4);
            sa += names[a];
            sb += names[b];
            total += table[a][b];
        }
        PauliString pa = PauliString::from_text(sa), pb = PauliString::from_text(sb);
        EXPECT_EQ(PauliString::product_log_i(pa.xs().data(), pa.zs().data(), pb.xs().data(), pb.zs().data(),
                                             pa.num_words()),
                  total & 3);
    }
}

TEST(Tableau, BellStateAndMeasurement) {
    Tableau t(2);
    t.h(0);
    t.cx(0, 1);
    auto gens = canonical_generators(t.stabilizers());
    ASSERT_EQ(gens.size(), 2u);
    EXPECT_EQ(gens[0].str(), "+XX");
    EXPECT_EQ(gens[1].str(), "+ZZ");
    EXPECT_FALSE(t.is_z_deterministic(0));
    int m = t.measure_z(0, 1);
    EXPECT_EQ(m, 1);
    EXPECT_TRUE(t.is_z_deterministic(1));
    EXPECT_EQ(t.measure_z(1), 1);
    EXPECT_THROW(t.measure_z(1, 0), std::runtime_error);
}

TEST(Tableau, PauliSignsAndResets) {
    Tableau t(1);
    t.h(0);
    t.z(0);
    EXPECT_EQ(t.stabilizer(0).str(), "-X");
    t.reset_plus(0);
    EXPECT_EQ(t.stabilizer(0).str(), "+X");
    t.x(0);
    t.h(0);
    t.reset_zero(0);
    EXPECT_EQ(t.stabilizer(0).str(), "+Z");
    t.s(0);
    t.y(0);
    EXPECT_EQ(t.stabilizer(0).str(), "-Z");
}

// H_Q X_{Q,j} |phi>_Q |0>_j = Z_{Q,j} SWAP_{Q,j} |phi>_Q |+>_j on random stabilizer states.
TEST(Tableau, SwapIdentity) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; trial++) {
        const size_t n = 4, q = 0, j = 3;
        Tableau left(n), right(n);
        std::mt19937_64 copy = rng;
        random_clifford(left, 3, 30, rng);
        random_clifford(right, 3, 30, copy);
        left.cx(q, j);
        left.h(q);
        right.h(j);
        right.cx(q, j);
        right.cx(j, q);
        right.cx(q, j);
        right.cz(q, j);
        EXPECT_EQ(canonical_generators(left.stabilizers()), canonical_generators(right.stabilizers()));
    }
}

TEST(ReferenceCluster, Generators) {
    StabilizerState empty = reference_cluster(Graph::from_edges(3, {}));
    EXPECT_EQ(empty.str(), "+X__\n+_X_\n+__X\n");
    StabilizerState edge = reference_cluster(Graph::from_edges(2, {{1, 2}}));
    EXPECT_EQ(edge.str(), "+XZ\n+ZX\n");
    Graph g = Graph::from_edges(5, {{1, 2}, {2, 3}, {2, 5}, {1, 4}, {4, 5}});
    StabilizerState s = reference_cluster(g);
    EXPECT_EQ(group_membership(s.generators, PauliString::from_text("+ZXZ_Z")), 1);
    EXPECT_EQ(group_membership(s.generators, PauliString::from_text("-ZXZ_Z")), -1);
    EXPECT_EQ(group_membership(s.generators, PauliString::from_text("+ZX__Z")), 0);
}

TEST(RunSchedule, AlgorithmsPrepareClusterStateOnSmallGraphs) {
    for (int n = 1; n <= 4; n++) {
        int pairs = n * (n - 1) / 2;
        for (uint64_t mask = 0; mask < (uint64_t(1) << pairs); mask++) {
            Graph g = testing::graph_from_mask(n, mask);
            StabilizerState ref = reference_cluster(g);
            EXPECT_EQ(prepared_state(schedule_algorithm1(g, g.vertices())), ref) << n << ":" << mask;
            EXPECT_EQ(prepared_state(schedule_algorithm2(g, g.vertices())), ref) << n << ":" << mask;
        }
    }
}

TEST(RunSchedule, RandomMeasurementOutcomesAreCorrected) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; trial++) {
        Graph g = testing::random_graph(7, 0.35, rng);
        Schedule s = schedule_algorithm1(g, testing::random_ordering(g, rng));
        RunOptions options;
        options.policy.rng = &rng;
        EXPECT_EQ(final_state(s, run_schedule(s, {}, options)), reference_cluster(g));
    }
}

// After block k of Algorithm 1 the ancilla plus the first k data qubits hold the
// cluster state of G[k]': the induced subgraph plus the edge (Q, k).
TEST(RunSchedule, IntermediateStatesAreExtendedPrefixGraphs) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; trial++) {
        Graph g = testing::random_graph(6, 0.45, rng);
        std::vector<int> order = testing::random_ordering(g, rng);
        Schedule s = schedule_algorithm1(g, order);
        size_t n = size_t(g.max_label()) + 1;
        for (size_t k = 0; k < order.size(); k++) {
            Schedule prefix = s;
            prefix.ops.resize(s.blocks[order[k]].end);
            RunResult run = run_schedule(prefix);
            std::vector<size_t> qubits = {0};
            std::vector<std::pair<size_t, size_t>> edges = {{0, size_t(order[k])}};
            for (size_t a = 0; a <= k; a++) {
                qubits.push_back(size_t(order[a]));
                for (size_t b = a + 1; b <= k; b++) {
                    if (g.has_edge(order[a], order[b])) edges.emplace_back(order[a], order[b]);
                }
            }
            std::sort(qubits.begin(), qubits.end());
            auto expected = restrict_generators(cluster_generators(n, qubits, edges), qubits);
            // Unused qubits are still |0>, so the restriction is well defined.
            EXPECT_EQ(restrict_generators(run.tableau.stabilizers(), qubits), expected) << trial << ":" << k;
        }
    }
}

TEST(RunSchedule, ProtocolsAgreeOnSmallLattice) {
    LatticeSpec spec = LatticeSpec::cube(3);
    StabilizerState ref = reference_cluster(build_bcc(spec));
    EXPECT_EQ(prepared_state(schedule_protocolB(spec)), ref);
    EXPECT_EQ(prepared_state(schedule_protocolA(spec)), ref);
}

TEST(EffectiveError, AncillaXBeforeFirstBlockIsHarmless) {
    Graph g = Graph::from_edges(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    Schedule s = schedule_algorithm1(g, g.vertices());
    Fault f{{s.blocks[1].begin, kAncilla}, 'X'};
    EXPECT_TRUE(verify_effective_error(s, {f}, LabelledPauli{}));
    EXPECT_EQ(canonical_effective_error(s, {f}), LabelledPauli{});
}

TEST(EffectiveError, IdentityFaultRejectsNontrivialClaim) {
    Graph g = Graph::from_edges(3, {{1, 2}, {2, 3}});
    Schedule s = schedule_algorithm1(g, g.vertices());
    EXPECT_FALSE(verify_effective_error(s, {}, LabelledPauli{{}, {1}}));
    // A stabilizer element is an acceptable (trivial) claim.
    EXPECT_TRUE(verify_effective_error(s, {}, LabelledPauli{{2}, {1, 3}}));
}

TEST(EffectiveError, DataZBeforeCxIsHarmlessAndXSpreads) {
    Graph g = Graph::from_edges(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}});
    Schedule s = schedule_algorithm1(g, g.vertices());
    size_t cx1 = size_t(s.cx_index[1]);
    EXPECT_EQ(canonical_effective_error(s, {Fault{{cx1, 1}, 'Z'}}), LabelledPauli{});
    // X_1 right after its CX: propagates to X_1 Z_j for the later non-successor neighbours.
    LabelledPauli claim{{1}, {3, 4}};
    EXPECT_TRUE(verify_effective_error(s, {Fault{{cx1 + 1, 1}, 'X'}}, claim));
}

TEST(EffectiveError, CompositionIsMultiplicative) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; trial++) {
        Graph g = testing::random_graph(6, 0.4, rng);
        Schedule s = schedule_algorithm1(g, testing::random_ordering(g, rng));
        auto locs = fault_locations(s);
        StabilizerState ideal = prepared_state(s);
        const char *paulis = "XYZ";
        Fault f1{locs[rng() % locs.size()], paulis[rng() % 3]};
        Fault f2{locs[rng() % locs.size()], paulis[rng() % 3]};
        PauliString e1 = effective_error_representative(ideal, prepared_state(s, {f1}));
        PauliString e2 = effective_error_representative(ideal, prepared_state(s, {f2}));
        e1.mul_assign(e2, true);
        StabilizerState both = prepared_state(s, {f1, f2});
        EXPECT_TRUE(verify_effective_error(ideal, both, from_pauli(ideal, e1)));
    }
}

TEST(EffectiveError, LocalityRegionCheck) {
    Graph g = Graph::from_edges(4, {{1, 2}, {2, 3}, {3, 4}});
    StabilizerState ideal = reference_cluster(g);
    // Z_1 Z_3 = (X_2 Z_1 Z_3) X_2, so it has a representative on {2}.
    PauliString p = to_pauli(ideal, LabelledPauli{{}, {1, 3}});
    EXPECT_TRUE(has_representative_within(ideal, p, {2}));
    EXPECT_FALSE(has_representative_within(ideal, p, {4}));
}

TEST(EffectiveError, CanonicalSearchSizeLimit) {
    Graph g = Graph::from_edges(21, {});
    Schedule s = schedule_algorithm1(g, g.vertices());
    EXPECT_THROW(canonical_effective_error(s, {}), std::invalid_argument);
}

}  // namespace
}  // namespace seqcluster
