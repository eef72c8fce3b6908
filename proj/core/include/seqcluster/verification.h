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

// Oracle-driven verification suites: exact state preparation by Algorithms 1
// and 2, the single-fault propagation rules against the tableau oracle (with a
// per-row tally of the rule table), and locality of effective errors.

#ifndef SEQCLUSTER_VERIFICATION_H
#define SEQCLUSTER_VERIFICATION_H

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqcluster/circuits.h"
#include "seqcluster/graphs.h"

namespace seqcluster {

/// Tally of one row (a class of fault locations) of a verification suite.
struct VerificationRow {
    std::string label;
    uint64_t checked = 0;
    uint64_t failed = 0;
};

struct VerificationReport {
    std::string name;
    uint64_t checked = 0;
    uint64_t failed = 0;
    /// Sorted by label.
    std::vector<VerificationRow> rows;
    /// Descriptions of the first few failures.
    std::vector<std::string> failures;

    bool passed() const { return failed == 0 && checked > 0; }
    void record(const std::string &row, bool ok, const std::string &failure_description);
    /// Adds the other report's tallies (rows with equal labels are summed).
    void merge(const VerificationReport &other);
    nlohmann::json to_json() const;
    std::string str() const;
};

/// Largest exhaustive graph size and largest lattice side the oracle suites accept.
inline constexpr int kMaxExhaustiveVertices = 6;
inline constexpr int kMaxOracleLatticeSide = 7;
inline constexpr int kMaxOracleGraphVertices = 16;

/// Graph on 1..n whose edges are the set bits of `mask` over the pairs
/// (1,2), (1,3), ..., (n-1,n) in lexicographic order.
Graph graph_from_mask(int n, uint64_t mask);
/// Erdos-Renyi graph on 1..n.
Graph random_graph(int n, double edge_probability, std::mt19937_64 &rng);
std::vector<int> random_ordering(const Graph &g, std::mt19937_64 &rng);

/// True if the location's qubit was already measured out in the X basis. The oracle
/// leaves final X measurements unexecuted, so such faults are outside its scope.
bool after_data_measurement(const Schedule &s, const FaultLocation &location);
/// Fault locations the oracle can evaluate.
std::vector<FaultLocation> oracle_locations(const Schedule &s);

/// Row of the propagation-rule table a single fault belongs to, e.g.
/// "X on data after CZ_Q (later block)".
std::string rule_row_label(const Schedule &s, const FaultLocation &location, char pauli);

/// Vertex whose gate block a fault location belongs to: the block of the last op on
/// the faulty qubit before the location, else of the next op, else the first vertex.
int attributed_vertex(const Schedule &s, const FaultLocation &location);

struct AlgorithmCheckOptions {
    /// Every graph on 1..max_n vertices, identity ordering.
    int max_n = 5;
    /// Random (graph, ordering) pairs with random intermediate measurement outcomes.
    int random_pairs = 200;
    int random_max_n = 10;
    double edge_probability = 0.4;
    uint64_t seed = 1;
};

/// Both algorithms must prepare exactly the reference cluster state. Throws
/// std::invalid_argument above the oracle limits.
VerificationReport verify_algorithm_states(const AlgorithmCheckOptions &options = {});

/// Every single X and Z fault at every oracle location of the schedule is run through
/// the tableau oracle and compared with the rule engine.
VerificationReport verify_rule_table(const Schedule &s);

/// Every single X or Z fault has an effective error supported within {i} and N(i)
/// for some vertex i of the preparation graph, with the ordering neighbours i-1 and
/// i+1 added for Algorithm 2 (Protocol A maps the region to bcc labels). The
/// minimum-weight representative itself may lie elsewhere (for example Y2 Y4 instead
/// of Z on the three neighbours of 5).
VerificationReport verify_locality(const Schedule &s);

struct RandomGraphCheckOptions {
    int graphs = 50;
    int max_vertices = 10;
    double edge_probability = 0.4;
    uint64_t seed = 2;
    bool rules = true;
    bool locality = true;
};

/// Rule tables and locality for Algorithms 1 and 2 on random (graph, ordering) pairs.
VerificationReport verify_random_graphs(const RandomGraphCheckOptions &options = {});

/// Rule table of a Protocol A or B memory lattice of side L.
VerificationReport verify_protocol_table(Protocol protocol, int L);

}  // namespace seqcluster

#endif  // SEQCLUSTER_VERIFICATION_H
