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

#include "seqcluster/verification.h"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "seqcluster/errors.h"
#include "seqcluster/stabsim.h"

namespace seqcluster {
namespace {

constexpr size_t kListedFailures = 10;

std::string location_text(const FaultLocation &loc, char pauli) {
    return std::string(1, pauli) + " on " + (loc.qubit == kAncilla ? std::string("Q") : std::to_string(loc.qubit)) +
           " before op " + std::to_string(loc.position);
}

std::string labels_text(const std::vector<int> &labels) {
    std::string out = "{";
    for (size_t i = 0; i < labels.size(); i++) out += (i ? "," : "") + std::to_string(labels[i]);
    return out + "}";
}

/// Index of the last op before `position` acting on `qubit`, or -1.
int previous_op(const Schedule &s, const FaultLocation &loc) {
    for (size_t k = std::min(loc.position, s.ops.size()); k-- > 0;) {
        if (s.ops[k].touches(loc.qubit)) return int(k);
    }
    return -1;
}

}  // namespace

void VerificationReport::record(const std::string &row, bool ok, const std::string &failure_description) {
    auto it = std::lower_bound(rows.begin(), rows.end(), row,
                               [](const VerificationRow &r, const std::string &label) { return r.label < label; });
    if (it == rows.end() || it->label != row) it = rows.insert(it, VerificationRow{row, 0, 0});
    it->checked++;
    checked++;
    if (!ok) {
        it->failed++;
        failed++;
        if (failures.size() < kListedFailures) failures.push_back(failure_description);
    }
}

void VerificationReport::merge(const VerificationReport &other) {
    for (const auto &row : other.rows) {
        auto it = std::lower_bound(rows.begin(), rows.end(), row.label,
                                   [](const VerificationRow &r, const std::string &label) { return r.label < label; });
        if (it == rows.end() || it->label != row.label) it = rows.insert(it, VerificationRow{row.label, 0, 0});
        it->checked += row.checked;
        it->failed += row.failed;
    }
    checked += other.checked;
    failed += other.failed;
    for (const auto &f : other.failures) {
        if (failures.size() < kListedFailures) failures.push_back(f);
    }
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto &r : rows) rs.push_back({{"row", r.label}, {"checked", r.checked}, {"failed", r.failed}});
    return {{"suite", name}, {"passed", passed()}, {"checked", checked},
            {"failed", failed}, {"rows", rs},       {"failures", failures}};
}

std::string VerificationReport::str() const {
    std::ostringstream out;
    out << name << ": " << (passed() ? "PASS" : "FAIL") << " (" << checked << " checks, " << failed << " failed)\n";
    for (const auto &r : rows) {
        out << "  " << (r.failed ? "FAIL " : "ok   ") << r.label << ": " << r.checked << " checked";
        if (r.failed) out << ", " << r.failed << " failed";
        out << "\n";
    }
    for (const auto &f : failures) out << "  failure: " << f << "\n";
    return out.str();
}

Graph graph_from_mask(int n, uint64_t mask) {
    std::vector<std::pair<int, int>> edges;
    int bit = 0;
    for (int a = 1; a <= n; a++) {
        for (int b = a + 1; b <= n; b++, bit++) {
            if ((mask >> bit) & 1) edges.emplace_back(a, b);
        }
    }
    return Graph::from_edges(n, edges);
}

Graph random_graph(int n, double edge_probability, std::mt19937_64 &rng) {
    std::bernoulli_distribution coin(edge_probability);
    std::vector<std::pair<int, int>> edges;
    for (int a = 1; a <= n; a++) {
        for (int b = a + 1; b <= n; b++) {
            if (coin(rng)) edges.emplace_back(a, b);
        }
    }
    return Graph::from_edges(n, edges);
}

std::vector<int> random_ordering(const Graph &g, std::mt19937_64 &rng) {
    std::vector<int> order = g.vertices();
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

bool after_data_measurement(const Schedule &s, const FaultLocation &location) {
    if (location.qubit == kAncilla) return false;
    int k = previous_op(s, location);
    return k >= 0 && s.ops[size_t(k)].kind == OpKind::MeasureData;
}

std::vector<FaultLocation> oracle_locations(const Schedule &s) {
    std::vector<FaultLocation> out;
    for (const FaultLocation &loc : fault_locations(s)) {
        if (!after_data_measurement(s, loc)) out.push_back(loc);
    }
    return out;
}

std::string rule_row_label(const Schedule &s, const FaultLocation &location, char pauli) {
    std::string label = std::string(1, pauli) + " on " + (location.qubit == kAncilla ? "Q" : "data") + " after ";
    int k = previous_op(s, location);
    if (k < 0) return label + "start";
    const Op &op = s.ops[size_t(k)];
    label += op_kind_name(op.kind);
    if (location.qubit != kAncilla && op.block != 0) {
        label += op.block == location.qubit ? " (own block)" : " (later block)";
    }
    return label;
}

int attributed_vertex(const Schedule &s, const FaultLocation &location) {
    for (size_t k = std::min(location.position, s.ops.size()); k-- > 0;) {
        if (s.ops[k].touches(location.qubit) && s.ops[k].block != 0) return s.ops[k].block;
    }
    for (size_t k = location.position; k < s.ops.size(); k++) {
        if (s.ops[k].block != 0) return s.ops[k].block;
    }
    return s.ordering.empty() ? 0 : s.ordering.front();
}

VerificationReport verify_algorithm_states(const AlgorithmCheckOptions &options) {
    if (options.max_n < 0 || options.max_n > kMaxExhaustiveVertices) {
        throw std::invalid_argument("exhaustive graph size must be in [0, " + std::to_string(kMaxExhaustiveVertices) +
                                    "], got " + std::to_string(options.max_n));
    }
    if (options.random_pairs < 0 || options.random_max_n < 1 || options.random_max_n > kMaxOracleGraphVertices) {
        throw std::invalid_argument("random graph sizes must be in [1, " + std::to_string(kMaxOracleGraphVertices) +
                                    "]");
    }
    VerificationReport report;
    report.name = "algorithm states";
    for (int n = 1; n <= options.max_n; n++) {
        int pairs = n * (n - 1) / 2;
        for (uint64_t mask = 0; mask < (uint64_t(1) << pairs); mask++) {
            Graph g = graph_from_mask(n, mask);
            StabilizerState ref = reference_cluster(g);
            std::string what = "n=" + std::to_string(n) + " mask=" + std::to_string(mask);
            report.record("algorithm1 exhaustive n=" + std::to_string(n),
                          prepared_state(schedule_algorithm1(g, g.vertices())) == ref, "algorithm1 " + what);
            report.record("algorithm2 exhaustive n=" + std::to_string(n),
                          prepared_state(schedule_algorithm2(g, g.vertices())) == ref, "algorithm2 " + what);
        }
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> size(1, options.random_max_n);
    for (int t = 0; t < options.random_pairs; t++) {
        Graph g = random_graph(size(rng), options.edge_probability, rng);
        std::vector<int> order = random_ordering(g, rng);
        StabilizerState ref = reference_cluster(g);
        RunOptions run;
        run.policy.rng = &rng;
        std::string what = "random pair " + std::to_string(t) + " ordering " + labels_text(order);
        Schedule s1 = schedule_algorithm1(g, order);
        report.record("algorithm1 random ordering", final_state(s1, run_schedule(s1, {}, run)) == ref,
                      "algorithm1 " + what);
        Schedule s2 = schedule_algorithm2(g, order);
        report.record("algorithm2 random ordering", final_state(s2, run_schedule(s2, {}, run)) == ref,
                      "algorithm2 " + what);
    }
    return report;
}

VerificationReport verify_rule_table(const Schedule &s) {
    VerificationReport report;
    report.name = std::string(protocol_name(s.protocol)) + " rule table";
    StabilizerState ideal = prepared_state(s);
    for (const FaultLocation &loc : oracle_locations(s)) {
        for (char pauli : {'X', 'Z'}) {
            FlipSet claim = flips_from_fault(s, Fault{loc, pauli});
            StabilizerState faulty = prepared_state(s, {Fault{loc, pauli}});
            bool ok = verify_effective_error(ideal, faulty, claim.to_pauli());
            report.record(rule_row_label(s, loc, pauli), ok, location_text(loc, pauli) + " claimed " + claim.str());
        }
    }
    return report;
}

VerificationReport verify_locality(const Schedule &s) {
    VerificationReport report;
    report.name = std::string(protocol_name(s.protocol)) + " locality";
    // Regions are formed on the preparation graph; Protocol A maps them to the bcc
    // labels of the final state, dropping measured-out sites.
    auto region_of = [&](int i) {
        std::vector<int> region = s.graph.neighbors(i);
        region.push_back(i);
        if (s.protocol == Protocol::Algorithm2) {
            for (int j : {s.prev_in_order(i), s.next_in_order(i)}) {
                if (j != 0) region.push_back(j);
            }
        }
        if (s.protocol == Protocol::ProtocolA) {
            std::vector<int> mapped;
            for (int j : region) {
                if (s.cubic_to_bcc[size_t(j)] != 0) mapped.push_back(s.cubic_to_bcc[size_t(j)]);
            }
            region = mapped;
        }
        std::sort(region.begin(), region.end());
        region.erase(std::unique(region.begin(), region.end()), region.end());
        return region;
    };
    StabilizerState ideal = prepared_state(s);
    for (const FaultLocation &loc : oracle_locations(s)) {
        // Candidate centres: the attributed vertex, the faulty data qubit, then the rest.
        std::vector<int> centres = {attributed_vertex(s, loc)};
        if (loc.qubit != kAncilla) centres.push_back(loc.qubit);
        for (int v : s.ordering) centres.push_back(v);
        for (char pauli : {'X', 'Z'}) {
            StabilizerState faulty = prepared_state(s, {Fault{loc, pauli}});
            PauliString representative = effective_error_representative(ideal, faulty);
            bool ok = false;
            for (int i : centres) {
                if (has_representative_within(ideal, representative, region_of(i))) {
                    ok = true;
                    break;
                }
            }
            report.record(rule_row_label(s, loc, pauli), ok,
                          location_text(loc, pauli) + " has no effective error within any {i} + N(i)" +
                              (s.protocol == Protocol::Algorithm2 ? " + {i-1, i+1}" : "") + "; representative " +
                              from_pauli(ideal, representative).str());
        }
    }
    return report;
}

VerificationReport verify_random_graphs(const RandomGraphCheckOptions &options) {
    if (options.graphs < 0 || options.max_vertices < 1 || options.max_vertices > kMaxOracleGraphVertices) {
        throw std::invalid_argument("random graph sizes must be in [1, " + std::to_string(kMaxOracleGraphVertices) +
                                    "]");
    }
    VerificationReport report;
    report.name = "random graphs";
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> size(1, options.max_vertices);
    for (int t = 0; t < options.graphs; t++) {
        Graph g = random_graph(size(rng), options.edge_probability, rng);
        std::vector<int> order = random_ordering(g, rng);
        for (const Schedule &s : {schedule_algorithm1(g, order), schedule_algorithm2(g, order)}) {
            std::string prefix = std::string(protocol_name(s.protocol)) + " ";
            auto relabel = [&](VerificationReport r, const std::string &suite) {
                for (auto &row : r.rows) row.label = prefix + suite + ": " + row.label;
                for (auto &f : r.failures) f = prefix + suite + " graph " + std::to_string(t) + ": " + f;
                return r;
            };
            if (options.rules) report.merge(relabel(verify_rule_table(s), "rules"));
            if (options.locality) report.merge(relabel(verify_locality(s), "locality"));
        }
    }
    return report;
}

VerificationReport verify_protocol_table(Protocol protocol, int L) {
    LatticeSpec spec = LatticeSpec::cube(L);
    spec.validate_memory();
    if (L > kMaxOracleLatticeSide) {
        throw std::invalid_argument("oracle verification is limited to L <= " + std::to_string(kMaxOracleLatticeSide) +
                                    ", got " + std::to_string(L));
    }
    if (protocol == Protocol::ProtocolA) return verify_rule_table(schedule_protocolA(spec));
    if (protocol == Protocol::ProtocolB) return verify_rule_table(schedule_protocolB(spec));
    throw std::invalid_argument("protocol table verification needs Protocol A or B");
}

}  // namespace seqcluster
