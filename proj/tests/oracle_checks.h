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

// Shared oracle sweeps used by the unit tests and the acceptance binary.

#ifndef SEQCLUSTER_TESTS_ORACLE_CHECKS_H
#define SEQCLUSTER_TESTS_ORACLE_CHECKS_H

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seqcluster/circuits.h"
#include "seqcluster/errors.h"
#include "seqcluster/matching.h"
#include "seqcluster/stabsim.h"
#include "seqcluster/verification.h"

namespace seqcluster::testing {

struct RuleMismatch {
    FaultLocation location;
    char pauli = 'X';
    std::string claimed;

    std::string str() const {
        return std::string(1, pauli) + " on qubit " + std::to_string(location.qubit) + " before op " +
               std::to_string(location.position) + " claimed " + claimed;
    }
};

/// Runs every single X and Z fault at every location of the schedule through the
/// tableau oracle and compares the result with the rule engine.
inline std::vector<RuleMismatch> check_rules_against_oracle(const Schedule &s, size_t max_mismatches = 10) {
    StabilizerState ideal = prepared_state(s);
    std::vector<RuleMismatch> out;
    for (const FaultLocation &loc : oracle_locations(s)) {
        for (char pauli : {'X', 'Z'}) {
            FlipSet claim = flips_from_fault(s, Fault{loc, pauli});
            StabilizerState faulty = prepared_state(s, {Fault{loc, pauli}});
            if (!verify_effective_error(ideal, faulty, claim.to_pauli())) {
                out.push_back(RuleMismatch{loc, pauli, claim.str()});
                if (out.size() >= max_mismatches) return out;
            }
        }
    }
    return out;
}

/// Enumerates every matching (perfect ones only if `perfect`) and returns the best
/// total weight: the minimum for perfect matchings, the maximum otherwise. Returns
/// nullopt if no perfect matching exists.
inline std::optional<int64_t> brute_force_matching_weight(int n, const std::vector<WeightedEdge> &edges,
                                                          bool perfect) {
    std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, std::numeric_limits<int64_t>::min()));
    for (const WeightedEdge &e : edges) {
        int64_t &slot = w[e.u][e.v];
        int64_t better = slot == std::numeric_limits<int64_t>::min()
                             ? e.weight
                             : (perfect ? std::min(slot, e.weight) : std::max(slot, e.weight));
        w[e.u][e.v] = w[e.v][e.u] = better;
    }
    std::optional<int64_t> best;
    std::vector<char> used(n, 0);
    std::function<void(int, int64_t)> rec = [&](int v, int64_t total) {
        while (v < n && used[v]) v++;
        if (v == n) {
            if (!best || (perfect ? total < *best : total > *best)) best = total;
            return;
        }
        used[v] = 1;
        if (!perfect) rec(v + 1, total);
        for (int u = v + 1; u < n; u++) {
            if (!used[u] && w[v][u] != std::numeric_limits<int64_t>::min()) {
                used[u] = 1;
                rec(v + 1, total + w[v][u]);
                used[u] = 0;
            }
        }
        used[v] = 0;
    };
    rec(0, 0);
    return best;
}

/// Decoder-level matching: each defect pairs with another defect or with the
/// boundary. Enumerates all such assignments and returns the minimum weight.
inline int64_t brute_force_defect_matching(const std::vector<std::vector<int64_t>> &distance,
                                           const std::vector<int64_t> &boundary) {
    int k = int(boundary.size());
    std::vector<char> used(k, 0);
    int64_t best = std::numeric_limits<int64_t>::max();
    std::function<void(int, int64_t)> rec = [&](int v, int64_t total) {
        while (v < k && used[v]) v++;
        if (v == k) {
            best = std::min(best, total);
            return;
        }
        used[v] = 1;
        rec(v + 1, total + boundary[v]);
        for (int u = v + 1; u < k; u++) {
            if (!used[u]) {
                used[u] = 1;
                rec(v + 1, total + distance[v][u]);
                used[u] = 0;
            }
        }
        used[v] = 0;
    };
    rec(0, 0);
    return best;
}

}  // namespace seqcluster::testing

#endif  // SEQCLUSTER_TESTS_ORACLE_CHECKS_H
