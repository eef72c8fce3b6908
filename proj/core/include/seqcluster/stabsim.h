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

// Bit-packed stabilizer-tableau oracle. Executes schedules exactly, builds
// reference cluster states and certifies effective errors by comparing
// canonical stabilizer groups.

#ifndef SEQCLUSTER_STABSIM_H
#define SEQCLUSTER_STABSIM_H

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "seqcluster/circuits.h"
#include "seqcluster/graphs.h"

namespace seqcluster {

/// Hermitian Pauli product on n qubits with a sign. Y on qubit a is stored with
/// a in both the x and z supports.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t n);

    /// Parses strings such as "+XZ_Y" or "-ZZI" ('_' and 'I' are identity).
    static PauliString from_text(const std::string &text);

    size_t num_qubits() const { return n_; }
    size_t num_words() const { return xs_.size(); }
    bool x(size_t q) const { return (xs_[q >> 6] >> (q & 63)) & 1; }
    bool z(size_t q) const { return (zs_[q >> 6] >> (q & 63)) & 1; }
    void set_x(size_t q, bool v);
    void set_z(size_t q, bool v);
    /// Sets the Pauli on qubit q to 'I', 'X', 'Y' or 'Z'.
    void set(size_t q, char pauli);
    char get(size_t q) const;
    bool negative() const { return sign_; }
    void set_negative(bool s) { sign_ = s; }
    size_t weight() const;
    std::vector<size_t> support() const;
    bool is_identity() const;
    bool commutes(const PauliString &other) const;
    /// this <- this * rhs. Requires the product to be Hermitian (commuting factors)
    /// unless `allow_phase` is set, in which case an imaginary phase is dropped.
    void mul_assign(const PauliString &rhs, bool allow_phase = false);
    /// Returns the power of i of this * rhs relative to the sign-free product.
    static unsigned product_log_i(const uint64_t *x1, const uint64_t *z1, const uint64_t *x2, const uint64_t *z2,
                                  size_t words);
    std::string str() const;
    bool operator==(const PauliString &other) const = default;

    std::vector<uint64_t> &xs() { return xs_; }
    std::vector<uint64_t> &zs() { return zs_; }
    const std::vector<uint64_t> &xs() const { return xs_; }
    const std::vector<uint64_t> &zs() const { return zs_; }

   private:
    size_t n_ = 0;
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
    bool sign_ = false;
};

/// How outcomes of random measurements are chosen.
struct MeasurementPolicy {
    /// Outcomes for successive measurements (in execution order). Missing entries
    /// default to 0 for random measurements. A forced value on a deterministic
    /// measurement must match, else std::runtime_error is thrown.
    std::vector<int> forced;
    /// If set, random measurements without a forced value draw from this engine.
    std::mt19937_64 *rng = nullptr;
};

/// Aaronson-Gottesman tableau (destabilizers and stabilizers) starting in |0...0>.
class Tableau {
   public:
    explicit Tableau(size_t n);

    size_t num_qubits() const { return n_; }
    void h(size_t q);
    void s(size_t q);
    void cx(size_t control, size_t target);
    void cz(size_t a, size_t b);
    void x(size_t q);
    void y(size_t q);
    void z(size_t q);
    /// Applies a Pauli product (its sign is a global phase and is ignored).
    void apply_pauli(const PauliString &p);
    /// Z-basis measurement; returns 0 or 1. `forced` < 0 means "choose per policy".
    int measure_z(size_t q, int forced = -1, std::mt19937_64 *rng = nullptr);
    /// True if a Z measurement of q has a deterministic outcome.
    bool is_z_deterministic(size_t q) const;
    void reset_zero(size_t q);
    void reset_plus(size_t q);
    /// Stabilizer generator k (0 <= k < n).
    PauliString stabilizer(size_t k) const;
    std::vector<PauliString> stabilizers() const;
    std::string str() const;

   private:
    uint64_t *xrow(size_t r) { return &x_[r * words_]; }
    uint64_t *zrow(size_t r) { return &z_[r * words_]; }
    const uint64_t *xrow(size_t r) const { return &x_[r * words_]; }
    const uint64_t *zrow(size_t r) const { return &z_[r * words_]; }
    bool xbit(size_t r, size_t q) const { return (x_[r * words_ + (q >> 6)] >> (q & 63)) & 1; }
    bool zbit(size_t r, size_t q) const { return (z_[r * words_ + (q >> 6)] >> (q & 63)) & 1; }
    /// row h <- row h * row i (with sign).
    void rowsum(size_t h, size_t i);

    size_t n_;
    size_t words_;
    std::vector<uint64_t> x_;
    std::vector<uint64_t> z_;
    std::vector<uint8_t> r_;
};

/// A pure stabilizer state on an ordered list of labelled qubits, stored as a
/// canonical (reduced row echelon) generator list. Two states are equal iff
/// their canonical forms are equal.
struct StabilizerState {
    std::vector<int> labels;
    std::vector<PauliString> generators;

    bool operator==(const StabilizerState &other) const = default;
    /// One "+XZ_..." line per generator.
    std::string str() const;
    /// Index of a label in `labels` (throws std::out_of_range if missing).
    size_t index_of(int label) const;
};

/// Reduced row echelon form of a commuting, independent generator list (signs tracked).
std::vector<PauliString> canonical_generators(std::vector<PauliString> gens);
/// Restricts a pure state to `keep` (qubit indices) when the discarded qubits are in a
/// product state with the rest. Throws std::runtime_error otherwise.
std::vector<PauliString> restrict_generators(const std::vector<PauliString> &gens, const std::vector<size_t> &keep);
/// Returns +1 / -1 if +P / -P is in the group generated by the canonical generators, 0 otherwise.
int group_membership(const std::vector<PauliString> &canonical, const PauliString &p);

/// Reference cluster state of G: generators X_i prod_{j in N(i)} Z_j over G's labels.
StabilizerState reference_cluster(const Graph &g);

/// A Pauli inserted at a fault location. The Pauli is given on a single qubit or on
/// the ancilla plus one data qubit (two-qubit depolarizing terms).
struct Fault {
    FaultLocation location;
    char pauli = 'X';
    /// Optional second factor on another qubit at the same position.
    int partner_qubit = -1;
    char partner_pauli = 'I';
};

struct RunOptions {
    MeasurementPolicy policy;
    /// If false (default) the final X-basis data measurements are not executed so
    /// the prepared state can be inspected.
    bool execute_x_measurements = false;
};

struct RunResult {
    Tableau tableau{1};
    /// Outcome per op index (-1 for ops that are not measurements).
    std::vector<int> outcomes;
    /// Tableau index of the ancilla and of each data label (indexed by label).
    std::vector<size_t> qubit_index;
};

/// Executes the schedule on a fresh tableau with the faults inserted.
RunResult run_schedule(const Schedule &s, const std::vector<Fault> &faults = {}, const RunOptions &options = {});
/// Final prepared state on the schedule's final labels (bcc labels for Protocol A),
/// with the ancilla and measured-out qubits traced out.
StabilizerState final_state(const Schedule &s, const RunResult &run);
/// Convenience: run + final_state.
StabilizerState prepared_state(const Schedule &s, const std::vector<Fault> &faults = {});
/// Final labels of the schedule in the label space of final_state (bcc labels for Protocol A).
std::vector<int> output_labels(const Schedule &s);

/// Pauli on the labels of a final state, given as sparse lists (Y = in both lists).
struct LabelledPauli {
    std::vector<int> x;
    std::vector<int> z;
    bool operator==(const LabelledPauli &other) const = default;
    std::string str() const;
};

PauliString to_pauli(const StabilizerState &state, const LabelledPauli &p);
LabelledPauli from_pauli(const StabilizerState &state, const PauliString &p);

/// True iff claimed^dagger (faulty state) equals the fault-free state up to a global
/// phase, i.e. conjugating the faulty stabilizer group by the claim gives the
/// fault-free group with identical signs.
bool verify_effective_error(const Schedule &s, const std::vector<Fault> &faults, const LabelledPauli &claimed);
/// Same check against precomputed fault-free and faulty states.
bool verify_effective_error(const StabilizerState &ideal, const StabilizerState &faulty, const LabelledPauli &claimed);

/// Some Pauli E with faulty = E * ideal (up to phase). Throws std::runtime_error if the
/// faulty state is not a Pauli image of the ideal state.
PauliString effective_error_representative(const StabilizerState &ideal, const StabilizerState &faulty);

/// Largest final-state size accepted by canonical_effective_error.
inline constexpr size_t kCanonicalSearchLimit = 20;

/// Minimum-weight effective error (ties broken by lexicographically smallest sorted
/// support) among all Paulis equivalent modulo the final stabilizer group. Throws
/// std::invalid_argument if the final state has more than kCanonicalSearchLimit qubits.
LabelledPauli canonical_effective_error(const Schedule &s, const std::vector<Fault> &faults);
LabelledPauli canonical_effective_error(const StabilizerState &ideal, const StabilizerState &faulty);

/// True iff some effective error of the fault is supported inside `region` (labels).
bool has_representative_within(const StabilizerState &ideal, const PauliString &representative,
                               const std::vector<int> &region);

}  // namespace seqcluster

#endif  // SEQCLUSTER_STABSIM_H
