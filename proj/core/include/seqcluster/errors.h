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

// Circuit-level noise: the four error models, the effective-error rules that
// turn single-qubit faults into measurement-outcome flips on the final state,
// qubit loss, and delay-line dephasing.

#ifndef SEQCLUSTER_ERRORS_H
#define SEQCLUSTER_ERRORS_H

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqcluster/circuits.h"
#include "seqcluster/random.h"
#include "seqcluster/stabsim.h"

namespace seqcluster {

enum class ErrorModelKind {
    EM1,   ///< depolarising circuit noise with rate p
    EM2,   ///< EM1 plus detectable loss of each data qubit with probability p_loss
    EM3a,  ///< EM1 at p = 1e-3 plus dephasing with rate eta per delay-line time step
    EM3b,  ///< EM1 at p = 1e-3 plus loss with rate eta per delay-line time step
};

const char *error_model_name(ErrorModelKind kind);
ErrorModelKind error_model_from_name(const std::string &name);

/// Circuit error rate used by the delay-line models.
inline constexpr double kDelayCircuitRate = 1e-3;

struct ErrorModel {
    ErrorModelKind kind = ErrorModelKind::EM1;
    double p = 0.0;
    double p_loss = 0.0;
    double eta = 0.0;

    static ErrorModel em1(double p);
    static ErrorModel em2(double p, double p_loss);
    static ErrorModel em3a(double eta_z);
    static ErrorModel em3b(double eta_loss);

    /// Throws std::invalid_argument for rates outside [0, 1] (eta_Z <= 1/2) or an
    /// EM3 model whose circuit rate is not 1e-3.
    void validate() const;
    /// EM3 variants drop the channel after data-qubit initialisation.
    bool data_init_noise() const { return kind == ErrorModelKind::EM1 || kind == ErrorModelKind::EM2; }
    nlohmann::json to_json() const;
    /// {"kind": "EM1"|"EM2"|"EM3a"|"EM3b", "p", "p_loss", "eta"}; unknown keys rejected.
    static ErrorModel from_json(const nlohmann::json &doc);
    bool operator==(const ErrorModel &other) const = default;
};

/// Sign-free effective error: the final X-measurement outcomes it flips (Z part)
/// and the inert X residue. Both lists are sorted and duplicate-free.
struct FlipSet {
    std::vector<int> z_flips;
    std::vector<int> x_residues;

    bool empty() const { return z_flips.empty() && x_residues.empty(); }
    bool operator==(const FlipSet &other) const = default;
    std::string str() const;
    /// The effective error as a Pauli on the final-state labels.
    LabelledPauli to_pauli() const { return LabelledPauli{x_residues, z_flips}; }
};

/// Symmetric difference of both parts (the product of the effective errors up to sign).
FlipSet compose(const FlipSet &a, const FlipSet &b);

/// Effective error of a single X, Y or Z fault on any Algorithm-1 or Algorithm-2
/// schedule (including the lattice protocols before measure-out), in the labels of
/// the schedule's graph. Throws std::invalid_argument for locations outside the schedule.
FlipSet flips_from_fault_general(const Schedule &s, const FaultLocation &location, char pauli);
/// Protocol A: preparation rules plus the Z measure-out stage, in bcc labels.
FlipSet flips_from_fault_protA(const Schedule &s, const FaultLocation &location, char pauli);
/// Protocol B: effective error on the bcc lattice.
FlipSet flips_from_fault_protB(const Schedule &s, const FaultLocation &location, char pauli);
/// Any schedule; includes the partner qubit of two-qubit faults. Output labels are
/// those of output_labels(s).
FlipSet flips_from_fault(const Schedule &s, const Fault &fault);

/// Loss of a data qubit at a (continuous) time-step value. Controlled-Z gates on the
/// qubit after that time act as the identity; `kick` is the erased qubit's random
/// Z value, which decides whether those skipped gates leave a Z kick on the ancilla.
/// NoiseSampler::sample places every loss at the end of the qubit's delay exposure
/// (an erasure with no skipped gates); earlier loss times are for explicit fault sets.
struct LossEvent {
    int label = 0;
    double time = 0.0;
    bool kick = false;
    bool operator==(const LossEvent &other) const = default;
};

/// All sampled noise of one trial.
struct FaultSet {
    std::vector<Fault> pauli_events;
    std::vector<LossEvent> losses;
    /// Data labels (schedule labels) hit by an odd number of delay-line Z errors.
    std::vector<int> delay_flips;
    void clear() {
        pauli_events.clear();
        losses.clear();
        delay_flips.clear();
    }
};

/// Flip and loss pattern on the final-state labels.
struct ErrorSample {
    std::vector<uint8_t> flipped;
    std::vector<uint8_t> lost;
    /// Labels whose entries may be nonzero (for sparse clearing).
    std::vector<int> touched;

    void resize(size_t n);
    void clear();
    void flip(int label);
    void lose(int label);
    std::vector<int> flipped_labels() const;
    std::vector<int> lost_labels() const;
};

/// Precompiled noise for one (schedule, model) pair: every noise channel with the
/// effective errors of its Paulis looked up once. Immutable after construction and
/// safe to share between threads.
class NoiseSampler {
   public:
    NoiseSampler(const Schedule &s, const ErrorModel &model);

    const Schedule &schedule() const { return *schedule_; }
    const ErrorModel &model() const { return model_; }
    /// Largest final-state label (size of ErrorSample vectors minus one).
    int max_output_label() const { return max_output_label_; }
    size_t num_channels() const { return channels_.size(); }

    /// Draws the noise of one trial.
    void sample(Rng &rng, FaultSet &out) const;
    /// Applies sampled noise: flips and losses on the final-state labels.
    void apply(const FaultSet &faults, ErrorSample &out) const;
    /// sample + apply.
    void sample_errors(Rng &rng, FaultSet &scratch, ErrorSample &out) const;

    /// Flip probability of a qubit with delay exposure ell under dephasing eta.
    static double delay_flip_probability(double eta, int ell);
    /// Loss probability of a qubit with delay exposure ell under delay loss eta.
    static double delay_loss_probability(double eta, int ell);

   private:
    struct Slot {
        int qubit = kAncilla;
        int time_step = 0;
        uint32_t x_begin = 0, x_end = 0;  // z flips of an X fault, in output labels
        uint32_t z_begin = 0, z_end = 0;  // z flips of a Z fault
    };
    struct Channel {
        uint32_t slot_a = 0;
        uint32_t slot_b = std::numeric_limits<uint32_t>::max();  // two-qubit channels
    };
    struct DataQubit {
        int label = 0;
        int cx_time = 0;
        int exposure = 0;
        /// In-block CZ_Q(label) gates: (time step, block label), in time order.
        std::vector<std::pair<int, int>> cz_blocks;
    };

    /// Slot of a location, after moving it to the canonical position of its qubit.
    uint32_t slot_index(const FaultLocation &location) const;
    void add_flips(ErrorSample &out, uint32_t begin, uint32_t end) const;
    void add_output_flip(ErrorSample &out, int schedule_label) const;
    void mark_lost(ErrorSample &out, int schedule_label) const;

    const Schedule *schedule_;
    ErrorModel model_;
    int max_output_label_ = 0;
    std::vector<FaultLocation> locations_;
    std::vector<Slot> slots_;
    std::vector<int> flip_storage_;
    std::vector<Channel> channels_;
    double log1m_p_ = 0.0;
    std::vector<DataQubit> data_;
    /// Index into data_ per schedule label (-1 if absent).
    std::vector<int> data_index_;
    /// Slot indices per qubit, ascending in position.
    std::vector<std::vector<uint32_t>> qubit_slots_;
    /// Output labels flipped by a Z on a schedule label (empty for measured-out sites).
    std::vector<int> output_of_;
    /// Groups of data_ indices sharing a per-qubit probability (delay models, EM2 loss).
    struct Group {
        double log1m = 0.0;
        std::vector<uint32_t> members;
    };
    std::vector<Group> loss_groups_;
    std::vector<Group> dephasing_groups_;
};

/// Samples the noise of one trial of `model` on `s`. The seed is mandatory.
FaultSet sample_faults(const Schedule &s, const ErrorModel &model, std::optional<uint64_t> seed);

/// Delay-line dephasing alone: each data qubit flips with probability
/// (1 - (1 - 2 eta)^ell) / 2 where ell is its delay exposure.
FlipSet sample_delay_flips(const Schedule &s, double eta_z, std::optional<uint64_t> seed);

}  // namespace seqcluster

#endif  // SEQCLUSTER_ERRORS_H
