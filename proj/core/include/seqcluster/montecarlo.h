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

// Seeded Monte Carlo estimation of logical error rates: one trial samples
// circuit noise, maps it to measurement flips and losses, and decodes. Trials
// run in fixed-size chunks so results do not depend on the worker count.

#ifndef SEQCLUSTER_MONTECARLO_H
#define SEQCLUSTER_MONTECARLO_H

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "seqcluster/circuits.h"
#include "seqcluster/decoder.h"
#include "seqcluster/errors.h"
#include "seqcluster/graphs.h"

namespace seqcluster {

/// Trials are accounted in chunks of this size; the stop rule is checked at
/// chunk boundaries in index order.
inline constexpr uint64_t kTrialChunk = 1000;

/// Run until both minimums are met, or until max_trials.
struct StopRule {
    uint64_t min_trials = 1000000;
    uint64_t min_failures = 10000;
    uint64_t max_trials = 100000000;

    void validate() const;
    nlohmann::json to_json() const;
    static StopRule from_json(const nlohmann::json &doc);
    bool operator==(const StopRule &other) const = default;
};

struct RunConfig {
    /// ProtocolA or ProtocolB.
    Protocol protocol = Protocol::ProtocolB;
    LatticeSpec spec;
    ErrorModel model;
    uint64_t master_seed = 0;
    StopRule stop;

    /// Throws std::invalid_argument on an unsupported protocol or invalid parts.
    void validate() const;
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json &doc);
    /// Stable 16-hex-digit hash of the canonical JSON form.
    std::string hash() const;
    bool operator==(const RunConfig &other) const = default;
};

struct Estimate {
    uint64_t trials = 0;
    /// Trials where the primal or the dual logical failed.
    uint64_t failures = 0;
    uint64_t primal_failures = 0;
    uint64_t dual_failures = 0;
    double rate = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    /// max_trials was reached before min_failures.
    bool censored = false;

    nlohmann::json to_json() const;
    static Estimate from_json(const nlohmann::json &doc);
    bool operator==(const Estimate &other) const = default;
};

/// Wilson score interval for a binomial proportion (default 95%).
std::pair<double, double> wilson_interval(uint64_t failures, uint64_t trials, double z = 1.959963984540054);
/// Builds an Estimate (rate and interval) from counts.
Estimate make_estimate(uint64_t trials, uint64_t failures, uint64_t primal_failures, uint64_t dual_failures,
                       bool censored);

/// Precomputed schedule, noise sampler and decoder for one configuration.
/// Immutable after construction; run_trial may be called concurrently.
class TrialRunner {
   public:
    explicit TrialRunner(const RunConfig &config);

    const RunConfig &config() const { return config_; }
    /// Deterministic in (master_seed, index).
    DecodeOutcome run_trial(uint64_t index) const;

    /// Reusable per-worker buffers.
    struct Scratch {
        FaultSet faults;
        ErrorSample sample;
    };
    DecodeOutcome run_trial(uint64_t index, Scratch &scratch) const;

   private:
    RunConfig config_;
    Schedule schedule_;
    std::unique_ptr<NoiseSampler> sampler_;
    Decoder decoder_;
};

DecodeOutcome run_trial(const RunConfig &config, uint64_t trial_index);

struct EstimateOptions {
    /// Worker threads; 0 = hardware concurrency.
    int jobs = 1;
    /// Called after each completed chunk prefix with (trials, failures).
    std::function<void(uint64_t, uint64_t)> progress;
};

Estimate estimate_rate(const RunConfig &config, const EstimateOptions &options = {});
Estimate estimate_rate(const TrialRunner &runner, const EstimateOptions &options = {});

struct SweepRow {
    RunConfig config;
    Estimate estimate;
};

/// Raised when a checkpoint belongs to a different grid or schema.
class CheckpointError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char *kCheckpointSchema = "seqcluster-checkpoint-v1";
/// Version tag of the sweep CSV column layout (recorded in the sidecar metadata).
inline constexpr const char *kSweepCsvSchema = "seqcluster-sweep-csv-v1";
inline constexpr const char *kSweepCsvHeader =
    "protocol,L,M,N,model,p,p_loss,eta,seed,trials,failures,primal_failures,dual_failures,p_bar,ci_low,ci_high,"
    "censored";

struct SweepOptions {
    EstimateOptions estimate;
    /// Resumable progress file ("" disables checkpointing).
    std::string checkpoint_path;
    /// Called after each grid point with (index, row).
    std::function<void(size_t, const SweepRow &)> on_row;
};

/// Runs every grid point in order; completed points found in the checkpoint are reused.
std::vector<SweepRow> sweep(const std::vector<RunConfig> &grid, const SweepOptions &options = {});
/// Hash of a whole grid (ordered).
std::string grid_hash(const std::vector<RunConfig> &grid);
std::string sweep_csv(const std::vector<SweepRow> &rows);
nlohmann::json sweep_json(const std::vector<SweepRow> &rows);
/// Parses the CSV emitted by sweep_csv.
std::vector<SweepRow> parse_sweep_csv(const std::string &text);

/// Shortest round-trip decimal form used in every machine-readable output.
std::string format_double(double value);

}  // namespace seqcluster

#endif  // SEQCLUSTER_MONTECARLO_H
