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

// Run files: JSON documents describing a Monte Carlo sweep (a grid of lattice
// sizes and error rates) or an optimal-L search, plus the CSV formats the
// command-line tool reads and writes.

#ifndef SEQCLUSTER_TOOLS_RUN_FILE_H
#define SEQCLUSTER_TOOLS_RUN_FILE_H

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqcluster/fitting.h"
#include "seqcluster/montecarlo.h"

namespace seqcluster::cli {

enum class RunKind { Grid, OptimalL };

/// {
///   "kind": "grid" | "optimal_L",          (default "grid")
///   "protocol": "A" | "B",
///   "model": "EM1" | "EM2" | "EM3a" | "EM3b",
///   "L": [odd sizes, ascending for optimal_L],
///   "parity_offset": [0, 1, 1],            (optional)
///   "p": [...],        EM1 and EM2 only
///   "p_loss": [...],   EM2 only
///   "eta": [...],      EM3a and EM3b only
///   "stop": {"min_trials", "min_failures", "max_trials"},
///   "seed": unsigned integer,
///   "output": {"csv", "json", "checkpoint"}   (paths relative to the run file)
/// }
/// Rates are plain decimals (0.0039, never 0.39%). Unknown keys are rejected.
struct RunFile {
    RunKind kind = RunKind::Grid;
    Protocol protocol = Protocol::ProtocolB;
    ErrorModelKind model = ErrorModelKind::EM1;
    std::vector<int> L;
    std::array<int, 3> parity_offset = kDefaultParityOffset;
    std::vector<double> p;
    std::vector<double> p_loss;
    std::vector<double> eta;
    StopRule stop;
    uint64_t seed = 1;
    std::string csv_path;
    std::string json_path;
    std::string checkpoint_path;

    /// Throws std::invalid_argument on schema violations.
    static RunFile from_json(const nlohmann::json &doc, const std::string &base_dir = "");
    static RunFile load(const std::string &path);

    /// Error models in grid order (p_loss outer, p inner for EM2).
    std::vector<ErrorModel> models() const;
    /// Grid runs: L outer, models inner.
    std::vector<RunConfig> grid() const;
    /// Optimal-L runs: the configuration of one model (its lattice is replaced per L).
    RunConfig base_config(const ErrorModel &model) const;
};

/// Seed override from SEQCLUSTER_SEED, if set. Throws std::invalid_argument if malformed.
std::optional<uint64_t> seed_from_environment();

/// Version tag of the optimal-L CSV column layout (recorded in the sidecar metadata).
inline constexpr const char *kOptimalCsvSchema = "seqcluster-optimal-csv-v1";
inline constexpr const char *kOptimalCsvHeader =
    "protocol,model,p,p_loss,eta,seed,L_star,p_star,ci_low,ci_high,trials,failures,bracketed,censored";

struct OptimalRow {
    RunConfig config;
    OptimalLResult result;
};

std::string optimal_csv(const std::vector<OptimalRow> &rows);
nlohmann::json optimal_json(const std::vector<OptimalRow> &rows);

/// One parsed line of an optimal-L CSV.
struct OptimalCsvRow {
    std::string protocol;
    std::string model;
    double p = 0.0;
    double p_loss = 0.0;
    double eta = 0.0;
    int L_star = 0;
    double p_star = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    bool bracketed = false;
    bool censored = false;
};

std::vector<OptimalCsvRow> parse_optimal_csv(const std::string &text);

/// Estimates keyed by configuration hash, persisted as JSON so interrupted
/// optimal-L searches resume without recomputation.
class EstimateCache {
   public:
    EstimateCache() = default;
    /// Loads an existing cache file ("" disables persistence).
    explicit EstimateCache(std::string path);
    std::optional<Estimate> find(const RunConfig &config) const;
    /// Stores the estimate and rewrites the file atomically.
    void store(const RunConfig &config, const Estimate &estimate);

   private:
    std::string path_;
    std::map<std::string, Estimate> entries_;
};

}  // namespace seqcluster::cli

#endif  // SEQCLUSTER_TOOLS_RUN_FILE_H
