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

#include "seqcluster/montecarlo.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "seqcluster/random.h"

namespace seqcluster {

namespace {

void reject_unknown_keys(const nlohmann::json &doc, const std::set<std::string> &allowed, const char *what) {
    if (!doc.is_object()) {
        throw std::invalid_argument(std::string(what) + " must be a JSON object");
    }
    for (const auto &item : doc.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument(std::string("unknown key in ") + what + ": " + item.key());
        }
    }
}

template <typename T>
T required(const nlohmann::json &doc, const char *key, const char *what) {
    if (!doc.contains(key)) {
        throw std::invalid_argument(std::string(what) + " is missing \"" + key + "\"");
    }
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw std::invalid_argument(std::string(what) + " has a malformed \"" + key + "\"");
    }
}

nlohmann::json lattice_to_json(const LatticeSpec &spec) {
    return {{"L", spec.L}, {"M", spec.M}, {"N", spec.N}, {"parity_offset", spec.parity_offset}};
}

LatticeSpec lattice_from_json(const nlohmann::json &doc) {
    reject_unknown_keys(doc, {"L", "M", "N", "parity_offset"}, "lattice");
    LatticeSpec spec;
    spec.L = required<int>(doc, "L", "lattice");
    spec.M = doc.contains("M") ? required<int>(doc, "M", "lattice") : spec.L;
    spec.N = doc.contains("N") ? required<int>(doc, "N", "lattice") : spec.L;
    if (doc.contains("parity_offset")) {
        spec.parity_offset = required<std::array<int, 3>>(doc, "parity_offset", "lattice");
    }
    return spec;
}

uint64_t fnv1a(const std::string &text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

// ---------------------------------------------------------------------------
// Configuration

void StopRule::validate() const {
    if (max_trials == 0) {
        throw std::invalid_argument("max_trials must be positive");
    }
    if (min_trials > max_trials) {
        throw std::invalid_argument("min_trials exceeds max_trials");
    }
}

nlohmann::json StopRule::to_json() const {
    return {{"min_trials", min_trials}, {"min_failures", min_failures}, {"max_trials", max_trials}};
}

StopRule StopRule::from_json(const nlohmann::json &doc) {
    reject_unknown_keys(doc, {"min_trials", "min_failures", "max_trials"}, "stop rule");
    StopRule r;
    if (doc.contains("min_trials")) r.min_trials = required<uint64_t>(doc, "min_trials", "stop rule");
    if (doc.contains("min_failures")) r.min_failures = required<uint64_t>(doc, "min_failures", "stop rule");
    if (doc.contains("max_trials")) r.max_trials = required<uint64_t>(doc, "max_trials", "stop rule");
    r.validate();
    return r;
}

void RunConfig::validate() const {
    if (protocol != Protocol::ProtocolA && protocol != Protocol::ProtocolB) {
        throw std::invalid_argument("memory runs use protocol A or B");
    }
    spec.validate_memory();
    model.validate();
    stop.validate();
}

nlohmann::json RunConfig::to_json() const {
    return {{"protocol", protocol_name(protocol)},
            {"lattice", lattice_to_json(spec)},
            {"model", model.to_json()},
            {"seed", master_seed},
            {"stop", stop.to_json()}};
}

RunConfig RunConfig::from_json(const nlohmann::json &doc) {
    reject_unknown_keys(doc, {"protocol", "lattice", "model", "seed", "stop"}, "run config");
    RunConfig c;
    c.protocol = protocol_from_name(required<std::string>(doc, "protocol", "run config"));
    c.spec = lattice_from_json(doc.at("lattice"));
    c.model = ErrorModel::from_json(required<nlohmann::json>(doc, "model", "run config"));
    c.master_seed = doc.contains("seed") ? required<uint64_t>(doc, "seed", "run config") : 0;
    if (doc.contains("stop")) c.stop = StopRule::from_json(doc.at("stop"));
    c.validate();
    return c;
}

std::string RunConfig::hash() const { return hex16(fnv1a(to_json().dump())); }

// ---------------------------------------------------------------------------
// Estimates

std::pair<double, double> wilson_interval(uint64_t failures, uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    double n = double(trials);
    double phat = double(failures) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double centre = (phat + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
    double lo = failures == 0 ? 0.0 : std::max(0.0, centre - half);
    double hi = failures == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

Estimate make_estimate(uint64_t trials, uint64_t failures, uint64_t primal_failures, uint64_t dual_failures,
                       bool censored) {
    if (failures > trials || primal_failures > failures || dual_failures > failures) {
        throw std::invalid_argument("inconsistent failure counts");
    }
    Estimate e;
    e.trials = trials;
    e.failures = failures;
    e.primal_failures = primal_failures;
    e.dual_failures = dual_failures;
    e.rate = trials ? double(failures) / double(trials) : 0.0;
    std::tie(e.ci_low, e.ci_high) = wilson_interval(failures, trials);
    e.censored = censored;
    return e;
}

nlohmann::json Estimate::to_json() const {
    return {{"trials", trials},       {"failures", failures}, {"primal_failures", primal_failures},
            {"dual_failures", dual_failures}, {"p_bar", rate},         {"ci_low", ci_low},
            {"ci_high", ci_high},     {"censored", censored}};
}

Estimate Estimate::from_json(const nlohmann::json &doc) {
    // Rates are recomputed from the counts so that a reloaded estimate is bit-identical.
    return make_estimate(required<uint64_t>(doc, "trials", "estimate"), required<uint64_t>(doc, "failures", "estimate"),
                         required<uint64_t>(doc, "primal_failures", "estimate"),
                         required<uint64_t>(doc, "dual_failures", "estimate"),
                         required<bool>(doc, "censored", "estimate"));
}

// ---------------------------------------------------------------------------
// Trials

TrialRunner::TrialRunner(const RunConfig &config) : config_(config), decoder_(config.spec) {
    config.validate();
    schedule_ = config.protocol == Protocol::ProtocolA ? schedule_protocolA(config.spec)
                                                        : schedule_protocolB(config.spec);
    sampler_ = std::make_unique<NoiseSampler>(schedule_, config.model);
}

DecodeOutcome TrialRunner::run_trial(uint64_t index, Scratch &scratch) const {
    Rng rng = make_stream(config_.master_seed, index);
    sampler_->sample_errors(rng, scratch.faults, scratch.sample);
    return decoder_.decode(scratch.sample, rng);
}

DecodeOutcome TrialRunner::run_trial(uint64_t index) const {
    Scratch scratch;
    return run_trial(index, scratch);
}

DecodeOutcome run_trial(const RunConfig &config, uint64_t trial_index) {
    return TrialRunner(config).run_trial(trial_index);
}

Estimate estimate_rate(const RunConfig &config, const EstimateOptions &options) {
    return estimate_rate(TrialRunner(config), options);
}

Estimate estimate_rate(const TrialRunner &runner, const EstimateOptions &options) {
    const StopRule &stop = runner.config().stop;
    const uint64_t num_chunks = (stop.max_trials + kTrialChunk - 1) / kTrialChunk;
    struct Counts {
        uint64_t trials = 0, failures = 0, primal = 0, dual = 0;
    };
    std::mutex mutex;
    std::map<uint64_t, Counts> pending;
    uint64_t next_chunk = 0, prefix = 0;
    Counts total;
    bool finished = false, satisfied = false;
    std::exception_ptr error;

    auto worker = [&]() {
        TrialRunner::Scratch scratch;
        while (true) {
            uint64_t chunk;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (finished || next_chunk >= num_chunks) return;
                chunk = next_chunk++;
            }
            Counts c;
            try {
                uint64_t begin = chunk * kTrialChunk;
                uint64_t end = std::min(begin + kTrialChunk, stop.max_trials);
                for (uint64_t t = begin; t < end; t++) {
                    DecodeOutcome o = runner.run_trial(t, scratch);
                    c.trials++;
                    c.primal += o.primal_fail;
                    c.dual += o.dual_fail;
                    c.failures += (o.primal_fail || o.dual_fail);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (!error) error = std::current_exception();
                finished = true;
                return;
            }
            std::lock_guard<std::mutex> lock(mutex);
            pending[chunk] = c;
            // Fold completed chunks in index order; the stop decision only ever
            // sees a prefix, so it is independent of scheduling.
            while (!finished) {
                auto it = pending.find(prefix);
                if (it == pending.end()) break;
                total.trials += it->second.trials;
                total.failures += it->second.failures;
                total.primal += it->second.primal;
                total.dual += it->second.dual;
                pending.erase(it);
                prefix++;
                if (options.progress) options.progress(total.trials, total.failures);
                satisfied = total.trials >= stop.min_trials && total.failures >= stop.min_failures;
                if (satisfied || prefix == num_chunks) finished = true;
            }
        }
    };

    int jobs = options.jobs > 0 ? options.jobs : int(std::max(1u, std::thread::hardware_concurrency()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int j = 0; j < jobs; j++) threads.emplace_back(worker);
        for (auto &t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);
    bool censored = total.failures < stop.min_failures;
    return make_estimate(total.trials, total.failures, total.primal, total.dual, censored);
}

// ---------------------------------------------------------------------------
// Sweeps

std::string grid_hash(const std::vector<RunConfig> &grid) {
    std::string all;
    for (const RunConfig &c : grid) all += c.to_json().dump() + "\n";
    return hex16(fnv1a(all));
}

namespace {

void write_checkpoint(const std::string &path, const std::vector<RunConfig> &grid, const std::vector<SweepRow> &rows) {
    nlohmann::json doc;
    doc["schema"] = kCheckpointSchema;
    doc["grid_hash"] = grid_hash(grid);
    doc["rows"] = nlohmann::json::array();
    for (size_t i = 0; i < rows.size(); i++) {
        doc["rows"].push_back({{"index", i}, {"config_hash", rows[i].config.hash()}, {"estimate", rows[i].estimate.to_json()}});
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
        out << doc.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

std::vector<Estimate> read_checkpoint(const std::string &path, const std::vector<RunConfig> &grid) {
    std::ifstream in(path);
    if (!in) return {};
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw CheckpointError("unreadable checkpoint " + path + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != kCheckpointSchema) {
        throw CheckpointError("checkpoint " + path + " has an unknown schema");
    }
    if (doc.value("grid_hash", "") != grid_hash(grid)) {
        throw CheckpointError("checkpoint " + path + " belongs to a different sweep grid");
    }
    std::vector<Estimate> out;
    for (const auto &row : doc.at("rows")) {
        size_t index = row.at("index").get<size_t>();
        if (index != out.size() || index >= grid.size() || row.at("config_hash") != grid[index].hash()) {
            throw CheckpointError("checkpoint " + path + " does not match the grid at row " + std::to_string(index));
        }
        out.push_back(Estimate::from_json(row.at("estimate")));
    }
    return out;
}

}  // namespace

std::vector<SweepRow> sweep(const std::vector<RunConfig> &grid, const SweepOptions &options) {
    for (const RunConfig &c : grid) c.validate();
    std::vector<Estimate> done;
    if (!options.checkpoint_path.empty()) done = read_checkpoint(options.checkpoint_path, grid);
    std::vector<SweepRow> rows;
    for (size_t i = 0; i < grid.size(); i++) {
        SweepRow row{grid[i], i < done.size() ? done[i] : estimate_rate(grid[i], options.estimate)};
        rows.push_back(row);
        if (!options.checkpoint_path.empty() && i >= done.size()) write_checkpoint(options.checkpoint_path, grid, rows);
        if (options.on_row) options.on_row(i, rows.back());
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream out;
    out << kSweepCsvHeader << "\n";
    for (const SweepRow &r : rows) {
        const RunConfig &c = r.config;
        const Estimate &e = r.estimate;
        out << protocol_name(c.protocol) << "," << c.spec.L << "," << c.spec.M << "," << c.spec.N << ","
            << error_model_name(c.model.kind) << "," << format_double(c.model.p) << "," << format_double(c.model.p_loss)
            << "," << format_double(c.model.eta) << "," << c.master_seed << "," << e.trials << "," << e.failures << ","
            << e.primal_failures << "," << e.dual_failures << "," << format_double(e.rate) << ","
            << format_double(e.ci_low) << "," << format_double(e.ci_high) << "," << (e.censored ? 1 : 0) << "\n";
    }
    return out.str();
}

nlohmann::json sweep_json(const std::vector<SweepRow> &rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const SweepRow &r : rows) out.push_back({{"config", r.config.to_json()}, {"estimate", r.estimate.to_json()}});
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader) {
        throw std::invalid_argument("malformed sweep CSV: unexpected header");
    }
    std::vector<SweepRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 17) {
            throw std::invalid_argument("malformed sweep CSV line " + std::to_string(line_no));
        }
        try {
            SweepRow r;
            r.config.protocol = protocol_from_name(f[0]);
            r.config.spec.L = std::stoi(f[1]);
            r.config.spec.M = std::stoi(f[2]);
            r.config.spec.N = std::stoi(f[3]);
            r.config.model.kind = error_model_from_name(f[4]);
            r.config.model.p = std::stod(f[5]);
            r.config.model.p_loss = std::stod(f[6]);
            r.config.model.eta = std::stod(f[7]);
            r.config.master_seed = std::stoull(f[8]);
            r.estimate = make_estimate(std::stoull(f[9]), std::stoull(f[10]), std::stoull(f[11]), std::stoull(f[12]),
                                       f[16] == "1");
            rows.push_back(r);
        } catch (const std::logic_error &e) {
            throw std::invalid_argument("malformed sweep CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

}  // namespace seqcluster
