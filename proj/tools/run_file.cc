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

#include "run_file.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace seqcluster::cli {
namespace {

constexpr const char *kCacheSchema = "seqcluster-estimate-cache-v1";

void reject_unknown(const nlohmann::json &doc, const std::set<std::string> &allowed, const std::string &where) {
    if (!doc.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    for (const auto &[key, value] : doc.items()) {
        if (!allowed.count(key)) throw std::invalid_argument("unknown key \"" + key + "\" in " + where);
    }
}

std::vector<double> rate_list(const nlohmann::json &doc, const std::string &key) {
    if (!doc.is_array() || doc.empty()) throw std::invalid_argument("\"" + key + "\" must be a non-empty array");
    std::vector<double> out;
    for (const auto &v : doc) {
        if (!v.is_number()) throw std::invalid_argument("\"" + key + "\" entries must be numbers");
        double x = v.get<double>();
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument("\"" + key + "\" entries must be plain decimals in [0, 1]");
        }
        out.push_back(x);
    }
    return out;
}

std::string resolve(const std::string &base_dir, const nlohmann::json &value, const std::string &key) {
    if (!value.is_string()) throw std::invalid_argument("output." + key + " must be a string");
    std::filesystem::path path = value.get<std::string>();
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    return path.string();
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

RunFile RunFile::from_json(const nlohmann::json &doc, const std::string &base_dir) {
    reject_unknown(doc,
                   {"kind", "protocol", "model", "L", "parity_offset", "p", "p_loss", "eta", "stop", "seed", "output"},
                   "run file");
    RunFile rf;
    if (doc.contains("kind")) {
        std::string kind = doc.at("kind").get<std::string>();
        if (kind == "grid") {
            rf.kind = RunKind::Grid;
        } else if (kind == "optimal_L") {
            rf.kind = RunKind::OptimalL;
        } else {
            throw std::invalid_argument("\"kind\" must be \"grid\" or \"optimal_L\", got \"" + kind + "\"");
        }
    }
    for (const char *required : {"protocol", "model", "L", "seed"}) {
        if (!doc.contains(required)) throw std::invalid_argument(std::string("run file needs \"") + required + "\"");
    }
    rf.protocol = protocol_from_name(doc.at("protocol").get<std::string>());
    if (rf.protocol != Protocol::ProtocolA && rf.protocol != Protocol::ProtocolB) {
        throw std::invalid_argument("Monte Carlo runs use protocol \"A\" or \"B\"");
    }
    rf.model = error_model_from_name(doc.at("model").get<std::string>());

    const auto &Ls = doc.at("L");
    if (!Ls.is_array() || Ls.empty()) throw std::invalid_argument("\"L\" must be a non-empty array");
    for (const auto &v : Ls) {
        if (!v.is_number_integer()) throw std::invalid_argument("\"L\" entries must be integers");
        int L = v.get<int>();
        LatticeSpec::cube(L).validate_memory();
        rf.L.push_back(L);
    }
    if (rf.kind == RunKind::OptimalL) {
        for (size_t i = 1; i < rf.L.size(); i++) {
            if (rf.L[i] <= rf.L[i - 1]) throw std::invalid_argument("optimal_L runs need ascending \"L\"");
        }
    }
    if (doc.contains("parity_offset")) {
        rf.parity_offset = doc.at("parity_offset").get<std::array<int, 3>>();
        LatticeSpec::cube(1, rf.parity_offset).validate();
    }

    bool uses_p = rf.model == ErrorModelKind::EM1 || rf.model == ErrorModelKind::EM2;
    bool uses_loss = rf.model == ErrorModelKind::EM2;
    bool uses_eta = !uses_p;
    auto take = [&](const char *key, bool used, std::vector<double> &dst) {
        if (used) {
            if (!doc.contains(key)) {
                throw std::invalid_argument(std::string("model ") + error_model_name(rf.model) + " needs \"" + key +
                                            "\"");
            }
            dst = rate_list(doc.at(key), key);
        } else if (doc.contains(key)) {
            throw std::invalid_argument(std::string("\"") + key + "\" does not apply to model " +
                                        error_model_name(rf.model));
        }
    };
    take("p", uses_p, rf.p);
    take("p_loss", uses_loss, rf.p_loss);
    take("eta", uses_eta, rf.eta);

    if (doc.contains("stop")) rf.stop = StopRule::from_json(doc.at("stop"));
    rf.stop.validate();
    const auto &seed = doc.at("seed");
    if (!seed.is_number_unsigned()) throw std::invalid_argument("\"seed\" must be an unsigned integer");
    rf.seed = seed.get<uint64_t>();

    if (doc.contains("output")) {
        const auto &out = doc.at("output");
        reject_unknown(out, {"csv", "json", "checkpoint"}, "output");
        if (out.contains("csv")) rf.csv_path = resolve(base_dir, out.at("csv"), "csv");
        if (out.contains("json")) rf.json_path = resolve(base_dir, out.at("json"), "json");
        if (out.contains("checkpoint")) rf.checkpoint_path = resolve(base_dir, out.at("checkpoint"), "checkpoint");
    }
    for (const ErrorModel &m : rf.models()) m.validate();
    return rf;
}

RunFile RunFile::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open run file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument("run file " + path + " is not valid JSON: " + e.what());
    }
    try {
        return from_json(doc, std::filesystem::path(path).parent_path().string());
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument("run file " + path + ": " + e.what());
    }
}

std::vector<ErrorModel> RunFile::models() const {
    std::vector<ErrorModel> out;
    switch (model) {
        case ErrorModelKind::EM1:
            for (double x : p) out.push_back(ErrorModel::em1(x));
            break;
        case ErrorModelKind::EM2:
            for (double loss : p_loss) {
                for (double x : p) out.push_back(ErrorModel::em2(x, loss));
            }
            break;
        case ErrorModelKind::EM3a:
            for (double x : eta) out.push_back(ErrorModel::em3a(x));
            break;
        case ErrorModelKind::EM3b:
            for (double x : eta) out.push_back(ErrorModel::em3b(x));
            break;
    }
    return out;
}

RunConfig RunFile::base_config(const ErrorModel &m) const {
    RunConfig c;
    c.protocol = protocol;
    c.spec = LatticeSpec::cube(L.front(), parity_offset);
    c.model = m;
    c.master_seed = seed;
    c.stop = stop;
    return c;
}

std::vector<RunConfig> RunFile::grid() const {
    std::vector<RunConfig> out;
    for (int size : L) {
        for (const ErrorModel &m : models()) {
            RunConfig c = base_config(m);
            c.spec = LatticeSpec::cube(size, parity_offset);
            out.push_back(c);
        }
    }
    return out;
}

std::optional<uint64_t> seed_from_environment() {
    const char *value = std::getenv("SEQCLUSTER_SEED");
    if (value == nullptr || *value == '\0') return std::nullopt;
    std::string text = value;
    if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 20) {
        throw std::invalid_argument("SEQCLUSTER_SEED must be an unsigned integer, got \"" + text + "\"");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception &) {
        throw std::invalid_argument("SEQCLUSTER_SEED is out of range: " + text);
    }
}

std::string optimal_csv(const std::vector<OptimalRow> &rows) {
    std::ostringstream out;
    out << kOptimalCsvHeader << "\n";
    for (const auto &row : rows) {
        const RunConfig &c = row.config;
        const OptimalLResult &r = row.result;
        const Estimate *best = nullptr;
        for (const auto &e : r.trace) {
            if (e.L == r.L_star) best = &e.estimate;
        }
        out << protocol_name(c.protocol) << "," << error_model_name(c.model.kind) << "," << format_double(c.model.p)
            << "," << format_double(c.model.p_loss) << "," << format_double(c.model.eta) << "," << c.master_seed
            << "," << r.L_star << "," << format_double(r.p_star) << "," << format_double(best ? best->ci_low : 0.0)
            << "," << format_double(best ? best->ci_high : 1.0) << "," << (best ? best->trials : 0) << ","
            << (best ? best->failures : 0) << "," << (r.bracketed ? 1 : 0) << "," << (r.censored ? 1 : 0) << "\n";
    }
    return out.str();
}

nlohmann::json optimal_json(const std::vector<OptimalRow> &rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &row : rows) out.push_back({{"config", row.config.to_json()}, {"result", row.result.to_json()}});
    return out;
}

std::vector<OptimalCsvRow> parse_optimal_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kOptimalCsvHeader) {
        throw std::invalid_argument("malformed optimal-L CSV: unexpected header");
    }
    std::vector<OptimalCsvRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 14) throw std::invalid_argument("malformed optimal-L CSV line " + std::to_string(line_no));
        try {
            OptimalCsvRow r;
            r.protocol = f[0];
            r.model = f[1];
            r.p = std::stod(f[2]);
            r.p_loss = std::stod(f[3]);
            r.eta = std::stod(f[4]);
            r.L_star = std::stoi(f[6]);
            r.p_star = std::stod(f[7]);
            r.ci_low = std::stod(f[8]);
            r.ci_high = std::stod(f[9]);
            r.bracketed = f[12] == "1";
            r.censored = f[13] == "1";
            rows.push_back(r);
        } catch (const std::logic_error &) {
            throw std::invalid_argument("malformed optimal-L CSV line " + std::to_string(line_no));
        }
    }
    return rows;
}

EstimateCache::EstimateCache(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    if (!in) return;
    nlohmann::json doc;
    try {
        in >> doc;
        if (doc.at("schema") != kCacheSchema) throw CheckpointError("estimate cache " + path_ + " has another schema");
        for (const auto &[key, value] : doc.at("entries").items()) entries_[key] = Estimate::from_json(value);
    } catch (const nlohmann::json::exception &e) {
        throw CheckpointError("estimate cache " + path_ + " is unreadable: " + e.what());
    }
}

std::optional<Estimate> EstimateCache::find(const RunConfig &config) const {
    auto it = entries_.find(config.hash());
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EstimateCache::store(const RunConfig &config, const Estimate &estimate) {
    entries_[config.hash()] = estimate;
    if (path_.empty()) return;
    nlohmann::json doc;
    doc["schema"] = kCacheSchema;
    doc["entries"] = nlohmann::json::object();
    for (const auto &[key, value] : entries_) doc["entries"][key] = value.to_json();
    std::string tmp = path_ + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write estimate cache " + tmp);
        out << doc.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, path_);
}

}  // namespace seqcluster::cli
