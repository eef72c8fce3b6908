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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "CLI11.hpp"
#include "run_file.h"
#include "seqcluster/circuits.h"
#include "seqcluster/fitting.h"
#include "seqcluster/montecarlo.h"
#include "seqcluster/verification.h"

namespace seqcluster::cli {
namespace {

constexpr const char *kVersion = "0.1.0";

/// Bad flags or flag combinations (exit status 2).
class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << content;
}

bool blank(const std::string &text) { return text.find_first_not_of(" \t\r\n") == std::string::npos; }

std::string first_line(const std::string &text) { return text.substr(0, text.find('\n')); }

/// Sweep rows from a CSV file; an empty file has no rows.
std::vector<SweepRow> load_sweep_rows(const std::string &path) {
    std::string text = read_file(path);
    if (blank(text)) return {};
    return parse_sweep_csv(text);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::string model_label(const ErrorModel &m) {
    std::string out = error_model_name(m.kind);
    if (m.kind == ErrorModelKind::EM1 || m.kind == ErrorModelKind::EM2) out += " p=" + format_double(m.p);
    if (m.kind == ErrorModelKind::EM2) out += " p_loss=" + format_double(m.p_loss);
    if (m.kind == ErrorModelKind::EM3a || m.kind == ErrorModelKind::EM3b) out += " eta=" + format_double(m.eta);
    return out;
}

/// Progress lines with an ETA on stderr, throttled to one per few seconds.
class Progress {
   public:
    Progress(std::ostream &err, bool quiet, size_t total) : err_(err), quiet_(quiet), total_(total) {}

    void trials(uint64_t trials, uint64_t failures) {
        if (quiet_) return;
        auto now = Clock::now();
        if (now - last_ < std::chrono::seconds(5)) return;
        last_ = now;
        err_ << "    " << trials << " trials, " << failures << " failures\n" << std::flush;
    }

    void finished(const std::string &what, const Estimate &e) {
        done_++;
        if (quiet_) return;
        double elapsed = seconds();
        double eta = done_ ? elapsed / double(done_) * double(total_ - std::min(total_, done_)) : 0.0;
        err_ << "[" << done_ << "/" << total_ << "] " << what << ": p_bar = " << sci(e.rate) << " ["
             << sci(e.ci_low) << ", " << sci(e.ci_high) << "] from " << e.failures << "/" << e.trials
             << (e.censored ? " (censored)" : "") << "; elapsed " << std::fixed << std::setprecision(1) << elapsed
             << " s, ETA " << eta << " s\n"
             << std::defaultfloat << std::flush;
    }

    double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

   private:
    using Clock = std::chrono::steady_clock;
    std::ostream &err_;
    bool quiet_;
    size_t total_;
    size_t done_ = 0;
    Clock::time_point start_ = Clock::now();
    Clock::time_point last_ = Clock::now();
};

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    bool algorithms = false;
    std::string tables;
    bool locality = false;
    int L = 5;
    int max_n = 5;
    int random_pairs = 200;
    int graphs = 50;
    int max_vertices = 10;
    uint64_t seed = 1;
    std::string json_path;
};

int cmd_verify(const VerifyArgs &a, std::ostream &out) {
    if (!a.algorithms && a.tables.empty() && !a.locality) {
        throw UsageError("verify needs --algorithms, --tables or --locality");
    }
    std::vector<VerificationReport> reports;
    if (a.algorithms) {
        AlgorithmCheckOptions o;
        o.max_n = a.max_n;
        o.random_pairs = a.random_pairs;
        o.seed = a.seed;
        reports.push_back(verify_algorithm_states(o));
    }
    if (a.tables == "protA" || a.tables == "protB") {
        reports.push_back(
            verify_protocol_table(a.tables == "protA" ? Protocol::ProtocolA : Protocol::ProtocolB, a.L));
        reports.back().name += " (L = " + std::to_string(a.L) + ")";
    }
    if (a.tables == "graphs" || a.locality) {
        RandomGraphCheckOptions o;
        o.graphs = a.graphs;
        o.max_vertices = a.max_vertices;
        o.seed = a.seed;
        o.rules = a.tables == "graphs";
        o.locality = a.locality;
        reports.push_back(verify_random_graphs(o));
    }
    bool ok = true;
    nlohmann::json doc = nlohmann::json::array();
    for (const auto &r : reports) {
        out << r.str();
        ok = ok && r.passed();
        doc.push_back(r.to_json());
    }
    if (!a.json_path.empty()) write_file(a.json_path, doc.dump(1) + "\n");
    out << (ok ? "verification passed\n" : "verification FAILED\n");
    return ok ? kExitSuccess : kExitFailure;
}

// ---------------------------------------------------------------------------
// schedule

struct ScheduleArgs {
    std::string protocol;
    int L = 3;
    int M = 0;
    int N = 0;
    std::vector<int> offset;
    std::string graph_path;
    std::vector<int> ordering;
    std::string output;
    bool summary = false;
};

int cmd_schedule(const ScheduleArgs &a, std::ostream &out) {
    std::string name = a.protocol;
    if (name == "protA") name = "A";
    if (name == "protB") name = "B";
    Protocol protocol = protocol_from_name(name);
    Schedule s;
    if (protocol == Protocol::ProtocolA || protocol == Protocol::ProtocolB) {
        if (!a.graph_path.empty() || !a.ordering.empty()) {
            throw UsageError("--graph and --ordering apply to algorithm1/algorithm2 only");
        }
        LatticeSpec spec{a.L, a.M ? a.M : a.L, a.N ? a.N : a.L, kDefaultParityOffset};
        if (!a.offset.empty()) {
            if (a.offset.size() != 3) throw UsageError("--offset takes three values");
            spec.parity_offset = {a.offset[0], a.offset[1], a.offset[2]};
        }
        spec.validate();
        s = protocol == Protocol::ProtocolA ? schedule_protocolA(spec) : schedule_protocolB(spec);
    } else {
        if (a.graph_path.empty()) throw UsageError("algorithm schedules need --graph");
        Graph g = Graph::load_json(a.graph_path);
        std::vector<int> order = a.ordering.empty() ? g.vertices() : a.ordering;
        s = protocol == Protocol::Algorithm1 ? schedule_algorithm1(g, order) : schedule_algorithm2(g, order);
    }
    if (a.summary) {
        out << "protocol " << protocol_name(s.protocol) << ": " << s.num_data() << " data qubits, " << s.ops.size()
            << " ops, " << s.num_time_steps << " time steps, " << fault_locations(s).size() << " fault locations\n";
        return kExitSuccess;
    }
    std::string doc = s.to_json().dump(1) + "\n";
    if (a.output.empty()) {
        out << doc;
    } else {
        write_file(a.output, doc);
    }
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string run_path;
    int jobs = 0;
    std::string csv;
    std::string json;
    std::string checkpoint;
    bool quiet = false;
};

int cmd_sweep(const SweepArgs &a, std::ostream &out, std::ostream &err) {
    RunFile rf = RunFile::load(a.run_path);
    if (auto seed = seed_from_environment()) rf.seed = *seed;
    if (!a.csv.empty()) rf.csv_path = a.csv;
    if (!a.json.empty()) rf.json_path = a.json;
    if (!a.checkpoint.empty()) rf.checkpoint_path = a.checkpoint;
    if (a.jobs < 0) throw UsageError("--jobs must be >= 0");

    std::string started = utc_now();
    std::string csv;
    nlohmann::json json;
    nlohmann::json meta = {{"tool", "seqcluster"}, {"version", kVersion}, {"run_file", a.run_path},
                           {"seed", rf.seed},      {"jobs", a.jobs},       {"started", started}};
    double elapsed = 0.0;
    if (rf.kind == RunKind::Grid) {
        std::vector<RunConfig> grid = rf.grid();
        Progress progress(err, a.quiet, grid.size());
        SweepOptions options;
        options.estimate.jobs = a.jobs;
        options.estimate.progress = [&](uint64_t t, uint64_t f) { progress.trials(t, f); };
        options.checkpoint_path = rf.checkpoint_path;
        options.on_row = [&](size_t, const SweepRow &row) {
            progress.finished("L=" + std::to_string(row.config.spec.L) + " " + model_label(row.config.model),
                              row.estimate);
        };
        std::vector<SweepRow> rows = sweep(grid, options);
        csv = sweep_csv(rows);
        json = sweep_json(rows);
        meta["csv_schema"] = kSweepCsvSchema;
        meta["grid_hash"] = grid_hash(grid);
        elapsed = progress.seconds();
    } else {
        std::vector<ErrorModel> models = rf.models();
        Progress progress(err, a.quiet, models.size() * rf.L.size());
        EstimateCache cache(rf.checkpoint_path);
        EstimateOptions options;
        options.jobs = a.jobs;
        options.progress = [&](uint64_t t, uint64_t f) { progress.trials(t, f); };
        std::vector<OptimalRow> rows;
        for (const ErrorModel &m : models) {
            RunConfig base = rf.base_config(m);
            OptimalLResult result = find_optimal_L(rf.L, [&](int L) {
                RunConfig config = base;
                config.spec = LatticeSpec::cube(L, rf.parity_offset);
                Estimate e;
                if (auto cached = cache.find(config)) {
                    e = *cached;
                } else {
                    e = estimate_rate(config, options);
                    cache.store(config, e);
                }
                progress.finished("L=" + std::to_string(L) + " " + model_label(m), e);
                return e;
            });
            if (!a.quiet) err << model_label(m) << ": " << result.str();
            rows.push_back(OptimalRow{base, result});
        }
        csv = optimal_csv(rows);
        json = optimal_json(rows);
        meta["csv_schema"] = kOptimalCsvSchema;
        elapsed = progress.seconds();
    }
    meta["finished"] = utc_now();
    meta["elapsed_seconds"] = elapsed;

    if (rf.csv_path.empty()) {
        out << csv;
    } else {
        write_file(rf.csv_path, csv);
        write_file(rf.csv_path + ".meta.json", meta.dump(1) + "\n");
        if (!a.quiet) err << "wrote " << rf.csv_path << "\n";
    }
    if (!rf.json_path.empty()) write_file(rf.json_path, json.dump(1) + "\n");
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string threshold;
    std::string loss;
    std::string delay;
    std::optional<double> break_even_target;
    std::optional<double> c1;
    std::optional<double> c2;
    std::optional<double> tau_ratio;
    double window = 0.3;
    std::string json_path;
};

void require_single_series(const std::vector<SweepRow> &rows, bool allow_loss_series) {
    for (const auto &r : rows) {
        const auto &a = rows.front().config;
        const auto &b = r.config;
        if (a.protocol != b.protocol || a.model.kind != b.model.kind || b.model.eta != a.model.eta ||
            (!allow_loss_series && b.model.p_loss != a.model.p_loss)) {
            throw std::invalid_argument(
                "threshold fits need one protocol and error model per file (use --loss-extrapolate for p_loss "
                "series)");
        }
    }
}

ThresholdFit threshold_fit(const std::vector<SweepRow> &rows, double window) {
    ThresholdFitOptions options;
    options.window = window;
    return fit_threshold(threshold_points(rows), options);
}

int cmd_fit(const FitArgs &a, std::ostream &out, std::ostream &err) {
    int modes = !a.threshold.empty() + !a.loss.empty() + !a.delay.empty() + a.tau_ratio.has_value() +
                (a.break_even_target && a.delay.empty());
    if (modes != 1) {
        throw UsageError(
            "fit needs exactly one of --threshold, --loss-extrapolate, --delay, --break-even (with --c1/--c2) or "
            "--tau-ratio");
    }
    nlohmann::json report;
    if (!a.threshold.empty()) {
        auto rows = load_sweep_rows(a.threshold);
        require_single_series(rows, false);
        ThresholdFit fit = threshold_fit(rows, a.window);
        out << fit.str();
        report = fit.to_json();
    } else if (!a.loss.empty()) {
        std::string text = read_file(a.loss);
        std::vector<LossPoint> curve;
        nlohmann::json per_loss = nlohmann::json::array();
        if (first_line(text) == "p_loss,p_th") {
            std::istringstream in(text);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (blank(line)) continue;
                auto comma = line.find(',');
                if (comma == std::string::npos) throw std::invalid_argument("malformed p_loss,p_th line: " + line);
                curve.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
            }
        } else {
            auto rows = blank(text) ? std::vector<SweepRow>{} : parse_sweep_csv(text);
            require_single_series(rows, true);
            std::map<double, std::vector<SweepRow>> groups;
            for (const auto &r : rows) groups[r.config.model.p_loss].push_back(r);
            for (const auto &[loss, group] : groups) {
                ThresholdFit fit = threshold_fit(group, a.window);
                out << "p_loss = " << format_double(loss) << ": " << fit.str();
                curve.push_back({loss, fit.p_th});
                per_loss.push_back({{"p_loss", loss}, {"threshold", fit.to_json()}});
            }
        }
        for (size_t i = 1; i < curve.size(); i++) {
            if (curve[i].p_th >= curve[i - 1].p_th) {
                err << "warning: p_th does not decrease monotonically with p_loss\n";
                break;
            }
        }
        LossExtrapolation ex = extrapolate_loss_threshold(curve);
        out << ex.str();
        report = {{"fit", "loss_threshold"}, {"thresholds", per_loss}, {"extrapolation", ex.to_json()}};
    } else if (!a.delay.empty()) {
        std::string text = read_file(a.delay);
        std::vector<DelayPoint> points;
        auto add = [&](double eta, double rate, double lo, double hi, bool censored) {
            if (censored || !(rate > 0.0)) {
                err << "warning: skipping eta = " << format_double(eta) << " (censored or zero rate)\n";
                return;
            }
            points.push_back({eta, rate, sigma_from_interval(lo, hi)});
        };
        if (first_line(text) == kOptimalCsvHeader) {
            for (const auto &r : parse_optimal_csv(text)) add(r.eta, r.p_star, r.ci_low, r.ci_high, r.censored);
        } else {
            auto rows = blank(text) ? std::vector<SweepRow>{} : parse_sweep_csv(text);
            // Lowest rate over L at each eta.
            std::map<double, const SweepRow *> best;
            for (const auto &r : rows) {
                if (r.estimate.censored || !(r.estimate.rate > 0.0)) continue;
                auto &slot = best[r.config.model.eta];
                if (!slot || r.estimate.rate < slot->estimate.rate) slot = &r;
            }
            for (const auto &[eta, r] : best) add(eta, r->estimate.rate, r->estimate.ci_low, r->estimate.ci_high, false);
        }
        DelayFit fit = fit_delay(points);
        out << fit.str();
        report = fit.to_json();
        if (a.break_even_target) {
            double eta = break_even(fit, *a.break_even_target);
            out << "break-even eta = " << sci(eta) << " at p_target = " << sci(*a.break_even_target) << "\n";
            report["break_even"] = {{"p_target", *a.break_even_target}, {"eta", eta}};
        }
    } else if (a.tau_ratio) {
        double eta = eta_from_tau_ratio(*a.tau_ratio);
        out << "eta_Z = " << sci(eta) << " for tau/T2 = " << sci(*a.tau_ratio) << "\n";
        report = {{"fit", "tau_ratio"}, {"tau_ratio", *a.tau_ratio}, {"eta", eta}};
    } else {
        if (!a.c1 || !a.c2) throw UsageError("--break-even without --delay needs --c1 and --c2");
        DelayFit fit;
        fit.c1 = *a.c1;
        fit.c2 = *a.c2;
        double eta = break_even(fit, *a.break_even_target);
        out << "break-even eta = " << sci(eta) << " for c1 = " << sci(fit.c1) << ", c2 = " << sci(fit.c2)
            << " at p_target = " << sci(*a.break_even_target) << "\n";
        report = {{"fit", "break_even"}, {"c1", fit.c1}, {"c2", fit.c2}, {"p_target", *a.break_even_target},
                  {"eta", eta}};
    }
    if (!a.json_path.empty()) write_file(a.json_path, report.dump(1) + "\n");
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string dat;
};

int cmd_report(const ReportArgs &a, std::ostream &out) {
    std::ostringstream dat;
    char line[256];
    for (const auto &path : a.inputs) {
        std::string text = read_file(path);
        out << "# " << path << "\n";
        if (first_line(text) == kOptimalCsvHeader) {
            std::snprintf(line, sizeof line, "%-8s %-5s %-12s %-6s %-12s %-25s %s\n", "protocol", "model", "eta",
                          "L_*", "p_*", "95% interval", "flags");
            out << line;
            dat << "# " << path << "\n# eta L_star p_star ci_low ci_high\n";
            for (const auto &r : parse_optimal_csv(text)) {
                std::string flags = std::string(r.bracketed ? "" : "unbracketed ") + (r.censored ? "censored" : "");
                std::snprintf(line, sizeof line, "%-8s %-5s %-12s %-6d %-12s [%-10s, %-10s] %s\n",
                              r.protocol.c_str(), r.model.c_str(), sci(r.eta).c_str(), r.L_star, sci(r.p_star).c_str(),
                              sci(r.ci_low).c_str(), sci(r.ci_high).c_str(), flags.c_str());
                out << line;
                dat << format_double(r.eta) << " " << r.L_star << " " << format_double(r.p_star) << " "
                    << format_double(r.ci_low) << " " << format_double(r.ci_high) << "\n";
            }
            dat << "\n\n";
            continue;
        }
        auto rows = blank(text) ? std::vector<SweepRow>{} : parse_sweep_csv(text);
        std::snprintf(line, sizeof line, "%-8s %-5s %-4s %-10s %-10s %-10s %-10s %-10s %-25s %s\n", "protocol", "model",
                      "L", "p", "p_loss", "eta", "trials", "failures", "p_bar (95% interval)", "flags");
        out << line;
        // One gnuplot block per (protocol, model, p_loss, L), x = p or eta.
        std::map<std::tuple<std::string, std::string, double, int>, std::vector<const SweepRow *>> blocks;
        for (const auto &r : rows) {
            const auto &c = r.config;
            std::snprintf(line, sizeof line, "%-8s %-5s %-4d %-10s %-10s %-10s %-10llu %-10llu %-10s [%s, %s] %s\n",
                          protocol_name(c.protocol), error_model_name(c.model.kind), c.spec.L, sci(c.model.p).c_str(),
                          sci(c.model.p_loss).c_str(), sci(c.model.eta).c_str(),
                          static_cast<unsigned long long>(r.estimate.trials),
                          static_cast<unsigned long long>(r.estimate.failures), sci(r.estimate.rate).c_str(),
                          sci(r.estimate.ci_low).c_str(), sci(r.estimate.ci_high).c_str(),
                          r.estimate.censored ? "censored" : "");
            out << line;
            blocks[{protocol_name(c.protocol), error_model_name(c.model.kind), c.model.p_loss, c.spec.L}].push_back(&r);
        }
        for (const auto &[key, members] : blocks) {
            const auto &[protocol, model, loss, L] = key;
            bool delay = model == "EM3a" || model == "EM3b";
            dat << "# " << path << " protocol=" << protocol << " model=" << model << " p_loss=" << format_double(loss)
                << " L=" << L << "\n# " << (delay ? "eta" : "p") << " p_bar ci_low ci_high trials censored\n";
            for (const SweepRow *r : members) {
                dat << format_double(delay ? r->config.model.eta : r->config.model.p) << " "
                    << format_double(r->estimate.rate) << " " << format_double(r->estimate.ci_low) << " "
                    << format_double(r->estimate.ci_high) << " " << r->estimate.trials << " "
                    << (r->estimate.censored ? 1 : 0) << "\n";
            }
            dat << "\n\n";
        }
    }
    if (!a.dat.empty()) write_file(a.dat, dat.str());
    return kExitSuccess;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"seqcluster: sequential cluster-state preparation workbench", "seqcluster"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    VerifyArgs va;
    auto *verify = app.add_subcommand("verify", "Check schedules and propagation rules against the stabilizer oracle");
    verify->add_flag("--algorithms", va.algorithms, "Algorithms 1 and 2 prepare the exact cluster state");
    verify->add_option("--tables", va.tables, "Rule table to verify: protA, protB or graphs (Algorithms 1/2)")
        ->check(CLI::IsMember({"protA", "protB", "graphs"}));
    verify->add_flag("--locality", va.locality, "Effective errors of single faults are local (random graphs)");
    verify->add_option("--L", va.L, "Lattice side for protA/protB tables (odd)");
    verify->add_option("--max-n", va.max_n, "Exhaustive graph size for --algorithms");
    verify->add_option("--random-pairs", va.random_pairs, "Random (graph, ordering) pairs for --algorithms");
    verify->add_option("--graphs", va.graphs, "Random graphs for --tables graphs and --locality");
    verify->add_option("--max-vertices", va.max_vertices, "Largest random graph");
    verify->add_option("--seed", va.seed, "Seed for the random instances");
    verify->add_option("--json", va.json_path, "Write the JSON report here");

    ScheduleArgs sa;
    auto *schedule = app.add_subcommand("schedule", "Dump a preparation schedule as a JSON op list");
    schedule->add_option("--protocol", sa.protocol, "A, B, algorithm1 or algorithm2")->required();
    schedule->add_option("--L", sa.L, "Lattice side");
    schedule->add_option("--M", sa.M, "Second lattice side (default L)");
    schedule->add_option("--N", sa.N, "Third lattice side (default L)");
    schedule->add_option("--offset", sa.offset, "Parity offset, e.g. 0,1,1")->delimiter(',');
    schedule->add_option("--graph", sa.graph_path, "Graph JSON {\"n\", \"edges\"} for algorithm schedules");
    schedule->add_option("--ordering", sa.ordering, "Preparation order, e.g. 3,1,2")->delimiter(',');
    schedule->add_option("-o,--output", sa.output, "Output file (default stdout)");
    schedule->add_flag("--summary", sa.summary, "Print sizes instead of the op list");

    SweepArgs wa;
    auto *sweep_cmd = app.add_subcommand("sweep", "Run a Monte Carlo sweep described by a run file");
    sweep_cmd->add_option("run_file", wa.run_path, "Run file (JSON)")->required();
    sweep_cmd->add_option("--jobs", wa.jobs, "Worker threads (0 = all cores)");
    sweep_cmd->add_option("--csv", wa.csv, "Override output.csv");
    sweep_cmd->add_option("--json", wa.json, "Override output.json");
    sweep_cmd->add_option("--checkpoint", wa.checkpoint, "Override output.checkpoint");
    sweep_cmd->add_flag("-q,--quiet", wa.quiet, "No progress output");

    FitArgs fa;
    double be = 0, c1 = 0, c2 = 0, tau = 0;
    auto *fit = app.add_subcommand("fit", "Fit thresholds, loss thresholds, delay scaling and break-even points");
    fit->add_option("--threshold", fa.threshold, "Sweep CSV for a finite-size scaling threshold fit");
    fit->add_option("--loss-extrapolate", fa.loss, "EM2 sweep CSV (or p_loss,p_th CSV) for the loss threshold");
    fit->add_option("--delay", fa.delay, "Optimal-L CSV (or EM3 sweep CSV) for ln(1/p_*) = c1 eta^-1/2 + c2");
    auto *be_opt = fit->add_option("--break-even", be, "Target logical rate for the break-even point");
    auto *c1_opt = fit->add_option("--c1", c1, "Delay-fit slope c1");
    auto *c2_opt = fit->add_option("--c2", c2, "Delay-fit intercept c2");
    auto *tau_opt = fit->add_option("--tau-ratio", tau, "Convert tau/T2 to eta_Z");
    fit->add_option("--window", fa.window, "Threshold fit window as a fraction of p_th");
    fit->add_option("--json", fa.json_path, "Write the JSON report here");

    ReportArgs ra;
    auto *report = app.add_subcommand("report", "Tabulate sweep or optimal-L CSVs; optionally write gnuplot data");
    report->add_option("inputs", ra.inputs, "CSV files")->required();
    report->add_option("--dat", ra.dat, "gnuplot-compatible data file");

    std::vector<std::string> argv_storage{"seqcluster"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for (const auto &s : argv_storage) argv.push_back(s.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitSuccess : kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(va, out);
        if (schedule->parsed()) return cmd_schedule(sa, out);
        if (sweep_cmd->parsed()) return cmd_sweep(wa, out, err);
        if (fit->parsed()) {
            if (be_opt->count()) fa.break_even_target = be;
            if (c1_opt->count()) fa.c1 = c1;
            if (c2_opt->count()) fa.c2 = c2;
            if (tau_opt->count()) fa.tau_ratio = tau;
            return cmd_fit(fa, out, err);
        }
        if (report->parsed()) return cmd_report(ra, out);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FitError &e) {
        err << "fit failed: " << e.what() << "\n";
        return kExitFailure;
    } catch (const CheckpointError &e) {
        err << "checkpoint error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace seqcluster::cli
