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

#include "seqcluster/errors.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace seqcluster {

// ---------------------------------------------------------------------------
// Error models

const char *error_model_name(ErrorModelKind kind) {
    switch (kind) {
        case ErrorModelKind::EM1:
            return "EM1";
        case ErrorModelKind::EM2:
            return "EM2";
        case ErrorModelKind::EM3a:
            return "EM3a";
        case ErrorModelKind::EM3b:
            return "EM3b";
    }
    return "?";
}

ErrorModelKind error_model_from_name(const std::string &name) {
    for (ErrorModelKind k : {ErrorModelKind::EM1, ErrorModelKind::EM2, ErrorModelKind::EM3a, ErrorModelKind::EM3b}) {
        if (name == error_model_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown error model: " + name + " (expected EM1, EM2, EM3a or EM3b)");
}

ErrorModel ErrorModel::em1(double p) { return ErrorModel{ErrorModelKind::EM1, p, 0.0, 0.0}; }
ErrorModel ErrorModel::em2(double p, double p_loss) { return ErrorModel{ErrorModelKind::EM2, p, p_loss, 0.0}; }
ErrorModel ErrorModel::em3a(double eta_z) { return ErrorModel{ErrorModelKind::EM3a, kDelayCircuitRate, 0.0, eta_z}; }
ErrorModel ErrorModel::em3b(double eta_loss) {
    return ErrorModel{ErrorModelKind::EM3b, kDelayCircuitRate, 0.0, eta_loss};
}

void ErrorModel::validate() const {
    auto check = [](double v, double hi, const char *what) {
        if (!(v >= 0.0 && v <= hi)) {
            throw std::invalid_argument(std::string(what) + " must lie in [0, " + std::to_string(hi) + "]");
        }
    };
    check(p, 1.0, "p");
    check(p_loss, 1.0, "p_loss");
    switch (kind) {
        case ErrorModelKind::EM1:
            if (p_loss != 0.0 || eta != 0.0) throw std::invalid_argument("EM1 takes only p");
            break;
        case ErrorModelKind::EM2:
            if (eta != 0.0) throw std::invalid_argument("EM2 takes only p and p_loss");
            break;
        case ErrorModelKind::EM3a:
            check(eta, 0.5, "eta");
            [[fallthrough]];
        case ErrorModelKind::EM3b:
            check(eta, 1.0, "eta");
            if (p != kDelayCircuitRate) throw std::invalid_argument("EM3 models fix the circuit error rate p = 1e-3");
            if (p_loss != 0.0) throw std::invalid_argument("EM3 models take only eta");
            break;
    }
}

nlohmann::json ErrorModel::to_json() const {
    return {{"kind", error_model_name(kind)}, {"p", p}, {"p_loss", p_loss}, {"eta", eta}};
}

ErrorModel ErrorModel::from_json(const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("error model must be a JSON object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (key != "kind" && key != "p" && key != "p_loss" && key != "eta") {
            throw std::invalid_argument("unknown error model key: " + key);
        }
        if (key != "kind" && !value.is_number()) {
            throw std::invalid_argument("error model key " + key + " must be a number");
        }
    }
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        throw std::invalid_argument("error model needs a string \"kind\"");
    }
    ErrorModel m;
    m.kind = error_model_from_name(doc["kind"].get<std::string>());
    bool delay = m.kind == ErrorModelKind::EM3a || m.kind == ErrorModelKind::EM3b;
    m.p = doc.value("p", delay ? kDelayCircuitRate : 0.0);
    m.p_loss = doc.value("p_loss", 0.0);
    m.eta = doc.value("eta", 0.0);
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Flip sets

namespace {

void toggle(std::vector<int> &set, int v) {
    auto it = std::lower_bound(set.begin(), set.end(), v);
    if (it != set.end() && *it == v) {
        set.erase(it);
    } else {
        set.insert(it, v);
    }
}

std::vector<int> symmetric_difference(const std::vector<int> &a, const std::vector<int> &b) {
    std::vector<int> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

FlipSet compose(const FlipSet &a, const FlipSet &b) {
    return FlipSet{symmetric_difference(a.z_flips, b.z_flips), symmetric_difference(a.x_residues, b.x_residues)};
}

std::string FlipSet::str() const {
    std::ostringstream out;
    out << "Z{";
    for (size_t k = 0; k < z_flips.size(); k++) out << (k ? "," : "") << z_flips[k];
    out << "} X{";
    for (size_t k = 0; k < x_residues.size(); k++) out << (k ? "," : "") << x_residues[k];
    out << "}";
    return out.str();
}

// ---------------------------------------------------------------------------
// Effective-error rules

namespace {

/// Per-qubit op indices of a schedule, for the effective-error rules.
class FlipEngine {
   public:
    explicit FlipEngine(const Schedule &s) : s_(s), touches_(size_t(s.graph.max_label()) + 1), cz_(touches_.size()) {
        for (size_t k = 0; k < s.ops.size(); k++) {
            const Op &op = s.ops[k];
            if (op.touches(kAncilla)) touches_[kAncilla].push_back(k);
            if (op.qubit != kAncilla && op.touches(op.qubit)) touches_[op.qubit].push_back(k);
            if (op.kind == OpKind::CZ_Q && in_block(k)) cz_[op.qubit].push_back(k);
        }
        if (s.protocol == Protocol::ProtocolA) {
            output_.assign(s.cubic_to_bcc.begin(), s.cubic_to_bcc.end());
        } else {
            output_.resize(touches_.size());
            for (size_t q = 0; q < output_.size(); q++) output_[q] = int(q);
        }
    }

    /// Effective error in schedule-graph labels.
    FlipSet graph_flips(const FaultLocation &loc, char pauli) const {
        check(loc);
        switch (pauli) {
            case 'I':
                return {};
            case 'X':
            case 'Z':
                break;
            case 'Y':
                return compose(graph_flips(loc, 'X'), graph_flips(loc, 'Z'));
            default:
                throw std::invalid_argument(std::string("not a Pauli character: ") + pauli);
        }
        return loc.qubit == kAncilla ? ancilla_flips(loc.position, pauli) : data_flips(loc.position, loc.qubit, pauli);
    }

    /// Effective error on the final-state labels (measure-out stage applied).
    FlipSet output_flips(const FaultLocation &loc, char pauli) const {
        FlipSet g = graph_flips(loc, pauli);
        if (s_.protocol != Protocol::ProtocolA) {
            return g;
        }
        FlipSet out;
        for (int j : g.z_flips) {
            if (output_[j] != 0) toggle(out.z_flips, output_[j]);
        }
        for (int v : g.x_residues) {
            if (output_[v] != 0) {
                toggle(out.x_residues, output_[v]);
            } else {
                // X before the Z measure-out flips its outcome, so the frame applies
                // Z to every neighbour that should not have received it.
                for (int w : s_.graph.neighbors(v)) {
                    if (output_[w] != 0) toggle(out.z_flips, output_[w]);
                }
            }
        }
        return out;
    }

    const std::vector<int> &output_labels() const { return output_; }

   private:
    bool in_block(size_t k) const {
        int b = s_.ops[k].block;
        if (b <= 0 || size_t(b) >= s_.blocks.size()) return false;
        return k >= s_.blocks[b].begin && k < s_.blocks[b].end;
    }

    void check(const FaultLocation &loc) const {
        if (loc.position > s_.ops.size()) {
            throw std::invalid_argument("fault position beyond the end of the schedule");
        }
        if (loc.qubit != kAncilla && !s_.graph.has_vertex(loc.qubit)) {
            throw std::invalid_argument("fault on qubit " + std::to_string(loc.qubit) + " outside the schedule");
        }
    }

    long last_touch(int q, size_t position) const {
        const auto &t = touches_[q];
        auto it = std::lower_bound(t.begin(), t.end(), position);
        return it == t.begin() ? -1 : long(*(it - 1));
    }

    long next_touch(int q, size_t position) const {
        const auto &t = touches_[q];
        auto it = std::lower_bound(t.begin(), t.end(), position);
        return it == t.end() ? -1 : long(*it);
    }

    bool algorithm2() const { return s_.protocol == Protocol::Algorithm2; }

    /// Z on the ancilla right after block b: passes to the next block if the
    /// ancilla is not measured in between (Algorithm 1) / always (Algorithm 2).
    FlipSet ancilla_z_after_block(int b) const {
        int next = s_.next_in_order(b);
        if (next == 0) return {};
        if (!algorithm2() && !s_.graph.has_edge(b, next)) return {};
        return FlipSet{{next}, {}};
    }

    FlipSet ancilla_flips(size_t position, char pauli) const {
        long k = last_touch(kAncilla, position);
        if (k < 0) return {};
        const Op &op = s_.ops[k];
        switch (op.kind) {
            case OpKind::InitQPlus:
            case OpKind::ResetQPlus: {
                if (pauli == 'X') return {};
                long n = next_touch(kAncilla, position);
                if (n < 0 || !s_.ops[n].is_gate() || !in_block(size_t(n))) return {};
                return FlipSet{{s_.ops[n].block}, {}};
            }
            case OpKind::MeasureQ_Z:
                return {};
            case OpKind::CZ_Q: {
                if (!in_block(size_t(k))) return {};
                int b = op.block;
                if (pauli == 'Z') return FlipSet{{b}, {}};
                FlipSet f;
                for (size_t c = s_.blocks[b].begin; c <= size_t(k); c++) {
                    if (s_.ops[c].kind == OpKind::CZ_Q) toggle(f.z_flips, s_.ops[c].qubit);
                }
                int prev = s_.prev_in_order(b);
                if (prev != 0 && (algorithm2() || s_.graph.has_edge(prev, b))) toggle(f.z_flips, prev);
                return f;
            }
            case OpKind::CX_Q:
                if (pauli == 'Z') return FlipSet{{op.qubit}, {}};
                return ancilla_z_after_block(op.qubit);
            case OpKind::H_Q:
                if (pauli == 'X') return FlipSet{{op.block}, {}};
                return ancilla_z_after_block(op.block);
            default:
                throw std::logic_error("unexpected op on the ancilla");
        }
    }

    FlipSet data_flips(size_t position, int i, char pauli) const {
        long k = last_touch(i, position);
        if (k < 0) return {};
        const Op &op = s_.ops[k];
        if (op.kind == OpKind::MeasureData) return {};
        if (pauli == 'Z') {
            return op.kind == OpKind::InitDataZero ? FlipSet{} : FlipSet{{i}, {}};
        }
        FlipSet f{{}, {i}};
        const auto &cz = cz_[i];
        for (auto it = std::lower_bound(cz.begin(), cz.end(), position); it != cz.end(); ++it) {
            toggle(f.z_flips, s_.ops[*it].block);
        }
        return f;
    }

    const Schedule &s_;
    std::vector<std::vector<size_t>> touches_;
    std::vector<std::vector<size_t>> cz_;
    std::vector<int> output_;
};

}  // namespace

FlipSet flips_from_fault_general(const Schedule &s, const FaultLocation &location, char pauli) {
    return FlipEngine(s).graph_flips(location, pauli);
}

FlipSet flips_from_fault_protA(const Schedule &s, const FaultLocation &location, char pauli) {
    if (s.protocol != Protocol::ProtocolA) {
        throw std::invalid_argument("schedule is not a Protocol A schedule");
    }
    return FlipEngine(s).output_flips(location, pauli);
}

FlipSet flips_from_fault_protB(const Schedule &s, const FaultLocation &location, char pauli) {
    if (s.protocol != Protocol::ProtocolB) {
        throw std::invalid_argument("schedule is not a Protocol B schedule");
    }
    return FlipEngine(s).output_flips(location, pauli);
}

FlipSet flips_from_fault(const Schedule &s, const Fault &fault) {
    FlipEngine engine(s);
    FlipSet f = engine.output_flips(fault.location, fault.pauli);
    if (fault.partner_qubit >= 0) {
        f = compose(f, engine.output_flips({fault.location.position, fault.partner_qubit}, fault.partner_pauli));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Error samples

void ErrorSample::resize(size_t n) {
    flipped.assign(n, 0);
    lost.assign(n, 0);
    touched.clear();
}

void ErrorSample::clear() {
    for (int v : touched) {
        flipped[v] = 0;
        lost[v] = 0;
    }
    touched.clear();
}

void ErrorSample::flip(int label) {
    flipped[label] ^= 1;
    touched.push_back(label);
}

void ErrorSample::lose(int label) {
    lost[label] = 1;
    touched.push_back(label);
}

std::vector<int> ErrorSample::flipped_labels() const {
    std::vector<int> out;
    for (size_t v = 0; v < flipped.size(); v++) {
        if (flipped[v]) out.push_back(int(v));
    }
    return out;
}

std::vector<int> ErrorSample::lost_labels() const {
    std::vector<int> out;
    for (size_t v = 0; v < lost.size(); v++) {
        if (lost[v]) out.push_back(int(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Noise sampler

double NoiseSampler::delay_flip_probability(double eta, int ell) {
    return 0.5 * (1.0 - std::pow(1.0 - 2.0 * eta, ell));
}

double NoiseSampler::delay_loss_probability(double eta, int ell) { return -std::expm1(-eta * ell); }

NoiseSampler::NoiseSampler(const Schedule &s, const ErrorModel &model) : schedule_(&s), model_(model) {
    model.validate();
    FlipEngine engine(s);
    output_of_ = engine.output_labels();
    for (int v : output_labels(s)) max_output_label_ = std::max(max_output_label_, v);

    locations_ = fault_locations(s);
    qubit_slots_.resize(size_t(s.graph.max_label()) + 1);
    for (size_t k = 0; k < locations_.size(); k++) qubit_slots_[locations_[k].qubit].push_back(uint32_t(k));
    slots_.resize(locations_.size());
    for (size_t k = 0; k < locations_.size(); k++) {
        const FaultLocation &loc = locations_[k];
        Slot &slot = slots_[k];
        slot.qubit = loc.qubit;
        slot.time_step = loc.position > 0 ? s.ops[loc.position - 1].time_step : 0;
        slot.x_begin = uint32_t(flip_storage_.size());
        for (int v : engine.output_flips(loc, 'X').z_flips) flip_storage_.push_back(v);
        slot.x_end = slot.z_begin = uint32_t(flip_storage_.size());
        for (int v : engine.output_flips(loc, 'Z').z_flips) flip_storage_.push_back(v);
        slot.z_end = uint32_t(flip_storage_.size());
    }

    for (size_t k = 0; k < s.ops.size(); k++) {
        const Op &op = s.ops[k];
        auto after = [&](int q) { return slot_index({k + 1, q}); };
        auto before = [&](int q) { return slot_index({k, q}); };
        switch (op.kind) {
            case OpKind::InitQPlus:
            case OpKind::ResetQPlus:
            case OpKind::H_Q:
                channels_.push_back({after(kAncilla)});
                break;
            case OpKind::InitDataZero:
                if (model.data_init_noise()) channels_.push_back({after(op.qubit)});
                break;
            case OpKind::CX_Q:
            case OpKind::CZ_Q:
                channels_.push_back({after(kAncilla), after(op.qubit)});
                break;
            case OpKind::MeasureQ_Z:
                channels_.push_back({before(kAncilla)});
                break;
            case OpKind::MeasureData:
                channels_.push_back({before(op.qubit)});
                break;
            case OpKind::CorrectionZ:
                break;
        }
    }
    log1m_p_ = std::log1p(-model.p);

    data_index_.assign(size_t(s.graph.max_label()) + 1, -1);
    for (int v : s.graph.vertices()) {
        if (s.cx_index[v] < 0) continue;
        DataQubit d;
        d.label = v;
        d.cx_time = s.ops[s.cx_index[v]].time_step;
        d.exposure = delay_exposure(s, v);
        data_index_[v] = int(data_.size());
        data_.push_back(std::move(d));
    }
    for (size_t k = 0; k < s.ops.size(); k++) {
        const Op &op = s.ops[k];
        if (op.kind != OpKind::CZ_Q) continue;
        const BlockRange &b = s.blocks[op.block];
        if (k >= b.begin && k < b.end) {
            data_[data_index_[op.qubit]].cz_blocks.emplace_back(op.time_step, op.block);
        }
    }

    auto grouped = [&](auto probability) {
        std::map<double, Group> groups;
        for (size_t k = 0; k < data_.size(); k++) {
            double q = probability(data_[k]);
            if (q > 0.0) groups[q].members.push_back(uint32_t(k));
        }
        std::vector<Group> out;
        for (auto &[q, g] : groups) {
            g.log1m = std::log1p(-std::min(q, 1.0 - 1e-300));
            if (q >= 1.0) g.log1m = -std::numeric_limits<double>::infinity();
            out.push_back(std::move(g));
        }
        return out;
    };
    if (model.kind == ErrorModelKind::EM2) {
        loss_groups_ = grouped([&](const DataQubit &) { return model.p_loss; });
    } else if (model.kind == ErrorModelKind::EM3b) {
        loss_groups_ = grouped([&](const DataQubit &d) { return delay_loss_probability(model.eta, d.exposure); });
    } else if (model.kind == ErrorModelKind::EM3a) {
        dephasing_groups_ = grouped([&](const DataQubit &d) { return delay_flip_probability(model.eta, d.exposure); });
    }
}

uint32_t NoiseSampler::slot_index(const FaultLocation &location) const {
    if (location.qubit < 0 || size_t(location.qubit) >= qubit_slots_.size() ||
        qubit_slots_[location.qubit].empty() || location.position > schedule_->ops.size()) {
        throw std::invalid_argument("fault location outside the schedule");
    }
    // The last slot at or before the position; positions before the first op on
    // the qubit are equivalent to its first slot.
    const auto &slots = qubit_slots_[location.qubit];
    auto it = std::upper_bound(slots.begin(), slots.end(), location.position,
                               [&](size_t pos, uint32_t idx) { return pos < locations_[idx].position; });
    return it == slots.begin() ? slots.front() : *(it - 1);
}

namespace {

// Visits the members of a group that fire, by geometric skipping.
template <typename F>
void for_each_hit(Rng &rng, double log1m, size_t n, F &&f) {
    if (std::isinf(log1m)) {
        for (size_t k = 0; k < n; k++) f(k);
        return;
    }
    uint64_t k = geometric_skip(rng, log1m);
    while (k < n) {
        f(size_t(k));
        uint64_t skip = geometric_skip(rng, log1m);
        if (skip >= n) break;
        k += 1 + skip;
    }
}

const char kPauliChars[4] = {'I', 'X', 'Y', 'Z'};

}  // namespace

void NoiseSampler::sample(Rng &rng, FaultSet &out) const {
    out.clear();
    for_each_hit(rng, log1m_p_, channels_.size(), [&](size_t c) {
        const Channel &ch = channels_[c];
        const FaultLocation &a = locations_[ch.slot_a];
        if (ch.slot_b == std::numeric_limits<uint32_t>::max()) {
            out.pauli_events.push_back(Fault{a, kPauliChars[1 + rng() % 3]});
            return;
        }
        const FaultLocation &b = locations_[ch.slot_b];
        unsigned r = unsigned(1 + rng() % 15);
        char pa = kPauliChars[r >> 2], pb = kPauliChars[r & 3];
        if (pa == 'I') {
            out.pauli_events.push_back(Fault{b, pb});
        } else {
            Fault f{a, pa};
            if (pb != 'I') {
                f.partner_qubit = b.qubit;
                f.partner_pauli = pb;
            }
            out.pauli_events.push_back(f);
        }
    });
    for (const Group &g : loss_groups_) {
        for_each_hit(rng, g.log1m, g.members.size(), [&](size_t k) {
            const DataQubit &d = data_[g.members[k]];
            // A sampled loss is an erasure found at the end of the qubit's stay in the
            // delay lines: every gate on it has already been applied.
            out.losses.push_back(LossEvent{d.label, double(d.cx_time + d.exposure), false});
        });
    }
    for (const Group &g : dephasing_groups_) {
        for_each_hit(rng, g.log1m, g.members.size(),
                     [&](size_t k) { out.delay_flips.push_back(data_[g.members[k]].label); });
    }
}

void NoiseSampler::add_flips(ErrorSample &out, uint32_t begin, uint32_t end) const {
    for (uint32_t k = begin; k < end; k++) out.flip(flip_storage_[k]);
}

void NoiseSampler::add_output_flip(ErrorSample &out, int schedule_label) const {
    int o = output_of_[schedule_label];
    if (o != 0) out.flip(o);
}

void NoiseSampler::mark_lost(ErrorSample &out, int schedule_label) const {
    int o = output_of_[schedule_label];
    if (o != 0) {
        out.lose(o);
        return;
    }
    // A lost measured-out site leaves its neighbours' frame unknown.
    for (int w : schedule_->graph.neighbors(schedule_label)) {
        if (output_of_[w] != 0) out.lose(output_of_[w]);
    }
}

void NoiseSampler::apply(const FaultSet &faults, ErrorSample &out) const {
    if (out.flipped.size() != size_t(max_output_label_) + 1) {
        out.resize(size_t(max_output_label_) + 1);
    } else {
        out.clear();
    }
    auto loss_time = [&](int q) {
        double t = std::numeric_limits<double>::infinity();
        for (const LossEvent &e : faults.losses) {
            if (e.label == q) t = std::min(t, e.time);
        }
        return t;
    };
    auto component = [&](const FaultLocation &loc, char pauli) {
        uint32_t idx = slot_index(loc);
        const Slot &slot = slots_[idx];
        // Operations on a lost qubit act as the identity, so noise on it is moot.
        if (slot.qubit != kAncilla && !faults.losses.empty() && double(slot.time_step) > loss_time(slot.qubit)) {
            return;
        }
        if (pauli == 'X' || pauli == 'Y') add_flips(out, slot.x_begin, slot.x_end);
        if (pauli == 'Z' || pauli == 'Y') add_flips(out, slot.z_begin, slot.z_end);
    };
    for (const Fault &f : faults.pauli_events) {
        component(f.location, f.pauli);
        if (f.partner_qubit >= 0) component({f.location.position, f.partner_qubit}, f.partner_pauli);
    }
    for (const LossEvent &e : faults.losses) {
        mark_lost(out, e.label);
        if (!e.kick) continue;
        const DataQubit &d = data_[data_index_.at(e.label)];
        for (auto [t, block] : d.cz_blocks) {
            if (double(t) > e.time) add_output_flip(out, block);
        }
    }
    for (int v : faults.delay_flips) add_output_flip(out, v);
}

void NoiseSampler::sample_errors(Rng &rng, FaultSet &scratch, ErrorSample &out) const {
    sample(rng, scratch);
    apply(scratch, out);
}

FaultSet sample_faults(const Schedule &s, const ErrorModel &model, std::optional<uint64_t> seed) {
    if (!seed) {
        throw std::invalid_argument("sample_faults requires an explicit seed");
    }
    NoiseSampler sampler(s, model);
    Rng rng = make_stream(*seed, 0);
    FaultSet out;
    sampler.sample(rng, out);
    return out;
}

FlipSet sample_delay_flips(const Schedule &s, double eta_z, std::optional<uint64_t> seed) {
    if (!seed) {
        throw std::invalid_argument("sample_delay_flips requires an explicit seed");
    }
    if (!(eta_z >= 0.0 && eta_z <= 0.5)) {
        throw std::invalid_argument("eta_Z must lie in [0, 0.5]");
    }
    Rng rng = make_stream(*seed, 0);
    std::vector<int> out_labels = s.protocol == Protocol::ProtocolA ? s.cubic_to_bcc : std::vector<int>{};
    FlipSet out;
    for (int v : s.graph.vertices()) {
        if (s.cx_index[v] < 0) continue;
        double q = NoiseSampler::delay_flip_probability(eta_z, delay_exposure(s, v));
        if (uniform01(rng) < q) {
            int o = s.protocol == Protocol::ProtocolA ? out_labels[v] : v;
            if (o != 0) toggle(out.z_flips, o);
        }
    }
    return out;
}

}  // namespace seqcluster
