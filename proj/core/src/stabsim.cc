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

#include "seqcluster/stabsim.h"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <stdexcept>

namespace seqcluster {

namespace {

size_t words_for(size_t n) { return (n + 63) / 64; }

// Gaussian elimination on generator lists with signs. Columns are visited in
// `column_order`; column c < n is x_c and c >= n is z_{c-n}. Returns the pivot
// column of each surviving row (rows are reordered to follow the pivots).
std::vector<size_t> eliminate(std::vector<PauliString> &rows, size_t n, const std::vector<size_t> &column_order) {
    std::vector<size_t> pivots;
    size_t next = 0;
    for (size_t c : column_order) {
        if (next == rows.size()) {
            break;
        }
        auto has = [&](const PauliString &p) { return c < n ? p.x(c) : p.z(c - n); };
        size_t found = rows.size();
        for (size_t r = next; r < rows.size(); r++) {
            if (has(rows[r])) {
                found = r;
                break;
            }
        }
        if (found == rows.size()) {
            continue;
        }
        std::swap(rows[next], rows[found]);
        for (size_t r = 0; r < rows.size(); r++) {
            if (r != next && has(rows[r])) {
                rows[r].mul_assign(rows[next]);
            }
        }
        pivots.push_back(c);
        next++;
    }
    return pivots;
}

std::vector<size_t> natural_columns(size_t n) {
    std::vector<size_t> cols(2 * n);
    for (size_t c = 0; c < 2 * n; c++) {
        cols[c] = c;
    }
    return cols;
}

size_t first_column(const PauliString &p) {
    size_t n = p.num_qubits();
    for (size_t q = 0; q < n; q++) {
        if (p.x(q)) return q;
    }
    for (size_t q = 0; q < n; q++) {
        if (p.z(q)) return n + q;
    }
    return 2 * n;
}

// Solves A b = rhs over GF(2), rows given as bit vectors of `cols` unknowns with the
// right-hand side in bit `cols`. Returns std::nullopt if inconsistent.
std::optional<std::vector<uint8_t>> solve_gf2(std::vector<std::vector<uint64_t>> rows, size_t cols) {
    size_t words = words_for(cols + 1);
    auto bit = [&](const std::vector<uint64_t> &row, size_t c) { return (row[c >> 6] >> (c & 63)) & 1; };
    std::vector<size_t> pivot_col;
    size_t next = 0;
    for (size_t c = 0; c < cols && next < rows.size(); c++) {
        size_t found = rows.size();
        for (size_t r = next; r < rows.size(); r++) {
            if (bit(rows[r], c)) {
                found = r;
                break;
            }
        }
        if (found == rows.size()) {
            continue;
        }
        std::swap(rows[next], rows[found]);
        for (size_t r = 0; r < rows.size(); r++) {
            if (r != next && bit(rows[r], c)) {
                for (size_t w = 0; w < words; w++) {
                    rows[r][w] ^= rows[next][w];
                }
            }
        }
        pivot_col.push_back(c);
        next++;
    }
    for (size_t r = next; r < rows.size(); r++) {
        if (bit(rows[r], cols)) {
            return std::nullopt;
        }
    }
    std::vector<uint8_t> solution(cols, 0);
    for (size_t r = 0; r < next; r++) {
        solution[pivot_col[r]] = uint8_t(bit(rows[r], cols));
    }
    return solution;
}

}  // namespace

// ---------------------------------------------------------------------------
// PauliString

PauliString::PauliString(size_t n) : n_(n), xs_(words_for(n), 0), zs_(words_for(n), 0) {
}

PauliString PauliString::from_text(const std::string &text) {
    std::string body = text;
    bool negative = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
        negative = body[0] == '-';
        body = body.substr(1);
    }
    PauliString p(body.size());
    for (size_t q = 0; q < body.size(); q++) {
        p.set(q, body[q]);
    }
    p.sign_ = negative;
    return p;
}

void PauliString::set_x(size_t q, bool v) {
    uint64_t m = uint64_t(1) << (q & 63);
    xs_[q >> 6] = v ? (xs_[q >> 6] | m) : (xs_[q >> 6] & ~m);
}

void PauliString::set_z(size_t q, bool v) {
    uint64_t m = uint64_t(1) << (q & 63);
    zs_[q >> 6] = v ? (zs_[q >> 6] | m) : (zs_[q >> 6] & ~m);
}

void PauliString::set(size_t q, char pauli) {
    if (q >= n_) {
        throw std::out_of_range("Pauli index out of range");
    }
    switch (pauli) {
        case 'I':
        case '_':
            set_x(q, false);
            set_z(q, false);
            break;
        case 'X':
            set_x(q, true);
            set_z(q, false);
            break;
        case 'Y':
            set_x(q, true);
            set_z(q, true);
            break;
        case 'Z':
            set_x(q, false);
            set_z(q, true);
            break;
        default:
            throw std::invalid_argument(std::string("not a Pauli character: ") + pauli);
    }
}

char PauliString::get(size_t q) const {
    bool xb = x(q), zb = z(q);
    return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : '_');
}

size_t PauliString::weight() const {
    size_t w = 0;
    for (size_t k = 0; k < xs_.size(); k++) {
        w += std::popcount(xs_[k] | zs_[k]);
    }
    return w;
}

std::vector<size_t> PauliString::support() const {
    std::vector<size_t> out;
    for (size_t q = 0; q < n_; q++) {
        if (x(q) || z(q)) {
            out.push_back(q);
        }
    }
    return out;
}

bool PauliString::is_identity() const {
    for (size_t k = 0; k < xs_.size(); k++) {
        if (xs_[k] | zs_[k]) {
            return false;
        }
    }
    return true;
}

bool PauliString::commutes(const PauliString &other) const {
    if (other.n_ != n_) {
        throw std::invalid_argument("Pauli size mismatch");
    }
    uint64_t acc = 0;
    for (size_t k = 0; k < xs_.size(); k++) {
        acc ^= (xs_[k] & other.zs_[k]) ^ (zs_[k] & other.xs_[k]);
    }
    return std::popcount(acc) % 2 == 0;
}

unsigned PauliString::product_log_i(const uint64_t *x1, const uint64_t *z1, const uint64_t *x2, const uint64_t *z2,
                                    size_t words) {
    // Counts, per qubit, +i / -i contributions of the single-qubit products
    // (mod 4, in two bit planes).
    uint64_t cnt1 = 0, cnt2 = 0;
    unsigned total = 0;
    for (size_t k = 0; k < words; k++) {
        uint64_t ox = x1[k], oz = z1[k];
        uint64_t nx = ox ^ x2[k], nz = oz ^ z2[k];
        uint64_t x1z2 = ox & z2[k];
        uint64_t anti = (x2[k] & oz) ^ x1z2;
        cnt2 ^= (cnt1 ^ nx ^ nz ^ x1z2) & anti;
        cnt1 ^= anti;
        // Fold per word to keep the mod-4 tallies exact.
        total += unsigned(std::popcount(cnt1)) + 2u * unsigned(std::popcount(cnt2));
        cnt1 = cnt2 = 0;
    }
    return total & 3;
}

void PauliString::mul_assign(const PauliString &rhs, bool allow_phase) {
    if (rhs.n_ != n_) {
        throw std::invalid_argument("Pauli size mismatch");
    }
    unsigned log_i = product_log_i(xs_.data(), zs_.data(), rhs.xs_.data(), rhs.zs_.data(), xs_.size());
    if ((log_i & 1) && !allow_phase) {
        throw std::logic_error("product of anticommuting Paulis is not Hermitian");
    }
    for (size_t k = 0; k < xs_.size(); k++) {
        xs_[k] ^= rhs.xs_[k];
        zs_[k] ^= rhs.zs_[k];
    }
    sign_ = sign_ ^ rhs.sign_ ^ bool(log_i & 2);
}

std::string PauliString::str() const {
    std::string out(1, sign_ ? '-' : '+');
    for (size_t q = 0; q < n_; q++) {
        out += get(q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tableau

Tableau::Tableau(size_t n)
    : n_(n), words_(words_for(n)), x_(2 * n * words_for(n), 0), z_(2 * n * words_for(n), 0), r_(2 * n, 0) {
    for (size_t q = 0; q < n; q++) {
        x_[q * words_ + (q >> 6)] |= uint64_t(1) << (q & 63);
        z_[(n + q) * words_ + (q >> 6)] |= uint64_t(1) << (q & 63);
    }
}

void Tableau::h(size_t q) {
    size_t w = q >> 6;
    uint64_t m = uint64_t(1) << (q & 63);
    for (size_t r = 0; r < 2 * n_; r++) {
        uint64_t &xw = x_[r * words_ + w];
        uint64_t &zw = z_[r * words_ + w];
        bool xb = xw & m, zb = zw & m;
        r_[r] ^= uint8_t(xb && zb);
        if (xb != zb) {
            xw ^= m;
            zw ^= m;
        }
    }
}

void Tableau::s(size_t q) {
    size_t w = q >> 6;
    uint64_t m = uint64_t(1) << (q & 63);
    for (size_t r = 0; r < 2 * n_; r++) {
        uint64_t &xw = x_[r * words_ + w];
        uint64_t &zw = z_[r * words_ + w];
        bool xb = xw & m, zb = zw & m;
        r_[r] ^= uint8_t(xb && zb);
        if (xb) {
            zw ^= m;
        }
    }
}

void Tableau::cx(size_t a, size_t b) {
    if (a == b) {
        throw std::invalid_argument("CX on a single qubit");
    }
    for (size_t r = 0; r < 2 * n_; r++) {
        bool xa = xbit(r, a), za = zbit(r, a), xb = xbit(r, b), zb = zbit(r, b);
        r_[r] ^= uint8_t(xa && zb && (xb == za));
        if (xa) {
            x_[r * words_ + (b >> 6)] ^= uint64_t(1) << (b & 63);
        }
        if (zb) {
            z_[r * words_ + (a >> 6)] ^= uint64_t(1) << (a & 63);
        }
    }
}

void Tableau::cz(size_t a, size_t b) {
    h(b);
    cx(a, b);
    h(b);
}

void Tableau::x(size_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        r_[r] ^= uint8_t(zbit(r, q));
    }
}

void Tableau::z(size_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        r_[r] ^= uint8_t(xbit(r, q));
    }
}

void Tableau::y(size_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        r_[r] ^= uint8_t(xbit(r, q) != zbit(r, q));
    }
}

void Tableau::apply_pauli(const PauliString &p) {
    if (p.num_qubits() != n_) {
        throw std::invalid_argument("Pauli size does not match tableau");
    }
    for (size_t r = 0; r < 2 * n_; r++) {
        uint64_t acc = 0;
        for (size_t w = 0; w < words_; w++) {
            acc ^= (x_[r * words_ + w] & p.zs()[w]) ^ (z_[r * words_ + w] & p.xs()[w]);
        }
        r_[r] ^= uint8_t(std::popcount(acc) & 1);
    }
}

void Tableau::rowsum(size_t h, size_t i) {
    unsigned log_i = PauliString::product_log_i(xrow(i), zrow(i), xrow(h), zrow(h), words_);
    uint64_t *xh = xrow(h), *zh = zrow(h);
    const uint64_t *xi = xrow(i), *zi = zrow(i);
    for (size_t w = 0; w < words_; w++) {
        xh[w] ^= xi[w];
        zh[w] ^= zi[w];
    }
    r_[h] = uint8_t((r_[h] ^ r_[i] ^ ((log_i >> 1) & 1)) & 1);
}

bool Tableau::is_z_deterministic(size_t q) const {
    for (size_t p = n_; p < 2 * n_; p++) {
        if (xbit(p, q)) {
            return false;
        }
    }
    return true;
}

int Tableau::measure_z(size_t q, int forced, std::mt19937_64 *rng) {
    if (q >= n_) {
        throw std::out_of_range("measured qubit out of range");
    }
    size_t p = 2 * n_;
    for (size_t r = n_; r < 2 * n_; r++) {
        if (xbit(r, q)) {
            p = r;
            break;
        }
    }
    if (p < 2 * n_) {
        for (size_t r = 0; r < 2 * n_; r++) {
            if (r != p && xbit(r, q)) {
                rowsum(r, p);
            }
        }
        std::copy(xrow(p), xrow(p) + words_, xrow(p - n_));
        std::copy(zrow(p), zrow(p) + words_, zrow(p - n_));
        r_[p - n_] = r_[p];
        std::fill(xrow(p), xrow(p) + words_, 0);
        std::fill(zrow(p), zrow(p) + words_, 0);
        zrow(p)[q >> 6] |= uint64_t(1) << (q & 63);
        int outcome = 0;
        if (forced >= 0) {
            outcome = forced & 1;
        } else if (rng != nullptr) {
            outcome = int((*rng)() & 1);
        }
        r_[p] = uint8_t(outcome);
        return outcome;
    }
    // Deterministic: multiply the stabilizers paired with destabilizers that have x_q.
    std::vector<uint64_t> sx(words_, 0), sz(words_, 0);
    unsigned sign = 0;
    for (size_t i = 0; i < n_; i++) {
        if (!xbit(i, q)) {
            continue;
        }
        size_t row = i + n_;
        unsigned log_i = PauliString::product_log_i(sx.data(), sz.data(), xrow(row), zrow(row), words_);
        for (size_t w = 0; w < words_; w++) {
            sx[w] ^= xrow(row)[w];
            sz[w] ^= zrow(row)[w];
        }
        sign ^= r_[row] ^ ((log_i >> 1) & 1);
    }
    int outcome = int(sign & 1);
    if (forced >= 0 && (forced & 1) != outcome) {
        throw std::runtime_error("forced measurement outcome has probability zero");
    }
    return outcome;
}

void Tableau::reset_zero(size_t q) {
    if (measure_z(q, is_z_deterministic(q) ? -1 : 0) == 1) {
        x(q);
    }
}

void Tableau::reset_plus(size_t q) {
    reset_zero(q);
    h(q);
}

PauliString Tableau::stabilizer(size_t k) const {
    PauliString p(n_);
    std::copy(xrow(n_ + k), xrow(n_ + k) + words_, p.xs().begin());
    std::copy(zrow(n_ + k), zrow(n_ + k) + words_, p.zs().begin());
    p.set_negative(r_[n_ + k]);
    return p;
}

std::vector<PauliString> Tableau::stabilizers() const {
    std::vector<PauliString> out;
    out.reserve(n_);
    for (size_t k = 0; k < n_; k++) {
        out.push_back(stabilizer(k));
    }
    return out;
}

std::string Tableau::str() const {
    std::string out;
    for (const auto &p : stabilizers()) {
        out += p.str();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stabilizer groups

std::vector<PauliString> canonical_generators(std::vector<PauliString> gens) {
    if (gens.empty()) {
        return gens;
    }
    size_t n = gens[0].num_qubits();
    std::vector<size_t> pivots = eliminate(gens, n, natural_columns(n));
    gens.resize(pivots.size());
    return gens;
}

std::vector<PauliString> restrict_generators(const std::vector<PauliString> &gens, const std::vector<size_t> &keep) {
    if (gens.empty()) {
        return {};
    }
    size_t n = gens[0].num_qubits();
    std::vector<char> kept(n, 0);
    for (size_t q : keep) {
        kept.at(q) = 1;
    }
    std::vector<size_t> order;
    for (size_t q = 0; q < n; q++) {
        if (!kept[q]) {
            order.push_back(q);
            order.push_back(n + q);
        }
    }
    size_t discard_cols = order.size();
    for (size_t q = 0; q < n; q++) {
        if (kept[q]) {
            order.push_back(q);
            order.push_back(n + q);
        }
    }
    std::vector<PauliString> rows = gens;
    std::vector<size_t> pivots = eliminate(rows, n, order);
    std::vector<PauliString> out;
    for (size_t r = 0; r < pivots.size(); r++) {
        size_t c = pivots[r];
        size_t q = c < n ? c : c - n;
        if (!kept[q]) {
            continue;
        }
        PauliString small(keep.size());
        for (size_t k = 0; k < keep.size(); k++) {
            small.set_x(k, rows[r].x(keep[k]));
            small.set_z(k, rows[r].z(keep[k]));
        }
        small.set_negative(rows[r].negative());
        out.push_back(small);
    }
    (void)discard_cols;
    if (out.size() != keep.size()) {
        throw std::runtime_error("kept qubits are entangled with the discarded ones");
    }
    return canonical_generators(out);
}

int group_membership(const std::vector<PauliString> &canonical, const PauliString &p) {
    PauliString rest = p;
    rest.set_negative(false);
    bool sign = p.negative();
    for (const auto &row : canonical) {
        size_t c = first_column(row);
        size_t n = row.num_qubits();
        bool has = c < n ? rest.x(c) : (c < 2 * n && rest.z(c - n));
        if (has) {
            rest.mul_assign(row, true);
        }
    }
    if (!rest.is_identity()) {
        return 0;
    }
    // rest = p' * prod rows with p' unsigned; p = (+-) prod rows.
    return (rest.negative() == sign) ? 1 : -1;
}

std::string StabilizerState::str() const {
    std::string out;
    for (const auto &g : generators) {
        out += g.str();
        out += '\n';
    }
    return out;
}

size_t StabilizerState::index_of(int label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) {
        throw std::out_of_range("label " + std::to_string(label) + " not in the state");
    }
    return size_t(it - labels.begin());
}

StabilizerState reference_cluster(const Graph &g) {
    StabilizerState state;
    state.labels = g.vertices();
    size_t n = state.labels.size();
    std::vector<PauliString> gens;
    for (size_t k = 0; k < n; k++) {
        PauliString p(n);
        p.set_x(k, true);
        for (int w : g.neighbors(state.labels[k])) {
            p.set_z(state.index_of(w), true);
        }
        gens.push_back(p);
    }
    state.generators = canonical_generators(gens);
    return state;
}

// ---------------------------------------------------------------------------
// Schedule execution

namespace {

void apply_single(Tableau &t, size_t q, char pauli) {
    switch (pauli) {
        case 'X':
            t.x(q);
            break;
        case 'Y':
            t.y(q);
            break;
        case 'Z':
            t.z(q);
            break;
        case 'I':
            break;
        default:
            throw std::invalid_argument(std::string("not a Pauli character: ") + pauli);
    }
}

}  // namespace

RunResult run_schedule(const Schedule &s, const std::vector<Fault> &faults, const RunOptions &options) {
    size_t n = size_t(s.graph.max_label()) + 1;
    RunResult result{Tableau(n), std::vector<int>(s.ops.size(), -1), {}};
    result.qubit_index.resize(n);
    for (size_t q = 0; q < n; q++) {
        result.qubit_index[q] = q;
    }
    std::multimap<size_t, const Fault *> by_position;
    for (const Fault &f : faults) {
        if (f.location.position > s.ops.size()) {
            throw std::invalid_argument("fault position beyond the end of the schedule");
        }
        if (f.location.qubit < 0 || size_t(f.location.qubit) >= n) {
            throw std::invalid_argument("fault on an unknown qubit");
        }
        by_position.emplace(f.location.position, &f);
    }
    Tableau &t = result.tableau;
    size_t measurement_count = 0;
    auto measure = [&](size_t q) {
        int forced = -1;
        if (measurement_count < options.policy.forced.size()) {
            forced = options.policy.forced[measurement_count];
        } else if (options.policy.rng == nullptr && !t.is_z_deterministic(q)) {
            forced = 0;
        }
        measurement_count++;
        return t.measure_z(q, forced, options.policy.rng);
    };
    auto apply_faults_at = [&](size_t position) {
        auto range = by_position.equal_range(position);
        for (auto it = range.first; it != range.second; ++it) {
            const Fault &f = *it->second;
            apply_single(t, size_t(f.location.qubit), f.pauli);
            if (f.partner_qubit >= 0) {
                apply_single(t, size_t(f.partner_qubit), f.partner_pauli);
            }
        }
    };
    for (size_t k = 0; k < s.ops.size(); k++) {
        apply_faults_at(k);
        const Op &op = s.ops[k];
        size_t q = size_t(op.qubit);
        switch (op.kind) {
            case OpKind::InitQPlus:
            case OpKind::ResetQPlus:
                t.reset_plus(kAncilla);
                break;
            case OpKind::InitDataZero:
                t.reset_zero(q);
                break;
            case OpKind::CX_Q:
                t.cx(kAncilla, q);
                break;
            case OpKind::CZ_Q:
                t.cz(kAncilla, q);
                break;
            case OpKind::H_Q:
                t.h(kAncilla);
                break;
            case OpKind::MeasureQ_Z:
                result.outcomes[k] = measure(kAncilla);
                break;
            case OpKind::CorrectionZ:
                if (op.condition < 0 || result.outcomes.at(op.condition) < 0) {
                    throw std::logic_error("correction conditioned on a missing measurement");
                }
                if (result.outcomes[op.condition] == 1) {
                    t.z(q);
                }
                break;
            case OpKind::MeasureData:
                if (op.basis == Basis::Z) {
                    result.outcomes[k] = measure(q);
                } else if (options.execute_x_measurements) {
                    t.h(q);
                    result.outcomes[k] = measure(q);
                }
                break;
        }
    }
    apply_faults_at(s.ops.size());
    return result;
}

std::vector<int> output_labels(const Schedule &s) {
    std::vector<int> labels;
    for (int v : s.final_labels()) {
        labels.push_back(s.protocol == Protocol::ProtocolA ? s.cubic_to_bcc[v] : v);
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

StabilizerState final_state(const Schedule &s, const RunResult &run) {
    std::vector<int> finals = s.final_labels();
    std::sort(finals.begin(), finals.end());
    std::vector<size_t> keep;
    for (int v : finals) {
        keep.push_back(run.qubit_index[v]);
    }
    StabilizerState state;
    state.labels = output_labels(s);
    state.generators = restrict_generators(run.tableau.stabilizers(), keep);
    return state;
}

StabilizerState prepared_state(const Schedule &s, const std::vector<Fault> &faults) {
    return final_state(s, run_schedule(s, faults));
}

std::string LabelledPauli::str() const {
    std::map<int, char> m;
    for (int q : x) m[q] = 'X';
    for (int q : z) m[q] = m.count(q) ? 'Y' : 'Z';
    if (m.empty()) {
        return "I";
    }
    std::ostringstream out;
    bool first = true;
    for (const auto &[q, c] : m) {
        if (!first) out << ' ';
        out << c << q;
        first = false;
    }
    return out.str();
}

PauliString to_pauli(const StabilizerState &state, const LabelledPauli &p) {
    PauliString out(state.labels.size());
    for (int q : p.x) {
        out.set_x(state.index_of(q), !out.x(state.index_of(q)));
    }
    for (int q : p.z) {
        out.set_z(state.index_of(q), !out.z(state.index_of(q)));
    }
    return out;
}

LabelledPauli from_pauli(const StabilizerState &state, const PauliString &p) {
    LabelledPauli out;
    for (size_t k = 0; k < p.num_qubits(); k++) {
        if (p.x(k)) out.x.push_back(state.labels[k]);
        if (p.z(k)) out.z.push_back(state.labels[k]);
    }
    return out;
}

bool verify_effective_error(const StabilizerState &ideal, const StabilizerState &faulty, const LabelledPauli &claimed) {
    if (ideal.labels != faulty.labels) {
        throw std::invalid_argument("states are defined on different qubits");
    }
    PauliString e = to_pauli(ideal, claimed);
    std::vector<PauliString> conj = faulty.generators;
    for (auto &g : conj) {
        if (!g.commutes(e)) {
            g.set_negative(!g.negative());
        }
    }
    return canonical_generators(conj) == ideal.generators;
}

bool verify_effective_error(const Schedule &s, const std::vector<Fault> &faults, const LabelledPauli &claimed) {
    return verify_effective_error(prepared_state(s), prepared_state(s, faults), claimed);
}

PauliString effective_error_representative(const StabilizerState &ideal, const StabilizerState &faulty) {
    if (ideal.labels != faulty.labels) {
        throw std::invalid_argument("states are defined on different qubits");
    }
    size_t n = ideal.labels.size();
    // Unknowns: e_x[0..n), e_z[0..n). Generator g anticommutes with e iff
    // sum_q g_z[q] e_x[q] + g_x[q] e_z[q] = 1.
    std::vector<std::vector<uint64_t>> rows;
    size_t words = words_for(2 * n + 1);
    for (const auto &g : ideal.generators) {
        int m = group_membership(faulty.generators, g);
        if (m == 0) {
            throw std::runtime_error("faulty state is not a Pauli image of the fault-free state");
        }
        std::vector<uint64_t> row(words, 0);
        for (size_t q = 0; q < n; q++) {
            if (g.z(q)) row[q >> 6] |= uint64_t(1) << (q & 63);
            if (g.x(q)) row[(n + q) >> 6] |= uint64_t(1) << ((n + q) & 63);
        }
        if (m < 0) row[(2 * n) >> 6] |= uint64_t(1) << ((2 * n) & 63);
        rows.push_back(std::move(row));
    }
    auto sol = solve_gf2(rows, 2 * n);
    if (!sol) {
        throw std::runtime_error("no Pauli maps the fault-free state to the faulty state");
    }
    PauliString e(n);
    for (size_t q = 0; q < n; q++) {
        e.set_x(q, (*sol)[q]);
        e.set_z(q, (*sol)[n + q]);
    }
    return e;
}

LabelledPauli canonical_effective_error(const StabilizerState &ideal, const StabilizerState &faulty) {
    size_t n = ideal.labels.size();
    if (n > kCanonicalSearchLimit) {
        throw std::invalid_argument("canonical effective error search is limited to " +
                                    std::to_string(kCanonicalSearchLimit) + " qubits");
    }
    PauliString e0 = effective_error_representative(ideal, faulty);
    uint64_t cx = n ? e0.xs()[0] : 0, cz = n ? e0.zs()[0] : 0;
    std::vector<uint64_t> gx, gz;
    for (const auto &g : ideal.generators) {
        gx.push_back(g.xs()[0]);
        gz.push_back(g.zs()[0]);
    }
    auto better = [](uint64_t ax, uint64_t az, uint64_t bx, uint64_t bz) {
        uint64_t sa = ax | az, sb = bx | bz;
        int wa = std::popcount(sa), wb = std::popcount(sb);
        if (wa != wb) return wa < wb;
        if (sa != sb) {
            uint64_t d = sa ^ sb;
            return (sa & d & (~d + 1)) != 0;
        }
        if (ax != bx) return ax < bx;
        return az < bz;
    };
    uint64_t bx = cx, bz = cz;
    size_t m = gx.size();
    for (uint64_t step = 1; step < (uint64_t(1) << m); step++) {
        size_t j = size_t(std::countr_zero(step));
        cx ^= gx[j];
        cz ^= gz[j];
        if (better(cx, cz, bx, bz)) {
            bx = cx;
            bz = cz;
        }
    }
    LabelledPauli out;
    for (size_t q = 0; q < n; q++) {
        if ((bx >> q) & 1) out.x.push_back(ideal.labels[q]);
        if ((bz >> q) & 1) out.z.push_back(ideal.labels[q]);
    }
    return out;
}

LabelledPauli canonical_effective_error(const Schedule &s, const std::vector<Fault> &faults) {
    return canonical_effective_error(prepared_state(s), prepared_state(s, faults));
}

bool has_representative_within(const StabilizerState &ideal, const PauliString &representative,
                               const std::vector<int> &region) {
    size_t n = ideal.labels.size();
    std::vector<char> inside(n, 0);
    for (int label : region) {
        auto it = std::lower_bound(ideal.labels.begin(), ideal.labels.end(), label);
        if (it != ideal.labels.end() && *it == label) {
            inside[size_t(it - ideal.labels.begin())] = 1;
        }
    }
    size_t m = ideal.generators.size();
    size_t words = words_for(m + 1);
    std::vector<std::vector<uint64_t>> rows;
    for (size_t q = 0; q < n; q++) {
        if (inside[q]) {
            continue;
        }
        for (int part = 0; part < 2; part++) {
            std::vector<uint64_t> row(words, 0);
            bool any = false;
            for (size_t k = 0; k < m; k++) {
                bool b = part == 0 ? ideal.generators[k].x(q) : ideal.generators[k].z(q);
                if (b) {
                    row[k >> 6] |= uint64_t(1) << (k & 63);
                    any = true;
                }
            }
            bool rhs = part == 0 ? representative.x(q) : representative.z(q);
            if (rhs) {
                row[m >> 6] |= uint64_t(1) << (m & 63);
            }
            if (any || rhs) {
                rows.push_back(std::move(row));
            }
        }
    }
    return solve_gf2(rows, m).has_value();
}

}  // namespace seqcluster
