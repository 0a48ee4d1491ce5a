#include "cdsurf/code.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "cdsurf/noise.hpp"

namespace cdsurf {

std::string to_string(CodeFamily f) {
    switch (f) {
        case CodeFamily::CSS: return "css";
        case CodeFamily::XY: return "xy";
        case CodeFamily::XZZX: return "xzzx";
        case CodeFamily::XXZZ: return "xxzz";
        case CodeFamily::MHHM: return "mhhm";
        case CodeFamily::MMHH: return "mmhh";
        case CodeFamily::Custom: return "custom";
    }
    return "?";
}

CodeFamily family_from_string(const std::string& s) {
    for (auto f : {CodeFamily::CSS, CodeFamily::XY, CodeFamily::XZZX, CodeFamily::XXZZ,
                   CodeFamily::MHHM, CodeFamily::MMHH, CodeFamily::Custom}) {
        if (to_string(f) == s) return f;
    }
    throw std::invalid_argument("unknown code family '" + s + "'");
}

namespace {

// Boundary-to-boundary chains built from the per-qubit group letters: the
// horizontal chain uses V letters on the bottom vertex row (alternating V/H
// letters on the rotated bottom data row), the vertical chain the mirrored
// pattern. Both commute with every stabilizer of a consistent deformation.
LogicalPair canonical_logicals(const Lattice& lat, const std::vector<Pauli>& v,
                               const std::vector<Pauli>& h) {
    const int n = lat.num_qubits();
    PauliOperator xbar(n), zbar(n);
    if (lat.spec().layout == Layout::NonRotated) {
        for (const auto& q : lat.qubits()) {
            if (q.coord.z == 0 && q.coord.x % 2 == 0) xbar.set(q.id, v[q.id]);
            if (q.coord.x == 0 && q.coord.z % 2 == 0) zbar.set(q.id, h[q.id]);
        }
    } else {
        for (const auto& q : lat.qubits()) {
            const int i = (q.coord.x - 1) / 2, j = (q.coord.z - 1) / 2;
            if (j == 0) xbar.set(q.id, i % 2 == 0 ? v[q.id] : h[q.id]);
            if (i == 0) zbar.set(q.id, j % 2 == 0 ? h[q.id] : v[q.id]);
        }
    }
    return {std::move(xbar), std::move(zbar)};
}

}  // namespace

CodeLayout::CodeLayout(std::shared_ptr<const Lattice> lattice, CodeFamily family,
                       std::vector<Pauli> v_letters, std::vector<Pauli> h_letters, bool full_checks)
    : lattice_(std::move(lattice)),
      family_(family),
      v_(std::move(v_letters)),
      h_(std::move(h_letters)),
      ops_cache_(std::make_shared<OpsCache>()) {
    const int n = lattice_->num_qubits();
    if (static_cast<int>(v_.size()) != n || static_cast<int>(h_.size()) != n) {
        throw std::invalid_argument("letter vectors must cover every qubit");
    }
    for (int q = 0; q < n; ++q) {
        if (v_[q] == Pauli::I || h_[q] == Pauli::I || v_[q] == h_[q]) {
            throw std::invalid_argument("inconsistent deformation at qubit " + std::to_string(q));
        }
    }
    logicals_ = canonical_logicals(*lattice_, v_, h_);

    if (full_checks) {
        logicals_ = derive_logicals(*this);  // re-derives and validates
        if (stabilizer_rank(*this) != lattice_->num_stabilizers()) {
            throw std::logic_error("dependent stabilizer set");
        }
    }
}

const std::vector<PauliOperator>& CodeLayout::stabilizer_ops() const {
    std::scoped_lock lock(ops_cache_->mutex);
    if (!ops_cache_->built) {
        const int n = lattice_->num_qubits();
        ops_cache_->ops.reserve(lattice_->num_stabilizers());
        for (const auto& s : lattice_->stabilizers()) {
            PauliOperator op(n);
            for (int q : s.support) op.set(q, sublattice_letter(q, s.sublattice));
            ops_cache_->ops.push_back(std::move(op));
        }
        ops_cache_->built = true;
    }
    return ops_cache_->ops;
}

Pauli CodeLayout::measured_letter(int stab, int qubit) const {
    const auto& s = lattice_->stabilizer(stab);
    if (!std::binary_search(s.support.begin(), s.support.end(), qubit)) {
        throw std::invalid_argument("qubit not in stabilizer support");
    }
    return sublattice_letter(qubit, s.sublattice);
}

namespace {

CodeLayout build_uniform(std::shared_ptr<const Lattice> lattice, CodeFamily family,
                         Pauli dual_letter, Pauli primal_letter) {
    const int n = lattice->num_qubits();
    std::vector<Pauli> v(n), h(n);
    for (int q = 0; q < n; ++q) {
        const bool v_is_dual = lattice->adjacency(q).v_sublattice == Sublattice::Dual;
        v[q] = v_is_dual ? dual_letter : primal_letter;
        h[q] = v_is_dual ? primal_letter : dual_letter;
    }
    return CodeLayout(std::move(lattice), family, std::move(v), std::move(h));
}

int checkerboard_parity(const SiteIndex& q) { return ((q.coord.x + q.coord.z) / 2) % 2; }

}  // namespace

CodeLayout build_css(std::shared_ptr<const Lattice> lattice) {
    return build_uniform(std::move(lattice), CodeFamily::CSS, Pauli::X, Pauli::Z);
}

CodeLayout build_xy(std::shared_ptr<const Lattice> lattice) {
    return build_uniform(std::move(lattice), CodeFamily::XY, Pauli::X, Pauli::Y);
}

CodeLayout build_xzzx(std::shared_ptr<const Lattice> lattice) {
    const int n = lattice->num_qubits();
    std::vector<Pauli> v(n, Pauli::X), h(n, Pauli::Z);
    return CodeLayout(std::move(lattice), CodeFamily::XZZX, std::move(v), std::move(h));
}

CodeLayout build_xxzz(std::shared_ptr<const Lattice> lattice) {
    const int n = lattice->num_qubits();
    std::vector<Pauli> v(n), h(n);
    for (int q = 0; q < n; ++q) {
        const bool even = checkerboard_parity(lattice->qubits()[q]) == 0;
        v[q] = even ? Pauli::X : Pauli::Z;
        h[q] = even ? Pauli::Z : Pauli::X;
    }
    return CodeLayout(std::move(lattice), CodeFamily::XXZZ, std::move(v), std::move(h));
}

RateOrdering rate_ordering(double x, double y, double z) {
    std::array<std::pair<double, Pauli>, 3> r{{{x, Pauli::X}, {y, Pauli::Y}, {z, Pauli::Z}}};
    std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return {r[0].second, r[1].second, r[2].second};
}

namespace {

CodeLayout build_tailored(std::shared_ptr<const Lattice> lattice, const NoiseModel& noise,
                          CodeFamily family, bool full_checks) {
    const int n = lattice->num_qubits();
    if (noise.num_qubits() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("noise model size does not match lattice");
    }
    std::vector<Pauli> v(n), h(n);
    for (int q = 0; q < n; ++q) {
        const auto& r = noise.rates(q);
        if (r.x < 0 || r.y < 0 || r.z < 0) {
            throw std::invalid_argument("negative Pauli rate at qubit " + std::to_string(q));
        }
        const auto ord = rate_ordering(r.x, r.y, r.z);
        bool high_on_v = true;  // MHHM: north/south checks measure the high-rate letter
        if (family == CodeFamily::MMHH) {
            high_on_v = checkerboard_parity(lattice->qubits()[q]) != 0;
        }
        v[q] = high_on_v ? ord.high : ord.medium;
        h[q] = high_on_v ? ord.medium : ord.high;
    }
    return CodeLayout(std::move(lattice), family, std::move(v), std::move(h), full_checks);
}

}  // namespace

CodeLayout build_mhhm(std::shared_ptr<const Lattice> lattice, const NoiseModel& noise, bool full_checks) {
    return build_tailored(std::move(lattice), noise, CodeFamily::MHHM, full_checks);
}

CodeLayout build_mmhh(std::shared_ptr<const Lattice> lattice, const NoiseModel& noise, bool full_checks) {
    return build_tailored(std::move(lattice), noise, CodeFamily::MMHH, full_checks);
}

CodeLayout build_family(CodeFamily family, std::shared_ptr<const Lattice> lattice,
                        const NoiseModel* noise, bool full_checks) {
    switch (family) {
        case CodeFamily::CSS: return build_css(std::move(lattice));
        case CodeFamily::XY: return build_xy(std::move(lattice));
        case CodeFamily::XZZX: return build_xzzx(std::move(lattice));
        case CodeFamily::XXZZ: return build_xxzz(std::move(lattice));
        case CodeFamily::MHHM:
        case CodeFamily::MMHH:
            if (!noise) throw std::invalid_argument("tailored families require a noise model");
            return build_tailored(std::move(lattice), *noise, family, full_checks);
        case CodeFamily::Custom: break;
    }
    throw std::invalid_argument("cannot build family");
}

std::vector<std::vector<Pauli>> assignment_table(const CodeLayout& code) {
    std::vector<std::vector<Pauli>> letters;
    letters.reserve(code.lattice().num_stabilizers());
    for (const auto& s : code.lattice().stabilizers()) {
        std::vector<Pauli> row;
        row.reserve(s.support.size());
        for (int q : s.support) row.push_back(code.sublattice_letter(q, s.sublattice));
        letters.push_back(std::move(row));
    }
    return letters;
}

bool validate_consistency(const Lattice& lattice, const std::vector<std::vector<Pauli>>& letters) {
    if (static_cast<int>(letters.size()) != lattice.num_stabilizers()) return false;
    auto lookup = [&](int stab, int qubit) -> Pauli {
        const auto& s = lattice.stabilizer(stab);
        for (std::size_t k = 0; k < s.support.size(); ++k) {
            if (s.support[k] == qubit) return letters[stab][k];
        }
        return Pauli::I;
    };
    for (int q = 0; q < lattice.num_qubits(); ++q) {
        const auto& adj = lattice.adjacency(q);
        Pauli v = Pauli::I, h = Pauli::I;
        for (int s : adj.v) {
            if (s == Lattice::kNone) continue;
            const Pauli l = lookup(s, q);
            if (l == Pauli::I) return false;
            if (v == Pauli::I) v = l;
            else if (v != l) return false;
        }
        for (int s : adj.h) {
            if (s == Lattice::kNone) continue;
            const Pauli l = lookup(s, q);
            if (l == Pauli::I) return false;
            if (h == Pauli::I) h = l;
            else if (h != l) return false;
        }
        if (v != Pauli::I && h != Pauli::I && v == h) return false;
    }
    return true;
}

bool validate_consistency(const CodeLayout& code) {
    return validate_consistency(code.lattice(), assignment_table(code));
}

LogicalPair derive_logicals(const CodeLayout& code) {
    const int n = code.lattice().num_qubits();
    std::vector<Pauli> vv(n), hh(n);
    for (int q = 0; q < n; ++q) {
        vv[q] = code.v_letter(q);
        hh[q] = code.h_letter(q);
    }
    LogicalPair pair = canonical_logicals(code.lattice(), vv, hh);
    for (const auto& s : code.stabilizer_ops()) {
        if (!pair.xbar.commutes_with(s) || !pair.zbar.commutes_with(s)) {
            throw std::logic_error("canonical logical chain fails commutation");
        }
    }
    if (pair.xbar.commutes_with(pair.zbar)) throw std::logic_error("canonical logicals commute");
    return pair;
}

namespace {

// Rows are 2N-bit vectors [x | z] packed into words.
struct BitMatrix {
    std::size_t cols = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> data;

    BitMatrix(std::size_t rows, std::size_t cols_)
        : cols(cols_), words((cols_ + 63) / 64), data(rows * words, 0) {}
    std::uint64_t* row(std::size_t r) { return data.data() + r * words; }
    const std::uint64_t* row(std::size_t r) const { return data.data() + r * words; }
    std::size_t rows() const { return words ? data.size() / words : 0; }

    bool get(std::size_t r, std::size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
    void set(std::size_t r, std::size_t c) { row(r)[c >> 6] |= 1ULL << (c & 63); }
    void xor_rows(std::size_t dst, std::size_t src) {
        for (std::size_t w = 0; w < words; ++w) row(dst)[w] ^= row(src)[w];
    }
};

std::vector<int> echelonize(BitMatrix& m) {
    std::vector<int> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows(); ++c) {
        std::size_t pivot = r;
        while (pivot < m.rows() && !m.get(pivot, c)) ++pivot;
        if (pivot == m.rows()) continue;
        if (pivot != r) {
            for (std::size_t w = 0; w < m.words; ++w) std::swap(m.row(pivot)[w], m.row(r)[w]);
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i != r && m.get(i, c)) m.xor_rows(i, r);
        }
        pivots.push_back(static_cast<int>(c));
        ++r;
    }
    return pivots;
}

BitMatrix stabilizer_matrix(const CodeLayout& code) {
    const std::size_t n = code.lattice().num_qubits();
    const auto& ops = code.stabilizer_ops();
    BitMatrix m(ops.size(), 2 * n);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t q = 0; q < n; ++q) {
            const Pauli p = ops[i].get(q);
            if (has_x(p)) m.set(i, q);
            if (has_z(p)) m.set(i, n + q);
        }
    }
    return m;
}

PauliOperator row_to_pauli(const BitMatrix& m, std::size_t r, std::size_t n) {
    PauliOperator op(n);
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint8_t x = m.get(r, q);
        const std::uint8_t z = m.get(r, n + q);
        if (x || z) op.set(q, static_cast<Pauli>(x | (z << 1)));
    }
    return op;
}

}  // namespace

int stabilizer_rank(const CodeLayout& code) {
    BitMatrix m = stabilizer_matrix(code);
    return static_cast<int>(echelonize(m).size());
}

LogicalPair derive_logicals_algebraic(const CodeLayout& code) {
    const std::size_t n = code.lattice().num_qubits();
    const std::size_t ns = code.stabilizer_ops().size();
    if (ns + 1 != n) throw std::invalid_argument("expected N-1 stabilizers");

    // Normalizer = null space of S * Lambda, i.e. of the matrix with x/z
    // halves swapped.
    BitMatrix swapped(ns, 2 * n);
    {
        BitMatrix m = stabilizer_matrix(code);
        for (std::size_t r = 0; r < ns; ++r) {
            for (std::size_t q = 0; q < n; ++q) {
                if (m.get(r, q)) swapped.set(r, n + q);
                if (m.get(r, n + q)) swapped.set(r, q);
            }
        }
    }
    const auto pivots = echelonize(swapped);
    if (pivots.size() != ns) throw std::invalid_argument("stabilizer rank is not N-1");

    std::vector<bool> is_pivot(2 * n, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<PauliOperator> candidates;
    for (std::size_t free_c = 0; free_c < 2 * n; ++free_c) {
        if (is_pivot[free_c]) continue;
        BitMatrix vec(1, 2 * n);
        vec.set(0, free_c);
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            if (swapped.get(r, free_c)) vec.set(0, static_cast<std::size_t>(pivots[r]));
        }
        candidates.push_back(row_to_pauli(vec, 0, n));
    }

    // Quotient by the stabilizer row space, then pick an anticommuting pair.
    BitMatrix stab = stabilizer_matrix(code);
    const auto stab_pivots = echelonize(stab);
    auto in_stabilizer_group = [&](const PauliOperator& op) {
        BitMatrix vec(1, 2 * n);
        for (std::size_t q = 0; q < n; ++q) {
            if (has_x(op.get(q))) vec.set(0, q);
            if (has_z(op.get(q))) vec.set(0, n + q);
        }
        for (std::size_t r = 0; r < stab_pivots.size(); ++r) {
            if (vec.get(0, static_cast<std::size_t>(stab_pivots[r]))) {
                for (std::size_t w = 0; w < vec.words; ++w) vec.row(0)[w] ^= stab.row(r)[w];
            }
        }
        for (std::size_t w = 0; w < vec.words; ++w) {
            if (vec.row(0)[w]) return false;
        }
        return true;
    };

    std::vector<PauliOperator> reps;
    for (auto& c : candidates) {
        if (!in_stabilizer_group(c)) reps.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < reps.size(); ++i) {
        for (std::size_t j = i + 1; j < reps.size(); ++j) {
            if (!reps[i].commutes_with(reps[j])) return {reps[i], reps[j]};
        }
    }
    throw std::logic_error("no anticommuting logical pair found");
}

Syndrome extract_syndrome(const PauliOperator& error, const CodeLayout& code) {
    if (error.num_qubits() != static_cast<std::size_t>(code.lattice().num_qubits())) {
        throw std::invalid_argument("error length does not match code");
    }
    Syndrome s;
    const auto& ops = code.stabilizer_ops();
    s.bits.resize(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        s.bits[i] = error.commutes_with(ops[i]) ? 0 : 1;
    }
    return s;
}

LogicalEffect is_logical_failure(const PauliOperator& residual, const LogicalPair& logicals,
                                 const CodeLayout& code) {
    if (!extract_syndrome(residual, code).is_trivial()) {
        throw std::invalid_argument("residual has nonzero syndrome");
    }
    const bool x_flip = !residual.commutes_with(logicals.zbar);
    const bool z_flip = !residual.commutes_with(logicals.xbar);
    if (x_flip && z_flip) return LogicalEffect::YbarFlip;
    if (x_flip) return LogicalEffect::XbarFlip;
    if (z_flip) return LogicalEffect::ZbarFlip;
    return LogicalEffect::None;
}

nlohmann::json CodeLayout::to_json() const {
    nlohmann::json j;
    j["lattice"] = {{"d1", lattice_->spec().d1},
                    {"d2", lattice_->spec().d2},
                    {"layout", cdsurf::to_string(lattice_->spec().layout)}};
    j["family"] = cdsurf::to_string(family_);
    nlohmann::json stabs = nlohmann::json::array();
    for (const auto& s : lattice_->stabilizers()) {
        std::string letters;
        for (int q : s.support) letters.push_back(pauli_char(sublattice_letter(q, s.sublattice)));
        stabs.push_back({{"id", s.id},
                         {"sublattice", cdsurf::to_string(s.sublattice)},
                         {"qubits", s.support},
                         {"letters", letters}});
    }
    j["stabilizers"] = std::move(stabs);
    j["logicals"] = {{"xbar", logicals_.xbar.to_string()}, {"zbar", logicals_.zbar.to_string()}};
    return j;
}

CodeLayout CodeLayout::from_json(const nlohmann::json& j) {
    LatticeSpec spec;
    spec.d1 = j.at("lattice").at("d1").get<int>();
    spec.d2 = j.at("lattice").at("d2").get<int>();
    spec.layout = layout_from_string(j.at("lattice").at("layout").get<std::string>());
    auto lattice = build_lattice(spec);

    const int n = lattice->num_qubits();
    std::vector<Pauli> v(n, Pauli::I), h(n, Pauli::I);
    for (const auto& entry : j.at("stabilizers")) {
        const int sid = entry.at("id").get<int>();
        const auto qubits = entry.at("qubits").get<std::vector<int>>();
        const auto letters = entry.at("letters").get<std::string>();
        if (qubits.size() != letters.size()) throw std::invalid_argument("assignment size mismatch");
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            const int q = qubits[k];
            const Pauli p = pauli_from_char(letters[k]);
            const auto& adj = lattice->adjacency(q);
            const bool in_v = adj.v[0] == sid || adj.v[1] == sid;
            const bool in_h = adj.h[0] == sid || adj.h[1] == sid;
            if (!in_v && !in_h) throw std::invalid_argument("stabilizer not adjacent to qubit");
            auto& slot = in_v ? v[q] : h[q];
            if (slot != Pauli::I && slot != p) throw std::invalid_argument("conflicting assignment");
            slot = p;
        }
    }
    return CodeLayout(std::move(lattice), family_from_string(j.at("family").get<std::string>()),
                      std::move(v), std::move(h));
}

}  // namespace cdsurf
