#include "cdsurf/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace cdsurf {

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw std::invalid_argument(std::string("invalid Pauli character '") + c + "'");
    }
}

PauliOperator::PauliOperator(std::size_t num_qubits)
    : n_(num_qubits), x_((num_qubits + 63) / 64, 0), z_((num_qubits + 63) / 64, 0) {}

PauliOperator PauliOperator::single(std::size_t num_qubits, std::size_t qubit, Pauli p) {
    PauliOperator op(num_qubits);
    op.set(qubit, p);
    return op;
}

PauliOperator PauliOperator::from_string(std::string_view s) {
    PauliOperator op(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) op.set(i, pauli_from_char(s[i]));
    return op;
}

void PauliOperator::set(std::size_t q, Pauli p) {
    const std::uint64_t mask = 1ULL << (q & 63);
    if (has_x(p))
        x_[q >> 6] |= mask;
    else
        x_[q >> 6] &= ~mask;
    if (has_z(p))
        z_[q >> 6] |= mask;
    else
        z_[q >> 6] &= ~mask;
}

void PauliOperator::apply(std::size_t q, Pauli p) {
    const std::uint64_t mask = 1ULL << (q & 63);
    if (has_x(p)) x_[q >> 6] ^= mask;
    if (has_z(p)) z_[q >> 6] ^= mask;
}

PauliOperator& PauliOperator::operator*=(const PauliOperator& other) {
    if (n_ != other.n_) throw std::invalid_argument("PauliOperator length mismatch");
    for (std::size_t w = 0; w < x_.size(); ++w) {
        x_[w] ^= other.x_[w];
        z_[w] ^= other.z_[w];
    }
    return *this;
}

bool PauliOperator::commutes_with(const PauliOperator& other) const {
    if (n_ != other.n_) throw std::invalid_argument("PauliOperator length mismatch");
    std::uint64_t parity = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) {
        parity ^= std::popcount(x_[w] & other.z_[w]) ^ std::popcount(z_[w] & other.x_[w]);
    }
    return (parity & 1u) == 0;
}

std::size_t PauliOperator::weight() const {
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
    return w;
}

bool PauliOperator::is_identity() const {
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (x_[i] | z_[i]) return false;
    return true;
}

std::vector<std::size_t> PauliOperator::support() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < x_.size(); ++w) {
        std::uint64_t bits = x_[w] | z_[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            out.push_back(w * 64 + static_cast<std::size_t>(b));
            bits &= bits - 1;
        }
    }
    return out;
}

std::string PauliOperator::to_string() const {
    std::string s(n_, 'I');
    for (std::size_t q = 0; q < n_; ++q) s[q] = pauli_char(get(q));
    return s;
}

bool commutes(const PauliOperator& a, const PauliOperator& b) { return a.commutes_with(b); }

std::string to_string(LogicalEffect e) {
    switch (e) {
        case LogicalEffect::None: return "none";
        case LogicalEffect::XbarFlip: return "xbar_flip";
        case LogicalEffect::ZbarFlip: return "zbar_flip";
        case LogicalEffect::YbarFlip: return "ybar_flip";
    }
    return "?";
}

}  // namespace cdsurf
