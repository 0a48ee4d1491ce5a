#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cdsurf {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 3, Z = 2 };
// Encoding: bit0 = x component, bit1 = z component, so products compose by XOR.

constexpr bool has_x(Pauli p) { return static_cast<std::uint8_t>(p) & 1u; }
constexpr bool has_z(Pauli p) { return static_cast<std::uint8_t>(p) & 2u; }

constexpr Pauli pauli_product(Pauli a, Pauli b) {
    return static_cast<Pauli>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}

// Two single-qubit Paulis anticommute iff both are non-identity and distinct.
constexpr bool pauli_commutes(Pauli a, Pauli b) {
    return a == Pauli::I || b == Pauli::I || a == b;
}

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

// N-qubit Pauli operator in binary-symplectic form, phases dropped: the
// decoder and failure statistics only ever consult commutation classes.
class PauliOperator {
  public:
    PauliOperator() = default;
    explicit PauliOperator(std::size_t num_qubits);

    static PauliOperator identity(std::size_t num_qubits) { return PauliOperator(num_qubits); }
    static PauliOperator single(std::size_t num_qubits, std::size_t qubit, Pauli p);
    static PauliOperator from_string(std::string_view s);

    std::size_t num_qubits() const { return n_; }

    Pauli get(std::size_t q) const {
        const std::uint8_t x = (x_[q >> 6] >> (q & 63)) & 1u;
        const std::uint8_t z = (z_[q >> 6] >> (q & 63)) & 1u;
        return static_cast<Pauli>(x | (z << 1));
    }
    void set(std::size_t q, Pauli p);
    // XORs p onto qubit q (i.e. multiplies by the single-qubit operator).
    void apply(std::size_t q, Pauli p);

    PauliOperator& operator*=(const PauliOperator& other);
    friend PauliOperator operator*(PauliOperator a, const PauliOperator& b) { return a *= b; }

    bool commutes_with(const PauliOperator& other) const;

    std::size_t weight() const;
    bool is_identity() const;
    std::vector<std::size_t> support() const;

    std::string to_string() const;

    bool operator==(const PauliOperator&) const = default;

    const std::vector<std::uint64_t>& x_words() const { return x_; }
    const std::vector<std::uint64_t>& z_words() const { return z_; }

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> x_;
    std::vector<std::uint64_t> z_;
};

// Symplectic commutation test; throws on length mismatch.
bool commutes(const PauliOperator& a, const PauliOperator& b);

struct Syndrome {
    std::vector<std::uint8_t> bits;

    bool is_trivial() const {
        for (auto b : bits)
            if (b) return false;
        return true;
    }
    std::size_t defect_count() const {
        std::size_t c = 0;
        for (auto b : bits) c += b;
        return c;
    }
    bool operator==(const Syndrome&) const = default;
};

struct LogicalPair {
    PauliOperator xbar;
    PauliOperator zbar;
};

enum class LogicalEffect { None, XbarFlip, ZbarFlip, YbarFlip };

std::string to_string(LogicalEffect e);

}  // namespace cdsurf
