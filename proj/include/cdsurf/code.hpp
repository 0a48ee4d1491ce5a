#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cdsurf/geometry.hpp"
#include "cdsurf/pauli.hpp"

#include "json.hpp"

namespace cdsurf {

class NoiseModel;

enum class CodeFamily { CSS, XY, XZZX, XXZZ, MHHM, MMHH, Custom };

std::string to_string(CodeFamily f);
CodeFamily family_from_string(const std::string& s);

// A consistent Clifford deformation of the surface code, stored as the letter
// each of a qubit's two stabilizer groups measures on it. Group V holds the
// vertically adjacent checks, group H the horizontal ones; the consistency
// condition is v != h at every qubit, which makes all stabilizers commute.
class CodeLayout {
  public:
    CodeLayout(std::shared_ptr<const Lattice> lattice, CodeFamily family,
               std::vector<Pauli> v_letters, std::vector<Pauli> h_letters, bool full_checks = true);

    const Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
    CodeFamily family() const { return family_; }

    Pauli v_letter(int qubit) const { return v_[qubit]; }
    Pauli h_letter(int qubit) const { return h_[qubit]; }

    // Letter measured on the qubit by the checks of the given sub-lattice.
    Pauli sublattice_letter(int qubit, Sublattice s) const {
        return lattice_->adjacency(qubit).v_sublattice == s ? v_[qubit] : h_[qubit];
    }
    // Letter of a correction chain through this qubit for the given
    // sub-lattice: flips exactly that sub-lattice's checks here.
    Pauli chain_letter(int qubit, Sublattice s) const { return sublattice_letter(qubit, other(s)); }

    // Assignment map entry (stabilizer id, qubit id) -> measured Pauli.
    Pauli measured_letter(int stab, int qubit) const;

    // Stabilizers as Pauli operators; built on first use and cached.
    const std::vector<PauliOperator>& stabilizer_ops() const;
    const PauliOperator& stabilizer_op(int stab) const { return stabilizer_ops()[stab]; }
    const LogicalPair& logicals() const { return logicals_; }

    nlohmann::json to_json() const;
    static CodeLayout from_json(const nlohmann::json& j);

  private:
    struct OpsCache {
        std::mutex mutex;
        bool built = false;
        std::vector<PauliOperator> ops;
    };

    std::shared_ptr<const Lattice> lattice_;
    CodeFamily family_;
    std::vector<Pauli> v_, h_;
    LogicalPair logicals_;
    std::shared_ptr<OpsCache> ops_cache_;
};

CodeLayout build_css(std::shared_ptr<const Lattice> lattice);
CodeLayout build_xy(std::shared_ptr<const Lattice> lattice);
CodeLayout build_xzzx(std::shared_ptr<const Lattice> lattice);
CodeLayout build_xxzz(std::shared_ptr<const Lattice> lattice);
CodeLayout build_mhhm(std::shared_ptr<const Lattice> lattice, const NoiseModel& noise, bool full_checks = true);
CodeLayout build_mmhh(std::shared_ptr<const Lattice> lattice, const NoiseModel& noise, bool full_checks = true);
CodeLayout build_family(CodeFamily family, std::shared_ptr<const Lattice> lattice,
                        const NoiseModel* noise = nullptr, bool full_checks = true);

// High/medium-rate letters of one qubit; ties resolved in the order X < Y < Z
// with earlier letters taking the higher role.
struct RateOrdering {
    Pauli high;
    Pauli medium;
    Pauli low;
};
RateOrdering rate_ordering(double x, double y, double z);

// Checks the consistency condition on an explicit assignment table
// (letters[s][k] pairs with lattice.stabilizer(s).support[k]).
bool validate_consistency(const Lattice& lattice, const std::vector<std::vector<Pauli>>& letters);
bool validate_consistency(const CodeLayout& code);
std::vector<std::vector<Pauli>> assignment_table(const CodeLayout& code);

// Logical pair via straight boundary-to-boundary chains, validated against
// the stabilizer group. The chains follow the per-qubit group letters, so
// they adapt to noise-dependent deformations automatically.
LogicalPair derive_logicals(const CodeLayout& code);
// Independent derivation by GF(2) linear algebra over the symplectic check
// matrix; throws if the stabilizer rank is not N-1.
LogicalPair derive_logicals_algebraic(const CodeLayout& code);
int stabilizer_rank(const CodeLayout& code);

Syndrome extract_syndrome(const PauliOperator& error, const CodeLayout& code);

// Classification of a syndrome-free residual; throws if the residual has
// nonzero syndrome.
LogicalEffect is_logical_failure(const PauliOperator& residual, const LogicalPair& logicals,
                                 const CodeLayout& code);

}  // namespace cdsurf
