#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdsurf/geometry.hpp"
#include "cdsurf/pauli.hpp"

namespace cdsurf {

class CodeLayout;

struct QubitRates {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double total() const { return x + y + z; }
};

enum class PairKind { XX_ZZ, XZ };
enum class NoiseKind { IID, Toy, Gaussian };

std::string to_string(PairKind k);
std::string to_string(NoiseKind k);

// Correlated two-qubit channel applied independently per nearest-neighbor
// edge with probability p2. XX_ZZ applies X(x)X with conditional probability
// pxx, else Z(x)Z; XZ applies XZ or ZX with probability 1/2 each.
struct PairChannel {
    PairKind kind = PairKind::XX_ZZ;
    double p2 = 0.0;
    double pxx = 0.5;
};

struct NoiseDescriptor {
    NoiseKind kind = NoiseKind::IID;
    double p = 0.0;
    double sigma_p = 0.0;
    double sigma_tot = 0.0;
    std::uint64_t seed = 0;
};

class NoiseModel {
  public:
    NoiseModel(std::vector<QubitRates> per_qubit, NoiseDescriptor desc,
               std::optional<PairChannel> pair = std::nullopt);

    std::size_t num_qubits() const { return per_qubit_.size(); }
    const QubitRates& rates(int qubit) const { return per_qubit_[qubit]; }
    const std::vector<QubitRates>& per_qubit() const { return per_qubit_; }
    const NoiseDescriptor& descriptor() const { return desc_; }
    const std::optional<PairChannel>& pair_channel() const { return pair_; }

    NoiseModel with_pair_channel(PairChannel pair) const;

    double mean_rate() const;

  private:
    std::vector<QubitRates> per_qubit_;
    NoiseDescriptor desc_;
    std::optional<PairChannel> pair_;
};

struct BiasFractions {
    double rx = 1.0 / 3.0;
    double ry = 1.0 / 3.0;
    double rz = 1.0 / 3.0;
};

BiasFractions depolarizing_bias();
// Standard eta = z/x bias with y = x.
BiasFractions eta_bias(double eta);

NoiseModel make_iid(double p, const BiasFractions& bias, std::size_t n);
// Eq.-style toy model: rates {l,m,h} assigned to {x,y,z} by an independent
// uniformly random permutation per qubit.
NoiseModel make_toy_permutation(double l, double m, double h, std::size_t n, std::uint64_t seed);
NoiseModel make_gaussian(double p, double sigma_p, double sigma_tot, std::size_t n, std::uint64_t seed);

struct ErrorSample {
    PauliOperator op;
    std::uint64_t trial_seed = 0;
};

ErrorSample sample_error(const NoiseModel& model, const Lattice& lattice, std::uint64_t trial_seed);

// Writes per-qubit letters (Pauli codes) into `letters` and appends the hit
// qubits to `hits`; the buffers are reused by the trial loop.
void sample_error_into(const NoiseModel& model, const Lattice& lattice, std::uint64_t trial_seed,
                       std::vector<std::uint8_t>& letters, std::vector<int>& hits);

// Probability that an error on the qubit flips the given sub-lattice's
// checks: the summed rates of letters anticommuting with the measured one.
double sublattice_flip_probability(const NoiseModel& model, int qubit, const CodeLayout& code,
                                   Sublattice sublattice);

}  // namespace cdsurf
