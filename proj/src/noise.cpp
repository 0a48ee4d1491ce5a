#include "cdsurf/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdsurf/code.hpp"
#include "cdsurf/rng.hpp"

namespace cdsurf {

std::string to_string(PairKind k) { return k == PairKind::XX_ZZ ? "xx_zz" : "xz"; }

std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::IID: return "iid";
        case NoiseKind::Toy: return "toy";
        case NoiseKind::Gaussian: return "gaussian";
    }
    return "?";
}

NoiseModel::NoiseModel(std::vector<QubitRates> per_qubit, NoiseDescriptor desc,
                       std::optional<PairChannel> pair)
    : per_qubit_(std::move(per_qubit)), desc_(desc), pair_(pair) {
    for (const auto& r : per_qubit_) {
        if (r.x < 0 || r.y < 0 || r.z < 0 || r.total() > 1.0 + 1e-12) {
            throw std::invalid_argument("qubit rates must be nonnegative with total <= 1");
        }
    }
    if (pair_) {
        if (pair_->p2 < 0 || pair_->p2 > 1) throw std::invalid_argument("p2 must be a probability");
        if (pair_->pxx < 0 || pair_->pxx > 1) throw std::invalid_argument("pxx must be a probability");
    }
}

NoiseModel NoiseModel::with_pair_channel(PairChannel pair) const {
    return NoiseModel(per_qubit_, desc_, pair);
}

double NoiseModel::mean_rate() const {
    double sum = 0.0;
    for (const auto& r : per_qubit_) sum += r.total();
    return per_qubit_.empty() ? 0.0 : sum / static_cast<double>(per_qubit_.size());
}

BiasFractions depolarizing_bias() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

BiasFractions eta_bias(double eta) {
    if (eta <= 0) throw std::invalid_argument("eta must be positive");
    const double denom = 2.0 + eta;
    return {1.0 / denom, 1.0 / denom, eta / denom};
}

NoiseModel make_iid(double p, const BiasFractions& bias, std::size_t n) {
    if (p < 0 || p > 1) throw std::invalid_argument("p must be a probability");
    const double sum = bias.rx + bias.ry + bias.rz;
    if (std::abs(sum - 1.0) > 1e-9 || bias.rx < 0 || bias.ry < 0 || bias.rz < 0) {
        throw std::invalid_argument("bias fractions must be nonnegative and sum to 1");
    }
    std::vector<QubitRates> rates(n, {p * bias.rx, p * bias.ry, p * bias.rz});
    return NoiseModel(std::move(rates), {NoiseKind::IID, p, 0.0, 0.0, 0});
}

NoiseModel make_toy_permutation(double l, double m, double h, std::size_t n, std::uint64_t seed) {
    if (!(l <= m && m <= h)) throw std::invalid_argument("toy model requires l <= m <= h");
    if (l < 0 || l + m + h > 1.0) throw std::invalid_argument("toy rates must form a probability");
    Rng rng(mix_seed(seed, 0x746f79ULL));
    std::vector<QubitRates> rates(n);
    const double vals[3] = {l, m, h};
    for (auto& r : rates) {
        int perm[3] = {0, 1, 2};
        // Fisher-Yates over the three slots.
        for (int i = 2; i > 0; --i) {
            const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[i], perm[j]);
        }
        r.x = vals[perm[0]];
        r.y = vals[perm[1]];
        r.z = vals[perm[2]];
    }
    return NoiseModel(std::move(rates), {NoiseKind::Toy, l + m + h, 0.0, 0.0, seed});
}

namespace {

// Truncated normal by rejection, matching the stated truncation at 0 and 1.
double truncated_normal(Rng& rng, double mean, double sigma) {
    if (sigma == 0.0) return std::clamp(mean, 0.0, 1.0);
    for (;;) {
        const double v = mean + sigma * rng.next_normal();
        if (v >= 0.0 && v <= 1.0) return v;
    }
}

}  // namespace

NoiseModel make_gaussian(double p, double sigma_p, double sigma_tot, std::size_t n, std::uint64_t seed) {
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
    if (p == 0 && sigma_tot > 0) throw std::invalid_argument("p = 0 with sigma_tot > 0 is degenerate");
    if (sigma_p < 0 || sigma_tot < 0) throw std::invalid_argument("sigmas must be nonnegative");
    Rng rng(mix_seed(seed, 0x67617573ULL));
    std::vector<QubitRates> rates(n);
    for (auto& r : rates) {
        double pk[3];
        double sum = 0.0;
        for (double& v : pk) {
            v = truncated_normal(rng, 0.5, sigma_p);
            sum += v;
        }
        while (sum == 0.0) {  // all-zero draw has measure zero but guard anyway
            sum = pk[0] = truncated_normal(rng, 0.5, sigma_p);
        }
        const double pi = truncated_normal(rng, p, p * sigma_tot);
        r.x = pi * pk[0] / sum;
        r.y = pi * pk[1] / sum;
        r.z = pi * pk[2] / sum;
    }
    return NoiseModel(std::move(rates), {NoiseKind::Gaussian, p, sigma_p, sigma_tot, seed});
}

void sample_error_into(const NoiseModel& model, const Lattice& lattice, std::uint64_t trial_seed,
                       std::vector<std::uint8_t>& letters, std::vector<int>& hits) {
    const int n = lattice.num_qubits();
    if (model.num_qubits() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("noise model size does not match lattice");
    }
    letters.assign(n, 0);
    hits.clear();

    Rng rng(mix_seed(trial_seed, 0x657272ULL));
    for (int q = 0; q < n; ++q) {
        const auto& r = model.rates(q);
        if (r.x == 0 && r.y == 0 && r.z == 0) {
            continue;
        }
        const double u = rng.next_double();
        Pauli p = Pauli::I;
        if (u < r.x) {
            p = Pauli::X;
        } else if (u < r.x + r.y) {
            p = Pauli::Y;
        } else if (u < r.x + r.y + r.z) {
            p = Pauli::Z;
        }
        if (p != Pauli::I) letters[q] = static_cast<std::uint8_t>(p);
    }

    if (model.pair_channel() && model.pair_channel()->p2 > 0) {
        const auto& pc = *model.pair_channel();
        Rng prng(mix_seed(trial_seed, 0x70616972ULL));
        for (const auto& [qa, qb] : lattice.neighbor_pairs()) {
            if (prng.next_double() >= pc.p2) continue;
            Pauli pa, pb;
            if (pc.kind == PairKind::XX_ZZ) {
                const bool xx = prng.next_double() < pc.pxx;
                pa = pb = xx ? Pauli::X : Pauli::Z;
            } else {
                const bool forward = prng.next_double() < 0.5;
                pa = forward ? Pauli::X : Pauli::Z;
                pb = forward ? Pauli::Z : Pauli::X;
            }
            letters[qa] = static_cast<std::uint8_t>(pauli_product(static_cast<Pauli>(letters[qa]), pa));
            letters[qb] = static_cast<std::uint8_t>(pauli_product(static_cast<Pauli>(letters[qb]), pb));
        }
    }

    for (int q = 0; q < n; ++q) {
        if (letters[q]) hits.push_back(q);
    }
}

ErrorSample sample_error(const NoiseModel& model, const Lattice& lattice, std::uint64_t trial_seed) {
    std::vector<std::uint8_t> letters;
    std::vector<int> hits;
    sample_error_into(model, lattice, trial_seed, letters, hits);
    PauliOperator op(lattice.num_qubits());
    for (int q : hits) op.set(q, static_cast<Pauli>(letters[q]));
    return {std::move(op), trial_seed};
}

double sublattice_flip_probability(const NoiseModel& model, int qubit, const CodeLayout& code,
                                   Sublattice sublattice) {
    const Pauli measured = code.sublattice_letter(qubit, sublattice);
    const auto& r = model.rates(qubit);
    double p = 0.0;
    if (!pauli_commutes(Pauli::X, measured)) p += r.x;
    if (!pauli_commutes(Pauli::Y, measured)) p += r.y;
    if (!pauli_commutes(Pauli::Z, measured)) p += r.z;
    return p;
}

}  // namespace cdsurf
