#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdsurf/code.hpp"
#include "cdsurf/decoder.hpp"
#include "cdsurf/geometry.hpp"
#include "cdsurf/noise.hpp"

#include "json.hpp"

namespace cdsurf {

inline constexpr const char* kVersion = "cdsurf 0.1.0";

// Noise recipe parameterized by the sweep probability p. Non-iid kinds draw a
// fresh disorder realization per trial, so reported rates are
// disorder-averaged.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::IID;
    BiasFractions bias{};                    // iid
    double sigma_p = 0.0, sigma_tot = 0.0;   // gaussian
    double toy_l = 0.0, toy_m = 0.0, toy_h = 1.0;  // toy fractions of the single-qubit rate
    double single_fraction = 1.0;            // share of p carried by the single-qubit channel

    struct Pair {
        PairKind kind = PairKind::XX_ZZ;
        enum class Mode { Fixed, ScaleP, WeightMatched };
        Mode mode = Mode::Fixed;
        double value = 0.0;  // Fixed: p2; ScaleP: p2 = value * p
        double pxx = 0.5;
    };
    std::optional<Pair> pair;

    bool per_trial() const { return kind != NoiseKind::IID; }
    double single_p(double p) const { return single_fraction * p; }
    // Per-edge pair probability at sweep point p. WeightMatched picks p2 so
    // the expected error weight per qubit matches p.
    double pair_p2(double p, const Lattice& lattice) const;

    NoiseModel build(double p, const Lattice& lattice, std::uint64_t seed) const;
};

// Metric recipe; "auto" parameters are resolved from the noise model at each
// sweep point (mean sub-lattice flip probability for p1, per-edge pair rate
// times the orientation share for p2).
struct MetricSpec {
    MetricKind kind = MetricKind::Manhattan;
    std::optional<double> p1;   // explicit value; nullopt = auto
    std::optional<double> p2;
    std::optional<double> wx;   // explicit weighted-Manhattan factors; nullopt = from noise
    std::optional<double> wz;
    bool literal_form = false;

    WeightMetric resolve(const NoiseModel& noise, const CodeLayout& code) const;
    std::string name() const;
};

double mean_flip_probability(const NoiseModel& noise, const CodeLayout& code);

struct ExperimentSpec {
    std::string name = "sweep";
    CodeFamily family = CodeFamily::CSS;
    std::vector<LatticeSpec> lattices;
    std::vector<double> p_values;
    NoiseSpec noise;
    MetricSpec metric;
    long trials = 50000;
    std::uint64_t master_seed = 0;

    nlohmann::json to_json() const;
};

struct PointResult {
    LatticeSpec lattice;
    double p = 0.0;
    double p2 = 0.0;  // resolved per-edge pair probability
    long trials = 0;
    long failures = 0;
    long xbar_failures = 0;
    long zbar_failures = 0;
    long ybar_failures = 0;

    double p_fail() const { return trials ? static_cast<double>(failures) / trials : 0.0; }
    double stderr_() const {
        const double f = p_fail();
        return trials ? std::sqrt(f * (1.0 - f) / trials) : 0.0;
    }
};

struct SweepResult {
    ExperimentSpec spec;
    std::vector<PointResult> points;
    std::string version = kVersion;
    bool completed = true;  // false when aborted mid-run
};

using ProgressFn = std::function<void(const std::string&)>;

SweepResult run_sweep(const ExperimentSpec& spec, int workers = 1, const ProgressFn& progress = nullptr,
                      const std::atomic<bool>* abort = nullptr);

// Persistence: CSV rows plus a JSON manifest with the spec echo and
// per-class tallies.
void write_csv(const SweepResult& result, const std::string& path);
void write_manifest(const SweepResult& result, const std::string& path);

struct CsvRow {
    std::string family;
    std::string metric;
    int d1 = 0, d2 = 0;
    double p = 0, sigma_p = 0, sigma_tot = 0;
    std::string pair_kind;  // "none" when absent
    double p2 = 0;
    long trials = 0, failures = 0;
    double p_fail = 0, stderr_ = 0;
    std::uint64_t seed = 0;
    std::string source;  // originating file, not a CSV column
};

std::vector<CsvRow> read_csv(const std::string& path);
std::vector<CsvRow> read_csv_dir(const std::string& dir);

// Fig. 13-style comparison: layout x error kind, Manhattan vs degeneracy
// weights on the CSS pattern with XX/ZZ pair errors.
struct DegeneracyStudyRow {
    Layout layout;
    bool pair_errors = false;
    int d = 0;
    double p = 0;
    double p_fail_manhattan = 0, stderr_manhattan = 0;
    double p_fail_degeneracy = 0, stderr_degeneracy = 0;
};

std::vector<ExperimentSpec> degeneracy_study_specs(const std::vector<int>& distances, long trials,
                                                   std::uint64_t master_seed);
std::vector<DegeneracyStudyRow> degeneracy_study(const std::vector<int>& distances, long trials,
                                                 std::uint64_t master_seed, int workers = 1,
                                                 const ProgressFn& progress = nullptr);

}  // namespace cdsurf
