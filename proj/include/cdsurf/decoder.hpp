#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cdsurf/code.hpp"
#include "cdsurf/geometry.hpp"
#include "cdsurf/matching.hpp"
#include "cdsurf/noise.hpp"
#include "cdsurf/pauli.hpp"

namespace cdsurf {

enum class MetricKind { Manhattan, WeightedManhattan, Dijkstra, Degeneracy, DegeneracyCorrelation };

// Edge-weight rule for the matching graph. Log-based metrics take their
// probabilities in (0,1); all produced weights are finite and nonnegative.
struct WeightMetric {
    MetricKind kind = MetricKind::Manhattan;
    double wx = 1.0;            // WeightedManhattan horizontal log-weight
    double wz = 1.0;            // WeightedManhattan vertical log-weight
    double p1 = 0.0;            // Degeneracy / DegeneracyCorrelation chain-step probability
    double p2 = 0.0;            // DegeneracyCorrelation diagonal-step probability
    bool literal_form = false;  // degeneracy weight without the -ln(p1) scale

    static WeightMetric manhattan();
    static WeightMetric weighted_manhattan(double wx, double wz);
    // Averaged weighted Manhattan: wx = -ln<p_h>, wz = -ln<p_m> with the
    // high/medium rates averaged over all qubits.
    static WeightMetric weighted_manhattan_from_noise(const NoiseModel& noise);
    static WeightMetric dijkstra();
    static WeightMetric degeneracy(double p1, bool literal_form = false);
    static WeightMetric degeneracy_correlation(double p1, double p2);

    std::string name() const;
};

// Closed-form chain weights shared by the decoder and the public edge_weight.
double chain_weight(const WeightMetric& metric, int lx, int lz);
double boundary_chain_weight(const WeightMetric& metric, const Displacement& disp);

// Weight between two stabilizers of one sub-lattice (Dijkstra consults the
// noise model); `noise` may be null for the noise-free metrics.
double edge_weight(const WeightMetric& metric, const CodeLayout& code, const NoiseModel* noise,
                   int stab_a, int stab_b);
double edge_weight_to_boundary(const WeightMetric& metric, const CodeLayout& code,
                               const NoiseModel* noise, int stab_a);

// Matching graph of one sub-lattice: nodes 0..k-1 are the defects (ascending
// local index), nodes k..2k-1 their private virtual boundary partners.
// Virtual-virtual edges carry weight 0.
struct MatchingGraph {
    Sublattice sublattice = Sublattice::Primal;
    std::vector<int> defects;  // local stabilizer indices
    std::vector<WeightedEdge> edges;

    int num_nodes() const { return 2 * static_cast<int>(defects.size()); }
};

std::array<MatchingGraph, 2> build_matching_graph(const Syndrome& syndrome, const CodeLayout& code,
                                                  const WeightMetric& metric, const NoiseModel& noise);

struct Correction {
    PauliOperator op;
    // Matched defect pairs as global stabilizer ids; -1 marks the boundary.
    std::vector<std::pair<int, int>> matched_pairs;
};

// Reusable decoding engine for one (code, metric, noise) context. Immutable
// after construction except for internal scratch buffers, so every trial
// owns its instance.
class Decoder {
  public:
    Decoder(const CodeLayout& code, const WeightMetric& metric, const NoiseModel& noise);

    Correction decode(const Syndrome& syndrome);

    // Trial fast path: consumes per-sub-lattice defect lists produced by the
    // incidence-based syndrome accumulation and writes chain letters into
    // `correction_letters` (Pauli codes, XORed in).
    void decode_defects(const std::array<std::vector<int>, 2>& defects,
                        std::vector<std::uint8_t>& correction_letters,
                        std::vector<std::pair<int, int>>* matched_pairs = nullptr);

    const CodeLayout& code() const { return code_; }
    const WeightMetric& metric() const { return metric_; }

  private:
    void prepare_tables();
    double pair_weight(int sub, int ia, int ib) const;    // by defect-list position
    double boundary_weight(int sub, int local) const;
    void run_dijkstra(int sub, const std::vector<int>& defects);
    void apply_chain(int sub, int local_a, int local_b, std::vector<std::uint8_t>& letters);
    void apply_boundary_chain(int sub, int local_a, std::vector<std::uint8_t>& letters);
    void apply_dijkstra_path(int sub, int source_row, int target, std::vector<std::uint8_t>& letters);

    const CodeLayout& code_;
    WeightMetric metric_;
    const NoiseModel& noise_;

    // Closed-form weight tables indexed by displacement, per sub-lattice.
    std::array<std::vector<double>, 2> table_;
    std::array<int, 2> table_cols_{};
    std::array<std::vector<double>, 2> boundary_table_;
    // Dijkstra state: per-edge weights and per-decode distance rows.
    std::array<std::vector<double>, 2> edge_weight_;
    std::array<std::vector<double>, 2> dij_dist_;     // defect-row major, V+1 wide
    std::array<std::vector<int>, 2> dij_parent_;      // incoming edge index per node
    std::array<std::vector<int>, 2> defect_row_;      // local stab -> row in dij arrays

    std::vector<WeightedEdge> scratch_edges_;
    std::vector<std::uint8_t> scratch_letters_;
    int tie_policy_ = 0;
};

// One-shot decode of a syndrome; spec-level convenience around Decoder.
Correction decode(const Syndrome& syndrome, const CodeLayout& code, const WeightMetric& metric,
                  const NoiseModel& noise);

// Writes a matching graph and chosen pairs as an edge-list text dump.
std::string dump_matching_graph(const MatchingGraph& graph,
                                const std::vector<std::pair<int, int>>& chosen);

}  // namespace cdsurf
