#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace cdsurf {

enum class Layout { NonRotated, Rotated };

std::string to_string(Layout layout);
Layout layout_from_string(const std::string& s);

// d1 counts vertices horizontally, d2 vertically; code distance is min(d1,d2).
struct LatticeSpec {
    int d1 = 3;
    int d2 = 3;
    Layout layout = Layout::NonRotated;

    int distance() const { return d1 < d2 ? d1 : d2; }
    bool operator==(const LatticeSpec&) const = default;
};

enum class Sublattice : std::uint8_t { Primal = 0, Dual = 1 };

constexpr Sublattice other(Sublattice s) {
    return s == Sublattice::Primal ? Sublattice::Dual : Sublattice::Primal;
}

std::string to_string(Sublattice s);

struct Coord {
    int x = 0;
    int z = 0;
    bool operator==(const Coord&) const = default;
};

struct SiteIndex {
    int id = -1;
    Coord coord;  // embedding coordinate (doubled integer grid)
};

struct Displacement {
    int lx = 0;
    int lz = 0;
    int manhattan() const { return lx + lz; }
    bool operator==(const Displacement&) const = default;
};

struct StabilizerSite {
    int id = -1;
    Sublattice sublattice = Sublattice::Primal;
    Coord coord;                // embedding coordinate
    Coord grid;                 // decoding-grid coordinate within the sub-lattice
    int local = -1;             // index within the sub-lattice
    std::vector<int> support;   // qubit ids, size 2..4
};

// Detector-graph edge of one sub-lattice: the qubit couples stabilizers a and
// b (local indices), with b == kBoundary for boundary edges.
struct DetectorEdge {
    int qubit = -1;
    int a = -1;
    int b = -1;
    static constexpr int kBoundary = -1;
};

struct SublatticeGraph {
    std::vector<int> stab_ids;               // local index -> global stabilizer id
    std::vector<DetectorEdge> edges;         // one per qubit coupling to this sub-lattice
    std::vector<std::vector<int>> adjacency; // per local stab: incident edge indices
    std::vector<int> boundary_steps;         // per local stab: chain steps to absorbing boundary
    std::vector<Displacement> boundary_disp; // displacement split along one canonical shortest chain
    std::vector<std::uint16_t> step_dist;    // dense local x local chain-step distances
    static constexpr std::uint16_t kUnreachable = 0xFFFF;

    int size() const { return static_cast<int>(stab_ids.size()); }
    std::uint16_t dist(int a, int b) const { return step_dist[static_cast<std::size_t>(a) * stab_ids.size() + b]; }
};

// Static lattice: qubit/stabilizer indexing, sub-lattice detector graphs and
// boundary structure. Immutable after construction; shared across trial
// workers.
class Lattice {
  public:
    static constexpr int kNone = -1;

    explicit Lattice(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    int num_qubits() const { return static_cast<int>(qubits_.size()); }
    int num_stabilizers() const { return static_cast<int>(stabs_.size()); }

    const std::vector<SiteIndex>& qubits() const { return qubits_; }
    const std::vector<StabilizerSite>& stabilizers() const { return stabs_; }
    const StabilizerSite& stabilizer(int id) const { return stabs_[id]; }

    // The two stabilizer groups seen by a qubit: group V collects the checks
    // located vertically from it (the NE/SW diagonal pair on the rotated
    // layout), group H the horizontal (NW/SE) ones. All members of one group
    // belong to one sub-lattice.
    struct QubitAdjacency {
        std::array<int, 2> v{kNone, kNone};
        std::array<int, 2> h{kNone, kNone};
        Sublattice v_sublattice = Sublattice::Dual;  // sub-lattice the V group belongs to
    };
    const QubitAdjacency& adjacency(int qubit) const { return adj_[qubit]; }

    const SublatticeGraph& graph(Sublattice s) const { return sub_[static_cast<int>(s)]; }

    // Unordered nearest-neighbor data-qubit pairs (carriers of two-qubit errors).
    const std::vector<std::pair<int, int>>& neighbor_pairs() const { return pair_edges_; }

    // Qubit coupling stabilizers a and b of one sub-lattice (local ids), or kNone.
    int edge_qubit(Sublattice s, int local_a, int local_b) const;
    // Boundary-edge qubit of a stabilizer with boundary_steps == 1 on its side, or kNone.
    int boundary_edge_qubit(Sublattice s, int local_a) const;

    Displacement displacement(const StabilizerSite& a, const StabilizerSite& b) const;
    Displacement boundary_distance(const StabilizerSite& a) const;

  private:
    void build_nonrotated();
    void build_rotated();
    void finish_build();

    LatticeSpec spec_;
    std::vector<SiteIndex> qubits_;
    std::vector<StabilizerSite> stabs_;
    std::vector<QubitAdjacency> adj_;
    std::array<SublatticeGraph, 2> sub_;
    std::vector<std::pair<int, int>> pair_edges_;
    std::array<std::vector<int>, 2> edge_lookup_;  // dense (local_a * size + local_b) -> qubit
    std::array<std::vector<int>, 2> boundary_edge_;
};

std::shared_ptr<const Lattice> build_lattice(const LatticeSpec& spec);

// Rectangle holding (almost) the same qubit count as the distance-d square,
// with d1/d2 nearest to the requested aspect; ties favor larger d2.
LatticeSpec matched_rectangle(int d, double aspect);

Displacement stabilizer_displacement(const Lattice& lattice, int stab_a, int stab_b);
Displacement boundary_distance(const Lattice& lattice, int stab);

}  // namespace cdsurf
