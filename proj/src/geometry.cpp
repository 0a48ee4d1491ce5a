#include "cdsurf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>

namespace cdsurf {

std::string to_string(Layout layout) {
    return layout == Layout::NonRotated ? "nonrotated" : "rotated";
}

Layout layout_from_string(const std::string& s) {
    if (s == "nonrotated") return Layout::NonRotated;
    if (s == "rotated") return Layout::Rotated;
    throw std::invalid_argument("unknown layout '" + s + "'");
}

std::string to_string(Sublattice s) { return s == Sublattice::Primal ? "primal" : "dual"; }

Lattice::Lattice(const LatticeSpec& spec) : spec_(spec) {
    if (spec.d1 < 2 || spec.d2 < 2) {
        throw std::invalid_argument("lattice requires d1 >= 2 and d2 >= 2");
    }
    if (spec.layout == Layout::NonRotated) {
        build_nonrotated();
    } else {
        build_rotated();
    }
    finish_build();
}

// Non-rotated layout on the doubled grid x in [0, 2(d1-1)], z in [0, 2(d2-1)]:
// qubits occupy the (even,even) vertex and (odd,odd) face positions, plaquette
// (primal) checks sit at (odd,even), star (dual) checks at (even,odd). A
// check acts on its <=4 grid neighbors. Logical X-type chains run left-right
// through vertex rows, so primal defect chains terminate on the left/right
// edges and dual chains on top/bottom.
void Lattice::build_nonrotated() {
    const int xmax = 2 * (spec_.d1 - 1);
    const int zmax = 2 * (spec_.d2 - 1);

    std::vector<std::vector<int>> qubit_at(static_cast<std::size_t>(xmax + 1),
                                           std::vector<int>(static_cast<std::size_t>(zmax + 1), kNone));
    for (int z = 0; z <= zmax; ++z) {
        for (int x = 0; x <= xmax; ++x) {
            const bool vertex = (x % 2 == 0) && (z % 2 == 0);
            const bool face = (x % 2 == 1) && (z % 2 == 1);
            if (!vertex && !face) continue;
            const int id = static_cast<int>(qubits_.size());
            qubit_at[x][z] = id;
            qubits_.push_back({id, {x, z}});
        }
    }

    auto add_stab = [&](int x, int z, Sublattice sub, Coord grid) {
        StabilizerSite s;
        s.id = static_cast<int>(stabs_.size());
        s.sublattice = sub;
        s.coord = {x, z};
        s.grid = grid;
        for (auto [nx, nz] : {std::pair{x - 1, z}, {x + 1, z}, {x, z - 1}, {x, z + 1}}) {
            if (nx < 0 || nz < 0 || nx > xmax || nz > zmax) continue;
            if (qubit_at[nx][nz] != kNone) s.support.push_back(qubit_at[nx][nz]);
        }
        std::sort(s.support.begin(), s.support.end());
        stabs_.push_back(std::move(s));
    };

    for (int z = 0; z <= zmax; ++z) {
        for (int x = 0; x <= xmax; ++x) {
            if (x % 2 == 1 && z % 2 == 0) {
                add_stab(x, z, Sublattice::Primal, {(x - 1) / 2, z / 2});
            } else if (x % 2 == 0 && z % 2 == 1) {
                add_stab(x, z, Sublattice::Dual, {x / 2, (z - 1) / 2});
            }
        }
    }

    std::vector<std::vector<int>> stab_at(static_cast<std::size_t>(xmax + 1),
                                          std::vector<int>(static_cast<std::size_t>(zmax + 1), kNone));
    for (const auto& s : stabs_) stab_at[s.coord.x][s.coord.z] = s.id;

    adj_.resize(qubits_.size());
    for (const auto& q : qubits_) {
        auto& a = adj_[q.id];
        int nv = 0, nh = 0;
        for (int dz : {-1, 1}) {
            const int z = q.coord.z + dz;
            if (z >= 0 && z <= zmax && stab_at[q.coord.x][z] != kNone) a.v[nv++] = stab_at[q.coord.x][z];
        }
        for (int dx : {-1, 1}) {
            const int x = q.coord.x + dx;
            if (x >= 0 && x <= xmax && stab_at[x][q.coord.z] != kNone) a.h[nh++] = stab_at[x][q.coord.z];
        }
        const bool vertex = q.coord.x % 2 == 0;
        a.v_sublattice = vertex ? Sublattice::Dual : Sublattice::Primal;
    }

    // Two-qubit error carriers: vertex-face diagonal pairs.
    for (const auto& q : qubits_) {
        if (q.coord.x % 2 == 0) continue;  // enumerate from face qubits
        for (int dx : {-1, 1}) {
            for (int dz : {-1, 1}) {
                const int nx = q.coord.x + dx, nz = q.coord.z + dz;
                if (nx < 0 || nz < 0 || nx > xmax || nz > zmax) continue;
                const int nq = qubit_at[nx][nz];
                if (nq != kNone) pair_edges_.emplace_back(std::min(q.id, nq), std::max(q.id, nq));
            }
        }
    }
}

// Rotated layout: data qubits at (2i+1, 2j+1) for i in [0,d1), j in [0,d2);
// checks at (2a, 2b) with a in [0,d1], b in [0,d2]. Checks with a+b odd are
// dual (X-type in the CSS reference) and are dropped on the left/right
// columns, checks with a+b even are primal and are dropped on the top/bottom
// rows, leaving d1*d2 - 1 stabilizers of weight 2 or 4.
void Lattice::build_rotated() {
    const int d1 = spec_.d1, d2 = spec_.d2;

    std::vector<std::vector<int>> qubit_at(static_cast<std::size_t>(d1),
                                           std::vector<int>(static_cast<std::size_t>(d2), kNone));
    for (int j = 0; j < d2; ++j) {
        for (int i = 0; i < d1; ++i) {
            const int id = static_cast<int>(qubits_.size());
            qubit_at[i][j] = id;
            qubits_.push_back({id, {2 * i + 1, 2 * j + 1}});
        }
    }

    std::vector<std::vector<int>> stab_at(static_cast<std::size_t>(d1 + 1),
                                          std::vector<int>(static_cast<std::size_t>(d2 + 1), kNone));
    for (int b = 0; b <= d2; ++b) {
        for (int a = 0; a <= d1; ++a) {
            const bool dual = (a + b) % 2 == 1;
            if (dual && (a == 0 || a == d1)) continue;
            if (!dual && (b == 0 || b == d2)) continue;
            StabilizerSite s;
            s.sublattice = dual ? Sublattice::Dual : Sublattice::Primal;
            s.coord = {2 * a, 2 * b};
            s.grid = dual ? Coord{(a + b - 1) / 2, (a - b - 1) / 2} : Coord{(a + b) / 2, (a - b) / 2};
            for (int i : {a - 1, a}) {
                for (int j : {b - 1, b}) {
                    if (i < 0 || j < 0 || i >= d1 || j >= d2) continue;
                    s.support.push_back(qubit_at[i][j]);
                }
            }
            if (s.support.size() < 2) continue;
            std::sort(s.support.begin(), s.support.end());
            s.id = static_cast<int>(stabs_.size());
            stab_at[a][b] = s.id;
            stabs_.push_back(std::move(s));
        }
    }

    adj_.resize(qubits_.size());
    for (int j = 0; j < d2; ++j) {
        for (int i = 0; i < d1; ++i) {
            auto& a = adj_[qubit_at[i][j]];
            int nv = 0, nh = 0;
            // Diagonal pair (i,j)/(i+1,j+1) plays the vertical role, the
            // other diagonal the horizontal one.
            for (auto [ca, cb] : {std::pair{i, j}, {i + 1, j + 1}}) {
                if (stab_at[ca][cb] != kNone) a.v[nv++] = stab_at[ca][cb];
            }
            for (auto [ca, cb] : {std::pair{i + 1, j}, {i, j + 1}}) {
                if (stab_at[ca][cb] != kNone) a.h[nh++] = stab_at[ca][cb];
            }
            a.v_sublattice = (i + j) % 2 == 1 ? Sublattice::Dual : Sublattice::Primal;
            if (nv == 0 || nh == 0) throw std::logic_error("rotated qubit missing a stabilizer group");
        }
    }

    for (int j = 0; j < d2; ++j) {
        for (int i = 0; i < d1; ++i) {
            if (i + 1 < d1) pair_edges_.emplace_back(qubit_at[i][j], qubit_at[i + 1][j]);
            if (j + 1 < d2) pair_edges_.emplace_back(qubit_at[i][j], qubit_at[i][j + 1]);
        }
    }
}

void Lattice::finish_build() {
    for (auto& s : stabs_) s.local = kNone;

    for (int si = 0; si < 2; ++si) {
        auto& g = sub_[si];
        for (auto& s : stabs_) {
            if (static_cast<int>(s.sublattice) != si) continue;
            s.local = static_cast<int>(g.stab_ids.size());
            g.stab_ids.push_back(s.id);
        }
    }

    // Detector edges: per qubit, the 1-2 stabilizers of each sub-lattice that
    // flip when the qubit carries an anticommuting error.
    for (const auto& q : qubits_) {
        const auto& a = adj_[q.id];
        for (int si = 0; si < 2; ++si) {
            const auto& group = (static_cast<int>(a.v_sublattice) == si) ? a.v : a.h;
            DetectorEdge e;
            e.qubit = q.id;
            if (group[0] != kNone) e.a = stabs_[group[0]].local;
            if (group[1] != kNone) e.b = stabs_[group[1]].local;
            if (e.a == kNone && e.b == kNone) throw std::logic_error("qubit with empty stabilizer group");
            if (e.a == kNone) std::swap(e.a, e.b);
            sub_[si].edges.push_back(e);
        }
    }

    for (int si = 0; si < 2; ++si) {
        auto& g = sub_[si];
        const int n = g.size();
        g.adjacency.assign(n, {});
        edge_lookup_[si].assign(static_cast<std::size_t>(n) * n, kNone);
        boundary_edge_[si].assign(n, kNone);
        for (int ei = 0; ei < static_cast<int>(g.edges.size()); ++ei) {
            const auto& e = g.edges[ei];
            g.adjacency[e.a].push_back(ei);
            if (e.b == DetectorEdge::kBoundary) {
                auto& slot = boundary_edge_[si][e.a];
                if (slot == kNone || e.qubit < g.edges[slot].qubit) slot = ei;
            } else {
                g.adjacency[e.b].push_back(ei);
                auto& fwd = edge_lookup_[si][static_cast<std::size_t>(e.a) * n + e.b];
                auto& bwd = edge_lookup_[si][static_cast<std::size_t>(e.b) * n + e.a];
                if (fwd != kNone) throw std::logic_error("duplicate detector edge");
                fwd = bwd = e.qubit;
            }
        }

        // Multi-source BFS from the boundary gives chain-step distances.
        constexpr int kInf = std::numeric_limits<int>::max();
        g.boundary_steps.assign(n, kInf);
        std::deque<int> queue;
        for (int v = 0; v < n; ++v) {
            if (boundary_edge_[si][v] != kNone) {
                g.boundary_steps[v] = 1;
                queue.push_back(v);
            }
        }
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int ei : g.adjacency[v]) {
                const auto& e = g.edges[ei];
                if (e.b == DetectorEdge::kBoundary) continue;
                const int w = e.a == v ? e.b : e.a;
                if (g.boundary_steps[w] > g.boundary_steps[v] + 1) {
                    g.boundary_steps[w] = g.boundary_steps[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            if (g.boundary_steps[v] == kInf) throw std::logic_error("stabilizer cannot reach boundary");
        }

        // Canonical boundary displacement: walk downhill, horizontal steps first.
        g.boundary_disp.assign(n, {});
        for (int v = 0; v < n; ++v) {
            int cur = v;
            Displacement d;
            while (g.boundary_steps[cur] > 1) {
                int best = kNone, best_dx = 0, best_dz = 0;
                for (int ei : g.adjacency[cur]) {
                    const auto& e = g.edges[ei];
                    if (e.b == DetectorEdge::kBoundary) continue;
                    const int w = e.a == cur ? e.b : e.a;
                    if (g.boundary_steps[w] != g.boundary_steps[cur] - 1) continue;
                    const auto& gc = stabs_[g.stab_ids[cur]].grid;
                    const auto& gw = stabs_[g.stab_ids[w]].grid;
                    const int dx = std::abs(gw.x - gc.x), dz = std::abs(gw.z - gc.z);
                    if (best == kNone || dx > best_dx || (dx == best_dx && w < best)) {
                        best = w;
                        best_dx = dx;
                        best_dz = dz;
                    }
                }
                d.lx += best_dx;
                d.lz += best_dz;
                cur = best;
            }
            // Final hop across the boundary edge; attribute it to the axis the
            // walk was moving along (horizontal for primal/dual chains that
            // exit sideways, vertical otherwise).
            const auto& e = g.edges[boundary_edge_[si][cur]];
            const auto& qc = qubits_[e.qubit].coord;
            const auto& sc = stabs_[g.stab_ids[cur]].coord;
            if (std::abs(qc.x - sc.x) >= std::abs(qc.z - sc.z)) {
                d.lx += 1;
            } else {
                d.lz += 1;
            }
            g.boundary_disp[v] = d;
        }

        // Dense all-pairs chain-step distances via BFS from every stabilizer.
        g.step_dist.assign(static_cast<std::size_t>(n) * n, std::numeric_limits<std::uint16_t>::max());
        std::vector<int> dist(n);
        for (int src = 0; src < n; ++src) {
            std::fill(dist.begin(), dist.end(), kInf);
            dist[src] = 0;
            queue.clear();
            queue.push_back(src);
            while (!queue.empty()) {
                const int v = queue.front();
                queue.pop_front();
                for (int ei : g.adjacency[v]) {
                    const auto& e = g.edges[ei];
                    if (e.b == DetectorEdge::kBoundary) continue;
                    const int w = e.a == v ? e.b : e.a;
                    if (dist[w] > dist[v] + 1) {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            for (int v = 0; v < n; ++v) {
                // Disconnected pairs (possible at d = 2) keep the sentinel;
                // such defects are absorbed through the boundary instead.
                if (dist[v] == kInf) continue;
                g.step_dist[static_cast<std::size_t>(src) * n + v] = static_cast<std::uint16_t>(dist[v]);
            }
        }
    }

    std::sort(pair_edges_.begin(), pair_edges_.end());
    pair_edges_.erase(std::unique(pair_edges_.begin(), pair_edges_.end()), pair_edges_.end());
}

int Lattice::edge_qubit(Sublattice s, int local_a, int local_b) const {
    const int n = sub_[static_cast<int>(s)].size();
    return edge_lookup_[static_cast<int>(s)][static_cast<std::size_t>(local_a) * n + local_b];
}

int Lattice::boundary_edge_qubit(Sublattice s, int local_a) const {
    const int ei = boundary_edge_[static_cast<int>(s)][local_a];
    return ei == kNone ? kNone : sub_[static_cast<int>(s)].edges[ei].qubit;
}

Displacement Lattice::displacement(const StabilizerSite& a, const StabilizerSite& b) const {
    if (a.sublattice != b.sublattice) {
        throw std::invalid_argument("displacement requires stabilizers of one sub-lattice");
    }
    return {std::abs(a.grid.x - b.grid.x), std::abs(a.grid.z - b.grid.z)};
}

Displacement Lattice::boundary_distance(const StabilizerSite& a) const {
    return graph(a.sublattice).boundary_disp[a.local];
}

std::shared_ptr<const Lattice> build_lattice(const LatticeSpec& spec) {
    return std::make_shared<const Lattice>(spec);
}

LatticeSpec matched_rectangle(int d, double aspect) {
    if (d < 2) throw std::invalid_argument("matched_rectangle requires d >= 2");
    if (!(aspect > 0.0)) throw std::invalid_argument("aspect must be positive");
    const long target = static_cast<long>(d) * d + static_cast<long>(d - 1) * (d - 1);
    const int limit = 4 * d + 4;
    const double log_aspect = std::log(aspect);

    LatticeSpec best{};
    long best_gap = std::numeric_limits<long>::max();
    double best_ratio_err = std::numeric_limits<double>::infinity();
    for (int d1 = 2; d1 <= limit; ++d1) {
        for (int d2 = 2; d2 <= limit; ++d2) {
            const long count = static_cast<long>(d1) * d2 + static_cast<long>(d1 - 1) * (d2 - 1);
            if (count > target + 1) continue;
            const long gap = std::labs(count - target);
            const double ratio_err = std::abs(std::log(static_cast<double>(d1) / d2) - log_aspect);
            const bool better = gap < best_gap ||
                                (gap == best_gap && ratio_err < best_ratio_err - 1e-12) ||
                                (gap == best_gap && std::abs(ratio_err - best_ratio_err) <= 1e-12 && d2 > best.d2);
            if (better) {
                best = {d1, d2, Layout::NonRotated};
                best_gap = gap;
                best_ratio_err = ratio_err;
            }
        }
    }
    return best;
}

Displacement stabilizer_displacement(const Lattice& lattice, int stab_a, int stab_b) {
    return lattice.displacement(lattice.stabilizer(stab_a), lattice.stabilizer(stab_b));
}

Displacement boundary_distance(const Lattice& lattice, int stab) {
    return lattice.boundary_distance(lattice.stabilizer(stab));
}

}  // namespace cdsurf
