#include "cdsurf/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "cdsurf/rng.hpp"

namespace cdsurf {

namespace {

constexpr double kMinProb = 1e-15;

void require_prob(double p, const char* what) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
    }
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_sum_exp(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

WeightMetric WeightMetric::manhattan() { return {MetricKind::Manhattan}; }

WeightMetric WeightMetric::weighted_manhattan(double wx, double wz) {
    if (wx < 0 || wz < 0) throw std::invalid_argument("weighted Manhattan factors must be nonnegative");
    WeightMetric m{MetricKind::WeightedManhattan};
    m.wx = wx;
    m.wz = wz;
    return m;
}

WeightMetric WeightMetric::weighted_manhattan_from_noise(const NoiseModel& noise) {
    double ph = 0.0, pm = 0.0;
    const auto& rates = noise.per_qubit();
    if (rates.empty()) throw std::invalid_argument("empty noise model");
    for (const auto& r : rates) {
        double v[3] = {r.x, r.y, r.z};
        std::sort(v, v + 3);
        ph += v[2];
        pm += v[1];
    }
    ph /= static_cast<double>(rates.size());
    pm /= static_cast<double>(rates.size());
    require_prob(ph, "<p_h>");
    require_prob(pm, "<p_m>");
    return weighted_manhattan(-std::log(ph), -std::log(pm));
}

WeightMetric WeightMetric::dijkstra() { return {MetricKind::Dijkstra}; }

WeightMetric WeightMetric::degeneracy(double p1, bool literal_form) {
    require_prob(p1, "p1");
    WeightMetric m{MetricKind::Degeneracy};
    m.p1 = p1;
    m.literal_form = literal_form;
    return m;
}

WeightMetric WeightMetric::degeneracy_correlation(double p1, double p2) {
    require_prob(p1, "p1");
    require_prob(p2, "p2");
    WeightMetric m{MetricKind::DegeneracyCorrelation};
    m.p1 = p1;
    m.p2 = p2;
    return m;
}

std::string WeightMetric::name() const {
    switch (kind) {
        case MetricKind::Manhattan: return "manhattan";
        case MetricKind::WeightedManhattan: return "weighted_manhattan";
        case MetricKind::Dijkstra: return "dijkstra";
        case MetricKind::Degeneracy: return literal_form ? "degeneracy_literal" : "degeneracy";
        case MetricKind::DegeneracyCorrelation: return "degeneracy_correlation";
    }
    return "?";
}

double chain_weight(const WeightMetric& metric, int lx, int lz) {
    const int steps = lx + lz;
    switch (metric.kind) {
        case MetricKind::Manhattan:
            return steps;
        case MetricKind::WeightedManhattan:
            return metric.wx * lx + metric.wz * lz;
        case MetricKind::Degeneracy: {
            const double scale = metric.literal_form ? 1.0 : -std::log(metric.p1);
            return steps * scale - log_binomial(steps, lx);
        }
        case MetricKind::DegeneracyCorrelation: {
            const double log_p1 = log_binomial(steps, lx) + steps * std::log(metric.p1);
            double log_p2 = -std::numeric_limits<double>::infinity();
            if (steps % 2 == 0 && steps > 0) {
                const int lm = std::max(lx, lz);
                log_p2 = log_binomial(lm, steps / 2) + lm * std::log(metric.p2);
            }
            return -log_sum_exp(log_p1, log_p2);
        }
        case MetricKind::Dijkstra:
            throw std::invalid_argument("Dijkstra weights require a noise context");
    }
    return 0.0;
}

double boundary_chain_weight(const WeightMetric& metric, const Displacement& disp) {
    const int steps = disp.manhattan();
    switch (metric.kind) {
        case MetricKind::Manhattan:
            return steps;
        case MetricKind::WeightedManhattan:
            return metric.wx * disp.lx + metric.wz * disp.lz;
        case MetricKind::Degeneracy:
            return steps * (metric.literal_form ? 1.0 : -std::log(metric.p1));
        case MetricKind::DegeneracyCorrelation:
            return -log_sum_exp(steps * std::log(metric.p1), steps * std::log(metric.p2));
        case MetricKind::Dijkstra:
            throw std::invalid_argument("Dijkstra weights require a noise context");
    }
    return 0.0;
}

namespace {

// Single-source Dijkstra over a sub-lattice detector graph; edge weights are
// indexed by the graph's edge list and node V is the boundary sink.
void dijkstra_from(const SublatticeGraph& g, const std::vector<double>& edge_weight, int source,
                   std::vector<double>& dist, std::vector<int>& parent) {
    const int n = g.size();
    dist.assign(n + 1, std::numeric_limits<double>::infinity());
    parent.assign(n + 1, -1);
    dist[source] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, source});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        if (v == n) continue;  // sink has no outgoing edges
        for (int ei : g.adjacency[v]) {
            const auto& e = g.edges[ei];
            const int w = e.b == DetectorEdge::kBoundary ? n : (e.a == v ? e.b : e.a);
            const double nd = d + edge_weight[ei];
            if (nd < dist[w]) {
                dist[w] = nd;
                parent[w] = ei;
                heap.push({nd, w});
            }
        }
    }
}

std::vector<double> sublattice_edge_weights(const CodeLayout& code, const NoiseModel& noise,
                                            Sublattice s) {
    const auto& g = code.lattice().graph(s);
    std::vector<double> w(g.edges.size());
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        double p = sublattice_flip_probability(noise, g.edges[ei].qubit, code, s);
        p = std::clamp(p, kMinProb, 1.0 - kMinProb);
        w[ei] = -std::log(p);
    }
    return w;
}

}  // namespace

double edge_weight(const WeightMetric& metric, const CodeLayout& code, const NoiseModel* noise,
                   int stab_a, int stab_b) {
    const auto& a = code.lattice().stabilizer(stab_a);
    const auto& b = code.lattice().stabilizer(stab_b);
    if (a.sublattice != b.sublattice) {
        throw std::invalid_argument("edge weight requires stabilizers of one sub-lattice");
    }
    if (metric.kind == MetricKind::Dijkstra) {
        if (!noise) throw std::invalid_argument("Dijkstra weights require a noise model");
        const auto& g = code.lattice().graph(a.sublattice);
        const auto w = sublattice_edge_weights(code, *noise, a.sublattice);
        std::vector<double> dist;
        std::vector<int> parent;
        dijkstra_from(g, w, a.local, dist, parent);
        return dist[b.local];
    }
    const auto disp = code.lattice().displacement(a, b);
    return chain_weight(metric, disp.lx, disp.lz);
}

double edge_weight_to_boundary(const WeightMetric& metric, const CodeLayout& code,
                               const NoiseModel* noise, int stab_a) {
    const auto& a = code.lattice().stabilizer(stab_a);
    if (metric.kind == MetricKind::Dijkstra) {
        if (!noise) throw std::invalid_argument("Dijkstra weights require a noise model");
        const auto& g = code.lattice().graph(a.sublattice);
        const auto w = sublattice_edge_weights(code, *noise, a.sublattice);
        std::vector<double> dist;
        std::vector<int> parent;
        dijkstra_from(g, w, a.local, dist, parent);
        return dist[g.size()];
    }
    return boundary_chain_weight(metric, code.lattice().boundary_distance(a));
}

Decoder::Decoder(const CodeLayout& code, const WeightMetric& metric, const NoiseModel& noise)
    : code_(code), metric_(metric), noise_(noise) {
    if (const char* env = std::getenv("CDSURF_TIE")) tie_policy_ = std::atoi(env);
    prepare_tables();
}

void Decoder::prepare_tables() {
    const auto& lat = code_.lattice();
    for (int si = 0; si < 2; ++si) {
        const auto s = static_cast<Sublattice>(si);
        const auto& g = lat.graph(s);
        if (metric_.kind == MetricKind::Dijkstra) {
            edge_weight_[si] = sublattice_edge_weights(code_, noise_, s);
            defect_row_[si].assign(g.size(), -1);
            continue;
        }
        // Displacement-indexed weight table over the sub-lattice grid extent.
        int max_lx = 0, max_lz = 0;
        int min_gx = std::numeric_limits<int>::max(), max_gx = std::numeric_limits<int>::min();
        int min_gz = min_gx, max_gz = max_gx;
        for (int id : g.stab_ids) {
            const auto& st = lat.stabilizer(id);
            min_gx = std::min(min_gx, st.grid.x);
            max_gx = std::max(max_gx, st.grid.x);
            min_gz = std::min(min_gz, st.grid.z);
            max_gz = std::max(max_gz, st.grid.z);
        }
        max_lx = max_gx - min_gx;
        max_lz = max_gz - min_gz;
        table_cols_[si] = max_lz + 1;
        table_[si].assign(static_cast<std::size_t>(max_lx + 1) * (max_lz + 1), 0.0);
        for (int lx = 0; lx <= max_lx; ++lx) {
            for (int lz = 0; lz <= max_lz; ++lz) {
                table_[si][static_cast<std::size_t>(lx) * (max_lz + 1) + lz] = chain_weight(metric_, lx, lz);
            }
        }
        boundary_table_[si].resize(g.size());
        for (int v = 0; v < g.size(); ++v) {
            boundary_table_[si][v] = boundary_chain_weight(metric_, g.boundary_disp[v]);
        }
    }
}

double Decoder::pair_weight(int sub, int local_a, int local_b) const {
    const auto& lat = code_.lattice();
    const auto& g = lat.graph(static_cast<Sublattice>(sub));
    if (metric_.kind == MetricKind::Dijkstra) {
        const int row = defect_row_[sub][local_a];
        return dij_dist_[sub][static_cast<std::size_t>(row) * (g.size() + 1) + local_b];
    }
    const auto& a = lat.stabilizer(g.stab_ids[local_a]);
    const auto& b = lat.stabilizer(g.stab_ids[local_b]);
    const int lx = std::abs(a.grid.x - b.grid.x);
    const int lz = std::abs(a.grid.z - b.grid.z);
    return table_[sub][static_cast<std::size_t>(lx) * table_cols_[sub] + lz];
}

double Decoder::boundary_weight(int sub, int local) const {
    if (metric_.kind == MetricKind::Dijkstra) {
        const auto& g = code_.lattice().graph(static_cast<Sublattice>(sub));
        const int row = defect_row_[sub][local];
        return dij_dist_[sub][static_cast<std::size_t>(row) * (g.size() + 1) + g.size()];
    }
    return boundary_table_[sub][local];
}

void Decoder::run_dijkstra(int sub, const std::vector<int>& defects) {
    const auto& g = code_.lattice().graph(static_cast<Sublattice>(sub));
    const int width = g.size() + 1;
    dij_dist_[sub].assign(static_cast<std::size_t>(defects.size()) * width, 0.0);
    dij_parent_[sub].assign(static_cast<std::size_t>(defects.size()) * width, -1);
    std::fill(defect_row_[sub].begin(), defect_row_[sub].end(), -1);
    std::vector<double> dist;
    std::vector<int> parent;
    for (std::size_t r = 0; r < defects.size(); ++r) {
        defect_row_[sub][defects[r]] = static_cast<int>(r);
        dijkstra_from(g, edge_weight_[sub], defects[r], dist, parent);
        std::copy(dist.begin(), dist.end(), dij_dist_[sub].begin() + r * width);
        std::copy(parent.begin(), parent.end(), dij_parent_[sub].begin() + r * width);
    }
}

void Decoder::apply_chain(int sub, int local_a, int local_b, std::vector<std::uint8_t>& letters) {
    const auto s = static_cast<Sublattice>(sub);
    const auto& lat = code_.lattice();
    const auto& g = lat.graph(s);
    if (metric_.kind == MetricKind::Dijkstra) {
        apply_dijkstra_path(sub, defect_row_[sub][local_a], local_b, letters);
        return;
    }
    if (g.dist(local_a, local_b) == SublatticeGraph::kUnreachable) {
        // No connecting chain exists (tiny lattices); absorb both defects.
        apply_boundary_chain(sub, local_a, letters);
        apply_boundary_chain(sub, local_b, letters);
        return;
    }
    // Downhill walk along the step-distance table; horizontal moves first.
    int cur = local_a;
    while (cur != local_b) {
        const int target_dist = g.dist(cur, local_b);
        int best = -1, best_dx = -1, best_qubit = -1;
        for (int ei : g.adjacency[cur]) {
            const auto& e = g.edges[ei];
            if (e.b == DetectorEdge::kBoundary) continue;
            const int w = e.a == cur ? e.b : e.a;
            if (g.dist(w, local_b) != target_dist - 1) continue;
            const auto& gc = lat.stabilizer(g.stab_ids[cur]).grid;
            const auto& gw = lat.stabilizer(g.stab_ids[w]).grid;
            const int dx = std::abs(gw.x - gc.x);
            if (dx > best_dx || (dx == best_dx && e.qubit < best_qubit)) {
                best = w;
                best_dx = dx;
                best_qubit = e.qubit;
            }
        }
        if (best < 0) throw std::logic_error("chain walk stuck");
        letters[best_qubit] = static_cast<std::uint8_t>(
            pauli_product(static_cast<Pauli>(letters[best_qubit]), code_.chain_letter(best_qubit, s)));
        cur = best;
    }
}

void Decoder::apply_boundary_chain(int sub, int local_a, std::vector<std::uint8_t>& letters) {
    const auto s = static_cast<Sublattice>(sub);
    const auto& lat = code_.lattice();
    const auto& g = lat.graph(s);
    if (metric_.kind == MetricKind::Dijkstra) {
        apply_dijkstra_path(sub, defect_row_[sub][local_a], g.size(), letters);
        return;
    }
    int cur = local_a;
    while (g.boundary_steps[cur] > 1) {
        int best = -1, best_dx = -1, best_qubit = -1;
        for (int ei : g.adjacency[cur]) {
            const auto& e = g.edges[ei];
            if (e.b == DetectorEdge::kBoundary) continue;
            const int w = e.a == cur ? e.b : e.a;
            if (g.boundary_steps[w] != g.boundary_steps[cur] - 1) continue;
            const auto& gc = lat.stabilizer(g.stab_ids[cur]).grid;
            const auto& gw = lat.stabilizer(g.stab_ids[w]).grid;
            const int dx = std::abs(gw.x - gc.x);
            if (dx > best_dx || (dx == best_dx && e.qubit < best_qubit)) {
                best = w;
                best_dx = dx;
                best_qubit = e.qubit;
            }
        }
        if (best < 0) throw std::logic_error("boundary walk stuck");
        letters[best_qubit] = static_cast<std::uint8_t>(
            pauli_product(static_cast<Pauli>(letters[best_qubit]), code_.chain_letter(best_qubit, s)));
        cur = best;
    }
    const int q = lat.boundary_edge_qubit(s, cur);
    letters[q] = static_cast<std::uint8_t>(
        pauli_product(static_cast<Pauli>(letters[q]), code_.chain_letter(q, s)));
}

void Decoder::apply_dijkstra_path(int sub, int source_row, int target, std::vector<std::uint8_t>& letters) {
    const auto s = static_cast<Sublattice>(sub);
    const auto& g = code_.lattice().graph(s);
    const int width = g.size() + 1;
    const int* parent = dij_parent_[sub].data() + static_cast<std::size_t>(source_row) * width;
    int cur = target;
    while (parent[cur] != -1) {
        const auto& e = g.edges[parent[cur]];
        const int q = e.qubit;
        letters[q] = static_cast<std::uint8_t>(
            pauli_product(static_cast<Pauli>(letters[q]), code_.chain_letter(q, s)));
        if (e.b == DetectorEdge::kBoundary) {
            cur = e.a;
        } else {
            cur = (cur == e.a) ? e.b : e.a;
        }
    }
}

void Decoder::decode_defects(const std::array<std::vector<int>, 2>& defects,
                             std::vector<std::uint8_t>& correction_letters,
                             std::vector<std::pair<int, int>>* matched_pairs) {
    const auto& lat = code_.lattice();
    for (int sub = 0; sub < 2; ++sub) {
        const auto& d = defects[sub];
        const int k = static_cast<int>(d.size());
        if (k == 0) continue;
        if (metric_.kind == MetricKind::Dijkstra) run_dijkstra(sub, d);
        const auto& g = lat.graph(static_cast<Sublattice>(sub));

        auto record = [&](int la, int lb) {
            if (matched_pairs) {
                matched_pairs->emplace_back(g.stab_ids[la], lb < 0 ? -1 : g.stab_ids[lb]);
            }
        };

        if (k == 1) {
            apply_boundary_chain(sub, d[0], correction_letters);
            record(d[0], -1);
            continue;
        }
        if (k == 2) {
            double w12 = pair_weight(sub, d[0], d[1]);
            double wb = boundary_weight(sub, d[0]) + boundary_weight(sub, d[1]);
            if (tie_policy_ == 1) wb -= 2e-9;
            if (tie_policy_ == 2) w12 -= 1e-9;
            if (tie_policy_ == 3) {
                const std::uint64_t h = mix_seed(mix_seed(0x7ae5u, static_cast<std::uint64_t>(g.stab_ids[d[0]])),
                                                 static_cast<std::uint64_t>(g.stab_ids[d[1]]) + 1);
                w12 += (static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5) * 1e-7;
                }
            if (w12 <= wb) {
                apply_chain(sub, d[0], d[1], correction_letters);
                record(d[0], d[1]);
            } else {
                apply_boundary_chain(sub, d[0], correction_letters);
                apply_boundary_chain(sub, d[1], correction_letters);
                record(d[0], -1);
                record(d[1], -1);
            }
            continue;
        }

        scratch_edges_.clear();
        auto jitter = [&](int a, int b) {
            if (tie_policy_ != 3) return 0.0;
            const std::uint64_t h = mix_seed(mix_seed(0x7ae5u, static_cast<std::uint64_t>(a)),
                                             static_cast<std::uint64_t>(b) + 1);
            return (static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5) * 1e-7;
        };
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) {
                double w = pair_weight(sub, d[i], d[j]);
                if (tie_policy_ == 2) w -= 1e-9;
                w += jitter(g.stab_ids[d[i]], g.stab_ids[d[j]]);
                scratch_edges_.push_back({i, j, w});
            }
        }
        for (int i = 0; i < k; ++i) {
            double w = boundary_weight(sub, d[i]);
            if (tie_policy_ == 1) w -= 1e-9;
            w += jitter(g.stab_ids[d[i]], -1);
            scratch_edges_.push_back({i, k + i, w});
        }
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) {
                scratch_edges_.push_back({k + i, k + j, 0.0});
            }
        }
        const auto pairs = min_weight_perfect_matching(2 * k, scratch_edges_);
        for (const auto& [u, v] : pairs) {
            if (u < k && v < k) {
                apply_chain(sub, d[u], d[v], correction_letters);
                record(d[u], d[v]);
            } else if (u < k) {
                apply_boundary_chain(sub, d[u], correction_letters);
                record(d[u], -1);
            }
        }
    }
}

Correction Decoder::decode(const Syndrome& syndrome) {
    const auto& lat = code_.lattice();
    if (syndrome.bits.size() != static_cast<std::size_t>(lat.num_stabilizers())) {
        throw std::invalid_argument("syndrome length does not match code");
    }
    std::array<std::vector<int>, 2> defects;
    for (const auto& s : lat.stabilizers()) {
        if (syndrome.bits[s.id]) defects[static_cast<int>(s.sublattice)].push_back(s.local);
    }
    scratch_letters_.assign(lat.num_qubits(), 0);
    Correction corr;
    decode_defects(defects, scratch_letters_, &corr.matched_pairs);
    corr.op = PauliOperator(lat.num_qubits());
    for (int q = 0; q < lat.num_qubits(); ++q) {
        if (scratch_letters_[q]) corr.op.set(q, static_cast<Pauli>(scratch_letters_[q]));
    }
    return corr;
}

std::array<MatchingGraph, 2> build_matching_graph(const Syndrome& syndrome, const CodeLayout& code,
                                                  const WeightMetric& metric, const NoiseModel& noise) {
    const auto& lat = code.lattice();
    std::array<MatchingGraph, 2> out;
    std::array<std::vector<int>, 2> defects;
    for (const auto& s : lat.stabilizers()) {
        if (syndrome.bits.at(s.id)) defects[static_cast<int>(s.sublattice)].push_back(s.local);
    }
    for (int sub = 0; sub < 2; ++sub) {
        auto& g = out[sub];
        g.sublattice = static_cast<Sublattice>(sub);
        g.defects = defects[sub];
        const int k = static_cast<int>(g.defects.size());
        if (k == 0) continue;
        const auto& graph = lat.graph(g.sublattice);
        for (int i = 0; i < k; ++i) {
            const int ga = graph.stab_ids[g.defects[i]];
            for (int j = i + 1; j < k; ++j) {
                const int gb = graph.stab_ids[g.defects[j]];
                g.edges.push_back({i, j, edge_weight(metric, code, &noise, ga, gb)});
            }
            g.edges.push_back({i, k + i, edge_weight_to_boundary(metric, code, &noise, ga)});
        }
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) g.edges.push_back({k + i, k + j, 0.0});
        }
    }
    return out;
}

Correction decode(const Syndrome& syndrome, const CodeLayout& code, const WeightMetric& metric,
                  const NoiseModel& noise) {
    Decoder dec(code, metric, noise);
    return dec.decode(syndrome);
}

std::string dump_matching_graph(const MatchingGraph& graph,
                                const std::vector<std::pair<int, int>>& chosen) {
    std::ostringstream out;
    out << "# sublattice " << to_string(graph.sublattice) << "\n";
    out << "# defects";
    for (int d : graph.defects) out << ' ' << d;
    out << "\n";
    for (const auto& e : graph.edges) {
        out << e.u << ' ' << e.v << ' ' << e.weight << "\n";
    }
    out << "# matching\n";
    for (const auto& [u, v] : chosen) out << u << ' ' << v << "\n";
    return out.str();
}

}  // namespace cdsurf
