#include "cdsurf/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cdsurf {

namespace {

// Primal-dual blossom matcher after Galil's formulation. Vertices are
// 0..n-1, blossom slots n..2n-1. Edge endpoints are indexed 2k and 2k+1 for
// edge k. Labels: 0 free, 1 S, 2 T (4/5 are tracing breadcrumbs).
struct BlossomMatcher {
    const std::vector<WeightedEdge>& edges;
    int nvertex;
    int nedge;
    bool maxcardinality;
    double tol;

    std::vector<int> endpoint;               // endpoint[p] = vertex at endpoint p
    std::vector<std::vector<int>> neighbend; // per vertex: remote endpoint indices
    std::vector<int> mate;                   // endpoint index or -1
    std::vector<int> label;
    std::vector<int> labelend;
    std::vector<int> inblossom;
    std::vector<int> blossomparent;
    std::vector<std::vector<int>> blossomchilds;
    std::vector<int> blossombase;
    std::vector<std::vector<int>> blossomendps;
    std::vector<int> bestedge;
    std::vector<std::vector<int>> blossombestedges;
    std::vector<int> unusedblossoms;
    std::vector<double> dualvar;
    std::vector<char> allowedge;
    std::vector<int> queue;

    BlossomMatcher(int n, const std::vector<WeightedEdge>& e, bool maxcard)
        : edges(e), nvertex(n), nedge(static_cast<int>(e.size())), maxcardinality(maxcard) {
        double maxweight = 0.0;
        for (const auto& ed : edges) maxweight = std::max(maxweight, ed.weight);
        tol = 1e-10 * std::max(1.0, maxweight);

        endpoint.resize(2 * nedge);
        for (int p = 0; p < 2 * nedge; ++p) endpoint[p] = p % 2 ? edges[p / 2].v : edges[p / 2].u;
        neighbend.assign(nvertex, {});
        for (int k = 0; k < nedge; ++k) {
            neighbend[edges[k].u].push_back(2 * k + 1);
            neighbend[edges[k].v].push_back(2 * k);
        }
        mate.assign(nvertex, -1);
        label.assign(2 * nvertex, 0);
        labelend.assign(2 * nvertex, -1);
        inblossom.resize(nvertex);
        for (int v = 0; v < nvertex; ++v) inblossom[v] = v;
        blossomparent.assign(2 * nvertex, -1);
        blossomchilds.assign(2 * nvertex, {});
        blossombase.resize(2 * nvertex);
        for (int v = 0; v < nvertex; ++v) blossombase[v] = v;
        for (int b = nvertex; b < 2 * nvertex; ++b) blossombase[b] = -1;
        blossomendps.assign(2 * nvertex, {});
        bestedge.assign(2 * nvertex, -1);
        blossombestedges.assign(2 * nvertex, {});
        for (int b = 2 * nvertex - 1; b >= nvertex; --b) unusedblossoms.push_back(b);
        dualvar.assign(2 * nvertex, 0.0);
        for (int v = 0; v < nvertex; ++v) dualvar[v] = maxweight;
        allowedge.assign(nedge, 0);
    }

    double slack(int k) const {
        return dualvar[edges[k].u] + dualvar[edges[k].v] - 2.0 * edges[k].weight;
    }

    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < nvertex) {
            out.push_back(b);
            return;
        }
        for (int t : blossomchilds[b]) blossom_leaves(t, out);
    }

    void assign_label(int w, int t, int p) {
        const int b = inblossom[w];
        label[w] = label[b] = t;
        labelend[w] = labelend[b] = p;
        bestedge[w] = bestedge[b] = -1;
        if (t == 1) {
            std::vector<int> leaves;
            blossom_leaves(b, leaves);
            queue.insert(queue.end(), leaves.begin(), leaves.end());
        } else if (t == 2) {
            const int base = blossombase[b];
            assign_label(endpoint[mate[base]], 1, mate[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom[v];
            if (label[b] & 4) {
                base = blossombase[b];
                break;
            }
            path.push_back(b);
            label[b] = 5;
            if (labelend[b] == -1) {
                v = -1;
            } else {
                v = endpoint[labelend[b]];
                b = inblossom[v];
                v = endpoint[labelend[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges[k].u;
        int w = edges[k].v;
        const int bb = inblossom[base];
        int bv = inblossom[v];
        int bw = inblossom[w];
        const int b = unusedblossoms.back();
        unusedblossoms.pop_back();
        blossombase[b] = base;
        blossomparent[b] = -1;
        blossomparent[bb] = b;
        auto& path = blossomchilds[b];
        auto& endps = blossomendps[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend[bv]);
            v = endpoint[labelend[bv]];
            bv = inblossom[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend[bw] ^ 1);
            w = endpoint[labelend[bw]];
            bw = inblossom[w];
        }
        label[b] = 1;
        labelend[b] = labelend[bb];
        dualvar[b] = 0.0;
        std::vector<int> leaves;
        blossom_leaves(b, leaves);
        for (int leaf : leaves) {
            if (label[inblossom[leaf]] == 2) queue.push_back(leaf);
            inblossom[leaf] = b;
        }
        // Merge least-slack edge lists of the sub-blossoms.
        std::vector<int> bestedgeto(2 * nvertex, -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (blossombestedges[child].empty()) {
                std::vector<int> sub;
                blossom_leaves(child, sub);
                for (int leaf : sub) {
                    std::vector<int> ks;
                    ks.reserve(neighbend[leaf].size());
                    for (int p : neighbend[leaf]) ks.push_back(p / 2);
                    nblists.push_back(std::move(ks));
                }
            } else {
                nblists.push_back(blossombestedges[child]);
            }
            for (const auto& nblist : nblists) {
                for (int ek : nblist) {
                    int i = edges[ek].u, j = edges[ek].v;
                    if (inblossom[j] == b) std::swap(i, j);
                    const int bj = inblossom[j];
                    if (bj != b && label[bj] == 1 &&
                        (bestedgeto[bj] == -1 || slack(ek) < slack(bestedgeto[bj]))) {
                        bestedgeto[bj] = ek;
                    }
                }
            }
            blossombestedges[child].clear();
            bestedge[child] = -1;
        }
        auto& best = blossombestedges[b];
        best.clear();
        for (int ek : bestedgeto) {
            if (ek != -1) best.push_back(ek);
        }
        bestedge[b] = -1;
        for (int ek : best) {
            if (bestedge[b] == -1 || slack(ek) < slack(bestedge[b])) bestedge[b] = ek;
        }
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds[b]) {
            blossomparent[s] = -1;
            if (s < nvertex) {
                inblossom[s] = s;
            } else if (endstage && dualvar[s] <= tol) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> leaves;
                blossom_leaves(s, leaves);
                for (int leaf : leaves) inblossom[leaf] = s;
            }
        }
        if (!endstage && label[b] == 2) {
            const int entrychild = inblossom[endpoint[labelend[b] ^ 1]];
            int j = static_cast<int>(std::find(blossomchilds[b].begin(), blossomchilds[b].end(),
                                               entrychild) -
                                     blossomchilds[b].begin());
            int jstep, endptrick;
            if (j & 1) {
                j -= static_cast<int>(blossomchilds[b].size());
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            auto child_at = [&](int idx) {
                const int m = static_cast<int>(blossomchilds[b].size());
                return blossomchilds[b][(idx % m + m) % m];
            };
            auto endp_at = [&](int idx) {
                const int m = static_cast<int>(blossomendps[b].size());
                return blossomendps[b][(idx % m + m) % m];
            };
            int p = labelend[b];
            while (j != 0) {
                label[endpoint[p ^ 1]] = 0;
                label[endpoint[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint[p ^ 1], 2, p);
                allowedge[endp_at(j - endptrick) / 2] = 1;
                j += jstep;
                p = endp_at(j - endptrick) ^ endptrick;
                allowedge[p / 2] = 1;
                j += jstep;
            }
            const int bv = child_at(j);
            label[endpoint[p ^ 1]] = 2;
            label[bv] = 2;
            labelend[endpoint[p ^ 1]] = labelend[bv] = p;
            bestedge[bv] = -1;
            j += jstep;
            while (child_at(j) != entrychild) {
                const int bw = child_at(j);
                if (label[bw] == 1) {
                    j += jstep;
                    continue;
                }
                std::vector<int> leaves;
                blossom_leaves(bw, leaves);
                int labeled = -1;
                for (int leaf : leaves) {
                    if (label[leaf] != 0) {
                        labeled = leaf;
                        break;
                    }
                }
                if (labeled != -1) {
                    label[labeled] = 0;
                    label[endpoint[mate[blossombase[bw]]]] = 0;
                    assign_label(labeled, 2, labelend[labeled]);
                }
                j += jstep;
            }
        }
        label[b] = -1;
        labelend[b] = -1;
        blossomchilds[b].clear();
        blossomendps[b].clear();
        blossombase[b] = -1;
        blossombestedges[b].clear();
        bestedge[b] = -1;
        unusedblossoms.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent[t] != b) t = blossomparent[t];
        if (t >= nvertex) augment_blossom(t, v);
        const int m = static_cast<int>(blossomchilds[b].size());
        const int i = static_cast<int>(std::find(blossomchilds[b].begin(), blossomchilds[b].end(), t) -
                                       blossomchilds[b].begin());
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= m;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        auto child_at = [&](int idx) { return blossomchilds[b][(idx % m + m) % m]; };
        auto endp_at = [&](int idx) { return blossomendps[b][(idx % m + m) % m]; };
        while (j != 0) {
            j += jstep;
            int tt = child_at(j);
            const int p = endp_at(j - endptrick) ^ endptrick;
            if (tt >= nvertex) augment_blossom(tt, endpoint[p]);
            j += jstep;
            tt = child_at(j);
            if (tt >= nvertex) augment_blossom(tt, endpoint[p ^ 1]);
            mate[endpoint[p]] = p ^ 1;
            mate[endpoint[p ^ 1]] = p;
        }
        std::rotate(blossomchilds[b].begin(), blossomchilds[b].begin() + i, blossomchilds[b].end());
        std::rotate(blossomendps[b].begin(), blossomendps[b].begin() + i, blossomendps[b].end());
        blossombase[b] = blossombase[blossomchilds[b][0]];
    }

    void augment_matching(int k) {
        for (auto [s, p] : {std::pair{edges[k].u, 2 * k + 1}, std::pair{edges[k].v, 2 * k}}) {
            for (;;) {
                const int bs = inblossom[s];
                if (bs >= nvertex) augment_blossom(bs, s);
                mate[s] = p;
                if (labelend[bs] == -1) break;
                const int t = endpoint[labelend[bs]];
                const int bt = inblossom[t];
                s = endpoint[labelend[bt]];
                const int j = endpoint[labelend[bt] ^ 1];
                if (bt >= nvertex) augment_blossom(bt, j);
                mate[j] = labelend[bt];
                p = labelend[bt] ^ 1;
            }
        }
    }

    std::vector<int> solve() {
        for (int stage = 0; stage < nvertex; ++stage) {
            std::fill(label.begin(), label.end(), 0);
            std::fill(bestedge.begin(), bestedge.end(), -1);
            for (int b = nvertex; b < 2 * nvertex; ++b) blossombestedges[b].clear();
            std::fill(allowedge.begin(), allowedge.end(), 0);
            queue.clear();

            for (int v = 0; v < nvertex; ++v) {
                if (mate[v] == -1 && label[inblossom[v]] == 0) assign_label(v, 1, -1);
            }

            bool augmented = false;
            for (;;) {
                while (!queue.empty() && !augmented) {
                    const int v = queue.back();
                    queue.pop_back();
                    for (int p : neighbend[v]) {
                        const int k = p / 2;
                        const int w = endpoint[p];
                        if (inblossom[v] == inblossom[w]) continue;
                        double kslack = 0.0;
                        if (!allowedge[k]) {
                            kslack = slack(k);
                            if (kslack <= tol) allowedge[k] = 1;
                        }
                        if (allowedge[k]) {
                            if (label[inblossom[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label[inblossom[w]] == 1) {
                                const int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label[w] == 0) {
                                label[w] = 2;
                                labelend[w] = p ^ 1;
                            }
                        } else if (label[inblossom[w]] == 1) {
                            const int b = inblossom[v];
                            if (bestedge[b] == -1 || kslack < slack(bestedge[b])) bestedge[b] = k;
                        } else if (label[w] == 0) {
                            if (bestedge[w] == -1 || kslack < slack(bestedge[w])) bestedge[w] = k;
                        }
                    }
                }
                if (augmented) break;

                // Dual update: choose the smallest delta among the four rules.
                int deltatype = -1;
                double delta = 0.0;
                int deltaedge = -1, deltablossom = -1;
                if (!maxcardinality) {
                    deltatype = 1;
                    delta = *std::min_element(dualvar.begin(), dualvar.begin() + nvertex);
                }
                for (int v = 0; v < nvertex; ++v) {
                    if (label[inblossom[v]] == 0 && bestedge[v] != -1) {
                        const double d = slack(bestedge[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * nvertex; ++b) {
                    if (blossomparent[b] == -1 && label[b] == 1 && bestedge[b] != -1) {
                        const double d = slack(bestedge[b]) / 2.0;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge[b];
                        }
                    }
                }
                for (int b = nvertex; b < 2 * nvertex; ++b) {
                    if (blossombase[b] >= 0 && blossomparent[b] == -1 && label[b] == 2 &&
                        (deltatype == -1 || dualvar[b] < delta)) {
                        delta = dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    deltatype = 1;
                    delta = std::max(0.0, *std::min_element(dualvar.begin(), dualvar.begin() + nvertex));
                }

                for (int v = 0; v < nvertex; ++v) {
                    const int l = label[inblossom[v]];
                    if (l == 1)
                        dualvar[v] -= delta;
                    else if (l == 2)
                        dualvar[v] += delta;
                }
                for (int b = nvertex; b < 2 * nvertex; ++b) {
                    if (blossombase[b] >= 0 && blossomparent[b] == -1) {
                        if (label[b] == 1)
                            dualvar[b] += delta;
                        else if (label[b] == 2)
                            dualvar[b] -= delta;
                    }
                }

                if (deltatype == 1) break;
                if (deltatype == 2) {
                    allowedge[deltaedge] = 1;
                    int i = edges[deltaedge].u;
                    int j = edges[deltaedge].v;
                    if (label[inblossom[i]] == 0) std::swap(i, j);
                    queue.push_back(i);
                } else if (deltatype == 3) {
                    allowedge[deltaedge] = 1;
                    queue.push_back(edges[deltaedge].u);
                } else if (deltatype == 4) {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;

            for (int b = nvertex; b < 2 * nvertex; ++b) {
                if (blossomparent[b] == -1 && blossombase[b] >= 0 && label[b] == 1 &&
                    dualvar[b] <= tol) {
                    expand_blossom(b, true);
                }
            }
        }

        std::vector<int> result(nvertex, -1);
        for (int v = 0; v < nvertex; ++v) {
            if (mate[v] != -1) result[v] = endpoint[mate[v]];
        }
        return result;
    }
};

}  // namespace

std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality) {
    if (num_vertices <= 0) return {};
    for (const auto& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= num_vertices || e.v >= num_vertices || e.u == e.v) {
            throw std::invalid_argument("invalid edge");
        }
    }
    BlossomMatcher m(num_vertices, edges, max_cardinality);
    return m.solve();
}

std::vector<std::pair<int, int>> min_weight_perfect_matching(int num_vertices,
                                                             const std::vector<WeightedEdge>& edges) {
    if (num_vertices == 0) return {};
    if (num_vertices % 2 != 0) throw std::invalid_argument("odd vertex count has no perfect matching");
    double maxw = 0.0;
    for (const auto& e : edges) {
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
            throw std::invalid_argument("edge weights must be finite and nonnegative");
        }
        maxw = std::max(maxw, e.weight);
    }
    std::vector<WeightedEdge> flipped(edges);
    for (auto& e : flipped) e.weight = (maxw - e.weight) + 1.0;
    const auto mate = max_weight_matching(num_vertices, flipped, true);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(num_vertices / 2);
    for (int v = 0; v < num_vertices; ++v) {
        if (mate[v] == -1) throw std::invalid_argument("graph admits no perfect matching");
        if (v < mate[v]) pairs.emplace_back(v, mate[v]);
    }
    return pairs;
}

double matching_total_weight(const std::vector<std::pair<int, int>>& pairs,
                             const std::vector<WeightedEdge>& edges) {
    std::map<std::pair<int, int>, double> best;
    for (const auto& e : edges) {
        const auto key = std::minmax(e.u, e.v);
        const auto it = best.find(key);
        if (it == best.end() || e.weight < it->second) best[key] = e.weight;
    }
    double total = 0.0;
    for (const auto& [u, v] : pairs) total += best.at(std::minmax(u, v));
    return total;
}

}  // namespace cdsurf
