#include "doctest.h"

#include <cmath>

#include "cdsurf/code.hpp"
#include "cdsurf/decoder.hpp"
#include "cdsurf/noise.hpp"
#include "cdsurf/rng.hpp"
#include "oracles.hpp"

using namespace cdsurf;

namespace {

const StabilizerSite* find_stab(const Lattice& lat, Sublattice sub, int gx, int gz) {
    for (const auto& s : lat.stabilizers()) {
        if (s.sublattice == sub && s.grid.x == gx && s.grid.z == gz) return &s;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("closed-form chain weights") {
    CHECK(chain_weight(WeightMetric::manhattan(), 2, 3) == doctest::Approx(5.0));

    const double p1 = std::exp(-1.0);
    CHECK(chain_weight(WeightMetric::degeneracy(p1), 1, 1) == doctest::Approx(2.0 - std::log(2.0)));

    // Odd lx + lz kills the diagonal term.
    const auto dc = WeightMetric::degeneracy_correlation(0.1, 0.3);
    const double p1_only = -std::log(3.0 * std::pow(0.1, 3));  // C(3,1) p1^3
    CHECK(chain_weight(dc, 1, 2) == doctest::Approx(p1_only));

    // Even case includes the diagonal chain count C(l_m, (lx+lz)/2).
    const double even_p1 = 4.0 * std::pow(0.1, 4);  // C(4,3) p1^4
    const double even_p2 = 3.0 * std::pow(0.3, 3);  // C(3,2) p2^3
    CHECK(chain_weight(dc, 3, 1) == doctest::Approx(-std::log(even_p1 + even_p2)));

    // Literal degeneracy form drops the -ln(p1) scale.
    CHECK(chain_weight(WeightMetric::degeneracy(0.1, true), 2, 2) ==
          doctest::Approx(4.0 - std::log(6.0)));
}

TEST_CASE("log metrics reject out-of-range probabilities") {
    CHECK_THROWS_AS(WeightMetric::degeneracy(0.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightMetric::degeneracy(1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightMetric::degeneracy_correlation(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("edge_weight on lattice stabilizers") {
    auto lat = build_lattice({5, 5, Layout::NonRotated});
    const auto code = build_css(lat);
    const auto noise = make_iid(0.1, depolarizing_bias(), lat->num_qubits());

    const auto* a = find_stab(*lat, Sublattice::Primal, 0, 0);
    const auto* b = find_stab(*lat, Sublattice::Primal, 2, 3);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(edge_weight(WeightMetric::manhattan(), code, nullptr, a->id, b->id) == doctest::Approx(5.0));

    const auto wm = WeightMetric::weighted_manhattan(0.7, 1.3);
    CHECK(edge_weight(wm, code, nullptr, a->id, b->id) == doctest::Approx(0.7 * 2 + 1.3 * 3));

    const auto* dual = find_stab(*lat, Sublattice::Dual, 0, 0);
    REQUIRE(dual);
    CHECK_THROWS_AS(edge_weight(WeightMetric::manhattan(), code, nullptr, a->id, dual->id),
                    std::invalid_argument);

    // Dijkstra under uniform depolarizing reduces to the weighted Manhattan
    // distance with equal log-weights.
    const double q = 2.0 * 0.1 / 3.0;
    const double unit = -std::log(q);
    CHECK(edge_weight(WeightMetric::dijkstra(), code, &noise, a->id, b->id) ==
          doctest::Approx(5.0 * unit));
    CHECK(edge_weight_to_boundary(WeightMetric::dijkstra(), code, &noise, a->id) ==
          doctest::Approx(unit * boundary_distance(*lat, a->id).manhattan()));
}

TEST_CASE("xzzx chain probabilities follow the biased weighted Manhattan") {
    // Under x^lx z^lz chain probabilities, the matching weights are
    // -lx ln(x) - lz ln(z); the Dijkstra metric reproduces them from the
    // per-qubit flip probabilities of a pure X/Z biased channel.
    auto lat = build_lattice({5, 5, Layout::NonRotated});
    const auto code = build_xzzx(lat);
    const double x = 0.02, z = 0.08;
    std::vector<QubitRates> rates(lat->num_qubits(), {x, 0.0, z});
    const NoiseModel noise(rates, {NoiseKind::IID, x + z, 0, 0, 0});

    const auto* a = find_stab(*lat, Sublattice::Primal, 0, 1);
    const auto* b = find_stab(*lat, Sublattice::Primal, 3, 3);
    REQUIRE(a);
    REQUIRE(b);
    // Horizontal steps of the primal graph cross vertex qubits, whose primal
    // letter is Z; an X error flips them with probability x.
    const auto wm = WeightMetric::weighted_manhattan(-std::log(x), -std::log(z));
    CHECK(edge_weight(WeightMetric::dijkstra(), code, &noise, a->id, b->id) ==
          doctest::Approx(edge_weight(wm, code, nullptr, a->id, b->id)));
}

TEST_CASE("matching graph construction") {
    auto lat = build_lattice({5, 5, Layout::NonRotated});
    const auto code = build_css(lat);
    const auto noise = make_iid(0.05, depolarizing_bias(), lat->num_qubits());
    const int n = lat->num_qubits();

    SUBCASE("empty syndrome yields empty graphs") {
        const auto graphs =
            build_matching_graph(extract_syndrome(PauliOperator(n), code), code, WeightMetric::manhattan(), noise);
        CHECK(graphs[0].defects.empty());
        CHECK(graphs[1].defects.empty());
    }
    SUBCASE("single defect matches to the boundary") {
        int corner = -1;
        for (const auto& qb : lat->qubits()) {
            if (qb.coord.x == 0 && qb.coord.z == 0) corner = qb.id;
        }
        const auto syn = extract_syndrome(PauliOperator::single(n, corner, Pauli::Z), code);
        CHECK(syn.defect_count() == 1);
        const auto corr = decode(syn, code, WeightMetric::manhattan(), noise);
        REQUIRE(corr.matched_pairs.size() == 1);
        CHECK(corr.matched_pairs[0].second == -1);
        CHECK(extract_syndrome(corr.op, code) == syn);
    }
    SUBCASE("two adjacent interior defects pair up") {
        const int q = [&] {
            for (const auto& qb : lat->qubits()) {
                if (qb.coord.x == 4 && qb.coord.z == 4) return qb.id;
            }
            return -1;
        }();
        REQUIRE(q >= 0);
        const auto syn = extract_syndrome(PauliOperator::single(n, q, Pauli::X), code);
        CHECK(syn.defect_count() == 2);
        const auto corr = decode(syn, code, WeightMetric::manhattan(), noise);
        REQUIRE(corr.matched_pairs.size() == 1);
        CHECK(corr.matched_pairs[0].second != -1);
        CHECK(corr.op == PauliOperator::single(n, q, Pauli::X));
    }
    SUBCASE("virtual-virtual edges carry weight zero") {
        PauliOperator err(n);
        err.set(4, Pauli::X);
        err.set(11, Pauli::X);
        const auto graphs =
            build_matching_graph(extract_syndrome(err, code), code, WeightMetric::manhattan(), noise);
        for (const auto& g : graphs) {
            const int k = static_cast<int>(g.defects.size());
            for (const auto& e : g.edges) {
                if (e.u >= k && e.v >= k) CHECK(e.weight == 0.0);
                CHECK(e.weight >= 0.0);
                CHECK(std::isfinite(e.weight));
            }
        }
    }
}

TEST_CASE("every weight-1 error decodes to class none on every d=3 family") {
    const auto noise_seed = 17;
    for (const auto layout : {Layout::NonRotated, Layout::Rotated}) {
        auto lat = build_lattice({3, 3, layout});
        const int n = lat->num_qubits();
        const auto noise = make_toy_permutation(0.01, 0.03, 0.06, n, noise_seed);
        for (const auto family :
             {CodeFamily::CSS, CodeFamily::XY, CodeFamily::XZZX, CodeFamily::XXZZ, CodeFamily::MHHM,
              CodeFamily::MMHH}) {
            const auto code = build_family(family, lat, &noise);
            for (int q = 0; q < n; ++q) {
                for (const auto p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                    const auto err = PauliOperator::single(n, q, p);
                    const auto corr = decode(extract_syndrome(err, code), code,
                                             WeightMetric::manhattan(), noise);
                    const auto effect = is_logical_failure(err * corr.op, code.logicals(), code);
                    CHECK(effect == LogicalEffect::None);
                }
            }
        }
    }
}

TEST_CASE("decode always annihilates the syndrome") {
    Rng rng(31);
    auto lat = build_lattice({5, 5, Layout::NonRotated});
    const int n = lat->num_qubits();
    const auto noise = make_gaussian(0.15, 0.4, 0.4, n, 23);
    const auto metrics = {WeightMetric::manhattan(), WeightMetric::degeneracy(0.1),
                          WeightMetric::degeneracy_correlation(0.08, 0.02), WeightMetric::dijkstra(),
                          WeightMetric::weighted_manhattan(1.2, 0.9)};
    for (const auto family : {CodeFamily::CSS, CodeFamily::XZZX, CodeFamily::MMHH}) {
        const auto code = build_family(family, lat, &noise);
        for (const auto& metric : metrics) {
            Decoder dec(code, metric, noise);
            for (int trial = 0; trial < 60; ++trial) {
                const auto err = sample_error(noise, *lat, rng.next_u64()).op;
                const auto syn = extract_syndrome(err, code);
                const auto corr = dec.decode(syn);
                CHECK(extract_syndrome(err * corr.op, code).is_trivial());
            }
        }
    }
}

TEST_CASE("rotated decode validity under pair noise") {
    Rng rng(77);
    auto lat = build_lattice({5, 5, Layout::Rotated});
    const int n = lat->num_qubits();
    auto noise = make_iid(0.04, depolarizing_bias(), n).with_pair_channel({PairKind::XX_ZZ, 0.03, 0.5});
    const auto code = build_css(lat);
    Decoder dec(code, WeightMetric::degeneracy(0.05, true), noise);
    for (int trial = 0; trial < 200; ++trial) {
        const auto err = sample_error(noise, *lat, rng.next_u64()).op;
        const auto syn = extract_syndrome(err, code);
        const auto corr = dec.decode(syn);
        CHECK(extract_syndrome(err * corr.op, code).is_trivial());
    }
}

TEST_CASE("pair errors hit exactly one sub-lattice") {
    SUBCASE("XX and ZZ pairs on the CSS code") {
        for (const auto layout : {Layout::NonRotated, Layout::Rotated}) {
            auto lat = build_lattice({3, 3, layout});
            const auto code = build_css(lat);
            const int n = lat->num_qubits();
            for (const auto& [qa, qb] : lat->neighbor_pairs()) {
                for (const auto p : {Pauli::X, Pauli::Z}) {
                    PauliOperator err(n);
                    err.set(qa, p);
                    err.set(qb, p);
                    const auto syn = extract_syndrome(err, code);
                    int primal = 0, dual = 0;
                    for (const auto& s : lat->stabilizers()) {
                        if (!syn.bits[s.id]) continue;
                        (s.sublattice == Sublattice::Primal ? primal : dual)++;
                    }
                    CHECK((primal == 0 || dual == 0));
                }
            }
        }
    }
    SUBCASE("XZ pairs on the XZZX code") {
        auto lat = build_lattice({3, 3, Layout::NonRotated});
        const auto code = build_xzzx(lat);
        const int n = lat->num_qubits();
        for (const auto& [qa, qb] : lat->neighbor_pairs()) {
            for (const bool fwd : {true, false}) {
                PauliOperator err(n);
                err.set(qa, fwd ? Pauli::X : Pauli::Z);
                err.set(qb, fwd ? Pauli::Z : Pauli::X);
                const auto syn = extract_syndrome(err, code);
                int primal = 0, dual = 0;
                for (const auto& s : lat->stabilizers()) {
                    if (!syn.bits[s.id]) continue;
                    (s.sublattice == Sublattice::Primal ? primal : dual)++;
                }
                CHECK((primal == 0 || dual == 0));
            }
        }
    }
}

TEST_CASE("manhattan weights obey the triangle inequality") {
    auto lat = build_lattice({5, 4, Layout::NonRotated});
    const auto code = build_css(lat);
    Rng rng(8);
    const auto& stabs = lat->stabilizers();
    for (int trial = 0; trial < 200; ++trial) {
        const auto& a = stabs[rng.next_below(stabs.size())];
        const auto& b = stabs[rng.next_below(stabs.size())];
        const auto& c = stabs[rng.next_below(stabs.size())];
        if (a.sublattice != b.sublattice || b.sublattice != c.sublattice) continue;
        const auto m = WeightMetric::manhattan();
        CHECK(edge_weight(m, code, nullptr, a.id, b.id) <=
              edge_weight(m, code, nullptr, a.id, c.id) + edge_weight(m, code, nullptr, c.id, b.id) + 1e-9);
    }
}

TEST_CASE("mwpm never beats the exact maximum-likelihood decoder at d=3") {
    auto lat = build_lattice({3, 3, Layout::NonRotated});
    const int n = lat->num_qubits();
    const double p = 0.05;
    const auto noise = make_iid(p, depolarizing_bias(), n);
    const auto code = build_css(lat);
    const auto rates = oracles::exact_failure_rates(code, noise, WeightMetric::manhattan());
    CHECK(rates.mwpm >= rates.ml - 1e-12);
    // Independent per-sub-lattice matching loses the Y correlations of
    // depolarizing noise; at d=3 the exact gap is a factor ~1.6.
    CHECK(rates.mwpm <= 2.0 * rates.ml);
}
