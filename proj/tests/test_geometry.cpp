#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "cdsurf/geometry.hpp"
#include "cdsurf/rng.hpp"

using namespace cdsurf;

TEST_CASE("lattice counting examples") {
    const auto l33 = build_lattice({3, 3, Layout::NonRotated});
    CHECK(l33->num_qubits() == 13);
    CHECK(l33->num_stabilizers() == 12);

    const auto l22 = build_lattice({2, 2, Layout::NonRotated});
    CHECK(l22->num_qubits() == 5);
    CHECK(l22->num_stabilizers() == 4);

    const auto r33 = build_lattice({3, 3, Layout::Rotated});
    CHECK(r33->num_qubits() == 9);
    CHECK(r33->num_stabilizers() == 8);
}

TEST_CASE("lattice rejects degenerate sizes") {
    CHECK_THROWS_AS(build_lattice({1, 3, Layout::NonRotated}), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice({3, 1, Layout::Rotated}), std::invalid_argument);
}

TEST_CASE("qubit and stabilizer counts over a grid of sizes") {
    for (int d1 = 2; d1 <= 6; ++d1) {
        for (int d2 = 2; d2 <= 6; ++d2) {
            const auto lat = build_lattice({d1, d2, Layout::NonRotated});
            CHECK(lat->num_qubits() == d1 * d2 + (d1 - 1) * (d2 - 1));
            CHECK(lat->num_stabilizers() == lat->num_qubits() - 1);
            for (const auto& s : lat->stabilizers()) {
                CHECK(s.support.size() >= 2);
                CHECK(s.support.size() <= 4);
            }

            const auto rot = build_lattice({d1, d2, Layout::Rotated});
            CHECK(rot->num_qubits() == d1 * d2);
            CHECK(rot->num_stabilizers() == d1 * d2 - 1);
            for (const auto& s : rot->stabilizers()) {
                CHECK((s.support.size() == 2 || s.support.size() == 4));
            }
        }
    }
}

TEST_CASE("each qubit touches at most two stabilizers per sub-lattice") {
    for (const auto spec : {LatticeSpec{5, 4, Layout::NonRotated}, LatticeSpec{5, 5, Layout::Rotated}}) {
        const auto lat = build_lattice(spec);
        std::vector<int> primal(lat->num_qubits(), 0), dual(lat->num_qubits(), 0);
        for (const auto& s : lat->stabilizers()) {
            for (int q : s.support) {
                (s.sublattice == Sublattice::Primal ? primal[q] : dual[q])++;
            }
        }
        int interior_nonrot = 0;
        for (int q = 0; q < lat->num_qubits(); ++q) {
            CHECK(primal[q] <= 2);
            CHECK(dual[q] <= 2);
            CHECK(primal[q] >= 1);
            CHECK(dual[q] >= 1);
            if (primal[q] == 2 && dual[q] == 2) ++interior_nonrot;
        }
        CHECK(interior_nonrot > 0);
    }
}

TEST_CASE("displacement is a metric on each sub-lattice grid") {
    const auto lat = build_lattice({5, 5, Layout::NonRotated});
    const auto& stabs = lat->stabilizers();
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto& a = stabs[rng.next_below(stabs.size())];
        const auto& b = stabs[rng.next_below(stabs.size())];
        const auto& c = stabs[rng.next_below(stabs.size())];
        if (a.sublattice != b.sublattice || b.sublattice != c.sublattice) continue;
        const auto dab = lat->displacement(a, b);
        const auto dba = lat->displacement(b, a);
        CHECK(dab == dba);
        CHECK((dab.manhattan() == 0) == (a.id == b.id));
        const auto dac = lat->displacement(a, c);
        const auto dcb = lat->displacement(c, b);
        CHECK(dab.manhattan() <= dac.manhattan() + dcb.manhattan());
    }
}

TEST_CASE("displacement rejects mismatched sub-lattices") {
    const auto lat = build_lattice({3, 3, Layout::NonRotated});
    const StabilizerSite* primal = nullptr;
    const StabilizerSite* dual = nullptr;
    for (const auto& s : lat->stabilizers()) {
        if (s.sublattice == Sublattice::Primal) primal = &s;
        if (s.sublattice == Sublattice::Dual) dual = &s;
    }
    CHECK_THROWS_AS(lat->displacement(*primal, *dual), std::invalid_argument);
}

TEST_CASE("chain-step distances equal Manhattan displacement") {
    for (const auto spec : {LatticeSpec{5, 4, Layout::NonRotated}, LatticeSpec{5, 5, Layout::Rotated},
                            LatticeSpec{4, 4, Layout::Rotated}}) {
        const auto lat = build_lattice(spec);
        for (int si = 0; si < 2; ++si) {
            const auto& g = lat->graph(static_cast<Sublattice>(si));
            for (int a = 0; a < g.size(); ++a) {
                for (int b = 0; b < g.size(); ++b) {
                    if (g.dist(a, b) == SublatticeGraph::kUnreachable) continue;
                    const auto da = lat->stabilizer(g.stab_ids[a]);
                    const auto db = lat->stabilizer(g.stab_ids[b]);
                    CHECK(static_cast<int>(g.dist(a, b)) == lat->displacement(da, db).manhattan());
                }
            }
        }
    }
}

TEST_CASE("boundary distances") {
    SUBCASE("d=2: every cell is one step from its boundary") {
        const auto lat = build_lattice({2, 2, Layout::NonRotated});
        for (const auto& s : lat->stabilizers()) {
            CHECK(lat->boundary_distance(s).manhattan() == 1);
        }
    }
    SUBCASE("non-rotated closed form") {
        const auto lat = build_lattice({5, 4, Layout::NonRotated});
        for (const auto& s : lat->stabilizers()) {
            const auto d = lat->boundary_distance(s);
            if (s.sublattice == Sublattice::Primal) {
                CHECK(d.lz == 0);
                CHECK(d.lx == std::min(s.grid.x + 1, (lat->spec().d1 - 1) - s.grid.x));
            } else {
                CHECK(d.lx == 0);
                CHECK(d.lz == std::min(s.grid.z + 1, (lat->spec().d2 - 1) - s.grid.z));
            }
        }
    }
    SUBCASE("central cell of d=5 square") {
        const auto lat = build_lattice({5, 5, Layout::NonRotated});
        // Primal columns span grid.x in [0, 3]; central-ish cells sit two
        // steps from the nearer absorbing edge.
        for (const auto& s : lat->stabilizers()) {
            if (s.sublattice != Sublattice::Primal) continue;
            if (s.grid.x == 1 || s.grid.x == 2) CHECK(lat->boundary_distance(s).manhattan() == 2);
        }
    }
}

namespace {

// Independent exhaustive search used to pin matched_rectangle outputs.
LatticeSpec brute_force_rectangle(int d, double aspect, int limit) {
    const long target = static_cast<long>(d) * d + static_cast<long>(d - 1) * (d - 1);
    LatticeSpec best{};
    long best_gap = 1L << 60;
    double best_ratio = 1e300;
    for (int d1 = 2; d1 <= limit; ++d1) {
        for (int d2 = 2; d2 <= limit; ++d2) {
            const long count = static_cast<long>(d1) * d2 + static_cast<long>(d1 - 1) * (d2 - 1);
            if (count > target + 1) continue;
            const long gap = std::labs(count - target);
            const double ratio = std::abs(std::log(double(d1) / d2 / aspect));
            if (gap < best_gap || (gap == best_gap && ratio < best_ratio - 1e-12) ||
                (gap == best_gap && std::abs(ratio - best_ratio) <= 1e-12 && d2 > best.d2)) {
                best = {d1, d2, Layout::NonRotated};
                best_gap = gap;
                best_ratio = ratio;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("matched_rectangle") {
    CHECK(matched_rectangle(5, 1.0) == LatticeSpec{5, 5, Layout::NonRotated});
    CHECK(matched_rectangle(2, 1.0) == LatticeSpec{2, 2, Layout::NonRotated});

    const auto expect = brute_force_rectangle(5, 3.0, 15);
    const auto got = matched_rectangle(5, 3.0);
    CHECK(got == expect);
    const long count = static_cast<long>(got.d1) * got.d2 + static_cast<long>(got.d1 - 1) * (got.d2 - 1);
    CHECK(count <= 41 + 1);

    for (int d : {3, 4, 7}) {
        for (double aspect : {0.5, 1.0, 2.0, 3.5}) {
            CHECK(matched_rectangle(d, aspect) == brute_force_rectangle(d, aspect, 4 * d + 4));
        }
    }
}

TEST_CASE("neighbor pairs share stabilizers") {
    for (const auto spec : {LatticeSpec{4, 3, Layout::NonRotated}, LatticeSpec{3, 3, Layout::Rotated}}) {
        const auto lat = build_lattice(spec);
        CHECK_FALSE(lat->neighbor_pairs().empty());
        for (const auto& [qa, qb] : lat->neighbor_pairs()) {
            std::set<int> sa, sb;
            for (const auto& s : lat->stabilizers()) {
                if (std::find(s.support.begin(), s.support.end(), qa) != s.support.end()) sa.insert(s.id);
                if (std::find(s.support.begin(), s.support.end(), qb) != s.support.end()) sb.insert(s.id);
            }
            std::vector<int> shared;
            std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(shared));
            CHECK_FALSE(shared.empty());
        }
    }
}
