// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Expect a few CPU-hours at the pinned trial counts.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cdsurf/code.hpp"
#include "cdsurf/decoder.hpp"
#include "cdsurf/experiments.hpp"
#include "cdsurf/fit.hpp"
#include "cdsurf/matching.hpp"
#include "cdsurf/noise.hpp"
#include "cdsurf/rng.hpp"

#include "../oracles.hpp"

using namespace cdsurf;

namespace {

int g_workers = 1;
bool g_verbose = false;

void progress(const std::string& msg) {
    if (g_verbose) std::cerr << "    " << msg << "\n";
}

std::vector<double> p_grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double p = lo; p < hi + step / 2; p += step) out.push_back(p);
    return out;
}

std::vector<CurvePoint> to_curve_points(const SweepResult& r) {
    std::vector<CurvePoint> pts;
    for (const auto& pt : r.points) {
        pts.push_back({pt.lattice.distance(), pt.p, pt.p_fail(), pt.stderr_(), pt.trials});
    }
    return pts;
}

ExperimentSpec base_spec(const std::string& name, CodeFamily family, std::vector<int> distances,
                         std::vector<double> p_values, long trials, std::uint64_t seed,
                         Layout layout = Layout::NonRotated) {
    ExperimentSpec spec;
    spec.name = name;
    spec.family = family;
    for (int d : distances) spec.lattices.push_back({d, d, layout});
    spec.p_values = std::move(p_values);
    spec.trials = trials;
    spec.master_seed = seed;
    spec.noise.kind = NoiseKind::IID;
    spec.noise.bias = depolarizing_bias();
    spec.metric.kind = MetricKind::Manhattan;
    return spec;
}

// Pooled improvement significance of metric A over metric B: positive z means
// A fails less.
double pooled_improvement_z(const std::vector<PointResult>& base, const std::vector<PointResult>& alt) {
    double diff = 0, var = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        diff += base[i].p_fail() - alt[i].p_fail();
        var += base[i].stderr_() * base[i].stderr_() + alt[i].stderr_() * alt[i].stderr_();
    }
    return diff / std::sqrt(std::max(var, 1e-30));
}

// ---- criteria -------------------------------------------------------------

bool criterion1(std::string& detail) {
    auto spec = base_spec("c1_css_iid", CodeFamily::CSS, {7, 9, 11, 13}, p_grid(0.14, 0.19, 0.01),
                          50000, 20260810);
    const auto result = run_sweep(spec, g_workers, progress);
    const auto fit = fit_threshold(to_curve_points(result), {0.14, 0.19});
    std::ostringstream os;
    os << "p_th = " << fit.p_th << " +- " << fit.p_th_stderr() << " (target 0.162 +- 0.010)";
    detail = os.str();
    return std::abs(fit.p_th - 0.162) <= 0.010;
}

bool criterion2(std::string& detail) {
    const std::uint64_t seed = 20260811;
    auto mmhh = base_spec("c2_mmhh", CodeFamily::MMHH, {7, 9, 11, 13}, p_grid(0.14, 0.20, 0.01),
                          50000, seed);
    mmhh.noise.kind = NoiseKind::Gaussian;
    mmhh.noise.sigma_p = 0.5;
    mmhh.noise.sigma_tot = 0.0;
    auto css = mmhh;
    css.name = "c2_css";
    css.family = CodeFamily::CSS;

    const auto rm = run_sweep(mmhh, g_workers, progress);
    const auto rc = run_sweep(css, g_workers, progress);
    const auto fm = fit_threshold(to_curve_points(rm), {0.15, 0.20});
    const auto fc = fit_threshold(to_curve_points(rc), {0.14, 0.19});
    std::ostringstream os;
    os << "mmhh p_th = " << fm.p_th << " (target 0.185 +- 0.010), css p_th = " << fc.p_th
       << ", gap = " << fm.p_th - fc.p_th << " (need >= 0.015)";
    detail = os.str();
    return std::abs(fm.p_th - 0.185) <= 0.010 && (fm.p_th - fc.p_th) >= 0.015;
}

bool criterion3(std::string& detail) {
    const std::uint64_t seed = 20260812;
    auto dij = base_spec("c3_mhhm_dijkstra", CodeFamily::MHHM, {7, 9, 11, 13},
                         p_grid(0.16, 0.23, 0.01), 50000, seed);
    dij.noise.kind = NoiseKind::Gaussian;
    dij.noise.sigma_p = 0.5;
    dij.noise.sigma_tot = 0.5;
    dij.metric.kind = MetricKind::Dijkstra;
    auto man = dij;
    man.name = "c3_mhhm_wmanhattan";
    man.metric.kind = MetricKind::WeightedManhattan;

    const auto rd = run_sweep(dij, g_workers, progress);
    const auto rm = run_sweep(man, g_workers, progress);
    const auto fd = fit_threshold(to_curve_points(rd), {0.17, 0.23});
    const auto fm = fit_threshold(to_curve_points(rm), {0.16, 0.22});
    std::ostringstream os;
    os << "dijkstra p_th = " << fd.p_th << " (target 0.206 +- 0.012), weighted-manhattan p_th = "
       << fm.p_th << ", gap = " << fd.p_th - fm.p_th << " (need >= 0.010)";
    detail = os.str();
    return std::abs(fd.p_th - 0.206) <= 0.012 && (fd.p_th - fm.p_th) >= 0.010;
}

bool criterion4(std::string& detail) {
    const std::uint64_t seed = 20260813;
    auto css = base_spec("c4_css", CodeFamily::CSS, {5, 7, 9, 11}, {0.1}, 100000, seed);
    css.noise.kind = NoiseKind::Gaussian;
    css.noise.sigma_p = 0.5;
    css.noise.sigma_tot = 0.5;
    auto mmhh = css;
    mmhh.name = "c4_mmhh";
    mmhh.family = CodeFamily::MMHH;

    const auto rc = run_sweep(css, g_workers, progress);
    const auto rm = run_sweep(mmhh, g_workers, progress);

    bool monotone = true, dominated = true;
    for (std::size_t i = 0; i < rc.points.size(); ++i) {
        if (i > 0 && (rc.points[i].p_fail() >= rc.points[i - 1].p_fail() ||
                      rm.points[i].p_fail() >= rm.points[i - 1].p_fail())) {
            monotone = false;
        }
        if (rm.points[i].p_fail() >= rc.points[i].p_fail()) dominated = false;
    }
    const auto sc = subthreshold_scan(to_curve_points(rc));
    const auto sm = subthreshold_scan(to_curve_points(rm));
    const double sep = (sc.slope - sm.slope) /
                       std::sqrt(sc.slope_stderr * sc.slope_stderr + sm.slope_stderr * sm.slope_stderr);
    std::ostringstream os;
    os << "css slope = " << sc.slope << " +- " << sc.slope_stderr << ", mmhh slope = " << sm.slope
       << " +- " << sm.slope_stderr << ", separation = " << sep << " sigma";
    detail = os.str();
    return monotone && dominated && sep >= 2.0;
}

bool criterion5(std::string& detail) {
    const std::uint64_t seed = 20260814;
    auto man = base_spec("c5_manhattan", CodeFamily::XZZX, {5, 7, 9, 11}, {0.125}, 100000, seed);
    man.noise.single_fraction = 0.25;
    man.noise.pair = NoiseSpec::Pair{PairKind::XZ, NoiseSpec::Pair::Mode::WeightMatched, 0, 0.5};
    auto deg = man;
    deg.name = "c5_degeneracy";
    deg.metric.kind = MetricKind::Degeneracy;
    auto cor = man;
    cor.name = "c5_degeneracy_correlation";
    cor.metric.kind = MetricKind::DegeneracyCorrelation;

    const auto rman = run_sweep(man, g_workers, progress);
    const auto rdeg = run_sweep(deg, g_workers, progress);
    const auto rcor = run_sweep(cor, g_workers, progress);

    bool deg_beats = true;
    bool cor_matches = true;
    std::ostringstream os;
    for (std::size_t i = 0; i < rman.points.size(); ++i) {
        const int d = rman.points[i].lattice.distance();
        const double pm = rman.points[i].p_fail(), sm = rman.points[i].stderr_();
        const double pd = rdeg.points[i].p_fail(), sd = rdeg.points[i].stderr_();
        const double pc = rcor.points[i].p_fail(), sc = rcor.points[i].stderr_();
        if (d >= 7 && !(pm - pd > 2.0 * std::sqrt(sm * sm + sd * sd))) deg_beats = false;
        if (std::abs(pd - pc) > 2.0 * std::sqrt(sd * sd + sc * sc)) cor_matches = false;
        os << "d=" << d << ": man " << pm << " deg " << pd << " deg+corr " << pc << "; ";
    }
    detail = os.str();
    return deg_beats && cor_matches;
}

bool criterion6(std::string& detail) {
    const auto rows = degeneracy_study({5, 7, 9, 11}, 100000, 20260815, g_workers, progress);
    // Partition rows into the four panels.
    struct Panel {
        std::vector<PointResult> man, deg;
    };
    auto key = [](Layout l, bool pair) { return (l == Layout::Rotated ? 2 : 0) + (pair ? 1 : 0); };
    std::array<std::vector<DegeneracyStudyRow>, 4> panels;
    for (const auto& r : rows) panels[key(r.layout, r.pair_errors)].push_back(r);

    auto panel_z = [](const std::vector<DegeneracyStudyRow>& panel) {
        double diff = 0, var = 0;
        for (const auto& r : panel) {
            diff += r.p_fail_manhattan - r.p_fail_degeneracy;
            var += r.stderr_manhattan * r.stderr_manhattan + r.stderr_degeneracy * r.stderr_degeneracy;
        }
        return diff / std::sqrt(std::max(var, 1e-30));
    };

    const double z_nonrot_single = panel_z(panels[key(Layout::NonRotated, false)]);
    const double z_rot_single = panel_z(panels[key(Layout::Rotated, false)]);
    const double z_nonrot_pair = panel_z(panels[key(Layout::NonRotated, true)]);
    const double z_rot_pair = panel_z(panels[key(Layout::Rotated, true)]);

    std::ostringstream os;
    os << "degeneracy improvement z-scores: nonrot/single " << z_nonrot_single << ", rot/single "
       << z_rot_single << ", nonrot/pair " << z_nonrot_pair << ", rot/pair " << z_rot_pair;
    detail = os.str();
    return z_rot_single >= 2.0 && z_nonrot_pair >= 2.0 && z_nonrot_single < 2.0 && z_rot_pair < 2.0;
}

bool criterion7(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (const auto family : {CodeFamily::CSS, CodeFamily::XZZX}) {
        auto lat = build_lattice({3, 3, Layout::NonRotated});
        const auto code = build_family(family, lat);
        for (double p : {0.02, 0.05, 0.10}) {
            const auto noise = make_iid(p, depolarizing_bias(), lat->num_qubits());
            const auto rates = oracles::exact_failure_rates(code, noise, WeightMetric::manhattan());
            const bool above = rates.mwpm >= rates.ml - 1e-12;
            const bool close = rates.mwpm <= 1.3 * rates.ml;
            if (!above || !close) ok = false;
            os << to_string(family) << " p=" << p << ": mwpm " << rates.mwpm << " ml " << rates.ml
               << " ratio " << rates.mwpm / rates.ml << "; ";
        }
    }
    detail = os.str();
    return ok;
}

bool criterion8(std::string& detail) {
    std::ostringstream os;
    bool ok = true;

    // (a) 1000 random consistent deformations on d <= 5 commute.
    {
        Rng rng(424242);
        const Pauli letters[3] = {Pauli::X, Pauli::Y, Pauli::Z};
        int bad = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int d1 = 2 + static_cast<int>(rng.next_below(4));
            const int d2 = 2 + static_cast<int>(rng.next_below(4));
            const auto layout = rng.next_below(2) ? Layout::Rotated : Layout::NonRotated;
            auto lat = build_lattice({d1, d2, layout});
            std::vector<Pauli> v(lat->num_qubits()), h(lat->num_qubits());
            for (int q = 0; q < lat->num_qubits(); ++q) {
                const int a = static_cast<int>(rng.next_below(3));
                const int b = (a + 1 + static_cast<int>(rng.next_below(2))) % 3;
                v[q] = letters[a];
                h[q] = letters[b];
            }
            const CodeLayout code(lat, CodeFamily::Custom, v, h, /*full_checks=*/false);
            const auto& ops = code.stabilizer_ops();
            for (std::size_t i = 0; i < ops.size() && bad == 0; ++i) {
                for (std::size_t j = i + 1; j < ops.size(); ++j) {
                    if (!ops[i].commutes_with(ops[j])) {
                        ++bad;
                        break;
                    }
                }
            }
        }
        if (bad) ok = false;
        os << "(a) noncommuting deformations: " << bad << "; ";
    }

    // (b) every weight-1 error on every built d=3 family decodes to none.
    {
        int failures = 0;
        for (const auto layout : {Layout::NonRotated, Layout::Rotated}) {
            auto lat = build_lattice({3, 3, layout});
            const int n = lat->num_qubits();
            const auto noise = make_toy_permutation(0.01, 0.03, 0.06, n, 5);
            for (const auto family : {CodeFamily::CSS, CodeFamily::XY, CodeFamily::XZZX,
                                      CodeFamily::XXZZ, CodeFamily::MHHM, CodeFamily::MMHH}) {
                const auto code = build_family(family, lat, &noise);
                Decoder dec(code, WeightMetric::manhattan(), noise);
                for (int q = 0; q < n; ++q) {
                    for (const auto p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                        const auto err = PauliOperator::single(n, q, p);
                        const auto corr = dec.decode(extract_syndrome(err, code));
                        if (is_logical_failure(err * corr.op, code.logicals(), code) !=
                            LogicalEffect::None) {
                            ++failures;
                        }
                    }
                }
            }
        }
        if (failures) ok = false;
        os << "(b) weight-1 failures: " << failures << "; ";
    }

    // (c) sub-lattice confinement of single-Z on XZZX and of pair errors.
    {
        int violations = 0;
        auto count_sides = [](const CodeLayout& code, const PauliOperator& err) {
            const auto syn = extract_syndrome(err, code);
            int primal = 0, dual = 0;
            for (const auto& s : code.lattice().stabilizers()) {
                if (!syn.bits[s.id]) continue;
                (s.sublattice == Sublattice::Primal ? primal : dual)++;
            }
            return std::pair{primal, dual};
        };
        auto lat = build_lattice({5, 5, Layout::NonRotated});
        const int n = lat->num_qubits();
        const auto xzzx = build_xzzx(lat);
        for (int q = 0; q < n; ++q) {
            const auto [p, d] = count_sides(xzzx, PauliOperator::single(n, q, Pauli::Z));
            if (p != 0 && d != 0) ++violations;
        }
        const auto css = build_css(lat);
        for (const auto& [qa, qb] : lat->neighbor_pairs()) {
            for (const auto letter : {Pauli::X, Pauli::Z}) {
                PauliOperator err(n);
                err.set(qa, letter);
                err.set(qb, letter);
                const auto [p, d] = count_sides(css, err);
                if (p != 0 && d != 0) ++violations;
            }
            for (const bool fwd : {true, false}) {
                PauliOperator err(n);
                err.set(qa, fwd ? Pauli::X : Pauli::Z);
                err.set(qb, fwd ? Pauli::Z : Pauli::X);
                const auto [p, d] = count_sides(xzzx, err);
                if (p != 0 && d != 0) ++violations;
            }
        }
        if (violations) ok = false;
        os << "(c) sub-lattice violations: " << violations << "; ";
    }

    // (d) matcher equals the exhaustive optimum on 1000 random graphs.
    {
        Rng rng(314159);
        int mismatches = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int nodes = 2 * (1 + static_cast<int>(rng.next_below(6)));
            std::vector<WeightedEdge> edges;
            for (int u = 0; u < nodes; ++u) {
                for (int v = u + 1; v < nodes; ++v) {
                    if (rng.next_below(100) < 80) edges.push_back({u, v, rng.next_double() * 5.0});
                }
            }
            const double oracle = oracles::brute_force_mwpm(nodes, edges);
            if (!std::isfinite(oracle)) {
                try {
                    min_weight_perfect_matching(nodes, edges);
                    ++mismatches;
                } catch (const std::invalid_argument&) {
                }
                continue;
            }
            const auto pairs = min_weight_perfect_matching(nodes, edges);
            if (std::abs(matching_total_weight(pairs, edges) - oracle) > 1e-8) ++mismatches;
        }
        if (mismatches) ok = false;
        os << "(d) matcher mismatches: " << mismatches << "; ";
    }

    // (e) toy-permutation layout equivalence.
    {
        int mismatches = 0;
        auto lat = build_lattice({5, 5, Layout::NonRotated});
        const int n = lat->num_qubits();
        // Un-permuted noise: x = m, y = l, z = h.
        std::vector<QubitRates> unperm(n, {0.03, 0.01, 0.06});
        const NoiseModel unperm_noise(unperm, {NoiseKind::Toy, 0.1, 0, 0, 0});
        const auto mmhh0 = build_mmhh(lat, unperm_noise);
        const auto xxzz = build_xxzz(lat);
        for (int q = 0; q < n; ++q) {
            if (mmhh0.v_letter(q) != xxzz.v_letter(q) || mmhh0.h_letter(q) != xxzz.h_letter(q)) {
                ++mismatches;
            }
        }
        const auto noise = make_toy_permutation(0.01, 0.03, 0.06, n, 2026);
        const auto mmhh = build_mmhh(lat, noise);
        for (int q = 0; q < n; ++q) {
            const auto& r = noise.rates(q);
            const auto ord = rate_ordering(r.x, r.y, r.z);
            const auto map = [&](Pauli p) { return p == Pauli::X ? ord.medium : ord.high; };
            if (mmhh.v_letter(q) != map(xxzz.v_letter(q)) || mmhh.h_letter(q) != map(xxzz.h_letter(q))) {
                ++mismatches;
            }
        }
        if (mismatches) ok = false;
        os << "(e) layout mismatches: " << mismatches;
    }

    detail = os.str();
    return ok;
}

bool criterion9(std::string& detail) {
    Rng rng(606060);
    const double p_th = 0.16, nu = 1.5, b0 = 0.22, b1 = 1.3, b2 = 2.0;
    std::vector<CurvePoint> pts;
    for (int d : {7, 9, 11, 13}) {
        for (double p = 0.13; p < 0.1901; p += 0.01) {
            const double x = (p - p_th) * std::pow(d, 1.0 / nu);
            const double pf = std::clamp(b0 + b1 * x + b2 * x * x, 1e-6, 0.999);
            const long trials = 100000;
            long fails = 0;
            for (long t = 0; t < trials; ++t) {
                if (rng.next_double() < pf) ++fails;
            }
            CurvePoint pt{d, p, static_cast<double>(fails) / trials, 0.0, trials};
            pt.stderr_ = std::sqrt(pt.p_fail * (1 - pt.p_fail) / trials);
            pts.push_back(pt);
        }
    }
    const auto fit = fit_threshold(pts, {0.13, 0.19});
    std::ostringstream os;
    os << "recovered p_th = " << fit.p_th << " (true 0.16, need +- 0.002), nu = " << fit.nu;
    detail = os.str();
    return std::abs(fit.p_th - p_th) <= 0.002;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--verbose" || arg == "-v") {
            g_verbose = true;
        } else if (arg.rfind("--only=", 0) == 0) {
            std::stringstream ss(arg.substr(7));
            std::string tok;
            while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
        }
    }
    if (const char* env = std::getenv("CDSURF_WORKERS")) {
        g_workers = std::max(1, std::atoi(env));
    } else {
        g_workers = std::max(1u, std::thread::hardware_concurrency());
    }

    struct Criterion {
        int id;
        const char* name;
        bool (*fn)(std::string&);
    };
    const Criterion criteria[] = {
        {1, "CSS baseline threshold", criterion1},
        {2, "tailored-code threshold gain", criterion2},
        {3, "noise-aware decoder gain", criterion3},
        {4, "sub-threshold suppression", criterion4},
        {5, "correlated-noise degeneracy", criterion5},
        {6, "geometry/degeneracy matrix", criterion6},
        {7, "maximum-likelihood oracle", criterion7},
        {8, "property suites", criterion8},
        {9, "threshold-fit closed loop", criterion9},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        std::string detail;
        bool pass = false;
        try {
            pass = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " (" << c.name
                  << "): " << detail << std::endl;
        if (!pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
