#include "cdsurf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cdsurf/rng.hpp"

namespace cdsurf {

double NoiseSpec::pair_p2(double p, const Lattice& lattice) const {
    if (!pair) return 0.0;
    switch (pair->mode) {
        case Pair::Mode::Fixed: return pair->value;
        case Pair::Mode::ScaleP: return pair->value * p;
        case Pair::Mode::WeightMatched: {
            const double residual = p * (1.0 - single_fraction);
            const double edges = static_cast<double>(lattice.neighbor_pairs().size());
            const double n = static_cast<double>(lattice.num_qubits());
            if (edges == 0) return 0.0;
            // Each pair error touches two qubits: expected weight per qubit
            // from the pair channel is 2 * E * p2 / N.
            return residual * n / (2.0 * edges);
        }
    }
    return 0.0;
}

NoiseModel NoiseSpec::build(double p, const Lattice& lattice, std::uint64_t seed) const {
    const std::size_t n = lattice.num_qubits();
    const double ps = single_p(p);
    NoiseModel model = [&] {
        switch (kind) {
            case NoiseKind::IID: return make_iid(ps, bias, n);
            case NoiseKind::Toy: return make_toy_permutation(ps * toy_l, ps * toy_m, ps * toy_h, n, seed);
            case NoiseKind::Gaussian: return make_gaussian(ps, sigma_p, sigma_tot, n, seed);
        }
        throw std::logic_error("unreachable");
    }();
    if (pair) {
        const double p2 = pair_p2(p, lattice);
        if (p2 > 0) model = model.with_pair_channel({pair->kind, p2, pair->pxx});
    }
    return model;
}

double mean_flip_probability(const NoiseModel& noise, const CodeLayout& code) {
    const int n = code.lattice().num_qubits();
    double sum = 0.0;
    for (int q = 0; q < n; ++q) {
        sum += sublattice_flip_probability(noise, q, code, Sublattice::Primal);
        sum += sublattice_flip_probability(noise, q, code, Sublattice::Dual);
    }
    return sum / (2.0 * n);
}

WeightMetric MetricSpec::resolve(const NoiseModel& noise, const CodeLayout& code) const {
    switch (kind) {
        case MetricKind::Manhattan:
            return WeightMetric::manhattan();
        case MetricKind::WeightedManhattan:
            if (wx && wz) return WeightMetric::weighted_manhattan(*wx, *wz);
            return WeightMetric::weighted_manhattan_from_noise(noise);
        case MetricKind::Dijkstra:
            return WeightMetric::dijkstra();
        case MetricKind::Degeneracy: {
            const double v = p1 ? *p1 : std::clamp(mean_flip_probability(noise, code), 1e-12, 1.0 - 1e-12);
            return WeightMetric::degeneracy(v, literal_form);
        }
        case MetricKind::DegeneracyCorrelation: {
            const double v1 = p1 ? *p1 : std::clamp(mean_flip_probability(noise, code), 1e-12, 1.0 - 1e-12);
            double v2;
            if (p2) {
                v2 = *p2;
            } else {
                if (!noise.pair_channel()) {
                    throw std::invalid_argument("degeneracy_correlation auto p2 requires a pair channel");
                }
                v2 = std::clamp(noise.pair_channel()->p2 * 0.5, 1e-12, 1.0 - 1e-12);
            }
            return WeightMetric::degeneracy_correlation(v1, v2);
        }
    }
    throw std::logic_error("unreachable");
}

std::string MetricSpec::name() const {
    WeightMetric m;
    m.kind = kind;
    m.literal_form = literal_form;
    return m.name();
}

namespace {

struct LogicalChain {
    std::vector<std::pair<int, std::uint8_t>> support;  // (qubit, letter)
};

LogicalChain chain_of(const PauliOperator& op) {
    LogicalChain c;
    for (std::size_t q : op.support()) {
        c.support.emplace_back(static_cast<int>(q), static_cast<std::uint8_t>(op.get(q)));
    }
    return c;
}

// Anticommutation parity of a letter array against a sparse chain.
bool anticommutes_with_chain(const std::vector<std::uint8_t>& letters, const LogicalChain& chain) {
    int parity = 0;
    for (const auto& [q, l] : chain.support) {
        const std::uint8_t e = letters[q];
        if (e != 0 && e != l) parity ^= 1;
    }
    return parity != 0;
}

struct PointTally {
    long failures = 0;
    long xbar = 0, zbar = 0, ybar = 0;

    void add(const PointTally& o) {
        failures += o.failures;
        xbar += o.xbar;
        zbar += o.zbar;
        ybar += o.ybar;
    }
};

// Immutable context shared by all workers of one sweep point.
struct PointContext {
    const ExperimentSpec& spec;
    std::shared_ptr<const Lattice> lattice;
    double p;
    std::uint64_t point_key;
    // iid fast path: one noise/code per point
    std::optional<NoiseModel> shared_noise;
    std::optional<CodeLayout> shared_code;
};

struct TrialWorkspace {
    std::vector<std::uint8_t> error_letters;
    std::vector<int> hits;
    std::array<std::vector<std::uint8_t>, 2> synd;
    std::array<std::vector<int>, 2> defects;
    std::vector<std::uint8_t> correction;
    std::vector<std::uint8_t> residual;
};

void accumulate_defects(const CodeLayout& code, const std::vector<std::uint8_t>& letters,
                        const std::vector<int>& hits, TrialWorkspace& ws) {
    const auto& lat = code.lattice();
    for (int sub = 0; sub < 2; ++sub) {
        ws.synd[sub].assign(lat.graph(static_cast<Sublattice>(sub)).size(), 0);
        ws.defects[sub].clear();
    }
    for (int q : hits) {
        const auto e = static_cast<Pauli>(letters[q]);
        for (int sub = 0; sub < 2; ++sub) {
            const auto s = static_cast<Sublattice>(sub);
            if (e == code.sublattice_letter(q, s)) continue;  // commutes
            const auto& edge = lat.graph(s).edges[q];
            ws.synd[sub][edge.a] ^= 1;
            if (edge.b != DetectorEdge::kBoundary) ws.synd[sub][edge.b] ^= 1;
        }
    }
    for (int sub = 0; sub < 2; ++sub) {
        const int n = static_cast<int>(ws.synd[sub].size());
        for (int v = 0; v < n; ++v) {
            if (ws.synd[sub][v]) ws.defects[sub].push_back(v);
        }
    }
}

LogicalEffect classify(const std::vector<std::uint8_t>& residual, const LogicalChain& xbar,
                       const LogicalChain& zbar) {
    const bool x_flip = anticommutes_with_chain(residual, zbar);
    const bool z_flip = anticommutes_with_chain(residual, xbar);
    if (x_flip && z_flip) return LogicalEffect::YbarFlip;
    if (x_flip) return LogicalEffect::XbarFlip;
    if (z_flip) return LogicalEffect::ZbarFlip;
    return LogicalEffect::None;
}

PointTally run_trials(const PointContext& ctx, long t_begin, long t_end,
                      const std::atomic<bool>* abort) {
    PointTally tally;
    TrialWorkspace ws;
    const Lattice& lat = *ctx.lattice;
    const int n = lat.num_qubits();

    std::optional<Decoder> shared_decoder;
    std::optional<LogicalChain> shared_xbar, shared_zbar;
    if (ctx.shared_code) {
        shared_decoder.emplace(*ctx.shared_code, ctx.spec.metric.resolve(*ctx.shared_noise, *ctx.shared_code),
                               *ctx.shared_noise);
        shared_xbar = chain_of(ctx.shared_code->logicals().xbar);
        shared_zbar = chain_of(ctx.shared_code->logicals().zbar);
    }

    for (long t = t_begin; t < t_end; ++t) {
        if (abort && (t & 1023) == 0 && abort->load(std::memory_order_relaxed)) break;
        const std::uint64_t trial_key = mix_seed(ctx.point_key, static_cast<std::uint64_t>(t));

        std::optional<NoiseModel> trial_noise;
        std::optional<CodeLayout> trial_code;
        std::optional<Decoder> trial_decoder;
        std::optional<LogicalChain> trial_xbar, trial_zbar;

        const NoiseModel* noise = ctx.shared_noise ? &*ctx.shared_noise : nullptr;
        const CodeLayout* code = ctx.shared_code ? &*ctx.shared_code : nullptr;
        Decoder* decoder = shared_decoder ? &*shared_decoder : nullptr;
        const LogicalChain* xbar = shared_xbar ? &*shared_xbar : nullptr;
        const LogicalChain* zbar = shared_zbar ? &*shared_zbar : nullptr;

        if (!ctx.shared_code) {
            trial_noise.emplace(ctx.spec.noise.build(ctx.p, lat, mix_seed(trial_key, 0)));
            noise = &*trial_noise;
            trial_code.emplace(build_family(ctx.spec.family, ctx.lattice, noise, /*full_checks=*/false));
            code = &*trial_code;
            trial_decoder.emplace(*code, ctx.spec.metric.resolve(*noise, *code), *noise);
            decoder = &*trial_decoder;
            trial_xbar = chain_of(code->logicals().xbar);
            trial_zbar = chain_of(code->logicals().zbar);
            xbar = &*trial_xbar;
            zbar = &*trial_zbar;
        }

        sample_error_into(*noise, lat, mix_seed(trial_key, 1), ws.error_letters, ws.hits);
        accumulate_defects(*code, ws.error_letters, ws.hits, ws);

        ws.correction.assign(n, 0);
        decoder->decode_defects(ws.defects, ws.correction);

        ws.residual.assign(n, 0);
        for (int q = 0; q < n; ++q) {
            ws.residual[q] = static_cast<std::uint8_t>(ws.error_letters[q] ^ ws.correction[q]);
        }
        const LogicalEffect eff = classify(ws.residual, *xbar, *zbar);
        if (eff != LogicalEffect::None) {
            ++tally.failures;
            if (eff == LogicalEffect::XbarFlip) ++tally.xbar;
            if (eff == LogicalEffect::ZbarFlip) ++tally.zbar;
            if (eff == LogicalEffect::YbarFlip) ++tally.ybar;
        }
    }
    return tally;
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec, int workers, const ProgressFn& progress,
                      const std::atomic<bool>* abort) {
    if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (spec.lattices.empty()) throw std::invalid_argument("no lattices specified");
    for (std::size_t i = 1; i < spec.p_values.size(); ++i) {
        if (!(spec.p_values[i] > spec.p_values[i - 1])) {
            throw std::invalid_argument("p grid must be strictly increasing");
        }
    }
    if (spec.p_values.empty()) throw std::invalid_argument("empty p grid");
    workers = std::max(1, workers);

    SweepResult result;
    result.spec = spec;

    for (const auto& lspec : spec.lattices) {
        auto lattice = build_lattice(lspec);
        for (double p : spec.p_values) {
            PointContext ctx{spec, lattice, p,
                             mix_seed_double(
                                 mix_seed(mix_seed(mix_seed(spec.master_seed,
                                                            static_cast<std::uint64_t>(lspec.d1)),
                                                   static_cast<std::uint64_t>(lspec.d2)),
                                          static_cast<std::uint64_t>(lspec.layout == Layout::Rotated)),
                                 p),
                             std::nullopt, std::nullopt};
            if (!spec.noise.per_trial()) {
                ctx.shared_noise = spec.noise.build(p, *lattice, 0);
                ctx.shared_code.emplace(
                    build_family(spec.family, lattice, &*ctx.shared_noise, /*full_checks=*/false));
            }

            PointTally tally;
            try {
                if (workers == 1) {
                    tally = run_trials(ctx, 0, spec.trials, abort);
                } else {
                    std::vector<PointTally> parts(workers);
                    std::vector<std::thread> pool;
                    const long per = (spec.trials + workers - 1) / workers;
                    for (int w = 0; w < workers; ++w) {
                        const long lo = w * per;
                        const long hi = std::min<long>(spec.trials, lo + per);
                        if (lo >= hi) break;
                        pool.emplace_back([&, w, lo, hi] { parts[w] = run_trials(ctx, lo, hi, abort); });
                    }
                    for (auto& th : pool) th.join();
                    for (const auto& part : parts) tally.add(part);
                }
            } catch (const std::exception& e) {
                throw std::runtime_error("sweep '" + spec.name + "' failed at d1=" + std::to_string(lspec.d1) +
                                         " d2=" + std::to_string(lspec.d2) + " p=" + std::to_string(p) +
                                         ": " + e.what());
            }

            if (abort && abort->load()) {
                result.completed = false;
                return result;
            }

            PointResult pr;
            pr.lattice = lspec;
            pr.p = p;
            pr.p2 = spec.noise.pair_p2(p, *lattice);
            pr.trials = spec.trials;
            pr.failures = tally.failures;
            pr.xbar_failures = tally.xbar;
            pr.zbar_failures = tally.zbar;
            pr.ybar_failures = tally.ybar;
            result.points.push_back(pr);

            if (progress) {
                std::ostringstream msg;
                msg << spec.name << " d=(" << lspec.d1 << "," << lspec.d2 << ") p=" << p
                    << " p_fail=" << pr.p_fail() << " +- " << pr.stderr_();
                progress(msg.str());
            }
        }
    }
    return result;
}

nlohmann::json ExperimentSpec::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["family"] = cdsurf::to_string(family);
    nlohmann::json lat = nlohmann::json::array();
    for (const auto& l : lattices) {
        lat.push_back({{"d1", l.d1}, {"d2", l.d2}, {"layout", cdsurf::to_string(l.layout)}});
    }
    j["lattices"] = std::move(lat);
    j["p_values"] = p_values;
    j["trials"] = trials;
    j["seed"] = master_seed;
    nlohmann::json n;
    n["kind"] = cdsurf::to_string(noise.kind);
    if (noise.kind == NoiseKind::IID) n["bias"] = {noise.bias.rx, noise.bias.ry, noise.bias.rz};
    if (noise.kind == NoiseKind::Gaussian) {
        n["sigma_p"] = noise.sigma_p;
        n["sigma_tot"] = noise.sigma_tot;
    }
    if (noise.kind == NoiseKind::Toy) n["toy"] = {noise.toy_l, noise.toy_m, noise.toy_h};
    if (noise.single_fraction != 1.0) n["single_fraction"] = noise.single_fraction;
    if (noise.pair) {
        nlohmann::json pj;
        pj["kind"] = cdsurf::to_string(noise.pair->kind);
        pj["mode"] = noise.pair->mode == NoiseSpec::Pair::Mode::Fixed     ? "fixed"
                     : noise.pair->mode == NoiseSpec::Pair::Mode::ScaleP ? "scale"
                                                                         : "weight_matched";
        pj["value"] = noise.pair->value;
        pj["pxx"] = noise.pair->pxx;
        n["pair"] = std::move(pj);
    }
    j["noise"] = std::move(n);
    nlohmann::json m;
    m["kind"] = metric.name();
    if (metric.p1) m["p1"] = *metric.p1;
    if (metric.p2) m["p2"] = *metric.p2;
    if (metric.wx) m["wx"] = *metric.wx;
    if (metric.wz) m["wz"] = *metric.wz;
    j["metric"] = std::move(m);
    return j;
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "family,metric,d1,d2,p,sigma_p,sigma_tot,pair_kind,p2,trials,failures,p_fail,stderr,seed\n";
    const auto& spec = result.spec;
    for (const auto& pt : result.points) {
        out << to_string(spec.family) << ',' << spec.metric.name() << ',' << pt.lattice.d1 << ','
            << pt.lattice.d2 << ',' << format_double(pt.p) << ',' << format_double(spec.noise.sigma_p)
            << ',' << format_double(spec.noise.sigma_tot) << ','
            << (spec.noise.pair ? to_string(spec.noise.pair->kind) : std::string("none")) << ','
            << format_double(pt.p2) << ',' << pt.trials << ',' << pt.failures << ','
            << format_double(pt.p_fail()) << ',' << format_double(pt.stderr_()) << ','
            << spec.master_seed << "\n";
    }
}

void write_manifest(const SweepResult& result, const std::string& path) {
    nlohmann::json j;
    j["version"] = result.version;
    j["completed"] = result.completed;
    j["spec"] = result.spec.to_json();
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : result.points) {
        pts.push_back({{"d1", pt.lattice.d1},
                       {"d2", pt.lattice.d2},
                       {"layout", to_string(pt.lattice.layout)},
                       {"p", pt.p},
                       {"p2", pt.p2},
                       {"trials", pt.trials},
                       {"failures", pt.failures},
                       {"xbar_failures", pt.xbar_failures},
                       {"zbar_failures", pt.zbar_failures},
                       {"ybar_failures", pt.ybar_failures},
                       {"p_fail", pt.p_fail()},
                       {"stderr", pt.stderr_()}});
    }
    j["points"] = std::move(pts);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::vector<CsvRow> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 14) throw std::runtime_error("malformed CSV row in " + path);
        CsvRow r;
        r.family = f[0];
        r.metric = f[1];
        r.d1 = std::stoi(f[2]);
        r.d2 = std::stoi(f[3]);
        r.p = std::stod(f[4]);
        r.sigma_p = std::stod(f[5]);
        r.sigma_tot = std::stod(f[6]);
        r.pair_kind = f[7];
        r.p2 = std::stod(f[8]);
        r.trials = std::stol(f[9]);
        r.failures = std::stol(f[10]);
        r.p_fail = std::stod(f[11]);
        r.stderr_ = std::stod(f[12]);
        r.seed = std::stoull(f[13]);
        r.source = path;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<CsvRow> read_csv_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<CsvRow> rows;
    for (const auto& f : files) {
        auto part = read_csv(f);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::vector<ExperimentSpec> degeneracy_study_specs(const std::vector<int>& distances, long trials,
                                                   std::uint64_t master_seed) {
    std::vector<ExperimentSpec> specs;
    struct Panel {
        Layout layout;
        bool pair_errors;
        double p;
        const char* tag;
    };
    const Panel panels[] = {{Layout::NonRotated, false, 0.1, "nonrot_single"},
                            {Layout::Rotated, false, 0.1, "rot_single"},
                            {Layout::NonRotated, true, 0.1, "nonrot_pair"},
                            {Layout::Rotated, true, 0.05, "rot_pair"}};
    for (const auto& panel : panels) {
        for (const bool degen : {false, true}) {
            ExperimentSpec spec;
            spec.name = std::string("fig13_") + panel.tag + (degen ? "_degeneracy" : "_manhattan");
            spec.family = CodeFamily::CSS;
            for (int d : distances) spec.lattices.push_back({d, d, panel.layout});
            spec.p_values = {panel.p};
            spec.trials = trials;
            spec.master_seed = master_seed;
            spec.noise.kind = NoiseKind::IID;
            spec.noise.bias = depolarizing_bias();
            if (panel.pair_errors) {
                // Pure pair channel: the sweep p feeds the per-edge rate.
                spec.noise.single_fraction = 0.0;
                spec.noise.pair = NoiseSpec::Pair{PairKind::XX_ZZ, NoiseSpec::Pair::Mode::ScaleP, 0.5, 0.5};
            }
            spec.metric.kind = degen ? MetricKind::Degeneracy : MetricKind::Manhattan;
            // Pure path-counting form: the Manhattan weight plus the binomial
            // degeneracy term, with no channel parameters.
            spec.metric.literal_form = degen;
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

std::vector<DegeneracyStudyRow> degeneracy_study(const std::vector<int>& distances, long trials,
                                                 std::uint64_t master_seed, int workers,
                                                 const ProgressFn& progress) {
    const auto specs = degeneracy_study_specs(distances, trials, master_seed);
    std::vector<DegeneracyStudyRow> rows;
    for (std::size_t i = 0; i + 1 < specs.size(); i += 2) {
        const auto base = run_sweep(specs[i], workers, progress);
        const auto degen = run_sweep(specs[i + 1], workers, progress);
        for (std::size_t k = 0; k < base.points.size(); ++k) {
            DegeneracyStudyRow row;
            row.layout = base.points[k].lattice.layout;
            row.pair_errors = specs[i].noise.pair.has_value();
            row.d = base.points[k].lattice.d1;
            row.p = base.points[k].p;
            row.p_fail_manhattan = base.points[k].p_fail();
            row.stderr_manhattan = base.points[k].stderr_();
            row.p_fail_degeneracy = degen.points[k].p_fail();
            row.stderr_degeneracy = degen.points[k].stderr_();
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace cdsurf
