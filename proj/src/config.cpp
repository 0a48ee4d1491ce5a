#include "cdsurf/config.hpp"

#include <fstream>
#include <set>

namespace cdsurf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void require_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double get_prob(const json& j, const std::string& path) {
    const double v = get_number(j, path);
    if (v < 0.0 || v > 1.0) fail(path, "expected a probability in [0, 1]");
    return v;
}

long get_positive_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long>() < 1) fail(path, "expected a positive integer");
    return j.get<long>();
}

NoiseSpec parse_noise(const json& j, const std::string& path) {
    require_keys(j, path,
                 {"kind", "bias", "sigma_p", "sigma_tot", "toy", "single_fraction", "pair"});
    NoiseSpec spec;
    if (!j.contains("kind")) fail(path + ".kind", "missing");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid") {
        spec.kind = NoiseKind::IID;
    } else if (kind == "toy") {
        spec.kind = NoiseKind::Toy;
    } else if (kind == "gaussian") {
        spec.kind = NoiseKind::Gaussian;
    } else {
        fail(path + ".kind", "expected iid, toy or gaussian");
    }
    if (j.contains("bias")) {
        if (spec.kind != NoiseKind::IID) fail(path + ".bias", "only valid for iid noise");
        const auto& b = j.at("bias");
        if (!b.is_array() || b.size() != 3) fail(path + ".bias", "expected [rx, ry, rz]");
        spec.bias = {get_prob(b[0], path + ".bias[0]"), get_prob(b[1], path + ".bias[1]"),
                     get_prob(b[2], path + ".bias[2]")};
        const double sum = spec.bias.rx + spec.bias.ry + spec.bias.rz;
        if (std::abs(sum - 1.0) > 1e-9) fail(path + ".bias", "fractions must sum to 1");
    }
    if (j.contains("toy")) {
        if (spec.kind != NoiseKind::Toy) fail(path + ".toy", "only valid for toy noise");
        const auto& t = j.at("toy");
        if (!t.is_array() || t.size() != 3) fail(path + ".toy", "expected [l, m, h] fractions");
        spec.toy_l = get_prob(t[0], path + ".toy[0]");
        spec.toy_m = get_prob(t[1], path + ".toy[1]");
        spec.toy_h = get_prob(t[2], path + ".toy[2]");
        if (!(spec.toy_l <= spec.toy_m && spec.toy_m <= spec.toy_h)) {
            fail(path + ".toy", "fractions must satisfy l <= m <= h");
        }
        if (std::abs(spec.toy_l + spec.toy_m + spec.toy_h - 1.0) > 1e-9) {
            fail(path + ".toy", "fractions must sum to 1");
        }
    } else if (spec.kind == NoiseKind::Toy) {
        fail(path + ".toy", "missing for toy noise");
    }
    if (j.contains("sigma_p")) {
        if (spec.kind != NoiseKind::Gaussian) fail(path + ".sigma_p", "only valid for gaussian noise");
        spec.sigma_p = get_number(j.at("sigma_p"), path + ".sigma_p");
        if (spec.sigma_p < 0) fail(path + ".sigma_p", "must be nonnegative");
    }
    if (j.contains("sigma_tot")) {
        if (spec.kind != NoiseKind::Gaussian) fail(path + ".sigma_tot", "only valid for gaussian noise");
        spec.sigma_tot = get_number(j.at("sigma_tot"), path + ".sigma_tot");
        if (spec.sigma_tot < 0) fail(path + ".sigma_tot", "must be nonnegative");
    }
    if (j.contains("single_fraction")) {
        spec.single_fraction = get_prob(j.at("single_fraction"), path + ".single_fraction");
    }
    if (j.contains("pair")) {
        const auto& pj = j.at("pair");
        require_keys(pj, path + ".pair", {"kind", "mode", "value", "pxx"});
        NoiseSpec::Pair pair;
        if (!pj.contains("kind")) fail(path + ".pair.kind", "missing");
        const std::string pk = pj.at("kind").get<std::string>();
        if (pk == "xx_zz") {
            pair.kind = PairKind::XX_ZZ;
        } else if (pk == "xz") {
            pair.kind = PairKind::XZ;
        } else {
            fail(path + ".pair.kind", "expected xx_zz or xz");
        }
        std::string mode = pj.value("mode", "fixed");
        if (mode == "fixed") {
            pair.mode = NoiseSpec::Pair::Mode::Fixed;
        } else if (mode == "scale") {
            pair.mode = NoiseSpec::Pair::Mode::ScaleP;
        } else if (mode == "weight_matched") {
            pair.mode = NoiseSpec::Pair::Mode::WeightMatched;
        } else {
            fail(path + ".pair.mode", "expected fixed, scale or weight_matched");
        }
        if (pair.mode != NoiseSpec::Pair::Mode::WeightMatched) {
            if (!pj.contains("value")) fail(path + ".pair.value", "missing");
            pair.value = get_number(pj.at("value"), path + ".pair.value");
            if (pair.value < 0) fail(path + ".pair.value", "must be nonnegative");
        } else if (pj.contains("value")) {
            fail(path + ".pair.value", "not used in weight_matched mode");
        }
        if (pj.contains("pxx")) pair.pxx = get_prob(pj.at("pxx"), path + ".pair.pxx");
        spec.pair = pair;
    }
    return spec;
}

MetricSpec parse_metric(const json& j, const std::string& path) {
    require_keys(j, path, {"kind", "p1", "p2", "wx", "wz"});
    MetricSpec spec;
    if (!j.contains("kind")) fail(path + ".kind", "missing");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "manhattan") {
        spec.kind = MetricKind::Manhattan;
    } else if (kind == "weighted_manhattan") {
        spec.kind = MetricKind::WeightedManhattan;
    } else if (kind == "dijkstra") {
        spec.kind = MetricKind::Dijkstra;
    } else if (kind == "degeneracy") {
        spec.kind = MetricKind::Degeneracy;
    } else if (kind == "degeneracy_literal") {
        spec.kind = MetricKind::Degeneracy;
        spec.literal_form = true;
    } else if (kind == "degeneracy_correlation") {
        spec.kind = MetricKind::DegeneracyCorrelation;
    } else {
        fail(path + ".kind", "unknown metric kind");
    }
    if (j.contains("p1")) spec.p1 = get_prob(j.at("p1"), path + ".p1");
    if (j.contains("p2")) spec.p2 = get_prob(j.at("p2"), path + ".p2");
    if (j.contains("wx")) spec.wx = get_number(j.at("wx"), path + ".wx");
    if (j.contains("wz")) spec.wz = get_number(j.at("wz"), path + ".wz");
    if (spec.wx.has_value() != spec.wz.has_value()) {
        fail(path, "wx and wz must be given together");
    }
    return spec;
}

ExperimentSpec parse_experiment(const json& j, const std::string& path, std::uint64_t default_seed) {
    require_keys(j, path,
                 {"name", "family", "layout", "distances", "lattices", "p_values", "trials", "seed",
                  "noise", "metric"});
    ExperimentSpec spec;
    spec.name = j.value("name", std::string("sweep"));
    if (!j.contains("family")) fail(path + ".family", "missing");
    try {
        spec.family = family_from_string(j.at("family").get<std::string>());
    } catch (const std::exception& e) {
        fail(path + ".family", e.what());
    }
    Layout layout = Layout::NonRotated;
    if (j.contains("layout")) {
        try {
            layout = layout_from_string(j.at("layout").get<std::string>());
        } catch (const std::exception& e) {
            fail(path + ".layout", e.what());
        }
    }
    if (j.contains("distances") == j.contains("lattices")) {
        fail(path, "exactly one of 'distances' or 'lattices' is required");
    }
    if (j.contains("distances")) {
        const auto& ds = j.at("distances");
        if (!ds.is_array() || ds.empty()) fail(path + ".distances", "expected a nonempty array");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const int d = static_cast<int>(get_positive_int(ds[i], path + ".distances[" + std::to_string(i) + "]"));
            if (d < 2) fail(path + ".distances[" + std::to_string(i) + "]", "distance must be >= 2");
            spec.lattices.push_back({d, d, layout});
        }
    } else {
        const auto& ls = j.at("lattices");
        if (!ls.is_array() || ls.empty()) fail(path + ".lattices", "expected a nonempty array");
        for (std::size_t i = 0; i < ls.size(); ++i) {
            const auto& l = ls[i];
            const std::string lp = path + ".lattices[" + std::to_string(i) + "]";
            if (!l.is_array() || l.size() != 2) fail(lp, "expected [d1, d2]");
            const int d1 = static_cast<int>(get_positive_int(l[0], lp + "[0]"));
            const int d2 = static_cast<int>(get_positive_int(l[1], lp + "[1]"));
            if (d1 < 2 || d2 < 2) fail(lp, "lattice sides must be >= 2");
            spec.lattices.push_back({d1, d2, layout});
        }
    }
    if (!j.contains("p_values")) fail(path + ".p_values", "missing");
    const auto& ps = j.at("p_values");
    if (!ps.is_array() || ps.empty()) fail(path + ".p_values", "expected a nonempty array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string pp = path + ".p_values[" + std::to_string(i) + "]";
        const double p = get_prob(ps[i], pp);
        if (i > 0 && p <= spec.p_values.back()) fail(pp, "p grid must be strictly increasing");
        spec.p_values.push_back(p);
    }
    if (!j.contains("trials")) fail(path + ".trials", "missing");
    spec.trials = get_positive_int(j.at("trials"), path + ".trials");
    spec.master_seed = default_seed;
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
            fail(path + ".seed", "expected an integer");
        }
        spec.master_seed = j.at("seed").get<std::uint64_t>();
    }
    if (!j.contains("noise")) fail(path + ".noise", "missing");
    spec.noise = parse_noise(j.at("noise"), path + ".noise");
    if (!j.contains("metric")) fail(path + ".metric", "missing");
    spec.metric = parse_metric(j.at("metric"), path + ".metric");
    return spec;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
    require_keys(j, "config", {"output_dir", "workers", "seed", "experiments", "figure"});
    RunConfig cfg;
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("workers")) {
        cfg.workers = static_cast<int>(get_positive_int(j.at("workers"), "config.workers"));
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("figure")) cfg.figure = j.at("figure").get<std::string>();
    if (!j.contains("experiments")) fail("config.experiments", "missing");
    const auto& ex = j.at("experiments");
    if (!ex.is_array() || ex.empty()) fail("config.experiments", "expected a nonempty array");
    for (std::size_t i = 0; i < ex.size(); ++i) {
        cfg.experiments.push_back(
            parse_experiment(ex[i], "config.experiments[" + std::to_string(i) + "]", cfg.seed));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace cdsurf
