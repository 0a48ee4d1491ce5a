#include "doctest.h"

#include "cdsurf/config.hpp"

using namespace cdsurf;
using nlohmann::json;

namespace {

json minimal_config() {
    return json::parse(R"({
        "seed": 7,
        "experiments": [{
            "name": "demo",
            "family": "css",
            "distances": [3],
            "p_values": [0.1],
            "trials": 100,
            "noise": {"kind": "iid"},
            "metric": {"kind": "manhattan"}
        }]
    })");
}

}  // namespace

TEST_CASE("minimal config parses") {
    const auto cfg = parse_config(minimal_config());
    REQUIRE(cfg.experiments.size() == 1);
    const auto& e = cfg.experiments[0];
    CHECK(e.name == "demo");
    CHECK(e.family == CodeFamily::CSS);
    CHECK(e.lattices.size() == 1);
    CHECK(e.trials == 100);
    CHECK(e.master_seed == 7);
    CHECK(e.metric.kind == MetricKind::Manhattan);
}

TEST_CASE("unknown keys are rejected with their path") {
    auto j = minimal_config();
    j["experiments"][0]["noise"]["sigma_q"] = 0.5;
    try {
        parse_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("experiments[0].noise.sigma_q") != std::string::npos);
    }
}

TEST_CASE("negative probability is rejected naming the field") {
    auto j = minimal_config();
    j["experiments"][0]["p_values"] = {-0.1};
    try {
        parse_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("p_values[0]") != std::string::npos);
    }
}

TEST_CASE("non-increasing p grid is rejected") {
    auto j = minimal_config();
    j["experiments"][0]["p_values"] = {0.1, 0.1};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("gaussian and pair options") {
    auto j = minimal_config();
    j["experiments"][0]["family"] = "mmhh";
    j["experiments"][0]["noise"] = {{"kind", "gaussian"}, {"sigma_p", 0.5}, {"sigma_tot", 0.25},
                                    {"pair", {{"kind", "xz"}, {"mode", "scale"}, {"value", 0.4}}}};
    j["experiments"][0]["metric"] = {{"kind", "dijkstra"}};
    const auto cfg = parse_config(j);
    const auto& e = cfg.experiments[0];
    CHECK(e.family == CodeFamily::MMHH);
    CHECK(e.noise.kind == NoiseKind::Gaussian);
    CHECK(e.noise.sigma_p == 0.5);
    CHECK(e.noise.sigma_tot == 0.25);
    REQUIRE(e.noise.pair.has_value());
    CHECK(e.noise.pair->kind == PairKind::XZ);
    CHECK(e.noise.pair->mode == NoiseSpec::Pair::Mode::ScaleP);
    CHECK(e.noise.pair->value == 0.4);
    CHECK(e.metric.kind == MetricKind::Dijkstra);
}

TEST_CASE("lattices and distances are mutually exclusive") {
    auto j = minimal_config();
    j["experiments"][0]["lattices"] = {{5, 3}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j["experiments"][0].erase("distances");
    const auto cfg = parse_config(j);
    CHECK(cfg.experiments[0].lattices[0].d1 == 5);
    CHECK(cfg.experiments[0].lattices[0].d2 == 3);
}

TEST_CASE("metric requires both wx and wz") {
    auto j = minimal_config();
    j["experiments"][0]["metric"] = {{"kind", "weighted_manhattan"}, {"wx", 1.0}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("bias fractions must sum to one") {
    auto j = minimal_config();
    j["experiments"][0]["noise"]["bias"] = {0.5, 0.2, 0.2};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}
