#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cdsurf/experiments.hpp"

#include "json.hpp"

namespace cdsurf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string output_dir = "results";
    int workers = 1;
    std::uint64_t seed = 0;
    std::vector<ExperimentSpec> experiments;
    std::string figure;  // optional recipe to render after simulating
};

// Schema-validated parse; unknown keys are rejected with their full path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace cdsurf
