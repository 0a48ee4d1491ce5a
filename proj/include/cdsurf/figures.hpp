#pragma once

#include <string>
#include <vector>

#include "cdsurf/experiments.hpp"

namespace cdsurf {

// Figure recipes assemble persisted CSV rows into per-curve data files plus a
// minimal SVG rendering. Recipes never consult in-memory state: deleting the
// plot outputs and re-running from the CSVs reproduces them exactly.
std::vector<std::string> figure_recipes();

struct MissingSweepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Renders `recipe` from the CSV files under results_dir into out_dir; returns
// the list of files written. Throws MissingSweepError naming every absent
// curve when inputs are incomplete.
std::vector<std::string> render_figure(const std::string& recipe, const std::string& results_dir,
                                       const std::string& out_dir);

}  // namespace cdsurf
