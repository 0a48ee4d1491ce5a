#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdsurf/config.hpp"
#include "cdsurf/experiments.hpp"
#include "cdsurf/figures.hpp"
#include "cdsurf/fit.hpp"

namespace fs = std::filesystem;
using namespace cdsurf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

int cmd_simulate(const std::string& config_path, const std::string& out_override, int workers_override,
                 std::uint64_t seed_override, bool has_seed_override, long trials_override) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    for (auto& spec : cfg.experiments) {
        if (has_seed_override) spec.master_seed = seed_override;
        if (trials_override > 0) spec.trials = trials_override;
    }

    std::signal(SIGINT, handle_sigint);
    fs::create_directories(cfg.output_dir);

    bool interrupted = false;
    std::cout << "name\tfamily\tmetric\tpoints\tfailures/trials (last point)\n";
    for (const auto& spec : cfg.experiments) {
        SweepResult result;
        try {
            result = run_sweep(spec, cfg.workers,
                               [](const std::string& msg) { std::cerr << "  " << msg << "\n"; },
                               &g_interrupted);
        } catch (const std::exception& e) {
            std::cerr << "runtime error: " << e.what() << "\n";
            return kExitRuntime;
        }
        const fs::path csv = fs::path(cfg.output_dir) / (spec.name + ".csv");
        const fs::path manifest = fs::path(cfg.output_dir) / (spec.name + ".manifest.json");
        try {
            write_csv(result, csv.string());
            write_manifest(result, manifest.string());
        } catch (const std::exception& e) {
            std::cerr << "runtime error: " << e.what() << "\n";
            return kExitRuntime;
        }
        std::cout << spec.name << '\t' << to_string(spec.family) << '\t' << spec.metric.name() << '\t'
                  << result.points.size();
        if (!result.points.empty()) {
            const auto& last = result.points.back();
            std::cout << '\t' << last.failures << '/' << last.trials;
        }
        std::cout << (result.completed ? "" : "\t[interrupted]") << "\n";
        if (!result.completed) {
            interrupted = true;
            break;
        }
    }
    if (interrupted) {
        std::cerr << "interrupted; partial results flushed\n";
        return kExitRuntime;
    }
    if (!cfg.figure.empty()) {
        try {
            for (const auto& f : render_figure(cfg.figure, cfg.output_dir, cfg.output_dir)) {
                std::cout << "wrote " << f << "\n";
            }
        } catch (const std::exception& e) {
            std::cerr << "figure error: " << e.what() << "\n";
            return kExitRuntime;
        }
    }
    return kExitOk;
}

int cmd_threshold(const std::vector<std::string>& results, double window_lo, double window_hi,
                  const std::string& fit_out) {
    std::vector<CsvRow> rows;
    for (const auto& pattern : results) {
        if (fs::is_directory(pattern)) {
            auto part = read_csv_dir(pattern);
            rows.insert(rows.end(), part.begin(), part.end());
        } else if (fs::exists(pattern)) {
            auto part = read_csv(pattern);
            rows.insert(rows.end(), part.begin(), part.end());
        } else {
            std::cerr << "no such results file: " << pattern << "\n";
            return kExitConfig;
        }
    }
    std::vector<CurvePoint> pts;
    std::set<int> distances;
    for (const auto& r : rows) {
        const int d = std::min(r.d1, r.d2);
        pts.push_back({d, r.p, r.p_fail, r.stderr_, r.trials});
        distances.insert(d);
    }
    if (distances.size() < 3) {
        std::cerr << "insufficient data: need results for >= 3 distances, have " << distances.size()
                  << "\n";
        return kExitConfig;
    }
    try {
        const auto fit = fit_threshold(pts, {window_lo, window_hi});
        std::cout << "p_th = " << fit.p_th << " +- " << fit.p_th_stderr() << "\n";
        std::cout << "nu   = " << fit.nu << " +- " << fit.nu_stderr() << "\n";
        std::cout << "chi2/ndof = " << fit.chi2 << "/" << fit.ndof << "\n";
        if (!fit_out.empty()) {
            nlohmann::json j;
            j["p_th"] = fit.p_th;
            j["p_th_stderr"] = fit.p_th_stderr();
            j["nu"] = fit.nu;
            j["nu_stderr"] = fit.nu_stderr();
            j["b"] = {fit.b0, fit.b1, fit.b2};
            j["chi2"] = fit.chi2;
            j["ndof"] = fit.ndof;
            j["window"] = {fit.window.p_lo, fit.window.p_hi};
            j["distances"] = fit.distances;
            nlohmann::json cov = nlohmann::json::array();
            for (const auto& row : fit.covariance) cov.push_back(row);
            j["covariance"] = cov;
            std::ofstream out(fit_out);
            out << j.dump(2) << "\n";
            std::cout << "wrote " << fit_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_figure(const std::string& recipe, const std::string& results_dir, const std::string& out_dir) {
    try {
        for (const auto& f : render_figure(recipe, results_dir, out_dir.empty() ? results_dir : out_dir)) {
            std::cout << "wrote " << f << "\n";
        }
    } catch (const MissingSweepError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "figure error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    try {
        const auto cfg = load_config(config_path);
        std::cout << "ok: " << cfg.experiments.size() << " experiment(s)\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clifford-deformed surface code simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, fit_out, recipe, results_dir;
    std::vector<std::string> results;
    int workers = 0;
    std::uint64_t seed = 0;
    long trials_override = 0;
    double window_lo = 0.0, window_hi = 1.0;

    auto* sim = app.add_subcommand("simulate", "Run the experiments of a config file");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_dir, "output directory (overrides config)");
    sim->add_option("--workers", workers, "worker thread count (overrides config)");
    auto* seed_opt = sim->add_option("--seed", seed, "master seed override");
    sim->add_option("--trials-override", trials_override, "trial count override for every experiment");

    auto* thr = app.add_subcommand("threshold", "Fit a threshold from persisted sweep CSVs");
    thr->add_option("results", results, "CSV files or directories")->required();
    thr->add_option("--window-lo", window_lo, "lower edge of the fit window")->required();
    thr->add_option("--window-hi", window_hi, "upper edge of the fit window")->required();
    thr->add_option("--fit-out", fit_out, "write the fit as JSON");

    auto* fig = app.add_subcommand("figure", "Emit plot data and SVG for a recipe");
    fig->add_option("recipe", recipe, "one of fig5a, fig5b, fig7, fig9..fig13")->required();
    fig->add_option("--results", results_dir, "directory of sweep CSVs")->required();
    fig->add_option("--out", out_dir, "output directory (defaults to results dir)");

    auto* val = app.add_subcommand("validate-config", "Validate a config file and exit");
    val->add_option("--config", config_path, "JSON run configuration")->required();

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        return cmd_simulate(config_path, out_dir, workers, seed, seed_opt->count() > 0, trials_override);
    }
    if (thr->parsed()) return cmd_threshold(results, window_lo, window_hi, fit_out);
    if (fig->parsed()) return cmd_figure(recipe, results_dir, out_dir);
    if (val->parsed()) return cmd_validate(config_path);
    return kExitConfig;
}
