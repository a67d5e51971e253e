// wfopt: wind farm layout optimisation with set-based multi-objective
// Bayesian optimisation. Subcommands: fit-dist, run, evaluate, report.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
// Set WFOPT_LOG=debug for progress output on stderr.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "wfopt/config.hpp"
#include "wfopt/reporting.hpp"
#include "wfopt/serialization.hpp"
#include "wfopt/wind_stats.hpp"

namespace fs = std::filesystem;

namespace {

bool log_enabled() {
    const char* v = std::getenv("WFOPT_LOG");
    return v != nullptr && std::string(v) != "" && std::string(v) != "off";
}

void log(const std::string& msg) {
    if (log_enabled()) std::cerr << "[wfopt] " << msg << '\n';
}

int cmd_fit_dist(const fs::path& csv, const fs::path& out, int v_max,
                 const std::string& speed_col, const std::string& dir_col, double jitter) {
    const auto records = wfopt::load_wind_csv(csv, speed_col, dir_col);
    log("loaded " + std::to_string(records.size()) + " wind records");
    const auto dist = wfopt::fit_distribution(records, v_max, jitter);
    wfopt::save_distribution(dist, out);
    log("wrote distribution to " + out.string());
    return 0;
}

int cmd_run(const fs::path& config_path, const std::vector<std::uint64_t>& seeds,
            const fs::path& out) {
    auto cfg = wfopt::load_config(config_path);
    const auto dist = wfopt::load_distribution(cfg.distribution_file);
    fs::create_directories(out);
    {
        std::ofstream snap(out / "config.json");
        snap << wfopt::config_snapshot(cfg).dump(2) << '\n';
    }
    for (const auto seed : seeds) {
        const fs::path run_dir = out / ("seed_" + std::to_string(seed));
        fs::create_directories(run_dir);
        auto run_cfg = cfg.run;
        run_cfg.state_path = run_dir / "state.json";
        std::optional<wfopt::RunState> resume;
        if (fs::exists(*run_cfg.state_path)) {
            resume = wfopt::load_run_state(*run_cfg.state_path);
            log("resuming seed " + std::to_string(seed) + " from " +
                std::to_string(resume->evaluations.size()) + " evaluations");
        }
        log("running seed " + std::to_string(seed));
        const auto result = wfopt::run(run_cfg, dist, seed, std::move(resume));
        wfopt::write_run_artifacts(result, run_dir);
        log("seed " + std::to_string(seed) + " done; front size " +
            std::to_string(result.front_indices().size()));
    }
    return 0;
}

int cmd_evaluate(const fs::path& layout_path, const fs::path& config_path) {
    const auto cfg = wfopt::load_config(config_path);
    const auto layout = wfopt::load_layout(layout_path);
    wfopt::ObjectiveVector y;
    if (!layout.empty()) {
        const auto dist = wfopt::load_distribution(cfg.distribution_file);
        y = wfopt::evaluate(layout, dist, cfg.run.wake, cfg.run.power);
    }
    std::printf("power %.17g\ncost %.17g\nturbines %zu\n", y.power, y.cost, layout.size());
    return 0;
}

int cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out) {
    std::vector<std::string> labels;
    for (const auto& dir : run_dirs) labels.push_back(dir.filename().string());
    wfopt::write_report(run_dirs, labels, out);
    log("wrote report to " + out.string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-based multi-objective Bayesian optimisation for wind farm layouts"};
    app.require_subcommand(1);

    auto* fit = app.add_subcommand("fit-dist", "Fit the joint wind speed/direction distribution");
    fs::path csv, fit_out;
    int v_max = 25;
    std::string speed_col = "wind_speed", dir_col = "wind_direction";
    double jitter = 0.0;
    fit->add_option("--csv", csv, "Wind time-series CSV")->required();
    fit->add_option("--out", fit_out, "Output distribution file")->required();
    fit->add_option("--v-max", v_max, "Top speed bin (m/s)");
    fit->add_option("--speed-col", speed_col, "Speed column name");
    fit->add_option("--direction-col", dir_col, "Direction column name");
    fit->add_option("--jitter", jitter, "Covariance diagonal jitter");

    auto* run = app.add_subcommand("run", "Run the Bayesian optimisation loop");
    fs::path run_config, run_out;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    run->add_option("--config", run_config, "JSON configuration file")->required();
    run->add_option("--out", run_out, "Output directory")->required();
    run->add_option("--seed", seeds, "Seeds, one run per seed");

    auto* eval = app.add_subcommand("evaluate", "Evaluate the objectives of a layout file");
    fs::path eval_layout, eval_config;
    eval->add_option("--layout", eval_layout, "Layout file (x y per line)")->required();
    eval->add_option("--config", eval_config, "JSON configuration file")->required();

    auto* report = app.add_subcommand("report", "Aggregate run directories into plot-ready files");
    std::vector<fs::path> report_dirs;
    fs::path report_out;
    report->add_option("--run-dir", report_dirs, "Per-seed run directories")->required();
    report->add_option("--out", report_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit_dist(csv, fit_out, v_max, speed_col, dir_col, jitter);
        if (run->parsed()) return cmd_run(run_config, seeds, run_out);
        if (eval->parsed()) return cmd_evaluate(eval_layout, eval_config);
        if (report->parsed()) return cmd_report(report_dirs, report_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
