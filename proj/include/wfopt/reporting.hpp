#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfopt/bo_engine.hpp"
#include "wfopt/serialization.hpp"

namespace wfopt {

// Writes the artifacts of one seeded run into `dir`:
//   pareto_front.tsv   id, power, cost, turbine count (one row per front member)
//   layouts/<id>.layout  coordinates of each front member
//   hv_trace.tsv       evaluation index, hypervolume (fixed reporting reference)
inline void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "layouts");
    char buf[160];

    {
        std::ofstream out(dir / "pareto_front.tsv");
        if (!out) throw std::runtime_error("report: cannot write pareto_front.tsv");
        out << "id\tpower\tcost\tturbines\n";
        for (std::size_t i : result.front_indices()) {
            const auto& e = result.evaluations[i];
            std::snprintf(buf, sizeof(buf), "%s\t%.17g\t%.17g\t%zu\n",
                          result.trace.records[i].layout_id.c_str(), e.objectives.power,
                          e.objectives.cost, e.layout.size());
            out << buf;
            save_layout(e.layout,
                        dir / "layouts" / (result.trace.records[i].layout_id + ".layout"));
        }
    }
    {
        std::ofstream out(dir / "hv_trace.tsv");
        if (!out) throw std::runtime_error("report: cannot write hv_trace.tsv");
        out << "evaluation\thypervolume\n";
        for (const auto& rec : result.trace.records) {
            std::snprintf(buf, sizeof(buf), "%d\t%.17g\n", rec.iteration, rec.hypervolume);
            out << buf;
        }
    }
}

namespace detail {

inline std::vector<std::pair<int, double>> read_hv_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: cannot open " + path.string());
    std::vector<std::pair<int, double>> trace;
    std::string line;
    std::getline(in, line);  // header
    int it;
    double hv;
    while (in >> it >> hv) trace.emplace_back(it, hv);
    if (trace.empty()) throw std::runtime_error("report: empty hv trace " + path.string());
    return trace;
}

}  // namespace detail

// Aggregates per-seed run directories into plot-ready files under `out`:
//   pareto_<seed>.tsv    power, cost scatter columns per seed
//   hv_trace_<seed>.tsv  per-seed hypervolume traces
//   hv_summary.tsv       evaluation, median, band_lo, band_hi (min-max band)
inline void write_report(const std::vector<std::filesystem::path>& run_dirs,
                         const std::vector<std::string>& labels,
                         const std::filesystem::path& out) {
    if (run_dirs.empty()) throw std::invalid_argument("report: no run directories");
    std::filesystem::create_directories(out);
    char buf[160];

    std::vector<std::vector<std::pair<int, double>>> traces;
    for (std::size_t s = 0; s < run_dirs.size(); ++s) {
        const auto& dir = run_dirs[s];
        if (!std::filesystem::exists(dir / "hv_trace.tsv") ||
            !std::filesystem::exists(dir / "pareto_front.tsv"))
            throw std::runtime_error("report: missing run artifacts in " + dir.string());
        traces.push_back(detail::read_hv_trace(dir / "hv_trace.tsv"));

        // pareto scatter: copy the power/cost columns
        std::ifstream in(dir / "pareto_front.tsv");
        std::ofstream scatter(out / ("pareto_" + labels[s] + ".tsv"));
        scatter << "power\tcost\n";
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string id;
            double power, cost;
            if (!(ss >> id >> power >> cost))
                throw std::runtime_error("report: malformed pareto_front.tsv in " + dir.string());
            std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", power, cost);
            scatter << buf;
        }
        std::filesystem::copy_file(dir / "hv_trace.tsv", out / ("hv_trace_" + labels[s] + ".tsv"),
                                   std::filesystem::copy_options::overwrite_existing);
    }

    const std::size_t len = traces.front().size();
    for (const auto& t : traces)
        if (t.size() != len) throw std::runtime_error("report: hv traces have different lengths");

    std::ofstream summary(out / "hv_summary.tsv");
    summary << "evaluation\tmedian\tband_lo\tband_hi\n";
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<double> values;
        for (const auto& t : traces) values.push_back(t[i].second);
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        const double median =
            n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
        std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\n", traces.front()[i].first,
                      median, values.front(), values.back());
        summary << buf;
    }
}

}  // namespace wfopt
