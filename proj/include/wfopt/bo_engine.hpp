#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wfopt/acq_opt.hpp"
#include "wfopt/objectives.hpp"
#include "wfopt/pareto.hpp"
#include "wfopt/set_gp.hpp"

namespace wfopt {

struct RunConfig {
    int n_initial = 20;
    int max_evaluations = 100;
    int refit_every = 1;         // refit hyperparameters every k BO iterations
    bool exact_cost = false;     // closed-form cost instead of a GP surrogate
    double reference_margin = 0.1;
    GridSpec grid;
    WakeConfig wake;
    PowerCurveParams power;
    GaConfig ga;
    DeConfig de;
    HyperparamBounds bounds;
    std::optional<std::filesystem::path> state_path;  // persisted after every evaluation

    void validate() const {
        if (n_initial < 2) throw std::invalid_argument("run: n_initial must be >= 2");
        if (max_evaluations < n_initial)
            throw std::invalid_argument("run: max_evaluations must be >= n_initial");
        if (refit_every < 1) throw std::invalid_argument("run: refit_every must be >= 1");
        grid.validate();
        wake.validate();
        power.validate();
        if (grid.cells() < 2) throw std::invalid_argument("run: grid needs at least 2 cells");
    }
};

struct Evaluation {
    Layout layout;
    ObjectiveVector objectives;
};

struct RunState {
    std::uint64_t seed = 0;
    std::vector<Evaluation> evaluations;
};

struct TraceRecord {
    int iteration = 0;            // 1-based evaluation index
    std::string layout_id;        // "init_###" or "bo_###"
    double power = 0.0;
    double cost = 0.0;
    double hypervolume = 0.0;     // against the fixed reporting reference
};

struct RunTrace {
    std::vector<TraceRecord> records;
};

struct RunResult {
    std::vector<Evaluation> evaluations;
    ObjVec fixed_reference;       // post-hoc reference used for the HV trace
    RunTrace trace;
    SetDataset dataset;

    ParetoArchive archive() const {
        ParetoArchive a(fixed_reference);
        for (const auto& e : evaluations) {
            const auto c = e.objectives.minimised();
            a.insert({c[0], c[1]});
        }
        return a;
    }
    // indices of evaluations whose objective vectors sit on the final front
    std::vector<std::size_t> front_indices() const {
        std::vector<std::size_t> idx;
        const auto pts = archive().points();
        for (std::size_t i = 0; i < evaluations.size(); ++i) {
            const auto c = evaluations[i].objectives.minimised();
            const ObjVec v{c[0], c[1]};
            bool on_front = false;
            for (const auto& p : pts)
                if (p == v) on_front = true;
            bool seen = false;
            for (std::size_t j = 0; j < i && !seen; ++j) {
                const auto cj = evaluations[j].objectives.minimised();
                seen = ObjVec{cj[0], cj[1]} == v;
            }
            if (on_front && !seen) idx.push_back(i);
        }
        return idx;
    }
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// One random feasible layout with cardinality uniform in [2, min(400, cells)].
inline Layout random_layout(const GridSpec& grid, std::mt19937_64& rng) {
    const int cells = grid.cells();
    const int max_count = std::min(400, cells);
    std::uniform_int_distribution<int> card(2, max_count);
    std::vector<int> all(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) all[static_cast<std::size_t>(i)] = i;

    for (int attempt = 0; attempt < 1000; ++attempt) {
        const int count = card(rng);
        std::vector<int> chosen;
        std::sample(all.begin(), all.end(), std::back_inserter(chosen),
                    static_cast<std::size_t>(count), rng);
        Genome g;
        g.bits.assign(static_cast<std::size_t>(cells), 0);
        for (int c : chosen) g.bits[static_cast<std::size_t>(c)] = 1;
        if (feasible(g, grid)) return decode(g, grid);
        g = repair(std::move(g), grid, rng);
        if (g.popcount() >= 2 && feasible(g, grid)) return decode(g, grid);
    }
    throw std::runtime_error("run: could not sample a feasible layout with >= 2 turbines");
}

inline std::vector<Layout> initial_layouts(const RunConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::vector<Layout> layouts;
    layouts.reserve(static_cast<std::size_t>(config.n_initial));
    for (int i = 0; i < config.n_initial; ++i) layouts.push_back(random_layout(config.grid, rng));
    return layouts;
}

inline std::vector<ObjVec> canonical_points(const std::vector<Evaluation>& evals) {
    std::vector<ObjVec> pts;
    pts.reserve(evals.size());
    for (const auto& e : evals) {
        const auto c = e.objectives.minimised();
        pts.push_back({c[0], c[1]});
    }
    return pts;
}

}  // namespace detail

// --- run-state persistence (JSON) -----------------------------------------

inline void save_run_state(const RunState& state, const std::filesystem::path& path) {
    nlohmann::json j;
    j["seed"] = state.seed;
    j["layouts"] = nlohmann::json::array();
    j["objectives"] = nlohmann::json::array();
    for (const auto& e : state.evaluations) {
        nlohmann::json coords = nlohmann::json::array();
        for (const auto& t : e.layout) coords.push_back({t.x, t.y});
        j["layouts"].push_back(coords);
        j["objectives"].push_back({e.objectives.power, e.objectives.cost});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("state: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline RunState load_run_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("state: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    RunState state;
    state.seed = j.at("seed").get<std::uint64_t>();
    const auto& layouts = j.at("layouts");
    const auto& objectives = j.at("objectives");
    if (layouts.size() != objectives.size())
        throw std::runtime_error("state: layout/objective count mismatch in " + path.string());
    for (std::size_t i = 0; i < layouts.size(); ++i) {
        Evaluation e;
        for (const auto& c : layouts[i]) e.layout.add({c.at(0).get<double>(), c.at(1).get<double>()});
        e.objectives.power = objectives[i].at(0).get<double>();
        e.objectives.cost = objectives[i].at(1).get<double>();
        state.evaluations.push_back(std::move(e));
    }
    return state;
}

// --- initial design ---------------------------------------------------------

// n_initial random feasible layouts, evaluated through the expensive objective.
inline SetDataset initial_design(const RunConfig& config, const WindDistribution& dist,
                                 std::uint64_t seed) {
    config.validate();
    const auto layouts = detail::initial_layouts(config, seed);
    SetDataset dataset;
    dataset.sets = layouts;
    dataset.targets.resize(static_cast<Eigen::Index>(layouts.size()), 2);
    for (std::size_t i = 0; i < layouts.size(); ++i) {
        const auto y = evaluate(layouts[i], dist, config.wake, config.power).minimised();
        dataset.targets(static_cast<Eigen::Index>(i), 0) = y[0];
        dataset.targets(static_cast<Eigen::Index>(i), 1) = y[1];
    }
    return dataset;
}

namespace detail {

inline RunResult finalize(const RunConfig& config, std::vector<Evaluation> evals) {
    RunResult result;
    result.fixed_reference = update_reference(canonical_points(evals), config.reference_margin);
    result.trace.records.reserve(evals.size());
    for (std::size_t t = 0; t < evals.size(); ++t) {
        std::vector<ObjVec> prefix = canonical_points({evals.begin(), evals.begin() + t + 1});
        const double hv = non_dominated(prefix, result.fixed_reference).hypervolume();
        TraceRecord rec;
        rec.iteration = static_cast<int>(t + 1);
        rec.layout_id = (t < static_cast<std::size_t>(config.n_initial))
                            ? "init_" + std::to_string(t)
                            : "bo_" + std::to_string(t - config.n_initial);
        rec.power = evals[t].objectives.power;
        rec.cost = evals[t].objectives.cost;
        rec.hypervolume = hv;
        result.trace.records.push_back(std::move(rec));
    }
    result.dataset.sets.clear();
    result.dataset.targets.resize(static_cast<Eigen::Index>(evals.size()), 2);
    for (std::size_t i = 0; i < evals.size(); ++i) {
        result.dataset.sets.push_back(evals[i].layout);
        const auto c = evals[i].objectives.minimised();
        result.dataset.targets(static_cast<Eigen::Index>(i), 0) = c[0];
        result.dataset.targets(static_cast<Eigen::Index>(i), 1) = c[1];
    }
    result.evaluations = std::move(evals);
    return result;
}

}  // namespace detail

// Full Bayesian optimisation loop. All randomness derives from `seed` and
// per-iteration streams, so a run resumed from persisted state continues
// exactly as the uninterrupted run would.
inline RunResult run(const RunConfig& config, const WindDistribution& dist, std::uint64_t seed,
                     std::optional<RunState> resume = std::nullopt) {
    config.validate();
    std::vector<Evaluation> evals;
    if (resume) {
        if (resume->seed != seed) throw std::invalid_argument("run: resume state has a different seed");
        evals = std::move(resume->evaluations);
        if (evals.size() > static_cast<std::size_t>(config.max_evaluations))
            throw std::invalid_argument("run: resume state has more evaluations than the budget");
    }

    auto persist = [&]() {
        if (config.state_path) save_run_state({seed, evals}, *config.state_path);
    };

    // initial design (regenerated deterministically; only missing rows evaluated)
    const auto init = detail::initial_layouts(config, seed);
    for (std::size_t i = evals.size(); i < init.size() &&
                                       evals.size() < static_cast<std::size_t>(config.max_evaluations);
         ++i) {
        evals.push_back({init[i], evaluate(init[i], dist, config.wake, config.power)});
        persist();
    }

    std::optional<SetGpModel> power_model;
    std::optional<SetGpModel> cost_model;
    int iterations_since_fit = 0;

    while (evals.size() < static_cast<std::size_t>(config.max_evaluations)) {
        const auto t = evals.size();
        const std::uint64_t iter_seed = detail::mix_seed(seed, t + 1);

        const bool refit = !power_model || iterations_since_fit >= config.refit_every;
        if (refit) {
            std::vector<Layout> sets;
            Eigen::VectorXd y_power(static_cast<Eigen::Index>(t));
            Eigen::VectorXd y_cost(static_cast<Eigen::Index>(t));
            for (std::size_t i = 0; i < t; ++i) {
                sets.push_back(evals[i].layout);
                const auto c = evals[i].objectives.minimised();
                y_power[static_cast<Eigen::Index>(i)] = c[0];
                y_cost[static_cast<Eigen::Index>(i)] = c[1];
            }
            power_model = fit_gp(sets, y_power, config.bounds, detail::mix_seed(iter_seed, 101),
                                 config.de);
            if (!config.exact_cost)
                cost_model = fit_gp(sets, y_cost, config.bounds, detail::mix_seed(iter_seed, 102),
                                    config.de);
            iterations_since_fit = 0;
        }
        ++iterations_since_fit;

        const auto points = detail::canonical_points(evals);
        const ObjVec ref = update_reference(points, config.reference_margin);
        const ParetoArchive archive = non_dominated(points, ref);

        std::unordered_set<std::string> exclude;
        for (const auto& e : evals) exclude.insert(encode(e.layout, config.grid).key());

        auto scorer = [&](const Layout& layout) {
            PredictiveBox box;
            const auto p = power_model->predict(layout);
            box.mean.push_back(p.mean);
            box.stddev.push_back(std::sqrt(p.variance));
            if (config.exact_cost) {
                box.mean.push_back(installation_cost(layout.size()));
                box.stddev.push_back(0.0);
            } else {
                const auto c = cost_model->predict(layout);
                box.mean.push_back(c.mean);
                box.stddev.push_back(std::sqrt(c.variance));
            }
            return archive.ehvi(box);
        };

        const Layout proposal =
            maximise_acquisition(scorer, config.grid, config.ga, iter_seed, exclude);
        evals.push_back({proposal, evaluate(proposal, dist, config.wake, config.power)});
        persist();
    }

    return detail::finalize(config, std::move(evals));
}

// Pure random search with the identical evaluation budget and proposal
// distribution as the initial design; the comparison baseline.
inline RunResult random_search_baseline(const RunConfig& config, const WindDistribution& dist,
                                        std::uint64_t seed) {
    config.validate();
    std::vector<Evaluation> evals;
    const auto init = detail::initial_layouts(config, seed);
    for (const auto& layout : init) {
        if (evals.size() >= static_cast<std::size_t>(config.max_evaluations)) break;
        evals.push_back({layout, evaluate(layout, dist, config.wake, config.power)});
    }
    while (evals.size() < static_cast<std::size_t>(config.max_evaluations)) {
        std::mt19937_64 rng(detail::mix_seed(seed, evals.size() + 1));
        const Layout layout = detail::random_layout(config.grid, rng);
        evals.push_back({layout, evaluate(layout, dist, config.wake, config.power)});
    }
    return detail::finalize(config, std::move(evals));
}

}  // namespace wfopt
