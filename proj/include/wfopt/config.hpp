#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfopt/bo_engine.hpp"

namespace wfopt {

// Full run configuration as read from a JSON config file.
struct ConfigFile {
    std::filesystem::path distribution_file;  // fitted (v, theta, p) table
    RunConfig run;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::string& section,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known)
            throw std::invalid_argument("config: unknown key '" + key + "' in section '" + section +
                                        "'");
    }
}

template <typename T>
inline void read_if(const nlohmann::json& obj, const char* key, T& target) {
    if (obj.contains(key)) target = obj.at(key).get<T>();
}

}  // namespace detail

// Parses and schema-validates the configuration document. Unknown keys are
// rejected with a named error.
inline ConfigFile parse_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(j, "(root)",
                                {"wind", "grid", "wake", "power_curve", "bo", "ga", "de", "bounds"});
    ConfigFile cfg;

    if (!j.contains("wind") || !j.at("wind").contains("distribution_file"))
        throw std::invalid_argument("config: wind.distribution_file is required");
    {
        const auto& w = j.at("wind");
        detail::reject_unknown_keys(w, "wind", {"distribution_file"});
        cfg.distribution_file = w.at("distribution_file").get<std::string>();
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::reject_unknown_keys(g, "grid",
                                    {"rows", "cols", "pitch", "min_spacing", "origin"});
        detail::read_if(g, "rows", cfg.run.grid.rows);
        detail::read_if(g, "cols", cfg.run.grid.cols);
        detail::read_if(g, "pitch", cfg.run.grid.pitch);
        detail::read_if(g, "min_spacing", cfg.run.grid.min_spacing);
        if (g.contains("origin")) {
            cfg.run.grid.origin.x = g.at("origin").at(0).get<double>();
            cfg.run.grid.origin.y = g.at("origin").at(1).get<double>();
        }
    }

    if (j.contains("wake")) {
        const auto& w = j.at("wake");
        detail::reject_unknown_keys(w, "wake",
                                    {"rotor_radius", "thrust_coefficient", "decay_constant",
                                     "hub_height", "surface_roughness"});
        detail::read_if(w, "rotor_radius", cfg.run.wake.rotor_radius);
        detail::read_if(w, "thrust_coefficient", cfg.run.wake.thrust_coefficient);
        if (w.contains("decay_constant")) cfg.run.wake.decay_constant = w.at("decay_constant").get<double>();
        if (w.contains("hub_height")) cfg.run.wake.hub_height = w.at("hub_height").get<double>();
        if (w.contains("surface_roughness"))
            cfg.run.wake.surface_roughness = w.at("surface_roughness").get<double>();
    }

    if (!j.contains("power_curve"))
        throw std::invalid_argument("config: power_curve section is required");
    {
        const auto& p = j.at("power_curve");
        detail::reject_unknown_keys(p, "power_curve", {"a", "m", "n", "tau", "cut_in", "source"});
        cfg.run.power.scale_kw = p.at("a").get<double>();
        cfg.run.power.m = p.at("m").get<double>();
        cfg.run.power.n = p.at("n").get<double>();
        cfg.run.power.tau = p.at("tau").get<double>();
        cfg.run.power.cut_in = p.at("cut_in").get<double>();
    }

    if (j.contains("bo")) {
        const auto& b = j.at("bo");
        detail::reject_unknown_keys(b, "bo",
                                    {"n_initial", "max_evaluations", "refit_every", "exact_cost",
                                     "reference_margin"});
        detail::read_if(b, "n_initial", cfg.run.n_initial);
        detail::read_if(b, "max_evaluations", cfg.run.max_evaluations);
        detail::read_if(b, "refit_every", cfg.run.refit_every);
        detail::read_if(b, "exact_cost", cfg.run.exact_cost);
        detail::read_if(b, "reference_margin", cfg.run.reference_margin);
    }

    if (j.contains("ga")) {
        const auto& g = j.at("ga");
        detail::reject_unknown_keys(
            g, "ga", {"population", "generations", "crossover_prob", "mutation_prob", "elitism"});
        detail::read_if(g, "population", cfg.run.ga.population);
        detail::read_if(g, "generations", cfg.run.ga.generations);
        detail::read_if(g, "crossover_prob", cfg.run.ga.crossover_prob);
        if (g.contains("mutation_prob")) cfg.run.ga.mutation_prob = g.at("mutation_prob").get<double>();
        detail::read_if(g, "elitism", cfg.run.ga.elitism);
    }

    if (j.contains("de")) {
        const auto& d = j.at("de");
        detail::reject_unknown_keys(d, "de",
                                    {"population_per_dim", "max_generations", "tolerance", "weight",
                                     "crossover_rate"});
        detail::read_if(d, "population_per_dim", cfg.run.de.population_per_dim);
        detail::read_if(d, "max_generations", cfg.run.de.max_generations);
        detail::read_if(d, "tolerance", cfg.run.de.tolerance);
        detail::read_if(d, "weight", cfg.run.de.weight);
        detail::read_if(d, "crossover_rate", cfg.run.de.crossover_rate);
    }

    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        detail::reject_unknown_keys(b, "bounds",
                                    {"length_scale", "signal_variance", "noise_variance"});
        if (b.contains("length_scale")) {
            cfg.run.bounds.length_scale_min = b.at("length_scale").at(0).get<double>();
            cfg.run.bounds.length_scale_max = b.at("length_scale").at(1).get<double>();
        }
        if (b.contains("signal_variance")) {
            cfg.run.bounds.signal_variance_min = b.at("signal_variance").at(0).get<double>();
            cfg.run.bounds.signal_variance_max = b.at("signal_variance").at(1).get<double>();
        }
        if (b.contains("noise_variance")) {
            cfg.run.bounds.noise_variance_min = b.at("noise_variance").at(0).get<double>();
            cfg.run.bounds.noise_variance_max = b.at("noise_variance").at(1).get<double>();
        }
    }

    cfg.run.validate();
    return cfg;
}

// Fully resolved configuration, for run-directory snapshots.
inline nlohmann::json config_snapshot(const ConfigFile& cfg) {
    nlohmann::json j;
    j["wind"] = {{"distribution_file", cfg.distribution_file.string()}};
    j["grid"] = {{"rows", cfg.run.grid.rows},
                 {"cols", cfg.run.grid.cols},
                 {"pitch", cfg.run.grid.pitch},
                 {"min_spacing", cfg.run.grid.min_spacing},
                 {"origin", {cfg.run.grid.origin.x, cfg.run.grid.origin.y}}};
    j["wake"] = {{"rotor_radius", cfg.run.wake.rotor_radius},
                 {"thrust_coefficient", cfg.run.wake.thrust_coefficient}};
    if (cfg.run.wake.decay_constant) j["wake"]["decay_constant"] = *cfg.run.wake.decay_constant;
    if (cfg.run.wake.hub_height) j["wake"]["hub_height"] = *cfg.run.wake.hub_height;
    if (cfg.run.wake.surface_roughness)
        j["wake"]["surface_roughness"] = *cfg.run.wake.surface_roughness;
    j["power_curve"] = {{"a", cfg.run.power.scale_kw},
                        {"m", cfg.run.power.m},
                        {"n", cfg.run.power.n},
                        {"tau", cfg.run.power.tau},
                        {"cut_in", cfg.run.power.cut_in}};
    j["bo"] = {{"n_initial", cfg.run.n_initial},
               {"max_evaluations", cfg.run.max_evaluations},
               {"refit_every", cfg.run.refit_every},
               {"exact_cost", cfg.run.exact_cost},
               {"reference_margin", cfg.run.reference_margin}};
    j["ga"] = {{"population", cfg.run.ga.population},
               {"generations", cfg.run.ga.generations},
               {"crossover_prob", cfg.run.ga.crossover_prob},
               {"elitism", cfg.run.ga.elitism}};
    if (cfg.run.ga.mutation_prob) j["ga"]["mutation_prob"] = *cfg.run.ga.mutation_prob;
    j["de"] = {{"population_per_dim", cfg.run.de.population_per_dim},
               {"max_generations", cfg.run.de.max_generations},
               {"tolerance", cfg.run.de.tolerance},
               {"weight", cfg.run.de.weight},
               {"crossover_rate", cfg.run.de.crossover_rate}};
    j["bounds"] = {{"length_scale", {cfg.run.bounds.length_scale_min, cfg.run.bounds.length_scale_max}},
                   {"signal_variance",
                    {cfg.run.bounds.signal_variance_min, cfg.run.bounds.signal_variance_max}},
                   {"noise_variance",
                    {cfg.run.bounds.noise_variance_min, cfg.run.bounds.noise_variance_max}}};
    return j;
}

inline ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace wfopt
