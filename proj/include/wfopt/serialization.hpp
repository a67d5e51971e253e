#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wfopt/geometry.hpp"
#include "wfopt/set_gp.hpp"

namespace wfopt {

// --- layout files: one "x y" pair per line, '#' comments --------------------

inline void save_layout(const Layout& layout, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("layout: cannot write " + path.string());
    out << "# x y (meters)\n";
    char buf[80];
    for (const auto& t : layout) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", t.x, t.y);
        out << buf;
    }
}

inline Layout load_layout(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("layout: cannot open " + path.string());
    Layout layout;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::istringstream ss(line);
        double x, y;
        if (!(ss >> x >> y))
            throw std::runtime_error("layout: malformed line " + std::to_string(line_no) + " in " +
                                     path.string());
        layout.add({x, y});
    }
    return layout;
}

// --- fitted model persistence (JSON) ----------------------------------------

inline void save_model(const SetGpModel& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["hyperparams"] = {{"length_scale", model.hyperparams().length_scale},
                        {"signal_variance", model.hyperparams().signal_variance},
                        {"noise_variance", model.hyperparams().noise_variance}};
    j["training_sets"] = nlohmann::json::array();
    for (const auto& layout : model.training_sets()) {
        nlohmann::json coords = nlohmann::json::array();
        for (const auto& t : layout) coords.push_back({t.x, t.y});
        j["training_sets"].push_back(coords);
    }
    j["targets"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.raw_targets().size(); ++i)
        j["targets"].push_back(model.raw_targets()[i]);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("model: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline SetGpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("model: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    Hyperparams h;
    h.length_scale = j.at("hyperparams").at("length_scale").get<double>();
    h.signal_variance = j.at("hyperparams").at("signal_variance").get<double>();
    h.noise_variance = j.at("hyperparams").at("noise_variance").get<double>();
    std::vector<Layout> sets;
    for (const auto& coords : j.at("training_sets")) {
        Layout layout;
        for (const auto& c : coords) layout.add({c.at(0).get<double>(), c.at(1).get<double>()});
        sets.push_back(std::move(layout));
    }
    const auto& targets = j.at("targets");
    Eigen::VectorXd y(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t i = 0; i < targets.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = targets[i].get<double>();
    return SetGpModel(std::move(sets), std::move(y), h);
}

}  // namespace wfopt
