#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "wfopt/geometry.hpp"
#include "wfopt/pareto.hpp"
#include "wfopt/set_gp.hpp"

namespace wfopt {

// Candidate turbine positions: a regular rows x cols grid.
struct GridSpec {
    int rows = 20;
    int cols = 20;
    double pitch = 246.0;        // meters between adjacent grid points
    double min_spacing = 246.0;  // 3 x rotor diameter by default
    Turbine origin{0.0, 0.0};

    int cells() const { return rows * cols; }
    Turbine cell_position(int row, int col) const {
        return {origin.x + col * pitch, origin.y + row * pitch};
    }
    void validate() const {
        if (rows < 1 || cols < 1) throw std::invalid_argument("grid: need at least one cell");
        if (!(pitch > 0.0)) throw std::invalid_argument("grid: pitch must be positive");
        if (!(min_spacing > 0.0)) throw std::invalid_argument("grid: min_spacing must be positive");
    }
};

// Row-major presence bits; 1 = turbine at that grid point.
struct Genome {
    std::vector<std::uint8_t> bits;

    std::size_t popcount() const {
        return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
    }
    std::string key() const { return std::string(bits.begin(), bits.end()); }
    friend bool operator==(const Genome& a, const Genome& b) { return a.bits == b.bits; }
};

inline Layout decode(const Genome& genome, const GridSpec& grid) {
    grid.validate();
    if (genome.bits.size() != static_cast<std::size_t>(grid.cells()))
        throw std::invalid_argument("genome: length does not match grid");
    Layout layout;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            if (genome.bits[static_cast<std::size_t>(r) * grid.cols + c])
                layout.add(grid.cell_position(r, c));
    if (layout.empty()) throw std::invalid_argument("genome: all-zero genome decodes to an empty layout");
    return layout;
}

// Nearest-cell snap; exact inverse of decode on grid-aligned layouts.
inline Genome encode(const Layout& layout, const GridSpec& grid) {
    grid.validate();
    Genome genome;
    genome.bits.assign(static_cast<std::size_t>(grid.cells()), 0);
    for (const auto& t : layout) {
        const double fc = (t.x - grid.origin.x) / grid.pitch;
        const double fr = (t.y - grid.origin.y) / grid.pitch;
        const int c = static_cast<int>(std::lround(fc));
        const int r = static_cast<int>(std::lround(fr));
        if (r < 0 || r >= grid.rows || c < 0 || c >= grid.cols ||
            std::abs(fc - c) > 0.5 || std::abs(fr - r) > 0.5)
            throw std::invalid_argument("encode: turbine more than half a pitch from any grid point");
        auto& bit = genome.bits[static_cast<std::size_t>(r) * grid.cols + c];
        if (bit) throw std::invalid_argument("encode: two turbines snap to the same grid cell");
        bit = 1;
    }
    return genome;
}

// True iff at least one turbine and all pairwise distances >= min_spacing.
inline bool feasible(const Genome& genome, const GridSpec& grid) {
    if (genome.popcount() == 0) return false;
    if (grid.pitch >= grid.min_spacing) return true;  // grid geometry guarantees spacing
    const Layout layout = decode(genome, grid);
    const double min_sq = grid.min_spacing * grid.min_spacing;
    for (std::size_t i = 0; i < layout.size(); ++i)
        for (std::size_t j = i + 1; j < layout.size(); ++j)
            if (squared_distance(layout[i], layout[j]) < min_sq) return false;
    return true;
}

// Greedy repair: drop the bit involved in the most spacing violations
// (ties broken by lowest index) until feasible; an all-zero genome gets one
// uniformly random bit. Never increases popcount above its input (except for
// the all-zero case) and always terminates.
inline Genome repair(Genome genome, const GridSpec& grid, std::mt19937_64& rng) {
    if (genome.popcount() == 0) {
        std::uniform_int_distribution<int> cell(0, grid.cells() - 1);
        genome.bits[static_cast<std::size_t>(cell(rng))] = 1;
    }
    if (grid.pitch >= grid.min_spacing) return genome;

    const double min_sq = grid.min_spacing * grid.min_spacing;
    while (true) {
        std::vector<int> set_cells;
        for (int i = 0; i < grid.cells(); ++i)
            if (genome.bits[static_cast<std::size_t>(i)]) set_cells.push_back(i);

        std::vector<int> violations(set_cells.size(), 0);
        bool any = false;
        for (std::size_t i = 0; i < set_cells.size(); ++i) {
            const Turbine a = grid.cell_position(set_cells[i] / grid.cols, set_cells[i] % grid.cols);
            for (std::size_t j = i + 1; j < set_cells.size(); ++j) {
                const Turbine b =
                    grid.cell_position(set_cells[j] / grid.cols, set_cells[j] % grid.cols);
                if (squared_distance(a, b) < min_sq) {
                    ++violations[i];
                    ++violations[j];
                    any = true;
                }
            }
        }
        if (!any) return genome;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < set_cells.size(); ++i)
            if (violations[i] > violations[worst]) worst = i;
        genome.bits[static_cast<std::size_t>(set_cells[worst])] = 0;
        if (genome.popcount() == 0) {
            // dropping the last bit cannot happen with >= 2 cells, but stay safe
            std::uniform_int_distribution<int> cell(0, grid.cells() - 1);
            genome.bits[static_cast<std::size_t>(cell(rng))] = 1;
            return genome;
        }
    }
}

struct GaConfig {
    int population = 100;
    int generations = 100;
    double crossover_prob = 0.9;                 // two-point crossover
    std::optional<double> mutation_prob;         // default 1 / (rows * cols)
    int elitism = 1;
};

// Maximises an arbitrary layout score over feasible genomes with a binary
// GA (binary tournament selection, two-point crossover, per-bit mutation,
// elitism). Genomes whose keys appear in `exclude` are scored but never
// returned. Deterministic given seed.
inline Layout maximise_acquisition(const std::function<double(const Layout&)>& score,
                                   const GridSpec& grid, const GaConfig& ga, std::uint64_t seed,
                                   const std::unordered_set<std::string>& exclude = {}) {
    grid.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n_bits = grid.cells();
    const double mut_p = ga.mutation_prob.value_or(1.0 / n_bits);

    struct Scored {
        Genome genome;
        double value;
    };
    std::vector<Scored> pop;
    pop.reserve(static_cast<std::size_t>(ga.population));

    // best distinct candidate seen anywhere in the run
    bool have_best = false;
    Genome best_genome;
    double best_value = -std::numeric_limits<double>::infinity();

    auto evaluate = [&](Genome g) {
        g = repair(std::move(g), grid, rng);
        const double v = score(decode(g, grid));
        if ((!have_best || v > best_value) && !exclude.contains(g.key())) {
            have_best = true;
            best_value = v;
            best_genome = g;
        }
        return Scored{std::move(g), v};
    };

    for (int p = 0; p < ga.population; ++p) {
        Genome g;
        g.bits.resize(static_cast<std::size_t>(n_bits));
        for (auto& b : g.bits) b = unit(rng) < 0.5 ? 1 : 0;
        pop.push_back(evaluate(std::move(g)));
    }

    std::uniform_int_distribution<int> pick(0, ga.population - 1);
    std::uniform_int_distribution<int> cut(0, n_bits - 1);

    auto tournament = [&]() -> const Scored& {
        const auto& a = pop[static_cast<std::size_t>(pick(rng))];
        const auto& b = pop[static_cast<std::size_t>(pick(rng))];
        return a.value >= b.value ? a : b;
    };

    for (int gen = 0; gen < ga.generations; ++gen) {
        std::vector<Scored> next;
        next.reserve(pop.size());
        // elitism: carry the current best members over unchanged
        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&pop](std::size_t a, std::size_t b) { return pop[a].value > pop[b].value; });
        for (int e = 0; e < ga.elitism && e < static_cast<int>(pop.size()); ++e)
            next.push_back(pop[order[static_cast<std::size_t>(e)]]);

        while (next.size() < pop.size()) {
            Genome child_a = tournament().genome;
            Genome child_b = tournament().genome;
            if (unit(rng) < ga.crossover_prob) {
                int lo = cut(rng), hi = cut(rng);
                if (lo > hi) std::swap(lo, hi);
                for (int i = lo; i <= hi; ++i)
                    std::swap(child_a.bits[static_cast<std::size_t>(i)],
                              child_b.bits[static_cast<std::size_t>(i)]);
            }
            for (auto* child : {&child_a, &child_b}) {
                for (auto& b : child->bits)
                    if (unit(rng) < mut_p) b ^= 1;
                if (next.size() < pop.size()) next.push_back(evaluate(std::move(*child)));
            }
        }
        pop = std::move(next);
    }

    if (!have_best)
        throw std::runtime_error("acquisition: no feasible non-duplicate candidate found");
    return decode(best_genome, grid);
}

// EHVI of a decoded layout under the per-objective GP posteriors.
inline std::function<double(const Layout&)> ehvi_scorer(const std::vector<SetGpModel>& models,
                                                        const ParetoArchive& archive) {
    return [&models, &archive](const Layout& layout) {
        PredictiveBox box;
        for (const auto& model : models) {
            const auto pred = model.predict(layout);
            box.mean.push_back(pred.mean);
            box.stddev.push_back(std::sqrt(pred.variance));
        }
        return archive.ehvi(box);
    };
}

inline Layout maximise_ehvi(const std::vector<SetGpModel>& models, const ParetoArchive& archive,
                            const GridSpec& grid, const GaConfig& ga, std::uint64_t seed,
                            const std::unordered_set<std::string>& exclude = {}) {
    if (models.empty()) throw std::invalid_argument("acquisition: no models");
    if (archive.points().empty()) throw std::invalid_argument("acquisition: empty archive");
    return maximise_acquisition(ehvi_scorer(models, archive), grid, ga, seed, exclude);
}

}  // namespace wfopt
