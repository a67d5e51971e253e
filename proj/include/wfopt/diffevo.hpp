#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace wfopt {

// rand/1/bin differential evolution over a box.
struct DeConfig {
    int population_per_dim = 15;
    int max_generations = 200;
    double tolerance = 1e-8;
    double weight = 0.8;          // differential weight F
    double crossover_rate = 0.9;  // CR
};

struct DeResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    int generations = 0;
};

// Minimises `objective` inside [lower, upper]. Deterministic given seed.
// Candidates evaluating to non-finite values are treated as infeasible.
inline DeResult differential_evolution(const std::function<double(const Eigen::VectorXd&)>& objective,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const DeConfig& config, std::uint64_t seed) {
    const int dim = static_cast<int>(lower.size());
    if (upper.size() != dim) throw std::invalid_argument("de: bound dimension mismatch");
    for (int i = 0; i < dim; ++i)
        if (!(lower[i] < upper[i])) throw std::invalid_argument("de: require lower < upper");

    const int pop_size = std::max(4, config.population_per_dim * dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Eigen::VectorXd> pop(pop_size, Eigen::VectorXd(dim));
    std::vector<double> fitness(pop_size);
    for (int p = 0; p < pop_size; ++p) {
        for (int i = 0; i < dim; ++i) pop[p][i] = lower[i] + unit(rng) * (upper[i] - lower[i]);
        const double f = objective(pop[p]);
        fitness[p] = std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    }

    std::uniform_int_distribution<int> pick(0, pop_size - 1);
    std::uniform_int_distribution<int> pick_dim(0, dim - 1);

    DeResult result;
    int gen = 0;
    for (; gen < config.max_generations; ++gen) {
        for (int p = 0; p < pop_size; ++p) {
            int a, b, c;
            do { a = pick(rng); } while (a == p);
            do { b = pick(rng); } while (b == p || b == a);
            do { c = pick(rng); } while (c == p || c == a || c == b);

            Eigen::VectorXd trial = pop[p];
            const int forced = pick_dim(rng);
            for (int i = 0; i < dim; ++i) {
                if (i == forced || unit(rng) < config.crossover_rate) {
                    double v = pop[a][i] + config.weight * (pop[b][i] - pop[c][i]);
                    trial[i] = std::clamp(v, lower[i], upper[i]);
                }
            }
            const double f = objective(trial);
            if (std::isfinite(f) && f <= fitness[p]) {
                pop[p] = std::move(trial);
                fitness[p] = f;
            }
        }
        double best = fitness[0], worst = fitness[0];
        for (double f : fitness) {
            best = std::min(best, f);
            worst = std::max(worst, f);
        }
        if (std::isfinite(worst) &&
            worst - best <= config.tolerance * (std::abs(best) + config.tolerance))
            break;
    }

    int best_idx = 0;
    for (int p = 1; p < pop_size; ++p)
        if (fitness[p] < fitness[best_idx]) best_idx = p;
    if (!std::isfinite(fitness[best_idx]))
        throw std::runtime_error("de: no finite objective value found");
    result.x = pop[best_idx];
    result.value = fitness[best_idx];
    result.generations = gen;
    return result;
}

}  // namespace wfopt
