#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wfopt/geometry.hpp"
#include "wfopt/wake.hpp"
#include "wfopt/wind_stats.hpp"

namespace wfopt {

// Logistic-ratio turbine power curve parameters. No default values are
// shipped; they are site configuration.
struct PowerCurveParams {
    double scale_kw = 0.0;  // a
    double m = 0.0;
    double n = 0.0;
    double tau = 0.0;       // m/s
    double cut_in = 0.0;    // m/s

    void validate() const {
        if (!(scale_kw > 0.0)) throw std::invalid_argument("power curve: a must be positive");
        if (!(tau > 0.0)) throw std::invalid_argument("power curve: tau must be positive");
        if (!(cut_in >= 0.0)) throw std::invalid_argument("power curve: cut-in speed must be >= 0");
        // denominator must stay positive; worst case is v = 0
        if (!(1.0 + n > 0.0))
            throw std::invalid_argument("power curve: 1 + n*exp(-v/tau) must stay positive");
    }
};

// P(v) = a * (1 + m*exp(-v/tau)) / (1 + n*exp(-v/tau)) for v >= cut_in, else 0.
inline double power_curve(double speed, const PowerCurveParams& params) {
    params.validate();
    if (speed < 0.0) throw std::invalid_argument("power curve: speed must be non-negative");
    if (speed < params.cut_in) return 0.0;
    const double e = std::exp(-speed / params.tau);
    return params.scale_kw * (1.0 + params.m * e) / (1.0 + params.n * e);
}

// Expected farm power (kW): sum over grid cells with positive mass of the
// per-turbine power at the wake-reduced speed, weighted by p(v, theta).
//
// Jensen deficits are fractions of the incoming speed, so per-direction
// speed factors are computed once and reused across all speed bins.
inline double expected_power(const Layout& layout, const WindDistribution& dist,
                             const WakeConfig& wake, const PowerCurveParams& params) {
    params.validate();
    wake.validate();
    if (layout.empty()) return 0.0;

    const std::size_t n = layout.size();
    std::vector<double> factors(n);
    double total = 0.0;
    for (int theta = 0; theta < 360; ++theta) {
        bool any = false;
        for (int v = 0; v <= dist.v_max && !any; ++v) any = dist.at(v, theta) > 0.0;
        if (!any) continue;

        const auto speeds = effective_speeds(layout, 1.0, static_cast<double>(theta), wake);
        for (std::size_t i = 0; i < n; ++i) factors[i] = speeds[i];

        for (int v = 0; v <= dist.v_max; ++v) {
            const double p = dist.at(v, theta);
            if (p <= 0.0) continue;
            double cell_power = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                cell_power += power_curve(static_cast<double>(v) * factors[i], params);
            total += p * cell_power;
        }
    }
    return total;
}

// Installation cost as a function of turbine count:
// |X| * (2/3 + 1/3 * exp(-0.00174 * |X|^2)).
inline double installation_cost(std::size_t turbine_count) {
    const double k = static_cast<double>(turbine_count);
    return k * (2.0 / 3.0 + std::exp(-0.00174 * k * k) / 3.0);
}

// The two objectives of a layout; power is maximised, cost minimised.
struct ObjectiveVector {
    double power = 0.0;  // expected kW
    double cost = 0.0;   // dimensionless cost units

    // Canonical form in which all optimisation machinery minimises.
    std::array<double, 2> minimised() const { return {-power, cost}; }
};

inline ObjectiveVector evaluate(const Layout& layout, const WindDistribution& dist,
                                const WakeConfig& wake, const PowerCurveParams& params) {
    return {expected_power(layout, dist, wake, params), installation_cost(layout.size())};
}

}  // namespace wfopt
