#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wfopt/geometry.hpp"

namespace wfopt {

// Jensen (park) wake model parameters. The decay constant may be given
// directly or derived from hub height and surface roughness.
struct WakeConfig {
    double rotor_radius = 41.0;               // r0, meters
    double thrust_coefficient = 0.8;          // C_T in [0, 1)
    std::optional<double> decay_constant;     // alpha, dimensionless
    std::optional<double> hub_height;         // z, meters
    std::optional<double> surface_roughness;  // z0, meters

    void validate() const {
        if (!(rotor_radius > 0.0))
            throw std::invalid_argument("wake: rotor_radius must be positive");
        if (!(thrust_coefficient >= 0.0 && thrust_coefficient < 1.0))
            throw std::invalid_argument("wake: thrust_coefficient must lie in [0, 1)");
        if (!decay_constant) {
            if (!hub_height || !surface_roughness)
                throw std::invalid_argument(
                    "wake: provide decay_constant, or hub_height and surface_roughness");
            if (!(*surface_roughness > 0.0) || !(*hub_height > *surface_roughness))
                throw std::invalid_argument("wake: require hub_height > surface_roughness > 0");
        } else if (!(*decay_constant > 0.0)) {
            throw std::invalid_argument("wake: decay_constant must be positive");
        }
    }
};

// alpha = 0.5 / ln(z / z0) when not given directly.
inline double resolve_alpha(const WakeConfig& config) {
    config.validate();
    if (config.decay_constant) return *config.decay_constant;
    return 0.5 / std::log(*config.hub_height / *config.surface_roughness);
}

// Wake cone radius at downwind distance D: r1 = r0 + alpha * D.
inline double cone_radius(double downwind_distance, const WakeConfig& config) {
    if (downwind_distance < 0.0)
        throw std::invalid_argument("wake: downwind distance must be non-negative");
    return config.rotor_radius + resolve_alpha(config) * downwind_distance;
}

// Fractional velocity deficit of a single wake at downwind distance D.
inline double wake_deficit(double downwind_distance, const WakeConfig& config) {
    const double alpha = resolve_alpha(config);
    const double denom = 1.0 + alpha * downwind_distance / config.rotor_radius;
    return (1.0 - std::sqrt(1.0 - config.thrust_coefficient)) / (denom * denom);
}

// Reduced speed behind a single turbine at downwind distance D.
inline double single_wake_speed(double upstream_speed, double downwind_distance,
                                const WakeConfig& config) {
    if (upstream_speed < 0.0)
        throw std::invalid_argument("wake: wind speed must be non-negative");
    if (downwind_distance < 0.0)
        throw std::invalid_argument("wake: downwind distance must be non-negative");
    return upstream_speed * (1.0 - wake_deficit(downwind_distance, config));
}

// Effective wind speed at each turbine for incoming speed v0 from
// meteorological direction theta (degrees, wind blows FROM theta).
//
// Coordinates are rotated into the wind frame with downwind axis
// (sin(theta + 180), cos(theta + 180)). Turbine j is waked by turbine i
// iff i is strictly upwind and j's hub lies inside i's wake cone.
// Multiple deficits combine by root-sum-square. Output order matches the
// layout's turbine order.
inline std::vector<double> effective_speeds(const Layout& layout, double wind_speed,
                                            double direction_deg, const WakeConfig& config) {
    config.validate();
    if (wind_speed < 0.0)
        throw std::invalid_argument("wake: wind speed must be non-negative");

    const std::size_t n = layout.size();
    std::vector<double> speeds(n, wind_speed);
    if (n <= 1) return speeds;

    // downwind unit vector; exact values at the compass points so that
    // aligned layouts have exactly zero downwind/crosswind separation
    double bearing = std::fmod(direction_deg + 180.0, 360.0);
    if (bearing < 0.0) bearing += 360.0;
    double dwx, dwy;
    if (bearing == 0.0) {
        dwx = 0.0, dwy = 1.0;
    } else if (bearing == 90.0) {
        dwx = 1.0, dwy = 0.0;
    } else if (bearing == 180.0) {
        dwx = 0.0, dwy = -1.0;
    } else if (bearing == 270.0) {
        dwx = -1.0, dwy = 0.0;
    } else {
        const double rad = bearing * std::numbers::pi / 180.0;
        dwx = std::sin(rad);
        dwy = std::cos(rad);
    }

    std::vector<double> down(n), cross(n);
    for (std::size_t i = 0; i < n; ++i) {
        down[i] = layout[i].x * dwx + layout[i].y * dwy;
        cross[i] = layout[i].x * dwy - layout[i].y * dwx;
    }

    const double alpha = resolve_alpha(config);
    const double r0 = config.rotor_radius;
    const double base_deficit = 1.0 - std::sqrt(1.0 - config.thrust_coefficient);

    for (std::size_t j = 0; j < n; ++j) {
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double dist = down[j] - down[i];
            if (dist <= 0.0) continue;  // strictly upwind only
            if (std::abs(cross[j] - cross[i]) >= r0 + alpha * dist) continue;
            const double denom = 1.0 + alpha * dist / r0;
            const double deficit = base_deficit / (denom * denom);
            sum_sq += deficit * deficit;
        }
        const double v = wind_speed * (1.0 - std::sqrt(sum_sq));
        speeds[j] = std::clamp(v, 0.0, wind_speed);
    }
    return speeds;
}

}  // namespace wfopt
