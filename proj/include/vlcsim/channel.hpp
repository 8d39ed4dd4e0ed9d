#pragma once

// Line-of-sight Lambertian channel and the randomized two-user channel
// sampler used by training and evaluation.

#include <array>

#include "vlcsim/rng.hpp"

namespace vlcsim {

struct GeometryConfig {
    double pd_area_m2 = 1e-4;
    double led_half_angle_deg = 60.0;
    double filter_gain = 1.0;
    double lens_gain = 1.0;
    double lens_refractive_index = 1.5;
    double pd_fov_deg = 90.0;
    std::array<double, 3> tx_position{2.5, 2.5, 3.0};
    std::array<double, 3> rx_position{2.5, 2.5, 2.0};
};

struct ChannelPair {
    double h1; // stronger user
    double h2; // weaker user
    double r;  // h2 / h1, in (0, 1]
};

inline constexpr double kGainLowerDefault = 2.84e-5;
inline constexpr double kGainUpperDefault = 5.98e-4;

// Lambertian emission mode number: -ln 2 / ln(cos(half_angle)).
double lambert_order(double half_angle_deg);

// LoS gain for an upward-facing receiver below a downward-facing LED.
// Returns 0 when the incidence angle exceeds the field of view.
double los_gain(const GeometryConfig& geom);

// h1 ~ Uniform[lower, upper/r], h2 = r * h1.
ChannelPair sample_channel_pair(double r, Rng& rng,
                                double lower = kGainLowerDefault,
                                double upper = kGainUpperDefault);

// (lower/scale, upper*scale) for the generalization experiment.
std::pair<double, double> extended_bounds(double scale);

} // namespace vlcsim
