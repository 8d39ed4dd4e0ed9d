#include "vlcsim/channel.hpp"

#include <cmath>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
double deg2rad(double d) { return d * kPi / 180.0; }
} // namespace

double lambert_order(double half_angle_deg) {
    if (half_angle_deg <= 0.0 || half_angle_deg >= 90.0)
        throw DomainError("LED half angle outside (0, 90) degrees: " +
                          std::to_string(half_angle_deg));
    return -std::log(2.0) / std::log(std::cos(deg2rad(half_angle_deg)));
}

double los_gain(const GeometryConfig& geom) {
    const double dx = geom.rx_position[0] - geom.tx_position[0];
    const double dy = geom.rx_position[1] - geom.tx_position[1];
    const double dz = geom.rx_position[2] - geom.tx_position[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 <= 0.0) throw DomainError("transmitter and receiver coincide");
    const double d = std::sqrt(d2);

    // LED points straight down, photodiode straight up.
    const double vertical = geom.tx_position[2] - geom.rx_position[2];
    const double cos_tx = vertical / d;   // radiation angle
    const double cos_psi = vertical / d;  // incidence angle
    if (cos_tx <= 0.0 || cos_psi <= 0.0) return 0.0;

    const double psi_deg = std::acos(std::min(1.0, cos_psi)) * 180.0 / kPi;
    if (psi_deg > geom.pd_fov_deg) return 0.0;

    const double kl = lambert_order(geom.led_half_angle_deg);
    const double radiant = (kl + 1.0) / (2.0 * kPi) * std::pow(cos_tx, kl);
    return geom.pd_area_m2 * radiant / d2 * geom.filter_gain * geom.lens_gain * cos_psi;
}

ChannelPair sample_channel_pair(double r, Rng& rng, double lower, double upper) {
    if (r <= 0.0 || r > 1.0)
        throw DomainError("channel ratio outside (0, 1]: " + std::to_string(r));
    const double h1 = rng.uniform(lower, upper / r);
    return ChannelPair{h1, r * h1, r};
}

std::pair<double, double> extended_bounds(double scale) {
    return {kGainLowerDefault / scale, kGainUpperDefault * scale};
}

} // namespace vlcsim
