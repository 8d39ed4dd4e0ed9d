#pragma once

// NOMA-CSK link layer: constellation, power-domain superposition, SINR and
// capacity metrics, and the Monte Carlo bit-error simulation with SIC.
//
// Conventions.  Each receiver normalizes to its own signal component
// (automatic gain control), so noise enters the SINR denominator scaled by
// the component's power share and the Monte Carlo noise deviation scales
// with the component amplitude plus a small allocation-independent floor.
// User 1 (stronger channel) cancels user 2's signal before decoding; user 2
// treats user 1's signal as interference, of which only the part remaining
// after mean-compensation is harmful.

#include <array>
#include <cstdint>
#include <utility>

#include "vlcsim/channel.hpp"
#include "vlcsim/rng.hpp"
#include "vlcsim/spectral.hpp"

namespace vlcsim {

struct CskConstellation {
    // Intensity triples with nonnegative components summing to 1.
    std::array<std::array<double, 3>, 4> symbols;
    // symbol index -> Gray-coded bit pattern
    std::array<std::uint8_t, 4> bit_map;

    static constexpr int size() { return 4; }
    static constexpr int bits_per_symbol() { return 2; }
};

// 4-CSK at the three color vertices plus the centroid, bits 00/01/10/11.
CskConstellation default_constellation();

struct LinkConfig {
    double bandwidth_hz = 30e6;
    double snr_db = 10.0;
    double p_led_w = 1.0;
    std::uint64_t mc_symbols = 100000;
    std::uint64_t mc_symbols_train = 20000;
    // Monte Carlo branch-noise calibration: per-branch deviation is
    //   sqrt(floor^2 + (signal*rho_k)^2) * h_k * P_led / sqrt(snr_linear).
    double noise_floor = 0.004;
    double noise_signal = 0.21;
};

struct NoiseModel {
    double snr_db;
    // Per-user AWGN power, anchored to the full-power received signal:
    // n0[k] = sum(received_power_matrix(S=(1,1,1), h_k)) / snr_linear.
    std::array<double, 2> n0;
};

struct LinkReport {
    double sinr1 = 0.0, sinr2 = 0.0;       // linear
    double capacity1 = 0.0, capacity2 = 0.0; // bit/s
    double ber1 = 0.0, ber2 = 0.0;
    double throughput1 = 0.0, throughput2 = 0.0; // bit/s
    double jain = 0.0;
    double sum_rate = 0.0;
};

// Precomputed spectral quantities shared by every link evaluation.
class LinkContext {
public:
    LinkContext(const LinkConfig& cfg, const std::array<LedColorParams, 3>& leds,
                const FilterBank& filters, const CskConstellation& constellation);
    explicit LinkContext(const LinkConfig& cfg);

    const LinkConfig& config() const { return cfg_; }
    const CskConstellation& constellation() const { return constellation_; }
    const std::array<SpectralCurve, 3>& psds() const { return psds_; }
    const FilterBank& filters() const { return filters_; }

    // band_fraction[i][j]: share of color i's unit-normalized PSD passing filter j.
    const std::array<std::array<double, 3>, 3>& band_fraction() const { return band_; }

    // Branch vector of a symbol: m_j(s) = sum_i band[i][j] * S_i(s).
    const std::array<std::array<double, 3>, 4>& branch_vectors() const { return branch_; }
    const std::array<double, 3>& branch_mean() const { return branch_mean_; }

    NoiseModel noise_for(const ChannelPair& pair) const;

private:
    LinkConfig cfg_;
    CskConstellation constellation_;
    std::array<SpectralCurve, 3> psds_;
    FilterBank filters_;
    std::array<std::array<double, 3>, 3> band_{};
    std::array<std::array<double, 3>, 4> branch_{};
    std::array<double, 3> branch_mean_{};
};

// Componentwise rho*S1 + (1-rho)*S2; preserves the unit-sum envelope.
std::array<double, 3> superpose(const std::array<double, 3>& s1,
                                const std::array<double, 3>& s2, double rho);

// SINR from explicit component sums: desired diagonal power over cross-color
// interference + residual inter-user interference + component-share-scaled
// noise.  The solo (full-power) case has rho_own = 1 and reduces to S/N0
// when the matrix is diagonal and there is no inter-user term.
double sinr_from_components(double desired, double cross_color,
                            double inter_user_residual, double rho_own, double n0);

// Per-user SINRs for one allocation.  rho in [0, 0.5].
std::pair<double, double> sinr_users(const ChannelPair& pair, double rho,
                                     const LinkContext& ctx);

// Single-user (full power) SINR at gain h, same conventions.
double sinr_solo(double gain, const LinkContext& ctx);

double capacity(double sinr_linear, double bandwidth_hz);
double throughput(double capacity_bps, double ber);
double jain_index(const std::vector<double>& throughputs);

// Monte Carlo BER over i.i.d. equiprobable symbol pairs.  User 1 performs
// joint ML over the 16 composite hypotheses (idealized SIC); user 2 performs
// ML over its 4 own-symbol hypotheses with the interferer modeled by its
// mean contribution.  Ties resolve to the lowest hypothesis index.
std::pair<double, double> simulate_ber(const ChannelPair& pair, double rho,
                                       const LinkContext& ctx,
                                       std::uint64_t n_symbols, Rng& rng);

// Single-user CSK Monte Carlo BER at gain h (used by the time-division baseline).
double simulate_ber_solo(double gain, const LinkContext& ctx,
                         std::uint64_t n_symbols, Rng& rng);

// Full link evaluation: SINRs, capacities, Monte Carlo BERs, throughputs,
// Jain index.
LinkReport evaluate_link(const ChannelPair& pair, double rho, const LinkContext& ctx,
                         std::uint64_t n_symbols, Rng& rng);

} // namespace vlcsim
