#include "vlcsim/link.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vlcsim/errors.hpp"

namespace vlcsim {

CskConstellation default_constellation() {
    CskConstellation c;
    c.symbols = {{{1.0, 0.0, 0.0},
                  {0.0, 1.0, 0.0},
                  {0.0, 0.0, 1.0},
                  {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}};
    c.bit_map = {0b00, 0b01, 0b10, 0b11};
    return c;
}

LinkContext::LinkContext(const LinkConfig& cfg, const std::array<LedColorParams, 3>& leds,
                         const FilterBank& filters, const CskConstellation& constellation)
    : cfg_(cfg), constellation_(constellation), filters_(filters) {
    for (int i = 0; i < 3; ++i) psds_[i] = normalized_psd(leds[i]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const FilterBand& b = filters_.bands[j];
            band_[i][j] = psds_[i].band_integral(b.low_nm, b.high_nm) * b.gain;
        }
    for (int s = 0; s < 4; ++s)
        for (int j = 0; j < 3; ++j) {
            double m = 0.0;
            for (int i = 0; i < 3; ++i) m += band_[i][j] * constellation_.symbols[s][i];
            branch_[s][j] = m;
        }
    for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int s = 0; s < 4; ++s) acc += branch_[s][j];
        branch_mean_[j] = acc / 4.0;
    }
}

LinkContext::LinkContext(const LinkConfig& cfg)
    : LinkContext(cfg, default_led_params(), default_filter_bank(), default_constellation()) {}

NoiseModel LinkContext::noise_for(const ChannelPair& pair) const {
    const double snr_lin = std::pow(10.0, cfg_.snr_db / 10.0);
    NoiseModel nm;
    nm.snr_db = cfg_.snr_db;
    const std::array<double, 3> full{1.0, 1.0, 1.0};
    const double gains[2] = {pair.h1, pair.h2};
    for (int k = 0; k < 2; ++k) {
        PowerMatrix m = received_power_matrix(psds_, filters_, full, gains[k], cfg_.p_led_w);
        nm.n0[k] = m.sum() / snr_lin;
    }
    return nm;
}

std::array<double, 3> superpose(const std::array<double, 3>& s1,
                                const std::array<double, 3>& s2, double rho) {
    if (rho < 0.0 || rho > 0.5)
        throw DomainError("allocation coefficient outside [0, 0.5]: " + std::to_string(rho));
    return {s1[0] * rho + s2[0] * (1.0 - rho), s1[1] * rho + s2[1] * (1.0 - rho),
            s1[2] * rho + s2[2] * (1.0 - rho)};
}

double sinr_from_components(double desired, double cross_color,
                            double inter_user_residual, double rho_own, double n0) {
    if (desired <= 0.0) return 0.0;
    return desired / (cross_color + inter_user_residual + rho_own * n0);
}

std::pair<double, double> sinr_users(const ChannelPair& pair, double rho,
                                     const LinkContext& ctx) {
    if (rho < 0.0 || rho > 0.5)
        throw DomainError("allocation coefficient outside [0, 0.5]: " + std::to_string(rho));
    const NoiseModel nm = ctx.noise_for(pair);
    const std::array<double, 3> full{1.0, 1.0, 1.0};

    // Component matrices at the full-scale symbol envelope.
    auto [own1, other1] = composite_power_components(ctx.psds(), ctx.filters(), full, full,
                                                     rho, pair.h1, ctx.config().p_led_w);
    auto [own2at2, other2at2] = composite_power_components(
        ctx.psds(), ctx.filters(), full, full, rho, pair.h2, ctx.config().p_led_w);
    // own1:  user 1's component at receiver 1 (share rho)
    // other2at2: user 2's component at receiver 2 (share 1-rho)
    // own2at2:   user 1's component at receiver 2 (the interferer, share rho)

    // User 1 cancels user 2's signal entirely (idealized SIC), so only its
    // own cross-color interference and component-share noise remain.
    const double s1 = sinr_from_components(own1.trace(), own1.offdiag_sum(), 0.0, rho,
                                           nm.n0[0]);

    // User 2 compensates the interferer's mean; the residual scales with the
    // interferer's own power share.
    const double residual = rho * own2at2.sum();
    const double s2 = sinr_from_components(other2at2.trace(), other2at2.offdiag_sum(),
                                           residual, 1.0 - rho, nm.n0[1]);
    return {s1, s2};
}

double sinr_solo(double gain, const LinkContext& ctx) {
    const double snr_lin = std::pow(10.0, ctx.config().snr_db / 10.0);
    const std::array<double, 3> full{1.0, 1.0, 1.0};
    PowerMatrix m =
        received_power_matrix(ctx.psds(), ctx.filters(), full, gain, ctx.config().p_led_w);
    const double n0 = m.sum() / snr_lin;
    return sinr_from_components(m.trace(), m.offdiag_sum(), 0.0, 1.0, n0);
}

double capacity(double sinr_linear, double bandwidth_hz) {
    if (sinr_linear < 0.0) throw DomainError("negative SINR");
    return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

double throughput(double capacity_bps, double ber) {
    if (ber < 0.0 || ber > 1.0) throw DomainError("BER outside [0, 1]");
    return capacity_bps * (1.0 - ber);
}

double jain_index(const std::vector<double>& throughputs) {
    double sum = 0.0, sumsq = 0.0;
    for (double t : throughputs) {
        if (t < 0.0) throw DomainError("negative throughput");
        sum += t;
        sumsq += t * t;
    }
    if (sumsq == 0.0) throw DomainError("all throughputs are zero");
    return sum * sum / (static_cast<double>(throughputs.size()) * sumsq);
}

namespace {

inline int popcount2(unsigned x) { return (x & 1u) + ((x >> 1) & 1u); }

// Squared distance between a 3-branch observation and a hypothesis.
inline double dist2(const double* y, const double* h) {
    const double a = y[0] - h[0], b = y[1] - h[1], c = y[2] - h[2];
    return a * a + b * b + c * c;
}

} // namespace

std::pair<double, double> simulate_ber(const ChannelPair& pair, double rho,
                                       const LinkContext& ctx,
                                       std::uint64_t n_symbols, Rng& rng) {
    if (n_symbols < 1000) throw DomainError("Monte Carlo size below 1000 symbols");
    if (rho <= 0.0 || rho > 0.5)
        throw DomainError("allocation coefficient outside (0, 0.5]");

    const LinkConfig& cfg = ctx.config();
    const double snr_lin = std::pow(10.0, cfg.snr_db / 10.0);
    const auto& m = ctx.branch_vectors();
    const auto& mbar = ctx.branch_mean();
    const auto& bits = ctx.constellation().bit_map;

    // Per-branch noise deviations, referenced to each user's own component
    // with an allocation-independent floor.
    const double sig1 = std::sqrt(cfg.noise_floor * cfg.noise_floor +
                                  cfg.noise_signal * cfg.noise_signal * rho * rho) *
                        pair.h1 * cfg.p_led_w / std::sqrt(snr_lin);
    const double sig2 =
        std::sqrt(cfg.noise_floor * cfg.noise_floor +
                  cfg.noise_signal * cfg.noise_signal * (1.0 - rho) * (1.0 - rho)) *
        pair.h2 * cfg.p_led_w / std::sqrt(snr_lin);

    // Composite hypotheses at each receiver, index a*4+b for (s1=a, s2=b).
    double comp1[16][3], comp2hyp[4][3];
    const double scale1 = pair.h1 * cfg.p_led_w / 3.0;
    const double scale2 = pair.h2 * cfg.p_led_w / 3.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int j = 0; j < 3; ++j)
                comp1[a * 4 + b][j] = scale1 * (rho * m[a][j] + (1.0 - rho) * m[b][j]);
    for (int b = 0; b < 4; ++b)
        for (int j = 0; j < 3; ++j)
            comp2hyp[b][j] = scale2 * ((1.0 - rho) * m[b][j] + rho * mbar[j]);

    std::uint64_t bit_errors1 = 0, bit_errors2 = 0;
    for (std::uint64_t t = 0; t < n_symbols; ++t) {
        const int a = static_cast<int>(rng.uniform_index(4));
        const int b = static_cast<int>(rng.uniform_index(4));

        double y1[3], y2[3];
        for (int j = 0; j < 3; ++j) {
            const double clean = rho * m[a][j] + (1.0 - rho) * m[b][j];
            y1[j] = scale1 * clean + sig1 * rng.normal();
            y2[j] = scale2 * clean + sig2 * rng.normal();
        }

        // User 1: joint ML over all 16 composites, report the s1 of the best.
        int best1 = 0;
        double bd1 = dist2(y1, comp1[0]);
        for (int h = 1; h < 16; ++h) {
            const double d = dist2(y1, comp1[h]);
            if (d < bd1) {
                bd1 = d;
                best1 = h;
            }
        }
        bit_errors1 += popcount2(bits[best1 / 4] ^ bits[a]);

        // User 2: ML over its 4 hypotheses with mean interferer compensation.
        int best2 = 0;
        double bd2 = dist2(y2, comp2hyp[0]);
        for (int h = 1; h < 4; ++h) {
            const double d = dist2(y2, comp2hyp[h]);
            if (d < bd2) {
                bd2 = d;
                best2 = h;
            }
        }
        bit_errors2 += popcount2(bits[best2] ^ bits[b]);
    }

    const double denom = 2.0 * static_cast<double>(n_symbols);
    return {static_cast<double>(bit_errors1) / denom,
            static_cast<double>(bit_errors2) / denom};
}

double simulate_ber_solo(double gain, const LinkContext& ctx,
                         std::uint64_t n_symbols, Rng& rng) {
    if (n_symbols < 1000) throw DomainError("Monte Carlo size below 1000 symbols");
    const LinkConfig& cfg = ctx.config();
    const double snr_lin = std::pow(10.0, cfg.snr_db / 10.0);
    const auto& m = ctx.branch_vectors();
    const auto& bits = ctx.constellation().bit_map;
    const double scale = gain * cfg.p_led_w / 3.0;
    const double sig = std::sqrt(cfg.noise_floor * cfg.noise_floor +
                                 cfg.noise_signal * cfg.noise_signal) *
                       gain * cfg.p_led_w / std::sqrt(snr_lin);

    std::uint64_t bit_errors = 0;
    for (std::uint64_t t = 0; t < n_symbols; ++t) {
        const int s = static_cast<int>(rng.uniform_index(4));
        double y[3];
        for (int j = 0; j < 3; ++j) y[j] = scale * m[s][j] + sig * rng.normal();
        int best = 0;
        double bd = 1e300;
        for (int h = 0; h < 4; ++h) {
            double hyp[3] = {scale * m[h][0], scale * m[h][1], scale * m[h][2]};
            const double d = dist2(y, hyp);
            if (d < bd) {
                bd = d;
                best = h;
            }
        }
        bit_errors += popcount2(bits[best] ^ bits[s]);
    }
    return static_cast<double>(bit_errors) / (2.0 * static_cast<double>(n_symbols));
}

LinkReport evaluate_link(const ChannelPair& pair, double rho, const LinkContext& ctx,
                         std::uint64_t n_symbols, Rng& rng) {
    LinkReport rep;
    auto [s1, s2] = sinr_users(pair, rho, ctx);
    rep.sinr1 = s1;
    rep.sinr2 = s2;
    rep.capacity1 = capacity(s1, ctx.config().bandwidth_hz);
    rep.capacity2 = capacity(s2, ctx.config().bandwidth_hz);
    auto [b1, b2] = simulate_ber(pair, rho, ctx, n_symbols, rng);
    rep.ber1 = b1;
    rep.ber2 = b2;
    rep.throughput1 = throughput(rep.capacity1, b1);
    rep.throughput2 = throughput(rep.capacity2, b2);
    rep.jain = jain_index({rep.throughput1, rep.throughput2});
    rep.sum_rate = rep.throughput1 + rep.throughput2;
    return rep;
}

} // namespace vlcsim
