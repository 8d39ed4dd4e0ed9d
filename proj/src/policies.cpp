#include "vlcsim/policies.hpp"

#include <cmath>

#include "vlcsim/errors.hpp"
#include "vlcsim/sac.hpp"

namespace vlcsim {

Policy parse_policy(const std::string& name) {
    if (name == "sac") return Policy::Sac;
    if (name == "grpa") return Policy::Grpa;
    if (name == "ngdpa") return Policy::Ngdpa;
    if (name == "tdma") return Policy::Tdma;
    throw ConfigError("unknown policy: " + name);
}

std::string policy_name(Policy p) {
    switch (p) {
        case Policy::Sac: return "sac";
        case Policy::Grpa: return "grpa";
        case Policy::Ngdpa: return "ngdpa";
        case Policy::Tdma: return "tdma";
    }
    return "?";
}

AllocationDecision grpa(const ChannelPair& pair) {
    if (pair.h2 <= 0.0 || pair.h1 < pair.h2) throw DomainError("invalid channel pair");
    const double q = pair.h1 / pair.h2;
    return {1.0 / (1.0 + q * q)};
}

AllocationDecision ngdpa(const ChannelPair& pair) {
    if (pair.h2 <= 0.0 || pair.h1 < pair.h2) throw DomainError("invalid channel pair");
    const double diff = pair.h1 - pair.h2;
    if (diff == 0.0) return {0.0}; // continuous limit as the gains coincide
    return {1.0 / (1.0 + pair.h1 / diff)};
}

LinkReport tdma_eval(const ChannelPair& pair, const LinkContext& ctx,
                     std::uint64_t n_symbols, Rng& rng) {
    LinkReport rep;
    const double gains[2] = {pair.h1, pair.h2};
    double thr[2];
    double sinr[2], cap[2], ber[2];
    for (int k = 0; k < 2; ++k) {
        sinr[k] = sinr_solo(gains[k], ctx);
        cap[k] = capacity(sinr[k], ctx.config().bandwidth_hz);
        ber[k] = simulate_ber_solo(gains[k], ctx, n_symbols, rng);
        thr[k] = 0.5 * throughput(cap[k], ber[k]);
    }
    rep.sinr1 = sinr[0];
    rep.sinr2 = sinr[1];
    rep.capacity1 = cap[0];
    rep.capacity2 = cap[1];
    rep.ber1 = ber[0];
    rep.ber2 = ber[1];
    rep.throughput1 = thr[0];
    rep.throughput2 = thr[1];
    rep.jain = jain_index({thr[0], thr[1]});
    rep.sum_rate = thr[0] + thr[1];
    return rep;
}

AllocationDecision apply_policy(Policy policy, const ChannelPair& pair,
                                const SacAgent* agent) {
    switch (policy) {
        case Policy::Grpa: return grpa(pair);
        case Policy::Ngdpa: return ngdpa(pair);
        case Policy::Sac: {
            if (agent == nullptr)
                throw ConfigError("sac policy requested without a loaded agent");
            Rng unused(0);
            return {agent->act(pair.r, /*deterministic=*/true, unused)};
        }
        case Policy::Tdma:
            throw ConfigError("tdma is a time-division schedule, not a power split");
    }
    throw ConfigError("unhandled policy");
}

} // namespace vlcsim
