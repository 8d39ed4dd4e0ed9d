#pragma once

// Baseline power-allocation policies behind the same interface used by the
// learned agent: gain-ratio (GRPA), normalized-gain-difference (NGDPA) and
// a half-time full-power TDMA reference.

#include <optional>
#include <string>

#include "vlcsim/channel.hpp"
#include "vlcsim/link.hpp"

namespace vlcsim {

struct AllocationDecision {
    double rho1; // power fraction of the stronger user, in [0, 0.5]
};

enum class Policy { Sac, Grpa, Ngdpa, Tdma };

Policy parse_policy(const std::string& name);
std::string policy_name(Policy p);

// rho1 = 1 / (1 + (h1/h2)^2)
AllocationDecision grpa(const ChannelPair& pair);

// rho1 = 1 / (1 + h1/|h1-h2|) = (1-r)/(2-r); the r = 1 limit is 0.
AllocationDecision ngdpa(const ChannelPair& pair);

// Each user gets the full power for half the time; solo CSK link per user.
LinkReport tdma_eval(const ChannelPair& pair, const LinkContext& ctx,
                     std::uint64_t n_symbols, Rng& rng);

class SacAgent; // sac.hpp

// Dispatch to a baseline rule or to the trained agent's deterministic action.
AllocationDecision apply_policy(Policy policy, const ChannelPair& pair,
                                const SacAgent* agent = nullptr);

} // namespace vlcsim
