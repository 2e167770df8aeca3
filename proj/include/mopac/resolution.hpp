#ifndef MOPAC_RESOLUTION_HPP
#define MOPAC_RESOLUTION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mopac/consensus.hpp"
#include "mopac/rng.hpp"
#include "mopac/types.hpp"

namespace mopac {

/// Round facts the termination policies need beyond the viable groups.
struct RoundContext {
    std::vector<RosterEntry> roster;
    std::uint32_t round_index = 1;
    std::uint32_t max_rounds = 1;
};

/// A group of maximal power; ties are broken uniformly with the seeded
/// generator. Empty input yields no group and consumes no draws. A draw
/// is consumed only when there is an actual tie.
std::optional<ViableGroup> select_largest(const std::vector<ViableGroup>& groups,
                                          DeterministicRng& rng);

/// Termination option (1): strike at most one deal — the largest-power
/// viable group — and end the negotiation for everyone. Without a viable
/// group all agents continue, until the round deadline.
RoundOutcome resolve_policy_one(const RoundContext& ctx,
                                const std::vector<ViableGroup>& groups,
                                DeterministicRng& rng);

/// Termination option (2): repeatedly extract the largest-power viable
/// group among the agents not yet dealt this round, then send the
/// undealt agents to the next round. Ends at the deadline or when one or
/// no agent remains.
RoundOutcome resolve_policy_two(const RoundContext& ctx,
                                const std::vector<ViableGroup>& groups,
                                DeterministicRng& rng);

RoundOutcome resolve(TerminationPolicy policy, const RoundContext& ctx,
                     const std::vector<ViableGroup>& groups, DeterministicRng& rng);

}  // namespace mopac

#endif  // MOPAC_RESOLUTION_HPP
