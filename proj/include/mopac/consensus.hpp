#ifndef MOPAC_CONSENSUS_HPP
#define MOPAC_CONSENSUS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "mopac/negotiation.hpp"
#include "mopac/types.hpp"

namespace mopac {

struct ThresholdWindow {
    Power c_min = 0;
    Power c_max = 0;
    auto operator<=>(const ThresholdWindow&) const = default;
};

/// A set of >= 2 agents who all opted in to the same bid.
struct ConsensusGroup {
    Bid bid;
    std::vector<AgentId> members;  // roster order
    Power power = 0;               // sum of member powers
    auto operator<=>(const ConsensusGroup&) const = default;
};

/// A consensus group whose power lies inside every member's accept
/// window.
struct ViableGroup {
    ConsensusGroup group;
    std::vector<std::pair<AgentId, ThresholdWindow>> windows;  // member order
    auto operator<=>(const ViableGroup&) const = default;
};

/// Sum of the members' powers. Members must be on the roster.
Power group_power(const std::vector<AgentId>& members,
                  const std::vector<RosterEntry>& roster);

/// True iff every member's opt-in vote on `bid` is Accept. Groups of
/// size < 2 are not consensus groups and are rejected outright.
bool is_consensus_group(const std::vector<AgentId>& members, const Bid& bid,
                        const VoteMap& optin_votes);

/// True iff every member's accept window contains the group's power.
/// The group must already satisfy is_consensus_group.
bool is_viable(const ConsensusGroup& group, const VoteMap& optin_votes);

/// All subsets of {0..n-1} with >= 2 elements, size ascending and then
/// lexicographic. Exactly 2^n - n - 1 subsets.
std::vector<std::vector<std::size_t>> enumerate_candidate_groups(std::size_t n);

/// Viable groups of a resolved round by full candidate enumeration:
/// every (bid, candidate subset) pair is tested. Output in bid-table
/// order, then candidate order.
std::vector<ViableGroup> viable_groups_naive(const ResolvedRound& round);

/// Same output as viable_groups_naive, but grown level-wise per bid from
/// the bid's acceptors only. Adding an agent to a set containing a
/// rejector can never yield a consensus group, so such sets are never
/// generated in the first place.
std::vector<ViableGroup> viable_groups_pruned(const ResolvedRound& round);

}  // namespace mopac

#endif  // MOPAC_CONSENSUS_HPP
