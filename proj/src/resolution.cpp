#include "mopac/resolution.hpp"

#include <algorithm>
#include <set>

namespace mopac {

std::optional<ViableGroup> select_largest(const std::vector<ViableGroup>& groups,
                                          DeterministicRng& rng) {
    if (groups.empty()) return std::nullopt;
    Power best = 0;
    for (const auto& g : groups) best = std::max(best, g.group.power);
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].group.power == best) tied.push_back(i);
    std::size_t pick = tied.size() == 1
                           ? tied.front()
                           : tied[static_cast<std::size_t>(rng.below(tied.size()))];
    return groups[pick];
}

namespace {

std::vector<AgentId> roster_order(const RoundContext& ctx,
                                  const std::set<AgentId>& keep) {
    std::vector<AgentId> out;
    for (const auto& entry : ctx.roster)
        if (keep.count(entry.agent)) out.push_back(entry.agent);
    return out;
}

DealRecord to_deal(const ViableGroup& group, std::uint32_t round_index) {
    return {round_index, group.group.bid, group.group.members,
            group.group.power};
}

}  // namespace

RoundOutcome resolve_policy_one(const RoundContext& ctx,
                                const std::vector<ViableGroup>& groups,
                                DeterministicRng& rng) {
    RoundOutcome outcome;
    if (auto chosen = select_largest(groups, rng)) {
        outcome.deals.push_back(to_deal(*chosen, ctx.round_index));
        outcome.negotiation_over = true;
        outcome.reason = FinishReason::DealReached;
        return outcome;
    }
    for (const auto& entry : ctx.roster)
        outcome.continuing_agents.push_back(entry.agent);
    if (ctx.round_index >= ctx.max_rounds) {
        outcome.negotiation_over = true;
        outcome.reason = FinishReason::Deadline;
        outcome.continuing_agents.clear();
    }
    return outcome;
}

RoundOutcome resolve_policy_two(const RoundContext& ctx,
                                const std::vector<ViableGroup>& groups,
                                DeterministicRng& rng) {
    RoundOutcome outcome;
    std::set<AgentId> undealt;
    for (const auto& entry : ctx.roster) undealt.insert(entry.agent);

    while (true) {
        std::vector<ViableGroup> candidates;
        for (const auto& g : groups) {
            bool all_free = std::all_of(
                g.group.members.begin(), g.group.members.end(),
                [&](const AgentId& m) { return undealt.count(m) > 0; });
            if (all_free) candidates.push_back(g);
        }
        auto chosen = select_largest(candidates, rng);
        if (!chosen) break;
        outcome.deals.push_back(to_deal(*chosen, ctx.round_index));
        for (const auto& m : chosen->group.members) undealt.erase(m);
    }

    outcome.continuing_agents = roster_order(ctx, undealt);
    if (outcome.continuing_agents.size() <= 1) {
        outcome.negotiation_over = true;
        outcome.reason = FinishReason::TooFewAgents;
        outcome.continuing_agents.clear();
    } else if (ctx.round_index >= ctx.max_rounds) {
        outcome.negotiation_over = true;
        outcome.reason = FinishReason::Deadline;
        outcome.continuing_agents.clear();
    }
    return outcome;
}

RoundOutcome resolve(TerminationPolicy policy, const RoundContext& ctx,
                     const std::vector<ViableGroup>& groups, DeterministicRng& rng) {
    return policy == TerminationPolicy::LargestOnly
               ? resolve_policy_one(ctx, groups, rng)
               : resolve_policy_two(ctx, groups, rng);
}

}  // namespace mopac
