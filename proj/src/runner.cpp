#include "mopac/runner.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "mopac/resolution.hpp"

namespace mopac {

std::unique_ptr<Strategy> make_strategy(const AgentSpec& spec,
                                        const std::vector<Bid>& bid_space) {
    switch (spec.kind) {
        case StrategyKind::Scripted:
            return std::make_unique<ScriptedStrategy>(spec.script);
        case StrategyKind::Utility:
            return std::make_unique<UtilityThresholdStrategy>(spec.profile,
                                                              bid_space);
        case StrategyKind::Random:
            return std::make_unique<RandomStrategy>(spec.strategy_seed,
                                                    bid_space);
    }
    throw std::logic_error("unreachable strategy kind");
}

namespace {

Json started_payload(const Scenario& scenario, const Negotiation& state,
                     EngineKind engine) {
    Json payload;
    payload["name"] = scenario.name;
    payload["roster"] = roster_to_json(state.roster());
    payload["p_min"] = state.params().p_min;
    payload["p_max"] = state.p_max();
    payload["max_rounds"] = state.params().max_rounds;
    payload["policy"] =
        state.params().policy == TerminationPolicy::LargestOnly ? "one" : "two";
    payload["seed"] = state.params().rng_seed;
    payload["rng"] = DeterministicRng::kAlgorithm;
    payload["engine"] = engine == EngineKind::Naive ? "naive" : "pruned";
    return payload;
}

Json ended_payload(const Negotiation& state) {
    std::set<AgentId> dealt;
    for (const auto& deal : state.deals())
        for (const auto& m : deal.members) dealt.insert(m);
    Json dealless = Json::array();
    for (const auto& entry : state.initial_roster())
        if (!dealt.count(entry.agent)) dealless.push_back(entry.agent.value);
    Json payload;
    payload["reason"] = to_string(state.finish_reason());
    payload["rounds"] = state.round_index();
    payload["deal_count"] = state.deals().size();
    payload["dealless"] = dealless;
    return payload;
}

AgentView view_for(const Negotiation& state, const RosterEntry& entry) {
    return {entry.agent, entry.power, state.round_index(),
            state.params().p_min, state.p_max()};
}

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    Scenario effective = scenario;
    if (options.seed_override) effective.params.rng_seed = *options.seed_override;
    if (options.policy_override) effective.params.policy = *options.policy_override;

    std::vector<RosterEntry> roster;
    roster.reserve(effective.agents.size());
    std::map<AgentId, std::unique_ptr<Strategy>> strategies;
    for (const auto& spec : effective.agents) {
        roster.push_back({spec.id, spec.power});
        strategies.emplace(spec.id, make_strategy(spec, effective.bid_space));
    }

    RunResult result{Negotiation(roster, effective.params), {}, {}};
    Negotiation& state = result.state;
    TraceRecorder& trace = result.trace;
    DeterministicRng rng(effective.params.rng_seed);

    trace.record(0, Phase::Bidding, TraceKind::NegotiationStarted,
                 started_payload(effective, state, options.engine));

    const AgentId* acting = nullptr;
    try {
        while (!state.finished()) {
            const auto round = state.round_index();

            // bidding
            for (const auto& entry : state.roster()) {
                acting = &entry.agent;
                Bid bid = strategies.at(entry.agent)
                              ->on_bid_request({view_for(state, entry)});
                state.submit_bid(entry.agent, bid);
                trace.record(round, Phase::Bidding, TraceKind::BidSubmitted,
                             {{"agent", entry.agent.value}, {"bid", bid.value}});
            }
            acting = nullptr;
            auto bid_announcement = state.close_bidding();
            trace.record(round, Phase::Bidding, TraceKind::BidAnnouncement,
                         {{"entries", bid_announcement_to_json(bid_announcement)}});

            // voting
            for (const auto& entry : state.roster()) {
                acting = &entry.agent;
                auto votes = strategies.at(entry.agent)
                                 ->on_vote_request({view_for(state, entry),
                                                    bid_announcement,
                                                    state.bid_table()});
                for (const auto& [bid, vote] : votes) {
                    state.submit_vote(entry.agent, bid, vote);
                    trace.record(round, Phase::Voting, TraceKind::VoteSubmitted,
                                 {{"agent", entry.agent.value},
                                  {"bid", bid.value},
                                  {"vote", vote_to_json(vote)}});
                }
            }
            acting = nullptr;
            auto vote_announcement = state.close_voting();
            trace.record(round, Phase::Voting, TraceKind::VoteAnnouncement,
                         {{"entries", vote_announcement_to_json(vote_announcement)}});

            // opt-in
            for (const auto& entry : state.roster()) {
                acting = &entry.agent;
                auto votes = strategies.at(entry.agent)
                                 ->on_optin_request({view_for(state, entry),
                                                     vote_announcement,
                                                     state.bid_table()});
                for (const auto& [bid, vote] : votes) {
                    state.submit_optin(entry.agent, bid, vote);
                    trace.record(round, Phase::OptIn, TraceKind::OptInSubmitted,
                                 {{"agent", entry.agent.value},
                                  {"bid", bid.value},
                                  {"vote", vote_to_json(vote)}});
                }
            }
            acting = nullptr;
            state.close_optin();

            // resolution
            auto round_data = state.resolved_round();
            auto groups = options.engine == EngineKind::Naive
                              ? viable_groups_naive(round_data)
                              : viable_groups_pruned(round_data);
            trace.record(round, Phase::Resolved, TraceKind::ViableGroupsComputed,
                         {{"groups", viable_groups_to_json(groups)}});

            RoundContext ctx{state.roster(), round,
                             state.params().max_rounds};
            auto outcome = resolve(state.params().policy, ctx, groups, rng);
            for (const auto& deal : outcome.deals)
                trace.record(round, Phase::Resolved, TraceKind::DealStruck,
                             deal_to_json(deal));
            state.advance_round(outcome);
            if (!state.finished()) {
                Json continuing = Json::array();
                for (const auto& entry : state.roster())
                    continuing.push_back(entry.agent.value);
                trace.record(round, Phase::Resolved, TraceKind::RoundContinued,
                             {{"continuing", continuing}, {"p_max", state.p_max()}});
            }
        }
        trace.record(state.round_index(), Phase::Resolved,
                     TraceKind::NegotiationEnded, ended_payload(state));
    } catch (const StrategyError& error) {
        result.violation = {acting ? *acting : AgentId{"?"}, error.what()};
    } catch (const ProtocolError& error) {
        // A protocol rejection while an agent was acting is that agent's
        // violation; anything else is a harness bug and propagates.
        if (!acting) throw;
        result.violation = {*acting, error.what()};
    }
    return result;
}

}  // namespace mopac
