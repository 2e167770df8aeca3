#include "mopac/analyze.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "mopac/trace.hpp"

namespace mopac {

std::vector<RoundAnalysis> analyze_trace(const std::string& jsonl,
                                         EngineKind engine) {
    std::vector<TraceEvent> events;
    std::istringstream in(jsonl);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            events.push_back(TraceEvent::from_json(Json::parse(line)));
        } catch (const std::exception& error) {
            throw std::runtime_error("trace line " + std::to_string(line_no) +
                                     ": " + error.what());
        }
    }

    std::vector<RosterEntry> full_roster;
    Power p_min = 1;
    std::map<std::uint32_t, ResolvedRound> rounds;
    std::map<std::uint32_t, std::vector<ViableGroup>> recorded;
    std::vector<RosterEntry> current_roster;

    for (const auto& event : events) {
        switch (event.kind) {
            case TraceKind::NegotiationStarted:
                full_roster = roster_from_json(event.payload.at("roster"));
                current_roster = full_roster;
                p_min = event.payload.at("p_min").get<Power>();
                break;
            case TraceKind::BidSubmitted: {
                auto& round = rounds[event.round];
                round.round_index = event.round;
                round.p_min = p_min;
                round.roster = current_roster;
                Bid bid{event.payload.at("bid").get<std::string>()};
                if (std::find(round.bid_table.begin(), round.bid_table.end(),
                              bid) == round.bid_table.end())
                    round.bid_table.push_back(bid);
                break;
            }
            case TraceKind::OptInSubmitted: {
                auto& round = rounds[event.round];
                round.optin_votes.emplace(
                    VoteKey{AgentId{event.payload.at("agent").get<std::string>()},
                            Bid{event.payload.at("bid").get<std::string>()}},
                    vote_from_json(event.payload.at("vote")));
                break;
            }
            case TraceKind::ViableGroupsComputed:
                recorded[event.round] =
                    viable_groups_from_json(event.payload.at("groups"));
                break;
            case TraceKind::RoundContinued: {
                std::vector<RosterEntry> next;
                for (const auto& name : event.payload.at("continuing")) {
                    AgentId id{name.get<std::string>()};
                    auto it = std::find_if(
                        full_roster.begin(), full_roster.end(),
                        [&](const RosterEntry& e) { return e.agent == id; });
                    if (it != full_roster.end()) next.push_back(*it);
                }
                current_roster = std::move(next);
                break;
            }
            default:
                break;
        }
    }

    std::vector<RoundAnalysis> out;
    for (auto& [round_index, round] : rounds) {
        RoundAnalysis analysis;
        analysis.round_index = round_index;
        analysis.recomputed = engine == EngineKind::Naive
                                  ? viable_groups_naive(round)
                                  : viable_groups_pruned(round);
        if (auto it = recorded.find(round_index); it != recorded.end())
            analysis.recorded = it->second;
        out.push_back(std::move(analysis));
    }
    return out;
}

}  // namespace mopac
