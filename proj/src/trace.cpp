#include "mopac/trace.hpp"

#include <sstream>
#include <stdexcept>

namespace mopac {

const char* to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::NegotiationStarted: return "negotiation_started";
        case TraceKind::BidSubmitted: return "bid_submitted";
        case TraceKind::BidAnnouncement: return "bid_announcement";
        case TraceKind::VoteSubmitted: return "vote_submitted";
        case TraceKind::VoteAnnouncement: return "vote_announcement";
        case TraceKind::OptInSubmitted: return "optin_submitted";
        case TraceKind::ViableGroupsComputed: return "viable_groups_computed";
        case TraceKind::DealStruck: return "deal_struck";
        case TraceKind::RoundContinued: return "round_continued";
        case TraceKind::NegotiationEnded: return "negotiation_ended";
    }
    return "?";
}

TraceKind trace_kind_from_string(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(TraceKind::NegotiationEnded); ++k) {
        auto kind = static_cast<TraceKind>(k);
        if (name == to_string(kind)) return kind;
    }
    throw std::invalid_argument("unknown trace kind: " + name);
}

namespace {

Phase phase_from_string(const std::string& name) {
    for (int p = 0; p <= static_cast<int>(Phase::Resolved); ++p) {
        auto phase = static_cast<Phase>(p);
        if (name == to_string(phase)) return phase;
    }
    throw std::invalid_argument("unknown phase: " + name);
}

}  // namespace

Json TraceEvent::to_json() const {
    Json record;
    record["seq"] = seq;
    record["round"] = round;
    record["phase"] = to_string(phase);
    record["kind"] = to_string(kind);
    for (const auto& [key, value] : payload.items()) record[key] = value;
    return record;
}

TraceEvent TraceEvent::from_json(const Json& record) {
    TraceEvent event;
    event.seq = record.at("seq").get<std::uint64_t>();
    event.round = record.at("round").get<std::uint32_t>();
    event.phase = phase_from_string(record.at("phase").get<std::string>());
    event.kind = trace_kind_from_string(record.at("kind").get<std::string>());
    for (const auto& [key, value] : record.items())
        if (key != "seq" && key != "round" && key != "phase" && key != "kind")
            event.payload[key] = value;
    return event;
}

void TraceRecorder::record(std::uint32_t round, Phase phase, TraceKind kind,
                           Json payload) {
    events_.push_back({next_seq_++, round, phase, kind, std::move(payload)});
}

std::string TraceRecorder::to_jsonl() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

void TraceRecorder::write(std::ostream& out) const {
    for (const auto& event : events_) out << event.to_json().dump() << '\n';
}

Json vote_to_json(const Vote& vote) {
    Json j;
    j["accept"] = vote.is_accept();
    if (vote.is_accept()) {
        j["c_min"] = vote.c_min();
        j["c_max"] = vote.c_max();
    }
    return j;
}

Vote vote_from_json(const Json& j) {
    if (!j.at("accept").get<bool>()) return Vote::reject();
    return Vote::accept(j.at("c_min").get<Power>(), j.at("c_max").get<Power>());
}

Json roster_to_json(const std::vector<RosterEntry>& roster) {
    Json j = Json::array();
    for (const auto& entry : roster)
        j.push_back({{"agent", entry.agent.value}, {"power", entry.power}});
    return j;
}

std::vector<RosterEntry> roster_from_json(const Json& j) {
    std::vector<RosterEntry> roster;
    for (const auto& entry : j)
        roster.push_back({AgentId{entry.at("agent").get<std::string>()},
                          entry.at("power").get<Power>()});
    return roster;
}

Json bid_announcement_to_json(const BidAnnouncement& announcement) {
    Json j = Json::array();
    for (const auto& entry : announcement)
        j.push_back({{"agent", entry.agent.value},
                     {"bid", entry.bid.value},
                     {"power", entry.power}});
    return j;
}

BidAnnouncement bid_announcement_from_json(const Json& j) {
    BidAnnouncement announcement;
    for (const auto& entry : j)
        announcement.push_back({AgentId{entry.at("agent").get<std::string>()},
                                Bid{entry.at("bid").get<std::string>()},
                                entry.at("power").get<Power>()});
    return announcement;
}

Json vote_announcement_to_json(const VoteAnnouncement& announcement) {
    Json j = Json::array();
    for (const auto& entry : announcement) {
        Json votes = Json::array();
        for (const auto& [bid, vote] : entry.votes)
            votes.push_back({{"bid", bid.value}, {"vote", vote_to_json(vote)}});
        j.push_back({{"agent", entry.agent.value}, {"votes", votes}});
    }
    return j;
}

VoteAnnouncement vote_announcement_from_json(const Json& j) {
    VoteAnnouncement announcement;
    for (const auto& entry : j) {
        VoteAnnouncementEntry row{AgentId{entry.at("agent").get<std::string>()}, {}};
        for (const auto& item : entry.at("votes"))
            row.votes.emplace_back(Bid{item.at("bid").get<std::string>()},
                                   vote_from_json(item.at("vote")));
        announcement.push_back(std::move(row));
    }
    return announcement;
}

Json viable_groups_to_json(const std::vector<ViableGroup>& groups) {
    Json j = Json::array();
    for (const auto& vg : groups) {
        Json members = Json::array();
        for (const auto& m : vg.group.members) members.push_back(m.value);
        Json windows = Json::array();
        for (const auto& [agent, window] : vg.windows)
            windows.push_back({{"agent", agent.value},
                               {"c_min", window.c_min},
                               {"c_max", window.c_max}});
        j.push_back({{"bid", vg.group.bid.value},
                     {"members", members},
                     {"power", vg.group.power},
                     {"windows", windows}});
    }
    return j;
}

std::vector<ViableGroup> viable_groups_from_json(const Json& j) {
    std::vector<ViableGroup> groups;
    for (const auto& entry : j) {
        ViableGroup vg;
        vg.group.bid = Bid{entry.at("bid").get<std::string>()};
        vg.group.power = entry.at("power").get<Power>();
        for (const auto& m : entry.at("members"))
            vg.group.members.push_back(AgentId{m.get<std::string>()});
        for (const auto& w : entry.at("windows"))
            vg.windows.emplace_back(
                AgentId{w.at("agent").get<std::string>()},
                ThresholdWindow{w.at("c_min").get<Power>(),
                                w.at("c_max").get<Power>()});
        groups.push_back(std::move(vg));
    }
    return groups;
}

Json deal_to_json(const DealRecord& deal) {
    Json members = Json::array();
    for (const auto& m : deal.members) members.push_back(m.value);
    return {{"round", deal.round_index},
            {"bid", deal.bid.value},
            {"members", members},
            {"power", deal.power}};
}

DealRecord deal_from_json(const Json& j) {
    DealRecord deal;
    deal.round_index = j.at("round").get<std::uint32_t>();
    deal.bid = Bid{j.at("bid").get<std::string>()};
    for (const auto& m : j.at("members"))
        deal.members.push_back(AgentId{m.get<std::string>()});
    deal.power = j.at("power").get<Power>();
    return deal;
}

}  // namespace mopac
