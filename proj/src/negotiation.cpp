#include "mopac/negotiation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mopac {

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::Bidding: return "bidding";
        case Phase::Voting: return "voting";
        case Phase::OptIn: return "opt_in";
        case Phase::Resolved: return "resolved";
    }
    return "?";
}

Negotiation::Negotiation(std::vector<RosterEntry> roster, ProtocolParams params)
    : params_(params) {
    if (roster.empty())
        throw ProtocolError(ErrorCode::EmptyRoster, "roster is empty");
    if (roster.size() == 1)
        throw ProtocolError(ErrorCode::SingleAgent,
                            "a negotiation needs at least two agents");
    std::set<AgentId> seen;
    for (const auto& entry : roster) {
        if (entry.power == 0)
            throw ProtocolError(ErrorCode::ZeroPower,
                                "agent " + entry.agent.value + " has power 0");
        if (!seen.insert(entry.agent).second)
            throw ProtocolError(ErrorCode::DuplicateAgent,
                                "duplicate agent " + entry.agent.value);
    }
    if (params.max_rounds == 0)
        throw ProtocolError(ErrorCode::ZeroRounds, "max_rounds must be >= 1");
    initial_roster_ = roster;
    roster_ = std::move(roster);
    p_max_ = roster_power_sum();
    if (params.p_min > p_max_) {
        std::ostringstream msg;
        msg << "p_min " << params.p_min << " exceeds the roster's total power "
            << p_max_;
        throw ProtocolError(ErrorCode::PMinExceedsPMax, msg.str());
    }
}

Power Negotiation::roster_power_sum() const {
    Power sum = 0;
    for (const auto& entry : roster_) sum += entry.power;
    return sum;
}

bool Negotiation::is_active(const AgentId& agent) const {
    return std::any_of(roster_.begin(), roster_.end(),
                       [&](const RosterEntry& e) { return e.agent == agent; });
}

Power Negotiation::power_of(const AgentId& agent) const {
    for (const auto& entry : roster_)
        if (entry.agent == agent) return entry.power;
    throw ProtocolError(ErrorCode::UnknownAgent,
                        "agent " + agent.value + " is not active");
}

const Vote* Negotiation::voting_vote(const AgentId& agent, const Bid& bid) const {
    auto it = votes_.find({agent, bid});
    return it == votes_.end() ? nullptr : &it->second;
}

void Negotiation::require_phase(Phase expected, const char* op) const {
    if (finished_)
        throw ProtocolError(ErrorCode::NegotiationOver,
                            std::string(op) + ": the negotiation has ended");
    if (phase_ != expected) {
        std::ostringstream msg;
        msg << op << " requires phase " << to_string(expected) << ", state is "
            << to_string(phase_);
        throw ProtocolError(ErrorCode::WrongPhase, msg.str());
    }
}

void Negotiation::require_active(const AgentId& agent) const {
    if (!is_active(agent))
        throw ProtocolError(ErrorCode::UnknownAgent,
                            "agent " + agent.value + " is not active");
}

void Negotiation::require_table_bid(const Bid& bid) const {
    if (std::find(bid_table_.begin(), bid_table_.end(), bid) == bid_table_.end())
        throw ProtocolError(ErrorCode::UnknownBid,
                            "bid " + bid.value + " is not on the table");
}

void Negotiation::submit_bid(const AgentId& agent, const Bid& bid) {
    require_phase(Phase::Bidding, "submit_bid");
    require_active(agent);
    if (current_bids_.count(agent))
        throw ProtocolError(ErrorCode::AlreadyBid,
                            "agent " + agent.value + " already bid this round");
    current_bids_.emplace(agent, bid);
    submission_order_.emplace_back(agent, bid);
}

void Negotiation::drop_agent(const AgentId& agent) {
    require_phase(Phase::Bidding, "drop_agent");
    require_active(agent);
    current_bids_.erase(agent);
    std::erase_if(submission_order_,
                  [&](const auto& entry) { return entry.first == agent; });
    std::erase_if(roster_, [&](const RosterEntry& e) { return e.agent == agent; });
    p_max_ = roster_power_sum();
}

BidAnnouncement Negotiation::close_bidding() {
    require_phase(Phase::Bidding, "close_bidding");
    std::vector<AgentId> missing;
    for (const auto& entry : roster_)
        if (!current_bids_.count(entry.agent)) missing.push_back(entry.agent);
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "agents without a bid:";
        for (const auto& a : missing) msg << ' ' << a.value;
        throw ProtocolError(ErrorCode::MissingBids, msg.str());
    }

    bid_table_.clear();
    for (const auto& [agent, bid] : submission_order_)
        if (std::find(bid_table_.begin(), bid_table_.end(), bid) == bid_table_.end())
            bid_table_.push_back(bid);

    BidAnnouncement announcement;
    announcement.reserve(roster_.size());
    for (const auto& entry : roster_)
        announcement.push_back({entry.agent, current_bids_.at(entry.agent),
                                entry.power});
    phase_ = Phase::Voting;
    return announcement;
}

void Negotiation::submit_vote(const AgentId& agent, const Bid& bid,
                              const Vote& vote) {
    require_phase(Phase::Voting, "submit_vote");
    require_active(agent);
    require_table_bid(bid);
    if (auto violation = validate_vote(vote, params_.p_min, p_max_);
        violation != VoteViolation::None)
        throw ProtocolError(ErrorCode::InvalidThresholds,
                            "invalid vote by " + agent.value + " on " +
                                bid.value + ": " + to_string(violation));
    if (votes_.count({agent, bid}))
        throw ProtocolError(ErrorCode::AlreadyVoted,
                            agent.value + " already voted on " + bid.value);
    votes_.emplace(VoteKey{agent, bid}, vote);
}

VoteAnnouncement Negotiation::close_voting() {
    require_phase(Phase::Voting, "close_voting");
    std::vector<VoteKey> missing;
    for (const auto& entry : roster_)
        for (const auto& bid : bid_table_)
            if (!votes_.count({entry.agent, bid}))
                missing.push_back({entry.agent, bid});
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "missing votes:";
        for (const auto& [agent, bid] : missing)
            msg << ' ' << agent.value << '/' << bid.value;
        throw ProtocolError(ErrorCode::MissingVotes, msg.str());
    }

    VoteAnnouncement announcement;
    announcement.reserve(roster_.size());
    for (const auto& entry : roster_) {
        VoteAnnouncementEntry row{entry.agent, {}};
        row.votes.reserve(bid_table_.size());
        for (const auto& bid : bid_table_)
            row.votes.emplace_back(bid, votes_.at({entry.agent, bid}));
        announcement.push_back(std::move(row));
    }
    phase_ = Phase::OptIn;
    return announcement;
}

void Negotiation::submit_optin(const AgentId& agent, const Bid& bid,
                               const Vote& vote) {
    require_phase(Phase::OptIn, "submit_optin");
    require_active(agent);
    require_table_bid(bid);
    const Vote& prior = votes_.at({agent, bid});
    if (auto violation = validate_optin(prior, vote, params_.p_min, p_max_);
        violation != OptInViolation::None)
        throw ProtocolError(ErrorCode::InvalidOptIn,
                            "invalid opt-in by " + agent.value + " on " +
                                bid.value + ": " + to_string(violation));
    if (optin_votes_.count({agent, bid}))
        throw ProtocolError(ErrorCode::AlreadyVoted,
                            agent.value + " already re-voted on " + bid.value);
    optin_votes_.emplace(VoteKey{agent, bid}, vote);
}

void Negotiation::close_optin() {
    require_phase(Phase::OptIn, "close_optin");
    std::vector<VoteKey> missing;
    for (const auto& entry : roster_)
        for (const auto& bid : bid_table_)
            if (!optin_votes_.count({entry.agent, bid}))
                missing.push_back({entry.agent, bid});
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "missing opt-in votes:";
        for (const auto& [agent, bid] : missing)
            msg << ' ' << agent.value << '/' << bid.value;
        throw ProtocolError(ErrorCode::MissingVotes, msg.str());
    }
    phase_ = Phase::Resolved;
}

ResolvedRound Negotiation::resolved_round() const {
    if (phase_ != Phase::Resolved)
        throw ProtocolError(ErrorCode::NotResolved,
                            "resolved_round: the round is still open");
    return {roster_, bid_table_, optin_votes_, params_.p_min, round_index_};
}

void Negotiation::advance_round(const RoundOutcome& outcome) {
    if (finished_)
        throw ProtocolError(ErrorCode::NegotiationOver,
                            "advance_round: the negotiation has ended");
    if (phase_ != Phase::Resolved)
        throw ProtocolError(ErrorCode::NotResolved,
                            "advance_round requires a resolved round");
    for (const auto& deal : outcome.deals) deals_.push_back(deal);

    if (outcome.negotiation_over) {
        finished_ = true;
        finish_reason_ = outcome.reason;
        return;
    }

    std::vector<RosterEntry> next;
    next.reserve(outcome.continuing_agents.size());
    for (const auto& entry : roster_) {
        if (std::find(outcome.continuing_agents.begin(),
                      outcome.continuing_agents.end(),
                      entry.agent) != outcome.continuing_agents.end())
            next.push_back(entry);
    }
    roster_ = std::move(next);
    p_max_ = roster_power_sum();
    round_index_ += 1;
    phase_ = Phase::Bidding;
    current_bids_.clear();
    submission_order_.clear();
    bid_table_.clear();
    votes_.clear();
    optin_votes_.clear();

    // With p_max below p_min no window can ever contain a group's power,
    // so no consensus is reachable and the negotiation ends here.
    if (p_max_ < params_.p_min) {
        finished_ = true;
        finish_reason_ = FinishReason::PMinUnreachable;
    }
}

}  // namespace mopac
