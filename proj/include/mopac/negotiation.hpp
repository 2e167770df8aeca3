#ifndef MOPAC_NEGOTIATION_HPP
#define MOPAC_NEGOTIATION_HPP

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mopac/types.hpp"

namespace mopac {

/// Round phases. Transitions only Bidding -> Voting -> OptIn -> Resolved;
/// a resolved round either ends the negotiation or re-enters Bidding with
/// the remaining agents.
enum class Phase { Bidding, Voting, OptIn, Resolved };

const char* to_string(Phase phase);

struct BidAnnouncementEntry {
    AgentId agent;
    Bid bid;
    Power power = 0;
    auto operator<=>(const BidAnnouncementEntry&) const = default;
};

/// One entry per active agent, in roster order.
using BidAnnouncement = std::vector<BidAnnouncementEntry>;

struct VoteAnnouncementEntry {
    AgentId agent;
    std::vector<std::pair<Bid, Vote>> votes;  // one per table bid, table order
    auto operator<=>(const VoteAnnouncementEntry&) const = default;
};

/// Outer list in roster order, inner lists in bid-table order.
using VoteAnnouncement = std::vector<VoteAnnouncementEntry>;

using VoteKey = std::pair<AgentId, Bid>;
using VoteMap = std::map<VoteKey, Vote>;

/// Everything the consensus engine needs from a round whose opt-in phase
/// has closed.
struct ResolvedRound {
    std::vector<RosterEntry> roster;
    std::vector<Bid> bid_table;
    VoteMap optin_votes;
    Power p_min = 1;
    std::uint32_t round_index = 1;
};

/// The negotiation state machine. One instance owns one negotiation:
/// roster, protocol parameters, the per-round bid/vote/opt-in bookkeeping,
/// and the accumulated deals.
///
/// Strictly sequential; every mutation validates its preconditions before
/// touching state, so a failed operation leaves the state unchanged.
class Negotiation {
public:
    /// Requires >= 2 distinct agents, all powers >= 1, p_min <= sum of
    /// powers and max_rounds >= 1.
    Negotiation(std::vector<RosterEntry> roster, ProtocolParams params);

    // -- bidding ------------------------------------------------------
    void submit_bid(const AgentId& agent, const Bid& bid);
    /// Removes an active agent that has not acted; used by the mediator
    /// when a bidder times out. Recomputes p_max.
    void drop_agent(const AgentId& agent);
    /// Requires every active agent to have bid. The bid table keeps
    /// distinct values in first-submission order.
    BidAnnouncement close_bidding();

    // -- voting -------------------------------------------------------
    void submit_vote(const AgentId& agent, const Bid& bid, const Vote& vote);
    VoteAnnouncement close_voting();

    // -- opt-in -------------------------------------------------------
    void submit_optin(const AgentId& agent, const Bid& bid, const Vote& vote);
    void close_optin();

    // -- resolution hand-off -------------------------------------------
    /// Snapshot for the consensus engine; phase must be Resolved.
    ResolvedRound resolved_round() const;
    /// Applies a round outcome: accumulates deals, then either finishes
    /// the negotiation or starts the next round with the continuing
    /// agents. Also finishes when the new roster's total power cannot
    /// reach p_min.
    void advance_round(const RoundOutcome& outcome);

    // -- queries --------------------------------------------------------
    Phase phase() const { return phase_; }
    bool finished() const { return finished_; }
    FinishReason finish_reason() const { return finish_reason_; }
    std::uint32_t round_index() const { return round_index_; }
    Power p_max() const { return p_max_; }
    const ProtocolParams& params() const { return params_; }
    const std::vector<RosterEntry>& roster() const { return roster_; }
    const std::vector<RosterEntry>& initial_roster() const { return initial_roster_; }
    const std::vector<Bid>& bid_table() const { return bid_table_; }
    const std::map<AgentId, Bid>& current_bids() const { return current_bids_; }
    const VoteMap& votes() const { return votes_; }
    const VoteMap& optin_votes() const { return optin_votes_; }
    const std::vector<DealRecord>& deals() const { return deals_; }

    bool is_active(const AgentId& agent) const;
    Power power_of(const AgentId& agent) const;  // UnknownAgent if inactive
    /// Voting-phase vote for (agent, bid); null until submitted.
    const Vote* voting_vote(const AgentId& agent, const Bid& bid) const;

    bool operator==(const Negotiation&) const = default;

private:
    void require_phase(Phase expected, const char* op) const;
    void require_active(const AgentId& agent) const;
    void require_table_bid(const Bid& bid) const;
    Power roster_power_sum() const;

    ProtocolParams params_;
    std::vector<RosterEntry> initial_roster_;
    std::vector<RosterEntry> roster_;
    std::uint32_t round_index_ = 1;
    Phase phase_ = Phase::Bidding;
    bool finished_ = false;
    FinishReason finish_reason_ = FinishReason::None;
    std::map<AgentId, Bid> current_bids_;
    std::vector<std::pair<AgentId, Bid>> submission_order_;
    std::vector<Bid> bid_table_;  // distinct, first-submission order
    VoteMap votes_;
    VoteMap optin_votes_;
    std::vector<DealRecord> deals_;
    Power p_max_ = 0;
};

}  // namespace mopac

#endif  // MOPAC_NEGOTIATION_HPP
