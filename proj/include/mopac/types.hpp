#ifndef MOPAC_TYPES_HPP
#define MOPAC_TYPES_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mopac {

/// Negotiation weight. Roster entries require value >= 1; sums of powers
/// use the same type.
using Power = std::uint64_t;

/// Opaque identity token of one negotiation participant.
struct AgentId {
    std::string value;
    auto operator<=>(const AgentId&) const = default;
};

/// Opaque element of the bid space. Equality is by token value: two agents
/// submitting the same token have submitted the same bid.
struct Bid {
    std::string value;
    auto operator<=>(const Bid&) const = default;
};

struct RosterEntry {
    AgentId agent;
    Power power = 0;
    auto operator<=>(const RosterEntry&) const = default;
};

/// How a negotiation round may end the whole negotiation:
/// LargestOnly strikes at most one deal and ends for everyone;
/// RepeatedExtraction keeps extracting disjoint deals and sends the rest
/// to the next round.
enum class TerminationPolicy { LargestOnly, RepeatedExtraction };

struct ProtocolParams {
    Power p_min = 1;                 // minimum power of any consensus
    std::uint32_t max_rounds = 1;    // deadline, in rounds
    TerminationPolicy policy = TerminationPolicy::LargestOnly;
    std::uint64_t rng_seed = 0;      // seeds all tie-breaking
    auto operator<=>(const ProtocolParams&) const = default;
};

/// A vote on one bid: Reject, or Accept carrying the [c_min, c_max] window
/// of consensus powers the voter is willing to join.
class Vote {
public:
    Vote() = default;  // a default vote is Reject
    static Vote reject() { return Vote{}; }
    static Vote accept(Power c_min, Power c_max) { return Vote{c_min, c_max}; }

    bool is_accept() const { return accept_; }
    Power c_min() const { require_accept(); return c_min_; }
    Power c_max() const { require_accept(); return c_max_; }

    auto operator<=>(const Vote&) const = default;

private:
    Vote(Power lo, Power hi) : accept_(true), c_min_(lo), c_max_(hi) {}
    void require_accept() const {
        if (!accept_) throw std::logic_error("threshold access on a Reject vote");
    }

    bool accept_ = false;
    Power c_min_ = 0;
    Power c_max_ = 0;
};

enum class VoteViolation {
    None,
    CMinBelowPMin,
    CMaxBelowCMin,
    CMaxAbovePMax,
};

enum class OptInViolation {
    None,
    RejectAfterAccept,
    CMinReduced,
    CMinBelowPMin,   // reject -> accept case only
    CMaxBelowCMin,
    CMaxAbovePMax,
};

/// An Accept is well-formed iff p_min <= c_min <= c_max <= p_max.
/// Reject is always ok.
VoteViolation validate_vote(const Vote& vote, Power p_min, Power p_max);

/// Opt-in revision rules, checked against the voting-phase vote for the
/// same bid. An accepted bid cannot be rejected and its c_min cannot be
/// reduced; a rejected bid may stay rejected or become a well-formed
/// Accept. In both accept branches c'_min <= c'_max is enforced.
OptInViolation validate_optin(const Vote& prior, const Vote& revised,
                              Power p_min, Power p_max);

const char* to_string(VoteViolation v);
const char* to_string(OptInViolation v);

enum class ErrorCode {
    EmptyRoster,
    SingleAgent,
    DuplicateAgent,
    ZeroPower,
    PMinExceedsPMax,
    ZeroRounds,
    WrongPhase,
    UnknownAgent,
    UnknownBid,
    AlreadyBid,
    AlreadyVoted,
    MissingBids,
    MissingVotes,
    InvalidThresholds,
    InvalidOptIn,
    NotResolved,
    NegotiationOver,
    SizeBelowTwo,
};

const char* to_string(ErrorCode code);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

/// A struck deal: the members leave the negotiation after this round.
struct DealRecord {
    std::uint32_t round_index = 0;
    Bid bid;
    std::vector<AgentId> members;    // in roster order
    Power power = 0;
    auto operator<=>(const DealRecord&) const = default;
};

enum class FinishReason {
    None,             // negotiation still running
    DealReached,      // LargestOnly struck its deal
    Deadline,         // max_rounds exhausted
    TooFewAgents,     // one or no agent left to negotiate
    PMinUnreachable,  // remaining roster power fell below p_min
};

const char* to_string(FinishReason reason);

/// Result of resolving one round.
struct RoundOutcome {
    std::vector<DealRecord> deals;          // member-disjoint
    std::vector<AgentId> continuing_agents; // roster order, disjoint from deals
    bool negotiation_over = false;
    FinishReason reason = FinishReason::None;
};

}  // namespace mopac

#endif  // MOPAC_TYPES_HPP
