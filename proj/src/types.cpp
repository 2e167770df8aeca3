#include "mopac/types.hpp"

namespace mopac {

VoteViolation validate_vote(const Vote& vote, Power p_min, Power p_max) {
    if (!vote.is_accept()) return VoteViolation::None;
    if (vote.c_min() < p_min) return VoteViolation::CMinBelowPMin;
    if (vote.c_max() < vote.c_min()) return VoteViolation::CMaxBelowCMin;
    if (vote.c_max() > p_max) return VoteViolation::CMaxAbovePMax;
    return VoteViolation::None;
}

OptInViolation validate_optin(const Vote& prior, const Vote& revised,
                              Power p_min, Power p_max) {
    if (prior.is_accept()) {
        if (!revised.is_accept()) return OptInViolation::RejectAfterAccept;
        if (revised.c_min() < prior.c_min()) return OptInViolation::CMinReduced;
        if (revised.c_max() < revised.c_min()) return OptInViolation::CMaxBelowCMin;
        if (revised.c_max() > p_max) return OptInViolation::CMaxAbovePMax;
        return OptInViolation::None;
    }
    // Prior Reject: staying rejected is fine, flipping requires a
    // well-formed Accept.
    if (!revised.is_accept()) return OptInViolation::None;
    switch (validate_vote(revised, p_min, p_max)) {
        case VoteViolation::CMinBelowPMin: return OptInViolation::CMinBelowPMin;
        case VoteViolation::CMaxBelowCMin: return OptInViolation::CMaxBelowCMin;
        case VoteViolation::CMaxAbovePMax: return OptInViolation::CMaxAbovePMax;
        case VoteViolation::None: break;
    }
    return OptInViolation::None;
}

const char* to_string(VoteViolation v) {
    switch (v) {
        case VoteViolation::None: return "ok";
        case VoteViolation::CMinBelowPMin: return "c_min below p_min";
        case VoteViolation::CMaxBelowCMin: return "c_max below c_min";
        case VoteViolation::CMaxAbovePMax: return "c_max above p_max";
    }
    return "?";
}

const char* to_string(OptInViolation v) {
    switch (v) {
        case OptInViolation::None: return "ok";
        case OptInViolation::RejectAfterAccept: return "reject after accept";
        case OptInViolation::CMinReduced: return "c_min reduced";
        case OptInViolation::CMinBelowPMin: return "c_min below p_min";
        case OptInViolation::CMaxBelowCMin: return "c_max below c_min";
        case OptInViolation::CMaxAbovePMax: return "c_max above p_max";
    }
    return "?";
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyRoster: return "empty_roster";
        case ErrorCode::SingleAgent: return "single_agent";
        case ErrorCode::DuplicateAgent: return "duplicate_agent";
        case ErrorCode::ZeroPower: return "zero_power";
        case ErrorCode::PMinExceedsPMax: return "p_min_exceeds_p_max";
        case ErrorCode::ZeroRounds: return "zero_rounds";
        case ErrorCode::WrongPhase: return "wrong_phase";
        case ErrorCode::UnknownAgent: return "unknown_agent";
        case ErrorCode::UnknownBid: return "unknown_bid";
        case ErrorCode::AlreadyBid: return "already_bid";
        case ErrorCode::AlreadyVoted: return "already_voted";
        case ErrorCode::MissingBids: return "missing_bids";
        case ErrorCode::MissingVotes: return "missing_votes";
        case ErrorCode::InvalidThresholds: return "invalid_thresholds";
        case ErrorCode::InvalidOptIn: return "invalid_optin";
        case ErrorCode::NotResolved: return "not_resolved";
        case ErrorCode::NegotiationOver: return "negotiation_over";
        case ErrorCode::SizeBelowTwo: return "size_below_two";
    }
    return "?";
}

const char* to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::None: return "none";
        case FinishReason::DealReached: return "deal_reached";
        case FinishReason::Deadline: return "deadline";
        case FinishReason::TooFewAgents: return "too_few_agents";
        case FinishReason::PMinUnreachable: return "p_min_unreachable";
    }
    return "?";
}

}  // namespace mopac
