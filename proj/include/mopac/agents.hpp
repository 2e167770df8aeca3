#ifndef MOPAC_AGENTS_HPP
#define MOPAC_AGENTS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mopac/consensus.hpp"
#include "mopac/negotiation.hpp"
#include "mopac/rng.hpp"
#include "mopac/types.hpp"

namespace mopac {

/// What a strategy is allowed to know: its own identity and the public
/// facts of the round. Everything else reaches strategies only through
/// the phase announcements.
struct AgentView {
    AgentId self;
    Power power = 0;
    std::uint32_t round_index = 1;
    Power p_min = 0;
    Power p_max = 0;
};

struct BidRequest {
    AgentView view;
};

struct VoteRequest {
    AgentView view;
    BidAnnouncement announcement;
    std::vector<Bid> bid_table;  // distinct bids, table order
};

struct OptInRequest {
    AgentView view;
    VoteAnnouncement announcement;
    std::vector<Bid> bid_table;
};

/// Raised by a strategy that cannot produce an action; the harness
/// reports it as a strategy violation and aborts the run.
class StrategyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Strategy {
public:
    virtual ~Strategy() = default;

    virtual Bid on_bid_request(const BidRequest& request) = 0;
    /// One (bid, vote) pair per table bid, in table order.
    virtual std::vector<std::pair<Bid, Vote>> on_vote_request(
        const VoteRequest& request) = 0;
    virtual std::vector<std::pair<Bid, Vote>> on_optin_request(
        const OptInRequest& request) = 0;
};

/// One round of a scripted agent's play.
struct RoundScript {
    std::optional<Bid> bid;
    std::map<Bid, Vote> votes;
    std::map<Bid, Vote> optins;
};

/// Replays a fixed action sequence; any request the script does not cover
/// raises StrategyError.
class ScriptedStrategy : public Strategy {
public:
    explicit ScriptedStrategy(std::vector<RoundScript> rounds)
        : rounds_(std::move(rounds)) {}

    Bid on_bid_request(const BidRequest& request) override;
    std::vector<std::pair<Bid, Vote>> on_vote_request(
        const VoteRequest& request) override;
    std::vector<std::pair<Bid, Vote>> on_optin_request(
        const OptInRequest& request) override;

private:
    const RoundScript& round_for(std::uint32_t round_index) const;
    std::vector<RoundScript> rounds_;
};

struct FullRange {};
struct FixedWindow {
    double lo = 0.0;  // fractions of p_max
    double hi = 1.0;
};
struct MajorityFloor {};
using WindowRule = std::variant<FullRange, FixedWindow, MajorityFloor>;

/// The accept window a rule yields for the current round, clamped into
/// [p_min, p_max].
ThresholdWindow window_for_rule(const WindowRule& rule, Power p_min, Power p_max);

struct PreferenceProfile {
    std::map<Bid, double> utilities;  // in [0,1]; unknown bids score 0
    double reservation = 0.5;
    WindowRule window_rule = FullRange{};
};

/// Bids its highest-utility bid and accepts bids scoring at least the
/// reservation, with windows from the profile's rule. At opt-in it keeps
/// its accepts and additionally flips a rejected bid to accept when the
/// announced acceptor power already reaches its own window floor.
class UtilityThresholdStrategy : public Strategy {
public:
    UtilityThresholdStrategy(PreferenceProfile profile, std::vector<Bid> bid_space)
        : profile_(std::move(profile)), bid_space_(std::move(bid_space)) {}

    Bid on_bid_request(const BidRequest& request) override;
    std::vector<std::pair<Bid, Vote>> on_vote_request(
        const VoteRequest& request) override;
    std::vector<std::pair<Bid, Vote>> on_optin_request(
        const OptInRequest& request) override;

private:
    double utility_of(const Bid& bid) const;

    PreferenceProfile profile_;
    std::vector<Bid> bid_space_;
    std::map<AgentId, Power> last_powers_;  // from the round's bid announcement
};

/// Uniformly random legal actions. Samples inside the valid threshold
/// bounds, so everything it emits passes the vote and opt-in validators
/// by construction.
class RandomStrategy : public Strategy {
public:
    RandomStrategy(std::uint64_t seed, std::vector<Bid> bid_space)
        : rng_(seed), bid_space_(std::move(bid_space)) {}

    Bid on_bid_request(const BidRequest& request) override;
    std::vector<std::pair<Bid, Vote>> on_vote_request(
        const VoteRequest& request) override;
    std::vector<std::pair<Bid, Vote>> on_optin_request(
        const OptInRequest& request) override;

private:
    Vote random_accept(Power lo, Power p_max);

    DeterministicRng rng_;
    std::vector<Bid> bid_space_;
};

/// The agent's own voting-phase votes, extracted from the announcement.
std::map<Bid, Vote> own_votes(const VoteAnnouncement& announcement,
                              const AgentId& self);

}  // namespace mopac

#endif  // MOPAC_AGENTS_HPP
