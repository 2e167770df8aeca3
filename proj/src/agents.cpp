#include "mopac/agents.hpp"

#include <algorithm>
#include <cmath>

namespace mopac {

std::map<Bid, Vote> own_votes(const VoteAnnouncement& announcement,
                              const AgentId& self) {
    for (const auto& entry : announcement) {
        if (entry.agent != self) continue;
        std::map<Bid, Vote> out;
        for (const auto& [bid, vote] : entry.votes) out.emplace(bid, vote);
        return out;
    }
    throw StrategyError("agent " + self.value + " missing from the vote announcement");
}

// --- scripted ----------------------------------------------------------

const RoundScript& ScriptedStrategy::round_for(std::uint32_t round_index) const {
    if (round_index == 0 || round_index > rounds_.size())
        throw StrategyError("script exhausted: no actions for round " +
                            std::to_string(round_index));
    return rounds_[round_index - 1];
}

Bid ScriptedStrategy::on_bid_request(const BidRequest& request) {
    const auto& round = round_for(request.view.round_index);
    if (!round.bid)
        throw StrategyError("script exhausted: no bid for round " +
                            std::to_string(request.view.round_index));
    return *round.bid;
}

std::vector<std::pair<Bid, Vote>> ScriptedStrategy::on_vote_request(
    const VoteRequest& request) {
    const auto& round = round_for(request.view.round_index);
    std::vector<std::pair<Bid, Vote>> out;
    for (const auto& bid : request.bid_table) {
        auto it = round.votes.find(bid);
        if (it == round.votes.end())
            throw StrategyError("script exhausted: no vote on " + bid.value);
        out.emplace_back(bid, it->second);
    }
    return out;
}

std::vector<std::pair<Bid, Vote>> ScriptedStrategy::on_optin_request(
    const OptInRequest& request) {
    const auto& round = round_for(request.view.round_index);
    std::vector<std::pair<Bid, Vote>> out;
    for (const auto& bid : request.bid_table) {
        auto it = round.optins.find(bid);
        if (it == round.optins.end())
            throw StrategyError("script exhausted: no opt-in vote on " + bid.value);
        out.emplace_back(bid, it->second);
    }
    return out;
}

// --- utility threshold --------------------------------------------------

ThresholdWindow window_for_rule(const WindowRule& rule, Power p_min, Power p_max) {
    ThresholdWindow w{p_min, p_max};
    if (std::holds_alternative<MajorityFloor>(rule)) {
        w.c_min = std::max(p_min, p_max / 2 + 1);
    } else if (const auto* fixed = std::get_if<FixedWindow>(&rule)) {
        auto scaled = [&](double f) {
            return static_cast<Power>(std::llround(f * static_cast<double>(p_max)));
        };
        w.c_min = std::clamp(scaled(fixed->lo), p_min, p_max);
        w.c_max = std::clamp(scaled(fixed->hi), w.c_min, p_max);
    }
    return w;
}

double UtilityThresholdStrategy::utility_of(const Bid& bid) const {
    auto it = profile_.utilities.find(bid);
    return it == profile_.utilities.end() ? 0.0 : it->second;
}

Bid UtilityThresholdStrategy::on_bid_request(const BidRequest&) {
    if (bid_space_.empty())
        throw StrategyError("utility strategy has an empty bid space");
    const Bid* best = &bid_space_.front();
    for (const auto& bid : bid_space_)
        if (utility_of(bid) > utility_of(*best)) best = &bid;
    return *best;
}

std::vector<std::pair<Bid, Vote>> UtilityThresholdStrategy::on_vote_request(
    const VoteRequest& request) {
    last_powers_.clear();
    for (const auto& entry : request.announcement)
        last_powers_[entry.agent] = entry.power;

    const auto window = window_for_rule(profile_.window_rule,
                                        request.view.p_min, request.view.p_max);
    std::vector<std::pair<Bid, Vote>> out;
    for (const auto& bid : request.bid_table) {
        if (utility_of(bid) >= profile_.reservation)
            out.emplace_back(bid, Vote::accept(window.c_min, window.c_max));
        else
            out.emplace_back(bid, Vote::reject());
    }
    return out;
}

std::vector<std::pair<Bid, Vote>> UtilityThresholdStrategy::on_optin_request(
    const OptInRequest& request) {
    const auto window = window_for_rule(profile_.window_rule,
                                        request.view.p_min, request.view.p_max);
    const auto mine = own_votes(request.announcement, request.view.self);

    // Power already pledged to each bid by accepting voters.
    std::map<Bid, Power> acceptor_power;
    for (const auto& entry : request.announcement) {
        auto pw = last_powers_.find(entry.agent);
        if (pw == last_powers_.end()) continue;
        for (const auto& [bid, vote] : entry.votes)
            if (vote.is_accept()) acceptor_power[bid] += pw->second;
    }

    std::vector<std::pair<Bid, Vote>> out;
    for (const auto& bid : request.bid_table) {
        const Vote& prior = mine.at(bid);
        if (prior.is_accept()) {
            out.emplace_back(bid, prior);
        } else if (acceptor_power[bid] >= window.c_min) {
            out.emplace_back(bid, Vote::accept(window.c_min, window.c_max));
        } else {
            out.emplace_back(bid, Vote::reject());
        }
    }
    return out;
}

// --- random --------------------------------------------------------------

Vote RandomStrategy::random_accept(Power lo, Power p_max) {
    Power c_min = lo + rng_.below(p_max - lo + 1);
    Power c_max = c_min + rng_.below(p_max - c_min + 1);
    return Vote::accept(c_min, c_max);
}

Bid RandomStrategy::on_bid_request(const BidRequest&) {
    if (bid_space_.empty())
        throw StrategyError("random strategy has an empty bid space");
    return bid_space_[rng_.below(bid_space_.size())];
}

std::vector<std::pair<Bid, Vote>> RandomStrategy::on_vote_request(
    const VoteRequest& request) {
    std::vector<std::pair<Bid, Vote>> out;
    for (const auto& bid : request.bid_table) {
        if (rng_.below(2) == 0)
            out.emplace_back(bid, Vote::reject());
        else
            out.emplace_back(bid, random_accept(request.view.p_min,
                                                request.view.p_max));
    }
    return out;
}

std::vector<std::pair<Bid, Vote>> RandomStrategy::on_optin_request(
    const OptInRequest& request) {
    const auto mine = own_votes(request.announcement, request.view.self);
    std::vector<std::pair<Bid, Vote>> out;
    for (const auto& bid : request.bid_table) {
        const Vote& prior = mine.at(bid);
        if (prior.is_accept()) {
            // c'_min may only grow, so sample from [prior c_min, p_max].
            out.emplace_back(bid,
                             random_accept(prior.c_min(), request.view.p_max));
        } else if (rng_.below(2) == 0) {
            out.emplace_back(bid, Vote::reject());
        } else {
            out.emplace_back(bid, random_accept(request.view.p_min,
                                                request.view.p_max));
        }
    }
    return out;
}

}  // namespace mopac
