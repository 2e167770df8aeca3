// Shared fixtures and independent oracles. The oracles translate the
// definitions directly (raw loops over bitmasks) and never call into the
// engine they are used to check.
#ifndef MOPAC_TESTS_FIXTURES_HPP
#define MOPAC_TESTS_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mopac/negotiation.hpp"
#include "mopac/scenario.hpp"
#include "mopac/types.hpp"

namespace mopac::testing {

inline AgentId agent(const std::string& name) { return AgentId{name}; }
inline Bid bid(const std::string& name) { return Bid{name}; }

// Scenario S3: roster (A1,2),(A2,1),(A3,1), p_min = 2, bids b1 (from A1
// and A3) and b2 (from A2). Opt-in votes:
//   b1: A1 accept(2,4), A2 accept(3,4), A3 reject
//   b2: A1 accept(2,2), A2 accept(2,4), A3 accept(2,4)
// Expected viable groups (hand enumeration of all 4 subsets x 2 bids):
//   {A1,A2}@b1 power 3, {A2,A3}@b2 power 2.
inline ResolvedRound s3_round() {
    ResolvedRound round;
    round.roster = {{agent("A1"), 2}, {agent("A2"), 1}, {agent("A3"), 1}};
    round.bid_table = {bid("b1"), bid("b2")};
    round.p_min = 2;
    round.round_index = 1;
    round.optin_votes = {
        {{agent("A1"), bid("b1")}, Vote::accept(2, 4)},
        {{agent("A2"), bid("b1")}, Vote::accept(3, 4)},
        {{agent("A3"), bid("b1")}, Vote::reject()},
        {{agent("A1"), bid("b2")}, Vote::accept(2, 2)},
        {{agent("A2"), bid("b2")}, Vote::accept(2, 4)},
        {{agent("A3"), bid("b2")}, Vote::accept(2, 4)},
    };
    return round;
}

inline std::string s3_scenario_text(const std::string& policy) {
    return "name = s3\n"
           "p_min = 2\n"
           "max_rounds = 3\n"
           "policy = " + policy + "\n"
           "seed = 7\n"
           "bids = b1, b2\n"
           "\n"
           "[agent A1]\n"
           "power = 2\n"
           "strategy = scripted\n"
           "round1.bid = b1\n"
           "round1.vote.b1 = accept 2 4\n"
           "round1.vote.b2 = accept 2 2\n"
           "round1.optin.b1 = accept 2 4\n"
           "round1.optin.b2 = accept 2 2\n"
           "\n"
           "[agent A2]\n"
           "power = 1\n"
           "strategy = scripted\n"
           "round1.bid = b2\n"
           "round1.vote.b1 = accept 3 4\n"
           "round1.vote.b2 = accept 2 4\n"
           "round1.optin.b1 = accept 3 4\n"
           "round1.optin.b2 = accept 2 4\n"
           "\n"
           "[agent A3]\n"
           "power = 1\n"
           "strategy = scripted\n"
           "round1.bid = b1\n"
           "round1.vote.b1 = reject\n"
           "round1.vote.b2 = accept 2 4\n"
           "round1.optin.b1 = reject\n"
           "round1.optin.b2 = accept 2 4\n";
}

// Four agents, two disjoint viable groups of powers 3 and 2:
//   b1: A1 accept(3,3), A2 accept(2,3), others reject
//   b2: A3 accept(2,2), A4 accept(2,2), others reject
inline ResolvedRound multideal_round() {
    ResolvedRound round;
    round.roster = {{agent("A1"), 2}, {agent("A2"), 1},
                    {agent("A3"), 1}, {agent("A4"), 1}};
    round.bid_table = {bid("b1"), bid("b2")};
    round.p_min = 2;
    round.round_index = 1;
    round.optin_votes = {
        {{agent("A1"), bid("b1")}, Vote::accept(3, 3)},
        {{agent("A2"), bid("b1")}, Vote::accept(2, 3)},
        {{agent("A3"), bid("b1")}, Vote::reject()},
        {{agent("A4"), bid("b1")}, Vote::reject()},
        {{agent("A1"), bid("b2")}, Vote::reject()},
        {{agent("A2"), bid("b2")}, Vote::reject()},
        {{agent("A3"), bid("b2")}, Vote::accept(2, 2)},
        {{agent("A4"), bid("b2")}, Vote::accept(2, 2)},
    };
    return round;
}

// A random resolved round with legal windows: powers in 1..4, p_min in
// [1, p_max], every accept window inside [p_min, p_max].
inline ResolvedRound random_round(std::mt19937_64& rng,
                                  std::size_t max_agents = 8,
                                  std::size_t max_bids = 6) {
    ResolvedRound round;
    const std::size_t n = 2 + rng() % (max_agents - 1);
    Power total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Power power = 1 + rng() % 4;
        round.roster.push_back({agent("A" + std::to_string(i + 1)), power});
        total += power;
    }
    round.p_min = 1 + rng() % total;
    const std::size_t bids = 1 + rng() % max_bids;
    for (std::size_t b = 0; b < bids; ++b)
        round.bid_table.push_back(bid("b" + std::to_string(b + 1)));
    for (const auto& entry : round.roster) {
        for (const auto& b : round.bid_table) {
            if (rng() % 2 == 0) {
                round.optin_votes.emplace(VoteKey{entry.agent, b}, Vote::reject());
            } else {
                Power c_min = round.p_min + rng() % (total - round.p_min + 1);
                Power c_max = c_min + rng() % (total - c_min + 1);
                round.optin_votes.emplace(VoteKey{entry.agent, b},
                                          Vote::accept(c_min, c_max));
            }
        }
    }
    return round;
}

// Random-strategy scenario for end-to-end fuzzing.
inline Scenario random_scenario(std::mt19937_64& rng,
                                std::size_t max_agents = 8,
                                std::uint32_t max_rounds = 5) {
    Scenario scenario;
    scenario.name = "random";
    const std::size_t bids = 2 + rng() % 3;
    for (std::size_t b = 0; b < bids; ++b)
        scenario.bid_space.push_back(bid("b" + std::to_string(b + 1)));
    const std::size_t n = 2 + rng() % (max_agents - 1);
    Power total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        AgentSpec spec;
        spec.id = agent("A" + std::to_string(i + 1));
        spec.power = 1 + rng() % 3;
        spec.kind = StrategyKind::Random;
        spec.strategy_seed = rng();
        spec.strategy_seed_set = true;
        total += spec.power;
        scenario.agents.push_back(std::move(spec));
    }
    scenario.params.p_min = 1 + rng() % total;
    scenario.params.max_rounds = 1 + rng() % max_rounds;
    scenario.params.policy = rng() % 2 == 0
                                 ? TerminationPolicy::LargestOnly
                                 : TerminationPolicy::RepeatedExtraction;
    scenario.params.rng_seed = rng();
    return scenario;
}

// --- independent oracles -------------------------------------------------

// Count of agent groups: all power-set members of size > 1.
inline std::uint64_t oracle_candidate_count(std::size_t n) {
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        std::size_t size = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1ull << i)) ++size;
        if (size > 1) ++count;
    }
    return count;
}

struct OracleGroup {
    Bid bid;
    std::vector<AgentId> members;
    Power power = 0;
    auto operator<=>(const OracleGroup&) const = default;
};

// Direct reading of the viability definition: a set of agents that all
// accepted the bid, whose summed power every member's window contains.
inline bool oracle_is_viable(const ResolvedRound& round, const Bid& b,
                             std::uint64_t mask) {
    Power power = 0;
    for (std::size_t i = 0; i < round.roster.size(); ++i)
        if (mask & (1ull << i)) power += round.roster[i].power;
    for (std::size_t i = 0; i < round.roster.size(); ++i) {
        if (!(mask & (1ull << i))) continue;
        auto it = round.optin_votes.find({round.roster[i].agent, b});
        if (it == round.optin_votes.end() || !it->second.is_accept())
            return false;
        if (power < it->second.c_min() || power > it->second.c_max())
            return false;
    }
    return true;
}

// All viable groups of a round by raw bitmask sweep, as a sorted set.
inline std::vector<OracleGroup> oracle_viable_groups(const ResolvedRound& round) {
    std::vector<OracleGroup> out;
    const std::size_t n = round.roster.size();
    for (const auto& b : round.bid_table) {
        for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
            std::size_t size = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1ull << i)) ++size;
            if (size < 2) continue;
            if (!oracle_is_viable(round, b, mask)) continue;
            OracleGroup group;
            group.bid = b;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1ull << i)) {
                    group.members.push_back(round.roster[i].agent);
                    group.power += round.roster[i].power;
                }
            out.push_back(std::move(group));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace mopac::testing

#endif  // MOPAC_TESTS_FIXTURES_HPP
