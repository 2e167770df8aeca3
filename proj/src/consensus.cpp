#include "mopac/consensus.hpp"

#include <algorithm>

namespace mopac {

Power group_power(const std::vector<AgentId>& members,
                  const std::vector<RosterEntry>& roster) {
    Power sum = 0;
    for (const auto& member : members) {
        auto it = std::find_if(roster.begin(), roster.end(),
                               [&](const RosterEntry& e) { return e.agent == member; });
        if (it == roster.end())
            throw ProtocolError(ErrorCode::UnknownAgent,
                                "agent " + member.value + " is not on the roster");
        sum += it->power;
    }
    return sum;
}

bool is_consensus_group(const std::vector<AgentId>& members, const Bid& bid,
                        const VoteMap& optin_votes) {
    if (members.size() < 2)
        throw ProtocolError(ErrorCode::SizeBelowTwo,
                            "consensus groups have at least two members");
    return std::all_of(members.begin(), members.end(), [&](const AgentId& m) {
        auto it = optin_votes.find({m, bid});
        return it != optin_votes.end() && it->second.is_accept();
    });
}

bool is_viable(const ConsensusGroup& group, const VoteMap& optin_votes) {
    return std::all_of(
        group.members.begin(), group.members.end(), [&](const AgentId& m) {
            const Vote& vote = optin_votes.at({m, group.bid});
            return vote.c_min() <= group.power && group.power <= vote.c_max();
        });
}

std::vector<std::vector<std::size_t>> enumerate_candidate_groups(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    if (n < 2) return out;
    for (std::size_t k = 2; k <= n; ++k) {
        std::vector<std::size_t> combo(k);
        for (std::size_t i = 0; i < k; ++i) combo[i] = i;
        while (true) {
            out.push_back(combo);
            // next k-combination in lexicographic order
            std::size_t i = k;
            while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++combo[i - 1];
            for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
        }
    }
    return out;
}

namespace {

ViableGroup make_group(const ResolvedRound& round, const Bid& bid,
                       const std::vector<std::size_t>& indices, Power power) {
    ViableGroup vg;
    vg.group.bid = bid;
    vg.group.power = power;
    vg.group.members.reserve(indices.size());
    vg.windows.reserve(indices.size());
    for (std::size_t i : indices) {
        const AgentId& agent = round.roster[i].agent;
        const Vote& vote = round.optin_votes.at({agent, bid});
        vg.group.members.push_back(agent);
        vg.windows.emplace_back(agent,
                                ThresholdWindow{vote.c_min(), vote.c_max()});
    }
    return vg;
}

}  // namespace

std::vector<ViableGroup> viable_groups_naive(const ResolvedRound& round) {
    std::vector<ViableGroup> out;
    const auto candidates = enumerate_candidate_groups(round.roster.size());
    for (const auto& bid : round.bid_table) {
        for (const auto& indices : candidates) {
            std::vector<AgentId> members;
            members.reserve(indices.size());
            for (std::size_t i : indices) members.push_back(round.roster[i].agent);
            if (!is_consensus_group(members, bid, round.optin_votes)) continue;
            ConsensusGroup group{bid, members,
                                 group_power(members, round.roster)};
            if (!is_viable(group, round.optin_votes)) continue;
            out.push_back(make_group(round, bid, indices, group.power));
        }
    }
    return out;
}

std::vector<ViableGroup> viable_groups_pruned(const ResolvedRound& round) {
    std::vector<ViableGroup> out;
    const std::size_t n = round.roster.size();
    for (const auto& bid : round.bid_table) {
        // Only acceptors can appear in a consensus group for this bid;
        // every subset of the acceptors is one.
        std::vector<std::size_t> acceptors;
        for (std::size_t i = 0; i < n; ++i) {
            auto it = round.optin_votes.find({round.roster[i].agent, bid});
            if (it != round.optin_votes.end() && it->second.is_accept())
                acceptors.push_back(i);
        }
        if (acceptors.size() < 2) continue;

        // Level-wise growth over acceptor indices keeps the size-ascending,
        // lexicographic order of the naive enumeration.
        std::vector<std::vector<std::size_t>> level;
        for (std::size_t a = 0; a < acceptors.size(); ++a)
            for (std::size_t b = a + 1; b < acceptors.size(); ++b)
                level.push_back({a, b});
        while (!level.empty()) {
            for (const auto& positions : level) {
                std::vector<std::size_t> indices;
                Power power = 0;
                indices.reserve(positions.size());
                for (std::size_t pos : positions) {
                    indices.push_back(acceptors[pos]);
                    power += round.roster[acceptors[pos]].power;
                }
                bool viable = true;
                for (std::size_t i : indices) {
                    const Vote& vote =
                        round.optin_votes.at({round.roster[i].agent, bid});
                    if (power < vote.c_min() || power > vote.c_max()) {
                        viable = false;
                        break;
                    }
                }
                if (viable) out.push_back(make_group(round, bid, indices, power));
            }
            std::vector<std::vector<std::size_t>> next;
            for (const auto& positions : level) {
                for (std::size_t pos = positions.back() + 1;
                     pos < acceptors.size(); ++pos) {
                    auto grown = positions;
                    grown.push_back(pos);
                    next.push_back(std::move(grown));
                }
            }
            level = std::move(next);
        }
    }
    // Per bid the levels come out size-ascending and lexicographic, which
    // is exactly the naive enumeration order restricted to acceptors.
    return out;
}

}  // namespace mopac
