#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <memory>

#include "fixtures.hpp"
#include "mopac/agents.hpp"

using namespace mopac;
using namespace mopac::testing;

namespace {

AgentView view(const std::string& self, Power power, Power p_min, Power p_max,
               std::uint32_t round = 1) {
    return {agent(self), power, round, p_min, p_max};
}

BidAnnouncement s3_bid_announcement() {
    return {{agent("A1"), bid("b1"), 2},
            {agent("A2"), bid("b2"), 1},
            {agent("A3"), bid("b1"), 1}};
}

std::vector<Bid> s3_table() { return {bid("b1"), bid("b2")}; }

}  // namespace

TEST_CASE("scripted strategy replays its actions and fails when exhausted") {
    RoundScript round1;
    round1.bid = bid("b1");
    round1.votes[bid("b1")] = Vote::accept(2, 4);
    round1.votes[bid("b2")] = Vote::reject();
    // no opt-in entry for b2 on purpose
    round1.optins[bid("b1")] = Vote::accept(2, 4);
    ScriptedStrategy strategy({round1});

    CHECK_EQ(strategy.on_bid_request({view("A1", 2, 2, 4)}), bid("b1"));
    auto votes = strategy.on_vote_request(
        {view("A1", 2, 2, 4), s3_bid_announcement(), s3_table()});
    REQUIRE_EQ(votes.size(), 2);
    CHECK_EQ(votes[0].second, Vote::accept(2, 4));
    CHECK_EQ(votes[1].second, Vote::reject());

    CHECK_THROWS_AS(strategy.on_optin_request(
                        {view("A1", 2, 2, 4), {}, s3_table()}),
                    StrategyError);
    // round 2 was never scripted
    CHECK_THROWS_AS(strategy.on_bid_request({view("A1", 2, 2, 4, 2)}),
                    StrategyError);
}

TEST_CASE("window rules") {
    CHECK_EQ(window_for_rule(FullRange{}, 2, 4), ThresholdWindow{2, 4});
    CHECK_EQ(window_for_rule(MajorityFloor{}, 2, 4), ThresholdWindow{3, 4});
    CHECK_EQ(window_for_rule(MajorityFloor{}, 2, 5), ThresholdWindow{3, 5});
    // the floor never dips below p_min
    CHECK_EQ(window_for_rule(MajorityFloor{}, 4, 4), ThresholdWindow{4, 4});
    CHECK_EQ(window_for_rule(FixedWindow{0.5, 0.75}, 1, 8), ThresholdWindow{4, 6});
    // fractions clamp into the legal range
    CHECK_EQ(window_for_rule(FixedWindow{0.0, 2.0}, 2, 4), ThresholdWindow{2, 4});
}

TEST_CASE("utility strategy bids its best bid and votes by reservation") {
    PreferenceProfile profile;
    profile.utilities[bid("b1")] = 0.9;
    profile.utilities[bid("b2")] = 0.3;
    profile.reservation = 0.5;
    UtilityThresholdStrategy strategy(profile, {bid("b1"), bid("b2")});

    CHECK_EQ(strategy.on_bid_request({view("A1", 2, 2, 4)}), bid("b1"));
    auto votes = strategy.on_vote_request(
        {view("A1", 2, 2, 4), s3_bid_announcement(), s3_table()});
    REQUIRE_EQ(votes.size(), 2);
    CHECK_EQ(votes[0].first, bid("b1"));
    CHECK(votes[0].second.is_accept());
    CHECK_EQ(votes[0].second.c_min(), 2);
    CHECK_EQ(votes[0].second.c_max(), 4);
    CHECK_FALSE(votes[1].second.is_accept());
}

TEST_CASE("utility strategy flips a rejected bid when acceptors reach its floor") {
    PreferenceProfile profile;
    profile.utilities[bid("b1")] = 0.9;
    profile.utilities[bid("b2")] = 0.3;  // rejected at voting
    profile.reservation = 0.5;
    UtilityThresholdStrategy strategy(profile, {bid("b1"), bid("b2")});

    auto vote_req = VoteRequest{view("A3", 1, 2, 4), s3_bid_announcement(),
                                s3_table()};
    auto votes = strategy.on_vote_request(vote_req);
    CHECK_FALSE(votes[1].second.is_accept());

    // hand-built announcement: A1 (power 2) and A2 (power 1) accept b2,
    // so the pledged power 3 reaches A3's FullRange floor of 2
    VoteAnnouncement announcement = {
        {agent("A1"), {{bid("b1"), Vote::accept(2, 4)},
                       {bid("b2"), Vote::accept(2, 4)}}},
        {agent("A2"), {{bid("b1"), Vote::reject()},
                       {bid("b2"), Vote::accept(2, 4)}}},
        {agent("A3"), {{bid("b1"), votes[0].second},
                       {bid("b2"), votes[1].second}}},
    };
    auto optins = strategy.on_optin_request(
        {view("A3", 1, 2, 4), announcement, s3_table()});
    REQUIRE_EQ(optins.size(), 2);
    CHECK(optins[0].second.is_accept());   // kept
    CHECK(optins[1].second.is_accept());   // flipped by the announcement
    CHECK_EQ(optins[1].second.c_min(), 2);

    // with a majority floor (3 of 4) the same announcement only pledges
    // power 3, still enough; power 2 would not be
    PreferenceProfile high = profile;
    high.window_rule = MajorityFloor{};
    UtilityThresholdStrategy picky(high, {bid("b1"), bid("b2")});
    (void)picky.on_vote_request(vote_req);
    VoteAnnouncement thin = announcement;
    thin[0].votes[1].second = Vote::reject();  // only A2 (power 1) accepts b2
    auto picky_optins = picky.on_optin_request(
        {view("A3", 1, 2, 4), thin, s3_table()});
    CHECK_FALSE(picky_optins[1].second.is_accept());
}

TEST_CASE("random strategy emits only validator-approved actions") {
    const Power p_min = 2, p_max = 7;
    std::vector<Bid> space{bid("x"), bid("y"), bid("z")};
    RandomStrategy strategy(1234, space);

    int flips = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        auto chosen = strategy.on_bid_request({view("R", 1, p_min, p_max)});
        CHECK(std::find(space.begin(), space.end(), chosen) != space.end());

        auto votes = strategy.on_vote_request(
            {view("R", 1, p_min, p_max),
             {{agent("R"), chosen, 1}},
             space});
        VoteAnnouncement announcement{{agent("R"), {}}};
        for (const auto& [b, vote] : votes) {
            REQUIRE_EQ(validate_vote(vote, p_min, p_max), VoteViolation::None);
            announcement[0].votes.emplace_back(b, vote);
        }
        auto optins = strategy.on_optin_request(
            {view("R", 1, p_min, p_max), announcement, space});
        for (std::size_t i = 0; i < optins.size(); ++i) {
            const Vote& prior = votes[i].second;
            const Vote& revised = optins[i].second;
            REQUIRE_EQ(validate_optin(prior, revised, p_min, p_max),
                       OptInViolation::None);
            if (!prior.is_accept() && revised.is_accept()) ++flips;
            if (prior.is_accept()) CHECK_GE(revised.c_min(), prior.c_min());
        }
    }
    CHECK_GT(flips, 0);  // the reject->accept branch is exercised
}

TEST_CASE("same seed, same actions") {
    std::vector<Bid> space{bid("x"), bid("y"), bid("z")};
    RandomStrategy a(42, space);
    RandomStrategy b(42, space);
    for (int trial = 0; trial < 100; ++trial) {
        auto request = BidRequest{view("R", 1, 2, 7)};
        CHECK_EQ(a.on_bid_request(request), b.on_bid_request(request));
        VoteRequest votes{view("R", 1, 2, 7), {{agent("R"), bid("x"), 1}}, space};
        CHECK_EQ(a.on_vote_request(votes), b.on_vote_request(votes));
    }
}
