#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "fixtures.hpp"
#include "mopac/scenario.hpp"

using namespace mopac;
using namespace mopac::testing;

namespace {

const std::string kRepoDir = MOPAC_REPO_DIR;

ScenarioError::Kind kind_of(const std::string& text) {
    try {
        (void)load_scenario(text);
    } catch (const ScenarioError& error) {
        return error.kind();
    }
    FAIL("expected a ScenarioError");
    throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("the s3 scripted scenario parses") {
    auto scenario = load_scenario(s3_scenario_text("one"));
    CHECK_EQ(scenario.name, "s3");
    CHECK_EQ(scenario.params.p_min, 2);
    CHECK_EQ(scenario.params.max_rounds, 3);
    CHECK_EQ(scenario.params.policy, TerminationPolicy::LargestOnly);
    CHECK_EQ(scenario.params.rng_seed, 7);
    REQUIRE_EQ(scenario.agents.size(), 3);
    CHECK_EQ(scenario.agents[0].id, agent("A1"));
    CHECK_EQ(scenario.agents[0].power, 2);
    CHECK_EQ(scenario.agents[0].kind, StrategyKind::Scripted);
    REQUIRE_EQ(scenario.agents[0].script.size(), 1);
    CHECK_EQ(scenario.agents[0].script[0].bid, bid("b1"));
    CHECK_EQ(scenario.agents[0].script[0].votes.at(bid("b2")), Vote::accept(2, 2));
    CHECK_EQ(scenario.bid_space, std::vector<Bid>{bid("b1"), bid("b2")});
}

TEST_CASE("comments and blank lines are ignored") {
    auto scenario = load_scenario(
        "# a comment\n"
        "p_min = 1   # trailing comment\n"
        "\n"
        "bids = x\n"
        "[agent a]\n"
        "strategy = random\n"
        "power = 1\n"
        "\n"
        "[agent b]\n"
        "strategy = random\n"
        "power = 2\n");
    CHECK_EQ(scenario.params.p_min, 1);
    CHECK_EQ(scenario.agents[1].power, 2);
}

TEST_CASE("parse errors carry the offending line") {
    try {
        (void)load_scenario("p_min = 1\nwhat is this\n");
        FAIL("expected a ScenarioError");
    } catch (const ScenarioError& error) {
        CHECK_EQ(error.kind(), ScenarioError::Kind::Parse);
        CHECK_EQ(error.line(), 2);
    }
}

TEST_CASE("unknown strategy kinds are parse errors") {
    CHECK_EQ(kind_of("bids = x\n"
                     "[agent a]\n"
                     "strategy = clever\n"
                     "[agent b]\n"
                     "strategy = random\n"),
             ScenarioError::Kind::Parse);
}

TEST_CASE("validation failures") {
    // p_min beyond the total power
    CHECK_EQ(kind_of("p_min = 5\nbids = x\n"
                     "[agent a]\nstrategy = random\npower = 1\n"
                     "[agent b]\nstrategy = random\npower = 1\n"),
             ScenarioError::Kind::Validation);
    // single agent
    CHECK_EQ(kind_of("bids = x\n[agent a]\nstrategy = random\npower = 1\n"),
             ScenarioError::Kind::Validation);
    // zero power
    CHECK_EQ(kind_of("bids = x\n"
                     "[agent a]\nstrategy = random\npower = 0\n"
                     "[agent b]\nstrategy = random\npower = 1\n"),
             ScenarioError::Kind::Validation);
    // duplicate ids
    CHECK_EQ(kind_of("bids = x\n"
                     "[agent a]\nstrategy = random\npower = 1\n"
                     "[agent a]\nstrategy = random\npower = 1\n"),
             ScenarioError::Kind::Validation);
    // utility agent scoring a bid outside the bid space
    CHECK_EQ(kind_of("bids = x\n"
                     "[agent a]\nstrategy = utility\npower = 1\nutility.y = 0.5\n"
                     "[agent b]\nstrategy = random\npower = 1\n"),
             ScenarioError::Kind::Validation);
    // random agent without a bid space
    CHECK_EQ(kind_of("[agent a]\nstrategy = random\npower = 1\n"
                     "[agent b]\nstrategy = random\npower = 1\n"),
             ScenarioError::Kind::Validation);
}

TEST_CASE("random agents get a stable default seed") {
    auto text =
        "bids = x\n"
        "[agent a]\nstrategy = random\npower = 1\n"
        "[agent b]\nstrategy = random\npower = 1\nseed = 5\n";
    auto first = load_scenario(text);
    auto second = load_scenario(text);
    CHECK_EQ(first.agents[0].strategy_seed, second.agents[0].strategy_seed);
    CHECK_EQ(first.agents[1].strategy_seed, 5);
    CHECK_NE(first.agents[0].strategy_seed, first.agents[1].strategy_seed);
}

TEST_CASE("shipped presets load") {
    for (const auto* name :
         {"meeting.scenario", "coalition.scenario", "flatmates.scenario",
          "s3.scenario"}) {
        auto scenario = load_scenario_file(kRepoDir + "/scenarios/" + name);
        CHECK_GE(scenario.agents.size(), 2);
    }
    auto meeting = load_scenario_file(kRepoDir + "/scenarios/meeting.scenario");
    CHECK_EQ(meeting.agents.size(), 5);
    CHECK_EQ(meeting.params.policy, TerminationPolicy::LargestOnly);
    for (const auto& a : meeting.agents) CHECK_EQ(a.power, 1);

    auto flatmates =
        load_scenario_file(kRepoDir + "/scenarios/flatmates.scenario");
    CHECK_EQ(flatmates.agents.size(), 6);
    CHECK_EQ(flatmates.params.policy, TerminationPolicy::RepeatedExtraction);
}

TEST_CASE("session configs parse tokens and timeouts") {
    auto config = load_session(
        "name = demo\n"
        "p_min = 2\n"
        "max_rounds = 1\n"
        "phase_timeout_ms = 250\n"
        "[agent A1]\npower = 2\ntoken = t1\n"
        "[agent A2]\npower = 1\ntoken = t2\n");
    CHECK_EQ(config.phase_timeout.count(), 250);
    CHECK_EQ(config.tokens.at(agent("A1")), "t1");
    CHECK_EQ(config.roster[1].power, 1);

    CHECK_THROWS_AS((void)load_session("[agent A1]\npower = 1\n"
                                       "[agent A2]\npower = 1\ntoken = t\n"),
                    ScenarioError);
}
