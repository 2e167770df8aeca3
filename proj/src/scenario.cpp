#include "mopac/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mopac {

const char* to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Scripted: return "scripted";
        case StrategyKind::Utility: return "utility";
        case StrategyKind::Random: return "random";
    }
    return "?";
}

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string header;  // empty for the top section
    int line = 0;
    std::vector<Entry> entries;
};

[[noreturn]] void parse_fail(int line, const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::Parse, line, message);
}

[[noreturn]] void validation_fail(int line, const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::Validation, line, message);
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<Section> parse_sections(const std::string& text) {
    std::vector<Section> sections;
    sections.push_back({});
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(line_no, "unterminated section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), line_no, {}});
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            parse_fail(line_no, "expected `key = value`: " + line);
        Entry entry{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (entry.key.empty()) parse_fail(line_no, "empty key");
        sections.back().entries.push_back(std::move(entry));
    }
    return sections;
}

std::uint64_t parse_u64(const Entry& e) {
    try {
        std::size_t used = 0;
        auto value = std::stoull(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("");
        return value;
    } catch (const std::exception&) {
        parse_fail(e.line, e.key + " expects a non-negative integer, got `" +
                               e.value + "`");
    }
}

double parse_double(const Entry& e, const std::string& text) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return value;
    } catch (const std::exception&) {
        parse_fail(e.line, e.key + " expects a number, got `" + text + "`");
    }
}

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Vote parse_vote(const Entry& e) {
    auto parts = split_list(e.value, ' ');
    if (parts.size() == 1 && parts[0] == "reject") return Vote::reject();
    if (parts.size() == 3 && parts[0] == "accept") {
        Entry lo{e.key, parts[1], e.line};
        Entry hi{e.key, parts[2], e.line};
        return Vote::accept(parse_u64(lo), parse_u64(hi));
    }
    parse_fail(e.line, "votes are `reject` or `accept <c_min> <c_max>`, got `" +
                           e.value + "`");
}

TerminationPolicy parse_policy(const Entry& e) {
    if (e.value == "one") return TerminationPolicy::LargestOnly;
    if (e.value == "two") return TerminationPolicy::RepeatedExtraction;
    parse_fail(e.line, "policy is `one` or `two`, got `" + e.value + "`");
}

void parse_scripted_key(AgentSpec& spec, const Entry& e) {
    // round<N>.bid | round<N>.vote.<bid> | round<N>.optin.<bid>
    auto dot = e.key.find('.');
    if (dot == std::string::npos || e.key.rfind("round", 0) != 0)
        parse_fail(e.line, "unknown scripted-agent key `" + e.key + "`");
    Entry round_no{e.key, e.key.substr(5, dot - 5), e.line};
    auto round = static_cast<std::size_t>(parse_u64(round_no));
    if (round == 0) parse_fail(e.line, "rounds are numbered from 1");
    if (spec.script.size() < round) spec.script.resize(round);
    RoundScript& script = spec.script[round - 1];

    std::string rest = e.key.substr(dot + 1);
    if (rest == "bid") {
        script.bid = Bid{e.value};
    } else if (rest.rfind("vote.", 0) == 0) {
        script.votes[Bid{rest.substr(5)}] = parse_vote(e);
    } else if (rest.rfind("optin.", 0) == 0) {
        script.optins[Bid{rest.substr(6)}] = parse_vote(e);
    } else {
        parse_fail(e.line, "unknown scripted-agent key `" + e.key + "`");
    }
}

void parse_utility_key(AgentSpec& spec, const Entry& e) {
    if (e.key.rfind("utility.", 0) == 0) {
        spec.profile.utilities[Bid{e.key.substr(8)}] = parse_double(e, e.value);
    } else if (e.key == "reservation") {
        spec.profile.reservation = parse_double(e, e.value);
    } else if (e.key == "window") {
        auto parts = split_list(e.value, ' ');
        if (parts.size() == 1 && parts[0] == "full") {
            spec.profile.window_rule = FullRange{};
        } else if (parts.size() == 1 && parts[0] == "majority") {
            spec.profile.window_rule = MajorityFloor{};
        } else if (parts.size() == 3 && parts[0] == "fixed") {
            spec.profile.window_rule =
                FixedWindow{parse_double(e, parts[1]), parse_double(e, parts[2])};
        } else {
            parse_fail(e.line, "window is `full`, `majority` or `fixed <lo> <hi>`");
        }
    } else {
        parse_fail(e.line, "unknown utility-agent key `" + e.key + "`");
    }
}

AgentSpec parse_agent(const Section& section) {
    auto name = trim(section.header.substr(5));
    if (name.empty()) parse_fail(section.line, "agent sections need an id");
    AgentSpec spec;
    spec.id = AgentId{name};

    // strategy first: it decides which other keys are legal
    bool kind_set = false;
    for (const auto& e : section.entries) {
        if (e.key != "strategy") continue;
        if (e.value == "scripted") spec.kind = StrategyKind::Scripted;
        else if (e.value == "utility") spec.kind = StrategyKind::Utility;
        else if (e.value == "random") spec.kind = StrategyKind::Random;
        else parse_fail(e.line, "unknown strategy kind `" + e.value + "`");
        kind_set = true;
    }
    if (!kind_set)
        parse_fail(section.line, "agent " + name + " has no strategy");

    for (const auto& e : section.entries) {
        if (e.key == "strategy") continue;
        if (e.key == "power") {
            spec.power = parse_u64(e);
            continue;
        }
        switch (spec.kind) {
            case StrategyKind::Scripted:
                parse_scripted_key(spec, e);
                break;
            case StrategyKind::Utility:
                parse_utility_key(spec, e);
                break;
            case StrategyKind::Random:
                if (e.key == "seed") {
                    spec.strategy_seed = parse_u64(e);
                    spec.strategy_seed_set = true;
                } else {
                    parse_fail(e.line, "unknown random-agent key `" + e.key + "`");
                }
                break;
        }
    }
    return spec;
}

// Stable per-agent default seed for random strategies. Independent of the
// run seed so reseeding a run only moves tie-breaks.
std::uint64_t default_strategy_seed(const AgentId& id) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : id.value) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

void validate_scenario(const Scenario& scenario) {
    if (scenario.agents.size() < 2)
        validation_fail(0, "a scenario needs at least two agents");
    std::set<AgentId> ids;
    Power total = 0;
    for (const auto& agent : scenario.agents) {
        if (!ids.insert(agent.id).second)
            validation_fail(0, "duplicate agent " + agent.id.value);
        if (agent.power == 0)
            validation_fail(0, "agent " + agent.id.value + " has power 0");
        total += agent.power;
    }
    if (scenario.params.p_min == 0)
        validation_fail(0, "p_min must be >= 1");
    if (scenario.params.p_min > total) {
        std::ostringstream msg;
        msg << "p_min " << scenario.params.p_min
            << " exceeds the total power " << total;
        validation_fail(0, msg.str());
    }
    if (scenario.params.max_rounds == 0)
        validation_fail(0, "max_rounds must be >= 1");

    std::set<Bid> known(scenario.bid_space.begin(), scenario.bid_space.end());
    for (const auto& agent : scenario.agents) {
        if (agent.kind != StrategyKind::Scripted && scenario.bid_space.empty())
            validation_fail(0, "agent " + agent.id.value + " (" +
                                   to_string(agent.kind) +
                                   ") needs a top-level `bids` list");
        if (scenario.bid_space.empty()) continue;
        if (agent.kind == StrategyKind::Utility) {
            for (const auto& [bid, utility] : agent.profile.utilities) {
                if (!known.count(bid))
                    validation_fail(0, "agent " + agent.id.value +
                                           " scores unknown bid " + bid.value);
                if (utility < 0.0 || utility > 1.0)
                    validation_fail(0, "agent " + agent.id.value +
                                           " has a utility outside [0,1]");
            }
        }
        if (agent.kind == StrategyKind::Scripted) {
            for (const auto& round : agent.script) {
                if (round.bid && !known.count(*round.bid))
                    validation_fail(0, "agent " + agent.id.value +
                                           " bids unknown bid " + round.bid->value);
                for (const auto& [bid, vote] : round.votes)
                    if (!known.count(bid))
                        validation_fail(0, "agent " + agent.id.value +
                                               " votes on unknown bid " + bid.value);
                for (const auto& [bid, vote] : round.optins)
                    if (!known.count(bid))
                        validation_fail(0, "agent " + agent.id.value +
                                               " opts in on unknown bid " + bid.value);
            }
        }
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScenarioError(ScenarioError::Kind::Parse, 0,
                            "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

Scenario load_scenario(const std::string& text) {
    Scenario scenario;
    for (const auto& section : parse_sections(text)) {
        if (section.header.empty()) {
            for (const auto& e : section.entries) {
                if (e.key == "name") scenario.name = e.value;
                else if (e.key == "p_min") scenario.params.p_min = parse_u64(e);
                else if (e.key == "max_rounds")
                    scenario.params.max_rounds =
                        static_cast<std::uint32_t>(parse_u64(e));
                else if (e.key == "policy") scenario.params.policy = parse_policy(e);
                else if (e.key == "seed") scenario.params.rng_seed = parse_u64(e);
                else if (e.key == "bids")
                    for (const auto& token : split_list(e.value, ','))
                        scenario.bid_space.push_back(Bid{token});
                else
                    parse_fail(e.line, "unknown key `" + e.key + "`");
            }
        } else if (section.header.rfind("agent", 0) == 0) {
            AgentSpec spec = parse_agent(section);
            if (!spec.strategy_seed_set)
                spec.strategy_seed = default_strategy_seed(spec.id);
            scenario.agents.push_back(std::move(spec));
        } else {
            parse_fail(section.line, "unknown section [" + section.header + "]");
        }
    }
    validate_scenario(scenario);
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    return load_scenario(read_file(path));
}

SessionConfig load_session(const std::string& text) {
    SessionConfig config;
    for (const auto& section : parse_sections(text)) {
        if (section.header.empty()) {
            for (const auto& e : section.entries) {
                if (e.key == "name") config.name = e.value;
                else if (e.key == "p_min") config.params.p_min = parse_u64(e);
                else if (e.key == "max_rounds")
                    config.params.max_rounds =
                        static_cast<std::uint32_t>(parse_u64(e));
                else if (e.key == "policy") config.params.policy = parse_policy(e);
                else if (e.key == "seed") config.params.rng_seed = parse_u64(e);
                else if (e.key == "phase_timeout_ms")
                    config.phase_timeout = std::chrono::milliseconds(parse_u64(e));
                else
                    parse_fail(e.line, "unknown key `" + e.key + "`");
            }
        } else if (section.header.rfind("agent", 0) == 0) {
            auto name = trim(section.header.substr(5));
            if (name.empty()) parse_fail(section.line, "agent sections need an id");
            RosterEntry entry{AgentId{name}, 1};
            std::string token;
            for (const auto& e : section.entries) {
                if (e.key == "power") entry.power = parse_u64(e);
                else if (e.key == "token") token = e.value;
                else parse_fail(e.line, "unknown key `" + e.key + "`");
            }
            if (token.empty())
                validation_fail(section.line,
                                "agent " + name + " needs an auth token");
            config.roster.push_back(entry);
            config.tokens[entry.agent] = token;
        } else {
            parse_fail(section.line, "unknown section [" + section.header + "]");
        }
    }
    if (config.roster.size() < 2)
        validation_fail(0, "a session needs at least two agents");
    std::set<AgentId> ids;
    Power total = 0;
    for (const auto& entry : config.roster) {
        if (!ids.insert(entry.agent).second)
            validation_fail(0, "duplicate agent " + entry.agent.value);
        if (entry.power == 0)
            validation_fail(0, "agent " + entry.agent.value + " has power 0");
        total += entry.power;
    }
    if (config.params.p_min == 0 || config.params.p_min > total)
        validation_fail(0, "p_min must be in [1, total power]");
    if (config.params.max_rounds == 0)
        validation_fail(0, "max_rounds must be >= 1");
    return config;
}

SessionConfig load_session_file(const std::string& path) {
    return load_session(read_file(path));
}

}  // namespace mopac
