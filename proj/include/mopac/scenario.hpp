#ifndef MOPAC_SCENARIO_HPP
#define MOPAC_SCENARIO_HPP

#include <chrono>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mopac/agents.hpp"
#include "mopac/types.hpp"

namespace mopac {

enum class StrategyKind { Scripted, Utility, Random };

const char* to_string(StrategyKind kind);

struct AgentSpec {
    AgentId id;
    Power power = 1;
    StrategyKind kind = StrategyKind::Scripted;
    std::vector<RoundScript> script;     // scripted
    PreferenceProfile profile;           // utility
    std::uint64_t strategy_seed = 0;     // random
    bool strategy_seed_set = false;
};

struct Scenario {
    std::string name = "unnamed";
    ProtocolParams params;
    std::vector<AgentSpec> agents;
    std::vector<Bid> bid_space;  // required by utility/random strategies
};

/// Parse or validation failure when loading a scenario or session file.
/// `line` is 0 when the failure is not tied to a single line.
class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Parse, Validation };

    ScenarioError(Kind kind, int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          kind_(kind),
          line_(line) {}

    Kind kind() const { return kind_; }
    int line() const { return line_; }

private:
    Kind kind_;
    int line_;
};

/// Scenario file grammar (line oriented, UTF-8):
///   - `#` starts a comment; blank lines are ignored.
///   - top section: `name`, `p_min`, `max_rounds`, `policy` (one|two),
///     `seed`, `bids` (comma-separated tokens).
///   - one `[agent <id>]` section per participant with `power`,
///     `strategy` (scripted|utility|random) and the strategy's keys:
///       scripted: `round<N>.bid`, `round<N>.vote.<bid>`,
///                 `round<N>.optin.<bid>`, values `reject` or
///                 `accept <c_min> <c_max>`;
///       utility:  `utility.<bid>`, `reservation`,
///                 `window` (full | majority | fixed <lo> <hi>);
///       random:   `seed`.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

struct SessionConfig {
    std::string name = "unnamed";
    ProtocolParams params;
    std::vector<RosterEntry> roster;
    std::map<AgentId, std::string> tokens;
    std::chrono::milliseconds phase_timeout{5000};
};

/// Session files share the scenario grammar; agent sections carry
/// `power` and `token`, the top section adds `phase_timeout_ms`.
SessionConfig load_session(const std::string& text);
SessionConfig load_session_file(const std::string& path);

}  // namespace mopac

#endif  // MOPAC_SCENARIO_HPP
