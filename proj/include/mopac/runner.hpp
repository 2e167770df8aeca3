#ifndef MOPAC_RUNNER_HPP
#define MOPAC_RUNNER_HPP

#include <memory>
#include <optional>
#include <string>

#include "mopac/agents.hpp"
#include "mopac/negotiation.hpp"
#include "mopac/scenario.hpp"
#include "mopac/trace.hpp"

namespace mopac {

enum class EngineKind { Naive, Pruned };

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<TerminationPolicy> policy_override;
    EngineKind engine = EngineKind::Pruned;
};

/// A strategy acted outside the protocol. Simulated strategies are under
/// our control, so this aborts the run instead of being tolerated.
struct StrategyViolationInfo {
    AgentId agent;
    std::string detail;
};

struct RunResult {
    Negotiation state;  // final, or as left behind by an aborted run
    TraceRecorder trace;
    std::optional<StrategyViolationInfo> violation;

    bool ok() const { return !violation.has_value(); }
    const std::vector<DealRecord>& deals() const { return state.deals(); }
};

std::unique_ptr<Strategy> make_strategy(const AgentSpec& spec,
                                        const std::vector<Bid>& bid_space);

/// Drives the scenario through the protocol until termination, invoking
/// each agent's strategy per phase and recording the full trace.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace mopac

#endif  // MOPAC_RUNNER_HPP
