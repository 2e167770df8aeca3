#ifndef MOPAC_ANALYZE_HPP
#define MOPAC_ANALYZE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mopac/consensus.hpp"
#include "mopac/runner.hpp"

namespace mopac {

struct RoundAnalysis {
    std::uint32_t round_index = 1;
    std::vector<ViableGroup> recomputed;
    /// The groups the trace itself recorded for the round, when present.
    std::optional<std::vector<ViableGroup>> recorded;

    bool matches_recorded() const {
        return !recorded || *recorded == recomputed;
    }
};

/// Rebuilds each round's roster and opt-in votes from a trace (or from a
/// votes-only file holding the same record kinds) and recomputes the
/// viable groups with the requested engine.
std::vector<RoundAnalysis> analyze_trace(const std::string& jsonl,
                                         EngineKind engine);

}  // namespace mopac

#endif  // MOPAC_ANALYZE_HPP
