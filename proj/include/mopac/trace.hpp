#ifndef MOPAC_TRACE_HPP
#define MOPAC_TRACE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mopac/consensus.hpp"
#include "mopac/negotiation.hpp"
#include "mopac/types.hpp"

namespace mopac {

using Json = nlohmann::ordered_json;

/// Event kinds of the negotiation trace. One JSON record per line; the
/// field order is fixed so traces can be compared byte for byte.
enum class TraceKind {
    NegotiationStarted,
    BidSubmitted,
    BidAnnouncement,
    VoteSubmitted,
    VoteAnnouncement,
    OptInSubmitted,
    ViableGroupsComputed,
    DealStruck,
    RoundContinued,
    NegotiationEnded,
};

const char* to_string(TraceKind kind);
TraceKind trace_kind_from_string(const std::string& name);

struct TraceEvent {
    std::uint64_t seq = 0;
    std::uint32_t round = 0;
    Phase phase = Phase::Bidding;
    TraceKind kind = TraceKind::NegotiationStarted;
    Json payload;  // flattened into the record after "kind"

    Json to_json() const;
    static TraceEvent from_json(const Json& record);
};

class TraceRecorder {
public:
    void record(std::uint32_t round, Phase phase, TraceKind kind, Json payload);

    const std::vector<TraceEvent>& events() const { return events_; }
    std::string to_jsonl() const;
    void write(std::ostream& out) const;

private:
    std::uint64_t next_seq_ = 1;
    std::vector<TraceEvent> events_;
};

// Shared encoding of the protocol values. The wire protocol of the
// mediator reuses these shapes, so there is a single schema to document
// and test.
Json vote_to_json(const Vote& vote);
Vote vote_from_json(const Json& j);
Json roster_to_json(const std::vector<RosterEntry>& roster);
std::vector<RosterEntry> roster_from_json(const Json& j);
Json bid_announcement_to_json(const BidAnnouncement& announcement);
BidAnnouncement bid_announcement_from_json(const Json& j);
Json vote_announcement_to_json(const VoteAnnouncement& announcement);
VoteAnnouncement vote_announcement_from_json(const Json& j);
Json viable_groups_to_json(const std::vector<ViableGroup>& groups);
std::vector<ViableGroup> viable_groups_from_json(const Json& j);
Json deal_to_json(const DealRecord& deal);
DealRecord deal_from_json(const Json& j);

}  // namespace mopac

#endif  // MOPAC_TRACE_HPP
