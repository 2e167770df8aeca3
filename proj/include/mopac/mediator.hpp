#ifndef MOPAC_MEDIATOR_HPP
#define MOPAC_MEDIATOR_HPP

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mopac/line_socket.hpp"
#include "mopac/negotiation.hpp"
#include "mopac/scenario.hpp"
#include "mopac/trace.hpp"

namespace mopac {

/// Wire protocol version spoken in register/registered.
inline constexpr int kProtocolVersion = 1;

struct MediatorOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks a free port
};

/// Runs one negotiation session for remote agents over line-delimited
/// JSON records. Connection handling is concurrent, but every message is
/// funneled through one ordered queue and applied by a single session
/// thread, so the protocol state machine never runs concurrently.
///
/// Agents that miss a phase deadline get defaults: a silent bidder is
/// dropped from the negotiation, a silent voter rejects every bid it did
/// not vote on, and a silent opt-in carries the voting-phase vote
/// forward. Buffered actions are applied in roster order at phase close,
/// so the outcome does not depend on arrival order within a phase.
class MediatorServer {
public:
    explicit MediatorServer(SessionConfig config, MediatorOptions options = {});
    ~MediatorServer();

    MediatorServer(const MediatorServer&) = delete;
    MediatorServer& operator=(const MediatorServer&) = delete;

    void start();
    /// Blocks until the session completes (or stop() is called); returns
    /// the struck deals.
    std::vector<DealRecord> wait();
    void stop();

    std::uint16_t port() const { return port_; }
    const std::string& session_id() const { return session_id_; }
    /// Stable once wait() returned.
    const TraceRecorder& trace() const { return trace_; }

private:
    struct Connection {
        LineConnection conn;
        std::mutex write_mu;
        std::optional<AgentId> agent;  // set by a successful register
        explicit Connection(LineConnection c) : conn(std::move(c)) {}
    };
    using ConnPtr = std::shared_ptr<Connection>;

    struct Incoming {
        ConnPtr conn;
        Json message;
        bool parse_error = false;
    };

    void accept_loop();
    void reader_loop(ConnPtr conn);
    void session_loop();

    std::optional<Incoming> pop_message(
        std::optional<std::chrono::steady_clock::time_point> deadline);
    void send(const ConnPtr& conn, const Json& message);
    void send_error(const ConnPtr& conn, const std::string& code,
                    const std::string& detail);
    void broadcast(const std::vector<RosterEntry>& roster, const Json& message);

    /// True when the client message carries this session's id, a valid
    /// token, and comes over the connection the agent registered on.
    bool authenticate(const Incoming& incoming, AgentId& agent);
    void handle_register(const Incoming& incoming);

    void run_session();
    void collect_bids(Negotiation& state,
                      std::map<AgentId, Bid>& bids);
    void collect_votes(Negotiation& state, bool optin, VoteMap& votes);
    /// Per-round delivery: deal members get their deal, continuing agents
    /// a `continue`. The closing `no_deal` records go out once at session
    /// end to everyone left without a deal.
    void deliver_results(std::uint32_t round, const Negotiation& state,
                         const std::vector<DealRecord>& round_deals);
    ConnPtr connection_of(const AgentId& agent);

    SessionConfig config_;
    MediatorOptions options_;
    std::string session_id_;
    std::uint16_t port_ = 0;

    std::unique_ptr<ListenSocket> listener_;
    std::thread accept_thread_;
    std::thread session_thread_;
    std::vector<std::thread> readers_;
    std::mutex readers_mu_;

    std::mutex queue_mu_;
    std::condition_variable queue_cv_;
    std::deque<Incoming> queue_;
    std::atomic<bool> stopping_{false};

    std::mutex conns_mu_;
    std::vector<ConnPtr> conns_;
    std::map<AgentId, ConnPtr> registered_;

    TraceRecorder trace_;
    std::vector<DealRecord> deals_;
    std::mutex done_mu_;
    std::condition_variable done_cv_;
    bool done_ = false;
};

}  // namespace mopac

#endif  // MOPAC_MEDIATOR_HPP
