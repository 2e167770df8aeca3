#include "mopac/mediator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mopac/consensus.hpp"
#include "mopac/resolution.hpp"
#include "mopac/rng.hpp"

namespace mopac {

namespace {

std::string derive_session_id(const SessionConfig& config) {
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ULL;
        }
    };
    mix(config.name);
    for (const auto& entry : config.roster) mix(entry.agent.value);
    std::ostringstream out;
    out << "s-" << std::hex << (hash ^ config.params.rng_seed);
    return out.str();
}

}  // namespace

MediatorServer::MediatorServer(SessionConfig config, MediatorOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      session_id_(derive_session_id(config_)) {}

MediatorServer::~MediatorServer() { stop(); }

void MediatorServer::start() {
    listener_ = std::make_unique<ListenSocket>(options_.host, options_.port);
    port_ = listener_->port();
    accept_thread_ = std::thread([this] { accept_loop(); });
    session_thread_ = std::thread([this] { session_loop(); });
}

void MediatorServer::stop() {
    bool was_stopping = stopping_.exchange(true);
    {
        // EOF wakes readers blocked in recv; the fds are closed only
        // after every thread is joined.
        std::lock_guard<std::mutex> lock(conns_mu_);
        for (auto& conn : conns_) conn->conn.shutdown_both();
    }
    queue_cv_.notify_all();
    if (!was_stopping) {
        if (accept_thread_.joinable()) accept_thread_.join();
        if (session_thread_.joinable()) session_thread_.join();
        {
            std::lock_guard<std::mutex> lock(readers_mu_);
            for (auto& reader : readers_)
                if (reader.joinable()) reader.join();
        }
        if (listener_) listener_->close();
    }
}

std::vector<DealRecord> MediatorServer::wait() {
    std::unique_lock<std::mutex> lock(done_mu_);
    done_cv_.wait(lock, [this] { return done_; });
    return deals_;
}

void MediatorServer::accept_loop() {
    while (!stopping_) {
        auto conn = listener_->accept(std::chrono::milliseconds(100));
        if (!conn) continue;
        auto shared = std::make_shared<Connection>(std::move(*conn));
        {
            std::lock_guard<std::mutex> lock(conns_mu_);
            conns_.push_back(shared);
        }
        std::lock_guard<std::mutex> lock(readers_mu_);
        readers_.emplace_back([this, shared] { reader_loop(shared); });
    }
}

void MediatorServer::reader_loop(ConnPtr conn) {
    while (!stopping_) {
        auto line = conn->conn.recv_line();
        if (!line) break;
        if (line->empty()) continue;
        Incoming incoming{conn, {}, false};
        try {
            incoming.message = Json::parse(*line);
        } catch (const std::exception&) {
            incoming.parse_error = true;
        }
        {
            std::lock_guard<std::mutex> lock(queue_mu_);
            queue_.push_back(std::move(incoming));
        }
        queue_cv_.notify_all();
    }
}

std::optional<MediatorServer::Incoming> MediatorServer::pop_message(
    std::optional<std::chrono::steady_clock::time_point> deadline) {
    std::unique_lock<std::mutex> lock(queue_mu_);
    auto ready = [this] { return !queue_.empty() || stopping_; };
    if (deadline) {
        if (!queue_cv_.wait_until(lock, *deadline, ready)) return std::nullopt;
    } else {
        queue_cv_.wait(lock, ready);
    }
    if (queue_.empty()) return std::nullopt;
    Incoming incoming = std::move(queue_.front());
    queue_.pop_front();
    return incoming;
}

void MediatorServer::send(const ConnPtr& conn, const Json& message) {
    std::lock_guard<std::mutex> lock(conn->write_mu);
    conn->conn.send_line(message.dump());
}

void MediatorServer::send_error(const ConnPtr& conn, const std::string& code,
                                const std::string& detail) {
    send(conn, Json{{"type", "error"},
                    {"session", session_id_},
                    {"code", code},
                    {"detail", detail}});
}

void MediatorServer::broadcast(const std::vector<RosterEntry>& roster,
                               const Json& message) {
    for (const auto& entry : roster)
        if (ConnPtr conn = connection_of(entry.agent)) send(conn, message);
}

bool MediatorServer::authenticate(const Incoming& incoming, AgentId& agent) {
    const Json& msg = incoming.message;
    if (!msg.contains("agent") || !msg.contains("token") ||
        !msg.contains("session")) {
        send_error(incoming.conn, "bad_message",
                   "agent, token and session are required");
        return false;
    }
    if (msg.at("session").get<std::string>() != session_id_) {
        send_error(incoming.conn, "unknown_session", "session id mismatch");
        return false;
    }
    agent = AgentId{msg.at("agent").get<std::string>()};
    auto token = config_.tokens.find(agent);
    if (token == config_.tokens.end() ||
        token->second != msg.at("token").get<std::string>()) {
        send_error(incoming.conn, "auth_failed", "bad agent token");
        return false;
    }
    std::lock_guard<std::mutex> lock(conns_mu_);
    auto it = registered_.find(agent);
    if (it == registered_.end() || it->second != incoming.conn) {
        send_error(incoming.conn, "auth_failed",
                   "agent is not registered on this connection");
        return false;
    }
    return true;
}

void MediatorServer::handle_register(const Incoming& incoming) {
    const Json& msg = incoming.message;
    if (msg.value("protocol_version", 0) != kProtocolVersion) {
        send_error(incoming.conn, "protocol_version_mismatch",
                   "this mediator speaks protocol_version 1");
        return;
    }
    if (!msg.contains("agent") || !msg.contains("token")) {
        send_error(incoming.conn, "bad_message", "agent and token are required");
        return;
    }
    AgentId agent{msg.at("agent").get<std::string>()};
    auto token = config_.tokens.find(agent);
    if (token == config_.tokens.end() ||
        token->second != msg.at("token").get<std::string>()) {
        send_error(incoming.conn, "auth_failed", "bad agent token");
        return;
    }
    {
        std::lock_guard<std::mutex> lock(conns_mu_);
        if (registered_.count(agent)) {
            send_error(incoming.conn, "duplicate_registration",
                       agent.value + " is already registered");
            return;
        }
        registered_[agent] = incoming.conn;
        incoming.conn->agent = agent;
    }
    send(incoming.conn, Json{{"type", "registered"},
                             {"protocol_version", kProtocolVersion},
                             {"session", session_id_},
                             {"agent", agent.value}});
}

void MediatorServer::session_loop() {
    try {
        run_session();
    } catch (const std::exception&) {
        // A torn-down listener or closed queue during stop() lands here;
        // the session simply ends without results.
    }
    {
        std::lock_guard<std::mutex> lock(done_mu_);
        done_ = true;
    }
    done_cv_.notify_all();
}

void MediatorServer::collect_bids(Negotiation& state,
                                  std::map<AgentId, Bid>& bids) {
    const auto deadline =
        std::chrono::steady_clock::now() + config_.phase_timeout;
    auto outstanding = [&] {
        return bids.size() < state.roster().size();
    };
    while (outstanding() && !stopping_) {
        auto incoming = pop_message(deadline);
        if (!incoming) break;  // deadline
        if (incoming->parse_error) {
            send_error(incoming->conn, "bad_message", "not a JSON record");
            continue;
        }
        const std::string type = incoming->message.value("type", "");
        if (type == "register") {
            handle_register(*incoming);
            continue;
        }
        AgentId agent;
        if (!authenticate(*incoming, agent)) continue;
        if (type != "bid") {
            send_error(incoming->conn, "wrong_phase",
                       "the session expects bids");
            continue;
        }
        if (!state.is_active(agent)) {
            send_error(incoming->conn, "not_active",
                       agent.value + " is not part of this round");
            continue;
        }
        if (bids.count(agent)) {
            send_error(incoming->conn, "already_bid",
                       agent.value + " already bid this round");
            continue;
        }
        if (!incoming->message.contains("bid")) {
            send_error(incoming->conn, "bad_message", "bid records carry `bid`");
            continue;
        }
        bids.emplace(agent, Bid{incoming->message.at("bid").get<std::string>()});
    }
}

void MediatorServer::collect_votes(Negotiation& state, bool optin,
                                   VoteMap& votes) {
    const auto deadline =
        std::chrono::steady_clock::now() + config_.phase_timeout;
    const std::size_t wanted =
        state.roster().size() * state.bid_table().size();
    const char* expected_type = optin ? "optin" : "vote";
    while (votes.size() < wanted && !stopping_) {
        auto incoming = pop_message(deadline);
        if (!incoming) break;
        if (incoming->parse_error) {
            send_error(incoming->conn, "bad_message", "not a JSON record");
            continue;
        }
        const std::string type = incoming->message.value("type", "");
        if (type == "register") {
            handle_register(*incoming);
            continue;
        }
        AgentId agent;
        if (!authenticate(*incoming, agent)) continue;
        if (type != expected_type) {
            send_error(incoming->conn, "wrong_phase",
                       std::string("the session expects ") + expected_type +
                           " records");
            continue;
        }
        if (!state.is_active(agent)) {
            send_error(incoming->conn, "not_active",
                       agent.value + " is not part of this round");
            continue;
        }
        if (!incoming->message.contains("bid") ||
            !incoming->message.contains("vote")) {
            send_error(incoming->conn, "bad_message",
                       "vote records carry `bid` and `vote`");
            continue;
        }
        Bid bid{incoming->message.at("bid").get<std::string>()};
        const auto& table = state.bid_table();
        if (std::find(table.begin(), table.end(), bid) == table.end()) {
            send_error(incoming->conn, "unknown_bid",
                       bid.value + " is not on the table");
            continue;
        }
        Vote vote = Vote::reject();
        try {
            vote = vote_from_json(incoming->message.at("vote"));
        } catch (const std::exception&) {
            send_error(incoming->conn, "bad_message", "malformed vote");
            continue;
        }
        if (votes.count({agent, bid})) {
            send_error(incoming->conn, "already_voted",
                       agent.value + " already voted on " + bid.value);
            continue;
        }
        if (optin) {
            const Vote* prior = state.voting_vote(agent, bid);
            auto violation = validate_optin(*prior, vote, state.params().p_min,
                                            state.p_max());
            if (violation != OptInViolation::None) {
                send_error(incoming->conn, "invalid_optin", to_string(violation));
                continue;
            }
        } else {
            auto violation =
                validate_vote(vote, state.params().p_min, state.p_max());
            if (violation != VoteViolation::None) {
                send_error(incoming->conn, "invalid_vote", to_string(violation));
                continue;
            }
        }
        votes.emplace(VoteKey{agent, bid}, vote);
    }
}

void MediatorServer::deliver_results(std::uint32_t round,
                                     const Negotiation& state,
                                     const std::vector<DealRecord>& round_deals) {
    std::map<AgentId, const DealRecord*> dealt;
    for (const auto& deal : round_deals)
        for (const auto& m : deal.members) dealt[m] = &deal;
    for (const auto& [agent, deal] : dealt) {
        if (ConnPtr conn = connection_of(agent))
            send(conn, Json{{"type", "result"},
                            {"session", session_id_},
                            {"round", round},
                            {"status", "deal"},
                            {"deal", deal_to_json(*deal)}});
    }
    if (state.finished()) return;
    for (const auto& entry : state.roster()) {
        if (ConnPtr conn = connection_of(entry.agent))
            send(conn, Json{{"type", "result"},
                            {"session", session_id_},
                            {"round", round},
                            {"status", "continue"}});
    }
}

MediatorServer::ConnPtr MediatorServer::connection_of(const AgentId& agent) {
    std::lock_guard<std::mutex> lock(conns_mu_);
    auto it = registered_.find(agent);
    return it == registered_.end() ? nullptr : it->second;
}

void MediatorServer::run_session() {
    // registration stage
    while (!stopping_) {
        {
            std::lock_guard<std::mutex> lock(conns_mu_);
            if (registered_.size() == config_.roster.size()) break;
        }
        auto incoming = pop_message(std::nullopt);
        if (!incoming) return;
        if (incoming->parse_error) {
            send_error(incoming->conn, "bad_message", "not a JSON record");
            continue;
        }
        if (incoming->message.value("type", "") == "register")
            handle_register(*incoming);
        else
            send_error(incoming->conn, "wrong_phase",
                       "the session has not started");
    }
    if (stopping_) return;

    Negotiation state(config_.roster, config_.params);
    DeterministicRng rng(config_.params.rng_seed);

    Json started;
    started["name"] = config_.name;
    started["roster"] = roster_to_json(state.roster());
    started["p_min"] = state.params().p_min;
    started["p_max"] = state.p_max();
    started["max_rounds"] = state.params().max_rounds;
    started["policy"] =
        state.params().policy == TerminationPolicy::LargestOnly ? "one" : "two";
    started["seed"] = state.params().rng_seed;
    started["rng"] = DeterministicRng::kAlgorithm;
    started["engine"] = "pruned";
    trace_.record(0, Phase::Bidding, TraceKind::NegotiationStarted, started);

    FinishReason abort_reason = FinishReason::None;
    while (!state.finished() && !stopping_) {
        const auto round = state.round_index();

        // bidding
        broadcast(state.roster(), Json{{"type", "bid_request"},
                       {"session", session_id_},
                       {"round", round},
                       {"p_min", state.params().p_min},
                       {"p_max", state.p_max()}});
        std::map<AgentId, Bid> bids;
        collect_bids(state, bids);
        if (stopping_) return;

        Json dropped = Json::array();
        for (const auto& entry : std::vector<RosterEntry>(state.roster()))
            if (!bids.count(entry.agent)) {
                state.drop_agent(entry.agent);
                dropped.push_back(entry.agent.value);
            }
        if (state.roster().size() < 2) {
            // Not enough agents left to ever form a consensus group.
            abort_reason = FinishReason::TooFewAgents;
            break;
        }
        for (const auto& entry : state.roster()) {
            state.submit_bid(entry.agent, bids.at(entry.agent));
            trace_.record(round, Phase::Bidding, TraceKind::BidSubmitted,
                          {{"agent", entry.agent.value},
                           {"bid", bids.at(entry.agent).value}});
        }
        auto bid_announcement = state.close_bidding();
        trace_.record(round, Phase::Bidding, TraceKind::BidAnnouncement,
                      {{"entries", bid_announcement_to_json(bid_announcement)},
                       {"dropped", dropped}});
        broadcast(state.roster(), Json{{"type", "bid_announcement"},
                       {"session", session_id_},
                       {"round", round},
                       {"p_max", state.p_max()},
                       {"entries", bid_announcement_to_json(bid_announcement)}});

        Json table = Json::array();
        for (const auto& bid : state.bid_table()) table.push_back(bid.value);

        // voting
        broadcast(state.roster(), Json{{"type", "vote_request"},
                       {"session", session_id_},
                       {"round", round},
                       {"bids", table}});
        VoteMap votes;
        collect_votes(state, /*optin=*/false, votes);
        if (stopping_) return;
        for (const auto& entry : state.roster()) {
            for (const auto& bid : state.bid_table()) {
                auto it = votes.find({entry.agent, bid});
                bool substituted = it == votes.end();
                // Silence means Reject on every bid the agent skipped.
                Vote vote = substituted ? Vote::reject() : it->second;
                state.submit_vote(entry.agent, bid, vote);
                Json payload{{"agent", entry.agent.value},
                             {"bid", bid.value},
                             {"vote", vote_to_json(vote)}};
                if (substituted) payload["substituted"] = true;
                trace_.record(round, Phase::Voting, TraceKind::VoteSubmitted,
                              payload);
            }
        }
        auto vote_announcement = state.close_voting();
        trace_.record(round, Phase::Voting, TraceKind::VoteAnnouncement,
                      {{"entries", vote_announcement_to_json(vote_announcement)}});
        broadcast(state.roster(), Json{{"type", "vote_announcement"},
                       {"session", session_id_},
                       {"round", round},
                       {"entries", vote_announcement_to_json(vote_announcement)}});

        // opt-in
        broadcast(state.roster(), Json{{"type", "optin_request"},
                       {"session", session_id_},
                       {"round", round},
                       {"bids", table}});
        VoteMap optins;
        collect_votes(state, /*optin=*/true, optins);
        if (stopping_) return;
        for (const auto& entry : state.roster()) {
            for (const auto& bid : state.bid_table()) {
                auto it = optins.find({entry.agent, bid});
                bool substituted = it == optins.end();
                // Silence carries the voting-phase vote forward, which is
                // always a legal opt-in transition.
                Vote vote = substituted ? *state.voting_vote(entry.agent, bid)
                                        : it->second;
                state.submit_optin(entry.agent, bid, vote);
                Json payload{{"agent", entry.agent.value},
                             {"bid", bid.value},
                             {"vote", vote_to_json(vote)}};
                if (substituted) payload["substituted"] = true;
                trace_.record(round, Phase::OptIn, TraceKind::OptInSubmitted,
                              payload);
            }
        }
        state.close_optin();

        // resolution
        auto round_data = state.resolved_round();
        auto groups = viable_groups_pruned(round_data);
        trace_.record(round, Phase::Resolved, TraceKind::ViableGroupsComputed,
                      {{"groups", viable_groups_to_json(groups)}});
        RoundContext ctx{state.roster(), round, state.params().max_rounds};
        auto outcome = resolve(state.params().policy, ctx, groups, rng);
        for (const auto& deal : outcome.deals)
            trace_.record(round, Phase::Resolved, TraceKind::DealStruck,
                          deal_to_json(deal));
        state.advance_round(outcome);
        deliver_results(round, state, outcome.deals);
        if (!state.finished()) {
            Json continuing = Json::array();
            for (const auto& entry : state.roster())
                continuing.push_back(entry.agent.value);
            trace_.record(round, Phase::Resolved, TraceKind::RoundContinued,
                          {{"continuing", continuing}, {"p_max", state.p_max()}});
        }
    }
    if (stopping_) return;

    std::set<AgentId> dealt;
    for (const auto& deal : state.deals())
        for (const auto& m : deal.members) dealt.insert(m);
    Json dealless = Json::array();
    for (const auto& entry : config_.roster)
        if (!dealt.count(entry.agent)) dealless.push_back(entry.agent.value);
    Json ended;
    ended["reason"] = to_string(abort_reason != FinishReason::None
                                    ? abort_reason
                                    : state.finish_reason());
    ended["rounds"] = state.round_index();
    ended["deal_count"] = state.deals().size();
    ended["dealless"] = dealless;
    trace_.record(state.round_index(), Phase::Resolved,
                  TraceKind::NegotiationEnded, ended);

    // Final verdict for everyone who never reached a deal, including
    // agents dropped along the way.
    for (const auto& entry : config_.roster) {
        if (dealt.count(entry.agent)) continue;
        if (ConnPtr conn = connection_of(entry.agent))
            send(conn, Json{{"type", "result"},
                            {"session", session_id_},
                            {"round", state.round_index()},
                            {"status", "no_deal"}});
    }
    deals_ = state.deals();
}

}  // namespace mopac
