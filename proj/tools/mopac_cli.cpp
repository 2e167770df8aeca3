#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mopac/analyze.hpp"
#include "mopac/mediator.hpp"
#include "mopac/runner.hpp"
#include "mopac/scenario.hpp"
#include "mopac/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;  // protocol / strategy violation
constexpr int kExitUsage = 2;      // usage, parse or validation errors

mopac::EngineKind engine_from(const std::string& name) {
    return name == "naive" ? mopac::EngineKind::Naive
                           : mopac::EngineKind::Pruned;
}

std::string read_file_or_die(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        std::exit(kExitUsage);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void print_deals(const std::vector<mopac::DealRecord>& deals) {
    if (deals.empty()) {
        std::cout << "no deals\n";
        return;
    }
    for (const auto& deal : deals) {
        std::cout << "deal: round " << deal.round_index << "  bid "
                  << deal.bid.value << "  power " << deal.power << "  members";
        for (const auto& m : deal.members) std::cout << ' ' << m.value;
        std::cout << '\n';
    }
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& policy, const std::string& engine,
            const std::string& trace_path, bool quiet) {
    mopac::Scenario scenario;
    try {
        scenario = mopac::load_scenario_file(path);
    } catch (const mopac::ScenarioError& error) {
        std::cerr << "error: " << path << ": " << error.what() << "\n";
        return kExitUsage;
    }

    mopac::RunOptions options;
    options.engine = engine_from(engine);
    if (seed) {
        options.seed_override = *seed;
    } else if (const char* env = std::getenv("MOPAC_SEED")) {
        try {
            options.seed_override = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "error: MOPAC_SEED is not an integer\n";
            return kExitUsage;
        }
    }
    if (policy == "one") options.policy_override = mopac::TerminationPolicy::LargestOnly;
    if (policy == "two") options.policy_override = mopac::TerminationPolicy::RepeatedExtraction;

    auto result = mopac::run(scenario, options);

    if (!trace_path.empty()) {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << trace_path << "\n";
            return kExitUsage;
        }
        result.trace.write(out);
    }
    if (result.violation) {
        std::cerr << "strategy violation by " << result.violation->agent.value
                  << ": " << result.violation->detail << "\n";
        return kExitViolation;
    }
    if (!quiet) {
        std::cout << "negotiation `" << scenario.name << "` ended after round "
                  << result.state.round_index() << " ("
                  << mopac::to_string(result.state.finish_reason()) << ")\n";
        print_deals(result.deals());
    }
    return kExitOk;
}

int cmd_analyze(const std::string& path, const std::string& engine) {
    std::vector<mopac::RoundAnalysis> rounds;
    try {
        rounds = mopac::analyze_trace(read_file_or_die(path), engine_from(engine));
    } catch (const std::exception& error) {
        std::cerr << "error: " << path << ": " << error.what() << "\n";
        return kExitUsage;
    }
    bool mismatch = false;
    for (const auto& round : rounds) {
        std::cout << "round " << round.round_index << ": "
                  << round.recomputed.size() << " viable group(s)\n";
        for (const auto& vg : round.recomputed) {
            std::cout << "  bid " << vg.group.bid.value << "  power "
                      << vg.group.power << "  members";
            for (const auto& m : vg.group.members) std::cout << ' ' << m.value;
            std::cout << '\n';
        }
        if (!round.matches_recorded()) {
            mismatch = true;
            std::cout << "  ! differs from the groups recorded in the trace\n";
        }
    }
    return mismatch ? kExitViolation : kExitOk;
}

int cmd_validate(const std::string& path) {
    try {
        auto scenario = mopac::load_scenario_file(path);
        std::cout << "ok: " << scenario.name << " (" << scenario.agents.size()
                  << " agents, p_min " << scenario.params.p_min << ")\n";
        return kExitOk;
    } catch (const mopac::ScenarioError& error) {
        std::cerr << "error: " << path << ": " << error.what() << "\n";
        return kExitUsage;
    }
}

int cmd_serve(const std::string& session_path, const std::string& listen,
              const std::string& trace_path) {
    mopac::SessionConfig config;
    try {
        config = mopac::load_session_file(session_path);
    } catch (const mopac::ScenarioError& error) {
        std::cerr << "error: " << session_path << ": " << error.what() << "\n";
        return kExitUsage;
    }
    mopac::MediatorOptions options;
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        std::cerr << "error: --listen expects host:port\n";
        return kExitUsage;
    }
    options.host = listen.substr(0, colon);
    try {
        options.port = static_cast<std::uint16_t>(std::stoul(listen.substr(colon + 1)));
    } catch (const std::exception&) {
        std::cerr << "error: bad port in --listen\n";
        return kExitUsage;
    }

    try {
        mopac::MediatorServer server(std::move(config), options);
        server.start();
        std::cout << "session " << server.session_id() << " listening on "
                  << options.host << ":" << server.port() << "\n";
        auto deals = server.wait();
        if (!trace_path.empty()) {
            std::ofstream out(trace_path, std::ios::binary);
            server.trace().write(out);
        }
        print_deals(deals);
        server.stop();
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitViolation;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mopac - partial-consensus multilateral negotiation"};
    app.require_subcommand(1);

    // run
    std::string run_path, run_policy, run_trace;
    std::string run_engine = "pruned";
    std::optional<std::uint64_t> run_seed;
    bool run_quiet = false;
    auto* run_cmd = app.add_subcommand("run", "run a scenario to completion");
    run_cmd->add_option("scenario", run_path, "scenario file")->required();
    run_cmd->add_option("--seed", run_seed, "override the tie-break seed");
    run_cmd->add_option("--policy", run_policy, "termination policy")
        ->check(CLI::IsMember({"one", "two"}));
    run_cmd->add_option("--engine", run_engine, "viable-group engine")
        ->check(CLI::IsMember({"naive", "pruned"}));
    run_cmd->add_option("--trace", run_trace, "write the JSONL trace here");
    run_cmd->add_flag("--quiet", run_quiet, "suppress the summary");

    // analyze
    std::string analyze_path;
    std::string analyze_engine = "pruned";
    auto* analyze_cmd =
        app.add_subcommand("analyze", "recompute viable groups from a trace");
    analyze_cmd->add_option("trace", analyze_path, "trace or votes file")
        ->required();
    analyze_cmd->add_option("--engine", analyze_engine, "viable-group engine")
        ->check(CLI::IsMember({"naive", "pruned"}));

    // validate
    std::string validate_path;
    auto* validate_cmd =
        app.add_subcommand("validate", "parse and check a scenario");
    validate_cmd->add_option("scenario", validate_path, "scenario file")
        ->required();

    // serve
    std::string serve_session, serve_trace;
    std::string serve_listen = "127.0.0.1:0";
    auto* serve_cmd =
        app.add_subcommand("serve", "mediate a session for remote agents");
    serve_cmd->add_option("--session", serve_session, "session config file")
        ->required();
    serve_cmd->add_option("--listen", serve_listen, "host:port (port 0 = any)");
    serve_cmd->add_option("--trace", serve_trace, "write the JSONL trace here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        int rc = app.exit(error);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (run_cmd->parsed())
        return cmd_run(run_path, run_seed, run_policy, run_engine, run_trace,
                       run_quiet);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_path, analyze_engine);
    if (validate_cmd->parsed()) return cmd_validate(validate_path);
    if (serve_cmd->parsed())
        return cmd_serve(serve_session, serve_listen, serve_trace);
    return kExitUsage;
}
