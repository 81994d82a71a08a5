#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "ssiam/authorization.hpp"
#include "ssiam/errors.hpp"
#include "ssiam/identity_ledger.hpp"
#include "ssiam/replay.hpp"
#include "ssiam/scenario.hpp"

namespace fs = std::filesystem;
using namespace ssiam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;

ScenarioConfig load_config(const std::string& config_path) {
    if (config_path.empty()) return ScenarioConfig{};
    return ScenarioConfig::load(config_path);
}

void clear_run_state(const fs::path& data_dir) {
    for (const char* name : {"identity.jsonl", "authorization.jsonl", "bridge_store.jsonl",
                             "bridge_cursor.json", "genesis.json"})
        fs::remove(data_dir / name);
}

int cmd_run(const std::string& scenario_path, const std::string& config_path, uint64_t seed,
            bool keep_going) {
    Json scenario;
    ScenarioConfig config;
    try {
        config = load_config(config_path);
        scenario = load_scenario_file(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        fs::create_directories(config.data_dir);
        clear_run_state(config.data_dir);
        ScenarioEngine engine(config, seed);
        RunReport report = engine.run(scenario, keep_going);
        std::cout << report.to_text();
        return report.passed() ? kExitOk : kExitFailure;
    } catch (const Error& e) {
        if (e.code() == Errc::parse_error) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitParse;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

std::string reasons_column(const std::vector<ReasonCode>& reasons) {
    std::string out;
    for (size_t i = 0; i < reasons.size(); ++i) {
        if (i) out += ",";
        out += to_string(reasons[i]);
    }
    return out;
}

int cmd_audit(const std::string& config_path, const std::string& contract) {
    ScenarioConfig config;
    try {
        config = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        GenesisConfig genesis = GenesisConfig::load(config.data_dir / "genesis.json");
        IdentityLedgerCore identity(config.data_dir / "identity.jsonl", genesis, nullptr);
        AuthLedger auth(config.data_dir / "authorization.jsonl");

        std::cout << "access log" << (contract.empty() ? "" : " for contract " + contract)
                  << ":\n";
        std::cout << "seq   kind           caller                              outcome  reasons\n";
        for (uint64_t seq = 1; seq <= auth.height(); ++seq) {
            AuthTxn txn;
            try {
                txn = auth.read(seq);
            } catch (const Error&) {
                continue;  // the chain check below reports the damage
            }
            if (!contract.empty() && txn.contract_address != contract) continue;
            std::string outcome = "-";
            std::string reasons = "-";
            if (txn.decision) {
                outcome = txn.decision->outcome;
                reasons = reasons_column(txn.decision->reasons);
            } else if (txn.kind == AuthKind::INVOKE) {
                outcome = "REJECTED";
            }
            printf("%-5llu %-14s %-35s %-8s %s\n", static_cast<unsigned long long>(seq),
                   to_string(txn.kind).c_str(), txn.caller_did.c_str(), outcome.c_str(),
                   reasons.c_str());
        }

        bool ok = true;
        ChainCheck identity_check = identity.verify_chain_detailed();
        if (identity_check.ok) {
            std::cout << "identity chain: ok (height " << identity.height() << ")\n";
        } else {
            std::cout << "identity chain: BROKEN at seq_no " << identity_check.first_bad_seq
                      << " (" << identity_check.detail << ")\n";
            ok = false;
        }
        ChainCheck auth_check = auth.verify_chain_detailed();
        if (auth_check.ok) {
            std::cout << "authorization chain: ok (height " << auth.height() << ")\n";
        } else {
            std::cout << "authorization chain: BROKEN at seq_no " << auth_check.first_bad_seq
                      << " (" << auth_check.detail << ")\n";
            ok = false;
        }

        if (ok) {
            ReplayOutcome replay = replay_decisions(identity, auth);
            if (replay.ok) {
                std::cout << "decision replay: ok (" << replay.decisions_checked
                          << " decisions reproduced)\n";
            } else {
                std::cout << "decision replay: MISMATCH at seq_no " << replay.mismatch_seq << " ("
                          << replay.detail << ")\n";
                ok = false;
            }
        }
        return ok ? kExitOk : kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_init(const std::string& config_path, const std::string& genesis_path) {
    try {
        ScenarioConfig config = load_config(config_path);
        GenesisConfig genesis = GenesisConfig::load(genesis_path);
        fs::create_directories(config.data_dir);
        genesis.save(config.data_dir / "genesis.json");
        std::cout << "initialized " << config.data_dir.string() << " with "
                  << genesis.trust_anchors.size() << " trust anchor(s)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-sovereign identity and access management simulator for smart vehicles"};
    app.require_subcommand(1);

    std::string scenario_path, config_path, contract, genesis_path;
    uint64_t seed = 1;
    bool keep_going = false;

    CLI::App* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--config", config_path, "Config JSON file");
    run->add_option("--seed", seed, "Deterministic seed");
    run->add_flag("--keep-going", keep_going, "Continue past failed assertions");

    CLI::App* audit = app.add_subcommand("audit", "Print the access log and verify both chains");
    audit->add_option("--config", config_path, "Config JSON file");
    audit->add_option("--contract", contract, "Filter by contract address");

    CLI::App* init = app.add_subcommand("init", "Install a genesis file into the data directory");
    init->add_option("--genesis", genesis_path, "Genesis JSON file")->required();
    init->add_option("--config", config_path, "Config JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    if (run->parsed()) return cmd_run(scenario_path, config_path, seed, keep_going);
    if (audit->parsed()) return cmd_audit(config_path, contract);
    if (init->parsed()) return cmd_init(config_path, genesis_path);
    return kExitParse;
}
