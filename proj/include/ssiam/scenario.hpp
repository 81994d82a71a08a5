#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssiam/authorization.hpp"
#include "ssiam/bridge.hpp"
#include "ssiam/canonical.hpp"
#include "ssiam/clock.hpp"
#include "ssiam/credential.hpp"
#include "ssiam/identity_ledger.hpp"
#include "ssiam/oracle.hpp"
#include "ssiam/vehicle.hpp"
#include "ssiam/wallet.hpp"

namespace ssiam {

struct ScenarioConfig {
    std::filesystem::path data_dir = "ssiam-data";
    std::string http_bind = "127.0.0.1:0";
    uint64_t poll_interval_steps = 0;  // 0: poll only on explicit steps
    uint64_t freshness_bound = 2;
    uint64_t challenge_ttl = 100;

    static ScenarioConfig from_json(const Json& j);
    static ScenarioConfig load(const std::filesystem::path& file);
};

struct StepOutcome {
    size_t index = 0;
    std::string action;
    std::string status;  // "ok" | "assert-failed" | "error"
    std::string detail;
};

struct RunReport {
    std::string scenario_name;
    uint64_t seed = 0;
    std::vector<StepOutcome> steps;
    std::vector<std::string> decisions;  // canonical log lines, in order
    bool identity_chain_ok = false;
    bool auth_chain_ok = false;
    size_t assertions_passed = 0;
    size_t assertions_total = 0;
    bool stopped_early = false;

    bool passed() const;
    std::string to_text() const;  // byte-stable for a fixed seed
};

// Boots the two ledgers, the bridge and the runtime, then walks actors
// through scripted steps. Everything observable is a function of (scenario,
// seed, config).
class ScenarioEngine {
public:
    ScenarioEngine(ScenarioConfig config, uint64_t seed);
    ~ScenarioEngine();

    ScenarioEngine(const ScenarioEngine&) = delete;
    ScenarioEngine& operator=(const ScenarioEngine&) = delete;

    RunReport run(const Json& scenario, bool keep_going = false);

    // Orchestration surface, exposed for the test suites.
    void execute_step(const Json& step);
    LogicalClock& clock() { return clock_; }
    LedgerNode& validator() { return *validator_; }
    LedgerNode& observer() { return *observer_; }
    IdentityLedgerCore& identity_core() { return *identity_; }
    AuthLedger& auth_ledger() { return *auth_; }
    AuthorizationRuntime& runtime() { return *runtime_; }
    Indexer& indexer() { return *indexer_; }
    IndexStore& store() { return *store_; }
    const Endorser& endorser() const { return endorser_; }
    int bridge_port() const { return bridge_port_; }
    const OracleClient& oracle() const { return *oracle_; }

    Wallet& actor(const std::string& name);
    VehicleAgent& vehicle(const std::string& name);
    std::string contract_address(const std::string& alias = "default") const;
    const std::optional<Presentation>& last_presentation() const { return last_presentation_; }
    const std::string& last_outcome() const { return last_outcome_; }
    const std::vector<ReasonCode>& last_reasons() const { return last_reasons_; }

    struct CredentialRef {
        std::string issuer_actor;
        std::string holder_actor;
        std::string issuer_did;  // pairwise, as it appears on the credential
        Digest cred_id;
        std::string registry_id;
        uint64_t revocation_index = 0;
    };
    const CredentialRef& credential_ref(const std::string& alias) const;

private:
    struct SessionState {
        std::unique_ptr<InProcLink> link;
        std::string holder_actor;
    };

    void do_create_actor(const Json& step);
    void do_register_did(const Json& step);
    void do_publish_schema(const Json& step);
    void do_deploy_contract(const Json& step);
    void do_issue(const Json& step);
    void do_revoke(const Json& step);
    void do_update_policy(const Json& step);
    void do_set_clock(const Json& step);
    void do_begin_session(const Json& step);
    void do_attempt_access(const Json& step);
    void do_relock(const Json& step);
    void do_poll_bridge(const Json& step);
    bool do_assert_decision(const Json& step, std::string& detail);
    bool do_assert_state(const Json& step, std::string& detail);

    AccessPolicy policy_from_step(const Json& policy_json);
    std::string actor_did(const std::string& name);
    const CredentialSchema& schema_ref(const std::string& alias) const;

    ScenarioConfig config_;
    uint64_t seed_;
    LogicalClock clock_;
    Endorser endorser_;
    std::shared_ptr<IdentityLedgerCore> identity_;
    std::unique_ptr<LedgerNode> validator_;
    std::unique_ptr<LedgerNode> observer_;
    std::unique_ptr<AuthLedger> auth_;
    std::unique_ptr<IndexStore> store_;
    std::unique_ptr<Indexer> indexer_;
    std::unique_ptr<BridgeHttpServer> http_;
    int bridge_port_ = 0;
    std::unique_ptr<OracleClient> oracle_;
    std::unique_ptr<AuthorizationRuntime> runtime_;

    std::map<std::string, std::unique_ptr<Wallet>> actors_;
    std::map<std::string, std::unique_ptr<VehicleAgent>> vehicles_;
    std::map<std::string, SessionState> sessions_;  // keyed by vehicle name
    std::map<std::string, CredentialSchema> schemas_;
    std::map<std::string, CredentialRef> credentials_;
    std::map<std::string, std::string> contracts_;  // alias -> address

    std::optional<Presentation> last_presentation_;
    std::string last_outcome_ = "NONE";
    std::vector<ReasonCode> last_reasons_;
    uint64_t steps_since_poll_ = 0;
};

Json load_scenario_file(const std::filesystem::path& file);  // Errc::parse_error

}  // namespace ssiam
