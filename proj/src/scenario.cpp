#include "ssiam/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ssiam/didauth.hpp"
#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

std::string require_string(const Json& step, const char* key) {
    if (!step.contains(key) || !step.at(key).is_string())
        fail(Errc::parse_error, std::string("step needs string field '") + key + "'");
    return step.at(key).get<std::string>();
}

uint64_t require_u64(const Json& step, const char* key) {
    if (!step.contains(key) || !step.at(key).is_number_integer() ||
        (step.at(key).is_number_integer() && !step.at(key).is_number_unsigned() &&
         step.at(key).get<int64_t>() < 0))
        fail(Errc::parse_error, std::string("step needs a non-negative integer '") + key + "'");
    return step.at(key).get<uint64_t>();
}

std::string reasons_text(const std::vector<ReasonCode>& reasons) {
    std::string out = "[";
    for (size_t i = 0; i < reasons.size(); ++i) {
        if (i) out += ",";
        out += to_string(reasons[i]);
    }
    return out + "]";
}

// Both wallets record the bytes that crossed the link.
Json exchange(Wallet& from, const std::string& from_did, Wallet& to, const std::string& to_did,
              InProcLink& link, Side from_side, const Json& message, uint64_t now) {
    Bytes body = canonicalize(message);
    from.log_message("out", to_did, body, now);
    link.send(from_side, body);
    auto delivered = link.recv(from_side == Side::A ? Side::B : Side::A);
    if (!delivered) fail(Errc::auth_failed, "message lost on the proximity link");
    to.log_message("in", from_did, *delivered, now);
    return canonical_parse(*delivered);
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const Json& j) {
    ScenarioConfig c;
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("http_bind")) c.http_bind = j.at("http_bind").get<std::string>();
    if (j.contains("poll_interval_steps"))
        c.poll_interval_steps = j.at("poll_interval_steps").get<uint64_t>();
    if (j.contains("freshness_bound")) c.freshness_bound = j.at("freshness_bound").get<uint64_t>();
    if (j.contains("challenge_ttl")) c.challenge_ttl = j.at("challenge_ttl").get<uint64_t>();
    return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(Errc::io_error, "cannot read config " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(canonical_parse(text));
}

Json load_scenario_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(Errc::parse_error, "cannot read scenario " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Json scenario = canonical_parse(text);
    if (!scenario.contains("name") || !scenario.contains("steps") ||
        !scenario.at("steps").is_array())
        fail(Errc::parse_error, "scenario needs 'name' and a 'steps' array");

    static const std::set<std::string> known_actions = {
        "create_actor", "register_did",  "publish_schema", "deploy_contract", "issue",
        "revoke",       "update_policy", "set_clock",      "begin_session",   "attempt_access",
        "relock",       "poll_bridge",   "assert_decision", "assert_state"};
    for (const auto& step : scenario.at("steps")) {
        std::string action = require_string(step, "action");
        if (!known_actions.count(action))
            fail(Errc::parse_error, "unknown scenario action: " + action);
        if (action == "assert_decision") require_string(step, "outcome");
        if (action == "assert_state") {
            require_string(step, "vehicle");
            require_string(step, "lock");
        }
    }
    return scenario;
}

bool RunReport::passed() const {
    if (!identity_chain_ok || !auth_chain_ok) return false;
    if (assertions_passed != assertions_total) return false;
    for (const auto& s : steps)
        if (s.status != "ok") return false;
    return true;
}

std::string RunReport::to_text() const {
    std::ostringstream out;
    out << "scenario: " << scenario_name << "\n";
    out << "seed: " << seed << "\n";
    for (const auto& s : steps) {
        out << "step " << (s.index < 9 ? "0" : "") << s.index + 1 << " "
            << s.status << " " << s.action;
        if (!s.detail.empty()) out << " -- " << s.detail;
        out << "\n";
    }
    out << "decisions:\n";
    for (const auto& d : decisions) out << "  " << d << "\n";
    out << "chains: identity=" << (identity_chain_ok ? "ok" : "BROKEN")
        << " authorization=" << (auth_chain_ok ? "ok" : "BROKEN") << "\n";
    out << "assertions: " << assertions_passed << "/" << assertions_total << "\n";
    out << "result: " << (passed() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

ScenarioEngine::ScenarioEngine(ScenarioConfig config, uint64_t seed)
    : config_(std::move(config)), seed_(seed) {
    std::filesystem::create_directories(config_.data_dir);

    DeterministicRng anchor_rng = DeterministicRng::from_label(seed_, "trust-anchor");
    endorser_ = Endorser::from_seed(anchor_rng.seed32());
    GenesisConfig genesis{{endorser_.anchor()}};
    genesis.save(config_.data_dir / "genesis.json");

    identity_ = std::make_shared<IdentityLedgerCore>(config_.data_dir / "identity.jsonl", genesis,
                                                     &clock_);
    validator_ = std::make_unique<LedgerNode>(identity_, NodeRole::VALIDATOR);
    observer_ = std::make_unique<LedgerNode>(identity_, NodeRole::OBSERVER);
    auth_ = std::make_unique<AuthLedger>(config_.data_dir / "authorization.jsonl");
    store_ = std::make_unique<IndexStore>(config_.data_dir / "bridge_store.jsonl",
                                          config_.data_dir / "bridge_cursor.json");
    indexer_ = std::make_unique<Indexer>(LedgerNode(identity_, NodeRole::OBSERVER), *store_,
                                         &clock_);
    http_ = std::make_unique<BridgeHttpServer>(*store_, *observer_);

    std::string host = config_.http_bind;
    int port = 0;
    if (auto colon = host.rfind(':'); colon != std::string::npos) {
        port = std::stoi(host.substr(colon + 1));
        host = host.substr(0, colon);
    }
    bridge_port_ = http_->start(host, port);
    oracle_ = std::make_unique<OracleClient>(host, bridge_port_);
    runtime_ = std::make_unique<AuthorizationRuntime>(*auth_, oracle_->provider(),
                                                      config_.freshness_bound);
}

ScenarioEngine::~ScenarioEngine() {
    if (http_) http_->stop();
}

Wallet& ScenarioEngine::actor(const std::string& name) {
    auto it = actors_.find(name);
    if (it == actors_.end()) fail(Errc::not_found, "no actor named " + name);
    return *it->second;
}

VehicleAgent& ScenarioEngine::vehicle(const std::string& name) {
    auto it = vehicles_.find(name);
    if (it == vehicles_.end()) fail(Errc::not_found, "no vehicle agent for " + name);
    return *it->second;
}

std::string ScenarioEngine::contract_address(const std::string& alias) const {
    auto it = contracts_.find(alias);
    if (it == contracts_.end()) fail(Errc::not_found, "no contract aliased " + alias);
    return it->second;
}

const ScenarioEngine::CredentialRef& ScenarioEngine::credential_ref(
    const std::string& alias) const {
    auto it = credentials_.find(alias);
    if (it == credentials_.end()) fail(Errc::not_found, "no credential aliased " + alias);
    return it->second;
}

const CredentialSchema& ScenarioEngine::schema_ref(const std::string& alias) const {
    auto it = schemas_.find(alias);
    if (it == schemas_.end()) fail(Errc::not_found, "no schema aliased " + alias);
    return it->second;
}

std::string ScenarioEngine::actor_did(const std::string& name) {
    return actor(name).primary_did();
}

void ScenarioEngine::do_create_actor(const Json& step) {
    std::string name = require_string(step, "name");
    if (actors_.count(name)) fail(Errc::parse_error, "actor already exists: " + name);
    Bytes material;
    for (int i = 0; i < 8; ++i) material.push_back(static_cast<uint8_t>(seed_ >> (8 * i)));
    append(material, "actor:" + name);
    actors_.emplace(name, std::make_unique<Wallet>(name, digest(material).bytes));
}

void ScenarioEngine::do_register_did(const Json& step) {
    Wallet& w = actor(require_string(step, "actor"));
    bool via_observer = step.value("node", "validator") == "observer";
    TxnDraft draft =
        make_did_reg_draft(build_document(w.primary_keys().public_key), w.primary_keys().secret_key);
    LedgerNode& node = via_observer ? *observer_ : *validator_;
    node.submit(draft, endorser_.endorse(draft));
}

void ScenarioEngine::do_publish_schema(const Json& step) {
    std::string issuer = require_string(step, "issuer");
    std::string name = require_string(step, "name");
    std::vector<std::string> claims;
    for (const auto& c : step.at("claims")) claims.push_back(c.get<std::string>());
    CredentialSchema schema =
        publish_schema(actor(issuer), actor_did(issuer), name, claims, *validator_);
    schemas_[step.value("as", name)] = schema;
}

AccessPolicy ScenarioEngine::policy_from_step(const Json& policy_json) {
    // Scenario sugar: vehicle entries naming actors become their DIDs.
    Json translated = policy_json;
    if (translated.contains("allowed_vehicles")) {
        Json vehicles = Json::array();
        for (const auto& v : translated.at("allowed_vehicles")) {
            std::string label = v.get<std::string>();
            vehicles.push_back(actors_.count(label) ? actor_did(label) : label);
        }
        translated["allowed_vehicles"] = vehicles;
    }
    return AccessPolicy::from_json(translated);
}

void ScenarioEngine::do_deploy_contract(const Json& step) {
    std::string owner = require_string(step, "owner");
    std::vector<std::string> vehicle_actors;
    for (const auto& v : step.at("vehicles")) vehicle_actors.push_back(v.get<std::string>());

    Json policy_json = step.value("policy", Json::object());
    if (!policy_json.contains("allowed_vehicles")) {
        Json vehicles = Json::array();
        for (const auto& v : vehicle_actors) vehicles.push_back(v);
        policy_json["allowed_vehicles"] = vehicles;
    }
    AccessPolicy policy = policy_from_step(policy_json);

    std::vector<std::string> vehicle_dids;
    for (const auto& v : vehicle_actors) vehicle_dids.push_back(actor_did(v));
    std::string address = runtime_->deploy(actor_did(owner), policy, vehicle_dids);
    contracts_[step.value("as", std::string("default"))] = address;

    for (const auto& v : vehicle_actors) {
        vehicles_.erase(v);
        vehicles_.emplace(v, std::make_unique<VehicleAgent>(actor(v), address, *runtime_,
                                                            *observer_, &clock_,
                                                            actor_did(owner)));
    }
}

void ScenarioEngine::do_issue(const Json& step) {
    std::string issuer_name = require_string(step, "issuer");
    std::string holder_name = require_string(step, "holder");
    Wallet& issuer = actor(issuer_name);
    Wallet& holder = actor(holder_name);
    const CredentialSchema& schema = schema_ref(require_string(step, "schema"));

    // Relation-specific DIDs on both sides, then an authenticated channel.
    std::string holder_pairwise =
        holder.create_pairwise_did(issuer.primary_did(), *validator_, endorser_);
    std::string issuer_pairwise =
        issuer.create_pairwise_did(holder_pairwise, *validator_, endorser_);

    InProcLink link;
    AuthParty holder_party = auth_party(holder, holder_pairwise);
    AuthParty issuer_party = auth_party(issuer, issuer_pairwise);
    did_auth(holder_party, issuer_party, *observer_, clock_, link, config_.challenge_ttl);

    exchange(holder, holder_pairwise, issuer, issuer_pairwise, link, Side::A,
             Json{{"type", "credential_request"}, {"schema_id", schema.schema_id.hex()}},
             clock_.now);

    // One registry per issuing identity, created on first use.
    std::string registry_id;
    for (const auto& [alias, ref] : credentials_)
        if (ref.issuer_did == issuer_pairwise) registry_id = ref.registry_id;
    if (registry_id.empty())
        registry_id = create_revocation_registry(issuer, issuer_pairwise, *validator_);

    std::vector<Claim> claims;
    for (const auto& [name, value] : step.at("claims").items())
        claims.push_back({name, value.get<std::string>()});

    VerifiableCredential cred = issue_credential(
        issuer, issuer_pairwise, holder_pairwise, schema, claims,
        require_u64(step, "valid_from"), require_u64(step, "valid_until"), registry_id,
        *validator_);

    Json delivered = exchange(issuer, issuer_pairwise, holder, holder_pairwise, link, Side::B,
                              Json{{"type", "credential"}, {"credential", cred.to_json()}},
                              clock_.now);
    holder.store_credential(VerifiableCredential::from_json(delivered.at("credential")));

    CredentialRef ref;
    ref.issuer_actor = issuer_name;
    ref.holder_actor = holder_name;
    ref.issuer_did = issuer_pairwise;
    ref.cred_id = cred.metadata.cred_id;
    ref.registry_id = registry_id;
    ref.revocation_index = cred.metadata.revocation_index;
    credentials_[step.value("as", std::string("cred"))] = ref;
}

void ScenarioEngine::do_revoke(const Json& step) {
    const CredentialRef& ref = credential_ref(require_string(step, "cred"));
    Wallet& issuer = actor(require_string(step, "issuer"));
    revoke_credential(issuer, ref.issuer_did, ref.registry_id, ref.revocation_index, *validator_);
}

void ScenarioEngine::do_update_policy(const Json& step) {
    std::string owner = require_string(step, "owner");
    std::string address = contract_address(step.value("contract", std::string("default")));
    AccessPolicy policy = policy_from_step(step.at("policy"));
    Signature sig =
        sign(actor(owner).primary_keys().secret_key, canonicalize(policy.to_json()));
    runtime_->update_policy(address, policy, sig);
}

void ScenarioEngine::do_set_clock(const Json& step) {
    uint64_t target = require_u64(step, "time");
    if (target < clock_.now) fail(Errc::parse_error, "logical clock cannot run backwards");
    if (config_.poll_interval_steps > 0) {
        uint64_t before = clock_.now / config_.poll_interval_steps;
        uint64_t after = target / config_.poll_interval_steps;
        clock_.now = target;
        if (after > before) indexer_->poll();
    } else {
        clock_.now = target;
    }
}

void ScenarioEngine::do_begin_session(const Json& step) {
    std::string holder_name = require_string(step, "holder");
    std::string vehicle_name = require_string(step, "vehicle");
    Wallet& holder = actor(holder_name);
    VehicleAgent& agent = vehicle(vehicle_name);

    std::string holder_session_did =
        holder.create_pairwise_did(agent.did(), *validator_, endorser_);

    SessionState state;
    state.link = std::make_unique<InProcLink>();
    state.holder_actor = holder_name;
    agent.begin_session(holder, holder_session_did, *state.link, config_.challenge_ttl);
    sessions_[vehicle_name] = std::move(state);
}

void ScenarioEngine::do_attempt_access(const Json& step) {
    std::string vehicle_name = require_string(step, "vehicle");
    VehicleAgent& agent = vehicle(vehicle_name);
    std::string location = step.value("location", std::string(""));

    // Rogue path: an arbitrary caller invokes the contract directly.
    if (step.contains("caller")) {
        std::string caller_did = actor_did(step.at("caller").get<std::string>());
        Presentation pres;
        if (step.contains("cred")) {
            const CredentialRef& ref = credential_ref(step.at("cred").get<std::string>());
            pres = present_credential(actor(ref.holder_actor), ref.cred_id, {},
                                      actor(ref.holder_actor).rng().nonce16());
        } else if (last_presentation_) {
            pres = *last_presentation_;
        }
        try {
            auto invocation = runtime_->invoke(agent.contract_address(), caller_did, pres,
                                               location, agent.did(), clock_.now);
            last_outcome_ = invocation.decision.outcome;
            last_reasons_ = invocation.decision.reasons;
        } catch (const Error& e) {
            if (e.code() != Errc::unauthorized) throw;
            last_outcome_ = "UNAUTHORIZED";
            last_reasons_.clear();
        }
        return;
    }

    Presentation pres;
    if (step.value("replay_last", false)) {
        if (!last_presentation_) fail(Errc::parse_error, "no presentation to replay");
        pres = *last_presentation_;
    } else {
        std::string holder_name = require_string(step, "holder");
        const CredentialRef& ref = credential_ref(require_string(step, "cred"));
        Wallet& holder = actor(holder_name);
        const VerifiableCredential& cred = holder.credential(ref.cred_id);

        std::vector<std::string> disclose;
        if (step.contains("disclose"))
            for (const auto& d : step.at("disclose")) disclose.push_back(d.get<std::string>());
        else
            for (const auto& c : cred.claims) disclose.push_back(c.name);

        pres = present_credential(holder, ref.cred_id, disclose, agent.session().verifier_nonce);

        if (step.contains("tamper")) {
            const Json& tamper = step.at("tamper");
            std::string claim_name = require_string(tamper, "claim");
            bool touched = false;
            for (auto& d : pres.disclosed)
                if (d.name == claim_name) {
                    d.value = tamper.at("value").get<std::string>();
                    touched = true;
                }
            if (!touched) fail(Errc::parse_error, "tamper names an undisclosed claim");
        }
    }

    // The presentation crosses the proximity link before the vehicle acts.
    auto session_it = sessions_.find(vehicle_name);
    if (session_it != sessions_.end() && agent.session_live()) {
        Wallet& holder = actor(session_it->second.holder_actor);
        exchange(holder, agent.session().holder_session_did, actor(vehicle_name), agent.did(),
                 *session_it->second.link, Side::A,
                 Json{{"type", "presentation"}, {"presentation", pres.to_json()}}, clock_.now);
    }

    try {
        Decision decision = agent.request_access(pres, location);
        last_outcome_ = decision.outcome;
        last_reasons_ = decision.reasons;
        last_presentation_ = pres;
    } catch (const Error& e) {
        if (e.code() == Errc::nonce_mismatch) {
            last_outcome_ = "REJECTED_LOCAL";
            last_reasons_.clear();
            return;
        }
        throw;
    }
}

void ScenarioEngine::do_relock(const Json& step) {
    VehicleAgent& agent = vehicle(require_string(step, "vehicle"));
    Wallet& by = actor(require_string(step, "by"));
    // The requester speaks as whichever of its DIDs is the current occupant.
    std::string requester = by.primary_did();
    if (agent.unlock_holder() && by.key_for(*agent.unlock_holder()))
        requester = *agent.unlock_holder();
    agent.relock(requester);
}

void ScenarioEngine::do_poll_bridge(const Json&) { indexer_->poll(); }

bool ScenarioEngine::do_assert_decision(const Json& step, std::string& detail) {
    std::string expected = require_string(step, "outcome");
    if (last_outcome_ != expected) {
        detail = "expected outcome " + expected + ", got " + last_outcome_;
        return false;
    }
    if (step.contains("reasons")) {
        std::vector<ReasonCode> expected_reasons;
        for (const auto& r : step.at("reasons"))
            expected_reasons.push_back(reason_from_string(r.get<std::string>()));
        expected_reasons = normalize_reasons(std::move(expected_reasons));
        if (expected_reasons != last_reasons_) {
            detail = "expected reasons " + reasons_text(expected_reasons) + ", got " +
                     reasons_text(last_reasons_);
            return false;
        }
    }
    detail = last_outcome_ + " " + reasons_text(last_reasons_);
    return true;
}

bool ScenarioEngine::do_assert_state(const Json& step, std::string& detail) {
    VehicleAgent& agent = vehicle(require_string(step, "vehicle"));
    std::string expected = require_string(step, "lock");
    std::string got = agent.lock() == LockState::UNLOCKED ? "UNLOCKED" : "LOCKED";
    detail = got;
    if (got != expected) {
        detail = "expected " + expected + ", got " + got;
        return false;
    }
    return true;
}

void ScenarioEngine::execute_step(const Json& step) {
    std::string action = require_string(step, "action");
    if (action == "create_actor") return do_create_actor(step);
    if (action == "register_did") return do_register_did(step);
    if (action == "publish_schema") return do_publish_schema(step);
    if (action == "deploy_contract") return do_deploy_contract(step);
    if (action == "issue") return do_issue(step);
    if (action == "revoke") return do_revoke(step);
    if (action == "update_policy") return do_update_policy(step);
    if (action == "set_clock") return do_set_clock(step);
    if (action == "begin_session") return do_begin_session(step);
    if (action == "attempt_access") return do_attempt_access(step);
    if (action == "relock") return do_relock(step);
    if (action == "poll_bridge") return do_poll_bridge(step);
    fail(Errc::parse_error, "unknown scenario action: " + action);
}

RunReport ScenarioEngine::run(const Json& scenario, bool keep_going) {
    RunReport report;
    report.scenario_name = scenario.at("name").get<std::string>();
    report.seed = seed_;

    const Json& steps = scenario.at("steps");
    for (size_t i = 0; i < steps.size(); ++i) {
        const Json& step = steps[i];
        std::string action = require_string(step, "action");
        StepOutcome outcome{i, action, "ok", ""};

        try {
            if (action == "assert_decision") {
                ++report.assertions_total;
                if (do_assert_decision(step, outcome.detail)) ++report.assertions_passed;
                else outcome.status = "assert-failed";
            } else if (action == "assert_state") {
                ++report.assertions_total;
                if (do_assert_state(step, outcome.detail)) ++report.assertions_passed;
                else outcome.status = "assert-failed";
            } else if (step.contains("expect_error")) {
                ++report.assertions_total;
                std::string expected = step.at("expect_error").get<std::string>();
                try {
                    execute_step(step);
                    outcome.status = "assert-failed";
                    outcome.detail = "expected error '" + expected + "', step succeeded";
                } catch (const Error& e) {
                    if (errc_name(e.code()) == expected) {
                        ++report.assertions_passed;
                        outcome.detail = "raised " + expected;
                    } else {
                        outcome.status = "assert-failed";
                        outcome.detail = std::string("expected error '") + expected +
                                         "', got: " + e.what();
                    }
                }
            } else {
                execute_step(step);
            }
        } catch (const std::exception& e) {
            outcome.status = "error";
            outcome.detail = e.what();
        }

        report.steps.push_back(outcome);
        if (outcome.status != "ok" && !keep_going) {
            report.stopped_early = true;
            break;
        }
    }

    for (uint64_t seq = 1; seq <= auth_->height(); ++seq) {
        AuthTxn txn = auth_->read(seq);
        if (txn.kind == AuthKind::INVOKE && txn.decision) {
            std::ostringstream line;
            line << "seq=" << seq << " " << txn.decision->outcome << " "
                 << reasons_text(txn.decision->reasons)
                 << " checked_at_seq=" << txn.decision->checked_at_seq
                 << " decided_at=" << txn.decision->decided_at << " caller=" << txn.caller_did;
            report.decisions.push_back(line.str());
        }
    }
    report.identity_chain_ok = identity_->verify_chain();
    report.auth_chain_ok = auth_->verify_chain();
    return report;
}

}  // namespace ssiam
