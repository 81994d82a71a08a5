// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <httplib.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "ssiam/authorization.hpp"
#include "ssiam/bridge.hpp"
#include "ssiam/credential.hpp"
#include "ssiam/errors.hpp"
#include "ssiam/oracle.hpp"
#include "ssiam/replay.hpp"
#include "ssiam/rng.hpp"
#include "ssiam/scenario.hpp"
#include "ssiam/vehicle.hpp"
#include "ssiam/view.hpp"
#include "ssiam/wallet.hpp"

using namespace ssiam;
namespace fs = std::filesystem;

#ifndef SSIAM_SCENARIO_DIR
#define SSIAM_SCENARIO_DIR "scenarios"
#endif

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
    if (!condition) throw CheckFailure(what);
}

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    auto dir = fs::temp_directory_path() / ("ssiam-acceptance-" + std::to_string(::getpid()) +
                                            "-" + tag + "-" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

ScenarioConfig config_for(const std::string& tag, uint64_t freshness_bound = 2) {
    ScenarioConfig config;
    config.data_dir = fresh_dir(tag);
    config.http_bind = "127.0.0.1:0";
    config.freshness_bound = freshness_bound;
    return config;
}

Json scenario_file(const std::string& name) {
    return load_scenario_file(std::string(SSIAM_SCENARIO_DIR) + "/" + name + ".json");
}

std::array<uint8_t, 32> seed_bytes(uint8_t fill) {
    std::array<uint8_t, 32> s{};
    s.fill(fill);
    return s;
}

bool contains(const Bytes& haystack, const std::string& needle) {
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

bool has_reason(const std::vector<ReasonCode>& reasons, ReasonCode code) {
    return std::find(reasons.begin(), reasons.end(), code) != reasons.end();
}

// Shared direct-view fixture for the library-level criteria: registered
// actors, one issued three-claim credential, one deployed contract.
struct Fixture {
    LogicalClock clock;
    Endorser anchor = Endorser::from_seed(seed_bytes(0xa1));
    fs::path dir = fresh_dir("fixture");
    std::shared_ptr<IdentityLedgerCore> identity = std::make_shared<IdentityLedgerCore>(
        dir / "identity.jsonl", GenesisConfig{{anchor.anchor()}}, &clock);
    LedgerNode validator{identity, NodeRole::VALIDATOR};
    LedgerNode observer{identity, NodeRole::OBSERVER};
    AuthLedger auth{dir / "authorization.jsonl"};
    AuthorizationRuntime runtime{
        auth, [this] { return std::make_shared<DirectIdentityView>(*identity); }, 2};

    Wallet owner{"owner", seed_bytes(0xa2)};
    Wallet holder{"holder", seed_bytes(0xa3)};
    Wallet car{"car", seed_bytes(0xa4)};
    CredentialSchema schema;
    std::string registry_id;
    VerifiableCredential credential;
    std::string address;

    Fixture() {
        owner.register_primary_did(validator, anchor);
        holder.register_primary_did(validator, anchor);
        car.register_primary_did(validator, anchor);
        schema = publish_schema(owner, owner.primary_did(), "vehicle-access",
                                {"vehicle", "slot", "plate"}, validator);
        registry_id = create_revocation_registry(owner, owner.primary_did(), validator);
        credential = issue_credential(
            owner, owner.primary_did(), holder.primary_did(), schema,
            {{"vehicle", "V1"}, {"slot", "08:00-18:00"}, {"plate", "TN-01"}}, 0, 1000000,
            registry_id, validator);
        holder.store_credential(credential);
        address = runtime.deploy(owner.primary_did(),
                                 AccessPolicy::make({car.primary_did()}, {}, {}, {}),
                                 {car.primary_did()});
    }

    Presentation presentation(const std::vector<std::string>& disclose = {"vehicle", "slot"}) {
        return present_credential(holder, credential.metadata.cred_id, disclose,
                                  holder.rng().nonce16());
    }

    Decision invoke(const Presentation& p, uint64_t now = 5) {
        return runtime.invoke(address, car.primary_did(), p, "depot", car.primary_did(), now)
            .decision;
    }

    size_t decision_count() {
        size_t n = 0;
        for (uint64_t seq = 1; seq <= auth.height(); ++seq)
            if (auth.read(seq).decision) ++n;
        return n;
    }
};

// --- criterion 1 -----------------------------------------------------------

void criterion_1_end_to_end() {
    auto started = std::chrono::steady_clock::now();
    ScenarioEngine engine(config_for("c1"), 42);
    RunReport report = engine.run(scenario_file("happy_path"));
    auto elapsed = std::chrono::steady_clock::now() - started;

    require(report.passed(), "happy_path report failed:\n" + report.to_text());
    require(report.decisions.size() == 1, "expected exactly one decision");

    size_t invokes = 0;
    bool grant = false;
    for (uint64_t seq = 1; seq <= engine.auth_ledger().height(); ++seq) {
        AuthTxn txn = engine.auth_ledger().read(seq);
        if (txn.kind == AuthKind::INVOKE) {
            ++invokes;
            grant = txn.decision && txn.decision->granted();
        }
    }
    require(invokes == 1, "expected exactly one INVOKE entry, saw " + std::to_string(invokes));
    require(grant, "the single INVOKE must record a GRANT");
    require(engine.identity_core().verify_chain(), "identity chain must verify");
    require(engine.auth_ledger().verify_chain(), "authorization chain must verify");
    require(elapsed < std::chrono::seconds(5), "happy_path exceeded 5 seconds");
}

// --- criterion 2 -----------------------------------------------------------

void criterion_2_revocation() {
    // Default freshness bound 2: a small lag pins an older height and grants.
    {
        ScenarioEngine engine(config_for("c2a"), 11);
        for (const Json& step : Json::array({
                 Json{{"action", "create_actor"}, {"name", "owner"}},
                 Json{{"action", "create_actor"}, {"name", "renter"}},
                 Json{{"action", "create_actor"}, {"name", "car"}},
                 Json{{"action", "register_did"}, {"actor", "owner"}},
                 Json{{"action", "register_did"}, {"actor", "car"}},
                 Json{{"action", "publish_schema"},
                      {"issuer", "owner"},
                      {"name", "s"},
                      {"claims", Json::array({"vehicle"})},
                      {"as", "s"}},
                 Json{{"action", "poll_bridge"}},
                 Json{{"action", "deploy_contract"},
                      {"owner", "owner"},
                      {"vehicles", Json::array({"car"})},
                      {"policy", Json{{"allowed_vehicles", Json::array({"car"})}}}},
                 Json{{"action", "issue"},
                      {"issuer", "owner"},
                      {"holder", "renter"},
                      {"schema", "s"},
                      {"claims", Json{{"vehicle", "V1"}}},
                      {"valid_from", 0},
                      {"valid_until", 100000},
                      {"as", "cred1"}},
                 Json{{"action", "poll_bridge"}},
                 Json{{"action", "begin_session"}, {"holder", "renter"}, {"vehicle", "car"}},
                 Json{{"action", "revoke"}, {"issuer", "owner"}, {"cred", "cred1"}},
                 Json{{"action", "attempt_access"},
                      {"vehicle", "car"},
                      {"holder", "renter"},
                      {"cred", "cred1"},
                      {"location", "x"}},
             }))
            engine.execute_step(step);

        require(engine.last_outcome() == "GRANT",
                "bound=2: expected GRANT before polling, got " + engine.last_outcome());
        AuthTxn last = engine.auth_ledger().read(engine.auth_ledger().height());
        require(last.decision.has_value(), "missing decision record");
        require(last.decision->checked_at_seq < engine.identity_core().height(),
                "the pre-poll GRANT must pin a height below the live ledger head");

        // One poll cycle later the revocation is visible.
        engine.execute_step(Json{{"action", "poll_bridge"}});
        engine.execute_step(Json{{"action", "relock"}, {"vehicle", "car"}, {"by", "owner"}});
        engine.execute_step(
            Json{{"action", "begin_session"}, {"holder", "renter"}, {"vehicle", "car"}});
        engine.execute_step(Json{{"action", "attempt_access"},
                                 {"vehicle", "car"},
                                 {"holder", "renter"},
                                 {"cred", "cred1"},
                                 {"location", "x"}});
        require(engine.last_outcome() == "DENY", "expected DENY after one poll cycle");
        require(engine.last_reasons() == std::vector<ReasonCode>{ReasonCode::REVOKED},
                "expected reasons exactly [REVOKED]");
    }

    // Freshness bound 0: any lag is stale and denies as such.
    {
        ScenarioEngine engine(config_for("c2b", 0), 12);
        for (const Json& step : Json::array({
                 Json{{"action", "create_actor"}, {"name", "owner"}},
                 Json{{"action", "create_actor"}, {"name", "renter"}},
                 Json{{"action", "create_actor"}, {"name", "car"}},
                 Json{{"action", "register_did"}, {"actor", "owner"}},
                 Json{{"action", "register_did"}, {"actor", "car"}},
                 Json{{"action", "publish_schema"},
                      {"issuer", "owner"},
                      {"name", "s"},
                      {"claims", Json::array({"vehicle"})},
                      {"as", "s"}},
                 Json{{"action", "poll_bridge"}},
                 Json{{"action", "deploy_contract"},
                      {"owner", "owner"},
                      {"vehicles", Json::array({"car"})},
                      {"policy", Json{{"allowed_vehicles", Json::array({"car"})}}}},
                 Json{{"action", "issue"},
                      {"issuer", "owner"},
                      {"holder", "renter"},
                      {"schema", "s"},
                      {"claims", Json{{"vehicle", "V1"}}},
                      {"valid_from", 0},
                      {"valid_until", 100000},
                      {"as", "cred1"}},
                 Json{{"action", "begin_session"}, {"holder", "renter"}, {"vehicle", "car"}},
                 Json{{"action", "poll_bridge"}},
                 Json{{"action", "revoke"}, {"issuer", "owner"}, {"cred", "cred1"}},
                 Json{{"action", "attempt_access"},
                      {"vehicle", "car"},
                      {"holder", "renter"},
                      {"cred", "cred1"},
                      {"location", "x"}},
             }))
            engine.execute_step(step);
        require(engine.last_outcome() == "DENY" &&
                    engine.last_reasons() ==
                        std::vector<ReasonCode>{ReasonCode::STALE_LEDGER_VIEW},
                "bound=0: expected DENY [STALE_LEDGER_VIEW], got " + engine.last_outcome());

        engine.execute_step(Json{{"action", "poll_bridge"}});
        engine.execute_step(
            Json{{"action", "begin_session"}, {"holder", "renter"}, {"vehicle", "car"}});
        engine.execute_step(Json{{"action", "attempt_access"},
                                 {"vehicle", "car"},
                                 {"holder", "renter"},
                                 {"cred", "cred1"},
                                 {"location", "x"}});
        require(engine.last_reasons() == std::vector<ReasonCode>{ReasonCode::REVOKED},
                "bound=0: expected [REVOKED] once the bridge catches up");
    }
}

// --- criterion 3 -----------------------------------------------------------

void mutate_scalar(Json& doc, const std::string& pointer) {
    Json::json_pointer p(pointer);
    Json value = doc.at(p);
    if (value.is_string()) {
        std::string s = value.get<std::string>();
        if (s == "L") s = "R";
        else if (s == "R") s = "L";
        else s[0] = s[0] == '0' ? '1' : '0';
        doc[p] = s;
    } else if (value.is_number_unsigned()) {
        doc[p] = value.get<uint64_t>() + 1;
    } else {
        throw CheckFailure("unexpected field type at " + pointer);
    }
}

std::vector<std::string> scalar_pointers(const Json& doc, const std::string& prefix = "") {
    std::vector<std::string> out;
    if (doc.is_object()) {
        for (const auto& [key, value] : doc.items())
            for (const auto& p : scalar_pointers(value, prefix + "/" + key)) out.push_back(p);
    } else if (doc.is_array()) {
        for (size_t i = 0; i < doc.size(); ++i)
            for (const auto& p : scalar_pointers(doc[i], prefix + "/" + std::to_string(i)))
                out.push_back(p);
    } else {
        out.push_back(prefix);
    }
    return out;
}

ReasonCode expected_reason_for(const std::string& pointer) {
    if (pointer == "/metadata/cred_id") return ReasonCode::INTEGRITY;
    if (pointer == "/metadata/schema_id") return ReasonCode::ISSUER_SIG;
    if (pointer == "/metadata/issuer_did") return ReasonCode::ISSUER_SIG;
    if (pointer == "/metadata/holder_did") return ReasonCode::HOLDER_SIG;
    if (pointer == "/metadata/commitment_root") return ReasonCode::INTEGRITY;
    if (pointer == "/metadata/valid_from") return ReasonCode::ISSUER_SIG;
    if (pointer == "/metadata/valid_until") return ReasonCode::ISSUER_SIG;
    if (pointer == "/metadata/registry_id") return ReasonCode::REVOKED;
    if (pointer == "/metadata/revocation_index") return ReasonCode::ISSUER_SIG;
    if (pointer == "/issuer_signature") return ReasonCode::ISSUER_SIG;
    if (pointer == "/holder_signature") return ReasonCode::HOLDER_SIG;
    if (pointer == "/nonce") return ReasonCode::HOLDER_SIG;
    return ReasonCode::INTEGRITY;  // disclosed names, values, salts and paths
}

void criterion_3_integrity_mutations() {
    Fixture fx;
    Presentation honest = fx.presentation();
    require(fx.invoke(honest).granted(), "the unmutated presentation must grant");

    Json base = honest.to_json();
    std::vector<std::string> pointers = scalar_pointers(base);
    require(pointers.size() >= 20, "mutation surface unexpectedly small");

    size_t parse_rejections = 0;
    for (const auto& pointer : pointers) {
        Json mutated = base;
        mutate_scalar(mutated, pointer);
        Presentation candidate;
        try {
            candidate = Presentation::from_json(mutated);
        } catch (const std::exception&) {
            ++parse_rejections;  // rejected before evaluation: counts as non-GRANT
            continue;
        }
        Decision d = fx.invoke(candidate);
        require(d.outcome == "DENY", "mutation of " + pointer + " still granted");
        ReasonCode expected = expected_reason_for(pointer);
        require(has_reason(d.reasons, expected),
                "mutation of " + pointer + " missing reason " + to_string(expected));
    }
    require(parse_rejections == 0, "scalar mutations should stay parseable");
}

// --- criterion 4 -----------------------------------------------------------

void criterion_4_replay() {
    ScenarioEngine engine(config_for("c4"), 21);
    RunReport report = engine.run(scenario_file("replayed_presentation"));
    require(report.passed(), "replayed_presentation scenario failed:\n" + report.to_text());

    // Exactly one INVOKE total: the original GRANT. The replay never reached
    // the contract.
    size_t invokes = 0;
    for (uint64_t seq = 1; seq <= engine.auth_ledger().height(); ++seq)
        if (engine.auth_ledger().read(seq).kind == AuthKind::INVOKE) ++invokes;
    require(invokes == 1,
            "replay must log zero invocations; log has " + std::to_string(invokes));
}

// --- criterion 5 -----------------------------------------------------------

void criterion_5_exclusive_invocation() {
    Fixture fx;
    Presentation p = fx.presentation();
    size_t decisions_before = fx.decision_count();

    DeterministicRng rng = DeterministicRng::from_label(5, "rogues");
    for (int i = 0; i < 100; ++i) {
        std::string rogue = derive_did(generate_keypair(rng.seed32()).public_key);
        bool rejected = false;
        try {
            fx.runtime.invoke(fx.address, rogue, p, "depot", fx.car.primary_did(), 5);
        } catch (const Error& e) {
            rejected = e.code() == Errc::unauthorized;
        }
        require(rejected, "rogue caller " + rogue + " was not rejected");
    }
    require(fx.decision_count() == decisions_before,
            "rogue callers must never produce a Decision");

    // The failed attempts are still audited, decision-free.
    size_t failed = 0;
    for (uint64_t seq = 1; seq <= fx.auth.height(); ++seq) {
        AuthTxn txn = fx.auth.read(seq);
        if (txn.kind == AuthKind::INVOKE && !txn.decision) ++failed;
    }
    require(failed == 100, "expected 100 audited failed invocations");
}

// --- criterion 6 -----------------------------------------------------------

void criterion_6_accountability() {
    ScenarioConfig config = config_for("c6");
    ScenarioEngine fresh(config, 33);
    RunReport report = fresh.run(scenario_file("revoked_credential"));
    require(report.passed(), "revoked_credential scenario failed:\n" + report.to_text());
    fs::path identity_file = config.data_dir / "identity.jsonl";
    fs::path auth_file = config.data_dir / "authorization.jsonl";

    ReplayOutcome replay = replay_decisions(fresh.identity_core(), fresh.auth_ledger());
    require(replay.ok, "decision replay mismatch: " + replay.detail);
    require(replay.decisions_checked == 2, "expected two reproducible decisions");

    GenesisConfig genesis = GenesisConfig::load(config.data_dir / "genesis.json");

    // Every single-byte flip in either log must break verification at the
    // flipped line.
    auto flip_and_check = [&](const fs::path& file, bool is_identity) {
        std::string original;
        {
            std::ifstream in(file, std::ios::binary);
            original.assign((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        }
        require(!original.empty(), "log file is empty: " + file.string());

        size_t line_of_byte = 1;
        for (size_t pos = 0; pos < original.size(); ++pos) {
            std::string mutated = original;
            mutated[pos] ^= 0x01;
            {
                std::ofstream out(file, std::ios::binary | std::ios::trunc);
                out << mutated;
            }
            ChainCheck check;
            try {
                if (is_identity) {
                    IdentityLedgerCore reloaded(file, genesis, nullptr);
                    check = reloaded.verify_chain_detailed();
                } else {
                    AuthLedger reloaded(file);
                    check = reloaded.verify_chain_detailed();
                }
            } catch (const std::exception&) {
                check.ok = false;
                check.first_bad_seq = line_of_byte;
            }
            require(!check.ok, "byte flip at offset " + std::to_string(pos) + " of " +
                                   file.string() + " went undetected");
            require(check.first_bad_seq >= 1 && check.first_bad_seq <= line_of_byte,
                    "first broken link " + std::to_string(check.first_bad_seq) +
                        " reported after the flipped line " + std::to_string(line_of_byte));
            if (original[pos] == '\n') ++line_of_byte;
        }
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        out << original;
    };

    flip_and_check(identity_file, true);
    flip_and_check(auth_file, false);
}

// --- criterion 7 -----------------------------------------------------------

void criterion_7_privacy() {
    Fixture fx;
    DeterministicRng rng = DeterministicRng::from_label(7, "privacy");
    const std::vector<std::string> names = {"vehicle", "slot", "plate"};

    for (int round = 0; round < 1000; ++round) {
        std::vector<Claim> claims;
        for (const auto& name : names) claims.push_back({name, to_hex(rng.bytes(9))});
        VerifiableCredential cred =
            issue_credential(fx.owner, fx.owner.primary_did(), fx.holder.primary_did(),
                             fx.schema, claims, 0, 1000, fx.registry_id, fx.validator);
        fx.holder.store_credential(cred);

        std::vector<std::string> disclose;
        std::set<size_t> disclosed_idx;
        for (size_t i = 0; i < names.size(); ++i)
            if (rng.next_u64() % 2) {
                disclose.push_back(names[i]);
                disclosed_idx.insert(i);
            }
        Presentation p = present_credential(fx.holder, cred.metadata.cred_id, disclose,
                                            fx.holder.rng().nonce16());
        Bytes serialized = canonicalize(p.to_json());

        for (size_t i = 0; i < names.size(); ++i) {
            bool value_leaks = contains(serialized, claims[i].value);
            bool salt_leaks = contains(serialized, to_hex(cred.claim_salts[i]));
            if (disclosed_idx.count(i)) {
                require(value_leaks, "disclosed value missing from the presentation");
            } else {
                require(!value_leaks, "undisclosed value leaked in round " +
                                          std::to_string(round));
                require(!salt_leaks, "undisclosed salt leaked in round " +
                                         std::to_string(round));
            }
        }
    }

    // No CRED_HASH entry on the ledger carries any claim value.
    for (uint64_t seq = 1; seq <= fx.validator.height(); ++seq) {
        IdentityTxn txn = fx.validator.read(seq);
        if (txn.kind != TxnKind::CRED_HASH) continue;
        std::string payload = canonical_string(txn.payload);
        require(payload.find("vehicle") == std::string::npos &&
                    payload.find("08:00") == std::string::npos,
                "CRED_HASH payload mentions claim content at seq " + std::to_string(seq));
        require(payload.size() < 400, "CRED_HASH payload suspiciously large");
    }
}

// --- criterion 8 -----------------------------------------------------------

void criterion_8_pairwise_unlinkability() {
    ScenarioEngine engine(config_for("c8"), 55);
    for (const Json& step : Json::array({
             Json{{"action", "create_actor"}, {"name", "issuer1"}},
             Json{{"action", "create_actor"}, {"name", "issuer2"}},
             Json{{"action", "create_actor"}, {"name", "holder"}},
             Json{{"action", "register_did"}, {"actor", "issuer1"}},
             Json{{"action", "register_did"}, {"actor", "issuer2"}},
             Json{{"action", "publish_schema"},
                  {"issuer", "issuer1"},
                  {"name", "s1"},
                  {"claims", Json::array({"vehicle"})},
                  {"as", "s1"}},
             Json{{"action", "publish_schema"},
                  {"issuer", "issuer2"},
                  {"name", "s2"},
                  {"claims", Json::array({"vehicle"})},
                  {"as", "s2"}},
             Json{{"action", "issue"},
                  {"issuer", "issuer1"},
                  {"holder", "holder"},
                  {"schema", "s1"},
                  {"claims", Json{{"vehicle", "V1"}}},
                  {"valid_from", 0},
                  {"valid_until", 1000},
                  {"as", "from1"}},
             Json{{"action", "issue"},
                  {"issuer", "issuer2"},
                  {"holder", "holder"},
                  {"schema", "s2"},
                  {"claims", Json{{"vehicle", "V2"}}},
                  {"valid_from", 0},
                  {"valid_until", 1000},
                  {"as", "from2"}},
         }))
        engine.execute_step(step);

    Wallet& holder = engine.actor("holder");
    std::string peer1 = engine.credential_ref("from1").issuer_did;
    std::string peer2 = engine.credential_ref("from2").issuer_did;

    auto transcript_bytes = [&](const std::string& peer) {
        Bytes all;
        for (const auto* m : holder.messages_with(peer))
            all.insert(all.end(), m->body.begin(), m->body.end());
        return all;
    };
    Bytes t1 = transcript_bytes(peer1);
    Bytes t2 = transcript_bytes(peer2);
    require(!t1.empty() && !t2.empty(), "expected non-empty transcripts with both issuers");

    for (const auto& did : holder.owned_dids()) {
        bool in_first = contains(t1, did);
        bool in_second = contains(t2, did);
        require(!(in_first && in_second),
                "wallet DID " + did + " appears in both issuer transcripts");
    }
    // Each transcript names exactly one wallet-owned DID: the pairwise one.
    require(contains(t1, *holder.pairwise_did_for(engine.actor("issuer1").primary_did())),
            "transcript 1 must contain the pairwise DID for issuer1");
    require(contains(t2, *holder.pairwise_did_for(engine.actor("issuer2").primary_did())),
            "transcript 2 must contain the pairwise DID for issuer2");
}

// --- criterion 9 -----------------------------------------------------------

void criterion_9_bridge_consistency() {
    Fixture fx;
    fs::path dir = fresh_dir("c9");
    IndexStore store(dir / "store.jsonl", dir / "cursor.json");
    Indexer indexer(LedgerNode(fx.identity, NodeRole::OBSERVER), store, &fx.clock);
    BridgeHttpServer server(store, fx.observer);
    int port = server.start("127.0.0.1", 0);

    // 100 transactions submitted during active polling.
    for (int i = 0; i < 100; ++i) {
        publish_schema(fx.owner, fx.owner.primary_did(), "bulk" + std::to_string(i), {"x"},
                       fx.validator);
        if (i % 7 == 0) indexer.poll();
    }
    uint64_t cycles_before_catchup = indexer.poll_cycles();
    indexer.poll();
    if (store.head_seq() < fx.validator.height()) indexer.poll();
    require(indexer.poll_cycles() - cycles_before_catchup <= 2,
            "catch-up took more than two poll cycles");
    require(store.head_seq() == fx.validator.height(), "store is not caught up");

    httplib::Client client("127.0.0.1", port);
    for (uint64_t seq = 1; seq <= fx.validator.height(); ++seq) {
        auto res = client.Get("/api/v1/txns/" + std::to_string(seq));
        require(res && res->status == 200, "txn " + std::to_string(seq) + " not queryable");
        require(res->body == fx.validator.read_raw(seq),
                "txn " + std::to_string(seq) + " is not byte-identical over HTTP");
    }
    server.stop();

    // Randomized crash-restart: the store always equals the ledger prefix.
    DeterministicRng rng = DeterministicRng::from_label(9, "crashes");
    for (int round = 0; round < 20; ++round) {
        fs::path crash_dir = fresh_dir("c9-crash");
        uint64_t indexed_so_far = 0;
        for (int attempt = 0; attempt < 6; ++attempt) {
            IndexStore partial(crash_dir / "store.jsonl", crash_dir / "cursor.json");
            Indexer crashy(LedgerNode(fx.identity, NodeRole::OBSERVER), partial, &fx.clock);
            size_t crash_after = 1 + rng.next_u64() % 40;
            crashy.after_store = [crash_after](size_t stored) {
                if (stored >= crash_after) throw std::runtime_error("injected crash");
            };
            try {
                crashy.poll();
            } catch (const std::runtime_error&) {
            }
            indexed_so_far = partial.head_seq();
            require(indexed_so_far <= fx.validator.height(), "store ran past the ledger");
        }
        IndexStore final_store(crash_dir / "store.jsonl", crash_dir / "cursor.json");
        Indexer finisher(LedgerNode(fx.identity, NodeRole::OBSERVER), final_store, &fx.clock);
        finisher.poll();
        require(final_store.head_seq() == fx.validator.height(), "gaps after crash-restart");
        for (uint64_t seq = 1; seq <= fx.validator.height(); ++seq) {
            auto t = final_store.get(seq);
            require(t.has_value(), "missing seq " + std::to_string(seq) + " after restart");
            require(t->raw_txn == fx.validator.read_raw(seq),
                    "store bytes differ from the ledger at seq " + std::to_string(seq));
        }
    }
}

// --- criterion 10 ----------------------------------------------------------

void criterion_10_role_separation() {
    Fixture fx;
    revoke_credential(fx.owner, fx.owner.primary_did(), fx.registry_id, 0, fx.validator);

    // Writes of every kind must bounce off the observer.
    Wallet newcomer("newcomer", seed_bytes(0xb1));
    std::vector<TxnDraft> drafts = {
        make_did_reg_draft(build_document(newcomer.primary_keys().public_key),
                           newcomer.primary_keys().secret_key),
        make_schema_draft(Json{{"name", "n"}}, fx.owner.primary_did(),
                          fx.owner.primary_keys().secret_key),
        make_registry_create_draft(fx.owner.primary_did(), fx.owner.primary_keys().secret_key),
        make_revoke_draft(fx.registry_id, {0}, fx.owner.primary_did(),
                          fx.owner.primary_keys().secret_key),
    };
    for (const auto& draft : drafts) {
        bool refused = false;
        try {
            fx.observer.submit(draft, fx.anchor.endorse(draft));
        } catch (const Error& e) {
            refused = e.code() == Errc::observer_write;
        }
        require(refused, "observer accepted a write of kind " + to_string(draft.kind));
    }

    DeterministicRng rng = DeterministicRng::from_label(10, "reads");
    uint64_t height = fx.validator.height();
    std::string cred_hash = fx.credential.metadata.cred_hash().hex();
    for (int i = 0; i < 1000; ++i) {
        uint64_t seq = 1 + rng.next_u64() % height;
        require(fx.observer.read_raw(seq) == fx.validator.read_raw(seq),
                "read divergence at seq " + std::to_string(seq));
        uint64_t at = 1 + rng.next_u64() % height;
        auto v_doc = fx.validator.resolve(fx.holder.primary_did());
        auto o_doc = fx.observer.resolve(fx.holder.primary_did());
        require(v_doc.has_value() && o_doc.has_value() &&
                    canonical_string(v_doc->to_json()) == canonical_string(o_doc->to_json()),
                "resolution divergence");
        require(fx.observer.cred_hash_seq(cred_hash, at) ==
                    fx.validator.cred_hash_seq(cred_hash, at),
                "cred hash lookup divergence");
        try {
            RevocationSnapshot v = fx.validator.revocation_state(fx.registry_id, at);
            RevocationSnapshot o = fx.observer.revocation_state(fx.registry_id, at);
            require(v.revoked == o.revoked && v.state_digest == o.state_digest,
                    "revocation divergence at height " + std::to_string(at));
        } catch (const Error&) {
            // Registry not yet created at this height on either handle.
        }
    }
    require(fx.observer.height() == fx.validator.height(), "height divergence");
}

// --- criterion 11 ----------------------------------------------------------

void criterion_11_policy_oracle() {
    Fixture fx;
    // Policy universe: 3 vehicles, 2 windows, 2 required claims, 2 locations.
    std::vector<std::string> fleet = {fx.car.primary_did(), "did:sim:other1", "did:sim:other2"};
    AccessPolicy policy = AccessPolicy::make(
        {fleet[0], fleet[1], fleet[2]}, {"depot", "airport"},
        {TimeWindow{{0, 1, 2, 3, 4}, 480, 1080}, TimeWindow{{5, 6}, 600, 660}},
        {{"vehicle", "V1"}, {"slot", "*"}});
    Signature sig = sign(fx.owner.primary_keys().secret_key, canonicalize(policy.to_json()));
    fx.runtime.update_policy(fx.address, policy, sig);

    struct Toggle {
        ReasonCode code;
        std::function<void(std::string&, std::string&, uint64_t&,
                           std::vector<std::string>&)> satisfy;
        std::function<void(std::string&, std::string&, uint64_t&,
                           std::vector<std::string>&)> violate;
    };
    std::vector<Toggle> toggles = {
        {ReasonCode::VEHICLE_NOT_ALLOWED,
         [&](std::string& vehicle, std::string&, uint64_t&, std::vector<std::string>&) {
             vehicle = fx.car.primary_did();
         },
         [&](std::string& vehicle, std::string&, uint64_t&, std::vector<std::string>&) {
             vehicle = "did:sim:stranger";
         }},
        {ReasonCode::LOCATION_NOT_ALLOWED,
         [&](std::string&, std::string& location, uint64_t&, std::vector<std::string>&) {
             location = "airport";
         },
         [&](std::string&, std::string& location, uint64_t&, std::vector<std::string>&) {
             location = "garage";
         }},
        {ReasonCode::OUTSIDE_TIME_WINDOW,
         [&](std::string&, std::string&, uint64_t& time, std::vector<std::string>&) {
             time = 500;
         },
         [&](std::string&, std::string&, uint64_t& time, std::vector<std::string>&) {
             time = 100;
         }},
        {ReasonCode::CLAIM_MISMATCH,
         [&](std::string&, std::string&, uint64_t&, std::vector<std::string>& disclose) {
             disclose = {"vehicle", "slot"};
         },
         [&](std::string&, std::string&, uint64_t&, std::vector<std::string>& disclose) {
             disclose = {"vehicle"};  // required claim "slot" undisclosed
         }},
    };

    for (unsigned mask = 0; mask < (1u << toggles.size()); ++mask) {
        std::string vehicle, location;
        uint64_t time = 0;
        std::vector<std::string> disclose;
        std::vector<ReasonCode> expected;
        for (size_t i = 0; i < toggles.size(); ++i) {
            bool violate = mask & (1u << i);
            (violate ? toggles[i].violate : toggles[i].satisfy)(vehicle, location, time,
                                                                disclose);
            if (violate) expected.push_back(toggles[i].code);
        }
        expected = normalize_reasons(std::move(expected));

        Presentation p = fx.presentation(disclose);
        Decision d =
            fx.runtime.invoke(fx.address, fx.car.primary_did(), p, location, vehicle, time)
                .decision;

        bool oracle_grant = expected.empty();
        require(d.granted() == oracle_grant,
                "mask " + std::to_string(mask) + ": outcome disagrees with the oracle");
        if (oracle_grant) {
            require(d.reasons == std::vector<ReasonCode>{ReasonCode::OK},
                    "grant must carry reasons [OK]");
        } else {
            require(d.reasons == expected,
                    "mask " + std::to_string(mask) + ": reasons are not exactly the violated set");
        }
    }
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 end-to-end workflow grants and unlocks", criterion_1_end_to_end},
        {"2 revocation soundness under the freshness rule", criterion_2_revocation},
        {"3 single-field presentation mutations never grant", criterion_3_integrity_mutations},
        {"4 replayed presentations are rejected at the vehicle", criterion_4_replay},
        {"5 exclusive invocation yields zero decisions for rogues", criterion_5_exclusive_invocation},
        {"6 decisions replay bit-for-bit and byte flips are caught", criterion_6_accountability},
        {"7 selective disclosure leaks nothing undisclosed", criterion_7_privacy},
        {"8 pairwise DIDs keep issuer transcripts unlinkable", criterion_8_pairwise_unlinkability},
        {"9 bridge serves byte-identical data and survives crashes", criterion_9_bridge_consistency},
        {"10 observers reject writes and mirror validator reads", criterion_10_role_separation},
        {"11 policy engine matches the brute-force oracle", criterion_11_policy_oracle},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.run();
            std::printf("PASS  [%s]\n", criterion.name);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL  [%s] %s\n", criterion.name, e.what());
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
