#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "ssiam/errors.hpp"
#include "ssiam/identity_ledger.hpp"

using namespace ssiam;
using test::TestEnv;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::io_error;
}

}  // namespace

TEST_CASE("anchor-endorsed registration lands at seq_no 1") {
    TestEnv env;
    Wallet owner("owner", test::seed_bytes(0x01));
    TxnDraft draft = make_did_reg_draft(build_document(owner.primary_keys().public_key),
                                        owner.primary_keys().secret_key);
    Receipt r = env.validator.submit(draft, env.anchor.endorse(draft));
    CHECK(r.seq_no == 1);
    CHECK(env.validator.read(1).kind == TxnKind::DID_REG);
    CHECK(env.validator.resolve_did(owner.primary_did()).id == owner.primary_did());
}

TEST_CASE("the ledger is a log: resubmission appends, resolution returns latest") {
    TestEnv env;
    Wallet owner("owner", test::seed_bytes(0x01));
    TxnDraft draft = make_did_reg_draft(build_document(owner.primary_keys().public_key),
                                        owner.primary_keys().secret_key);
    Receipt first = env.validator.submit(draft, env.anchor.endorse(draft));
    Receipt second = env.validator.submit(draft, env.anchor.endorse(draft));
    CHECK(second.seq_no == first.seq_no + 1);

    // Rotation: same DID, extra key, authentication moved. Latest must win,
    // matching a sequential replay of the log.
    KeyPair extra = generate_keypair(test::seed_bytes(0x44));
    DidDocument rotated = build_document(
        {{"key-1", owner.primary_keys().public_key}, {"key-2", extra.public_key}},
        {"key-1", "key-2"});
    TxnDraft rotation = make_did_reg_draft(rotated, owner.primary_keys().secret_key);
    env.validator.submit(rotation);

    // Oracle: replay the log sequentially, keeping the last matching payload.
    Json expected;
    for (uint64_t seq = 1; seq <= env.validator.height(); ++seq) {
        IdentityTxn txn = env.validator.read(seq);
        if (txn.kind == TxnKind::DID_REG &&
            txn.payload.at("document").at("id").get<std::string>() == owner.primary_did())
            expected = txn.payload.at("document");
    }
    CHECK(canonical_string(env.validator.resolve_did(owner.primary_did()).to_json()) ==
          canonical_string(expected));
    CHECK(env.validator.resolve_did(owner.primary_did()).public_keys.size() == 2);

    // Historical view still answers with the original document.
    CHECK(env.validator.resolve_did(owner.primary_did(), first.seq_no).public_keys.size() == 1);
}

TEST_CASE("registration without endorsement is refused") {
    TestEnv env;
    Wallet owner("owner", test::seed_bytes(0x02));
    TxnDraft draft = make_did_reg_draft(build_document(owner.primary_keys().public_key),
                                        owner.primary_keys().secret_key);
    CHECK(code_of([&] { env.validator.submit(draft); }) == Errc::missing_endorsement);

    // Endorsement by someone who is not a genesis anchor fails too.
    Endorser impostor = Endorser::from_seed(test::seed_bytes(0x77));
    CHECK(code_of([&] { env.validator.submit(draft, impostor.endorse(draft)); }) ==
          Errc::missing_endorsement);
}

TEST_CASE("reads are exact and range-checked, and the chain law holds") {
    TestEnv env;
    Wallet owner = env.make_registered_wallet("owner", 0x03);
    publish_schema(owner, owner.primary_did(), "s", {"a"}, env.validator);
    create_revocation_registry(owner, owner.primary_did(), env.validator);

    CHECK(env.validator.read(1).seq_no == 1);
    CHECK(code_of([&] { env.validator.read(env.validator.height() + 1); }) == Errc::out_of_range);
    CHECK(code_of([&] { env.validator.read(0); }) == Errc::out_of_range);

    for (uint64_t seq = 2; seq <= env.validator.height(); ++seq)
        CHECK(env.validator.read(seq).prev_hash == env.validator.read(seq - 1).txn_hash);
    CHECK(env.validator.read(1).prev_hash == Digest::zero());
}

TEST_CASE("unknown submitters and bad signatures are refused") {
    TestEnv env;
    Wallet ghost("ghost", test::seed_bytes(0x04));
    TxnDraft schema = make_schema_draft(Json{{"name", "x"}}, ghost.primary_did(),
                                        ghost.primary_keys().secret_key);
    CHECK(code_of([&] { env.validator.submit(schema); }) == Errc::unknown_submitter);

    Wallet owner = env.make_registered_wallet("owner", 0x05);
    TxnDraft forged = make_schema_draft(Json{{"name", "x"}}, owner.primary_did(),
                                        ghost.primary_keys().secret_key);
    CHECK(code_of([&] { env.validator.submit(forged); }) == Errc::bad_signature);
}

TEST_CASE("revocation registry state replays correctly, including history") {
    TestEnv env;
    Wallet issuer = env.make_registered_wallet("issuer", 0x06);
    Wallet holder = env.make_registered_wallet("holder", 0x07);
    auto issued = test::issue_simple(env, issuer, holder, {{"vehicle", "V1"}});

    RevocationSnapshot fresh = env.validator.revocation_state(issued.registry_id);
    CHECK(fresh.revoked.empty());
    CHECK(fresh.issued_count == 1);
    CHECK(fresh.issuer_did == issuer.primary_did());

    uint64_t before_revoke = env.validator.height();
    issue_credential(issuer, issuer.primary_did(), holder.primary_did(), issued.schema,
                     {{"vehicle", "V2"}}, 0, 10, issued.registry_id, env.validator);
    revoke_credential(issuer, issuer.primary_did(), issued.registry_id, 0, env.validator);

    RevocationSnapshot now = env.validator.revocation_state(issued.registry_id);
    CHECK(now.revoked == std::set<uint64_t>{0});
    CHECK(now.issued_count == 2);
    CHECK(now.state_digest != fresh.state_digest);

    // Historical query replays only the prefix: oracle = fresh snapshot.
    RevocationSnapshot historical =
        env.validator.revocation_state(issued.registry_id, before_revoke);
    CHECK(historical.revoked.empty());
    CHECK(historical.state_digest == fresh.state_digest);

    CHECK(code_of([&] { env.validator.revocation_state("ff", {}); }) == Errc::unknown_registry);
    CHECK(code_of([&] {
              env.validator.revocation_state(issued.registry_id, env.validator.height() + 5);
          }) == Errc::out_of_range);
}

TEST_CASE("verify_chain detects a flipped byte in the stored log") {
    TestEnv env;
    CHECK(env.validator.verify_chain());  // genesis only

    Wallet owner = env.make_registered_wallet("owner", 0x08);
    publish_schema(owner, owner.primary_did(), "one", {"a"}, env.validator);
    publish_schema(owner, owner.primary_did(), "two", {"a"}, env.validator);
    publish_schema(owner, owner.primary_did(), "three", {"a"}, env.validator);
    publish_schema(owner, owner.primary_did(), "four", {"a"}, env.validator);
    CHECK(env.validator.height() == 5);
    CHECK(env.validator.verify_chain());

    // Flip one byte of entry 2 on disk and reload.
    auto log_file = env.dir / "identity.jsonl";
    std::string content;
    {
        std::ifstream in(log_file);
        content.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
    size_t second_line = content.find('\n') + 1;
    size_t flip = content.find("\"payload\"", second_line);
    REQUIRE(flip != std::string::npos);
    content[flip + 1] ^= 0x02;
    {
        std::ofstream out(log_file, std::ios::trunc);
        out << content;
    }
    IdentityLedgerCore reloaded(log_file, GenesisConfig{{env.anchor.anchor()}}, &env.clock);
    CHECK_FALSE(reloaded.verify_chain());
    ChainCheck check = reloaded.verify_chain_detailed();
    CHECK(check.first_bad_seq == 2);
}

TEST_CASE("append-only property over random submit sequences") {
    TestEnv env;
    Wallet owner = env.make_registered_wallet("owner", 0x09);
    std::string registry = create_revocation_registry(owner, owner.primary_did(), env.validator);
    auto schema = publish_schema(owner, owner.primary_did(), "prop", {"c"}, env.validator);

    DeterministicRng rng = DeterministicRng::from_label(41, "ledger-prop");
    std::vector<std::string> snapshot;
    uint64_t issued = 0;
    for (int i = 0; i < 40; ++i) {
        switch (rng.next_u64() % 3) {
            case 0:
                publish_schema(owner, owner.primary_did(), "s" + std::to_string(i), {"c"},
                               env.validator);
                break;
            case 1:
                issue_credential(owner, owner.primary_did(), owner.primary_did(), schema,
                                 {{"c", to_hex(rng.bytes(4))}}, 0, 10, registry, env.validator);
                ++issued;
                break;
            default:
                if (issued > 0)
                    revoke_credential(owner, owner.primary_did(), registry,
                                      rng.next_u64() % issued, env.validator);
        }
        // Every earlier snapshot must be a byte-identical prefix.
        for (size_t k = 0; k < snapshot.size(); ++k)
            CHECK(env.validator.read_raw(k + 1) == snapshot[k]);
        snapshot.clear();
        for (uint64_t seq = 1; seq <= env.validator.height(); ++seq)
            snapshot.push_back(env.validator.read_raw(seq));
        CHECK(env.validator.verify_chain());
    }
}

TEST_CASE("observers refuse writes and answer reads exactly like the validator") {
    TestEnv env;
    Wallet owner = env.make_registered_wallet("owner", 0x0a);
    Wallet holder = env.make_registered_wallet("holder", 0x0b);
    auto issued = test::issue_simple(env, owner, holder, {{"vehicle", "V1"}, {"slot", "am"}});
    revoke_credential(owner, owner.primary_did(), issued.registry_id, 0, env.validator);

    TxnDraft draft = make_schema_draft(Json{{"name", "nope"}}, owner.primary_did(),
                                       owner.primary_keys().secret_key);
    CHECK(code_of([&] { env.observer.submit(draft); }) == Errc::observer_write);

    DeterministicRng rng = DeterministicRng::from_label(42, "observer-reads");
    uint64_t height = env.validator.height();
    CHECK(env.observer.height() == height);
    for (int i = 0; i < 1000; ++i) {
        uint64_t seq = 1 + rng.next_u64() % height;
        CHECK(env.observer.read_raw(seq) == env.validator.read_raw(seq));
        uint64_t at = 1 + rng.next_u64() % height;
        CHECK(env.observer.resolve(owner.primary_did()).has_value() ==
              env.validator.resolve(owner.primary_did()).has_value());
        try {
            auto v = env.validator.revocation_state(issued.registry_id, at);
            auto o = env.observer.revocation_state(issued.registry_id, at);
            CHECK(o.revoked == v.revoked);
            CHECK(o.state_digest == v.state_digest);
        } catch (const Error&) {
            CHECK_THROWS(env.observer.revocation_state(issued.registry_id, at));
        }
    }
}

TEST_CASE("reopening the log yields byte-identical entries") {
    TestEnv env;
    Wallet owner = env.make_registered_wallet("owner", 0x0c);
    publish_schema(owner, owner.primary_did(), "durable", {"a"}, env.validator);

    IdentityLedgerCore reopened(env.dir / "identity.jsonl", GenesisConfig{{env.anchor.anchor()}},
                                &env.clock);
    CHECK(reopened.height() == env.validator.height());
    for (uint64_t seq = 1; seq <= reopened.height(); ++seq)
        CHECK(reopened.read_raw(seq) == env.validator.read_raw(seq));
    CHECK(reopened.verify_chain());
}
