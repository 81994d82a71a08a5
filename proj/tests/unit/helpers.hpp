#pragma once

#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <memory>
#include <string>

#include "ssiam/authorization.hpp"
#include "ssiam/credential.hpp"
#include "ssiam/identity_ledger.hpp"
#include "ssiam/rng.hpp"
#include "ssiam/view.hpp"
#include "ssiam/wallet.hpp"

namespace ssiam::test {

inline std::filesystem::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("ssiam-test-" + std::to_string(::getpid()) + "-" + tag + "-" +
                std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::array<uint8_t, 32> seed_bytes(uint8_t fill) {
    std::array<uint8_t, 32> s{};
    s.fill(fill);
    return s;
}

// Identity stack without the HTTP bridge: genesis anchor, shared core,
// validator and observer handles.
struct TestEnv {
    LogicalClock clock;
    Endorser anchor = Endorser::from_seed(seed_bytes(0xaa));
    std::filesystem::path dir = fresh_dir("env");
    std::shared_ptr<IdentityLedgerCore> core = std::make_shared<IdentityLedgerCore>(
        dir / "identity.jsonl", GenesisConfig{{anchor.anchor()}}, &clock);
    LedgerNode validator{core, NodeRole::VALIDATOR};
    LedgerNode observer{core, NodeRole::OBSERVER};

    Wallet make_registered_wallet(const std::string& label, uint8_t fill) {
        Wallet w(label, seed_bytes(fill));
        w.register_primary_did(validator, anchor);
        return w;
    }
};

// Authorization stack over the TestEnv with a direct (bridge-free) identity
// view pinned at the live head.
struct AuthEnv : TestEnv {
    AuthLedger auth{dir / "authorization.jsonl"};
    AuthorizationRuntime runtime{auth,
                                 [this] { return std::make_shared<DirectIdentityView>(*core); },
                                 2};
};

// Issues a ready-to-present credential: registered issuer and holder,
// published schema, live registry.
struct IssuedCredential {
    CredentialSchema schema;
    std::string registry_id;
    VerifiableCredential credential;
};

inline IssuedCredential issue_simple(TestEnv& env, Wallet& issuer, Wallet& holder,
                                     const std::vector<Claim>& claims, uint64_t valid_from = 0,
                                     uint64_t valid_until = 1000000) {
    std::vector<std::string> names;
    for (const auto& c : claims) names.push_back(c.name);
    IssuedCredential out;
    out.schema = publish_schema(issuer, issuer.primary_did(), "schema-" + issuer.label(), names,
                                env.validator);
    out.registry_id = create_revocation_registry(issuer, issuer.primary_did(), env.validator);
    out.credential =
        issue_credential(issuer, issuer.primary_did(), holder.primary_did(), out.schema, claims,
                         valid_from, valid_until, out.registry_id, env.validator);
    holder.store_credential(out.credential);
    return out;
}

inline bool contains_bytes(const Bytes& haystack, const std::string& needle) {
    if (needle.empty()) return true;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

}  // namespace ssiam::test
