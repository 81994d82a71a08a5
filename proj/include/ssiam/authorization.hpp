#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssiam/credential.hpp"
#include "ssiam/policy.hpp"
#include "ssiam/view.hpp"

namespace ssiam {

enum class AuthKind { DEPLOY, UPDATE_POLICY, INVOKE };

std::string to_string(AuthKind kind);
AuthKind auth_kind_from_string(const std::string& s);

struct Decision {
    std::string outcome;  // "GRANT" | "DENY"
    std::vector<ReasonCode> reasons;
    uint64_t checked_at_seq = 0;
    uint64_t decided_at = 0;

    bool granted() const { return outcome == "GRANT"; }

    Json to_json() const;
    static Decision from_json(const Json& j);
};

struct AuthTxn {
    uint64_t seq_no = 0;
    AuthKind kind = AuthKind::DEPLOY;
    std::string contract_address;  // digest hex
    std::string caller_did;
    Json payload;
    std::optional<Decision> decision;  // INVOKE with an evaluated outcome only
    Digest prev_hash;
    Digest txn_hash;

    Json to_json() const;
    Json hash_view() const;
    static AuthTxn from_json(const Json& j);
};

// The authorization chain: an append-only JSON-Lines log with the same hash
// discipline as the identity ledger. Every deploy, policy update and
// invocation lands here in one total order.
class AuthLedger {
public:
    explicit AuthLedger(std::filesystem::path log_file);

    Receipt append(AuthKind kind, const std::string& contract_address,
                   const std::string& caller_did, Json payload, std::optional<Decision> decision);

    uint64_t height() const { return entries_.size(); }
    AuthTxn read(uint64_t seq_no) const;
    const std::string& read_raw(uint64_t seq_no) const;
    ChainCheck verify_chain_detailed() const;
    bool verify_chain() const { return verify_chain_detailed().ok; }

private:
    struct Entry {
        AuthTxn txn;
        std::string raw;
        bool parse_ok = true;
    };

    void replay_file();

    std::filesystem::path log_file_;
    std::vector<Entry> entries_;
    std::ofstream out_;
};

struct VerifierContract {
    std::string address;
    std::string owner_did;
    AccessPolicy policy;
    std::set<std::string> allowed_invokers;  // owner plus its vehicles
    bool active = true;
};

// Everything an invocation's outcome depends on besides contract state and
// the presentation itself. Logged with the INVOKE transaction so a decision
// can be recomputed bit-for-bit later.
struct InvokeContext {
    std::string vehicle_did;
    std::string location;
    uint64_t time = 0;
    bool view_available = false;
    uint64_t view_head = 0;
    std::optional<uint64_t> ledger_height;
    uint64_t freshness_bound = 0;

    bool stale() const;

    Json to_json() const;
    static InvokeContext from_json(const Json& j);
};

// The two-phase verdict: credential verification against the pinned view,
// then policy evaluation, deny-overrides. Pure in its arguments; `view` must
// be pinned at context.view_head and may be null only when the context is
// stale or unavailable.
Decision decide(const VerifierContract& contract, const Presentation& presentation,
                const InvokeContext& context, const IdentityView* view);

void apply_auth_txn(std::map<std::string, VerifierContract>& contracts, const AuthTxn& txn);

class AuthorizationRuntime {
public:
    // Fresh identity view per decision; throws Errc::view_unavailable when
    // the bridge cannot be reached.
    using ViewProvider = std::function<std::shared_ptr<IdentityView>()>;

    AuthorizationRuntime(AuthLedger& log, ViewProvider provider, uint64_t freshness_bound = 2);

    std::string deploy(const std::string& owner_did, const AccessPolicy& policy,
                       const std::vector<std::string>& vehicle_dids);
    Receipt update_policy(const std::string& address, const AccessPolicy& policy,
                          const Signature& owner_signature);

    struct Invocation {
        Decision decision;
        Receipt receipt;
    };
    // Throws Errc::unauthorized for callers outside allowed_invokers; the
    // attempt is still logged as an INVOKE entry without a decision.
    Invocation invoke(const std::string& address, const std::string& caller_did,
                      const Presentation& presentation, const std::string& location,
                      const std::string& vehicle_did, uint64_t now);

    Decision read_decision(const Receipt& receipt) const;
    std::vector<AuthTxn> audit_log(const std::optional<std::string>& address = {}) const;
    const VerifierContract& contract(const std::string& address) const;
    bool has_contract(const std::string& address) const { return contracts_.count(address) > 0; }

    uint64_t freshness_bound() const { return freshness_bound_; }
    AuthLedger& ledger() { return log_; }

private:
    AuthLedger& log_;
    ViewProvider provider_;
    uint64_t freshness_bound_;
    std::map<std::string, VerifierContract> contracts_;
};

}  // namespace ssiam
