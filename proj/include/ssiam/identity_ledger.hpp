#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssiam/canonical.hpp"
#include "ssiam/clock.hpp"
#include "ssiam/crypto.hpp"
#include "ssiam/did.hpp"

namespace ssiam {

enum class TxnKind { DID_REG, SCHEMA, CRED_HASH, REVOC_UPDATE };

std::string to_string(TxnKind kind);
TxnKind txn_kind_from_string(const std::string& s);

struct IdentityTxn {
    uint64_t seq_no = 0;
    TxnKind kind = TxnKind::DID_REG;
    Json payload;
    std::string submitter_did;
    Signature submitter_sig;
    Digest prev_hash;
    Digest txn_hash;
    uint64_t timestamp = 0;

    Json to_json() const;
    Json hash_view() const;  // entry without txn_hash
    static IdentityTxn from_json(const Json& j);

    // Bytes the submitter signs: kind, payload and submitter identity only,
    // so a draft can be signed before its position in the log is known.
    static Bytes sign_bytes(TxnKind kind, const Json& payload, const std::string& submitter_did);
};

struct TxnDraft {
    TxnKind kind = TxnKind::DID_REG;
    Json payload;
    std::string submitter_did;
    Signature submitter_sig;

    Bytes sign_bytes() const { return IdentityTxn::sign_bytes(kind, payload, submitter_did); }
};

struct Endorsement {
    std::string anchor_did;
    Signature signature;  // over the draft's sign_bytes
};

struct TrustAnchor {
    std::string did;
    PublicKey key;
};

struct GenesisConfig {
    std::vector<TrustAnchor> trust_anchors;

    Json to_json() const;
    static GenesisConfig from_json(const Json& j);  // throws on empty anchor list
    void save(const std::filesystem::path& file) const;
    static GenesisConfig load(const std::filesystem::path& file);
};

struct Receipt {
    uint64_t seq_no = 0;
    Digest txn_hash;
};

enum class NodeRole { VALIDATOR, OBSERVER };

struct RevocationSnapshot {
    std::string registry_id;  // digest hex
    std::string issuer_did;
    std::set<uint64_t> revoked;
    Digest state_digest;
    uint64_t issued_count = 0;  // CRED_HASH entries bound to this registry
};

struct ChainCheck {
    bool ok = true;
    uint64_t first_bad_seq = 0;
    std::string detail;
};

std::string revocation_registry_id(const std::string& issuer_did, uint64_t creation_seq);

// Single-process simulation of the identity chain: one durable JSON-Lines
// log shared by validator and observer handles. Submissions are totally
// ordered; reads see the committed prefix.
class IdentityLedgerCore {
public:
    // Creates the log file if missing, otherwise replays it.
    IdentityLedgerCore(std::filesystem::path log_file, GenesisConfig genesis,
                       const LogicalClock* clock);

    const GenesisConfig& genesis() const { return genesis_; }

    Receipt append(const TxnDraft& draft, const std::optional<Endorsement>& endorsement);

    uint64_t height() const { return entries_.size(); }
    IdentityTxn read(uint64_t seq_no) const;           // throws Errc::out_of_range
    const std::string& read_raw(uint64_t seq_no) const;  // stored line, byte-exact

    bool did_registered(const std::string& did, std::optional<uint64_t> at_seq = {}) const;
    std::optional<DidDocument> try_resolve_did(const std::string& did,
                                               std::optional<uint64_t> at_seq = {}) const;
    DidDocument resolve_did(const std::string& did, std::optional<uint64_t> at_seq = {}) const;

    RevocationSnapshot revocation_state(const std::string& registry_id,
                                        std::optional<uint64_t> at_seq = {}) const;
    std::optional<uint64_t> cred_hash_seq(const std::string& cred_hash_hex,
                                          std::optional<uint64_t> at_seq = {}) const;

    bool verify_chain() const { return verify_chain_detailed().ok; }
    ChainCheck verify_chain_detailed() const;

private:
    struct Entry {
        IdentityTxn txn;
        std::string raw;
        bool parse_ok = true;
    };

    void replay_file();
    void persist(const Entry& entry);
    void validate(const TxnDraft& draft, const std::optional<Endorsement>& endorsement) const;
    std::optional<PublicKey> anchor_key(const std::string& did) const;
    bool signature_by_registered_key(const std::string& did, const Bytes& msg,
                                     const Signature& sig) const;

    std::filesystem::path log_file_;
    GenesisConfig genesis_;
    const LogicalClock* clock_;
    std::vector<Entry> entries_;
    std::ofstream out_;
};

// Role handle over a shared core. Only VALIDATOR accepts writes; both roles
// answer reads from the same committed log.
class LedgerNode : public DidResolver {
public:
    LedgerNode(std::shared_ptr<IdentityLedgerCore> core, NodeRole role)
        : core_(std::move(core)), role_(role) {}

    NodeRole role() const { return role_; }

    Receipt submit(const TxnDraft& draft, const std::optional<Endorsement>& endorsement = {});

    uint64_t height() const { return core_->height(); }
    IdentityTxn read(uint64_t seq_no) const { return core_->read(seq_no); }
    const std::string& read_raw(uint64_t seq_no) const { return core_->read_raw(seq_no); }
    DidDocument resolve_did(const std::string& did, std::optional<uint64_t> at_seq = {}) const {
        return core_->resolve_did(did, at_seq);
    }
    RevocationSnapshot revocation_state(const std::string& registry_id,
                                        std::optional<uint64_t> at_seq = {}) const {
        return core_->revocation_state(registry_id, at_seq);
    }
    std::optional<uint64_t> cred_hash_seq(const std::string& hex,
                                          std::optional<uint64_t> at_seq = {}) const {
        return core_->cred_hash_seq(hex, at_seq);
    }
    bool verify_chain() const { return core_->verify_chain(); }
    ChainCheck verify_chain_detailed() const { return core_->verify_chain_detailed(); }

    std::optional<DidDocument> resolve(const std::string& did) const override {
        return core_->try_resolve_did(did);
    }

    IdentityLedgerCore& core() { return *core_; }
    const IdentityLedgerCore& core() const { return *core_; }

private:
    std::shared_ptr<IdentityLedgerCore> core_;
    NodeRole role_;
};

// Draft builders used by wallets and the credential engine.
TxnDraft make_did_reg_draft(const DidDocument& doc, const SecretKey& signing_key);
TxnDraft make_schema_draft(const Json& schema, const std::string& submitter_did,
                           const SecretKey& signing_key);
TxnDraft make_cred_hash_draft(const std::string& cred_hash_hex, const std::string& registry_id,
                              uint64_t revocation_index, const std::string& submitter_did,
                              const SecretKey& signing_key);
TxnDraft make_registry_create_draft(const std::string& issuer_did, const SecretKey& signing_key);
TxnDraft make_revoke_draft(const std::string& registry_id, const std::set<uint64_t>& indices,
                           const std::string& submitter_did, const SecretKey& signing_key);

}  // namespace ssiam
