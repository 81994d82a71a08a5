#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssiam/canonical.hpp"
#include "ssiam/crypto.hpp"
#include "ssiam/identity_ledger.hpp"
#include "ssiam/merkle.hpp"
#include "ssiam/reason.hpp"
#include "ssiam/view.hpp"

namespace ssiam {

class Wallet;

struct CredentialSchema {
    Digest schema_id;
    std::string name;
    std::vector<std::string> claim_names;

    static CredentialSchema make(const std::string& name,
                                 const std::vector<std::string>& claim_names);
    bool has_claim(std::string_view claim) const;

    Json to_json() const;
    static CredentialSchema from_json(const Json& j);
};

struct Claim {
    std::string name;
    std::string value;
};

using Salt = std::array<uint8_t, 16>;

// Metadata shared by a credential and every presentation of it. The issuer
// signs exactly these fields; claim values and salts never enter the bytes.
struct CredentialMetadata {
    Digest cred_id;
    Digest schema_id;
    std::string issuer_did;
    std::string holder_did;
    Digest commitment_root;
    uint64_t valid_from = 0;
    uint64_t valid_until = 0;
    std::string registry_id;  // digest hex
    uint64_t revocation_index = 0;

    Json to_json() const;
    static CredentialMetadata from_json(const Json& j);

    Bytes issuer_sign_bytes() const { return canonicalize(to_json()); }
    // The value anchored on the identity ledger by the CRED_HASH transaction.
    Digest cred_hash() const { return digest_of(to_json()); }
};

struct VerifiableCredential {
    CredentialMetadata metadata;
    Signature issuer_signature;
    std::vector<Claim> claims;
    std::vector<Salt> claim_salts;  // held by the holder, never published

    Digest commitment_root_recomputed() const;
    std::vector<Digest> leaves() const;

    Json to_json() const;
    static VerifiableCredential from_json(const Json& j);
};

struct DisclosedClaim {
    std::string name;
    std::string value;
    Salt salt{};
    std::vector<PathNode> path;

    Json to_json() const;
    static DisclosedClaim from_json(const Json& j);
};

struct Presentation {
    CredentialMetadata metadata;
    Signature issuer_signature;
    std::vector<DisclosedClaim> disclosed;
    std::array<uint8_t, 16> nonce{};
    Signature holder_signature;

    Bytes holder_sign_bytes() const;
    Json to_json() const;
    static Presentation from_json(const Json& j);
};

struct VerificationReport {
    bool issuer_sig_ok = false;
    bool holder_sig_ok = false;
    bool integrity_ok = false;
    bool not_revoked = false;
    bool not_expired = false;
    uint64_t checked_at_seq = 0;
    std::vector<ReasonCode> failure_reasons;

    bool all_ok() const {
        return issuer_sig_ok && holder_sig_ok && integrity_ok && not_revoked && not_expired;
    }
};

// Phase-one credential verification against a pinned identity view. Failures
// land in the report, never in exceptions.
VerificationReport verify_presentation(const Presentation& presentation, const IdentityView& view,
                                       uint64_t now);

// Issuance and registry operations. All ledger writes go through the
// validator handle passed in.
CredentialSchema publish_schema(Wallet& issuer, const std::string& issuer_did,
                                const std::string& name,
                                const std::vector<std::string>& claim_names,
                                LedgerNode& validator);

std::optional<CredentialSchema> find_schema(const LedgerNode& node, const Digest& schema_id);

std::string create_revocation_registry(Wallet& issuer, const std::string& issuer_did,
                                       LedgerNode& validator);

VerifiableCredential issue_credential(Wallet& issuer, const std::string& issuer_did,
                                      const std::string& holder_did,
                                      const CredentialSchema& schema,
                                      const std::vector<Claim>& claims, uint64_t valid_from,
                                      uint64_t valid_until, const std::string& registry_id,
                                      LedgerNode& validator);

Presentation present_credential(const Wallet& holder, const Digest& cred_id,
                                const std::vector<std::string>& disclosed_names,
                                const std::array<uint8_t, 16>& nonce);

// Idempotent by revoked-index set: returns nullopt when the index was already
// revoked and no ledger write was needed.
std::optional<Receipt> revoke_credential(Wallet& issuer, const std::string& issuer_did,
                                         const std::string& registry_id, uint64_t revocation_index,
                                         LedgerNode& validator);

}  // namespace ssiam
