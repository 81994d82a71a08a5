#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssiam/credential.hpp"
#include "ssiam/did.hpp"
#include "ssiam/identity_ledger.hpp"
#include "ssiam/rng.hpp"

namespace ssiam {

// Genesis trust anchor with its signing key; endorses DID registrations.
struct Endorser {
    std::string did;
    KeyPair keys;

    static Endorser from_seed(std::span<const uint8_t> seed);
    Endorsement endorse(const TxnDraft& draft) const;
    TrustAnchor anchor() const { return TrustAnchor{did, keys.public_key}; }
};

struct Relation {
    std::string peer_did;
    std::string local_did;
    KeyPair keys;
};

struct MessageRecord {
    std::string direction;  // "in" | "out"
    std::string peer_did;
    Bytes body;
    uint64_t time = 0;
};

// Per-actor store of DIDs, keys, credentials and exchanged messages. All key
// material derives from the master seed, so a wallet rebuilt from the same
// seed controls the same identities.
class Wallet {
public:
    Wallet(std::string owner_label, std::array<uint8_t, 32> master_seed);

    const std::string& label() const { return label_; }

    const KeyPair& primary_keys() const { return primary_; }
    const std::string& primary_did() const { return primary_did_; }

    Receipt register_primary_did(LedgerNode& validator, const Endorser& endorser);

    // Derives (deterministically), registers and records a relation-specific
    // DID for the peer. Repeat calls for the same peer return the same DID.
    std::string create_pairwise_did(const std::string& peer_did, LedgerNode& validator,
                                    const Endorser& endorser);
    std::optional<std::string> pairwise_did_for(const std::string& peer_did) const;
    const std::vector<Relation>& relations() const { return relations_; }

    const KeyPair* key_for(const std::string& did) const;
    std::vector<std::string> owned_dids() const;

    void store_credential(const VerifiableCredential& credential);  // Errc::foreign_holder
    const VerifiableCredential& credential(const Digest& cred_id) const;
    std::vector<VerifiableCredential> credentials() const;

    void log_message(const std::string& direction, const std::string& peer_did, Bytes body,
                     uint64_t time);
    const std::vector<MessageRecord>& message_log() const { return messages_; }
    std::vector<const MessageRecord*> messages_with(const std::string& peer_did) const;

    DeterministicRng& rng() { return rng_; }
    NonceCache& nonce_cache() { return nonces_; }

    // Versioned envelope: magic "SSIW", version, pwhash salt, secretbox.
    Bytes export_encrypted(const std::string& passphrase) const;
    static Wallet import_encrypted(std::span<const uint8_t> envelope,
                                   const std::string& passphrase);

    Json to_json() const;
    static Wallet from_json(const Json& j);

private:
    std::string label_;
    std::array<uint8_t, 32> master_seed_{};
    KeyPair primary_;
    std::string primary_did_;
    std::vector<Relation> relations_;
    std::map<std::string, VerifiableCredential> credentials_;  // keyed by cred_id hex
    std::vector<MessageRecord> messages_;
    DeterministicRng rng_;
    NonceCache nonces_;
};

}  // namespace ssiam
