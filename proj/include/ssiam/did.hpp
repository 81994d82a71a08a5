#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssiam/canonical.hpp"
#include "ssiam/crypto.hpp"

namespace ssiam {

inline constexpr std::string_view kDidPrefix = "did:sim:";

// "did:sim:" + base32(first 16 bytes of sha256(public key)), 26 chars.
std::string derive_did(const PublicKey& pk);
bool looks_like_did(std::string_view s);

struct DidKey {
    std::string key_id;
    PublicKey key;
};

struct ServiceEndpoint {
    std::string type;
    std::string endpoint;
};

struct DidDocument {
    std::string id;
    std::vector<DidKey> public_keys;
    std::vector<std::string> authentication;
    std::vector<ServiceEndpoint> service_endpoints;

    std::optional<PublicKey> key_by_id(std::string_view key_id) const;
    std::vector<PublicKey> authentication_keys() const;

    Json to_json() const;
    static DidDocument from_json(const Json& j);  // validates invariants
};

// Builds a document whose id derives from the first key. Throws
// Errc::invalid_document on an empty key list or an authentication entry
// that names no listed key.
DidDocument build_document(const std::vector<DidKey>& keys,
                           const std::vector<std::string>& authentication,
                           const std::vector<ServiceEndpoint>& service_endpoints = {});

// Convenience: single-key document authenticated by that key.
DidDocument build_document(const PublicKey& key,
                           const std::vector<ServiceEndpoint>& service_endpoints = {});

struct DidResolver {
    virtual ~DidResolver() = default;
    virtual std::optional<DidDocument> resolve(const std::string& did) const = 0;
};

struct Challenge {
    std::array<uint8_t, 16> nonce{};
    std::string challenger_did;
    std::string responder_did;
    uint64_t issued_at = 0;
    uint64_t ttl = 0;

    bool expired_at(uint64_t now) const { return now > issued_at + ttl; }

    Json to_json() const;
    static Challenge from_json(const Json& j);
};

struct ControlProof {
    Signature signature;  // over canonical(challenge)
};

ControlProof prove_control(const Challenge& challenge, const SecretKey& sk);
bool verify_control(const Challenge& challenge, const ControlProof& proof,
                    const DidDocument& doc);

// Single-use nonce tracking. Entries expire so the cache stays bounded; an
// expired challenge is already rejected by its ttl before the cache is asked.
class NonceCache {
public:
    // Returns false when the nonce was already accepted and has not expired.
    bool accept(const std::array<uint8_t, 16>& nonce, uint64_t now, uint64_t expires_at);

    bool seen(const std::array<uint8_t, 16>& nonce, uint64_t now) const;

private:
    mutable std::map<std::string, uint64_t> used_;  // nonce hex -> expires_at

    void prune(uint64_t now) const;
};

struct AuthenticatedChannel {
    Digest session_id;  // digest over both DIDs and both nonces
    std::array<std::string, 2> peer_dids;  // initiator, responder
    uint64_t established_at = 0;
};

}  // namespace ssiam
