#include "ssiam/did.hpp"

#include <algorithm>

#include "ssiam/errors.hpp"

namespace ssiam {

std::string derive_did(const PublicKey& pk) {
    Digest d = digest(pk.bytes);
    std::span<const uint8_t> head(d.bytes.data(), 16);
    return std::string(kDidPrefix) + base32_encode(head);
}

bool looks_like_did(std::string_view s) {
    if (!s.starts_with(kDidPrefix)) return false;
    std::string_view id = s.substr(kDidPrefix.size());
    if (id.size() != 26) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '2' && c <= '7');
    });
}

std::optional<PublicKey> DidDocument::key_by_id(std::string_view key_id) const {
    for (const auto& k : public_keys)
        if (k.key_id == key_id) return k.key;
    return std::nullopt;
}

std::vector<PublicKey> DidDocument::authentication_keys() const {
    std::vector<PublicKey> out;
    for (const auto& id : authentication)
        if (auto k = key_by_id(id)) out.push_back(*k);
    return out;
}

Json DidDocument::to_json() const {
    Json keys = Json::array();
    for (const auto& k : public_keys)
        keys.push_back({{"key_id", k.key_id}, {"public_key", k.key.hex()}});
    Json endpoints = Json::array();
    for (const auto& e : service_endpoints)
        endpoints.push_back({{"type", e.type}, {"endpoint", e.endpoint}});
    return Json{{"id", id},
                {"public_keys", keys},
                {"authentication", authentication},
                {"service_endpoints", endpoints}};
}

DidDocument DidDocument::from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("public_keys"))
        fail(Errc::invalid_document, "missing id or public_keys");
    std::vector<DidKey> keys;
    for (const auto& k : j.at("public_keys"))
        keys.push_back({k.at("key_id").get<std::string>(),
                        PublicKey::from_hex(k.at("public_key").get<std::string>())});
    std::vector<std::string> auth;
    if (j.contains("authentication")) auth = j.at("authentication").get<std::vector<std::string>>();
    std::vector<ServiceEndpoint> endpoints;
    if (j.contains("service_endpoints"))
        for (const auto& e : j.at("service_endpoints"))
            endpoints.push_back(
                {e.at("type").get<std::string>(), e.at("endpoint").get<std::string>()});
    DidDocument doc = build_document(keys, auth, endpoints);
    if (doc.id != j.at("id").get<std::string>())
        fail(Errc::invalid_document, "id does not derive from the first listed key");
    return doc;
}

DidDocument build_document(const std::vector<DidKey>& keys,
                           const std::vector<std::string>& authentication,
                           const std::vector<ServiceEndpoint>& service_endpoints) {
    if (keys.empty()) fail(Errc::invalid_document, "document needs at least one key");
    for (const auto& a : authentication) {
        bool known = std::any_of(keys.begin(), keys.end(),
                                 [&](const DidKey& k) { return k.key_id == a; });
        if (!known) fail(Errc::invalid_document, "authentication references unknown key_id " + a);
    }
    DidDocument doc;
    doc.id = derive_did(keys.front().key);
    doc.public_keys = keys;
    doc.authentication = authentication;
    doc.service_endpoints = service_endpoints;
    return doc;
}

DidDocument build_document(const PublicKey& key,
                           const std::vector<ServiceEndpoint>& service_endpoints) {
    return build_document({{"key-1", key}}, {"key-1"}, service_endpoints);
}

Json Challenge::to_json() const {
    return Json{{"nonce", to_hex(nonce)},
                {"challenger_did", challenger_did},
                {"responder_did", responder_did},
                {"issued_at", issued_at},
                {"ttl", ttl}};
}

Challenge Challenge::from_json(const Json& j) {
    Challenge c;
    Bytes nonce = from_hex(j.at("nonce").get<std::string>());
    if (nonce.size() != c.nonce.size()) fail(Errc::parse_error, "challenge nonce must be 16 bytes");
    std::copy(nonce.begin(), nonce.end(), c.nonce.begin());
    c.challenger_did = j.at("challenger_did").get<std::string>();
    c.responder_did = j.at("responder_did").get<std::string>();
    c.issued_at = j.at("issued_at").get<uint64_t>();
    c.ttl = j.at("ttl").get<uint64_t>();
    return c;
}

ControlProof prove_control(const Challenge& challenge, const SecretKey& sk) {
    return ControlProof{sign(sk, canonicalize(challenge.to_json()))};
}

bool verify_control(const Challenge& challenge, const ControlProof& proof,
                    const DidDocument& doc) {
    Bytes msg = canonicalize(challenge.to_json());
    for (const auto& key : doc.authentication_keys())
        if (verify(key, msg, proof.signature)) return true;
    return false;
}

void NonceCache::prune(uint64_t now) const {
    for (auto it = used_.begin(); it != used_.end();)
        it = it->second < now ? used_.erase(it) : std::next(it);
}

bool NonceCache::accept(const std::array<uint8_t, 16>& nonce, uint64_t now, uint64_t expires_at) {
    prune(now);
    auto [it, inserted] = used_.emplace(to_hex(nonce), expires_at);
    if (!inserted) return false;
    return true;
}

bool NonceCache::seen(const std::array<uint8_t, 16>& nonce, uint64_t now) const {
    prune(now);
    return used_.count(to_hex(nonce)) > 0;
}

}  // namespace ssiam
