#include "ssiam/credential.hpp"

#include <algorithm>
#include <set>

#include "ssiam/errors.hpp"
#include "ssiam/wallet.hpp"

namespace ssiam {

namespace {

Json salts_to_json(const std::vector<Salt>& salts) {
    Json out = Json::array();
    for (const auto& s : salts) out.push_back(to_hex(s));
    return out;
}

Salt salt_from_hex(const std::string& hex) {
    Bytes raw = from_hex(hex);
    if (raw.size() != 16) fail(Errc::parse_error, "salt must be 16 bytes");
    Salt s{};
    std::copy(raw.begin(), raw.end(), s.begin());
    return s;
}

const KeyPair& wallet_key(const Wallet& wallet, const std::string& did) {
    const KeyPair* keys = wallet.key_for(did);
    if (!keys) fail(Errc::not_found, "wallet does not control " + did);
    return *keys;
}

}  // namespace

CredentialSchema CredentialSchema::make(const std::string& name,
                                        const std::vector<std::string>& claim_names) {
    std::set<std::string> unique(claim_names.begin(), claim_names.end());
    if (unique.size() != claim_names.size())
        fail(Errc::schema_mismatch, "schema claim names must be unique");
    CredentialSchema s;
    s.name = name;
    s.claim_names = claim_names;
    s.schema_id = digest_of(Json{{"name", name}, {"claim_names", claim_names}});
    return s;
}

bool CredentialSchema::has_claim(std::string_view claim) const {
    return std::find(claim_names.begin(), claim_names.end(), claim) != claim_names.end();
}

Json CredentialSchema::to_json() const {
    return Json{{"schema_id", schema_id.hex()}, {"name", name}, {"claim_names", claim_names}};
}

CredentialSchema CredentialSchema::from_json(const Json& j) {
    CredentialSchema s = make(j.at("name").get<std::string>(),
                              j.at("claim_names").get<std::vector<std::string>>());
    if (s.schema_id.hex() != j.at("schema_id").get<std::string>())
        fail(Errc::parse_error, "schema_id does not recompute");
    return s;
}

Json CredentialMetadata::to_json() const {
    return Json{{"cred_id", cred_id.hex()},
                {"schema_id", schema_id.hex()},
                {"issuer_did", issuer_did},
                {"holder_did", holder_did},
                {"commitment_root", commitment_root.hex()},
                {"valid_from", valid_from},
                {"valid_until", valid_until},
                {"registry_id", registry_id},
                {"revocation_index", revocation_index}};
}

CredentialMetadata CredentialMetadata::from_json(const Json& j) {
    CredentialMetadata m;
    m.cred_id = Digest::from_hex(j.at("cred_id").get<std::string>());
    m.schema_id = Digest::from_hex(j.at("schema_id").get<std::string>());
    m.issuer_did = j.at("issuer_did").get<std::string>();
    m.holder_did = j.at("holder_did").get<std::string>();
    m.commitment_root = Digest::from_hex(j.at("commitment_root").get<std::string>());
    m.valid_from = j.at("valid_from").get<uint64_t>();
    m.valid_until = j.at("valid_until").get<uint64_t>();
    m.registry_id = j.at("registry_id").get<std::string>();
    m.revocation_index = j.at("revocation_index").get<uint64_t>();
    return m;
}

std::vector<Digest> VerifiableCredential::leaves() const {
    std::vector<Digest> out;
    out.reserve(claims.size());
    for (size_t i = 0; i < claims.size(); ++i)
        out.push_back(claim_leaf(claim_salts[i], claims[i].name, claims[i].value));
    return out;
}

Digest VerifiableCredential::commitment_root_recomputed() const { return merkle_root(leaves()); }

Json VerifiableCredential::to_json() const {
    Json claims_json = Json::array();
    for (const auto& c : claims) claims_json.push_back({{"name", c.name}, {"value", c.value}});
    return Json{{"metadata", metadata.to_json()},
                {"issuer_signature", issuer_signature.hex()},
                {"claims", claims_json},
                {"claim_salts", salts_to_json(claim_salts)}};
}

VerifiableCredential VerifiableCredential::from_json(const Json& j) {
    VerifiableCredential c;
    c.metadata = CredentialMetadata::from_json(j.at("metadata"));
    c.issuer_signature = Signature::from_hex(j.at("issuer_signature").get<std::string>());
    for (const auto& claim : j.at("claims"))
        c.claims.push_back({claim.at("name").get<std::string>(),
                            claim.at("value").get<std::string>()});
    for (const auto& salt : j.at("claim_salts"))
        c.claim_salts.push_back(salt_from_hex(salt.get<std::string>()));
    if (c.claim_salts.size() != c.claims.size())
        fail(Errc::parse_error, "one salt per claim required");
    return c;
}

Json DisclosedClaim::to_json() const {
    Json path_json = Json::array();
    for (const auto& p : path) path_json.push_back(p.to_json());
    return Json{{"name", name}, {"value", value}, {"salt", to_hex(salt)}, {"path", path_json}};
}

DisclosedClaim DisclosedClaim::from_json(const Json& j) {
    DisclosedClaim d;
    d.name = j.at("name").get<std::string>();
    d.value = j.at("value").get<std::string>();
    d.salt = salt_from_hex(j.at("salt").get<std::string>());
    for (const auto& p : j.at("path")) d.path.push_back(PathNode::from_json(p));
    return d;
}

Bytes Presentation::holder_sign_bytes() const {
    Json body = to_json();
    body.erase("holder_signature");
    return canonicalize(body);
}

Json Presentation::to_json() const {
    Json disclosed_json = Json::array();
    for (const auto& d : disclosed) disclosed_json.push_back(d.to_json());
    return Json{{"metadata", metadata.to_json()},
                {"issuer_signature", issuer_signature.hex()},
                {"disclosed", disclosed_json},
                {"nonce", to_hex(nonce)},
                {"holder_signature", holder_signature.hex()}};
}

Presentation Presentation::from_json(const Json& j) {
    Presentation p;
    p.metadata = CredentialMetadata::from_json(j.at("metadata"));
    p.issuer_signature = Signature::from_hex(j.at("issuer_signature").get<std::string>());
    for (const auto& d : j.at("disclosed")) p.disclosed.push_back(DisclosedClaim::from_json(d));
    Bytes nonce = from_hex(j.at("nonce").get<std::string>());
    if (nonce.size() != p.nonce.size()) fail(Errc::parse_error, "presentation nonce must be 16 bytes");
    std::copy(nonce.begin(), nonce.end(), p.nonce.begin());
    p.holder_signature = Signature::from_hex(j.at("holder_signature").get<std::string>());
    return p;
}

VerificationReport verify_presentation(const Presentation& presentation, const IdentityView& view,
                                       uint64_t now) {
    const CredentialMetadata& meta = presentation.metadata;
    VerificationReport report;
    report.checked_at_seq = view.head_seq();

    Bytes issuer_bytes = meta.issuer_sign_bytes();
    if (auto issuer_doc = view.resolve_did(meta.issuer_did)) {
        for (const auto& key : issuer_doc->authentication_keys())
            if (verify(key, issuer_bytes, presentation.issuer_signature))
                report.issuer_sig_ok = true;
    }

    Bytes holder_bytes = presentation.holder_sign_bytes();
    if (auto holder_doc = view.resolve_did(meta.holder_did)) {
        for (const auto& key : holder_doc->authentication_keys())
            if (verify(key, holder_bytes, presentation.holder_signature))
                report.holder_sig_ok = true;
    }

    bool leaves_ok = true;
    for (const auto& d : presentation.disclosed) {
        Digest leaf = claim_leaf(d.salt, d.name, d.value);
        if (fold_path(leaf, d.path) != meta.commitment_root) leaves_ok = false;
    }
    bool anchored = view.cred_hash_seq(meta.cred_hash().hex()).has_value();
    report.integrity_ok = leaves_ok && anchored;

    if (auto registry = view.revocation_state(meta.registry_id))
        report.not_revoked = registry->revoked.count(meta.revocation_index) == 0;

    report.not_expired = meta.valid_from <= now && now <= meta.valid_until;

    if (!report.issuer_sig_ok) report.failure_reasons.push_back(ReasonCode::ISSUER_SIG);
    if (!report.holder_sig_ok) report.failure_reasons.push_back(ReasonCode::HOLDER_SIG);
    if (!report.integrity_ok) report.failure_reasons.push_back(ReasonCode::INTEGRITY);
    if (!report.not_revoked) report.failure_reasons.push_back(ReasonCode::REVOKED);
    if (now < meta.valid_from) report.failure_reasons.push_back(ReasonCode::NOT_YET_VALID);
    if (now > meta.valid_until) report.failure_reasons.push_back(ReasonCode::EXPIRED);
    report.failure_reasons = normalize_reasons(report.failure_reasons);
    return report;
}

CredentialSchema publish_schema(Wallet& issuer, const std::string& issuer_did,
                                const std::string& name,
                                const std::vector<std::string>& claim_names,
                                LedgerNode& validator) {
    CredentialSchema schema = CredentialSchema::make(name, claim_names);
    const KeyPair& keys = wallet_key(issuer, issuer_did);
    validator.submit(make_schema_draft(schema.to_json(), issuer_did, keys.secret_key));
    return schema;
}

std::optional<CredentialSchema> find_schema(const LedgerNode& node, const Digest& schema_id) {
    for (uint64_t seq = 1; seq <= node.height(); ++seq) {
        IdentityTxn txn = node.read(seq);
        if (txn.kind != TxnKind::SCHEMA) continue;
        CredentialSchema schema = CredentialSchema::from_json(txn.payload.at("schema"));
        if (schema.schema_id == schema_id) return schema;
    }
    return std::nullopt;
}

std::string create_revocation_registry(Wallet& issuer, const std::string& issuer_did,
                                       LedgerNode& validator) {
    const KeyPair& keys = wallet_key(issuer, issuer_did);
    Receipt receipt = validator.submit(make_registry_create_draft(issuer_did, keys.secret_key));
    return revocation_registry_id(issuer_did, receipt.seq_no);
}

VerifiableCredential issue_credential(Wallet& issuer, const std::string& issuer_did,
                                      const std::string& holder_did,
                                      const CredentialSchema& schema,
                                      const std::vector<Claim>& claims, uint64_t valid_from,
                                      uint64_t valid_until, const std::string& registry_id,
                                      LedgerNode& validator) {
    if (!find_schema(validator, schema.schema_id))
        fail(Errc::not_found, "schema not published: " + schema.name);
    for (const auto& claim : claims)
        if (!schema.has_claim(claim.name))
            fail(Errc::schema_mismatch, "claim not in schema: " + claim.name);

    RevocationSnapshot registry = validator.revocation_state(registry_id);
    if (registry.issuer_did != issuer_did)
        fail(Errc::unauthorized, "registry belongs to another issuer");

    VerifiableCredential cred;
    cred.claims = claims;
    for (size_t i = 0; i < claims.size(); ++i)
        cred.claim_salts.push_back(issuer.rng().nonce16());

    CredentialMetadata& meta = cred.metadata;
    meta.schema_id = schema.schema_id;
    meta.issuer_did = issuer_did;
    meta.holder_did = holder_did;
    meta.commitment_root = cred.commitment_root_recomputed();
    meta.valid_from = valid_from;
    meta.valid_until = valid_until;
    meta.registry_id = registry_id;
    meta.revocation_index = registry.issued_count;
    Json without_id = meta.to_json();
    without_id.erase("cred_id");
    meta.cred_id = digest_of(without_id);

    const KeyPair& keys = wallet_key(issuer, issuer_did);
    cred.issuer_signature = sign(keys.secret_key, meta.issuer_sign_bytes());

    validator.submit(make_cred_hash_draft(meta.cred_hash().hex(), registry_id,
                                          meta.revocation_index, issuer_did, keys.secret_key));
    return cred;
}

Presentation present_credential(const Wallet& holder, const Digest& cred_id,
                                const std::vector<std::string>& disclosed_names,
                                const std::array<uint8_t, 16>& nonce) {
    const VerifiableCredential& cred = holder.credential(cred_id);
    std::vector<Digest> leaves = cred.leaves();

    Presentation p;
    p.metadata = cred.metadata;
    p.issuer_signature = cred.issuer_signature;
    p.nonce = nonce;
    for (const auto& name : disclosed_names) {
        auto it = std::find_if(cred.claims.begin(), cred.claims.end(),
                               [&](const Claim& c) { return c.name == name; });
        if (it == cred.claims.end()) fail(Errc::unknown_claim, "no claim named " + name);
        size_t index = static_cast<size_t>(it - cred.claims.begin());
        DisclosedClaim d;
        d.name = it->name;
        d.value = it->value;
        d.salt = cred.claim_salts[index];
        d.path = merkle_path(leaves, index);
        p.disclosed.push_back(std::move(d));
    }

    const KeyPair& keys = wallet_key(holder, cred.metadata.holder_did);
    p.holder_signature = sign(keys.secret_key, p.holder_sign_bytes());
    return p;
}

std::optional<Receipt> revoke_credential(Wallet& issuer, const std::string& issuer_did,
                                         const std::string& registry_id, uint64_t revocation_index,
                                         LedgerNode& validator) {
    RevocationSnapshot registry = validator.revocation_state(registry_id);
    if (registry.issuer_did != issuer_did)
        fail(Errc::unauthorized, "only the registry issuer may revoke");
    if (revocation_index >= registry.issued_count)
        fail(Errc::unknown_index, "index was never issued");
    if (registry.revoked.count(revocation_index)) return std::nullopt;  // set semantics

    const KeyPair& keys = wallet_key(issuer, issuer_did);
    return validator.submit(
        make_revoke_draft(registry_id, {revocation_index}, issuer_did, keys.secret_key));
}

}  // namespace ssiam
