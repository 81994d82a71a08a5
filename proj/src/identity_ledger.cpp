#include "ssiam/identity_ledger.hpp"

#include <algorithm>

#include "ssiam/errors.hpp"

namespace ssiam {

std::string to_string(TxnKind kind) {
    switch (kind) {
        case TxnKind::DID_REG: return "DID_REG";
        case TxnKind::SCHEMA: return "SCHEMA";
        case TxnKind::CRED_HASH: return "CRED_HASH";
        case TxnKind::REVOC_UPDATE: return "REVOC_UPDATE";
    }
    fail(Errc::parse_error, "bad txn kind");
}

TxnKind txn_kind_from_string(const std::string& s) {
    if (s == "DID_REG") return TxnKind::DID_REG;
    if (s == "SCHEMA") return TxnKind::SCHEMA;
    if (s == "CRED_HASH") return TxnKind::CRED_HASH;
    if (s == "REVOC_UPDATE") return TxnKind::REVOC_UPDATE;
    fail(Errc::parse_error, "unknown txn kind: " + s);
}

Json IdentityTxn::to_json() const {
    Json j = hash_view();
    j["txn_hash"] = txn_hash.hex();
    return j;
}

Json IdentityTxn::hash_view() const {
    return Json{{"seq_no", seq_no},
                {"kind", to_string(kind)},
                {"payload", payload},
                {"submitter_did", submitter_did},
                {"submitter_sig", submitter_sig.hex()},
                {"prev_hash", prev_hash.hex()},
                {"timestamp", timestamp}};
}

IdentityTxn IdentityTxn::from_json(const Json& j) {
    IdentityTxn t;
    t.seq_no = j.at("seq_no").get<uint64_t>();
    t.kind = txn_kind_from_string(j.at("kind").get<std::string>());
    t.payload = j.at("payload");
    t.submitter_did = j.at("submitter_did").get<std::string>();
    t.submitter_sig = Signature::from_hex(j.at("submitter_sig").get<std::string>());
    t.prev_hash = Digest::from_hex(j.at("prev_hash").get<std::string>());
    t.txn_hash = Digest::from_hex(j.at("txn_hash").get<std::string>());
    t.timestamp = j.at("timestamp").get<uint64_t>();
    return t;
}

Bytes IdentityTxn::sign_bytes(TxnKind kind, const Json& payload, const std::string& submitter_did) {
    return canonicalize(Json{
        {"kind", to_string(kind)}, {"payload", payload}, {"submitter_did", submitter_did}});
}

Json GenesisConfig::to_json() const {
    Json anchors = Json::array();
    for (const auto& a : trust_anchors)
        anchors.push_back({{"did", a.did}, {"public_key", a.key.hex()}});
    return Json{{"trust_anchors", anchors}};
}

GenesisConfig GenesisConfig::from_json(const Json& j) {
    GenesisConfig g;
    for (const auto& a : j.at("trust_anchors"))
        g.trust_anchors.push_back({a.at("did").get<std::string>(),
                                   PublicKey::from_hex(a.at("public_key").get<std::string>())});
    if (g.trust_anchors.empty()) fail(Errc::parse_error, "genesis needs at least one trust anchor");
    return g;
}

void GenesisConfig::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot write genesis file " + file.string());
    out << canonical_string(to_json()) << "\n";
}

GenesisConfig GenesisConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(Errc::io_error, "cannot read genesis file " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(canonical_parse(text));
}

std::string revocation_registry_id(const std::string& issuer_did, uint64_t creation_seq) {
    return digest_of(Json{{"issuer_did", issuer_did}, {"creation_seq", creation_seq}}).hex();
}

IdentityLedgerCore::IdentityLedgerCore(std::filesystem::path log_file, GenesisConfig genesis,
                                       const LogicalClock* clock)
    : log_file_(std::move(log_file)), genesis_(std::move(genesis)), clock_(clock) {
    if (genesis_.trust_anchors.empty())
        fail(Errc::parse_error, "genesis needs at least one trust anchor");
    if (std::filesystem::exists(log_file_)) replay_file();
    out_.open(log_file_, std::ios::app);
    if (!out_) fail(Errc::io_error, "cannot open ledger log " + log_file_.string());
}

void IdentityLedgerCore::replay_file() {
    std::ifstream in(log_file_);
    if (!in) fail(Errc::io_error, "cannot read ledger log " + log_file_.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Entry e;
        e.raw = line;
        try {
            e.txn = IdentityTxn::from_json(canonical_parse(line));
        } catch (const std::exception&) {
            e.parse_ok = false;
        }
        entries_.push_back(std::move(e));
    }
}

void IdentityLedgerCore::persist(const Entry& entry) {
    out_ << entry.raw << "\n";
    out_.flush();
    if (!out_) fail(Errc::io_error, "ledger write failed");
}

std::optional<PublicKey> IdentityLedgerCore::anchor_key(const std::string& did) const {
    for (const auto& a : genesis_.trust_anchors)
        if (a.did == did) return a.key;
    return std::nullopt;
}

bool IdentityLedgerCore::signature_by_registered_key(const std::string& did, const Bytes& msg,
                                                     const Signature& sig) const {
    auto doc = try_resolve_did(did);
    if (!doc) return false;
    for (const auto& key : doc->authentication_keys())
        if (verify(key, msg, sig)) return true;
    return false;
}

void IdentityLedgerCore::validate(const TxnDraft& draft,
                                  const std::optional<Endorsement>& endorsement) const {
    Bytes msg = draft.sign_bytes();
    switch (draft.kind) {
        case TxnKind::DID_REG: {
            if (!draft.payload.contains("document"))
                fail(Errc::invalid_document, "DID_REG payload needs a document");
            DidDocument doc = DidDocument::from_json(draft.payload.at("document"));
            if (doc.id != draft.submitter_did)
                fail(Errc::invalid_document, "submitter must be the registered DID");
            if (doc.authentication.empty())
                fail(Errc::invalid_document, "document needs an authentication key");
            if (did_registered(doc.id)) {
                // Key rotation: authorized by a key of the current document.
                if (!signature_by_registered_key(doc.id, msg, draft.submitter_sig))
                    fail(Errc::bad_signature, "rotation not signed by a registered key");
                return;
            }
            bool self_signed = false;
            for (const auto& key : doc.authentication_keys())
                if (verify(key, msg, draft.submitter_sig)) self_signed = true;
            if (!self_signed)
                fail(Errc::bad_signature, "DID_REG not signed by a document key");
            if (!endorsement)
                fail(Errc::missing_endorsement, "new DID registration needs a trust anchor");
            auto anchor = anchor_key(endorsement->anchor_did);
            if (!anchor)
                fail(Errc::missing_endorsement,
                     "endorser is not a genesis trust anchor: " + endorsement->anchor_did);
            if (!verify(*anchor, msg, endorsement->signature))
                fail(Errc::missing_endorsement, "invalid trust anchor endorsement");
            return;
        }
        case TxnKind::SCHEMA: {
            if (!draft.payload.contains("schema"))
                fail(Errc::parse_error, "SCHEMA payload needs a schema");
            break;
        }
        case TxnKind::CRED_HASH: {
            const Json& p = draft.payload;
            if (!p.contains("cred_hash") || !p.contains("registry_id") ||
                !p.contains("revocation_index"))
                fail(Errc::parse_error, "CRED_HASH payload incomplete");
            RevocationSnapshot reg = revocation_state(p.at("registry_id").get<std::string>());
            if (reg.issuer_did != draft.submitter_did)
                fail(Errc::unauthorized, "registry belongs to another issuer");
            if (p.at("revocation_index").get<uint64_t>() != reg.issued_count)
                fail(Errc::unknown_index, "revocation_index must be the next free index");
            break;
        }
        case TxnKind::REVOC_UPDATE: {
            const Json& p = draft.payload;
            std::string action = p.value("action", "");
            if (action == "create") {
                if (p.at("issuer_did").get<std::string>() != draft.submitter_did)
                    fail(Errc::unauthorized, "registry creator must be the submitter");
            } else if (action == "revoke") {
                RevocationSnapshot reg = revocation_state(p.at("registry_id").get<std::string>());
                if (reg.issuer_did != draft.submitter_did)
                    fail(Errc::unauthorized, "only the registry issuer may revoke");
                for (const auto& idx : p.at("indices"))
                    if (idx.get<uint64_t>() >= reg.issued_count)
                        fail(Errc::unknown_index, "revoking an index that was never issued");
            } else {
                fail(Errc::parse_error, "REVOC_UPDATE action must be create or revoke");
            }
            break;
        }
    }
    // Non-registration kinds: the submitter must already be on the ledger.
    if (!did_registered(draft.submitter_did))
        fail(Errc::unknown_submitter, "submitter not registered: " + draft.submitter_did);
    if (!signature_by_registered_key(draft.submitter_did, msg, draft.submitter_sig))
        fail(Errc::bad_signature, "submitter signature does not verify");
}

Receipt IdentityLedgerCore::append(const TxnDraft& draft,
                                   const std::optional<Endorsement>& endorsement) {
    canonicalize(draft.payload);  // reject unrepresentable payloads up front
    validate(draft, endorsement);

    Entry e;
    e.txn.seq_no = entries_.size() + 1;
    e.txn.kind = draft.kind;
    e.txn.payload = draft.payload;
    e.txn.submitter_did = draft.submitter_did;
    e.txn.submitter_sig = draft.submitter_sig;
    e.txn.prev_hash = entries_.empty() ? Digest::zero() : entries_.back().txn.txn_hash;
    e.txn.timestamp = clock_ ? clock_->now : 0;
    e.txn.txn_hash = digest_of(e.txn.hash_view());
    e.raw = canonical_string(e.txn.to_json());
    persist(e);
    entries_.push_back(e);
    return Receipt{e.txn.seq_no, e.txn.txn_hash};
}

IdentityTxn IdentityLedgerCore::read(uint64_t seq_no) const {
    if (seq_no < 1 || seq_no > entries_.size())
        fail(Errc::out_of_range, "seq_no " + std::to_string(seq_no) + " not in [1, " +
                                     std::to_string(entries_.size()) + "]");
    const Entry& e = entries_[seq_no - 1];
    if (!e.parse_ok) fail(Errc::ledger_corrupt, "entry " + std::to_string(seq_no) + " unreadable");
    return e.txn;
}

const std::string& IdentityLedgerCore::read_raw(uint64_t seq_no) const {
    if (seq_no < 1 || seq_no > entries_.size()) fail(Errc::out_of_range, "seq_no out of range");
    return entries_[seq_no - 1].raw;
}

bool IdentityLedgerCore::did_registered(const std::string& did,
                                        std::optional<uint64_t> at_seq) const {
    return try_resolve_did(did, at_seq).has_value();
}

std::optional<DidDocument> IdentityLedgerCore::try_resolve_did(
    const std::string& did, std::optional<uint64_t> at_seq) const {
    uint64_t limit = at_seq.value_or(entries_.size());
    if (limit > entries_.size()) fail(Errc::out_of_range, "at_seq beyond ledger height");
    const Json* latest = nullptr;
    for (uint64_t i = 0; i < limit; ++i) {
        const Entry& e = entries_[i];
        if (!e.parse_ok || e.txn.kind != TxnKind::DID_REG) continue;
        const Json& doc = e.txn.payload.at("document");
        if (doc.at("id").get<std::string>() == did) latest = &doc;
    }
    if (latest) return DidDocument::from_json(*latest);
    for (const auto& a : genesis_.trust_anchors)
        if (a.did == did) return build_document(a.key);
    return std::nullopt;
}

DidDocument IdentityLedgerCore::resolve_did(const std::string& did,
                                            std::optional<uint64_t> at_seq) const {
    auto doc = try_resolve_did(did, at_seq);
    if (!doc) fail(Errc::not_found, "DID not registered: " + did);
    return *doc;
}

RevocationSnapshot IdentityLedgerCore::revocation_state(const std::string& registry_id,
                                                        std::optional<uint64_t> at_seq) const {
    uint64_t limit = at_seq.value_or(entries_.size());
    if (limit > entries_.size()) fail(Errc::out_of_range, "at_seq beyond ledger height");
    RevocationSnapshot snap;
    snap.registry_id = registry_id;
    bool found = false;
    for (uint64_t i = 0; i < limit; ++i) {
        const Entry& e = entries_[i];
        if (!e.parse_ok) continue;
        if (e.txn.kind == TxnKind::REVOC_UPDATE) {
            const Json& p = e.txn.payload;
            std::string action = p.value("action", "");
            if (action == "create") {
                std::string issuer = p.at("issuer_did").get<std::string>();
                if (revocation_registry_id(issuer, e.txn.seq_no) == registry_id) {
                    found = true;
                    snap.issuer_did = issuer;
                    snap.state_digest = Digest::from_hex(registry_id);
                }
            } else if (action == "revoke" && found &&
                       p.at("registry_id").get<std::string>() == registry_id) {
                const Json& indices = p.at("indices");
                Bytes material(snap.state_digest.bytes.begin(), snap.state_digest.bytes.end());
                Bytes update = canonicalize(indices);
                material.insert(material.end(), update.begin(), update.end());
                snap.state_digest = digest(material);
                for (const auto& idx : indices) snap.revoked.insert(idx.get<uint64_t>());
            }
        } else if (e.txn.kind == TxnKind::CRED_HASH && found &&
                   e.txn.payload.at("registry_id").get<std::string>() == registry_id) {
            ++snap.issued_count;
        }
    }
    if (!found) fail(Errc::unknown_registry, "no registry " + registry_id + " at that height");
    return snap;
}

std::optional<uint64_t> IdentityLedgerCore::cred_hash_seq(const std::string& cred_hash_hex,
                                                          std::optional<uint64_t> at_seq) const {
    uint64_t limit = at_seq.value_or(entries_.size());
    if (limit > entries_.size()) fail(Errc::out_of_range, "at_seq beyond ledger height");
    for (uint64_t i = 0; i < limit; ++i) {
        const Entry& e = entries_[i];
        if (!e.parse_ok || e.txn.kind != TxnKind::CRED_HASH) continue;
        if (e.txn.payload.at("cred_hash").get<std::string>() == cred_hash_hex)
            return e.txn.seq_no;
    }
    return std::nullopt;
}

ChainCheck IdentityLedgerCore::verify_chain_detailed() const {
    Digest prev = Digest::zero();
    for (uint64_t i = 0; i < entries_.size(); ++i) {
        uint64_t seq = i + 1;
        const Entry& e = entries_[i];
        if (!e.parse_ok) return {false, seq, "entry does not parse"};
        if (e.txn.seq_no != seq) return {false, seq, "seq_no mismatch"};
        if (canonical_string(e.txn.to_json()) != e.raw)
            return {false, seq, "stored bytes are not the canonical entry"};
        if (e.txn.prev_hash != prev) return {false, seq, "broken prev_hash link"};
        if (digest_of(e.txn.hash_view()) != e.txn.txn_hash)
            return {false, seq, "txn_hash does not recompute"};
        prev = e.txn.txn_hash;
    }
    return {};
}

Receipt LedgerNode::submit(const TxnDraft& draft, const std::optional<Endorsement>& endorsement) {
    if (role_ != NodeRole::VALIDATOR)
        fail(Errc::observer_write, "observer nodes do not accept writes");
    return core_->append(draft, endorsement);
}

TxnDraft make_did_reg_draft(const DidDocument& doc, const SecretKey& signing_key) {
    TxnDraft d;
    d.kind = TxnKind::DID_REG;
    d.payload = Json{{"document", doc.to_json()}};
    d.submitter_did = doc.id;
    d.submitter_sig = sign(signing_key, d.sign_bytes());
    return d;
}

TxnDraft make_schema_draft(const Json& schema, const std::string& submitter_did,
                           const SecretKey& signing_key) {
    TxnDraft d;
    d.kind = TxnKind::SCHEMA;
    d.payload = Json{{"schema", schema}};
    d.submitter_did = submitter_did;
    d.submitter_sig = sign(signing_key, d.sign_bytes());
    return d;
}

TxnDraft make_cred_hash_draft(const std::string& cred_hash_hex, const std::string& registry_id,
                              uint64_t revocation_index, const std::string& submitter_did,
                              const SecretKey& signing_key) {
    TxnDraft d;
    d.kind = TxnKind::CRED_HASH;
    d.payload = Json{{"cred_hash", cred_hash_hex},
                     {"registry_id", registry_id},
                     {"revocation_index", revocation_index}};
    d.submitter_did = submitter_did;
    d.submitter_sig = sign(signing_key, d.sign_bytes());
    return d;
}

TxnDraft make_registry_create_draft(const std::string& issuer_did, const SecretKey& signing_key) {
    TxnDraft d;
    d.kind = TxnKind::REVOC_UPDATE;
    d.payload = Json{{"action", "create"}, {"issuer_did", issuer_did}};
    d.submitter_did = issuer_did;
    d.submitter_sig = sign(signing_key, d.sign_bytes());
    return d;
}

TxnDraft make_revoke_draft(const std::string& registry_id, const std::set<uint64_t>& indices,
                           const std::string& submitter_did, const SecretKey& signing_key) {
    TxnDraft d;
    d.kind = TxnKind::REVOC_UPDATE;
    Json idx = Json::array();
    for (uint64_t i : indices) idx.push_back(i);
    d.payload = Json{{"action", "revoke"}, {"registry_id", registry_id}, {"indices", idx}};
    d.submitter_did = submitter_did;
    d.submitter_sig = sign(signing_key, d.sign_bytes());
    return d;
}

}  // namespace ssiam
