#include "ssiam/wallet.hpp"

#include <sodium.h>

#include <algorithm>

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

constexpr char kWalletMagic[4] = {'S', 'S', 'I', 'W'};
constexpr uint16_t kWalletVersion = 1;
constexpr size_t kPwSaltSize = crypto_pwhash_SALTBYTES;       // 16
constexpr size_t kBoxNonceSize = crypto_secretbox_NONCEBYTES;  // 24

std::array<uint8_t, crypto_secretbox_KEYBYTES> stretch_key(
    const std::string& passphrase, const std::array<uint8_t, kPwSaltSize>& salt) {
    std::array<uint8_t, crypto_secretbox_KEYBYTES> key{};
    if (crypto_pwhash(key.data(), key.size(), passphrase.data(), passphrase.size(), salt.data(),
                      crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN,
                      crypto_pwhash_ALG_DEFAULT) != 0)
        fail(Errc::io_error, "passphrase stretching failed");
    return key;
}

std::array<uint8_t, 32> seed_for(const std::array<uint8_t, 32>& master, std::string_view label) {
    Bytes material(master.begin(), master.end());
    append(material, label);
    return digest(material).bytes;
}

}  // namespace

Endorser Endorser::from_seed(std::span<const uint8_t> seed) {
    Endorser e;
    e.keys = generate_keypair(seed);
    e.did = derive_did(e.keys.public_key);
    return e;
}

Endorsement Endorser::endorse(const TxnDraft& draft) const {
    return Endorsement{did, sign(keys.secret_key, draft.sign_bytes())};
}

Wallet::Wallet(std::string owner_label, std::array<uint8_t, 32> master_seed)
    : label_(std::move(owner_label)),
      master_seed_(master_seed),
      primary_(generate_keypair(seed_for(master_seed_, "primary"))),
      primary_did_(derive_did(primary_.public_key)),
      rng_(digest(seed_for(master_seed_, "rng"))) {}

Receipt Wallet::register_primary_did(LedgerNode& validator, const Endorser& endorser) {
    TxnDraft draft = make_did_reg_draft(build_document(primary_.public_key),
                                        primary_.secret_key);
    return validator.submit(draft, endorser.endorse(draft));
}

std::string Wallet::create_pairwise_did(const std::string& peer_did, LedgerNode& validator,
                                        const Endorser& endorser) {
    if (auto existing = pairwise_did_for(peer_did)) return *existing;
    KeyPair keys = generate_keypair(seed_for(master_seed_, "pairwise:" + peer_did));
    TxnDraft draft = make_did_reg_draft(build_document(keys.public_key), keys.secret_key);
    validator.submit(draft, endorser.endorse(draft));
    Relation rel{peer_did, derive_did(keys.public_key), keys};
    relations_.push_back(rel);
    return rel.local_did;
}

std::optional<std::string> Wallet::pairwise_did_for(const std::string& peer_did) const {
    for (const auto& r : relations_)
        if (r.peer_did == peer_did) return r.local_did;
    return std::nullopt;
}

const KeyPair* Wallet::key_for(const std::string& did) const {
    if (did == primary_did_) return &primary_;
    for (const auto& r : relations_)
        if (r.local_did == did) return &r.keys;
    return nullptr;
}

std::vector<std::string> Wallet::owned_dids() const {
    std::vector<std::string> out{primary_did_};
    for (const auto& r : relations_) out.push_back(r.local_did);
    return out;
}

void Wallet::store_credential(const VerifiableCredential& credential) {
    if (!key_for(credential.metadata.holder_did))
        fail(Errc::foreign_holder,
             "credential holder " + credential.metadata.holder_did + " is not this wallet");
    credentials_[credential.metadata.cred_id.hex()] = credential;
}

const VerifiableCredential& Wallet::credential(const Digest& cred_id) const {
    auto it = credentials_.find(cred_id.hex());
    if (it == credentials_.end()) fail(Errc::not_found, "no credential " + cred_id.hex());
    return it->second;
}

std::vector<VerifiableCredential> Wallet::credentials() const {
    std::vector<VerifiableCredential> out;
    for (const auto& [_, c] : credentials_) out.push_back(c);
    return out;
}

void Wallet::log_message(const std::string& direction, const std::string& peer_did, Bytes body,
                         uint64_t time) {
    messages_.push_back(MessageRecord{direction, peer_did, std::move(body), time});
}

std::vector<const MessageRecord*> Wallet::messages_with(const std::string& peer_did) const {
    std::vector<const MessageRecord*> out;
    for (const auto& m : messages_)
        if (m.peer_did == peer_did) out.push_back(&m);
    return out;
}

Json Wallet::to_json() const {
    Json relations = Json::array();
    for (const auto& r : relations_)
        relations.push_back({{"peer_did", r.peer_did},
                             {"local_did", r.local_did},
                             {"public_key", r.keys.public_key.hex()},
                             {"secret_key", r.keys.secret_key.hex()}});
    Json creds = Json::array();
    for (const auto& [_, c] : credentials_) creds.push_back(c.to_json());
    Json messages = Json::array();
    for (const auto& m : messages_)
        messages.push_back({{"direction", m.direction},
                            {"peer_did", m.peer_did},
                            {"body", to_hex(m.body)},
                            {"time", m.time}});
    return Json{{"owner_label", label_},
                {"master_seed", to_hex(master_seed_)},
                {"relations", relations},
                {"credentials", creds},
                {"message_log", messages}};
}

Wallet Wallet::from_json(const Json& j) {
    Bytes seed = from_hex(j.at("master_seed").get<std::string>());
    if (seed.size() != 32) fail(Errc::corrupt_payload, "master seed must be 32 bytes");
    std::array<uint8_t, 32> master{};
    std::copy(seed.begin(), seed.end(), master.begin());
    Wallet w(j.at("owner_label").get<std::string>(), master);
    for (const auto& r : j.at("relations")) {
        Relation rel;
        rel.peer_did = r.at("peer_did").get<std::string>();
        rel.local_did = r.at("local_did").get<std::string>();
        rel.keys.public_key = PublicKey::from_hex(r.at("public_key").get<std::string>());
        rel.keys.secret_key = SecretKey::from_hex(r.at("secret_key").get<std::string>());
        w.relations_.push_back(rel);
    }
    for (const auto& c : j.at("credentials")) {
        VerifiableCredential cred = VerifiableCredential::from_json(c);
        w.credentials_[cred.metadata.cred_id.hex()] = cred;
    }
    for (const auto& m : j.at("message_log"))
        w.messages_.push_back(MessageRecord{m.at("direction").get<std::string>(),
                                            m.at("peer_did").get<std::string>(),
                                            from_hex(m.at("body").get<std::string>()),
                                            m.at("time").get<uint64_t>()});
    return w;
}

Bytes Wallet::export_encrypted(const std::string& passphrase) const {
    std::array<uint8_t, kPwSaltSize> salt{};
    randombytes_buf(salt.data(), salt.size());
    std::array<uint8_t, kBoxNonceSize> nonce{};
    randombytes_buf(nonce.data(), nonce.size());
    auto key = stretch_key(passphrase, salt);

    Bytes plain = canonicalize(to_json());
    Bytes cipher(plain.size() + crypto_secretbox_MACBYTES);
    crypto_secretbox_easy(cipher.data(), plain.data(), plain.size(), nonce.data(), key.data());

    Bytes envelope;
    append(envelope, std::string_view(kWalletMagic, sizeof(kWalletMagic)));
    envelope.push_back(static_cast<uint8_t>(kWalletVersion & 0xff));
    envelope.push_back(static_cast<uint8_t>(kWalletVersion >> 8));
    append(envelope, std::span<const uint8_t>(salt));
    append(envelope, std::span<const uint8_t>(nonce));
    append(envelope, std::span<const uint8_t>(cipher));
    return envelope;
}

Wallet Wallet::import_encrypted(std::span<const uint8_t> envelope,
                                const std::string& passphrase) {
    constexpr size_t header = sizeof(kWalletMagic) + 2 + kPwSaltSize + kBoxNonceSize;
    if (envelope.size() < header + crypto_secretbox_MACBYTES)
        fail(Errc::corrupt_payload, "wallet envelope truncated");
    if (!std::equal(kWalletMagic, kWalletMagic + sizeof(kWalletMagic), envelope.begin()))
        fail(Errc::corrupt_payload, "bad wallet magic");
    uint16_t version = static_cast<uint16_t>(envelope[4]) |
                       static_cast<uint16_t>(envelope[5]) << 8;
    if (version != kWalletVersion)
        fail(Errc::corrupt_payload, "unsupported wallet version " + std::to_string(version));

    std::array<uint8_t, kPwSaltSize> salt{};
    std::copy_n(envelope.begin() + 6, kPwSaltSize, salt.begin());
    std::array<uint8_t, kBoxNonceSize> nonce{};
    std::copy_n(envelope.begin() + 6 + kPwSaltSize, kBoxNonceSize, nonce.begin());
    auto key = stretch_key(passphrase, salt);

    std::span<const uint8_t> cipher = envelope.subspan(header);
    Bytes plain(cipher.size() - crypto_secretbox_MACBYTES);
    if (crypto_secretbox_open_easy(plain.data(), cipher.data(), cipher.size(), nonce.data(),
                                   key.data()) != 0)
        fail(Errc::wrong_passphrase, "wallet authentication failed");
    return from_json(canonical_parse(plain));
}

}  // namespace ssiam
