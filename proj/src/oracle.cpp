#include "ssiam/oracle.hpp"

#include <httplib.h>

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

class HttpIdentityView final : public IdentityView {
public:
    HttpIdentityView(std::string host, int port) : host_(std::move(host)), port_(port) {
        Json health = get_json("/api/v1/health");
        head_ = health.at("headSeq").get<uint64_t>();
        ledger_height_ = health.at("ledgerHeight").get<uint64_t>();
    }

    uint64_t head_seq() const override { return head_; }
    std::optional<uint64_t> ledger_height() const override { return ledger_height_; }

    std::optional<DidDocument> resolve_did(const std::string& did) const override {
        auto body = get_optional("/api/v1/dids/" + did + at_head());
        if (!body) return std::nullopt;
        return DidDocument::from_json(*body);
    }

    std::optional<RevocationSnapshot> revocation_state(
        const std::string& registry_id) const override {
        auto body = get_optional("/api/v1/revocation/" + registry_id + at_head());
        if (!body) return std::nullopt;
        RevocationSnapshot snap;
        snap.registry_id = body->at("registryId").get<std::string>();
        snap.issuer_did = body->at("issuerDid").get<std::string>();
        for (const auto& idx : body->at("revokedIndices")) snap.revoked.insert(idx.get<uint64_t>());
        snap.state_digest = Digest::from_hex(body->at("stateDigest").get<std::string>());
        snap.issued_count = body->at("issuedCount").get<uint64_t>();
        return snap;
    }

    std::optional<uint64_t> cred_hash_seq(const std::string& cred_hash_hex) const override {
        auto body = get_optional("/api/v1/credentials/" + cred_hash_hex + at_head());
        if (!body || !body->at("exists").get<bool>()) return std::nullopt;
        return body->at("seqNo").get<uint64_t>();
    }

private:
    std::string at_head() const { return "?atSeq=" + std::to_string(head_); }

    Json get_json(const std::string& path) const {
        auto body = get_optional(path);
        if (!body) fail(Errc::view_unavailable, "unexpected 404 for " + path);
        return *body;
    }

    // nullopt on 404; throws view_unavailable on transport failure.
    std::optional<Json> get_optional(const std::string& path) const {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(5, 0);
        auto res = client.Get(path);
        if (!res) fail(Errc::view_unavailable, "identity API unreachable at " + path);
        if (res->status == 404) return std::nullopt;
        if (res->status != 200)
            fail(Errc::view_unavailable,
                 "identity API returned " + std::to_string(res->status) + " for " + path);
        return canonical_parse(res->body);
    }

    std::string host_;
    int port_;
    uint64_t head_ = 0;
    uint64_t ledger_height_ = 0;
};

}  // namespace

std::shared_ptr<IdentityView> OracleClient::make_view() const {
    return std::make_shared<HttpIdentityView>(host_, port_);
}

}  // namespace ssiam
