#include "ssiam/bridge.hpp"

#include <httplib.h>

#include <fstream>
#include <thread>

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

IndexedTxn indexed_from_line(const Json& line) {
    IndexedTxn t;
    t.indexed_at = line.at("indexed_at").get<uint64_t>();
    const Json& txn = line.at("txn");
    t.seq_no = txn.at("seq_no").get<uint64_t>();
    t.kind = txn.at("kind").get<std::string>();
    t.payload = txn.at("payload");
    t.txn_hash = txn.at("txn_hash").get<std::string>();
    t.raw_txn = canonical_string(txn);
    return t;
}

}  // namespace

IndexStore::IndexStore(std::filesystem::path data_file, std::filesystem::path cursor_file)
    : data_file_(std::move(data_file)), cursor_file_(std::move(cursor_file)) {
    load();
}

void IndexStore::load() {
    if (std::filesystem::exists(data_file_)) {
        std::ifstream in(data_file_);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            Json parsed = Json::parse(line, nullptr, false);
            if (parsed.is_discarded()) {
                // A torn tail write is recoverable; garbage elsewhere is not.
                if (in.peek() == std::ifstream::traits_type::eof()) break;
                fail(Errc::ledger_corrupt,
                     "bridge store line " + std::to_string(line_no) + " unreadable");
            }
            IndexedTxn t = indexed_from_line(parsed);
            by_seq_[t.seq_no] = std::move(t);
        }
    }
    if (std::filesystem::exists(cursor_file_)) {
        std::ifstream in(cursor_file_);
        Json parsed = Json::parse(std::string((std::istreambuf_iterator<char>(in)),
                                              std::istreambuf_iterator<char>()),
                                  nullptr, false);
        if (!parsed.is_discarded()) cursor_ = parsed.at("next_seq").get<uint64_t>();
    }
}

bool IndexStore::upsert(uint64_t seq_no, const std::string& raw_txn, uint64_t indexed_at) {
    std::unique_lock lock(mutex);
    auto it = by_seq_.find(seq_no);
    if (it != by_seq_.end()) {
        if (it->second.raw_txn != raw_txn)
            fail(Errc::ledger_corrupt,
                 "store already holds different bytes for seq " + std::to_string(seq_no));
        return false;
    }
    Json line{{"indexed_at", indexed_at}, {"txn", canonical_parse(raw_txn)}};
    std::ofstream out(data_file_, std::ios::app);
    out << canonical_string(line) << "\n";
    out.flush();
    if (!out) fail(Errc::io_error, "bridge store write failed");
    by_seq_[seq_no] = indexed_from_line(line);
    return true;
}

void IndexStore::persist_cursor(uint64_t next_seq) {
    std::ofstream out(cursor_file_, std::ios::trunc);
    out << canonical_string(Json{{"next_seq", next_seq}}) << "\n";
    out.flush();
    if (!out) fail(Errc::io_error, "cursor write failed");
    cursor_ = next_seq;
}

uint64_t IndexStore::head_seq() const {
    std::shared_lock lock(mutex);
    return by_seq_.empty() ? 0 : by_seq_.rbegin()->first;
}

std::optional<IndexedTxn> IndexStore::get(uint64_t seq_no) const {
    std::shared_lock lock(mutex);
    auto it = by_seq_.find(seq_no);
    if (it == by_seq_.end()) return std::nullopt;
    return it->second;
}

std::vector<IndexedTxn> IndexStore::range(uint64_t from_seq, size_t limit) const {
    std::shared_lock lock(mutex);
    std::vector<IndexedTxn> out;
    for (auto it = by_seq_.lower_bound(from_seq); it != by_seq_.end() && out.size() < limit; ++it)
        out.push_back(it->second);
    return out;
}

std::optional<Json> IndexStore::resolve_did_doc(const std::string& did,
                                                std::optional<uint64_t> at_seq) const {
    std::shared_lock lock(mutex);
    uint64_t limit = at_seq.value_or(UINT64_MAX);
    std::optional<Json> latest;
    for (const auto& [seq, t] : by_seq_) {
        if (seq > limit) break;
        if (t.kind != "DID_REG") continue;
        const Json& doc = t.payload.at("document");
        if (doc.at("id").get<std::string>() == did) latest = doc;
    }
    return latest;
}

std::optional<RevocationSnapshot> IndexStore::revocation_state(
    const std::string& registry_id, std::optional<uint64_t> at_seq) const {
    std::shared_lock lock(mutex);
    uint64_t limit = at_seq.value_or(UINT64_MAX);
    RevocationSnapshot snap;
    snap.registry_id = registry_id;
    bool found = false;
    for (const auto& [seq, t] : by_seq_) {
        if (seq > limit) break;
        if (t.kind == "REVOC_UPDATE") {
            std::string action = t.payload.value("action", "");
            if (action == "create") {
                std::string issuer = t.payload.at("issuer_did").get<std::string>();
                if (revocation_registry_id(issuer, seq) == registry_id) {
                    found = true;
                    snap.issuer_did = issuer;
                    snap.state_digest = Digest::from_hex(registry_id);
                }
            } else if (action == "revoke" && found &&
                       t.payload.at("registry_id").get<std::string>() == registry_id) {
                Bytes material(snap.state_digest.bytes.begin(), snap.state_digest.bytes.end());
                Bytes update = canonicalize(t.payload.at("indices"));
                material.insert(material.end(), update.begin(), update.end());
                snap.state_digest = digest(material);
                for (const auto& idx : t.payload.at("indices"))
                    snap.revoked.insert(idx.get<uint64_t>());
            }
        } else if (t.kind == "CRED_HASH" && found &&
                   t.payload.at("registry_id").get<std::string>() == registry_id) {
            ++snap.issued_count;
        }
    }
    if (!found) return std::nullopt;
    return snap;
}

std::optional<uint64_t> IndexStore::cred_hash_seq(const std::string& cred_hash_hex,
                                                  std::optional<uint64_t> at_seq) const {
    std::shared_lock lock(mutex);
    uint64_t limit = at_seq.value_or(UINT64_MAX);
    for (const auto& [seq, t] : by_seq_) {
        if (seq > limit) break;
        if (t.kind == "CRED_HASH" &&
            t.payload.at("cred_hash").get<std::string>() == cred_hash_hex)
            return seq;
    }
    return std::nullopt;
}

Indexer::Indexer(LedgerNode observer, IndexStore& store, const LogicalClock* clock)
    : observer_(std::move(observer)), store_(store), clock_(clock) {}

size_t Indexer::poll() { return poll_from(store_.cursor()); }

size_t Indexer::poll_from(uint64_t from_seq) {
    uint64_t height = observer_.height();
    if (from_seq > height + 1) fail(Errc::out_of_range, "from_seq beyond ledger height + 1");
    ++cycles_;
    size_t stored = 0;
    for (uint64_t seq = from_seq; seq <= height; ++seq) {
        if (store_.upsert(seq, observer_.read_raw(seq), clock_ ? clock_->now : 0)) ++stored;
        if (after_store) after_store(stored);
    }
    store_.persist_cursor(height + 1);
    return stored;
}

// --- HTTP front ---

struct BridgeHttpServer::Impl {
    const IndexStore& store;
    const LedgerNode& observer;
    httplib::Server server;
    std::thread worker;
    int port = 0;

    Impl(const IndexStore& s, const LedgerNode& o) : store(s), observer(o) { route(); }

    static void error_reply(httplib::Response& res, int status, const std::string& message) {
        res.status = status;
        res.set_content(canonical_string(Json{{"error", message}}), "application/json");
    }

    static std::optional<uint64_t> parse_u64(const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            return std::nullopt;
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    // atSeq: absent -> live head; present -> pinned historical height.
    static bool read_at_seq(const httplib::Request& req, httplib::Response& res,
                            std::optional<uint64_t>& out) {
        if (!req.has_param("atSeq")) return true;
        auto v = parse_u64(req.get_param_value("atSeq"));
        if (!v) {
            error_reply(res, 400, "atSeq must be a non-negative integer");
            return false;
        }
        out = *v;
        return true;
    }

    void route() {
        server.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
            Json body{{"headSeq", store.head_seq()}, {"ledgerHeight", observer.height()}};
            res.set_content(canonical_string(body), "application/json");
        });

        server.Get("/api/v1/txns", [this](const httplib::Request& req, httplib::Response& res) {
            uint64_t from = 1;
            size_t limit = 100;
            if (req.has_param("fromSeq")) {
                auto v = parse_u64(req.get_param_value("fromSeq"));
                if (!v || *v == 0) return error_reply(res, 400, "fromSeq must be >= 1");
                from = *v;
            }
            if (req.has_param("limit")) {
                auto v = parse_u64(req.get_param_value("limit"));
                if (!v || *v == 0) return error_reply(res, 400, "limit must be >= 1");
                limit = static_cast<size_t>(*v);
            }
            Json txns = Json::array();
            for (const auto& t : store.range(from, limit)) txns.push_back(canonical_parse(t.raw_txn));
            res.set_content(canonical_string(Json{{"txns", txns}}), "application/json");
        });

        server.Get(R"(/api/v1/txns/(\d+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       auto seq = parse_u64(req.matches[1]);
                       if (!seq) return error_reply(res, 400, "bad seqNo");
                       auto t = store.get(*seq);
                       if (!t) return error_reply(res, 404, "no transaction " + std::string(req.matches[1]));
                       res.set_content(t->raw_txn, "application/json");
                   });

        server.Get("/api/v1/dids/:did", [this](const httplib::Request& req,
                                               httplib::Response& res) {
            std::optional<uint64_t> at_seq;
            if (!read_at_seq(req, res, at_seq)) return;
            auto doc = store.resolve_did_doc(req.path_params.at("did"), at_seq);
            if (!doc) return error_reply(res, 404, "DID not found");
            res.set_content(canonical_string(*doc), "application/json");
        });

        server.Get("/api/v1/revocation/:registryId",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::optional<uint64_t> at_seq;
                       if (!read_at_seq(req, res, at_seq)) return;
                       auto snap = store.revocation_state(req.path_params.at("registryId"), at_seq);
                       if (!snap) return error_reply(res, 404, "registry not found");
                       Json revoked = Json::array();
                       for (uint64_t idx : snap->revoked) revoked.push_back(idx);
                       Json body{{"registryId", snap->registry_id},
                                 {"issuerDid", snap->issuer_did},
                                 {"revokedIndices", revoked},
                                 {"stateDigest", snap->state_digest.hex()},
                                 {"issuedCount", snap->issued_count}};
                       res.set_content(canonical_string(body), "application/json");
                   });

        server.Get("/api/v1/credentials/:credHashHex",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::optional<uint64_t> at_seq;
                       if (!read_at_seq(req, res, at_seq)) return;
                       auto seq = store.cred_hash_seq(req.path_params.at("credHashHex"), at_seq);
                       Json body{{"exists", seq.has_value()}};
                       if (seq) body["seqNo"] = *seq;
                       res.set_content(canonical_string(body), "application/json");
                   });
    }
};

BridgeHttpServer::BridgeHttpServer(const IndexStore& store, const LedgerNode& observer)
    : impl_(std::make_unique<Impl>(store, observer)) {}

BridgeHttpServer::~BridgeHttpServer() { stop(); }

int BridgeHttpServer::start(const std::string& host, int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            fail(Errc::io_error, "cannot bind " + host + ":" + std::to_string(port));
        impl_->port = port;
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void BridgeHttpServer::stop() {
    if (impl_ && impl_->worker.joinable()) {
        impl_->server.stop();
        impl_->worker.join();
    }
}

}  // namespace ssiam
