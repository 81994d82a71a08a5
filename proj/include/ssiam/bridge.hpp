#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ssiam/canonical.hpp"
#include "ssiam/clock.hpp"
#include "ssiam/identity_ledger.hpp"
#include "ssiam/view.hpp"

namespace ssiam {

struct IndexedTxn {
    uint64_t seq_no = 0;
    std::string kind;
    Json payload;
    std::string txn_hash;
    uint64_t indexed_at = 0;
    std::string raw_txn;  // the ledger entry, byte-identical
};

// Embedded document store for indexed identity transactions: JSON-Lines data
// file plus in-memory secondary indexes, with the poll cursor persisted
// separately so a crash between the two is recoverable.
class IndexStore {
public:
    IndexStore(std::filesystem::path data_file, std::filesystem::path cursor_file);

    // Idempotent by seq_no; returns true when the entry was new. A second
    // upsert with different bytes for the same seq_no is store corruption.
    bool upsert(uint64_t seq_no, const std::string& raw_txn, uint64_t indexed_at);

    uint64_t cursor() const { return cursor_; }          // next seq to fetch
    void persist_cursor(uint64_t next_seq);

    uint64_t head_seq() const;
    std::optional<IndexedTxn> get(uint64_t seq_no) const;
    std::vector<IndexedTxn> range(uint64_t from_seq, size_t limit) const;

    // Same read model as the ledger, answered from indexed entries only.
    std::optional<Json> resolve_did_doc(const std::string& did,
                                        std::optional<uint64_t> at_seq = {}) const;
    std::optional<RevocationSnapshot> revocation_state(const std::string& registry_id,
                                                       std::optional<uint64_t> at_seq = {}) const;
    std::optional<uint64_t> cred_hash_seq(const std::string& cred_hash_hex,
                                          std::optional<uint64_t> at_seq = {}) const;

    mutable std::shared_mutex mutex;  // writers: indexer; readers: HTTP handlers

private:
    void load();

    std::filesystem::path data_file_;
    std::filesystem::path cursor_file_;
    std::map<uint64_t, IndexedTxn> by_seq_;
    uint64_t cursor_ = 1;
};

// Pull indexer: tails an observer node into the store. Restart-safe: the
// cursor only advances after everything it covers is stored.
class Indexer {
public:
    Indexer(LedgerNode observer, IndexStore& store, const LogicalClock* clock);

    // Index [cursor, height]; returns the number of newly stored entries.
    size_t poll();
    // Spec surface: index [from_seq, height] regardless of the cursor.
    size_t poll_from(uint64_t from_seq);

    uint64_t poll_cycles() const { return cycles_; }
    const LedgerNode& observer() const { return observer_; }

    // Test hook: invoked after each stored entry; throwing simulates a crash
    // between the store write and the cursor write.
    std::function<void(size_t stored)> after_store;

private:
    LedgerNode observer_;
    IndexStore& store_;
    const LogicalClock* clock_;
    uint64_t cycles_ = 0;
};

// Read-only HTTP front over the store. Binds on construction-start; port 0
// picks a free port which listen() reports back.
class BridgeHttpServer {
public:
    BridgeHttpServer(const IndexStore& store, const LedgerNode& observer);
    ~BridgeHttpServer();

    BridgeHttpServer(const BridgeHttpServer&) = delete;
    BridgeHttpServer& operator=(const BridgeHttpServer&) = delete;

    int start(const std::string& host, int port);  // returns the bound port
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ssiam
