#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ssiam/errors.hpp"
#include "ssiam/identity_ledger.hpp"

namespace ssiam {

// Read-only identity state pinned at one ledger height. All accessors answer
// at head_seq so a verification is a function of a single committed prefix.
class IdentityView {
public:
    virtual ~IdentityView() = default;

    virtual uint64_t head_seq() const = 0;
    // Height of the backing ledger when the view was taken; nullopt when the
    // source cannot report it. Used for the freshness rule.
    virtual std::optional<uint64_t> ledger_height() const = 0;

    virtual std::optional<DidDocument> resolve_did(const std::string& did) const = 0;
    virtual std::optional<RevocationSnapshot> revocation_state(
        const std::string& registry_id) const = 0;
    virtual std::optional<uint64_t> cred_hash_seq(const std::string& cred_hash_hex) const = 0;
};

// View straight over a ledger core, pinned at a height. Test and replay
// plumbing; the authorization runtime goes through the bridge instead.
class DirectIdentityView final : public IdentityView {
public:
    explicit DirectIdentityView(const IdentityLedgerCore& core,
                                std::optional<uint64_t> at_seq = {})
        : core_(core), pinned_(at_seq.value_or(core.height())) {}

    uint64_t head_seq() const override { return pinned_; }
    std::optional<uint64_t> ledger_height() const override { return core_.height(); }

    std::optional<DidDocument> resolve_did(const std::string& did) const override {
        return core_.try_resolve_did(did, pinned_);
    }

    std::optional<RevocationSnapshot> revocation_state(
        const std::string& registry_id) const override {
        try {
            return core_.revocation_state(registry_id, pinned_);
        } catch (const Error& e) {
            if (e.code() == Errc::unknown_registry) return std::nullopt;
            throw;
        }
    }

    std::optional<uint64_t> cred_hash_seq(const std::string& cred_hash_hex) const override {
        return core_.cred_hash_seq(cred_hash_hex, pinned_);
    }

private:
    const IdentityLedgerCore& core_;
    uint64_t pinned_;
};

}  // namespace ssiam
