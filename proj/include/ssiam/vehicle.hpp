#pragma once

#include <optional>
#include <string>

#include "ssiam/authorization.hpp"
#include "ssiam/didauth.hpp"
#include "ssiam/transport.hpp"
#include "ssiam/wallet.hpp"

namespace ssiam {

enum class LockState { LOCKED, UNLOCKED };

// Service-provider endpoint: runs the proximity session, relays the
// presentation to its verifier contract and drives the lock state machine.
// One session at a time; each session's verifier nonce reaches the contract
// at most once.
class VehicleAgent {
public:
    VehicleAgent(Wallet& wallet, std::string contract_address, AuthorizationRuntime& runtime,
                 const DidResolver& resolver, const LogicalClock* clock, std::string owner_did);

    struct Session {
        AuthenticatedChannel channel;
        std::array<uint8_t, 16> verifier_nonce{};
        uint64_t started_at = 0;
        std::string holder_session_did;
    };

    // DID Auth with the holder over the link, then a fresh verifier nonce is
    // handed to the holder for presentation binding.
    const Session& begin_session(Wallet& holder_wallet, const std::string& holder_session_did,
                                 Transport& link, uint64_t challenge_ttl = kDefaultChallengeTtl);

    // Local nonce check, then contract invocation with this vehicle as the
    // caller. The session ends once the contract has been consulted; a nonce
    // mismatch is rejected locally and consumes nothing.
    Decision request_access(const Presentation& presentation, const std::string& location);

    void relock(const std::string& requester_did);

    const std::string& did() const { return wallet_.primary_did(); }
    const std::string& contract_address() const { return contract_address_; }
    LockState lock() const { return lock_; }
    const std::optional<std::string>& unlock_holder() const { return unlock_holder_; }
    bool session_live() const { return session_.has_value(); }
    const Session& session() const;

private:
    Wallet& wallet_;
    std::string contract_address_;
    AuthorizationRuntime& runtime_;
    const DidResolver& resolver_;
    const LogicalClock* clock_;
    std::string owner_did_;

    LockState lock_ = LockState::LOCKED;
    std::optional<std::string> unlock_holder_;
    std::optional<Session> session_;
};

}  // namespace ssiam
