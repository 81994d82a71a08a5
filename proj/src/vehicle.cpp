#include "ssiam/vehicle.hpp"

#include "ssiam/errors.hpp"

namespace ssiam {

VehicleAgent::VehicleAgent(Wallet& wallet, std::string contract_address,
                           AuthorizationRuntime& runtime, const DidResolver& resolver,
                           const LogicalClock* clock, std::string owner_did)
    : wallet_(wallet),
      contract_address_(std::move(contract_address)),
      runtime_(runtime),
      resolver_(resolver),
      clock_(clock),
      owner_did_(std::move(owner_did)) {}

const VehicleAgent::Session& VehicleAgent::session() const {
    if (!session_) fail(Errc::auth_failed, "no live session");
    return *session_;
}

const VehicleAgent::Session& VehicleAgent::begin_session(Wallet& holder_wallet,
                                                         const std::string& holder_session_did,
                                                         Transport& link,
                                                         uint64_t challenge_ttl) {
    if (session_) fail(Errc::session_active, "a proximity session is already live");

    AuthParty holder = auth_party(holder_wallet, holder_session_did);
    AuthParty vehicle = auth_party(wallet_, wallet_.primary_did());
    AuthenticatedChannel channel =
        did_auth(holder, vehicle, resolver_, *clock_, link, challenge_ttl);

    Session s;
    s.channel = channel;
    s.verifier_nonce = wallet_.rng().nonce16();
    s.started_at = clock_->now;
    s.holder_session_did = holder_session_did;

    // Presentation binding: the nonce travels to the holder over the link.
    Json notice{{"type", "presentation_nonce"}, {"nonce", to_hex(s.verifier_nonce)}};
    Bytes body = canonicalize(notice);
    wallet_.log_message("out", holder_session_did, body, clock_->now);
    link.send(Side::B, body);
    if (auto delivered = link.recv(Side::A))
        holder_wallet.log_message("in", wallet_.primary_did(), *delivered, clock_->now);

    session_ = std::move(s);
    return *session_;
}

Decision VehicleAgent::request_access(const Presentation& presentation,
                                      const std::string& location) {
    if (!session_) fail(Errc::auth_failed, "no live session");
    if (presentation.nonce != session_->verifier_nonce)
        fail(Errc::nonce_mismatch, "presentation is not bound to this session");

    // The nonce is consumed whatever the contract says; on an unreachable
    // contract the error surfaces and the doors stay as they are.
    session_.reset();

    AuthorizationRuntime::Invocation result =
        runtime_.invoke(contract_address_, wallet_.primary_did(), presentation, location,
                        wallet_.primary_did(), clock_->now);

    if (result.decision.granted()) {
        lock_ = LockState::UNLOCKED;
        unlock_holder_ = presentation.metadata.holder_did;
    }
    return result.decision;
}

void VehicleAgent::relock(const std::string& requester_did) {
    bool authorized = requester_did == owner_did_ ||
                      (unlock_holder_ && requester_did == *unlock_holder_);
    if (!authorized) fail(Errc::unauthorized, "only the occupant or the owner may relock");
    lock_ = LockState::LOCKED;
    unlock_holder_.reset();
}

}  // namespace ssiam
