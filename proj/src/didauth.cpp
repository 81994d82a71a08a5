#include "ssiam/didauth.hpp"

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

Bytes log_send(AuthParty& from, const std::string& to_did, const Json& message, uint64_t now) {
    Bytes body = canonicalize(message);
    if (from.wallet) from.wallet->log_message("out", to_did, body, now);
    return body;
}

Json log_recv(AuthParty& to, const std::string& from_did, std::optional<Bytes> body,
              uint64_t now) {
    if (!body) fail(Errc::auth_failed, "transport delivered no message");
    if (to.wallet) to.wallet->log_message("in", from_did, *body, now);
    return canonical_parse(*body);
}

}  // namespace

const KeyPair& AuthParty::keys() const {
    const KeyPair* k = wallet ? wallet->key_for(did) : nullptr;
    if (!k) fail(Errc::not_found, "party wallet does not control " + did);
    return *k;
}

AuthParty auth_party(Wallet& wallet, const std::string& did) {
    AuthParty p;
    p.did = did;
    p.wallet = &wallet;
    p.keys();  // validate ownership up front
    return p;
}

Json make_challenge_message(AuthParty& self, const std::string& responder_did,
                            const LogicalClock& clock, uint64_t ttl) {
    Challenge c;
    c.nonce = self.wallet->rng().nonce16();
    c.challenger_did = self.did;
    c.responder_did = responder_did;
    c.issued_at = clock.now;
    c.ttl = ttl;
    return Json{{"type", "challenge"},
                {"nonce", to_hex(c.nonce)},
                {"did", c.challenger_did},
                {"responder_did", c.responder_did},
                {"issued_at", c.issued_at},
                {"ttl", c.ttl}};
}

Challenge challenge_of_message(const Json& message) {
    Challenge c;
    Bytes nonce = from_hex(message.at("nonce").get<std::string>());
    if (nonce.size() != c.nonce.size()) fail(Errc::parse_error, "challenge nonce must be 16 bytes");
    std::copy(nonce.begin(), nonce.end(), c.nonce.begin());
    c.challenger_did = message.at("did").get<std::string>();
    c.responder_did = message.at("responder_did").get<std::string>();
    c.issued_at = message.at("issued_at").get<uint64_t>();
    c.ttl = message.at("ttl").get<uint64_t>();
    return c;
}

Json make_response_message(AuthParty& self, const Json& challenge_message,
                           const LogicalClock& clock) {
    if (challenge_message.value("type", "") != "challenge")
        fail(Errc::auth_failed, "expected a challenge message");
    Challenge c = challenge_of_message(challenge_message);
    if (c.responder_did != self.did)
        fail(Errc::auth_failed, "challenge addressed to " + c.responder_did);
    if (c.expired_at(clock.now)) fail(Errc::challenge_expired, "challenge ttl elapsed");
    if (!self.wallet->nonce_cache().accept(c.nonce, clock.now, c.issued_at + c.ttl))
        fail(Errc::nonce_reused, "challenge nonce already answered");
    ControlProof proof = prove_control(c, self.keys().secret_key);
    return Json{{"type", "response"},
                {"nonce", to_hex(c.nonce)},
                {"did", self.did},
                {"proof", proof.signature.hex()}};
}

void accept_response(AuthParty& self, const Challenge& own_challenge,
                     const Json& response_message, const DidResolver& resolver,
                     const LogicalClock& clock) {
    if (response_message.value("type", "") != "response")
        fail(Errc::auth_failed, "expected a response message");
    if (own_challenge.expired_at(clock.now))
        fail(Errc::challenge_expired, "challenge expired before the response arrived");
    if (response_message.at("nonce").get<std::string>() != to_hex(own_challenge.nonce))
        fail(Errc::nonce_mismatch, "response is for a different challenge");
    std::string prover_did = response_message.at("did").get<std::string>();
    if (prover_did != own_challenge.responder_did)
        fail(Errc::auth_failed, "response from unexpected party " + prover_did);
    auto doc = resolver.resolve(prover_did);
    if (!doc) fail(Errc::resolution_failed, "cannot resolve " + prover_did);
    ControlProof proof{Signature::from_hex(response_message.at("proof").get<std::string>())};
    if (!verify_control(own_challenge, proof, *doc))
        fail(Errc::bad_signature, "control proof does not verify for " + prover_did);
    if (!self.wallet->nonce_cache().accept(own_challenge.nonce, clock.now,
                                           own_challenge.issued_at + own_challenge.ttl))
        fail(Errc::nonce_reused, "a response to this challenge was already accepted");
}

AuthenticatedChannel did_auth(AuthParty initiator, AuthParty responder,
                              const DidResolver& resolver, const LogicalClock& clock,
                              Transport& link, uint64_t challenge_ttl) {
    // initiator -> responder: challenge
    Json msg1 = make_challenge_message(initiator, responder.did, clock, challenge_ttl);
    Challenge initiator_challenge = challenge_of_message(msg1);
    link.send(Side::A, log_send(initiator, responder.did, msg1, clock.now));

    // responder -> initiator: proof, then the counter-challenge
    Json received1 = log_recv(responder, initiator.did, link.recv(Side::B), clock.now);
    Json msg2 = make_response_message(responder, received1, clock);
    link.send(Side::B, log_send(responder, initiator.did, msg2, clock.now));
    Json msg3 = make_challenge_message(responder, initiator.did, clock, challenge_ttl);
    Challenge responder_challenge = challenge_of_message(msg3);
    link.send(Side::B, log_send(responder, initiator.did, msg3, clock.now));

    // initiator verifies the responder, then proves itself
    Json received2 = log_recv(initiator, responder.did, link.recv(Side::A), clock.now);
    accept_response(initiator, initiator_challenge, received2, resolver, clock);
    Json received3 = log_recv(initiator, responder.did, link.recv(Side::A), clock.now);
    Json msg4 = make_response_message(initiator, received3, clock);
    link.send(Side::A, log_send(initiator, responder.did, msg4, clock.now));

    // responder verifies the initiator
    Json received4 = log_recv(responder, initiator.did, link.recv(Side::B), clock.now);
    accept_response(responder, responder_challenge, received4, resolver, clock);

    AuthenticatedChannel channel;
    channel.session_id = digest_of(Json{{"initiator_did", initiator.did},
                                        {"responder_did", responder.did},
                                        {"initiator_nonce", to_hex(initiator_challenge.nonce)},
                                        {"responder_nonce", to_hex(responder_challenge.nonce)}});
    channel.peer_dids = {initiator.did, responder.did};
    channel.established_at = clock.now;
    return channel;
}

}  // namespace ssiam
