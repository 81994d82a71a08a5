#pragma once

#include "ssiam/clock.hpp"
#include "ssiam/did.hpp"
#include "ssiam/transport.hpp"
#include "ssiam/wallet.hpp"

namespace ssiam {

constexpr uint64_t kDefaultChallengeTtl = 100;

// One side of a DID Auth exchange: the identity it speaks as plus the wallet
// supplying randomness, the nonce cache and the message log.
struct AuthParty {
    std::string did;
    Wallet* wallet = nullptr;
    std::string peer_did;  // filled in as the exchange progresses

    const KeyPair& keys() const;
};

AuthParty auth_party(Wallet& wallet, const std::string& did);

// Protocol steps, exposed so tests can replay and tamper with transcripts.
// Wire shapes: {type:"challenge", nonce, did, responder_did, issued_at, ttl}
// and {type:"response", nonce, did, proof}, canonical JSON.
Json make_challenge_message(AuthParty& self, const std::string& responder_did,
                            const LogicalClock& clock, uint64_t ttl);
Challenge challenge_of_message(const Json& challenge_message);
// Validates an incoming challenge (addressee, expiry, single use) and answers
// it with a control proof. Throws Errc::nonce_reused on a replayed challenge.
Json make_response_message(AuthParty& self, const Json& challenge_message,
                           const LogicalClock& clock);
// Verifies a control proof for a challenge this party issued; consumes the
// challenge nonce so a second response is rejected.
void accept_response(AuthParty& self, const Challenge& own_challenge, const Json& response_message,
                     const DidResolver& resolver, const LogicalClock& clock);

// Mutual challenge/response over the transport. Both directions must verify;
// returns the established channel or throws.
AuthenticatedChannel did_auth(AuthParty initiator, AuthParty responder,
                              const DidResolver& resolver, const LogicalClock& clock,
                              Transport& link, uint64_t challenge_ttl = kDefaultChallengeTtl);

}  // namespace ssiam
