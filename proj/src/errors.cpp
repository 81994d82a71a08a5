#include "ssiam/errors.hpp"

namespace ssiam {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::malformed_seed: return "malformed-seed";
        case Errc::canonicalization: return "canonicalization-error";
        case Errc::parse_error: return "parse-error";
        case Errc::bad_hex: return "bad-hex";
        case Errc::observer_write: return "observer-write";
        case Errc::unknown_submitter: return "unknown-submitter";
        case Errc::missing_endorsement: return "missing-endorsement";
        case Errc::bad_signature: return "bad-signature";
        case Errc::invalid_document: return "invalid-document";
        case Errc::out_of_range: return "out-of-range";
        case Errc::not_found: return "not-found";
        case Errc::unknown_registry: return "unknown-registry";
        case Errc::unknown_index: return "unknown-index";
        case Errc::schema_mismatch: return "schema-mismatch";
        case Errc::unknown_claim: return "unknown-claim";
        case Errc::foreign_holder: return "foreign-holder";
        case Errc::wrong_passphrase: return "wrong-passphrase";
        case Errc::corrupt_payload: return "corrupt-payload";
        case Errc::unauthorized: return "unauthorized";
        case Errc::malformed_policy: return "malformed-policy";
        case Errc::unknown_contract: return "unknown-contract";
        case Errc::nonce_reused: return "nonce-reused";
        case Errc::nonce_mismatch: return "nonce-mismatch";
        case Errc::challenge_expired: return "challenge-expired";
        case Errc::auth_failed: return "auth-failed";
        case Errc::resolution_failed: return "resolution-failed";
        case Errc::session_active: return "session-active";
        case Errc::view_unavailable: return "view-unavailable";
        case Errc::ledger_corrupt: return "ledger-corrupt";
        case Errc::io_error: return "io-error";
    }
    return "unknown-error";
}

}  // namespace ssiam
