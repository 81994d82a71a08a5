#pragma once

#include <stdexcept>
#include <string>

namespace ssiam {

enum class Errc {
    malformed_seed,
    canonicalization,
    parse_error,
    bad_hex,
    observer_write,
    unknown_submitter,
    missing_endorsement,
    bad_signature,
    invalid_document,
    out_of_range,
    not_found,
    unknown_registry,
    unknown_index,
    schema_mismatch,
    unknown_claim,
    foreign_holder,
    wrong_passphrase,
    corrupt_payload,
    unauthorized,
    malformed_policy,
    unknown_contract,
    nonce_reused,
    nonce_mismatch,
    challenge_expired,
    auth_failed,
    resolution_failed,
    session_active,
    view_unavailable,
    ledger_corrupt,
    io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ssiam
