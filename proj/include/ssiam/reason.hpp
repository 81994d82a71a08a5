#pragma once

#include <string>
#include <vector>

namespace ssiam {

// Decision reason codes, kept in this declaration order whenever a list of
// reasons is serialized or compared.
enum class ReasonCode {
    OK,
    ISSUER_SIG,
    HOLDER_SIG,
    INTEGRITY,
    REVOKED,
    EXPIRED,
    NOT_YET_VALID,
    VEHICLE_NOT_ALLOWED,
    LOCATION_NOT_ALLOWED,
    OUTSIDE_TIME_WINDOW,
    CLAIM_MISMATCH,
    STALE_LEDGER_VIEW,
};

std::string to_string(ReasonCode code);
ReasonCode reason_from_string(const std::string& s);

// Sorts into declaration order and drops duplicates.
std::vector<ReasonCode> normalize_reasons(std::vector<ReasonCode> reasons);

}  // namespace ssiam
