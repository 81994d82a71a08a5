#include "ssiam/reason.hpp"

#include <algorithm>

#include "ssiam/errors.hpp"

namespace ssiam {

std::string to_string(ReasonCode code) {
    switch (code) {
        case ReasonCode::OK: return "OK";
        case ReasonCode::ISSUER_SIG: return "ISSUER_SIG";
        case ReasonCode::HOLDER_SIG: return "HOLDER_SIG";
        case ReasonCode::INTEGRITY: return "INTEGRITY";
        case ReasonCode::REVOKED: return "REVOKED";
        case ReasonCode::EXPIRED: return "EXPIRED";
        case ReasonCode::NOT_YET_VALID: return "NOT_YET_VALID";
        case ReasonCode::VEHICLE_NOT_ALLOWED: return "VEHICLE_NOT_ALLOWED";
        case ReasonCode::LOCATION_NOT_ALLOWED: return "LOCATION_NOT_ALLOWED";
        case ReasonCode::OUTSIDE_TIME_WINDOW: return "OUTSIDE_TIME_WINDOW";
        case ReasonCode::CLAIM_MISMATCH: return "CLAIM_MISMATCH";
        case ReasonCode::STALE_LEDGER_VIEW: return "STALE_LEDGER_VIEW";
    }
    fail(Errc::parse_error, "bad reason code");
}

ReasonCode reason_from_string(const std::string& s) {
    static const std::pair<const char*, ReasonCode> table[] = {
        {"OK", ReasonCode::OK},
        {"ISSUER_SIG", ReasonCode::ISSUER_SIG},
        {"HOLDER_SIG", ReasonCode::HOLDER_SIG},
        {"INTEGRITY", ReasonCode::INTEGRITY},
        {"REVOKED", ReasonCode::REVOKED},
        {"EXPIRED", ReasonCode::EXPIRED},
        {"NOT_YET_VALID", ReasonCode::NOT_YET_VALID},
        {"VEHICLE_NOT_ALLOWED", ReasonCode::VEHICLE_NOT_ALLOWED},
        {"LOCATION_NOT_ALLOWED", ReasonCode::LOCATION_NOT_ALLOWED},
        {"OUTSIDE_TIME_WINDOW", ReasonCode::OUTSIDE_TIME_WINDOW},
        {"CLAIM_MISMATCH", ReasonCode::CLAIM_MISMATCH},
        {"STALE_LEDGER_VIEW", ReasonCode::STALE_LEDGER_VIEW},
    };
    for (const auto& [name, code] : table)
        if (s == name) return code;
    fail(Errc::parse_error, "unknown reason code: " + s);
}

std::vector<ReasonCode> normalize_reasons(std::vector<ReasonCode> reasons) {
    std::sort(reasons.begin(), reasons.end());
    reasons.erase(std::unique(reasons.begin(), reasons.end()), reasons.end());
    return reasons;
}

}  // namespace ssiam
