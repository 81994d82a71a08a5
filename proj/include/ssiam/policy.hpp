#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssiam/canonical.hpp"
#include "ssiam/clock.hpp"
#include "ssiam/credential.hpp"
#include "ssiam/reason.hpp"

namespace ssiam {

// Minutes-of-day window on a set of weekdays (0 = Monday .. 6 = Sunday).
struct TimeWindow {
    std::set<int> days;
    int start = 0;
    int end = 0;

    bool contains(uint64_t t) const;
};

struct RequiredClaim {
    std::string name;
    std::string value;  // "*" accepts any disclosed value

    static constexpr std::string_view kWildcard = "*";
};

// Owner-defined constraints. Empty allowed_vehicles denies every vehicle;
// empty locations or windows leave that dimension unrestricted.
struct AccessPolicy {
    Digest policy_id;
    std::set<std::string> allowed_vehicles;
    std::set<std::string> allowed_locations;
    std::vector<TimeWindow> time_windows;
    std::vector<RequiredClaim> required_claims;
    std::optional<uint64_t> max_validity;

    static AccessPolicy make(std::set<std::string> allowed_vehicles,
                             std::set<std::string> allowed_locations,
                             std::vector<TimeWindow> time_windows,
                             std::vector<RequiredClaim> required_claims,
                             std::optional<uint64_t> max_validity = {});

    Json body_json() const;  // everything except policy_id
    Json to_json() const;
    static AccessPolicy from_json(const Json& j);  // validates, recomputes id
};

struct PolicyContext {
    std::string vehicle_did;
    std::string location;
    uint64_t time = 0;
};

// Phase-two checks. Returns the violated codes (empty means the policy is
// satisfied); deny-overrides semantics are the caller's concern.
std::vector<ReasonCode> evaluate_policy(const AccessPolicy& policy,
                                        const std::vector<DisclosedClaim>& disclosed,
                                        const PolicyContext& context, uint64_t valid_from,
                                        uint64_t valid_until);

}  // namespace ssiam
