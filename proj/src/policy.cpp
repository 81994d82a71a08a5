#include "ssiam/policy.hpp"

#include <algorithm>

#include "ssiam/errors.hpp"

namespace ssiam {

bool TimeWindow::contains(uint64_t t) const {
    if (!days.count(weekday_of(t))) return false;
    int minute = minute_of_day(t);
    return minute >= start && minute < end;
}

AccessPolicy AccessPolicy::make(std::set<std::string> allowed_vehicles,
                                std::set<std::string> allowed_locations,
                                std::vector<TimeWindow> time_windows,
                                std::vector<RequiredClaim> required_claims,
                                std::optional<uint64_t> max_validity) {
    AccessPolicy p;
    p.allowed_vehicles = std::move(allowed_vehicles);
    p.allowed_locations = std::move(allowed_locations);
    p.time_windows = std::move(time_windows);
    p.required_claims = std::move(required_claims);
    p.max_validity = max_validity;
    for (const auto& w : p.time_windows) {
        if (!(0 <= w.start && w.start < w.end && w.end <= 1440))
            fail(Errc::malformed_policy, "time window needs 0 <= start < end <= 1440");
        for (int d : w.days)
            if (d < 0 || d > 6) fail(Errc::malformed_policy, "weekday must be 0..6");
    }
    for (const auto& rc : p.required_claims)
        if (rc.name.empty()) fail(Errc::malformed_policy, "required claim needs a name");
    p.policy_id = digest_of(p.body_json());
    return p;
}

Json AccessPolicy::body_json() const {
    Json windows = Json::array();
    for (const auto& w : time_windows)
        windows.push_back(
            {{"days", std::vector<int>(w.days.begin(), w.days.end())},
             {"start", w.start},
             {"end", w.end}});
    Json claims = Json::array();
    for (const auto& rc : required_claims)
        claims.push_back({{"name", rc.name}, {"value", rc.value}});
    Json j{{"allowed_vehicles",
            std::vector<std::string>(allowed_vehicles.begin(), allowed_vehicles.end())},
           {"allowed_locations",
            std::vector<std::string>(allowed_locations.begin(), allowed_locations.end())},
           {"time_windows", windows},
           {"required_claims", claims}};
    if (max_validity) j["max_validity"] = *max_validity;
    return j;
}

Json AccessPolicy::to_json() const {
    Json j = body_json();
    j["policy_id"] = policy_id.hex();
    return j;
}

AccessPolicy AccessPolicy::from_json(const Json& j) {
    std::set<std::string> vehicles;
    for (const auto& v : j.at("allowed_vehicles")) vehicles.insert(v.get<std::string>());
    std::set<std::string> locations;
    if (j.contains("allowed_locations"))
        for (const auto& l : j.at("allowed_locations")) locations.insert(l.get<std::string>());
    std::vector<TimeWindow> windows;
    if (j.contains("time_windows"))
        for (const auto& w : j.at("time_windows")) {
            TimeWindow tw;
            for (const auto& d : w.at("days")) tw.days.insert(d.get<int>());
            tw.start = w.at("start").get<int>();
            tw.end = w.at("end").get<int>();
            windows.push_back(tw);
        }
    std::vector<RequiredClaim> claims;
    if (j.contains("required_claims"))
        for (const auto& rc : j.at("required_claims"))
            claims.push_back({rc.at("name").get<std::string>(), rc.at("value").get<std::string>()});
    std::optional<uint64_t> max_validity;
    if (j.contains("max_validity")) max_validity = j.at("max_validity").get<uint64_t>();
    return make(std::move(vehicles), std::move(locations), std::move(windows), std::move(claims),
                max_validity);
}

std::vector<ReasonCode> evaluate_policy(const AccessPolicy& policy,
                                        const std::vector<DisclosedClaim>& disclosed,
                                        const PolicyContext& context, uint64_t valid_from,
                                        uint64_t valid_until) {
    std::vector<ReasonCode> violated;

    if (!policy.allowed_vehicles.count(context.vehicle_did))
        violated.push_back(ReasonCode::VEHICLE_NOT_ALLOWED);

    if (!policy.allowed_locations.empty() && !policy.allowed_locations.count(context.location))
        violated.push_back(ReasonCode::LOCATION_NOT_ALLOWED);

    if (!policy.time_windows.empty()) {
        bool inside = std::any_of(policy.time_windows.begin(), policy.time_windows.end(),
                                  [&](const TimeWindow& w) { return w.contains(context.time); });
        if (!inside) violated.push_back(ReasonCode::OUTSIDE_TIME_WINDOW);
    }

    bool claims_ok = true;
    for (const auto& rc : policy.required_claims) {
        auto it = std::find_if(disclosed.begin(), disclosed.end(),
                               [&](const DisclosedClaim& d) { return d.name == rc.name; });
        if (it == disclosed.end() ||
            (rc.value != RequiredClaim::kWildcard && it->value != rc.value))
            claims_ok = false;
    }
    if (!claims_ok) violated.push_back(ReasonCode::CLAIM_MISMATCH);

    // A credential window longer than the owner's cap counts as expired.
    if (policy.max_validity && valid_until - valid_from > *policy.max_validity)
        violated.push_back(ReasonCode::EXPIRED);

    return normalize_reasons(violated);
}

}  // namespace ssiam
