#include "ssiam/canonical.hpp"

#include <cmath>

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

void check_representable(const Json& value) {
    switch (value.type()) {
        case Json::value_t::number_float: {
            double d = value.get<double>();
            if (!std::isfinite(d)) fail(Errc::canonicalization, "non-finite number");
            break;
        }
        case Json::value_t::binary:
            fail(Errc::canonicalization, "raw binary value; render bytes as lowercase hex");
        case Json::value_t::discarded:
            fail(Errc::canonicalization, "discarded value");
        case Json::value_t::object:
        case Json::value_t::array:
            for (const auto& item : value) check_representable(item);
            break;
        default:
            break;
    }
}

}  // namespace

std::string canonical_string(const Json& value) {
    check_representable(value);
    return value.dump();
}

Bytes canonicalize(const Json& value) {
    std::string s = canonical_string(value);
    return Bytes(s.begin(), s.end());
}

Json canonical_parse(std::span<const uint8_t> bytes) {
    return canonical_parse(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Json canonical_parse(std::string_view text) {
    Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded()) fail(Errc::parse_error, "invalid JSON");
    return parsed;
}

}  // namespace ssiam
