#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>

#include "ssiam/bytes.hpp"
#include "ssiam/crypto.hpp"

namespace ssiam {

// Object keys are kept sorted by nlohmann's default std::map storage, so a
// canonical record is fully determined by its value: sorted field names, no
// insignificant whitespace, UTF-8, byte fields rendered as lowercase hex by
// their owners. Integers print without leading zeros; non-finite numbers are
// not representable and are rejected.
using Json = nlohmann::json;

std::string canonical_string(const Json& value);  // throws Errc::canonicalization
Bytes canonicalize(const Json& value);
Json canonical_parse(std::span<const uint8_t> bytes);  // throws Errc::parse_error
Json canonical_parse(std::string_view text);

inline Digest digest_of(const Json& value) { return digest(canonicalize(value)); }

}  // namespace ssiam
