#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "chainprocure/hash.hpp"

namespace chainprocure {

using Json = nlohmann::json;

// Canonical form: UTF-8 JSON, keys sorted bytewise, no insignificant
// whitespace, integers in base 10, binary values as lowercase hex strings.
// Floating-point numbers have no canonical form and are rejected.
std::string canonical_json(const Json& value);

Hash canonical_digest(const Json& value);

// Strict field accessors for transaction bodies and request payloads. All of
// them throw Error{BadRequest} naming the offending key.
const Json& require_field(const Json& object, std::string_view key);
std::string require_string(const Json& object, std::string_view key);
std::int64_t require_int(const Json& object, std::string_view key);
Hash require_hash(const Json& object, std::string_view key);

}  // namespace chainprocure
