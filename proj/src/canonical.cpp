#include "chainprocure/canonical.hpp"

#include <limits>

#include "chainprocure/error.hpp"

namespace chainprocure {

namespace {

void reject_floats(const Json& value) {
  switch (value.type()) {
    case Json::value_t::number_float:
      throw Error(ErrorCode::BadRequest, "floating-point values are not canonical");
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& item : value) reject_floats(item);
      break;
    default:
      break;
  }
}

}  // namespace

std::string canonical_json(const Json& value) {
  reject_floats(value);
  try {
    return value.dump(-1, ' ', false, Json::error_handler_t::strict);
  } catch (const Json::type_error& e) {
    throw Error(ErrorCode::BadRequest, std::string("invalid UTF-8: ") + e.what());
  }
}

Hash canonical_digest(const Json& value) { return sha256(canonical_json(value)); }

const Json& require_field(const Json& object, std::string_view key) {
  if (!object.is_object()) {
    throw Error(ErrorCode::BadRequest, "expected a JSON object");
  }
  auto it = object.find(std::string(key));
  if (it == object.end()) {
    throw Error(ErrorCode::BadRequest, "missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const Json& object, std::string_view key) {
  const auto& v = require_field(object, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::BadRequest, "field '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

std::int64_t require_int(const Json& object, std::string_view key) {
  const auto& v = require_field(object, key);
  if (v.is_number_integer() && !v.is_number_unsigned()) {
    return v.get<std::int64_t>();
  }
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      return static_cast<std::int64_t>(u);
    }
  }
  throw Error(ErrorCode::BadRequest, "field '" + std::string(key) + "' must be an integer");
}

Hash require_hash(const Json& object, std::string_view key) {
  return Hash::from_hex(require_string(object, key));
}

}  // namespace chainprocure
