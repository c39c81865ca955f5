#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainprocure {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);

// Throws Error{BadRequest} on odd length or non-hex characters. Upper-case
// digits are rejected: every hex string on the wire is lowercase.
Bytes from_hex(std::string_view hex);

// A 32-byte SHA-256 digest.
struct Hash {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};

  static Hash zero() { return Hash{}; }
  static Hash from_hex(std::string_view hex);

  std::string hex() const { return to_hex(bytes); }
  bool is_zero() const;

  auto operator<=>(const Hash&) const = default;
};

Hash sha256(std::span<const std::uint8_t> data);
Hash sha256(std::string_view data);

}  // namespace chainprocure

template <>
struct std::hash<chainprocure::Hash> {
  std::size_t operator()(const chainprocure::Hash& h) const noexcept {
    std::size_t out = 0;
    for (std::size_t i = 0; i < sizeof(out); ++i) {
      out = (out << 8) | h.bytes[i];
    }
    return out;
  }
};
