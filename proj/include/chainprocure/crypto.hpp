#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "chainprocure/hash.hpp"

namespace chainprocure::crypto {

// Ed25519 verification key.
struct PublicKey {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};

  // Throws Error{MalformedKey} unless exactly 32 bytes.
  static PublicKey from_bytes(std::span<const std::uint8_t> raw);
  static PublicKey from_hex(std::string_view hex);
  std::string hex() const { return to_hex(bytes); }

  auto operator<=>(const PublicKey&) const = default;
};

// The 32-byte Ed25519 seed. The expanded signing key is derived on demand.
struct PrivateKey {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> seed{};

  static PrivateKey from_bytes(std::span<const std::uint8_t> raw);
  static PrivateKey from_hex(std::string_view hex);
  std::string hex() const { return to_hex(seed); }

  bool operator==(const PrivateKey&) const = default;
};

struct Signature {
  static constexpr std::size_t kSize = 64;
  std::array<std::uint8_t, kSize> bytes{};

  static Signature from_bytes(std::span<const std::uint8_t> raw);
  static Signature from_hex(std::string_view hex);
  std::string hex() const { return to_hex(bytes); }

  bool operator==(const Signature&) const = default;
};

struct KeyPair {
  PrivateKey private_key;
  PublicKey public_key;
};

// "bp1" followed by the lowercase hex of the first 20 bytes of
// SHA-256(public key).
struct Address {
  static constexpr std::size_t kSize = 20;
  static constexpr std::string_view kPrefix = "bp1";
  std::array<std::uint8_t, kSize> bytes{};

  static Address from_digest(const Hash& digest);
  // Throws Error{BadRequest} on a missing prefix or bad hex.
  static Address parse(std::string_view text);
  std::string str() const;

  auto operator<=>(const Address&) const = default;
};

// With a seed: deterministic; throws Error{BadSeed} unless it is 32 bytes.
// Without: seeded from the OS CSPRNG.
KeyPair generate_keypair(std::optional<std::span<const std::uint8_t>> seed = std::nullopt);

Address derive_address(const PublicKey& key);
// Throws Error{MalformedKey} unless exactly 32 bytes.
Address derive_address(std::span<const std::uint8_t> public_key);

// Deterministic (RFC 8032): the same key and digest give the same bytes.
Signature sign(const PrivateKey& key, const Hash& digest);

// Never throws. Wrong-length keys or signatures simply fail to verify.
bool verify(std::span<const std::uint8_t> public_key, const Hash& digest,
            std::span<const std::uint8_t> signature);
bool verify(const PublicKey& key, const Hash& digest, const Signature& sig);

// Key files: canonical JSON {"private_key": hex, "public_key": hex}.
std::string key_file_json(const KeyPair& pair);
KeyPair parse_key_file(std::string_view json_text);
KeyPair load_key_file(const std::filesystem::path& path);
void save_key_file(const std::filesystem::path& path, const KeyPair& pair);

}  // namespace chainprocure::crypto
