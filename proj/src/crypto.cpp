#include "chainprocure/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chainprocure/canonical.hpp"
#include "chainprocure/error.hpp"

namespace chainprocure::crypto {

namespace {

void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) {
      throw Error(ErrorCode::Io, "libsodium failed to initialise");
    }
    return true;
  }();
  (void)ready;
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed(std::span<const std::uint8_t> raw, ErrorCode code,
                                  const char* what) {
  if (raw.size() != N) {
    throw Error(code, std::string(what) + " must be " + std::to_string(N) + " bytes, got " +
                          std::to_string(raw.size()));
  }
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

Bytes hex_or(std::string_view hex, ErrorCode code) {
  try {
    return from_hex(hex);
  } catch (const Error& e) {
    throw Error(code, e.what());
  }
}

}  // namespace

PublicKey PublicKey::from_bytes(std::span<const std::uint8_t> raw) {
  return PublicKey{fixed<kSize>(raw, ErrorCode::MalformedKey, "public key")};
}

PublicKey PublicKey::from_hex(std::string_view hex) {
  return from_bytes(hex_or(hex, ErrorCode::MalformedKey));
}

PrivateKey PrivateKey::from_bytes(std::span<const std::uint8_t> raw) {
  return PrivateKey{fixed<kSize>(raw, ErrorCode::MalformedKey, "private key")};
}

PrivateKey PrivateKey::from_hex(std::string_view hex) {
  return from_bytes(hex_or(hex, ErrorCode::MalformedKey));
}

Signature Signature::from_bytes(std::span<const std::uint8_t> raw) {
  return Signature{fixed<kSize>(raw, ErrorCode::BadRequest, "signature")};
}

Signature Signature::from_hex(std::string_view hex) {
  return from_bytes(chainprocure::from_hex(hex));
}

Address Address::from_digest(const Hash& digest) {
  Address a;
  std::copy_n(digest.bytes.begin(), kSize, a.bytes.begin());
  return a;
}

Address Address::parse(std::string_view text) {
  if (!text.starts_with(kPrefix)) {
    throw Error(ErrorCode::BadRequest, "address must start with 'bp1'");
  }
  auto raw = from_hex(text.substr(kPrefix.size()));
  return Address{fixed<kSize>(raw, ErrorCode::BadRequest, "address")};
}

std::string Address::str() const { return std::string(kPrefix) + to_hex(bytes); }

KeyPair generate_keypair(std::optional<std::span<const std::uint8_t>> seed) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_sign_SEEDBYTES> material{};
  if (seed) {
    material = fixed<crypto_sign_SEEDBYTES>(*seed, ErrorCode::BadSeed, "seed");
  } else {
    randombytes_buf(material.data(), material.size());
  }
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  crypto_sign_seed_keypair(pk.data(), sk.data(), material.data());
  sodium_memzero(sk.data(), sk.size());
  return KeyPair{PrivateKey{material}, PublicKey{pk}};
}

Address derive_address(const PublicKey& key) {
  return Address::from_digest(sha256(std::span<const std::uint8_t>(key.bytes)));
}

Address derive_address(std::span<const std::uint8_t> public_key) {
  return derive_address(PublicKey::from_bytes(public_key));
}

Signature sign(const PrivateKey& key, const Hash& digest) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  crypto_sign_seed_keypair(pk.data(), sk.data(), key.seed.data());
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, digest.bytes.data(), digest.bytes.size(),
                       sk.data());
  sodium_memzero(sk.data(), sk.size());
  return sig;
}

bool verify(std::span<const std::uint8_t> public_key, const Hash& digest,
            std::span<const std::uint8_t> signature) {
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES) {
    return false;
  }
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(), digest.bytes.data(), digest.bytes.size(),
                                     public_key.data()) == 0;
}

bool verify(const PublicKey& key, const Hash& digest, const Signature& sig) {
  return verify(key.bytes, digest, sig.bytes);
}

std::string key_file_json(const KeyPair& pair) {
  return canonical_json(
      Json{{"private_key", pair.private_key.hex()}, {"public_key", pair.public_key.hex()}});
}

KeyPair parse_key_file(std::string_view json_text) {
  Json doc = Json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::MalformedKey, "key file is not valid JSON");
  }
  auto priv = PrivateKey::from_hex(require_string(doc, "private_key"));
  auto pub = PublicKey::from_hex(require_string(doc, "public_key"));
  auto regenerated = generate_keypair(std::span<const std::uint8_t>(priv.seed));
  if (regenerated.public_key != pub) {
    throw Error(ErrorCode::MalformedKey, "public key does not match private key");
  }
  return regenerated;
}

KeyPair load_key_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open key file " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_file(buf.str());
}

void save_key_file(const std::filesystem::path& path, const KeyPair& pair) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write key file " + path.string());
  }
  out << key_file_json(pair) << '\n';
}

}  // namespace chainprocure::crypto
