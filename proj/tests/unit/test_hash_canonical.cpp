#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "chainprocure/canonical.hpp"
#include "chainprocure/error.hpp"
#include "chainprocure/hash.hpp"
#include "fixtures.hpp"

using namespace chainprocure;
namespace t = chainprocure::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256(std::string_view{}).hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256("abc").hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256, BytesAndStringAgree) {
  std::string s = "chainprocure";
  Bytes b(s.begin(), s.end());
  EXPECT_EQ(sha256(std::span<const std::uint8_t>(b)), sha256(s));
  EXPECT_EQ(sha256(s).hex(), "a5d703ed5ecc8d5eb926b462d5f43bf287eae88b317ed485dd2ee59efc5e7dd5");
}

TEST(Hex, RoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto bytes = t::random_bytes(rng, rng() % 80);
    auto hex = to_hex(bytes);
    EXPECT_EQ(hex.size(), bytes.size() * 2);
    EXPECT_EQ(from_hex(hex), bytes);
  }
}

TEST(Hex, RejectsMalformed) {
  EXPECT_EQ(code_of([] { from_hex("abc"); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([] { from_hex("zz"); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([] { from_hex("AB"); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([] { Hash::from_hex(std::string(62, 'a')); }), ErrorCode::BadRequest);
}

TEST(Hash, ZeroAndOrdering) {
  EXPECT_TRUE(Hash::zero().is_zero());
  EXPECT_EQ(Hash::zero().hex(), std::string(64, '0'));
  auto a = sha256("a");
  EXPECT_FALSE(a.is_zero());
  EXPECT_EQ(Hash::from_hex(a.hex()), a);
  EXPECT_NE(sha256("a"), sha256("b"));
}

TEST(Canonical, SortsKeysAndIsCompact) {
  Json j = Json::parse(R"({"b": 1, "a": {"z": [3, 2], "y": null}, "c": "x"})");
  EXPECT_EQ(canonical_json(j), R"({"a":{"y":null,"z":[3,2]},"b":1,"c":"x"})");
}

TEST(Canonical, Utf8GoldenVector) {
  Json j = {{"b", "café \"q\"\n"}, {"a", {1, -2, 3}}};
  EXPECT_EQ(canonical_json(j), "{\"a\":[1,-2,3],\"b\":\"café \\\"q\\\"\\n\"}");
  EXPECT_EQ(canonical_digest(j).hex(),
            "69362c6985efcf5caed145ee53d124bbd01f899787af356779ff749ff6d3968a");
}

TEST(Canonical, RejectsFloats) {
  Json j = {{"price", 1.5}};
  EXPECT_EQ(code_of([&] { canonical_json(j); }), ErrorCode::BadRequest);
}

TEST(Canonical, ReparseIsIdentityProperty) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Json j = Json::object();
    int n = static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) {
      auto key = to_hex(t::random_bytes(rng, 1 + rng() % 4));
      if (rng() % 2) {
        j[key] = static_cast<std::int64_t>(rng()) / 3;
      } else {
        j[key] = to_hex(t::random_bytes(rng, rng() % 8));
      }
    }
    auto text = canonical_json(j);
    EXPECT_EQ(canonical_json(Json::parse(text)), text);
  }
}

TEST(Canonical, RequireHelpers) {
  Json j = {{"s", "x"}, {"n", 5}, {"h", sha256("a").hex()}};
  EXPECT_EQ(require_string(j, "s"), "x");
  EXPECT_EQ(require_int(j, "n"), 5);
  EXPECT_EQ(require_hash(j, "h"), sha256("a"));
  EXPECT_EQ(code_of([&] { require_field(j, "missing"); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([&] { require_int(j, "s"); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([&] { require_string(j, "n"); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([&] { require_hash(j, "s"); }), ErrorCode::BadRequest);
}

TEST(ErrorCodes, NamesAreDistinctAndStatusesMapped) {
  std::set<std::string_view> names;
  for (int c = 0; c <= static_cast<int>(ErrorCode::Io); ++c) {
    auto code = static_cast<ErrorCode>(c);
    EXPECT_TRUE(names.insert(error_code_name(code)).second) << error_code_name(code);
    auto status = http_status(code);
    EXPECT_TRUE(status >= 400 && status < 600);
  }
  EXPECT_EQ(http_status(ErrorCode::WindowClosed), 409);
  EXPECT_EQ(error_code_name(ErrorCode::WindowClosed), "WINDOW_CLOSED");
  EXPECT_EQ(http_status(ErrorCode::NotFound), 404);
  EXPECT_EQ(http_status(ErrorCode::Busy), 503);
}
