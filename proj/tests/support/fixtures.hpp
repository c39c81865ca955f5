#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "chainprocure/client.hpp"
#include "chainprocure/procurement.hpp"

namespace chainprocure::testing {

inline crypto::KeyPair key(std::uint32_t n) {
  std::array<std::uint8_t, 32> seed{};
  seed.fill(0xa5);
  for (int i = 0; i < 4; ++i) seed[i] = static_cast<std::uint8_t>(n >> (8 * i));
  return crypto::generate_keypair(std::span<const std::uint8_t>(seed));
}

inline Address addr(const crypto::KeyPair& k) { return crypto::derive_address(k.public_key); }

inline Hash random_hash(std::mt19937_64& rng) {
  Hash h;
  for (auto& b : h.bytes) b = static_cast<std::uint8_t>(rng());
  return h;
}

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("chainprocure-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// An engine with one configured KYC verifier and helpers for the common
// setup steps. Transaction timestamps come from a counter so every
// transaction is unique.
struct Platform {
  crypto::KeyPair verifier = key(0xfeed);
  procurement::Engine engine;
  Millis next_ts = 1;

  explicit Platform(Millis pending_expiry = procurement::kDefaultPendingExpiry,
                    procurement::BlockSink sink = {})
      : engine(procurement::EngineConfig{{addr(verifier)}, pending_expiry}, std::move(sink)) {}

  Millis ts() { return next_ts++; }

  crypto::KeyPair registered(std::uint32_t n, Millis now = 0) {
    auto k = key(n);
    engine.register_user(
        client::register_user(k, "user-" + std::to_string(n),
                              notary::fingerprint("id-" + std::to_string(n)), ts()),
        now);
    return k;
  }

  crypto::KeyPair verified(std::uint32_t n, Millis now = 0) {
    auto k = registered(n, now);
    engine.verify_kyc(
        client::kyc_decision(verifier, addr(k), procurement::KycStatus::Verified, ts()), now);
    return k;
  }

  procurement::PurchaseRequest post(const crypto::KeyPair& buyer, Millis open_at, Millis close_at,
                                    Millis now = 0, const std::string& title = "office chairs") {
    auto batch = client::post_request(buyer, title, notary::fingerprint(title + "-spec"),
                                      open_at, close_at, ts());
    return engine.post_request(batch[0], batch[1], now).record;
  }

  procurement::Bid bid(const crypto::KeyPair& supplier, const Hash& request_id,
                       std::int64_t price, Millis now) {
    auto batch = client::submit_bid(supplier, request_id, price,
                                    notary::fingerprint("quote-" + std::to_string(price)), ts());
    return engine.submit_bid(batch[0], batch[1], now).record;
  }

  procurement::PurchaseRequest close(const crypto::KeyPair& buyer, const Hash& request_id,
                                     Millis now) {
    return engine.close_request(client::close_request(buyer, request_id, ts()), now).record;
  }

  procurement::Contract award(const crypto::KeyPair& buyer, const Hash& request_id,
                              const notary::Fingerprint& contract, Millis now) {
    auto ranking = engine.rank_bids(request_id);
    auto winner = ranking.empty() ? addr(buyer) : ranking.front().supplier;
    auto batch = client::award(buyer, request_id, winner, contract, ts());
    return engine.award_and_issue_contract(batch[0], batch[1], now).record;
  }

  procurement::Contract countersign(const crypto::KeyPair& party,
                                    const procurement::Contract& contract, Millis now) {
    auto batch = client::countersign_contract(party, contract, completes(contract), ts());
    std::optional<ledger::Transaction> notarization;
    if (batch.size() == 2) notarization = batch[1];
    return engine.countersign_contract(batch[0], notarization, now).record;
  }

  // Whether one more signature approves the contract's pending transaction.
  bool completes(const procurement::Contract& contract) const {
    const auto* pending = engine.find_pending(contract.contract_id);
    const auto* parties = engine.registry().find(contract.parties_account);
    if (pending == nullptr || parties == nullptr) return false;
    return pending->collected.size() + 1 >= parties->min_approvals;
  }
};

}  // namespace chainprocure::testing
