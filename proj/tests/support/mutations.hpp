#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chainprocure/ledger.hpp"
#include "chainprocure/notary.hpp"
#include "fixtures.hpp"

namespace chainprocure::testing {

// A chain of `blocks` blocks after genesis, each holding 1 to 3 signed
// notarizations from a small pool of keys.
inline ledger::Chain random_chain(std::mt19937_64& rng, int blocks) {
  std::vector<crypto::KeyPair> keys;
  for (std::uint32_t i = 0; i < 4; ++i) keys.push_back(key(100 + i));
  auto chain = ledger::Chain::genesis();
  Millis ts = 1;
  for (int b = 1; b <= blocks; ++b) {
    std::vector<ledger::Transaction> txs;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      const auto& k = keys[rng() % keys.size()];
      auto body = notary::notarize_body(random_hash(rng), "doc-" + std::to_string(rng() % 1000));
      txs.push_back(ledger::make_transaction(ledger::TxKind::Notarize, body, k, ts++));
    }
    chain.append_block(std::move(txs), 1000 * b);
  }
  return chain;
}

struct Mutation {
  std::uint64_t height = 0;
  std::string field;
};

inline void flip_bit(std::span<std::uint8_t> bytes, std::mt19937_64& rng) {
  auto bit = rng() % (bytes.size() * 8);
  bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
}

inline void mutate_body(Json& body, std::mt19937_64& rng) {
  auto it = body.begin();
  std::advance(it, static_cast<long>(rng() % body.size()));
  if (it->is_string()) {
    auto s = it->get<std::string>();
    if (s.empty()) {
      s = "x";
    } else {
      s[rng() % s.size()] ^= 0x01;
    }
    *it = s;
  } else if (it->is_number_integer()) {
    *it = it->get<std::int64_t>() + 1;
  } else {
    *it = "tampered";
  }
}

// Changes exactly one field of one block, genesis included, in place.
inline Mutation mutate_one_field(std::vector<ledger::Block>& blocks, std::mt19937_64& rng) {
  auto h = rng() % blocks.size();
  auto& block = blocks[h];
  if (block.transactions.empty()) {
    switch (rng() % 5) {
      case 0: block.header.height += 1 + rng() % 5; return {h, "height"};
      case 1: flip_bit(block.header.prev_hash.bytes, rng); return {h, "prev_hash"};
      case 2: flip_bit(block.header.tx_root.bytes, rng); return {h, "tx_root"};
      case 3: block.header.timestamp += 1 + static_cast<Millis>(rng() % 1000); return {h, "timestamp"};
      default: flip_bit(block.block_hash.bytes, rng); return {h, "block_hash"};
    }
  }
  auto& tx = block.transactions[rng() % block.transactions.size()];
  switch (rng() % 12) {
    case 0: block.header.height += 1 + rng() % 5; return {h, "height"};
    case 1: flip_bit(block.header.prev_hash.bytes, rng); return {h, "prev_hash"};
    case 2: flip_bit(block.header.tx_root.bytes, rng); return {h, "tx_root"};
    case 3: block.header.timestamp += 1 + static_cast<Millis>(rng() % 1000); return {h, "timestamp"};
    case 4: flip_bit(block.block_hash.bytes, rng); return {h, "block_hash"};
    case 5: flip_bit(tx.tx_id.bytes, rng); return {h, "tx.tx_id"};
    case 6: mutate_body(tx.body, rng); return {h, "tx.body"};
    case 7: flip_bit(tx.signer.bytes, rng); return {h, "tx.signer"};
    case 8: flip_bit(tx.public_key.bytes, rng); return {h, "tx.public_key"};
    case 9: flip_bit(tx.signature.bytes, rng); return {h, "tx.signature"};
    case 10: tx.timestamp += 1 + static_cast<Millis>(rng() % 1000); return {h, "tx.timestamp"};
    default: tx.kind = ledger::TxKind::Register; return {h, "tx.kind"};
  }
}

}  // namespace chainprocure::testing
