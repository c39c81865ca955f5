#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chainprocure/canonical.hpp"
#include "chainprocure/crypto.hpp"
#include "chainprocure/hash.hpp"

namespace chainprocure {

// UTC milliseconds since the epoch.
using Millis = std::int64_t;

using crypto::Address;

namespace ledger {

enum class TxKind {
  Register,
  KycVerify,
  CreateMultisig,
  PostRequest,
  SubmitBid,
  CloseRequest,
  IssueContract,
  Cosign,
  Notarize,
};

std::string_view to_string(TxKind kind);
// Throws Error{BadRequest} for an unknown name.
TxKind parse_tx_kind(std::string_view name);

// A signed ledger event. The signer's public key travels with the
// transaction so any holder of the chain can check signatures without
// outside state.
struct Transaction {
  Hash tx_id;
  TxKind kind = TxKind::Register;
  Json body = Json::object();
  Address signer;
  crypto::PublicKey public_key;
  crypto::Signature signature;
  Millis timestamp = 0;

  bool operator==(const Transaction&) const = default;
};

// Digest of canonical {"body", "kind", "signer", "timestamp"}.
Hash compute_tx_id(TxKind kind, const Json& body, const Address& signer, Millis timestamp);

Transaction make_transaction(TxKind kind, Json body, const crypto::KeyPair& key, Millis timestamp);

// True iff tx_id matches the content, signer is the address of public_key,
// and the signature verifies over tx_id.
bool verify_transaction(const Transaction& tx);

Json to_json(const Transaction& tx);
Transaction transaction_from_json(const Json& j);

struct BlockHeader {
  std::uint64_t height = 0;
  Hash prev_hash;
  Hash tx_root;
  Millis timestamp = 0;

  bool operator==(const BlockHeader&) const = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;
  Hash block_hash;

  bool operator==(const Block&) const = default;
};

Hash compute_block_hash(const BlockHeader& header);
// SHA-256 over the concatenated tx_id bytes, in block order.
Hash compute_tx_root(std::span<const Hash> tx_ids);
Hash compute_tx_root(std::span<const Transaction> txs);

Json to_json(const BlockHeader& header);
Json to_json(const Block& block);
Block block_from_json(const Json& j);

// One canonical-JSON line, without the terminating LF.
std::string serialize_block(const Block& block);
Block parse_block(std::string_view line);

enum class FailureReason {
  Malformed,
  BadHeight,
  BadLink,
  BadBlockHash,
  BadTxRoot,
  BadTxId,
  BadTxSignature,
  DuplicateTransaction,
};

std::string_view to_string(FailureReason reason);

struct ValidationReport {
  bool ok = true;
  std::optional<std::uint64_t> failed_height;
  std::optional<FailureReason> reason;
  std::string detail;

  static ValidationReport failure(std::uint64_t height, FailureReason reason, std::string detail);
};

Json to_json(const ValidationReport& report);

// Reports the first failing block. Failures are values, never exceptions.
ValidationReport validate_chain(std::span<const Block> blocks);

struct TxLocation {
  std::uint64_t height = 0;
  std::size_t index = 0;
};

// The fixed block at height 0: no transactions, all-zero prev_hash,
// timestamp 0.
Block genesis_block();

// Append-only chain with a tx_id index. Every mutation keeps the chain valid.
class Chain {
 public:
  static Chain genesis();

  // Validates and adopts an existing block sequence (e.g. a replayed log).
  // Throws Error{CorruptLog} with the validation detail on failure.
  static Chain from_blocks(std::vector<Block> blocks);

  // Throws Error{InvalidSignature} or Error{DuplicateTransaction}; the chain
  // is unchanged on failure.
  const Block& append_block(std::vector<Transaction> txs, Millis timestamp);

  // Builds the block append_block would seal, without appending it.
  Block prepare_block(std::vector<Transaction> txs, Millis timestamp) const;
  // Appends a block produced by prepare_block on the current tip.
  const Block& commit_block(Block block);

  std::optional<TxLocation> find_transaction(const Hash& tx_id) const;
  const Transaction& transaction_at(const TxLocation& loc) const;
  bool contains(const Hash& tx_id) const { return index_.contains(tx_id); }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const Block& tip() const { return blocks_.back(); }

 private:
  Chain() = default;
  void index_block(const Block& block);

  std::vector<Block> blocks_;
  std::unordered_map<Hash, TxLocation> index_;
};

// Append-only file holding one canonical-JSON block per line (LF).
class BlockLog {
 public:
  explicit BlockLog(std::filesystem::path path);

  // Replays the log. A missing or empty file is initialised with the genesis
  // block. Throws Error{CorruptLog} if any line fails to parse or the
  // recomputed hashes disagree.
  Chain load();

  // Reads every line without validating; used to audit the file on disk.
  std::vector<std::string> read_lines() const;

  void append(const Block& block);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ledger
}  // namespace chainprocure
