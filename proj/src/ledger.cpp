#include "chainprocure/ledger.hpp"

#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <unordered_set>

#include "chainprocure/error.hpp"

namespace chainprocure::ledger {

namespace {

constexpr std::array<std::pair<TxKind, std::string_view>, 9> kKindNames{{
    {TxKind::Register, "Register"},
    {TxKind::KycVerify, "KycVerify"},
    {TxKind::CreateMultisig, "CreateMultisig"},
    {TxKind::PostRequest, "PostRequest"},
    {TxKind::SubmitBid, "SubmitBid"},
    {TxKind::CloseRequest, "CloseRequest"},
    {TxKind::IssueContract, "IssueContract"},
    {TxKind::Cosign, "Cosign"},
    {TxKind::Notarize, "Notarize"},
}};

BlockHeader genesis_header() {
  std::vector<Hash> none;
  return BlockHeader{0, Hash::zero(), compute_tx_root(none), 0};
}

}  // namespace

std::string_view to_string(TxKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

TxKind parse_tx_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::BadRequest, "unknown transaction kind '" + std::string(name) + "'");
}

Hash compute_tx_id(TxKind kind, const Json& body, const Address& signer, Millis timestamp) {
  return canonical_digest(Json{{"body", body},
                               {"kind", to_string(kind)},
                               {"signer", signer.str()},
                               {"timestamp", timestamp}});
}

Transaction make_transaction(TxKind kind, Json body, const crypto::KeyPair& key,
                             Millis timestamp) {
  Transaction tx;
  tx.kind = kind;
  tx.body = std::move(body);
  tx.signer = crypto::derive_address(key.public_key);
  tx.public_key = key.public_key;
  tx.timestamp = timestamp;
  tx.tx_id = compute_tx_id(tx.kind, tx.body, tx.signer, tx.timestamp);
  tx.signature = crypto::sign(key.private_key, tx.tx_id);
  return tx;
}

bool verify_transaction(const Transaction& tx) {
  try {
    if (compute_tx_id(tx.kind, tx.body, tx.signer, tx.timestamp) != tx.tx_id) return false;
  } catch (const Error&) {
    return false;
  }
  return crypto::derive_address(tx.public_key) == tx.signer &&
         crypto::verify(tx.public_key, tx.tx_id, tx.signature);
}

Json to_json(const Transaction& tx) {
  return Json{{"body", tx.body},
              {"kind", to_string(tx.kind)},
              {"public_key", tx.public_key.hex()},
              {"signature", tx.signature.hex()},
              {"signer", tx.signer.str()},
              {"timestamp", tx.timestamp},
              {"tx_id", tx.tx_id.hex()}};
}

Transaction transaction_from_json(const Json& j) {
  Transaction tx;
  tx.tx_id = require_hash(j, "tx_id");
  tx.kind = parse_tx_kind(require_string(j, "kind"));
  tx.body = require_field(j, "body");
  if (!tx.body.is_object()) {
    throw Error(ErrorCode::BadRequest, "transaction body must be an object");
  }
  tx.signer = Address::parse(require_string(j, "signer"));
  try {
    tx.public_key = crypto::PublicKey::from_hex(require_string(j, "public_key"));
  } catch (const Error& e) {
    throw Error(ErrorCode::BadRequest, e.what());
  }
  tx.signature = crypto::Signature::from_hex(require_string(j, "signature"));
  tx.timestamp = require_int(j, "timestamp");
  return tx;
}

Hash compute_block_hash(const BlockHeader& header) {
  return canonical_digest(Json{{"height", header.height},
                               {"prev_hash", header.prev_hash.hex()},
                               {"timestamp", header.timestamp},
                               {"tx_root", header.tx_root.hex()}});
}

Hash compute_tx_root(std::span<const Hash> tx_ids) {
  Bytes concat;
  concat.reserve(tx_ids.size() * Hash::kSize);
  for (const auto& id : tx_ids) concat.insert(concat.end(), id.bytes.begin(), id.bytes.end());
  return sha256(concat);
}

Hash compute_tx_root(std::span<const Transaction> txs) {
  std::vector<Hash> ids;
  ids.reserve(txs.size());
  for (const auto& tx : txs) ids.push_back(tx.tx_id);
  return compute_tx_root(ids);
}

Json to_json(const BlockHeader& header) {
  return Json{{"height", header.height},
              {"prev_hash", header.prev_hash.hex()},
              {"timestamp", header.timestamp},
              {"tx_root", header.tx_root.hex()}};
}

Json to_json(const Block& block) {
  Json txs = Json::array();
  for (const auto& tx : block.transactions) txs.push_back(to_json(tx));
  return Json{{"block_hash", block.block_hash.hex()},
              {"header", to_json(block.header)},
              {"transactions", std::move(txs)}};
}

Block block_from_json(const Json& j) {
  Block block;
  block.block_hash = require_hash(j, "block_hash");
  const auto& header = require_field(j, "header");
  auto height = require_int(header, "height");
  if (height < 0) throw Error(ErrorCode::BadRequest, "negative block height");
  block.header.height = static_cast<std::uint64_t>(height);
  block.header.prev_hash = require_hash(header, "prev_hash");
  block.header.timestamp = require_int(header, "timestamp");
  block.header.tx_root = require_hash(header, "tx_root");
  const auto& txs = require_field(j, "transactions");
  if (!txs.is_array()) throw Error(ErrorCode::BadRequest, "transactions must be an array");
  for (const auto& tx : txs) block.transactions.push_back(transaction_from_json(tx));
  return block;
}

std::string serialize_block(const Block& block) { return canonical_json(to_json(block)); }

Block parse_block(std::string_view line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::BadRequest, "block line is not valid JSON");
  return block_from_json(j);
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::Malformed: return "malformed";
    case FailureReason::BadHeight: return "bad_height";
    case FailureReason::BadLink: return "bad_link";
    case FailureReason::BadBlockHash: return "bad_block_hash";
    case FailureReason::BadTxRoot: return "bad_tx_root";
    case FailureReason::BadTxId: return "bad_tx_id";
    case FailureReason::BadTxSignature: return "bad_tx_signature";
    case FailureReason::DuplicateTransaction: return "duplicate_transaction";
  }
  return "unknown";
}

ValidationReport ValidationReport::failure(std::uint64_t height, FailureReason reason,
                                           std::string detail) {
  return ValidationReport{false, height, reason, std::move(detail)};
}

Json to_json(const ValidationReport& report) {
  Json j{{"ok", report.ok}};
  if (!report.ok) {
    j["failed_height"] = *report.failed_height;
    j["reason"] = to_string(*report.reason);
    j["detail"] = report.detail;
  }
  return j;
}

ValidationReport validate_chain(std::span<const Block> blocks) {
  if (blocks.empty()) {
    return ValidationReport::failure(0, FailureReason::Malformed, "chain has no genesis block");
  }
  std::unordered_set<Hash> seen;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& block = blocks[i];
    const auto& header = block.header;
    const auto height = static_cast<std::uint64_t>(i);

    if (header.height != height) {
      return ValidationReport::failure(height, FailureReason::BadHeight,
                                       "expected height " + std::to_string(height));
    }
    const Hash expected_prev = i == 0 ? Hash::zero() : blocks[i - 1].block_hash;
    if (header.prev_hash != expected_prev) {
      return ValidationReport::failure(height, FailureReason::BadLink,
                                       "prev_hash does not match the preceding block");
    }
    if (compute_block_hash(header) != block.block_hash) {
      return ValidationReport::failure(height, FailureReason::BadBlockHash,
                                       "block_hash does not match the header");
    }
    if (i == 0 && (header != genesis_header() || !block.transactions.empty())) {
      return ValidationReport::failure(0, FailureReason::BadBlockHash,
                                       "block 0 is not the genesis block");
    }

    std::vector<Hash> content_ids;
    content_ids.reserve(block.transactions.size());
    try {
      for (const auto& tx : block.transactions) {
        content_ids.push_back(compute_tx_id(tx.kind, tx.body, tx.signer, tx.timestamp));
      }
    } catch (const Error& e) {
      return ValidationReport::failure(height, FailureReason::Malformed, e.what());
    }
    if (compute_tx_root(content_ids) != header.tx_root) {
      return ValidationReport::failure(height, FailureReason::BadTxRoot,
                                       "transactions do not match tx_root");
    }
    for (std::size_t t = 0; t < block.transactions.size(); ++t) {
      const auto& tx = block.transactions[t];
      if (content_ids[t] != tx.tx_id) {
        return ValidationReport::failure(height, FailureReason::BadTxId,
                                         "tx_id mismatch at index " + std::to_string(t));
      }
      if (!verify_transaction(tx)) {
        return ValidationReport::failure(height, FailureReason::BadTxSignature,
                                         "signature fails at index " + std::to_string(t));
      }
      if (!seen.insert(tx.tx_id).second) {
        return ValidationReport::failure(height, FailureReason::DuplicateTransaction,
                                         "duplicate tx " + tx.tx_id.hex());
      }
    }
  }
  return ValidationReport{};
}

Block genesis_block() {
  Block block;
  block.header = genesis_header();
  block.block_hash = compute_block_hash(block.header);
  return block;
}

Chain Chain::genesis() {
  Chain chain;
  chain.blocks_.push_back(genesis_block());
  return chain;
}

Chain Chain::from_blocks(std::vector<Block> blocks) {
  auto report = validate_chain(blocks);
  if (!report.ok) {
    throw Error(ErrorCode::CorruptLog, "chain invalid at height " +
                                           std::to_string(*report.failed_height) + ": " +
                                           std::string(to_string(*report.reason)) + " (" +
                                           report.detail + ")");
  }
  Chain chain;
  chain.blocks_ = std::move(blocks);
  for (const auto& block : chain.blocks_) chain.index_block(block);
  return chain;
}

Block Chain::prepare_block(std::vector<Transaction> txs, Millis timestamp) const {
  std::unordered_set<Hash> batch;
  for (const auto& tx : txs) {
    if (!verify_transaction(tx)) {
      throw Error(ErrorCode::InvalidSignature, "transaction " + tx.tx_id.hex() +
                                                   " fails signature verification");
    }
    if (index_.contains(tx.tx_id) || !batch.insert(tx.tx_id).second) {
      throw Error(ErrorCode::DuplicateTransaction,
                  "transaction " + tx.tx_id.hex() + " is already recorded");
    }
  }
  Block block;
  block.header.height = blocks_.size();
  block.header.prev_hash = tip().block_hash;
  block.header.tx_root = compute_tx_root(txs);
  block.header.timestamp = timestamp;
  block.transactions = std::move(txs);
  block.block_hash = compute_block_hash(block.header);
  return block;
}

const Block& Chain::commit_block(Block block) {
  if (block.header.height != blocks_.size() || block.header.prev_hash != tip().block_hash) {
    throw std::logic_error("commit_block: block was not prepared on the current tip");
  }
  blocks_.push_back(std::move(block));
  index_block(blocks_.back());
  return blocks_.back();
}

const Block& Chain::append_block(std::vector<Transaction> txs, Millis timestamp) {
  return commit_block(prepare_block(std::move(txs), timestamp));
}

std::optional<TxLocation> Chain::find_transaction(const Hash& tx_id) const {
  auto it = index_.find(tx_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Transaction& Chain::transaction_at(const TxLocation& loc) const {
  return blocks_.at(loc.height).transactions.at(loc.index);
}

void Chain::index_block(const Block& block) {
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    index_.emplace(block.transactions[i].tx_id, TxLocation{block.header.height, i});
  }
}

BlockLog::BlockLog(std::filesystem::path path) : path_(std::move(path)) {}

std::vector<std::string> BlockLog::read_lines() const {
  std::vector<std::string> lines;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

Chain BlockLog::load() {
  auto lines = read_lines();
  if (lines.empty()) {
    auto chain = Chain::genesis();
    std::ofstream truncate(path_, std::ios::binary | std::ios::trunc);
    if (!truncate) throw Error(ErrorCode::Io, "cannot create block log " + path_.string());
    truncate.close();
    append(chain.tip());
    return chain;
  }
  std::vector<Block> blocks;
  blocks.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      blocks.push_back(parse_block(lines[i]));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptLog,
                  "block log line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (serialize_block(blocks.back()) != lines[i]) {
      throw Error(ErrorCode::CorruptLog,
                  "block log line " + std::to_string(i + 1) + " is not canonical");
    }
  }
  return Chain::from_blocks(std::move(blocks));
}

void BlockLog::append(const Block& block) {
  const std::string line = serialize_block(block) + "\n";
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path_.c_str(), "ab"),
                                                         &std::fclose);
  if (!file) throw Error(ErrorCode::Io, "cannot open block log " + path_.string());
  if (std::fwrite(line.data(), 1, line.size(), file.get()) != line.size() ||
      std::fflush(file.get()) != 0 || ::fsync(::fileno(file.get())) != 0) {
    throw Error(ErrorCode::Io, "failed writing block log " + path_.string());
  }
}

}  // namespace chainprocure::ledger
