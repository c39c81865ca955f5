#include "chainprocure/notary.hpp"

#include <fstream>

#include "chainprocure/error.hpp"

namespace chainprocure::notary {

Fingerprint fingerprint(std::span<const std::uint8_t> bytes) { return sha256(bytes); }

Fingerprint fingerprint(std::string_view bytes) { return sha256(bytes); }

Fingerprint fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fingerprint(data);
}

Json notarize_body(const Fingerprint& fp, const std::string& label) {
  if (label.size() > kMaxLabelLength) {
    throw Error(ErrorCode::BadRequest, "label longer than 256 characters");
  }
  return Json{{"fingerprint", fp.hex()}, {"label", label}};
}

NotarizationRecord record_from(const ledger::Block& block, const ledger::Transaction& tx) {
  if (tx.kind != ledger::TxKind::Notarize) {
    throw Error(ErrorCode::BadRequest, "not a Notarize transaction");
  }
  auto label = require_string(tx.body, "label");
  if (label.size() > kMaxLabelLength) {
    throw Error(ErrorCode::BadRequest, "label longer than 256 characters");
  }
  return NotarizationRecord{require_hash(tx.body, "fingerprint"),
                            tx.signer,
                            tx.tx_id,
                            block.header.height,
                            block.header.timestamp,
                            std::move(label)};
}

AuditResult audit(std::span<const ledger::Block> chain, const Fingerprint& fp) {
  AuditResult result;
  const auto wanted = fp.hex();
  for (const auto& block : chain) {
    for (const auto& tx : block.transactions) {
      if (tx.kind != ledger::TxKind::Notarize) continue;
      auto it = tx.body.find("fingerprint");
      if (it == tx.body.end() || !it->is_string() || it->get<std::string>() != wanted) continue;
      result.records.push_back(record_from(block, tx));
    }
  }
  result.found = !result.records.empty();
  return result;
}

Json to_json(const NotarizationRecord& record) {
  return Json{{"block_height", record.block_height},
              {"fingerprint", record.fingerprint.hex()},
              {"label", record.label},
              {"owner", record.owner.str()},
              {"timestamp", record.timestamp},
              {"tx_id", record.tx_id.hex()}};
}

Json to_json(const AuditResult& result) {
  Json records = Json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  return Json{{"found", result.found}, {"records", std::move(records)}};
}

}  // namespace chainprocure::notary
