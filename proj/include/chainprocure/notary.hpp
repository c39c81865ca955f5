#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chainprocure/ledger.hpp"

namespace chainprocure::notary {

// SHA-256 of a document's exact bytes. Only fingerprints go on-chain.
using Fingerprint = Hash;

inline constexpr std::size_t kMaxLabelLength = 256;

Fingerprint fingerprint(std::span<const std::uint8_t> bytes);
Fingerprint fingerprint(std::string_view bytes);
Fingerprint fingerprint_file(const std::filesystem::path& path);

struct NotarizationRecord {
  Fingerprint fingerprint;
  Address owner;
  Hash tx_id;
  std::uint64_t block_height = 0;
  Millis timestamp = 0;
  std::string label;

  bool operator==(const NotarizationRecord&) const = default;
};

struct AuditResult {
  bool found = false;
  std::vector<NotarizationRecord> records;  // oldest first
};

// Body of a Notarize transaction. Throws Error{BadRequest} for labels over
// kMaxLabelLength.
Json notarize_body(const Fingerprint& fp, const std::string& label);

// Parses a Notarize transaction sealed in `block`.
NotarizationRecord record_from(const ledger::Block& block, const ledger::Transaction& tx);

// Scans the chain for every Notarize transaction carrying `fp`. Read-only.
AuditResult audit(std::span<const ledger::Block> chain, const Fingerprint& fp);

Json to_json(const NotarizationRecord& record);
Json to_json(const AuditResult& result);

}  // namespace chainprocure::notary
