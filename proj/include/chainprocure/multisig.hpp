#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "chainprocure/canonical.hpp"
#include "chainprocure/crypto.hpp"
#include "chainprocure/ledger.hpp"

namespace chainprocure::multisig {

inline constexpr std::uint32_t kMaxDepth = 3;

// An M-of-N account. Cosignatories are either leaf key addresses or other
// multisig accounts; depth is 1 for a flat account.
struct MultisigConfig {
  Address account;
  std::uint32_t min_approvals = 1;
  std::vector<Address> cosignatories;
  std::uint32_t depth = 1;

  bool operator==(const MultisigConfig&) const = default;
};

// Known multisig accounts plus the leaf keys allowed to appear in them.
class ConfigRegistry {
 public:
  void add_leaf(const crypto::PublicKey& key);
  bool is_leaf(const Address& address) const { return leaves_.contains(address); }
  const crypto::PublicKey* leaf_key(const Address& address) const;

  // Stores the config as-is. Callers that need the invariants checked go
  // through create_multisig.
  void insert(MultisigConfig config);
  const MultisigConfig* find(const Address& account) const;
  bool is_multisig(const Address& address) const { return configs_.contains(address); }

  const std::map<Address, MultisigConfig>& configs() const { return configs_; }

 private:
  std::map<Address, crypto::PublicKey> leaves_;
  std::map<Address, MultisigConfig> configs_;
};

// Deterministic account address for a new multisig created by `creator`.
Address multisig_address(const Address& creator, std::uint32_t min_approvals,
                         std::span<const Address> cosignatories, std::uint64_t nonce);

// Checks threshold, distinctness, known cosignatories, acyclicity and the
// depth cap against the registry. Returns the config with depth filled in.
MultisigConfig validate_config(MultisigConfig config, const ConfigRegistry& registry);

// validate_config, then registers the account. Error{DuplicateAddress} if
// the account address is already taken.
const MultisigConfig& create_multisig(MultisigConfig config, ConfigRegistry& registry);

// Every leaf address in the account's tree, deduplicated.
std::set<Address> reachable_leaves(const Address& account, const ConfigRegistry& registry);

// A leaf is satisfied iff it signed; a nested account iff at least its own
// M cosignatories are satisfied. Throws Error{UnknownAccount}.
bool is_approved(const Address& account, const std::set<Address>& signers,
                 const ConfigRegistry& registry);

enum class PendingStatus { Open, Approved, Executed, Rejected, Expired };

std::string_view to_string(PendingStatus status);

struct PendingTransaction {
  Hash pending_id;
  Address account;
  Address initiator;
  Json payload = Json::object();
  std::map<Address, crypto::Signature> collected;
  Millis created_at = 0;
  PendingStatus status = PendingStatus::Open;

  std::set<Address> signers() const;

  bool operator==(const PendingTransaction&) const = default;
};

// What every cosignatory signs: digest of canonical {"account", "payload"}.
Hash approval_digest(const Address& account, const Json& payload);

// An Open pending with nothing collected yet.
PendingTransaction open_pending(const Hash& pending_id, const Address& account,
                                const Address& initiator, Json payload, Millis created_at,
                                const ConfigRegistry& registry);

// An Open pending carrying the initiator's approval. Throws
// Error{NotMultisig}, Error{NotACosignatory} or Error{InvalidSignature}.
PendingTransaction propose(const Hash& pending_id, const Address& account, Json payload,
                           const Address& initiator, const crypto::Signature& approval,
                           Millis created_at, const ConfigRegistry& registry);

// Adds one approval; moves Open -> Approved when the tree is satisfied.
PendingTransaction cosign(const PendingTransaction& pending, const Address& signer,
                          const crypto::Signature& approval, const ConfigRegistry& registry);

bool is_approved(const PendingTransaction& pending, const ConfigRegistry& registry);

// Approved -> Executed. Anything else is Error{NotApproved}.
PendingTransaction execute(const PendingTransaction& pending);

// Open pendings older than `window` become Expired.
PendingTransaction expire_if_due(const PendingTransaction& pending, Millis now, Millis window);

Json to_json(const MultisigConfig& config);
Json to_json(const PendingTransaction& pending);

}  // namespace chainprocure::multisig
