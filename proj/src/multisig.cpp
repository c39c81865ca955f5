#include "chainprocure/multisig.hpp"

#include <algorithm>
#include <functional>

#include "chainprocure/error.hpp"

namespace chainprocure::multisig {

void ConfigRegistry::add_leaf(const crypto::PublicKey& key) {
  leaves_.insert_or_assign(crypto::derive_address(key), key);
}

const crypto::PublicKey* ConfigRegistry::leaf_key(const Address& address) const {
  auto it = leaves_.find(address);
  return it == leaves_.end() ? nullptr : &it->second;
}

void ConfigRegistry::insert(MultisigConfig config) {
  auto account = config.account;
  configs_.insert_or_assign(account, std::move(config));
}

const MultisigConfig* ConfigRegistry::find(const Address& account) const {
  auto it = configs_.find(account);
  return it == configs_.end() ? nullptr : &it->second;
}

Address multisig_address(const Address& creator, std::uint32_t min_approvals,
                         std::span<const Address> cosignatories, std::uint64_t nonce) {
  Json cosigs = Json::array();
  for (const auto& c : cosignatories) cosigs.push_back(c.str());
  return Address::from_digest(canonical_digest(Json{{"cosignatories", std::move(cosigs)},
                                                    {"creator", creator.str()},
                                                    {"min_approvals", min_approvals},
                                                    {"nonce", nonce},
                                                    {"type", "multisig"}}));
}

namespace {

// Depth of the subtree rooted at `account` as seen by a config that is about
// to become `root`. Throws CycleDetected on reaching root or any address
// already on the current path.
std::uint32_t subtree_depth(const Address& account, const Address& root,
                            const ConfigRegistry& registry, std::vector<Address>& path) {
  if (account == root || std::find(path.begin(), path.end(), account) != path.end()) {
    throw Error(ErrorCode::CycleDetected,
                "cosignatory graph contains a cycle through " + account.str());
  }
  const auto* config = registry.find(account);
  if (config == nullptr) return 0;
  path.push_back(account);
  std::uint32_t deepest = 0;
  for (const auto& child : config->cosignatories) {
    deepest = std::max(deepest, subtree_depth(child, root, registry, path));
  }
  path.pop_back();
  return deepest + 1;
}

bool satisfied(const Address& node, const std::set<Address>& signers,
               const ConfigRegistry& registry, std::uint32_t level) {
  const auto* config = registry.find(node);
  if (config == nullptr) return signers.contains(node);
  if (level > kMaxDepth) {
    throw Error(ErrorCode::CycleDetected, "multisig tree deeper than the depth cap");
  }
  std::uint32_t count = 0;
  for (const auto& child : config->cosignatories) {
    if (satisfied(child, signers, registry, level + 1) && ++count >= config->min_approvals) {
      return true;
    }
  }
  return false;
}

}  // namespace

MultisigConfig validate_config(MultisigConfig config, const ConfigRegistry& registry) {
  const auto n = config.cosignatories.size();
  if (n == 0 || config.min_approvals < 1 || config.min_approvals > n) {
    throw Error(ErrorCode::BadThreshold, "need 1 <= M <= N with N >= 1; got M=" +
                                             std::to_string(config.min_approvals) +
                                             ", N=" + std::to_string(n));
  }
  std::set<Address> distinct(config.cosignatories.begin(), config.cosignatories.end());
  if (distinct.size() != n) {
    throw Error(ErrorCode::DuplicateCosignatory, "cosignatories must be pairwise distinct");
  }
  if (distinct.contains(config.account)) {
    throw Error(ErrorCode::CycleDetected, "an account cannot cosign for itself");
  }
  for (const auto& c : config.cosignatories) {
    if (!registry.is_leaf(c) && !registry.is_multisig(c)) {
      throw Error(ErrorCode::UnknownCosignatory, "unknown cosignatory " + c.str());
    }
  }
  std::uint32_t deepest = 0;
  std::vector<Address> path;
  for (const auto& c : config.cosignatories) {
    deepest = std::max(deepest, subtree_depth(c, config.account, registry, path));
  }
  config.depth = deepest + 1;
  if (config.depth > kMaxDepth) {
    throw Error(ErrorCode::DepthExceeded, "multisig depth " + std::to_string(config.depth) +
                                              " exceeds " + std::to_string(kMaxDepth));
  }
  return config;
}

const MultisigConfig& create_multisig(MultisigConfig config, ConfigRegistry& registry) {
  if (registry.is_multisig(config.account) || registry.is_leaf(config.account)) {
    throw Error(ErrorCode::DuplicateAddress, "address " + config.account.str() + " is taken");
  }
  auto validated = validate_config(std::move(config), registry);
  auto account = validated.account;
  registry.insert(std::move(validated));
  return *registry.find(account);
}

std::set<Address> reachable_leaves(const Address& account, const ConfigRegistry& registry) {
  std::set<Address> leaves;
  std::function<void(const Address&, std::uint32_t)> walk = [&](const Address& node,
                                                                std::uint32_t level) {
    const auto* config = registry.find(node);
    if (config == nullptr) {
      leaves.insert(node);
      return;
    }
    if (level > kMaxDepth) return;
    for (const auto& child : config->cosignatories) walk(child, level + 1);
  };
  if (registry.find(account) == nullptr) {
    throw Error(ErrorCode::NotMultisig, account.str() + " is not a multisig account");
  }
  walk(account, 1);
  return leaves;
}

bool is_approved(const Address& account, const std::set<Address>& signers,
                 const ConfigRegistry& registry) {
  if (registry.find(account) == nullptr) {
    throw Error(ErrorCode::UnknownAccount, "unknown multisig account " + account.str());
  }
  return satisfied(account, signers, registry, 1);
}

std::string_view to_string(PendingStatus status) {
  switch (status) {
    case PendingStatus::Open: return "Open";
    case PendingStatus::Approved: return "Approved";
    case PendingStatus::Executed: return "Executed";
    case PendingStatus::Rejected: return "Rejected";
    case PendingStatus::Expired: return "Expired";
  }
  return "Unknown";
}

std::set<Address> PendingTransaction::signers() const {
  std::set<Address> out;
  for (const auto& [addr, sig] : collected) out.insert(addr);
  return out;
}

Hash approval_digest(const Address& account, const Json& payload) {
  return canonical_digest(Json{{"account", account.str()}, {"payload", payload}});
}

PendingTransaction open_pending(const Hash& pending_id, const Address& account,
                                const Address& initiator, Json payload, Millis created_at,
                                const ConfigRegistry& registry) {
  if (!registry.is_multisig(account)) {
    throw Error(ErrorCode::NotMultisig, account.str() + " is not a multisig account");
  }
  PendingTransaction pending;
  pending.pending_id = pending_id;
  pending.account = account;
  pending.initiator = initiator;
  pending.payload = std::move(payload);
  pending.created_at = created_at;
  return pending;
}

namespace {

void check_approval(const PendingTransaction& pending, const Address& signer,
                    const crypto::Signature& approval, const ConfigRegistry& registry) {
  if (!reachable_leaves(pending.account, registry).contains(signer)) {
    throw Error(ErrorCode::NotACosignatory,
                signer.str() + " is not a cosignatory of " + pending.account.str());
  }
  const auto* key = registry.leaf_key(signer);
  if (key == nullptr ||
      !crypto::verify(*key, approval_digest(pending.account, pending.payload), approval)) {
    throw Error(ErrorCode::InvalidSignature, "approval by " + signer.str() + " does not verify");
  }
}

PendingTransaction with_approval(PendingTransaction pending, const Address& signer,
                                 const crypto::Signature& approval,
                                 const ConfigRegistry& registry) {
  pending.collected.emplace(signer, approval);
  if (is_approved(pending, registry)) pending.status = PendingStatus::Approved;
  return pending;
}

}  // namespace

PendingTransaction propose(const Hash& pending_id, const Address& account, Json payload,
                           const Address& initiator, const crypto::Signature& approval,
                           Millis created_at, const ConfigRegistry& registry) {
  auto pending =
      open_pending(pending_id, account, initiator, std::move(payload), created_at, registry);
  check_approval(pending, initiator, approval, registry);
  return with_approval(std::move(pending), initiator, approval, registry);
}

PendingTransaction cosign(const PendingTransaction& pending, const Address& signer,
                          const crypto::Signature& approval, const ConfigRegistry& registry) {
  if (pending.status != PendingStatus::Open) {
    throw Error(ErrorCode::NotOpen, "pending " + pending.pending_id.hex() + " is " +
                                        std::string(to_string(pending.status)));
  }
  if (pending.collected.contains(signer)) {
    throw Error(ErrorCode::AlreadySigned, signer.str() + " already signed");
  }
  check_approval(pending, signer, approval, registry);
  return with_approval(pending, signer, approval, registry);
}

bool is_approved(const PendingTransaction& pending, const ConfigRegistry& registry) {
  return is_approved(pending.account, pending.signers(), registry);
}

PendingTransaction execute(const PendingTransaction& pending) {
  if (pending.status != PendingStatus::Approved) {
    throw Error(ErrorCode::NotApproved, "pending " + pending.pending_id.hex() + " is " +
                                            std::string(to_string(pending.status)));
  }
  auto out = pending;
  out.status = PendingStatus::Executed;
  return out;
}

PendingTransaction expire_if_due(const PendingTransaction& pending, Millis now, Millis window) {
  if (pending.status != PendingStatus::Open || now < pending.created_at + window) {
    return pending;
  }
  auto out = pending;
  out.status = PendingStatus::Expired;
  return out;
}

Json to_json(const MultisigConfig& config) {
  Json cosigs = Json::array();
  for (const auto& c : config.cosignatories) cosigs.push_back(c.str());
  return Json{{"account", config.account.str()},
              {"cosignatories", std::move(cosigs)},
              {"depth", config.depth},
              {"min_approvals", config.min_approvals}};
}

Json to_json(const PendingTransaction& pending) {
  Json collected = Json::object();
  for (const auto& [addr, sig] : pending.collected) collected[addr.str()] = sig.hex();
  return Json{{"account", pending.account.str()},
              {"collected", std::move(collected)},
              {"created_at", pending.created_at},
              {"initiator", pending.initiator.str()},
              {"payload", pending.payload},
              {"pending_id", pending.pending_id.hex()},
              {"status", to_string(pending.status)}};
}

}  // namespace chainprocure::multisig
