#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainprocure/ledger.hpp"
#include "chainprocure/multisig.hpp"
#include "chainprocure/notary.hpp"

namespace chainprocure::procurement {

using ledger::Transaction;
using notary::Fingerprint;

enum class KycStatus { Unverified, Verified, Rejected };
enum class RequestStatus { Open, Closed, Awarded, Contracted, Cancelled };
enum class ContractStatus { AwaitingSignatures, Effective };

std::string_view to_string(KycStatus status);
std::string_view to_string(RequestStatus status);
std::string_view to_string(ContractStatus status);
KycStatus parse_kyc_status(std::string_view name);

inline constexpr std::string_view kSpecLabel = "rfq-spec";
inline constexpr std::string_view kBidReceiptLabel = "bid-receipt";
inline constexpr std::string_view kContractLabel = "contract";

struct UserRecord {
  Address address;
  crypto::PublicKey public_key;
  std::string display_name;
  KycStatus kyc_status = KycStatus::Unverified;
  Fingerprint kyc_identity_hash;
  std::optional<Address> verifier;

  bool operator==(const UserRecord&) const = default;
};

struct PurchaseRequest {
  Hash request_id;
  Address buyer;
  std::string title;
  Fingerprint spec_fingerprint;
  Millis open_at = 0;
  Millis close_at = 0;
  RequestStatus status = RequestStatus::Open;

  bool operator==(const PurchaseRequest&) const = default;
};

// Price is in integer minor currency units.
struct Bid {
  Hash bid_id;
  Hash request_id;
  Address supplier;
  std::int64_t price = 0;
  Fingerprint doc_fingerprint;
  Millis submitted_at = 0;
  Hash receipt_tx;

  bool operator==(const Bid&) const = default;
};

struct Contract {
  Hash contract_id;
  Hash request_id;
  Hash winning_bid;
  Address parties_account;
  Fingerprint contract_fingerprint;
  ContractStatus status = ContractStatus::AwaitingSignatures;

  bool operator==(const Contract&) const = default;
};

// The canonical bid record whose fingerprint is notarized as the receipt:
// {"bid_id", "doc_fingerprint", "price", "request_id", "supplier"}.
Json bid_record(const Hash& bid_id, const Hash& request_id, const Address& supplier,
                std::int64_t price, const Fingerprint& doc_fingerprint);
Fingerprint bid_receipt_fingerprint(const Bid& bid);

// What both contract parties approve through the parties account.
Json contract_payload(const Hash& request_id, const Fingerprint& contract_fingerprint,
                      const Address& parties_account);
Json contract_payload(const Contract& contract);

// Ascending price, then earlier submitted_at, then lexicographic bid_id.
std::vector<Bid> rank(std::vector<Bid> bids);

Json to_json(const UserRecord& user);
Json to_json(const PurchaseRequest& request);
Json to_json(const Bid& bid);
Json to_json(const Contract& contract);

inline constexpr Millis kDefaultPendingExpiry = 7LL * 24 * 60 * 60 * 1000;

struct EngineConfig {
  std::vector<Address> verifiers;
  Millis pending_expiry_ms = kDefaultPendingExpiry;
};

template <class T>
struct Sealed {
  T record;
  Hash tx_id;
  std::uint64_t block_height = 0;
};

// Called with every block before it is committed. Throwing aborts the
// commit and leaves the engine unchanged.
using BlockSink = std::function<void(const ledger::Block&)>;

// The procurement state machine. All state derives from the chain: every
// accepted batch of signed transactions is sealed into exactly one block,
// and replaying the blocks rebuilds the same state. `now` is the block
// timestamp and the only clock the rules consult.
class Engine {
 public:
  explicit Engine(EngineConfig config, BlockSink sink = {});

  // Throws Error{CorruptLog} if any block is rejected by the rules.
  static Engine replay(ledger::Chain chain, EngineConfig config, BlockSink sink = {});

  Sealed<UserRecord> register_user(const Transaction& tx, Millis now);
  Sealed<UserRecord> verify_kyc(const Transaction& tx, Millis now);
  Sealed<PurchaseRequest> post_request(const Transaction& request,
                                       const Transaction& spec_notarization, Millis now);
  Sealed<Bid> submit_bid(const Transaction& bid, const Transaction& receipt, Millis now);
  Sealed<PurchaseRequest> close_request(const Transaction& tx, Millis now);
  // `create_parties` may be omitted when the 2-of-2 account already exists.
  Sealed<Contract> award_and_issue_contract(const std::optional<Transaction>& create_parties,
                                            const Transaction& issue, Millis now);
  // `notarization` accompanies the signature that completes the contract.
  Sealed<Contract> countersign_contract(const Transaction& cosign,
                                        const std::optional<Transaction>& notarization,
                                        Millis now);
  Sealed<notary::NotarizationRecord> notarize(const Transaction& tx, Millis now);
  Sealed<multisig::MultisigConfig> create_multisig(const Transaction& tx, Millis now);
  Sealed<multisig::PendingTransaction> propose(const Transaction& tx, Millis now);
  Sealed<multisig::PendingTransaction> cosign(const Transaction& tx, Millis now);

  // Validates any batch shape the rules accept and seals it into one block.
  const ledger::Block& submit(std::vector<Transaction> batch, Millis now);

  // Throws Error{UnknownRequest}.
  std::vector<Bid> rank_bids(const Hash& request_id) const;

  const UserRecord* find_user(const Address& address) const;
  const PurchaseRequest* find_request(const Hash& request_id) const;
  const Bid* find_bid(const Hash& bid_id) const;
  const Contract* find_contract(const Hash& contract_id) const;
  const multisig::PendingTransaction* find_pending(const Hash& pending_id) const;
  // In posting order.
  std::vector<PurchaseRequest> requests() const;
  const multisig::ConfigRegistry& registry() const;

  notary::AuditResult audit(const Fingerprint& fp) const;

  const ledger::Chain& chain() const { return chain_; }
  const EngineConfig& config() const { return config_; }

  // The whole derived state as canonical JSON; equal states dump equal.
  Json state_json() const;

  struct State {
    std::map<Address, UserRecord> users;
    multisig::ConfigRegistry registry;
    std::map<Hash, multisig::PendingTransaction> pendings;
    std::map<Hash, PurchaseRequest> requests;
    std::vector<Hash> request_order;
    std::map<Hash, Bid> bids;
    std::map<Hash, std::vector<Hash>> bids_by_request;
    std::map<Hash, Contract> contracts;
    std::map<Fingerprint, std::vector<notary::NotarizationRecord>> notarizations;
  };

 private:
  EngineConfig config_;
  BlockSink sink_;
  ledger::Chain chain_;
  State state_;
};

}  // namespace chainprocure::procurement
