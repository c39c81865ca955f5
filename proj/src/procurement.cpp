#include "chainprocure/procurement.hpp"

#include <algorithm>
#include <set>

#include "chainprocure/error.hpp"

namespace chainprocure::procurement {

using ledger::TxKind;

std::string_view to_string(KycStatus status) {
  switch (status) {
    case KycStatus::Unverified: return "Unverified";
    case KycStatus::Verified: return "Verified";
    case KycStatus::Rejected: return "Rejected";
  }
  return "Unknown";
}

std::string_view to_string(RequestStatus status) {
  switch (status) {
    case RequestStatus::Open: return "Open";
    case RequestStatus::Closed: return "Closed";
    case RequestStatus::Awarded: return "Awarded";
    case RequestStatus::Contracted: return "Contracted";
    case RequestStatus::Cancelled: return "Cancelled";
  }
  return "Unknown";
}

std::string_view to_string(ContractStatus status) {
  switch (status) {
    case ContractStatus::AwaitingSignatures: return "AwaitingSignatures";
    case ContractStatus::Effective: return "Effective";
  }
  return "Unknown";
}

KycStatus parse_kyc_status(std::string_view name) {
  if (name == "Verified") return KycStatus::Verified;
  if (name == "Rejected") return KycStatus::Rejected;
  throw Error(ErrorCode::BadRequest, "KYC decision must be Verified or Rejected");
}

Json bid_record(const Hash& bid_id, const Hash& request_id, const Address& supplier,
                std::int64_t price, const Fingerprint& doc_fingerprint) {
  return Json{{"bid_id", bid_id.hex()},
              {"doc_fingerprint", doc_fingerprint.hex()},
              {"price", price},
              {"request_id", request_id.hex()},
              {"supplier", supplier.str()}};
}

Fingerprint bid_receipt_fingerprint(const Bid& bid) {
  return notary::fingerprint(canonical_json(
      bid_record(bid.bid_id, bid.request_id, bid.supplier, bid.price, bid.doc_fingerprint)));
}

Json contract_payload(const Hash& request_id, const Fingerprint& contract_fingerprint,
                      const Address& parties_account) {
  return Json{{"contract_fingerprint", contract_fingerprint.hex()},
              {"parties_account", parties_account.str()},
              {"request_id", request_id.hex()}};
}

Json contract_payload(const Contract& contract) {
  return contract_payload(contract.request_id, contract.contract_fingerprint,
                          contract.parties_account);
}

std::vector<Bid> rank(std::vector<Bid> bids) {
  std::sort(bids.begin(), bids.end(), [](const Bid& a, const Bid& b) {
    if (a.price != b.price) return a.price < b.price;
    if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
    return a.bid_id < b.bid_id;
  });
  return bids;
}

Json to_json(const UserRecord& user) {
  return Json{{"address", user.address.str()},
              {"display_name", user.display_name},
              {"kyc_identity_hash", user.kyc_identity_hash.hex()},
              {"kyc_status", to_string(user.kyc_status)},
              {"public_key", user.public_key.hex()},
              {"verifier", user.verifier ? Json(user.verifier->str()) : Json(nullptr)}};
}

Json to_json(const PurchaseRequest& request) {
  return Json{{"buyer", request.buyer.str()},
              {"close_at", request.close_at},
              {"open_at", request.open_at},
              {"request_id", request.request_id.hex()},
              {"spec_fingerprint", request.spec_fingerprint.hex()},
              {"status", to_string(request.status)},
              {"title", request.title}};
}

Json to_json(const Bid& bid) {
  return Json{{"bid_id", bid.bid_id.hex()},
              {"doc_fingerprint", bid.doc_fingerprint.hex()},
              {"price", bid.price},
              {"receipt_tx", bid.receipt_tx.hex()},
              {"request_id", bid.request_id.hex()},
              {"submitted_at", bid.submitted_at},
              {"supplier", bid.supplier.str()}};
}

Json to_json(const Contract& contract) {
  return Json{{"contract_fingerprint", contract.contract_fingerprint.hex()},
              {"contract_id", contract.contract_id.hex()},
              {"parties_account", contract.parties_account.str()},
              {"request_id", contract.request_id.hex()},
              {"status", to_string(contract.status)},
              {"winning_bid", contract.winning_bid.hex()}};
}

namespace {

using State = Engine::State;

struct BatchContext {
  Millis now;
  std::uint64_t height;
  const EngineConfig& config;
};

[[noreturn]] void bad_shape(const std::string& what) {
  throw Error(ErrorCode::BadRequest, "unexpected batch shape: " + what);
}

void expect_kind(const Transaction& tx, TxKind kind) {
  if (tx.kind != kind) {
    bad_shape("expected " + std::string(ledger::to_string(kind)) + ", got " +
              std::string(ledger::to_string(tx.kind)));
  }
}

void expect_size(std::span<const Transaction> batch, std::size_t n) {
  if (batch.size() != n) {
    bad_shape(std::string(ledger::to_string(batch.front().kind)) + " batch needs " +
              std::to_string(n) + " transaction(s)");
  }
}

// Companion notarization: same signer, expected fingerprint and label.
void expect_notarization(const Transaction& tx, const Address& signer, const Fingerprint& fp,
                         std::string_view label) {
  expect_kind(tx, TxKind::Notarize);
  if (tx.signer != signer) bad_shape("notarization must be signed by the same party");
  if (require_hash(tx.body, "fingerprint") != fp) {
    bad_shape("notarization carries the wrong fingerprint");
  }
  if (require_string(tx.body, "label") != label) {
    bad_shape("notarization label must be '" + std::string(label) + "'");
  }
}

std::string bounded_text(const Json& body, std::string_view key) {
  auto text = require_string(body, key);
  if (text.size() > notary::kMaxLabelLength) {
    throw Error(ErrorCode::BadRequest, "field '" + std::string(key) + "' is too long");
  }
  return text;
}

const UserRecord& require_verified(const State& st, const Address& address) {
  auto it = st.users.find(address);
  if (it == st.users.end() || it->second.kyc_status != KycStatus::Verified) {
    throw Error(ErrorCode::KycRequired, address.str() + " has no verified KYC record");
  }
  return it->second;
}

PurchaseRequest& require_request(State& st, const Hash& request_id) {
  auto it = st.requests.find(request_id);
  if (it == st.requests.end()) {
    throw Error(ErrorCode::UnknownRequest, "unknown request " + request_id.hex());
  }
  return it->second;
}

void sweep_expired(State& st, const BatchContext& ctx) {
  for (auto& [id, pending] : st.pendings) {
    pending = multisig::expire_if_due(pending, ctx.now, ctx.config.pending_expiry_ms);
  }
}

void apply_register(State& st, const Transaction& tx) {
  const auto& body = tx.body;
  if (crypto::PublicKey::from_hex(require_string(body, "public_key")) != tx.public_key) {
    throw Error(ErrorCode::BadRequest, "a user registers their own signing key");
  }
  UserRecord user;
  user.address = tx.signer;
  user.public_key = tx.public_key;
  user.display_name = bounded_text(body, "display_name");
  user.kyc_identity_hash = require_hash(body, "identity_fingerprint");
  if (st.users.contains(user.address) || st.registry.is_multisig(user.address)) {
    throw Error(ErrorCode::DuplicateAddress, user.address.str() + " is already registered");
  }
  st.registry.add_leaf(user.public_key);
  st.users.emplace(user.address, std::move(user));
}

void apply_kyc(State& st, const Transaction& tx, const BatchContext& ctx) {
  const auto& verifiers = ctx.config.verifiers;
  if (std::find(verifiers.begin(), verifiers.end(), tx.signer) == verifiers.end()) {
    throw Error(ErrorCode::NotAuthorized, tx.signer.str() + " is not a KYC verifier");
  }
  auto subject = Address::parse(require_string(tx.body, "subject"));
  auto decision = parse_kyc_status(require_string(tx.body, "decision"));
  auto it = st.users.find(subject);
  if (it == st.users.end()) throw Error(ErrorCode::UnknownUser, "unknown user " + subject.str());
  if (it->second.kyc_status != KycStatus::Unverified) {
    throw Error(ErrorCode::AlreadyDecided, "KYC for " + subject.str() + " is already decided");
  }
  it->second.kyc_status = decision;
  it->second.verifier = tx.signer;
}

void apply_notarize(State& st, const Transaction& tx, const BatchContext& ctx) {
  require_verified(st, tx.signer);
  ledger::Block where;
  where.header.height = ctx.height;
  where.header.timestamp = ctx.now;
  auto record = notary::record_from(where, tx);
  st.notarizations[record.fingerprint].push_back(std::move(record));
}

void apply_post_request(State& st, std::span<const Transaction> batch, const BatchContext& ctx) {
  expect_size(batch, 2);
  const auto& tx = batch[0];
  require_verified(st, tx.signer);
  PurchaseRequest request;
  request.request_id = tx.tx_id;
  request.buyer = tx.signer;
  request.title = bounded_text(tx.body, "title");
  request.spec_fingerprint = require_hash(tx.body, "spec_fingerprint");
  request.open_at = require_int(tx.body, "open_at");
  request.close_at = require_int(tx.body, "close_at");
  if (request.open_at >= request.close_at) {
    throw Error(ErrorCode::BadWindow, "open_at must be before close_at");
  }
  expect_notarization(batch[1], tx.signer, request.spec_fingerprint, kSpecLabel);
  apply_notarize(st, batch[1], ctx);
  st.request_order.push_back(request.request_id);
  st.requests.emplace(request.request_id, std::move(request));
}

void apply_submit_bid(State& st, std::span<const Transaction> batch, const BatchContext& ctx) {
  expect_size(batch, 2);
  const auto& tx = batch[0];
  const auto& request = require_request(st, require_hash(tx.body, "request_id"));
  if (request.status != RequestStatus::Open || ctx.now >= request.close_at) {
    throw Error(ErrorCode::WindowClosed, "bidding on " + request.request_id.hex() + " is closed");
  }
  if (ctx.now < request.open_at) {
    throw Error(ErrorCode::WindowNotOpen,
                "bidding on " + request.request_id.hex() + " has not opened");
  }
  require_verified(st, tx.signer);
  if (tx.signer == request.buyer) {
    throw Error(ErrorCode::SelfBid, "a buyer cannot bid on their own request");
  }
  for (const auto& other : st.bids_by_request[request.request_id]) {
    if (st.bids.at(other).supplier == tx.signer) {
      throw Error(ErrorCode::DuplicateBid, tx.signer.str() + " already bid on this request");
    }
  }
  Bid bid;
  bid.bid_id = tx.tx_id;
  bid.request_id = request.request_id;
  bid.supplier = tx.signer;
  bid.price = require_int(tx.body, "price");
  if (bid.price < 0) throw Error(ErrorCode::BadRequest, "price must be non-negative");
  bid.doc_fingerprint = require_hash(tx.body, "doc_fingerprint");
  bid.submitted_at = ctx.now;
  expect_notarization(batch[1], tx.signer, bid_receipt_fingerprint(bid), kBidReceiptLabel);
  apply_notarize(st, batch[1], ctx);
  bid.receipt_tx = batch[1].tx_id;
  st.bids_by_request[bid.request_id].push_back(bid.bid_id);
  st.bids.emplace(bid.bid_id, std::move(bid));
}

void apply_close(State& st, const Transaction& tx, const BatchContext& ctx) {
  auto& request = require_request(st, require_hash(tx.body, "request_id"));
  if (tx.signer != request.buyer) {
    throw Error(ErrorCode::NotAuthorized, "only the buyer closes a request");
  }
  if (request.status != RequestStatus::Open) {
    throw Error(ErrorCode::NotOpen, "request is " + std::string(to_string(request.status)));
  }
  if (ctx.now < request.close_at) {
    throw Error(ErrorCode::WindowStillOpen, "bidding window has not ended");
  }
  request.status = RequestStatus::Closed;
}

void apply_create_multisig(State& st, const Transaction& tx) {
  if (!st.users.contains(tx.signer)) {
    throw Error(ErrorCode::UnknownUser, "creator " + tx.signer.str() + " is not registered");
  }
  const auto& list = require_field(tx.body, "cosignatories");
  if (!list.is_array()) throw Error(ErrorCode::BadRequest, "cosignatories must be an array");
  multisig::MultisigConfig config;
  for (const auto& item : list) {
    if (!item.is_string()) throw Error(ErrorCode::BadRequest, "cosignatory must be an address");
    config.cosignatories.push_back(Address::parse(item.get<std::string>()));
  }
  auto m = require_int(tx.body, "min_approvals");
  auto nonce = require_int(tx.body, "nonce");
  if (m < 1 || m > static_cast<std::int64_t>(config.cosignatories.size())) {
    throw Error(ErrorCode::BadThreshold, "need 1 <= M <= N");
  }
  if (nonce < 0) throw Error(ErrorCode::BadRequest, "nonce must be non-negative");
  config.min_approvals = static_cast<std::uint32_t>(m);
  config.account = multisig::multisig_address(tx.signer, config.min_approvals,
                                              config.cosignatories,
                                              static_cast<std::uint64_t>(nonce));
  multisig::create_multisig(std::move(config), st.registry);
}

void apply_issue_contract(State& st, const Transaction& tx, const BatchContext& ctx) {
  auto& request = require_request(st, require_hash(tx.body, "request_id"));
  if (tx.signer != request.buyer) {
    throw Error(ErrorCode::NotAuthorized, "only the buyer awards a request");
  }
  if (request.status != RequestStatus::Closed) {
    throw Error(ErrorCode::NotClosed, "request is " + std::string(to_string(request.status)));
  }
  std::vector<Bid> bids;
  for (const auto& id : st.bids_by_request[request.request_id]) bids.push_back(st.bids.at(id));
  if (bids.empty()) throw Error(ErrorCode::NoBids, "request closed without bids");
  const Bid winner = rank(std::move(bids)).front();

  Contract contract;
  contract.contract_id = tx.tx_id;
  contract.request_id = request.request_id;
  contract.winning_bid = winner.bid_id;
  contract.parties_account = Address::parse(require_string(tx.body, "parties_account"));
  contract.contract_fingerprint = require_hash(tx.body, "contract_fingerprint");
  if (tx.body != contract_payload(contract)) {
    throw Error(ErrorCode::BadRequest, "IssueContract body has unexpected fields");
  }
  const auto* parties = st.registry.find(contract.parties_account);
  const std::set<Address> expected{request.buyer, winner.supplier};
  if (parties == nullptr || parties->min_approvals != 2 ||
      std::set<Address>(parties->cosignatories.begin(), parties->cosignatories.end()) !=
          expected ||
      parties->cosignatories.size() != 2) {
    throw Error(ErrorCode::BadRequest,
                "parties account must be a 2-of-2 multisig of the buyer and the winning supplier");
  }
  st.pendings.emplace(contract.contract_id,
                      multisig::open_pending(contract.contract_id, contract.parties_account,
                                             request.buyer, contract_payload(contract), ctx.now,
                                             st.registry));
  request.status = RequestStatus::Awarded;
  st.contracts.emplace(contract.contract_id, std::move(contract));
}

void on_executed(State& st, const multisig::PendingTransaction& pending) {
  auto it = st.contracts.find(pending.pending_id);
  if (it == st.contracts.end()) return;
  it->second.status = ContractStatus::Effective;
  st.requests.at(it->second.request_id).status = RequestStatus::Contracted;
}

void store_pending(State& st, multisig::PendingTransaction pending) {
  if (pending.status == multisig::PendingStatus::Approved) {
    pending = multisig::execute(pending);
    on_executed(st, pending);
  }
  st.pendings.insert_or_assign(pending.pending_id, std::move(pending));
}

void apply_cosign(State& st, std::span<const Transaction> batch, const BatchContext& ctx) {
  const auto& tx = batch[0];
  auto approval = crypto::Signature::from_hex(require_string(tx.body, "approval"));

  if (!tx.body.contains("pending_id")) {
    expect_size(batch, 1);
    const auto& payload = require_field(tx.body, "payload");
    if (!payload.is_object()) throw Error(ErrorCode::BadRequest, "payload must be an object");
    auto account = Address::parse(require_string(tx.body, "account"));
    store_pending(st, multisig::propose(tx.tx_id, account, payload, tx.signer, approval,
                                        ctx.now, st.registry));
    return;
  }

  auto pending_id = require_hash(tx.body, "pending_id");
  auto it = st.pendings.find(pending_id);
  if (it == st.pendings.end()) {
    throw Error(ErrorCode::UnknownPending, "unknown pending " + pending_id.hex());
  }
  auto contract = st.contracts.find(pending_id);
  if (contract == st.contracts.end()) {
    expect_size(batch, 1);
    store_pending(st, multisig::cosign(it->second, tx.signer, approval, st.registry));
    return;
  }

  const auto* parties = st.registry.find(contract->second.parties_account);
  if (std::find(parties->cosignatories.begin(), parties->cosignatories.end(), tx.signer) ==
      parties->cosignatories.end()) {
    throw Error(ErrorCode::NotAParty, tx.signer.str() + " is not a party to the contract");
  }
  auto updated = multisig::cosign(it->second, tx.signer, approval, st.registry);
  // Only the completing signature carries the contract notarization.
  if (updated.status == multisig::PendingStatus::Approved) {
    expect_size(batch, 2);
    expect_notarization(batch[1], tx.signer, contract->second.contract_fingerprint,
                        kContractLabel);
    apply_notarize(st, batch[1], ctx);
  } else {
    expect_size(batch, 1);
  }
  store_pending(st, std::move(updated));
}

void apply_batch(State& st, std::span<const Transaction> batch, const BatchContext& ctx) {
  if (batch.empty()) throw Error(ErrorCode::BadRequest, "empty batch");
  sweep_expired(st, ctx);
  const auto& first = batch.front();
  switch (first.kind) {
    case TxKind::Register:
      expect_size(batch, 1);
      apply_register(st, first);
      break;
    case TxKind::KycVerify:
      expect_size(batch, 1);
      apply_kyc(st, first, ctx);
      break;
    case TxKind::PostRequest:
      apply_post_request(st, batch, ctx);
      break;
    case TxKind::SubmitBid:
      apply_submit_bid(st, batch, ctx);
      break;
    case TxKind::CloseRequest:
      expect_size(batch, 1);
      apply_close(st, first, ctx);
      break;
    case TxKind::CreateMultisig:
      if (batch.size() == 2) {
        expect_kind(batch[1], TxKind::IssueContract);
        apply_create_multisig(st, first);
        apply_issue_contract(st, batch[1], ctx);
      } else {
        expect_size(batch, 1);
        apply_create_multisig(st, first);
      }
      break;
    case TxKind::IssueContract:
      expect_size(batch, 1);
      apply_issue_contract(st, first, ctx);
      break;
    case TxKind::Cosign:
      apply_cosign(st, batch, ctx);
      break;
    case TxKind::Notarize:
      expect_size(batch, 1);
      apply_notarize(st, first, ctx);
      break;
  }
}

template <class Map>
auto* find_in(const Map& map, const typename Map::key_type& key) {
  auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

}  // namespace

Engine::Engine(EngineConfig config, BlockSink sink)
    : config_(std::move(config)), sink_(std::move(sink)), chain_(ledger::Chain::genesis()) {}

Engine Engine::replay(ledger::Chain chain, EngineConfig config, BlockSink sink) {
  Engine engine(std::move(config), std::move(sink));
  const auto& blocks = chain.blocks();
  for (std::size_t h = 1; h < blocks.size(); ++h) {
    const auto& block = blocks[h];
    try {
      apply_batch(engine.state_, block.transactions,
                  BatchContext{block.header.timestamp, block.header.height, engine.config_});
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptLog, "block " + std::to_string(h) +
                                             " is rejected on replay: " + e.what());
    }
  }
  engine.chain_ = std::move(chain);
  return engine;
}

const ledger::Block& Engine::submit(std::vector<Transaction> batch, Millis now) {
  if (batch.empty()) throw Error(ErrorCode::BadRequest, "empty batch");
  auto block = chain_.prepare_block(std::move(batch), now);
  State next = state_;
  apply_batch(next, block.transactions, BatchContext{now, block.header.height, config_});
  if (sink_) sink_(block);
  const auto& sealed = chain_.commit_block(std::move(block));
  state_ = std::move(next);
  return sealed;
}

namespace {

template <class T>
Sealed<T> sealed(T record, const Transaction& tx, const ledger::Block& block) {
  return Sealed<T>{std::move(record), tx.tx_id, block.header.height};
}

}  // namespace

Sealed<UserRecord> Engine::register_user(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::Register);
  const auto& block = submit({tx}, now);
  return sealed(state_.users.at(tx.signer), tx, block);
}

Sealed<UserRecord> Engine::verify_kyc(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::KycVerify);
  const auto& block = submit({tx}, now);
  return sealed(state_.users.at(Address::parse(require_string(tx.body, "subject"))), tx, block);
}

Sealed<PurchaseRequest> Engine::post_request(const Transaction& request,
                                             const Transaction& spec_notarization, Millis now) {
  expect_kind(request, TxKind::PostRequest);
  const auto& block = submit({request, spec_notarization}, now);
  return sealed(state_.requests.at(request.tx_id), request, block);
}

Sealed<Bid> Engine::submit_bid(const Transaction& bid, const Transaction& receipt, Millis now) {
  expect_kind(bid, TxKind::SubmitBid);
  const auto& block = submit({bid, receipt}, now);
  return sealed(state_.bids.at(bid.tx_id), bid, block);
}

Sealed<PurchaseRequest> Engine::close_request(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::CloseRequest);
  const auto& block = submit({tx}, now);
  return sealed(state_.requests.at(require_hash(tx.body, "request_id")), tx, block);
}

Sealed<Contract> Engine::award_and_issue_contract(const std::optional<Transaction>& create_parties,
                                                  const Transaction& issue, Millis now) {
  expect_kind(issue, TxKind::IssueContract);
  std::vector<Transaction> batch;
  if (create_parties) {
    expect_kind(*create_parties, TxKind::CreateMultisig);
    batch.push_back(*create_parties);
  }
  batch.push_back(issue);
  const auto& block = submit(std::move(batch), now);
  return sealed(state_.contracts.at(issue.tx_id), issue, block);
}

Sealed<Contract> Engine::countersign_contract(const Transaction& cosign,
                                              const std::optional<Transaction>& notarization,
                                              Millis now) {
  expect_kind(cosign, TxKind::Cosign);
  auto contract_id = require_hash(cosign.body, "pending_id");
  if (!state_.contracts.contains(contract_id)) {
    throw Error(ErrorCode::UnknownContract, "unknown contract " + contract_id.hex());
  }
  std::vector<Transaction> batch{cosign};
  if (notarization) batch.push_back(*notarization);
  const auto& block = submit(std::move(batch), now);
  return sealed(state_.contracts.at(contract_id), cosign, block);
}

Sealed<notary::NotarizationRecord> Engine::notarize(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::Notarize);
  const auto& block = submit({tx}, now);
  return sealed(notary::record_from(block, block.transactions.front()), tx, block);
}

Sealed<multisig::MultisigConfig> Engine::create_multisig(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::CreateMultisig);
  const auto& block = submit({tx}, now);
  std::vector<Address> cosigs;
  for (const auto& c : tx.body.at("cosignatories")) cosigs.push_back(Address::parse(c.get<std::string>()));
  auto account = multisig::multisig_address(
      tx.signer, static_cast<std::uint32_t>(require_int(tx.body, "min_approvals")), cosigs,
      static_cast<std::uint64_t>(require_int(tx.body, "nonce")));
  return sealed(*state_.registry.find(account), tx, block);
}

Sealed<multisig::PendingTransaction> Engine::propose(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::Cosign);
  if (tx.body.contains("pending_id")) bad_shape("a proposal names an account, not a pending_id");
  const auto& block = submit({tx}, now);
  return sealed(state_.pendings.at(tx.tx_id), tx, block);
}

Sealed<multisig::PendingTransaction> Engine::cosign(const Transaction& tx, Millis now) {
  expect_kind(tx, TxKind::Cosign);
  auto pending_id = require_hash(tx.body, "pending_id");
  const auto& block = submit({tx}, now);
  return sealed(state_.pendings.at(pending_id), tx, block);
}

std::vector<Bid> Engine::rank_bids(const Hash& request_id) const {
  if (!state_.requests.contains(request_id)) {
    throw Error(ErrorCode::UnknownRequest, "unknown request " + request_id.hex());
  }
  std::vector<Bid> bids;
  if (auto it = state_.bids_by_request.find(request_id); it != state_.bids_by_request.end()) {
    for (const auto& id : it->second) bids.push_back(state_.bids.at(id));
  }
  return rank(std::move(bids));
}

const UserRecord* Engine::find_user(const Address& address) const {
  return find_in(state_.users, address);
}

const PurchaseRequest* Engine::find_request(const Hash& request_id) const {
  return find_in(state_.requests, request_id);
}

const Bid* Engine::find_bid(const Hash& bid_id) const { return find_in(state_.bids, bid_id); }

const Contract* Engine::find_contract(const Hash& contract_id) const {
  return find_in(state_.contracts, contract_id);
}

const multisig::PendingTransaction* Engine::find_pending(const Hash& pending_id) const {
  return find_in(state_.pendings, pending_id);
}

std::vector<PurchaseRequest> Engine::requests() const {
  std::vector<PurchaseRequest> out;
  out.reserve(state_.request_order.size());
  for (const auto& id : state_.request_order) out.push_back(state_.requests.at(id));
  return out;
}

const multisig::ConfigRegistry& Engine::registry() const { return state_.registry; }

notary::AuditResult Engine::audit(const Fingerprint& fp) const {
  return notary::audit(chain_.blocks(), fp);
}

Json Engine::state_json() const {
  Json users = Json::array();
  for (const auto& [a, u] : state_.users) users.push_back(to_json(u));
  Json accounts = Json::array();
  for (const auto& [a, c] : state_.registry.configs()) accounts.push_back(multisig::to_json(c));
  Json pendings = Json::array();
  for (const auto& [id, p] : state_.pendings) pendings.push_back(multisig::to_json(p));
  Json requests = Json::array();
  for (const auto& r : this->requests()) requests.push_back(to_json(r));
  Json bids = Json::array();
  for (const auto& [id, b] : state_.bids) bids.push_back(to_json(b));
  Json contracts = Json::array();
  for (const auto& [id, c] : state_.contracts) contracts.push_back(to_json(c));
  Json notarizations = Json::array();
  for (const auto& [fp, records] : state_.notarizations) {
    for (const auto& r : records) notarizations.push_back(notary::to_json(r));
  }
  return Json{{"accounts", std::move(accounts)},   {"bids", std::move(bids)},
              {"contracts", std::move(contracts)}, {"notarizations", std::move(notarizations)},
              {"pendings", std::move(pendings)},   {"requests", std::move(requests)},
              {"tip_hash", chain_.tip().block_hash.hex()}, {"users", std::move(users)}};
}

}  // namespace chainprocure::procurement
