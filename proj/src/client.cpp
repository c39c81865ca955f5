#include "chainprocure/client.hpp"

namespace chainprocure::client {

using ledger::TxKind;
using ledger::make_transaction;

namespace {

Address address_of(const KeyPair& key) { return crypto::derive_address(key.public_key); }

std::uint64_t nonce_from(const Hash& id) {
  std::uint64_t n = 0;
  for (int i = 0; i < 6; ++i) n = (n << 8) | id.bytes[i];
  return n;
}

}  // namespace

Transaction register_user(const KeyPair& key, const std::string& display_name,
                          const Fingerprint& identity_docs, Millis timestamp) {
  return make_transaction(TxKind::Register,
                          Json{{"display_name", display_name},
                               {"identity_fingerprint", identity_docs.hex()},
                               {"public_key", key.public_key.hex()}},
                          key, timestamp);
}

Transaction kyc_decision(const KeyPair& verifier, const Address& subject,
                         procurement::KycStatus decision, Millis timestamp) {
  return make_transaction(
      TxKind::KycVerify,
      Json{{"decision", procurement::to_string(decision)}, {"subject", subject.str()}}, verifier,
      timestamp);
}

std::vector<Transaction> post_request(const KeyPair& buyer, const std::string& title,
                                      const Fingerprint& spec, Millis open_at, Millis close_at,
                                      Millis timestamp) {
  auto request = make_transaction(TxKind::PostRequest,
                                  Json{{"close_at", close_at},
                                       {"open_at", open_at},
                                       {"spec_fingerprint", spec.hex()},
                                       {"title", title}},
                                  buyer, timestamp);
  return {request, notarize(buyer, spec, std::string(procurement::kSpecLabel), timestamp)};
}

std::vector<Transaction> submit_bid(const KeyPair& supplier, const Hash& request_id,
                                    std::int64_t price, const Fingerprint& doc,
                                    Millis timestamp) {
  auto bid = make_transaction(TxKind::SubmitBid,
                              Json{{"doc_fingerprint", doc.hex()},
                                   {"price", price},
                                   {"request_id", request_id.hex()}},
                              supplier, timestamp);
  procurement::Bid record;
  record.bid_id = bid.tx_id;
  record.request_id = request_id;
  record.supplier = bid.signer;
  record.price = price;
  record.doc_fingerprint = doc;
  return {bid, notarize(supplier, procurement::bid_receipt_fingerprint(record),
                        std::string(procurement::kBidReceiptLabel), timestamp)};
}

Transaction close_request(const KeyPair& buyer, const Hash& request_id, Millis timestamp) {
  return make_transaction(TxKind::CloseRequest, Json{{"request_id", request_id.hex()}}, buyer,
                          timestamp);
}

Transaction create_multisig(const KeyPair& creator, std::uint32_t min_approvals,
                            const std::vector<Address>& cosignatories, std::uint64_t nonce,
                            Millis timestamp) {
  Json list = Json::array();
  for (const auto& c : cosignatories) list.push_back(c.str());
  return make_transaction(
      TxKind::CreateMultisig,
      Json{{"cosignatories", std::move(list)}, {"min_approvals", min_approvals}, {"nonce", nonce}},
      creator, timestamp);
}

Address parties_account(const Address& buyer, const Address& winner, const Hash& request_id) {
  const std::vector<Address> parties{buyer, winner};
  return multisig::multisig_address(buyer, 2, parties, nonce_from(request_id));
}

std::vector<Transaction> award(const KeyPair& buyer, const Hash& request_id,
                               const Address& winner, const Fingerprint& contract,
                               Millis timestamp) {
  const auto buyer_address = address_of(buyer);
  auto create =
      create_multisig(buyer, 2, {buyer_address, winner}, nonce_from(request_id), timestamp);
  auto account = parties_account(buyer_address, winner, request_id);
  auto issue = make_transaction(TxKind::IssueContract,
                                procurement::contract_payload(request_id, contract, account),
                                buyer, timestamp);
  return {create, issue};
}

std::vector<Transaction> countersign_contract(const KeyPair& party,
                                              const procurement::Contract& contract,
                                              bool completes, Millis timestamp) {
  std::vector<Transaction> batch{cosign(party, contract.contract_id, contract.parties_account,
                                        procurement::contract_payload(contract), timestamp)};
  if (completes) {
    batch.push_back(notarize(party, contract.contract_fingerprint,
                             std::string(procurement::kContractLabel), timestamp));
  }
  return batch;
}

Transaction propose(const KeyPair& initiator, const Address& account, const Json& payload,
                    Millis timestamp) {
  auto approval = crypto::sign(initiator.private_key, multisig::approval_digest(account, payload));
  return make_transaction(
      TxKind::Cosign,
      Json{{"account", account.str()}, {"approval", approval.hex()}, {"payload", payload}},
      initiator, timestamp);
}

Transaction cosign(const KeyPair& signer, const Hash& pending_id, const Address& account,
                   const Json& payload, Millis timestamp) {
  auto approval = crypto::sign(signer.private_key, multisig::approval_digest(account, payload));
  return make_transaction(TxKind::Cosign,
                          Json{{"approval", approval.hex()}, {"pending_id", pending_id.hex()}},
                          signer, timestamp);
}

Transaction notarize(const KeyPair& owner, const Fingerprint& fp, const std::string& label,
                     Millis timestamp) {
  return make_transaction(TxKind::Notarize, notary::notarize_body(fp, label), owner, timestamp);
}

Json batch_json(const std::vector<Transaction>& batch) {
  Json txs = Json::array();
  for (const auto& tx : batch) txs.push_back(ledger::to_json(tx));
  return Json{{"transactions", std::move(txs)}};
}

}  // namespace chainprocure::client
