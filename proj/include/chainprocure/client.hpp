#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainprocure/procurement.hpp"

// Builders for signed transaction batches. Signing happens here, on the
// caller's side; the service only ever sees the signed result.
namespace chainprocure::client {

using crypto::KeyPair;
using ledger::Transaction;
using notary::Fingerprint;

Transaction register_user(const KeyPair& key, const std::string& display_name,
                          const Fingerprint& identity_docs, Millis timestamp);

Transaction kyc_decision(const KeyPair& verifier, const Address& subject,
                         procurement::KycStatus decision, Millis timestamp);

// [PostRequest, Notarize(spec)]
std::vector<Transaction> post_request(const KeyPair& buyer, const std::string& title,
                                      const Fingerprint& spec, Millis open_at, Millis close_at,
                                      Millis timestamp);

// [SubmitBid, Notarize(bid receipt)]
std::vector<Transaction> submit_bid(const KeyPair& supplier, const Hash& request_id,
                                    std::int64_t price, const Fingerprint& doc,
                                    Millis timestamp);

Transaction close_request(const KeyPair& buyer, const Hash& request_id, Millis timestamp);

Transaction create_multisig(const KeyPair& creator, std::uint32_t min_approvals,
                            const std::vector<Address>& cosignatories, std::uint64_t nonce,
                            Millis timestamp);

// The 2-of-2 parties account address award() creates for this request.
Address parties_account(const Address& buyer, const Address& winner, const Hash& request_id);

// [CreateMultisig(buyer, winner), IssueContract]
std::vector<Transaction> award(const KeyPair& buyer, const Hash& request_id,
                               const Address& winner, const Fingerprint& contract,
                               Millis timestamp);

// [Cosign], plus Notarize(contract) when this signature completes the contract.
std::vector<Transaction> countersign_contract(const KeyPair& party,
                                              const procurement::Contract& contract,
                                              bool completes, Millis timestamp);

Transaction propose(const KeyPair& initiator, const Address& account, const Json& payload,
                    Millis timestamp);

Transaction cosign(const KeyPair& signer, const Hash& pending_id, const Address& account,
                   const Json& payload, Millis timestamp);

Transaction notarize(const KeyPair& owner, const Fingerprint& fp, const std::string& label,
                     Millis timestamp);

// {"transactions": [...]}, the body every state-changing endpoint accepts.
Json batch_json(const std::vector<Transaction>& batch);

}  // namespace chainprocure::client
