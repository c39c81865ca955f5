// Operator and wallet command line for the procurement ledger service.
//
//   chainprocure serve --block-log chain.blocks --verifier bp1...
//   chainprocure keygen --out alice.key
//   chainprocure --key alice.key register --name Alice --identity passport.pdf
//   chainprocure audit contract.pdf

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"

#include "chainprocure/api.hpp"
#include "chainprocure/client.hpp"

namespace cp = chainprocure;

namespace {

struct Globals {
  std::string server = "http://127.0.0.1:8080";
  std::string key_path;
  std::optional<cp::Millis> timestamp;
};

cp::Millis now_ms(const Globals& g) {
  if (g.timestamp) return *g.timestamp;
  return cp::api::system_clock()();
}

cp::crypto::KeyPair load_key(const Globals& g) {
  if (g.key_path.empty()) {
    throw cp::Error(cp::ErrorCode::MalformedKey, "this command needs --key <file>");
  }
  return cp::crypto::load_key_file(g.key_path);
}

// Prints the response body; returns the process exit code.
int print_response(const httplib::Result& res) {
  if (!res) {
    std::cerr << "request failed: " << httplib::to_string(res.error()) << "\n";
    return 2;
  }
  std::cout << res->body << "\n";
  return res->status < 400 ? 0 : 1;
}

int get(const Globals& g, const std::string& path) {
  httplib::Client client(g.server);
  return print_response(client.Get(path));
}

cp::Json get_json(const Globals& g, const std::string& path) {
  httplib::Client client(g.server);
  auto res = client.Get(path);
  if (!res || res->status >= 400) {
    throw cp::Error(cp::ErrorCode::Io, "GET " + path + " failed" +
                                           (res ? ": " + res->body : std::string()));
  }
  return cp::Json::parse(res->body);
}

int post(const Globals& g, const std::string& path,
         const std::vector<cp::ledger::Transaction>& batch) {
  httplib::Client client(g.server);
  return print_response(
      client.Post(path, cp::canonical_json(cp::client::batch_json(batch)), "application/json"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chainprocure: blockchain-backed e-procurement ledger"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--server", g.server, "Service base URL");
  app.add_option("--key", g.key_path, "Key file {\"public_key\",\"private_key\"}");
  app.add_option("--timestamp", g.timestamp, "Transaction timestamp (ms); defaults to now");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::optional<std::string> config_path;
  std::optional<int> port;
  std::optional<std::string> block_log;
  std::optional<std::string> listen;
  std::optional<cp::Millis> fixed_clock;
  std::vector<std::string> verifiers;
  serve->add_option("--config", config_path, "JSON config file");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--listen", listen, "Listen address");
  serve->add_option("--block-log", block_log, "Block log path");
  serve->add_option("--fixed-clock", fixed_clock, "Freeze the service clock (test mode)");
  serve->add_option("--verifier", verifiers, "KYC verifier address (repeatable)");

  auto* keygen = app.add_subcommand("keygen", "Generate a key file");
  std::string key_out;
  std::optional<std::string> seed_hex;
  keygen->add_option("--out", key_out, "Output key file")->required();
  keygen->add_option("--seed", seed_hex, "32-byte hex seed (deterministic)");

  auto* address = app.add_subcommand("address", "Print the address for --key");

  auto* fingerprint = app.add_subcommand("fingerprint", "SHA-256 fingerprint of a file");
  std::string file;
  fingerprint->add_option("file", file)->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate", "Validate a block log offline");
  std::string validate_log;
  validate->add_option("--block-log", validate_log)->required()->check(CLI::ExistingFile);

  auto* audit = app.add_subcommand("audit", "Fingerprint a file locally and audit it");
  std::string audit_file;
  audit->add_option("file", audit_file)->required()->check(CLI::ExistingFile);

  auto* show = app.add_subcommand("get", "GET any read endpoint, e.g. /chain");
  std::string show_path;
  show->add_option("path", show_path)->required();

  auto* reg = app.add_subcommand("register", "Register the --key holder");
  std::string name, identity_file;
  reg->add_option("--name", name)->required();
  reg->add_option("--identity", identity_file, "Identity document")->required()->check(
      CLI::ExistingFile);

  auto* kyc = app.add_subcommand("kyc", "Record a KYC decision (verifier key)");
  std::string subject, decision = "Verified";
  kyc->add_option("--subject", subject)->required();
  kyc->add_option("--decision", decision)->check(CLI::IsMember({"Verified", "Rejected"}));

  auto* notarize = app.add_subcommand("notarize", "Notarize a file's fingerprint");
  std::string notarize_file, label = "document";
  notarize->add_option("file", notarize_file)->required()->check(CLI::ExistingFile);
  notarize->add_option("--label", label);

  auto* rfq = app.add_subcommand("rfq", "Post a purchase request");
  std::string title, spec_file;
  cp::Millis open_at = 0, close_at = 0;
  rfq->add_option("--title", title)->required();
  rfq->add_option("--spec", spec_file)->required()->check(CLI::ExistingFile);
  rfq->add_option("--open-at", open_at)->required();
  rfq->add_option("--close-at", close_at)->required();

  auto* bid = app.add_subcommand("bid", "Submit a bid");
  std::string rfq_id, doc_file;
  std::int64_t price = 0;
  bid->add_option("--rfq", rfq_id)->required();
  bid->add_option("--price", price, "Minor currency units")->required();
  bid->add_option("--doc", doc_file)->required()->check(CLI::ExistingFile);

  auto* close = app.add_subcommand("close", "Close a request after its window");
  close->add_option("--rfq", rfq_id)->required();

  auto* award = app.add_subcommand("award", "Award the lowest bid and issue the contract");
  std::string contract_file;
  award->add_option("--rfq", rfq_id)->required();
  award->add_option("--contract", contract_file)->required()->check(CLI::ExistingFile);

  auto* countersign = app.add_subcommand("countersign", "Countersign a contract");
  std::string contract_id;
  countersign->add_option("--contract", contract_id)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      auto config = cp::api::load_config(config_path, cp::api::process_env());
      if (port) config.port = *port;
      if (listen) config.listen = *listen;
      if (block_log) config.block_log = *block_log;
      if (fixed_clock) config.fixed_clock_ms = *fixed_clock;
      if (!verifiers.empty()) {
        config.verifiers.clear();
        for (const auto& v : verifiers) config.verifiers.push_back(cp::Address::parse(v));
      }
      cp::api::Service service(config);
      std::cerr << "chainprocure listening on " << config.listen << ":" << config.port << "\n";
      service.serve();
      return 0;
    }
    if (keygen->parsed()) {
      std::optional<cp::Bytes> seed;
      if (seed_hex) seed = cp::from_hex(*seed_hex);
      auto pair = seed ? cp::crypto::generate_keypair(std::span<const std::uint8_t>(*seed))
                       : cp::crypto::generate_keypair();
      cp::crypto::save_key_file(key_out, pair);
      std::cout << cp::crypto::derive_address(pair.public_key).str() << "\n";
      return 0;
    }
    if (address->parsed()) {
      std::cout << cp::crypto::derive_address(load_key(g).public_key).str() << "\n";
      return 0;
    }
    if (fingerprint->parsed()) {
      std::cout << cp::notary::fingerprint_file(file).hex() << "\n";
      return 0;
    }
    if (validate->parsed()) {
      cp::ledger::BlockLog log(validate_log);
      std::vector<cp::ledger::Block> blocks;
      cp::ledger::ValidationReport report;
      auto lines = log.read_lines();
      for (std::size_t i = 0; i < lines.size() && report.ok; ++i) {
        try {
          blocks.push_back(cp::ledger::parse_block(lines[i]));
        } catch (const cp::Error& e) {
          report = cp::ledger::ValidationReport::failure(i, cp::ledger::FailureReason::Malformed,
                                                         e.what());
        }
      }
      if (report.ok) report = cp::ledger::validate_chain(blocks);
      std::cout << cp::canonical_json(cp::ledger::to_json(report)) << "\n";
      return report.ok ? 0 : 1;
    }
    if (audit->parsed()) return get(g, "/audit/" + cp::notary::fingerprint_file(audit_file).hex());
    if (show->parsed()) return get(g, show_path);

    const auto key = load_key(g);
    const auto ts = now_ms(g);
    if (reg->parsed()) {
      return post(g, "/users",
                  {cp::client::register_user(key, name, cp::notary::fingerprint_file(identity_file),
                                             ts)});
    }
    if (kyc->parsed()) {
      return post(g, "/kyc/decisions",
                  {cp::client::kyc_decision(key, cp::Address::parse(subject),
                                            cp::procurement::parse_kyc_status(decision), ts)});
    }
    if (notarize->parsed()) {
      return post(g, "/notarize",
                  {cp::client::notarize(key, cp::notary::fingerprint_file(notarize_file), label,
                                        ts)});
    }
    if (rfq->parsed()) {
      return post(g, "/rfqs",
                  cp::client::post_request(key, title, cp::notary::fingerprint_file(spec_file),
                                           open_at, close_at, ts));
    }
    if (bid->parsed()) {
      auto id = cp::Hash::from_hex(rfq_id);
      return post(g, "/rfqs/" + rfq_id + "/bids",
                  cp::client::submit_bid(key, id, price, cp::notary::fingerprint_file(doc_file),
                                         ts));
    }
    if (close->parsed()) {
      return post(g, "/rfqs/" + rfq_id + "/close",
                  {cp::client::close_request(key, cp::Hash::from_hex(rfq_id), ts)});
    }
    if (award->parsed()) {
      auto ranking = get_json(g, "/rfqs/" + rfq_id + "/ranking").at("ranking");
      if (ranking.empty()) throw cp::Error(cp::ErrorCode::NoBids, "request has no bids");
      auto winner = cp::Address::parse(ranking.front().at("supplier").get<std::string>());
      return post(g, "/rfqs/" + rfq_id + "/award",
                  cp::client::award(key, cp::Hash::from_hex(rfq_id), winner,
                                    cp::notary::fingerprint_file(contract_file), ts));
    }
    if (countersign->parsed()) {
      auto view = get_json(g, "/contracts/" + contract_id);
      const auto& doc = view.at("contract");
      cp::procurement::Contract contract;
      contract.contract_id = cp::Hash::from_hex(contract_id);
      contract.request_id = cp::require_hash(doc, "request_id");
      contract.parties_account = cp::Address::parse(cp::require_string(doc, "parties_account"));
      contract.contract_fingerprint = cp::require_hash(doc, "contract_fingerprint");
      auto account = get_json(g, "/multisig/accounts/" + contract.parties_account.str());
      bool completes = view.at("pending").at("collected").size() + 1 >=
                       account.at("account").at("min_approvals").get<std::size_t>();
      return post(g, "/contracts/" + contract_id + "/cosign",
                  cp::client::countersign_contract(key, contract, completes, ts));
    }
  } catch (const cp::Error& e) {
    std::cerr << cp::error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
