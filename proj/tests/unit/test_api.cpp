#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <map>
#include <memory>

#include "chainprocure/api.hpp"
#include "chainprocure/client.hpp"
#include "chainprocure/error.hpp"
#include "fixtures.hpp"
#include "httplib.h"

using namespace chainprocure;
using namespace chainprocure::api;
namespace t = chainprocure::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

std::string batch(const std::vector<ledger::Transaction>& txs) {
  return canonical_json(client::batch_json(txs));
}

// A service over a temp block log with a settable clock.
struct ServiceTest : ::testing::Test {
  t::TempDir dir;
  crypto::KeyPair verifier = t::key(0xfeed);
  std::shared_ptr<Millis> now = std::make_shared<Millis>(0);
  Millis ts = 1;
  std::unique_ptr<Service> svc;

  ServiceConfig config() {
    ServiceConfig c;
    c.block_log = dir / "chain.blocks";
    c.verifiers = {t::addr(verifier)};
    c.port = 0;
    return c;
  }

  void boot(ServiceConfig c) {
    svc.reset();
    auto clock = now;
    svc = std::make_unique<Service>(std::move(c), [clock] { return *clock; });
  }

  void SetUp() override { boot(config()); }

  Response post(const std::string& path, const std::vector<ledger::Transaction>& txs) {
    return svc->handle("POST", path, batch(txs));
  }
  Response get(const std::string& path) { return svc->handle("GET", path, ""); }

  crypto::KeyPair verified_user(std::uint32_t n) {
    auto k = t::key(n);
    EXPECT_EQ(post("/users", {client::register_user(k, "u" + std::to_string(n),
                                                      notary::fingerprint("id"), ts++)})
                  .status,
              201);
    EXPECT_EQ(post("/kyc/decisions", {client::kyc_decision(verifier, t::addr(k),
                                                            procurement::KycStatus::Verified,
                                                            ts++)})
                  .status,
              200);
    return k;
  }

  std::string post_rfq(const crypto::KeyPair& buyer, Millis open_at, Millis close_at) {
    auto r = post("/rfqs",
                  client::post_request(buyer, "rfq", notary::fingerprint("spec"), open_at,
                                       close_at, ts++));
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body["request_id"];
  }

  Response bid(const crypto::KeyPair& supplier, const std::string& rfq, std::int64_t price) {
    return post("/rfqs/" + rfq + "/bids",
                client::submit_bid(supplier, Hash::from_hex(rfq), price,
                                   notary::fingerprint("q" + std::to_string(price)), ts++));
  }
};

}  // namespace

TEST_F(ServiceTest, StartsWithGenesis) {
  auto health = get("/healthz");
  EXPECT_EQ(health.status, 200);
  EXPECT_EQ(health.body["height"], 0);
  EXPECT_EQ(get("/rfqs").body["requests"], Json::array());
  auto chain = get("/chain");
  EXPECT_EQ(chain.body["length"], 1);
  EXPECT_EQ(chain.body["tip_hash"], ledger::genesis_block().block_hash.hex());
  auto v = get("/chain/validate");
  EXPECT_EQ(v.body["ok"], true);
  EXPECT_EQ(v.body["matches_live_chain"], true);
}

TEST_F(ServiceTest, PostRfqAndRead) {
  auto buyer = verified_user(1);
  auto id = post_rfq(buyer, 100, 200);
  auto r = get("/rfqs/" + id);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["request"]["status"], "Open");
  EXPECT_EQ(r.body["bid_count"], 0);
  EXPECT_EQ(get("/rfqs").body["requests"].size(), 1u);
  EXPECT_EQ(get("/users/" + t::addr(buyer).str()).body["user"]["kyc_status"], "Verified");
}

TEST_F(ServiceTest, BidWindowOverHttpSemantics) {
  auto buyer = verified_user(1), s1 = verified_user(2), s2 = verified_user(3);
  auto id = post_rfq(buyer, 100, 200);
  *now = 199;
  auto ok = bid(s1, id, 50);
  EXPECT_EQ(ok.status, 201);
  EXPECT_EQ(ok.body["bid"]["submitted_at"], 199);
  *now = 200;
  auto late = bid(s2, id, 40);
  EXPECT_EQ(late.status, 409);
  EXPECT_EQ(late.body["error"]["code"], "WINDOW_CLOSED");
  auto ranking = get("/rfqs/" + id + "/ranking");
  ASSERT_EQ(ranking.body["ranking"].size(), 1u);
  EXPECT_EQ(ranking.body["ranking"][0]["price"], 50);
}

TEST_F(ServiceTest, ErrorsAreStructured) {
  auto r = get("/nope");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body["error"]["code"], "NOT_FOUND");
  EXPECT_EQ(svc->handle("POST", "/nope", "{").body["error"]["code"], "NOT_FOUND");
  EXPECT_EQ(svc->handle("DELETE", "/rfqs", "").status, 404);

  auto bad = svc->handle("POST", "/users", "{not json");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body["error"]["code"], "BAD_REQUEST");
  EXPECT_EQ(svc->handle("POST", "/users", R"({"transactions":[]})").status, 400);

  auto missing = get("/rfqs/" + std::string(64, 'a'));
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(missing.body["error"]["code"], "UNKNOWN_REQUEST");
  EXPECT_EQ(get("/rfqs/xyz").status, 400);

  auto eve = t::key(7);
  auto forged = client::register_user(eve, "eve", notary::fingerprint("e"), ts++);
  forged.signature.bytes[0] ^= 1;
  auto sig = post("/users", {forged});
  EXPECT_EQ(sig.status, 400);
  EXPECT_EQ(sig.body["error"]["code"], "INVALID_SIGNATURE");
}

TEST_F(ServiceTest, PathIdMustMatchBody) {
  auto buyer = verified_user(1), s1 = verified_user(2);
  auto a = post_rfq(buyer, 0, 100);
  auto b = post_rfq(buyer, 0, 100);
  auto r = post("/rfqs/" + b + "/bids",
                client::submit_bid(s1, Hash::from_hex(a), 5, notary::fingerprint("q"), ts++));
  EXPECT_EQ(r.status, 400);
}

TEST_F(ServiceTest, FullProcurementFlow) {
  auto buyer = verified_user(1), s1 = verified_user(2), s2 = verified_user(3);
  auto id = post_rfq(buyer, 0, 100);
  *now = 10;
  EXPECT_EQ(bid(s1, id, 90).status, 201);
  EXPECT_EQ(bid(s2, id, 70).status, 201);
  *now = 100;
  EXPECT_EQ(post("/rfqs/" + id + "/close", {client::close_request(buyer, Hash::from_hex(id), ts++)})
                .status,
            200);
  auto fp = notary::fingerprint("contract text");
  auto award = post("/rfqs/" + id + "/award",
                    client::award(buyer, Hash::from_hex(id), t::addr(s2), fp, ts++));
  ASSERT_EQ(award.status, 201) << award.body.dump();
  EXPECT_EQ(award.body["pending"]["approved"], false);
  auto contract_id = award.body["contract"]["contract_id"].get<std::string>();
  procurement::Contract contract;
  contract.contract_id = Hash::from_hex(contract_id);
  contract.request_id = Hash::from_hex(id);
  contract.parties_account = Address::parse(award.body["contract"]["parties_account"].get<std::string>());
  contract.contract_fingerprint = fp;
  auto first = post("/contracts/" + contract_id + "/cosign",
                    client::countersign_contract(buyer, contract, false, ts++));
  EXPECT_EQ(first.status, 200);
  EXPECT_EQ(first.body["contract"]["status"], "AwaitingSignatures");
  EXPECT_EQ(get("/audit/" + fp.hex()).body["found"], false);
  auto outsider = post("/contracts/" + contract_id + "/cosign",
                       client::countersign_contract(s1, contract, false, ts++));
  EXPECT_EQ(outsider.status, 403);
  EXPECT_EQ(outsider.body["error"]["code"], "NOT_A_PARTY");
  auto second = post("/contracts/" + contract_id + "/cosign",
                     client::countersign_contract(s2, contract, true, ts++));
  EXPECT_EQ(second.status, 200);
  EXPECT_EQ(second.body["contract"]["status"], "Effective");
  EXPECT_EQ(get("/rfqs/" + id).body["request"]["status"], "Contracted");
  EXPECT_EQ(get("/contracts/" + contract_id).body["pending"]["status"], "Executed");
  auto audit = get("/audit/" + fp.hex());
  EXPECT_EQ(audit.body["found"], true);
  ASSERT_EQ(audit.body["records"].size(), 1u);
  EXPECT_EQ(audit.body["records"][0]["owner"], t::addr(s2).str());
  EXPECT_EQ(audit.body["records"][0]["label"], "contract");
}

TEST_F(ServiceTest, MultisigRoutes) {
  auto bob = verified_user(1), alice = verified_user(2);
  auto created = post("/multisig/accounts",
                      {client::create_multisig(bob, 2, {t::addr(bob), t::addr(alice)}, 0, ts++)});
  ASSERT_EQ(created.status, 201);
  auto account = Address::parse(created.body["account"]["account"].get<std::string>());
  EXPECT_EQ(get("/multisig/accounts/" + account.str()).body["account"]["min_approvals"], 2);
  Json payload = {{"pay", 1}};
  auto proposed = post("/multisig/pending", {client::propose(bob, account, payload, ts++)});
  ASSERT_EQ(proposed.status, 201);
  auto pid = proposed.body["pending"]["pending_id"].get<std::string>();
  EXPECT_EQ(get("/multisig/pending/" + pid).body["pending"]["approved"], false);
  auto done = post("/multisig/pending/" + pid + "/cosign",
                   {client::cosign(alice, Hash::from_hex(pid), account, payload, ts++)});
  EXPECT_EQ(done.status, 200);
  EXPECT_EQ(done.body["pending"]["status"], "Executed");
  EXPECT_EQ(done.body["pending"]["approved"], true);
  auto bad = post("/multisig/accounts",
                  {client::create_multisig(bob, 3, {t::addr(bob), t::addr(alice)}, 1, ts++)});
  EXPECT_EQ(bad.status, 422);
  EXPECT_EQ(bad.body["error"]["code"], "BAD_THRESHOLD");
}

TEST_F(ServiceTest, ReadsDoNotMutate) {
  auto bob = verified_user(1);
  post("/notarize", {client::notarize(bob, notary::fingerprint("d"), "d", ts++)});
  auto tip = svc->tip_hash();
  auto first = get("/chain");
  for (auto path : {"/rfqs", "/chain", "/chain/validate", "/healthz"}) get(path);
  get("/audit/" + notary::fingerprint("d").hex());
  EXPECT_EQ(svc->tip_hash(), tip);
  EXPECT_EQ(get("/chain").body, first.body);
}

TEST_F(ServiceTest, RestartRestoresState) {
  auto buyer = verified_user(1), s1 = verified_user(2);
  auto id = post_rfq(buyer, 0, 100);
  *now = 5;
  bid(s1, id, 12);
  post("/notarize", {client::notarize(buyer, notary::fingerprint("x"), "x", ts++)});
  auto tip = svc->tip_hash();
  auto rfq = get("/rfqs/" + id).body;
  auto ranking = get("/rfqs/" + id + "/ranking").body;
  boot(config());
  EXPECT_EQ(svc->tip_hash(), tip);
  EXPECT_EQ(get("/rfqs/" + id).body, rfq);
  EXPECT_EQ(get("/rfqs/" + id + "/ranking").body, ranking);
  EXPECT_EQ(get("/chain/validate").body["ok"], true);
}

TEST_F(ServiceTest, TamperedLogIsReported) {
  auto bob = verified_user(1);
  for (int i = 0; i < 3; ++i) {
    post("/notarize", {client::notarize(bob, notary::fingerprint(std::to_string(i)), "n", ts++)});
  }
  auto path = dir / "chain.blocks";
  ledger::BlockLog log(path);
  auto lines = log.read_lines();
  auto block = Json::parse(lines[3]);
  block["transactions"][0]["body"]["label"] = "edited";
  lines[3] = canonical_json(block);
  {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
  }
  auto v = get("/chain/validate").body;
  EXPECT_EQ(v["ok"], false);
  EXPECT_EQ(v["failed_height"], 3);
  EXPECT_EQ(v["reason"], "bad_tx_root");
  EXPECT_EQ(v["matches_live_chain"], false);

  EXPECT_EQ(code_of([&] { boot(config()); }), ErrorCode::CorruptLog);
}

TEST_F(ServiceTest, TruncatedLineRefusesStart) {
  verified_user(1);
  svc.reset();
  std::ofstream(dir / "chain.blocks", std::ios::app) << "{\"block_hash\":\n";
  EXPECT_EQ(code_of([&] { boot(config()); }), ErrorCode::CorruptLog);
}

TEST_F(ServiceTest, BusyWhenWriterQueueIsFull) {
  auto c = config();
  c.writer_queue_limit = 0;
  boot(c);
  auto r = post("/users", {client::register_user(t::key(1), "a", notary::fingerprint("a"), 1)});
  EXPECT_EQ(r.status, 503);
  EXPECT_EQ(r.body["error"]["code"], "BUSY");
  EXPECT_EQ(get("/healthz").status, 200);
}

TEST_F(ServiceTest, HttpRoundTrip) {
  auto port = svc->start();
  httplib::Client cli("127.0.0.1", port);
  auto health = cli.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(Json::parse(health->body)["status"], "ok");

  auto k = t::key(1);
  auto body = batch({client::register_user(k, "bob", notary::fingerprint("b"), 1)});
  auto created = cli.Post("/users", body, "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Content-Type"), "application/json");
  auto j = Json::parse(created->body);
  EXPECT_EQ(canonical_json(j), created->body);
  EXPECT_EQ(j["user"]["address"], t::addr(k).str());

  auto missing = cli.Get("/missing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  svc->stop();
}

TEST_F(ServiceTest, BindFailureOnTakenPort) {
  auto port = svc->start();
  auto c = config();
  c.block_log = dir / "other.blocks";
  c.port = port;
  Service second(c, [] { return Millis{0}; });
  EXPECT_EQ(code_of([&] { second.serve(); }), ErrorCode::BindFailure);
}

TEST(Config, PrecedenceFileThenEnv) {
  t::TempDir dir;
  auto v1 = t::addr(t::key(1)), v2 = t::addr(t::key(2));
  {
    std::ofstream out(dir / "config.json");
    out << Json{{"port", 9000}, {"verifiers", {v1.str()}}, {"pending_expiry_ms", 1000}}.dump();
  }
  std::map<std::string, std::string> env{{"CHAINPROCURE_PORT", "9100"},
                                         {"CHAINPROCURE_VERIFIERS", v1.str() + "," + v2.str()}};
  auto lookup = [&](std::string_view k) -> std::optional<std::string> {
    auto it = env.find(std::string(k));
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  auto c = load_config(dir / "config.json", lookup);
  EXPECT_EQ(c.port, 9100);
  EXPECT_EQ(c.pending_expiry_ms, 1000);
  EXPECT_EQ(c.verifiers, (std::vector<Address>{v1, v2}));
  EXPECT_EQ(c.listen, "127.0.0.1");

  auto defaults = load_config(std::nullopt, [](std::string_view) { return std::nullopt; });
  EXPECT_EQ(defaults.port, 8080);
  EXPECT_EQ(defaults.pending_expiry_ms, procurement::kDefaultPendingExpiry);

  env["CHAINPROCURE_PORT"] = "eighty";
  EXPECT_EQ(code_of([&] { load_config(dir / "config.json", lookup); }), ErrorCode::BadRequest);
}

TEST(Config, ValidationAndUnknownKeys) {
  ServiceConfig c;
  EXPECT_EQ(code_of([&] { merge_config(c, Json{{"colour", "blue"}}); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([&] { validate(c); }), ErrorCode::BadRequest);
  t::TempDir dir;
  c.verifiers = {t::addr(t::key(1))};
  c.block_log = dir / "missing-dir" / "chain.blocks";
  EXPECT_EQ(code_of([&] { validate(c); }), ErrorCode::BadRequest);
  c.block_log = dir / "chain.blocks";
  EXPECT_NO_THROW(validate(c));
  c.pending_expiry_ms = 0;
  EXPECT_EQ(code_of([&] { validate(c); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([&] { load_config(dir / "absent.json", process_env()); }), ErrorCode::Io);
}
