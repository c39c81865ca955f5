#include "chainprocure/api.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"

namespace chainprocure::api {

using procurement::Engine;

ServiceConfig merge_config(ServiceConfig base, const Json& overrides) {
  if (!overrides.is_object()) throw Error(ErrorCode::BadRequest, "config must be a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    if (key == "listen") {
      base.listen = require_string(overrides, key);
    } else if (key == "port") {
      base.port = static_cast<int>(require_int(overrides, key));
    } else if (key == "block_log") {
      base.block_log = require_string(overrides, key);
    } else if (key == "verifiers") {
      if (!value.is_array()) throw Error(ErrorCode::BadRequest, "verifiers must be an array");
      base.verifiers.clear();
      for (const auto& v : value) base.verifiers.push_back(Address::parse(v.get<std::string>()));
    } else if (key == "pending_expiry_ms") {
      base.pending_expiry_ms = require_int(overrides, key);
    } else if (key == "fixed_clock_ms") {
      if (value.is_null()) {
        base.fixed_clock_ms.reset();
      } else {
        base.fixed_clock_ms = require_int(overrides, key);
      }
    } else if (key == "writer_queue_limit") {
      base.writer_queue_limit = static_cast<std::size_t>(require_int(overrides, key));
    } else {
      throw Error(ErrorCode::BadRequest, "unknown config key '" + key + "'");
    }
  }
  return base;
}

EnvLookup process_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* v = std::getenv(std::string(name).c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

namespace {

std::int64_t parse_int(const std::string& text, std::string_view what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw Error(ErrorCode::BadRequest, std::string(what) + " must be an integer");
  }
  return v;
}

}  // namespace

ServiceConfig apply_env(ServiceConfig base, const EnvLookup& env) {
  if (auto v = env("CHAINPROCURE_LISTEN")) base.listen = *v;
  if (auto v = env("CHAINPROCURE_PORT")) base.port = static_cast<int>(parse_int(*v, "port"));
  if (auto v = env("CHAINPROCURE_BLOCK_LOG")) base.block_log = *v;
  if (auto v = env("CHAINPROCURE_VERIFIERS")) {
    base.verifiers.clear();
    std::stringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) base.verifiers.push_back(Address::parse(item));
    }
  }
  if (auto v = env("CHAINPROCURE_PENDING_EXPIRY_MS")) {
    base.pending_expiry_ms = parse_int(*v, "pending_expiry_ms");
  }
  if (auto v = env("CHAINPROCURE_FIXED_CLOCK_MS")) {
    base.fixed_clock_ms = parse_int(*v, "fixed_clock_ms");
  }
  if (auto v = env("CHAINPROCURE_WRITER_QUEUE_LIMIT")) {
    base.writer_queue_limit = static_cast<std::size_t>(parse_int(*v, "writer_queue_limit"));
  }
  return base;
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  ServiceConfig config;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::Io, "cannot read config " + file->string());
    Json doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::BadRequest, "config is not valid JSON");
    config = merge_config(std::move(config), doc);
  }
  return apply_env(std::move(config), env);
}

void validate(const ServiceConfig& config) {
  if (config.verifiers.empty()) {
    throw Error(ErrorCode::BadRequest, "at least one KYC verifier must be configured");
  }
  auto dir = std::filesystem::absolute(config.block_log).parent_path();
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::BadRequest, "block log directory " + dir.string() + " does not exist");
  }
  if (config.pending_expiry_ms <= 0) {
    throw Error(ErrorCode::BadRequest, "pending_expiry_ms must be positive");
  }
}

ApiError to_api_error(const Error& error) {
  return ApiError{http_status(error.code()), std::string(error_code_name(error.code())),
                  error.what()};
}

Json to_json(const ApiError& error) {
  return Json{{"error", {{"code", error.code}, {"message", error.message}}}};
}

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

namespace {

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

// "*" matches any single segment.
template <class Pattern>
bool route_is(const std::vector<std::string>& parts, const Pattern& want) {
  if (want.size() != parts.size()) return false;
  std::size_t i = 0;
  for (std::string_view w : want) {
    if (w != "*" && w != parts[i]) return false;
    ++i;
  }
  return true;
}

[[noreturn]] void not_found() { throw Error(ErrorCode::NotFound, "no such route"); }

std::vector<ledger::Transaction> parse_batch(const Json& body) {
  const auto& list = require_field(body, "transactions");
  if (!list.is_array() || list.empty()) {
    throw Error(ErrorCode::BadRequest, "transactions must be a non-empty array");
  }
  std::vector<ledger::Transaction> batch;
  for (const auto& item : list) batch.push_back(ledger::transaction_from_json(item));
  return batch;
}

void expect_count(const std::vector<ledger::Transaction>& batch, std::size_t n) {
  if (batch.size() != n) {
    throw Error(ErrorCode::BadRequest, "expected " + std::to_string(n) + " transaction(s)");
  }
}

void expect_path_id(const ledger::Transaction& tx, std::string_view key, const std::string& id) {
  if (require_string(tx.body, key) != id) {
    throw Error(ErrorCode::BadRequest, std::string(key) + " does not match the URL");
  }
}

template <class T>
Json sealed_json(const procurement::Sealed<T>& s, std::string_view name, Json record) {
  return Json{{std::string(name), std::move(record)},
              {"tx_id", s.tx_id.hex()},
              {"block_height", s.block_height}};
}

Json pending_json(const multisig::PendingTransaction& p, const multisig::ConfigRegistry& reg) {
  auto j = multisig::to_json(p);
  j["approved"] = p.status == multisig::PendingStatus::Approved ||
                  p.status == multisig::PendingStatus::Executed || multisig::is_approved(p, reg);
  return j;
}

// Counts a writer in the bounded queue for its lifetime.
class WriterTicket {
 public:
  WriterTicket(std::atomic<std::size_t>& queued, std::size_t limit) : queued_(queued) {
    if (queued_.fetch_add(1) >= limit) {
      queued_.fetch_sub(1);
      throw Error(ErrorCode::Busy, "writer queue is full");
    }
  }
  ~WriterTicket() { queued_.fetch_sub(1); }
  WriterTicket(const WriterTicket&) = delete;
  WriterTicket& operator=(const WriterTicket&) = delete;

 private:
  std::atomic<std::size_t>& queued_;
};

}  // namespace

Service::Service(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), log_(config_.block_log) {
  validate(config_);
  if (!clock_) {
    if (config_.fixed_clock_ms) {
      clock_ = [t = *config_.fixed_clock_ms] { return t; };
    } else {
      clock_ = system_clock();
    }
  }
  procurement::EngineConfig engine_config{config_.verifiers, config_.pending_expiry_ms};
  engine_ = std::make_unique<Engine>(Engine::replay(
      log_.load(), engine_config, [this](const ledger::Block& block) { log_.append(block); }));
}

Service::~Service() { stop(); }

Hash Service::tip_hash() const {
  std::shared_lock lock(mutex_);
  return engine_->chain().tip().block_hash;
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return dispatch(method, split_path(path), body);
  } catch (const Error& e) {
    auto err = to_api_error(e);
    return Response{err.status, to_json(err)};
  } catch (const std::exception& e) {
    ApiError err{500, "INTERNAL", e.what()};
    return Response{err.status, to_json(err)};
  }
}

Response Service::dispatch(std::string_view method, const std::vector<std::string>& parts,
                           std::string_view body) {
  if (method == "GET") {
    std::shared_lock lock(mutex_);
    return dispatch_read(parts);
  }
  if (method != "POST") not_found();
  WriterTicket ticket(queued_writers_, config_.writer_queue_limit);
  std::unique_lock lock(mutex_);
  return dispatch_write(method, parts, body);
}

Response Service::dispatch_write(std::string_view, const std::vector<std::string>& p,
                                 std::string_view raw_body) {
  auto& engine = *engine_;
  auto is = [&](std::initializer_list<std::string_view> want) { return route_is(p, want); };
  static const std::vector<std::vector<std::string_view>> kRoutes = {
      {"users"},
      {"kyc", "decisions"},
      {"rfqs"},
      {"rfqs", "*", "bids"},
      {"rfqs", "*", "close"},
      {"rfqs", "*", "award"},
      {"contracts", "*", "cosign"},
      {"multisig", "accounts"},
      {"multisig", "pending"},
      {"multisig", "pending", "*", "cosign"},
      {"notarize"},
  };
  if (std::none_of(kRoutes.begin(), kRoutes.end(),
                   [&](const auto& route) { return route_is(p, route); })) {
    not_found();
  }
  Json body = Json::parse(raw_body, nullptr, false);
  if (body.is_discarded()) throw Error(ErrorCode::BadRequest, "request body is not valid JSON");
  const auto batch = parse_batch(body);
  const Millis now = clock_();

  if (is({"users"})) {
    expect_count(batch, 1);
    auto s = engine.register_user(batch[0], now);
    return {201, sealed_json(s, "user", procurement::to_json(s.record))};
  }
  if (is({"kyc", "decisions"})) {
    expect_count(batch, 1);
    auto s = engine.verify_kyc(batch[0], now);
    return {200, sealed_json(s, "user", procurement::to_json(s.record))};
  }
  if (is({"rfqs"})) {
    expect_count(batch, 2);
    auto s = engine.post_request(batch[0], batch[1], now);
    auto out = sealed_json(s, "request", procurement::to_json(s.record));
    out["request_id"] = s.record.request_id.hex();
    return {201, out};
  }
  if (is({"rfqs", "*", "bids"})) {
    expect_count(batch, 2);
    expect_path_id(batch[0], "request_id", p[1]);
    auto s = engine.submit_bid(batch[0], batch[1], now);
    return {201, sealed_json(s, "bid", procurement::to_json(s.record))};
  }
  if (is({"rfqs", "*", "close"})) {
    expect_count(batch, 1);
    expect_path_id(batch[0], "request_id", p[1]);
    auto s = engine.close_request(batch[0], now);
    return {200, sealed_json(s, "request", procurement::to_json(s.record))};
  }
  if (is({"rfqs", "*", "award"})) {
    const auto& issue = batch.back();
    expect_path_id(issue, "request_id", p[1]);
    std::optional<ledger::Transaction> create;
    if (batch.size() == 2) {
      create = batch[0];
    } else {
      expect_count(batch, 1);
    }
    auto s = engine.award_and_issue_contract(create, issue, now);
    auto out = sealed_json(s, "contract", procurement::to_json(s.record));
    out["pending"] = pending_json(*engine.find_pending(s.record.contract_id), engine.registry());
    return {201, out};
  }
  if (is({"contracts", "*", "cosign"})) {
    if (batch.size() > 2) expect_count(batch, 2);
    expect_path_id(batch[0], "pending_id", p[1]);
    std::optional<ledger::Transaction> notarization;
    if (batch.size() == 2) notarization = batch[1];
    auto s = engine.countersign_contract(batch[0], notarization, now);
    auto out = sealed_json(s, "contract", procurement::to_json(s.record));
    out["pending"] = pending_json(*engine.find_pending(s.record.contract_id), engine.registry());
    return {200, out};
  }
  if (is({"multisig", "accounts"})) {
    expect_count(batch, 1);
    auto s = engine.create_multisig(batch[0], now);
    return {201, sealed_json(s, "account", multisig::to_json(s.record))};
  }
  if (is({"multisig", "pending"})) {
    expect_count(batch, 1);
    auto s = engine.propose(batch[0], now);
    return {201, sealed_json(s, "pending", pending_json(s.record, engine.registry()))};
  }
  if (is({"multisig", "pending", "*", "cosign"})) {
    expect_count(batch, 1);
    expect_path_id(batch[0], "pending_id", p[2]);
    auto s = engine.cosign(batch[0], now);
    return {200, sealed_json(s, "pending", pending_json(s.record, engine.registry()))};
  }
  if (is({"notarize"})) {
    expect_count(batch, 1);
    auto s = engine.notarize(batch[0], now);
    return {201, sealed_json(s, "record", notary::to_json(s.record))};
  }
  not_found();
}

Response Service::dispatch_read(const std::vector<std::string>& p) const {
  const auto& engine = *engine_;
  auto is = [&](std::initializer_list<std::string_view> want) { return route_is(p, want); };

  if (is({"healthz"})) {
    return {200, Json{{"status", "ok"}, {"height", engine.chain().size() - 1}}};
  }
  if (is({"users", "*"})) {
    const auto* user = engine.find_user(Address::parse(p[1]));
    if (user == nullptr) throw Error(ErrorCode::UnknownUser, "unknown user " + p[1]);
    return {200, Json{{"user", procurement::to_json(*user)}}};
  }
  if (is({"rfqs"})) {
    Json list = Json::array();
    for (const auto& r : engine.requests()) list.push_back(procurement::to_json(r));
    return {200, Json{{"requests", std::move(list)}}};
  }
  if (is({"rfqs", "*"})) {
    const auto id = Hash::from_hex(p[1]);
    const auto* request = engine.find_request(id);
    if (request == nullptr) throw Error(ErrorCode::UnknownRequest, "unknown request " + p[1]);
    return {200, Json{{"request", procurement::to_json(*request)},
                      {"bid_count", engine.rank_bids(id).size()}}};
  }
  if (is({"rfqs", "*", "ranking"})) {
    Json list = Json::array();
    for (const auto& b : engine.rank_bids(Hash::from_hex(p[1]))) {
      list.push_back(procurement::to_json(b));
    }
    return {200, Json{{"request_id", p[1]}, {"ranking", std::move(list)}}};
  }
  if (is({"contracts", "*"})) {
    const auto id = Hash::from_hex(p[1]);
    const auto* contract = engine.find_contract(id);
    if (contract == nullptr) throw Error(ErrorCode::UnknownContract, "unknown contract " + p[1]);
    return {200, Json{{"contract", procurement::to_json(*contract)},
                      {"pending", pending_json(*engine.find_pending(id), engine.registry())}}};
  }
  if (is({"multisig", "accounts", "*"})) {
    const auto* config = engine.registry().find(Address::parse(p[2]));
    if (config == nullptr) throw Error(ErrorCode::UnknownAccount, "unknown account " + p[2]);
    return {200, Json{{"account", multisig::to_json(*config)}}};
  }
  if (is({"multisig", "pending", "*"})) {
    const auto* pending = engine.find_pending(Hash::from_hex(p[2]));
    if (pending == nullptr) throw Error(ErrorCode::UnknownPending, "unknown pending " + p[2]);
    return {200, Json{{"pending", pending_json(*pending, engine.registry())}}};
  }
  if (is({"audit", "*"})) {
    return {200, notary::to_json(engine.audit(Hash::from_hex(p[1])))};
  }
  if (is({"chain"})) {
    Json blocks = Json::array();
    for (const auto& b : engine.chain().blocks()) {
      auto header = ledger::to_json(b.header);
      header["block_hash"] = b.block_hash.hex();
      header["tx_count"] = b.transactions.size();
      blocks.push_back(std::move(header));
    }
    return {200, Json{{"length", engine.chain().size()},
                      {"tip_hash", engine.chain().tip().block_hash.hex()},
                      {"blocks", std::move(blocks)}}};
  }
  if (is({"chain", "validate"})) {
    return {200, validate_block_log()};
  }
  not_found();
}

Json Service::validate_block_log() const {
  const auto lines = log_.read_lines();
  std::vector<ledger::Block> blocks;
  blocks.reserve(lines.size());
  ledger::ValidationReport report;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      blocks.push_back(ledger::parse_block(lines[i]));
    } catch (const Error& e) {
      report = ledger::ValidationReport::failure(i, ledger::FailureReason::Malformed, e.what());
      break;
    }
  }
  if (report.ok) report = ledger::validate_chain(blocks);
  auto out = ledger::to_json(report);
  out["source"] = "block_log";
  out["length"] = lines.size();
  out["matches_live_chain"] = report.ok && blocks == engine_->chain().blocks();
  return out;
}

void Service::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  // SO_REUSEPORT (the library default) would let a second service share the port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  auto route = [this](std::string_view method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      auto out = handle(method, req.path, req.body);
      res.status = out.status;
      res.set_content(canonical_json(out.body), "application/json");
    };
  };
  server_->Get(".*", route("GET"));
  server_->Post(".*", route("POST"));
  server_->Put(".*", route("PUT"));
  server_->Delete(".*", route("DELETE"));
  server_->Patch(".*", route("PATCH"));
}

void Service::serve() {
  install_routes();
  if (!server_->bind_to_port(config_.listen, config_.port)) {
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + config_.listen + ":" + std::to_string(config_.port));
  }
  server_->listen_after_bind();
}

int Service::start() {
  install_routes();
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.listen);
    if (port < 0) throw Error(ErrorCode::BindFailure, "cannot bind any port");
  } else if (!server_->bind_to_port(config_.listen, port)) {
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + config_.listen + ":" + std::to_string(port));
  }
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::stop() {
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace chainprocure::api
