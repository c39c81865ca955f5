#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "chainprocure/error.hpp"
#include "chainprocure/procurement.hpp"

namespace httplib {
class Server;
}

namespace chainprocure::api {

struct ServiceConfig {
  std::string listen = "127.0.0.1";
  int port = 8080;
  std::filesystem::path block_log = "chainprocure.blocks";
  std::vector<Address> verifiers;
  Millis pending_expiry_ms = procurement::kDefaultPendingExpiry;
  std::optional<Millis> fixed_clock_ms;
  std::size_t writer_queue_limit = 64;
};

// Keys: listen, port, block_log, verifiers, pending_expiry_ms,
// fixed_clock_ms, writer_queue_limit. Unknown keys are rejected.
ServiceConfig merge_config(ServiceConfig base, const Json& overrides);

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;
EnvLookup process_env();

// CHAINPROCURE_<KEY> overrides; verifiers are comma separated.
ServiceConfig apply_env(ServiceConfig base, const EnvLookup& env);

// Defaults, then the JSON config file (if any), then the environment.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env);

// Throws Error{BadRequest} unless at least one verifier is configured and
// the block log's directory exists.
void validate(const ServiceConfig& config);

struct ApiError {
  int status = 500;
  std::string code;
  std::string message;
};

ApiError to_api_error(const Error& error);
Json to_json(const ApiError& error);

struct Response {
  int status = 200;
  Json body = Json::object();
};

using Clock = std::function<Millis()>;
Clock system_clock();

// The running service: engine + block log + HTTP surface. All state is
// recovered from the block log on construction.
class Service {
 public:
  // Throws Error{CorruptLog} if the log does not replay cleanly.
  explicit Service(ServiceConfig config, Clock clock = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(std::string_view method, std::string_view path, std::string_view body);

  // Blocking. Throws Error{BindFailure}.
  void serve();
  // Binds (port 0 picks a free port), serves on a background thread and
  // returns the bound port.
  int start();
  void stop();

  const ServiceConfig& config() const { return config_; }
  Hash tip_hash() const;

 private:
  Response dispatch(std::string_view method, const std::vector<std::string>& parts,
                    std::string_view body);
  Response dispatch_write(std::string_view method, const std::vector<std::string>& parts,
                          std::string_view raw_body);
  Response dispatch_read(const std::vector<std::string>& parts) const;
  Json validate_block_log() const;
  void install_routes();

  ServiceConfig config_;
  Clock clock_;
  ledger::BlockLog log_;
  std::unique_ptr<procurement::Engine> engine_;
  mutable std::shared_mutex mutex_;
  std::atomic<std::size_t> queued_writers_{0};
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
};

}  // namespace chainprocure::api
