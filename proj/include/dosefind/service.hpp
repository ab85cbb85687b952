#pragma once

// The /v1 HTTP service: stateless endpoints from api.hpp plus trial sessions
// persisted as append-only JSON-lines files.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "dosefind/api.hpp"

namespace dosefind::service {

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stale revision or a concurrent append on the same session.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::optional<std::filesystem::path> data_dir;  // nullopt keeps sessions in memory
  api::Limits limits;
  int contour_resolution = 21;

  // DOSEFIND_DATA_DIR, DOSEFIND_TIMEOUT (seconds), DOSEFIND_NODE_BUDGET.
  [[nodiscard]] static Config from_env();
};

struct Session {
  std::string id;
  Design design = Design::crm;
  Json spec;        // spec fields as accepted by the fit endpoints
  Json sampler;     // null or the sampler object
  std::uint64_t seed = 123;
  Json policy;      // CRM only; "default" or a careful_escalation object
  OutcomeSequence history;
  int revision = 0;  // number of appended cohorts
  std::string created;
  std::string updated;
  Json latest;       // most recent fit response, null until computed

  std::mutex append_mutex;
};

class SessionStore {
 public:
  explicit SessionStore(Config config);

  // Replays every *.jsonl file in the data directory.
  void load();

  [[nodiscard]] Json create(const Json &body);
  [[nodiscard]] Json get(const std::string &id);
  [[nodiscard]] Json append(const std::string &id, const Json &body);
  [[nodiscard]] Json dtp(const std::string &id, const std::map<std::string, std::string> &query);

  [[nodiscard]] std::size_t size() const;

 private:
  std::shared_ptr<Session> find(const std::string &id) const;
  Json fit(const Session &s, const OutcomeSequence &history) const;
  Json view(const Session &s) const;
  void write_event(const Session &s, const Json &event) const;

  Config config_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct Response {
  int status = 200;
  std::string body;
};

// Serialized response body; the CLI --json output uses the same bytes.
[[nodiscard]] std::string render(const Json &j);

class Service {
 public:
  explicit Service(Config config);

  // Routes one request without a socket. `query` holds URL parameters.
  [[nodiscard]] Response handle(const std::string &method, const std::string &path, const std::string &body,
                                const std::map<std::string, std::string> &query = {});

  // Blocks serving on host:port.
  void serve(const std::string &host, int port);

 private:
  Config config_;
  SessionStore store_;
};

// "host:port" with either part optional; defaults 127.0.0.1:8080.
[[nodiscard]] std::pair<std::string, int> parse_bind(const std::string &bind);

}  // namespace dosefind::service
