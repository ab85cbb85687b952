#include "dosefind/service.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <httplib.h>

namespace dosefind::service {

namespace {

std::string now_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string random_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

Alphabet alphabet_for(Design d) { return d == Design::crm ? Alphabet::binary : Alphabet::quaternary; }

Design design_from_string(const std::string &name, const std::string &field) {
  if (name == "crm") return Design::crm;
  if (name == "efftox") return Design::efftox;
  throw ValidationError("unknown design '" + name + "' (expected crm or efftox)", field);
}

void check_doses(const OutcomeSequence &data, int num_doses, const std::string &field) {
  if (data.max_dose_level() > num_doses)
    throw ValidationError("dose level " + std::to_string(data.max_dose_level()) + " exceeds the " +
                              std::to_string(num_doses) + " doses of the design",
                          field);
}

SamplerConfig sampler_of(const Session &s) {
  Json j{{"seed", s.seed}};
  if (!s.sampler.is_null()) j["sampler"] = s.sampler;
  api::Fields f(j);
  return api::read_sampler(f);
}

int num_doses(const Session &s) {
  api::Fields f(s.spec, "spec.");
  return s.design == Design::crm ? api::read_crm_spec(f).num_doses() : api::read_efftox_spec(f).num_doses();
}

std::uint64_t read_seed(const Json &body) {
  if (!body.contains("seed") || body["seed"].is_null()) return SamplerConfig{}.seed;
  const auto &v = body["seed"];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ValidationError("seed must be a non-negative integer", "seed");
  return v.get<std::uint64_t>();
}

int to_int(const std::string &text, const std::string &field) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::exception &) {
  }
  throw ValidationError(field + " must be an integer", field);
}

}  // namespace

Config Config::from_env() {
  Config c;
  if (const char *dir = std::getenv("DOSEFIND_DATA_DIR"); dir && *dir) c.data_dir = dir;
  if (const char *t = std::getenv("DOSEFIND_TIMEOUT"); t && *t)
    c.limits.timeout = std::chrono::milliseconds(static_cast<long long>(std::stod(t) * 1000.0));
  if (const char *b = std::getenv("DOSEFIND_NODE_BUDGET"); b && *b) c.limits.node_budget = std::stoul(b);
  return c;
}

SessionStore::SessionStore(Config config) : config_(std::move(config)) {
  if (config_.data_dir) std::filesystem::create_directories(*config_.data_dir);
}

void SessionStore::load() {
  if (!config_.data_dir) return;
  for (const auto &entry : std::filesystem::directory_iterator(*config_.data_dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    std::shared_ptr<Session> s;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto ev = Json::parse(line);
      if (ev.at("event") == "create") {
        s = std::make_shared<Session>();
        s->id = ev.at("session_id");
        s->design = design_from_string(ev.at("design"), "design");
        s->spec = ev.at("spec");
        s->sampler = ev.at("sampler");
        s->seed = ev.at("seed");
        s->policy = ev.at("policy");
        s->history = parse_outcomes(ev.at("outcomes").get<std::string>(), alphabet_for(s->design));
        s->created = s->updated = ev.at("time");
      } else if (s && ev.at("event") == "append") {
        s->history.append(parse_outcomes(ev.at("outcomes").get<std::string>(), alphabet_for(s->design)));
        s->revision = ev.at("revision");
        s->updated = ev.at("time");
      }
    }
    if (s) sessions_[s->id] = s;
  }
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<Session> SessionStore::find(const std::string &id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("no session '" + id + "'");
  return it->second;
}

void SessionStore::write_event(const Session &s, const Json &event) const {
  if (!config_.data_dir) return;
  std::ofstream out(*config_.data_dir / (s.id + ".jsonl"), std::ios::app);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("could not write session log for '" + s.id + "'");
}

Json SessionStore::fit(const Session &s, const OutcomeSequence &history) const {
  const auto sampler = sampler_of(s);
  api::Fields f(s.spec, "spec.");
  Json out;
  DoseChoice rec;
  if (s.design == Design::crm) {
    const auto spec = api::read_crm_spec(f);
    const auto policy = api::read_crm_policy(s.policy, "policy");
    const auto result = dosefind::fit_crm(spec, history, sampler);
    rec = policy.make()(result);
    out = crm_fit_json(result);
  } else {
    const auto spec = api::read_efftox_spec(f);
    const auto result = dosefind::fit_efftox(spec, history, sampler);
    rec = efftox_default_policy(result);
    out = efftox_fit_json(result, config_.contour_resolution);
  }
  out["recommendation"] = dose_choice_json(rec);
  return out;
}

Json SessionStore::view(const Session &s) const {
  return {{"session",
           {{"session_id", s.id},
            {"design", to_string(s.design)},
            {"spec", s.spec},
            {"sampler", s.sampler},
            {"policy", s.policy},
            {"outcomes", serialize_outcomes(s.history)},
            {"num_patients", s.history.size()},
            {"revision", s.revision},
            {"created", s.created},
            {"updated", s.updated}}},
          {"fit", s.latest},
          {"recommendation", s.latest.at("recommendation")},
          {"seed", s.seed},
          {"diagnostics", s.latest.at("diagnostics")}};
}

Json SessionStore::create(const Json &body) {
  api::Fields f(body);
  auto s = std::make_shared<Session>();
  s->design = design_from_string(f.string("design"), "design");
  const Json *spec = f.get("spec");
  if (!spec) throw ValidationError("spec is required", "spec");
  {
    api::Fields sf(*spec, "spec.");
    if (s->design == Design::crm)
      (void)api::read_crm_spec(sf);
    else
      (void)api::read_efftox_spec(sf);
    sf.finish();
  }
  s->spec = *spec;
  const Json *policy = f.get("policy");
  if (s->design == Design::crm) {
    s->policy = api::read_crm_policy(policy ? *policy : Json(nullptr), "policy").to_json();
  } else {
    if (policy && !(policy->is_string() && policy->get<std::string>() == "default"))
      throw ValidationError("EffTox sessions support only the default policy", "policy");
    s->policy = "default";
  }
  (void)f.get("seed");
  s->seed = read_seed(body);
  if (const Json *sampler = f.get("sampler")) s->sampler = *sampler;
  (void)sampler_of(*s);
  const auto outcomes = f.opt_string("outcomes").value_or("");
  f.finish();
  try {
    s->history = parse_outcomes(outcomes, alphabet_for(s->design));
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), "outcomes");
  }
  check_doses(s->history, num_doses(*s), "outcomes");
  s->latest = fit(*s, s->history);
  s->id = random_id();
  s->created = s->updated = now_iso();
  write_event(*s, {{"event", "create"},
                   {"session_id", s->id},
                   {"design", to_string(s->design)},
                   {"spec", s->spec},
                   {"sampler", s->sampler},
                   {"seed", s->seed},
                   {"policy", s->policy},
                   {"outcomes", outcomes},
                   {"recommendation", s->latest.at("recommendation")},
                   {"time", s->created}});
  {
    std::unique_lock lock(mutex_);
    sessions_[s->id] = s;
  }
  return view(*s);
}

Json SessionStore::get(const std::string &id) {
  auto s = find(id);
  std::lock_guard lock(s->append_mutex);
  if (s->latest.is_null()) s->latest = fit(*s, s->history);
  return view(*s);
}

Json SessionStore::append(const std::string &id, const Json &body) {
  auto s = find(id);
  std::unique_lock lock(s->append_mutex, std::try_to_lock);
  if (!lock.owns_lock()) throw ConflictError("session '" + id + "' is processing another append");
  api::Fields f(body);
  const auto text = f.string("outcomes");
  const auto dose = f.opt_integer("dose_level");
  const auto revision = f.opt_integer("revision");
  f.finish();
  if (revision && *revision != s->revision)
    throw ConflictError("stale revision " + std::to_string(*revision) + "; session is at revision " +
                        std::to_string(s->revision));
  OutcomeSequence cohort(alphabet_for(s->design));
  try {
    if (dose)
      cohort.append_cohort(*dose, text);
    else
      cohort = parse_outcomes(text, alphabet_for(s->design));
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), "outcomes");
  }
  if (cohort.empty()) throw ValidationError("outcomes must contain at least one patient", "outcomes");
  check_doses(cohort, num_doses(*s), dose ? "dose_level" : "outcomes");
  OutcomeSequence history = s->history;
  history.append(cohort);
  Json latest = fit(*s, history);
  const auto time = now_iso();
  write_event(*s, {{"event", "append"},
                   {"revision", s->revision + 1},
                   {"outcomes", serialize_outcomes(cohort)},
                   {"recommendation", latest.at("recommendation")},
                   {"time", time}});
  s->history = std::move(history);
  s->latest = std::move(latest);
  s->revision += 1;
  s->updated = time;
  return view(*s);
}

Json SessionStore::dtp(const std::string &id, const std::map<std::string, std::string> &query) {
  auto s = find(id);
  Json req = s->spec;
  {
    std::lock_guard lock(s->append_mutex);
    req["outcomes"] = serialize_outcomes(s->history);
  }
  req["seed"] = s->seed;
  if (!s->sampler.is_null()) req["sampler"] = s->sampler;
  for (const auto &[key, value] : query) {
    if (key == "cohort_sizes") {
      Json sizes = Json::array();
      std::stringstream ss(value);
      for (std::string item; std::getline(ss, item, ',');) sizes.push_back(to_int(item, "cohort_sizes"));
      req["cohort_sizes"] = sizes;
    } else if (key == "next_dose") {
      req["next_dose"] = to_int(value, "next_dose");
    } else if (key == "policy") {
      if (value != "session" && value != "default")
        throw ValidationError("policy must be session or default", "policy");
      if (value == "default") req["policy"] = "default";
    } else {
      throw ValidationError("unknown query parameter '" + key + "'", key);
    }
  }
  if (!req.contains("cohort_sizes")) throw ValidationError("cohort_sizes is required", "cohort_sizes");
  if (s->design == Design::crm) {
    if (!req.contains("policy")) req["policy"] = s->policy;
    return api::dtp_crm(req, config_.limits);
  }
  return api::dtp_efftox(req, config_.limits);
}

std::string render(const Json &j) { return j.dump() + "\n"; }

Service::Service(Config config) : config_(config), store_(std::move(config)) { store_.load(); }

Response Service::handle(const std::string &method, const std::string &path, const std::string &body,
                         const std::map<std::string, std::string> &query) {
  static const std::regex session_re(R"(^/v1/sessions/([0-9A-Za-z_-]+)(/outcomes|/dtp)?$)");
  try {
    if (path == "/v1/health" && method == "GET") return {200, render({{"status", "ok"}})};
    if (path == "/v1/sessions" && method == "POST") return {201, render(store_.create(api::parse_request(body)))};
    std::smatch m;
    if (std::regex_match(path, m, session_re)) {
      const std::string id = m[1];
      const std::string tail = m[2];
      if (tail.empty() && method == "GET") return {200, render(store_.get(id))};
      if (tail == "/outcomes" && method == "POST") return {200, render(store_.append(id, api::parse_request(body)))};
      if (tail == "/dtp" && method == "GET") return {200, render(store_.dtp(id, query))};
      return {405, render(api::error_json("method_not_allowed", method + " " + path))};
    }
    if (path.rfind("/v1/", 0) == 0 && method == "POST") {
      const auto endpoint = path.substr(4);
      if (endpoint == "fit/crm" || endpoint == "fit/efftox" || endpoint == "fit/augbin" ||
          endpoint == "augbin/predict" || endpoint == "augbin/prior-predictive" || endpoint == "augbin/simulate" ||
          endpoint == "dtp/crm" || endpoint == "dtp/efftox")
        return {200, render(api::call(endpoint, api::parse_request(body), config_.limits))};
    }
    return {404, render(api::error_json("not_found", "no route for " + method + " " + path))};
  } catch (const api::BudgetError &e) {
    auto j = api::error_json("budget_exceeded", e.what(), e.field());
    j["error"]["node_count"] = e.node_count();
    j["error"]["budget"] = e.budget();
    return {400, render(j)};
  } catch (const ValidationError &e) {
    return {400, render(api::error_json("validation_error", e.what(), e.field()))};
  } catch (const NotFoundError &e) {
    return {404, render(api::error_json("not_found", e.what()))};
  } catch (const ConflictError &e) {
    return {409, render(api::error_json("conflict", e.what()))};
  } catch (const api::TimeoutError &e) {
    return {503, render(api::error_json("timeout", e.what()))};
  } catch (const SamplerError &e) {
    auto j = api::error_json("sampler_error", e.what());
    j["error"]["diagnostics"] = {{"path", path}};
    return {500, render(j)};
  } catch (const std::exception &e) {
    return {500, render(api::error_json("internal_error", e.what()))};
  }
}

void Service::serve(const std::string &host, int port) {
  httplib::Server server;
  auto dispatch = [this](const httplib::Request &req, httplib::Response &res) {
    std::map<std::string, std::string> query;
    for (const auto &[k, v] : req.params) query[k] = v;
    const auto r = handle(req.method, req.path, req.body, query);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/.*)", dispatch);
  server.Post(R"(/.*)", dispatch);
  if (!server.listen(host, port)) throw std::runtime_error("could not listen on " + host + ":" + std::to_string(port));
}

std::pair<std::string, int> parse_bind(const std::string &bind) {
  std::string host = "127.0.0.1";
  int port = 8080;
  if (bind.empty()) return {host, port};
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    host = bind;
  } else {
    if (colon > 0) host = bind.substr(0, colon);
    if (colon + 1 < bind.size()) port = to_int(bind.substr(colon + 1), "bind");
  }
  if (port < 1 || port > 65535) throw ValidationError("port out of range", "bind");
  return {host, port};
}

}  // namespace dosefind::service
