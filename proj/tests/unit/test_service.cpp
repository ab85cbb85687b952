#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "dosefind/service.hpp"

using namespace dosefind;
namespace fs = std::filesystem;

namespace {

const char *crm_body = R"({"model": "logistic", "skeleton": [0.05, 0.12, 0.25, 0.40, 0.55], "target": 0.25,
  "a0": 3, "beta_mean": 0, "beta_sd": 1.1575836902790226, "outcomes": "3N 5N 5T 3N 4N", "seed": 123})";

Json careful_session() {
  return Json::parse(R"({"design": "crm",
    "spec": {"model": "empiric", "skeleton": [0.05, 0.15, 0.25, 0.4, 0.6], "target": 0.25, "beta_sd": 1},
    "policy": {"name": "careful_escalation", "tox_threshold": 0.35, "certainty_threshold": 0.7, "reference_dose": 1},
    "outcomes": "2NN 3TN", "seed": 123})");
}

Json efftox_spec() {
  return Json::parse(R"({"real_doses": [1, 2, 4, 6.6, 10], "efficacy_hurdle": 0.5, "toxicity_hurdle": 0.3,
    "p_e": 0.1, "p_t": 0.1, "eff0": 0.5, "tox1": 0.65, "eff_star": 0.7, "tox_star": 0.25,
    "alpha_mean": -7.9593, "alpha_sd": 3.5487, "beta_mean": 1.5482, "beta_sd": 3.5018,
    "gamma_mean": 0.7367, "gamma_sd": 2.5423, "zeta_mean": 3.4181, "zeta_sd": 2.4406,
    "eta_mean": 0, "eta_sd": 0.2, "psi_mean": 0, "psi_sd": 1})");
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dosefind-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

service::Config config_for(const fs::path &dir) {
  service::Config c;
  c.data_dir = dir;
  return c;
}

}  // namespace

TEST_CASE("stateless endpoints") {
  service::Service svc(service::Config{});
  const auto health = svc.handle("GET", "/v1/health", "");
  CHECK(health.status == 200);
  CHECK(Json::parse(health.body) == Json{{"status", "ok"}});

  const auto fit = svc.handle("POST", "/v1/fit/crm", crm_body);
  REQUIRE(fit.status == 200);
  const auto j = Json::parse(fit.body);
  CHECK(j["recommended_dose"] == 4);
  CHECK(j["seed"] == 123);
  CHECK(j["diagnostics"]["chains"] == 4);
  CHECK(j["doses"].size() == 5);

  // CLI --json, python and HTTP share one renderer.
  CHECK(fit.body == service::render(api::call("fit/crm", Json::parse(crm_body))));
}

TEST_CASE("request validation") {
  service::Service svc(service::Config{});
  auto bad = Json::parse(crm_body);
  bad["colour"] = "blue";
  auto r = svc.handle("POST", "/v1/fit/crm", bad.dump());
  CHECK(r.status == 400);
  CHECK(Json::parse(r.body)["error"]["field"] == "colour");

  bad = Json::parse(crm_body);
  bad.erase("target");
  r = svc.handle("POST", "/v1/fit/crm", bad.dump());
  CHECK(r.status == 400);
  CHECK(Json::parse(r.body)["error"]["field"] == "target");

  bad = Json::parse(crm_body);
  bad["outcomes"] = "3N 9T";
  CHECK(svc.handle("POST", "/v1/fit/crm", bad.dump()).status == 400);
  bad["sampler"] = {{"chains", 0}};
  CHECK(Json::parse(svc.handle("POST", "/v1/fit/crm", bad.dump()).body)["error"]["field"] == "sampler.chains");

  CHECK(svc.handle("POST", "/v1/fit/crm", "{not json").status == 400);
  CHECK(svc.handle("POST", "/v1/fit/probit", "{}").status == 404);
  CHECK(svc.handle("GET", "/v1/nowhere", "").status == 404);
}

TEST_CASE("weighted CRM data through the API") {
  auto body = Json::parse(crm_body);
  body.erase("outcomes");
  body["model"] = "empiric";
  body.erase("a0");
  body["beta_sd"] = 1.1575836902790226;
  body["doses"] = {3, 3, 3, 3};
  body["tox"] = {0, 0, 0, 0};
  body["weights"] = {73.0 / 126, 66.0 / 126, 35.0 / 126, 28.0 / 126};
  CHECK(api::fit_crm(body)["recommended_dose"] == 4);
}

TEST_CASE("pathway budget and timeout") {
  auto body = efftox_spec();
  body["outcomes"] = "1NNN 2ENN";
  body["cohort_sizes"] = {3, 3};
  service::Config tight;
  tight.limits.node_budget = 400;
  const auto r = service::Service(tight).handle("POST", "/v1/dtp/efftox", body.dump());
  CHECK(r.status == 400);
  const auto e = Json::parse(r.body)["error"];
  CHECK(e["type"] == "budget_exceeded");
  CHECK(e["node_count"] == 421);
  CHECK(e["budget"] == 400);

  service::Service svc(service::Config{});

  auto crm = careful_session()["spec"];
  crm["cohort_sizes"] = {2, 2};
  service::Config slow;
  slow.limits.timeout = std::chrono::milliseconds(0);
  service::Service impatient(slow);
  CHECK(impatient.handle("POST", "/v1/dtp/crm", crm.dump()).status == 503);
  const auto ok = svc.handle("POST", "/v1/dtp/crm", crm.dump());
  REQUIRE(ok.status == 200);
  CHECK(Json::parse(ok.body)["num_nodes"] == 13);
}

TEST_CASE("sessions: stop path, conflicts and replay") {
  TempDir dir;
  std::string id;
  Json stopped;
  {
    service::Service svc(config_for(dir.path));
    const auto created = svc.handle("POST", "/v1/sessions", careful_session().dump());
    REQUIRE(created.status == 201);
    const auto c = Json::parse(created.body);
    id = c["session"]["session_id"];
    CHECK(c["recommendation"] == 2);
    CHECK(c["session"]["revision"] == 0);

    auto r = svc.handle("POST", "/v1/sessions/" + id + "/outcomes", R"({"outcomes": "2TTT", "revision": 0})");
    REQUIRE(r.status == 200);
    CHECK(Json::parse(r.body)["session"]["revision"] == 1);

    r = svc.handle("POST", "/v1/sessions/" + id + "/outcomes", R"({"outcomes": "1NN", "revision": 0})");
    CHECK(r.status == 409);

    r = svc.handle("POST", "/v1/sessions/" + id + "/outcomes", R"({"outcomes": "TTT", "dose_level": 1})");
    REQUIRE(r.status == 200);
    stopped = Json::parse(r.body);
    CHECK(stopped["recommendation"] == "stop");
    CHECK(stopped["session"]["outcomes"] == "2NN 3TN 2TTT 1TTT");

    CHECK(svc.handle("GET", "/v1/sessions/ffff", "").status == 404);
    CHECK(svc.handle("POST", "/v1/sessions/" + id + "/outcomes", R"({"outcomes": "2XY"})").status == 400);
    CHECK(svc.handle("POST", "/v1/sessions/" + id + "/outcomes", R"({"outcomes": "9T"})").status == 400);
  }
  // The JSON-lines log replays into a fresh service.
  std::ifstream log(dir.path / (id + ".jsonl"));
  int lines = 0;
  for (std::string line; std::getline(log, line);) ++lines;
  CHECK(lines == 3);

  service::Service again(config_for(dir.path));
  const auto g = again.handle("GET", "/v1/sessions/" + id, "");
  REQUIRE(g.status == 200);
  const auto replayed = Json::parse(g.body);
  CHECK(replayed["recommendation"] == stopped["recommendation"]);
  CHECK(replayed["fit"] == stopped["fit"]);
  CHECK(replayed["session"]["revision"] == 2);
}

TEST_CASE("session pathways") {
  service::Service svc(service::Config{});
  const auto c = Json::parse(svc.handle("POST", "/v1/sessions", careful_session().dump()).body);
  const std::string id = c["session"]["session_id"];
  const auto r = svc.handle("GET", "/v1/sessions/" + id + "/dtp", "", {{"cohort_sizes", "3,3"}});
  REQUIRE(r.status == 200);
  const auto j = Json::parse(r.body);
  CHECK(j["num_nodes"] == 21);
  CHECK(j["num_paths"] == 16);
  CHECK(j["paths"].back()["next_dose2"].is_null());
  CHECK(svc.handle("GET", "/v1/sessions/" + id + "/dtp", "", {}).status == 400);
  CHECK(svc.handle("GET", "/v1/sessions/" + id + "/dtp", "", {{"cohort_sizes", "3,x"}}).status == 400);
}

TEST_CASE("EffTox session carries the contour") {
  service::Service svc(service::Config{});
  Json body{{"design", "efftox"}, {"spec", efftox_spec()}, {"outcomes", "1NNN 2ENN"}, {"seed", 123}};
  const auto r = svc.handle("POST", "/v1/sessions", body.dump());
  REQUIRE(r.status == 201);
  const auto j = Json::parse(r.body);
  CHECK(j["recommendation"] == 3);
  CHECK(j["fit"]["contour"]["grid"].size() == 21 * 21);
  body["policy"] = "careful_escalation";
  CHECK(svc.handle("POST", "/v1/sessions", body.dump()).status == 400);
}

TEST_CASE("bind parsing") {
  CHECK(service::parse_bind("") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK(service::parse_bind("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
  CHECK(service::parse_bind(":7000").second == 7000);
  CHECK_THROWS_AS((void)service::parse_bind("host:99999"), ValidationError);
}
