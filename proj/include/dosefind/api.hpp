#pragma once

// JSON request handlers shared by the CLI (--json), the HTTP service and the
// python module, so that identical requests produce identical bytes.

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "dosefind/errors.hpp"
#include "dosefind/pathways.hpp"
#include "dosefind/report.hpp"

namespace dosefind::api {

// A DTP request needs more fits than the configured budget.
class BudgetError : public ValidationError {
 public:
  BudgetError(std::size_t node_count, std::size_t budget);
  [[nodiscard]] std::size_t node_count() const noexcept { return node_count_; }
  [[nodiscard]] std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t node_count_;
  std::size_t budget_;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Limits {
  std::size_t node_budget = 500;
  std::chrono::milliseconds timeout{60'000};
};

// Reads a JSON object field by field and rejects any key it was not asked
// about, naming it in the error.
class Fields {
 public:
  Fields(const Json &object, std::string prefix = {});

  [[nodiscard]] bool has(const std::string &key) const;
  [[nodiscard]] const Json *get(const std::string &key);
  [[nodiscard]] double number(const std::string &key);
  [[nodiscard]] std::optional<double> opt_number(const std::string &key);
  [[nodiscard]] int integer(const std::string &key);
  [[nodiscard]] std::optional<int> opt_integer(const std::string &key);
  [[nodiscard]] std::string string(const std::string &key);
  [[nodiscard]] std::optional<std::string> opt_string(const std::string &key);
  [[nodiscard]] std::vector<double> numbers(const std::string &key);
  [[nodiscard]] std::optional<std::vector<double>> opt_numbers(const std::string &key);
  [[nodiscard]] std::vector<int> integers(const std::string &key);
  [[nodiscard]] std::optional<std::vector<int>> opt_integers(const std::string &key);
  [[nodiscard]] std::optional<bool> opt_bool(const std::string &key);
  [[nodiscard]] std::string name(const std::string &key) const { return prefix_ + key; }
  // Throws on the first key never read.
  void finish() const;

 private:
  const Json &object_;
  std::string prefix_;
  std::vector<std::string> seen_;
};

// Spec readers; each consumes its own keys from `f`.
[[nodiscard]] CrmSpec read_crm_spec(Fields &f);
[[nodiscard]] EffToxSpec read_efftox_spec(Fields &f);
[[nodiscard]] AugBinPriors read_augbin_priors(const Json &value, const std::string &field);
[[nodiscard]] AugBinDataset read_augbin_data(Fields &f);
// "seed" and the optional "sampler" object.
[[nodiscard]] SamplerConfig read_sampler(Fields &f);

// Policy: "default" or {"name": "careful_escalation", "tox_threshold",
// "certainty_threshold", "reference_dose"}.
struct CrmPolicySpec {
  bool careful = false;
  double tox_threshold = 0.35;
  double certainty_threshold = 0.7;
  int reference_dose = 1;

  [[nodiscard]] CrmPolicy make() const;
  [[nodiscard]] Json to_json() const;
};
[[nodiscard]] CrmPolicySpec read_crm_policy(const Json &value, const std::string &field);

[[nodiscard]] Json fit_crm(const Json &request);
[[nodiscard]] Json fit_efftox(const Json &request);
[[nodiscard]] Json fit_augbin(const Json &request);
[[nodiscard]] Json augbin_predict(const Json &request);
[[nodiscard]] Json augbin_prior_predictive(const Json &request);
[[nodiscard]] Json augbin_simulate(const Json &request);
[[nodiscard]] Json dtp_crm(const Json &request, const Limits &limits = {});
[[nodiscard]] Json dtp_efftox(const Json &request, const Limits &limits = {});

// Stateless endpoints by path suffix ("fit/crm", "dtp/efftox",
// "augbin/predict", ...). Throws ValidationError for an unknown endpoint.
[[nodiscard]] Json call(std::string_view endpoint, const Json &request, const Limits &limits = {});

// Error payload {"error": {"type", "message", "field"?, ...}}.
[[nodiscard]] Json error_json(std::string_view type, const std::string &message, const std::string &field = {});

// Parses request text, reporting malformed JSON as a ValidationError.
[[nodiscard]] Json parse_request(std::string_view text);

}  // namespace dosefind::api
