#include "dosefind/api.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dosefind/stats.hpp"

namespace dosefind::api {

BudgetError::BudgetError(std::size_t node_count, std::size_t budget)
    : ValidationError("pathway request needs " + std::to_string(node_count) + " model fits, over the budget of " +
                          std::to_string(budget),
                      "cohort_sizes"),
      node_count_(node_count),
      budget_(budget) {}

Fields::Fields(const Json &object, std::string prefix) : object_(object), prefix_(std::move(prefix)) {
  if (!object_.is_object())
    throw ValidationError((prefix_.empty() ? std::string("request") : prefix_.substr(0, prefix_.size() - 1)) +
                              " must be a JSON object",
                          prefix_.empty() ? "" : prefix_.substr(0, prefix_.size() - 1));
}

bool Fields::has(const std::string &key) const { return object_.contains(key) && !object_.at(key).is_null(); }

const Json *Fields::get(const std::string &key) {
  seen_.push_back(key);
  if (!has(key)) return nullptr;
  return &object_.at(key);
}

std::optional<double> Fields::opt_number(const std::string &key) {
  const Json *v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_number()) throw ValidationError(name(key) + " must be a number", name(key));
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ValidationError(name(key) + " must be finite", name(key));
  return x;
}

double Fields::number(const std::string &key) {
  auto v = opt_number(key);
  if (!v) throw ValidationError(name(key) + " is required", name(key));
  return *v;
}

std::optional<int> Fields::opt_integer(const std::string &key) {
  const Json *v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) throw ValidationError(name(key) + " must be an integer", name(key));
  const auto x = v->get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ValidationError(name(key) + " is out of range", name(key));
  return static_cast<int>(x);
}

int Fields::integer(const std::string &key) {
  auto v = opt_integer(key);
  if (!v) throw ValidationError(name(key) + " is required", name(key));
  return *v;
}

std::optional<std::string> Fields::opt_string(const std::string &key) {
  const Json *v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw ValidationError(name(key) + " must be a string", name(key));
  return v->get<std::string>();
}

std::string Fields::string(const std::string &key) {
  auto v = opt_string(key);
  if (!v) throw ValidationError(name(key) + " is required", name(key));
  return *v;
}

std::optional<std::vector<double>> Fields::opt_numbers(const std::string &key) {
  const Json *v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_array()) throw ValidationError(name(key) + " must be an array of numbers", name(key));
  std::vector<double> out;
  for (const auto &x : *v) {
    if (!x.is_number()) throw ValidationError(name(key) + " must be an array of numbers", name(key));
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> Fields::numbers(const std::string &key) {
  auto v = opt_numbers(key);
  if (!v) throw ValidationError(name(key) + " is required", name(key));
  return *v;
}

std::optional<std::vector<int>> Fields::opt_integers(const std::string &key) {
  const Json *v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_array()) throw ValidationError(name(key) + " must be an array of integers", name(key));
  std::vector<int> out;
  for (const auto &x : *v) {
    if (!x.is_number_integer()) throw ValidationError(name(key) + " must be an array of integers", name(key));
    out.push_back(x.get<int>());
  }
  return out;
}

std::vector<int> Fields::integers(const std::string &key) {
  auto v = opt_integers(key);
  if (!v) throw ValidationError(name(key) + " is required", name(key));
  return *v;
}

std::optional<bool> Fields::opt_bool(const std::string &key) {
  const Json *v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_boolean()) throw ValidationError(name(key) + " must be true or false", name(key));
  return v->get<bool>();
}

void Fields::finish() const {
  for (const auto &[key, value] : object_.items())
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
      throw ValidationError("unknown field '" + name(key) + "'", name(key));
}

CrmSpec read_crm_spec(Fields &f) {
  CrmSpec spec;
  spec.skeleton = f.numbers("skeleton");
  spec.target = f.number("target");
  spec.model = crm_model_from_string(f.string("model"));
  spec.a0 = f.opt_number("a0");
  spec.beta_mean = f.opt_number("beta_mean");
  spec.beta_sd = f.opt_number("beta_sd");
  spec.beta_shape = f.opt_number("beta_shape");
  spec.beta_rate = f.opt_number("beta_rate");
  spec.alpha_mean = f.opt_number("alpha_mean");
  spec.alpha_sd = f.opt_number("alpha_sd");
  // Prior locations default to zero for the models that use them.
  if (spec.model != CrmModel::logistic_gamma && !spec.beta_mean) spec.beta_mean = 0.0;
  if (spec.model == CrmModel::logistic2 && !spec.alpha_mean) spec.alpha_mean = 0.0;
  try {
    spec.validate();
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name(e.field()));
  }
  return spec;
}

EffToxSpec read_efftox_spec(Fields &f) {
  EffToxSpec spec;
  spec.real_doses = f.numbers("real_doses");
  spec.efficacy_hurdle = f.number("efficacy_hurdle");
  spec.toxicity_hurdle = f.number("toxicity_hurdle");
  spec.p_e = f.number("p_e");
  spec.p_t = f.number("p_t");
  spec.hinges.eff0 = f.number("eff0");
  spec.hinges.tox1 = f.number("tox1");
  spec.hinges.eff_star = f.number("eff_star");
  spec.hinges.tox_star = f.number("tox_star");
  const std::pair<const char *, NormalPrior *> priors[] = {{"alpha", &spec.alpha}, {"beta", &spec.beta},
                                                           {"gamma", &spec.gamma}, {"zeta", &spec.zeta},
                                                           {"eta", &spec.eta},     {"psi", &spec.psi}};
  for (const auto &[name, p] : priors) {
    p->mean = f.number(std::string(name) + "_mean");
    p->sd = f.number(std::string(name) + "_sd");
  }
  try {
    spec.validate();
    (void)solve_contour_exponent(spec.hinges);
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name(e.field()));
  }
  return spec;
}

AugBinPriors read_augbin_priors(const Json &value, const std::string &field) {
  if (value.is_string()) {
    const auto name = value.get<std::string>();
    if (name == "diffuse") return AugBinPriors::diffuse();
    if (name == "informative") return AugBinPriors::informative();
    throw ValidationError("unknown prior preset '" + name + "' (expected diffuse or informative)", field);
  }
  Fields f(value, field + ".");
  AugBinPriors p;
  const std::pair<const char *, NormalPrior *> normals[] = {
      {"alpha", &p.alpha},       {"beta", &p.beta},         {"gamma", &p.gamma},
      {"sigma", &p.sigma},       {"alpha_d1", &p.alpha_d1}, {"gamma_d1", &p.gamma_d1},
      {"alpha_d2", &p.alpha_d2}, {"gamma_d2", &p.gamma_d2}};
  for (const auto &[name, prior] : normals) {
    prior->mean = f.number(std::string(name) + "_mean");
    prior->sd = f.number(std::string(name) + "_sd");
  }
  p.lkj_eta = f.number("omega_lkj_eta");
  f.finish();
  try {
    p.validate();
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name(e.field()));
  }
  return p;
}

AugBinDataset read_augbin_data(Fields &f) {
  const Json *rows = f.get("data");
  auto csv = f.opt_string("csv");
  if (rows && csv) throw ValidationError("give either data or csv, not both", f.name("csv"));
  if (csv) return read_augbin_csv(*csv);
  if (!rows) throw ValidationError("data is required", f.name("data"));
  if (!rows->is_array()) throw ValidationError("data must be an array of patient objects", f.name("data"));
  AugBinDataset data;
  for (std::size_t i = 0; i < rows->size(); ++i) {
    Fields r((*rows)[i], f.name("data") + "[" + std::to_string(i) + "].");
    TumourRecord t;
    t.z0 = r.number("z0");
    t.z1 = r.number("z1");
    t.z2 = r.number("z2");
    t.d1 = r.integer("d1");
    t.d2 = r.integer("d2");
    r.finish();
    data.patients.push_back(t);
  }
  try {
    data.validate();
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name("data"));
  }
  return data;
}

SamplerConfig read_sampler(Fields &f) {
  SamplerConfig cfg;
  if (const Json *seed = f.get("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0))
      throw ValidationError("seed must be a non-negative integer", f.name("seed"));
    cfg.seed = seed->get<std::uint64_t>();
  }
  if (const Json *s = f.get("sampler")) {
    Fields sf(*s, f.name("sampler") + ".");
    if (auto v = sf.opt_integer("chains")) cfg.chains = *v;
    if (auto v = sf.opt_integer("warmup")) cfg.warmup = *v;
    if (auto v = sf.opt_integer("draws_per_chain")) cfg.draws_per_chain = *v;
    if (auto v = sf.opt_integer("thin")) cfg.thin = *v;
    if (auto v = sf.opt_number("adapt_target_accept")) cfg.adapt_target_accept = *v;
    sf.finish();
    try {
      cfg.validate();
    } catch (const ValidationError &e) {
      throw ValidationError(e.what(), sf.name(e.field()));
    }
  }
  return cfg;
}

CrmPolicy CrmPolicySpec::make() const {
  if (!careful) return crm_default_policy;
  const auto spec = *this;
  return [spec](const CrmFit &fit) {
    return careful_escalation(fit, spec.tox_threshold, spec.certainty_threshold, spec.reference_dose);
  };
}

Json CrmPolicySpec::to_json() const {
  if (!careful) return "default";
  return {{"name", "careful_escalation"},
          {"tox_threshold", tox_threshold},
          {"certainty_threshold", certainty_threshold},
          {"reference_dose", reference_dose}};
}

CrmPolicySpec read_crm_policy(const Json &value, const std::string &field) {
  CrmPolicySpec p;
  if (value.is_null()) return p;
  if (value.is_string()) {
    const auto name = value.get<std::string>();
    if (name == "default") return p;
    if (name == "careful_escalation") {
      p.careful = true;
      return p;
    }
    throw ValidationError("unknown policy '" + name + "' (expected default or careful_escalation)", field);
  }
  Fields f(value, field + ".");
  const auto name = f.string("name");
  if (name == "default") {
    f.finish();
    return p;
  }
  if (name != "careful_escalation")
    throw ValidationError("unknown policy '" + name + "' (expected default or careful_escalation)", f.name("name"));
  p.careful = true;
  if (auto v = f.opt_number("tox_threshold")) p.tox_threshold = *v;
  if (auto v = f.opt_number("certainty_threshold")) p.certainty_threshold = *v;
  if (auto v = f.opt_integer("reference_dose")) p.reference_dose = *v;
  f.finish();
  if (!(p.tox_threshold > 0.0 && p.tox_threshold < 1.0))
    throw ValidationError("tox_threshold must lie in (0, 1)", f.name("tox_threshold"));
  if (!(p.certainty_threshold > 0.0 && p.certainty_threshold < 1.0))
    throw ValidationError("certainty_threshold must lie in (0, 1)", f.name("certainty_threshold"));
  if (p.reference_dose < 1) throw ValidationError("reference_dose must be positive", f.name("reference_dose"));
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

OutcomeSequence read_outcome_string(Fields &f, Alphabet alphabet) {
  const auto text = f.opt_string("outcomes").value_or("");
  try {
    return parse_outcomes(text, alphabet);
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name("outcomes"));
  }
}

OutcomeSequence read_crm_data(Fields &f) {
  auto doses = f.opt_integers("doses");
  auto tox = f.opt_integers("tox");
  auto weights = f.opt_numbers("weights");
  const bool vectors = doses || tox || weights;
  if (vectors && f.has("outcomes"))
    throw ValidationError("give either outcomes or doses/tox/weights, not both", f.name("outcomes"));
  if (!vectors) return read_outcome_string(f, Alphabet::binary);
  (void)f.get("outcomes");
  if (!doses) throw ValidationError("doses is required with tox", f.name("doses"));
  if (!tox) throw ValidationError("tox is required with doses", f.name("tox"));
  std::vector<double> w = weights ? *weights : std::vector<double>(doses->size(), 1.0);
  try {
    return from_vectors(*doses, *tox, w);
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name(e.field().empty() ? "doses" : e.field()));
  }
}

void check_doses(const OutcomeSequence &data, int num_doses, const std::string &field) {
  for (const auto &r : data.records())
    if (r.dose_level > num_doses)
      throw ValidationError("dose level " + std::to_string(r.dose_level) + " exceeds the " +
                                std::to_string(num_doses) + " doses of the design",
                            field);
}

SuccessOptions read_success_options(Fields &f) {
  SuccessOptions o;
  if (auto v = f.opt_number("y2_upper")) o.y2_upper = *v;
  o.y1_lower = f.opt_number("y1_lower");
  o.y1_upper = f.opt_number("y1_upper");
  if (auto p = f.opt_numbers("probs")) {
    if (p->size() != 2) throw ValidationError("probs must hold two quantile probabilities", f.name("probs"));
    o.probs = {(*p)[0], (*p)[1]};
  }
  try {
    o.validate();
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name(e.field()));
  }
  return o;
}

AugBinPriors read_priors_field(Fields &f) {
  const Json *p = f.get("priors");
  if (!p) throw ValidationError("priors is required (diffuse, informative or an object)", f.name("priors"));
  return read_augbin_priors(*p, f.name("priors"));
}

Json dtp_diagnostics(const PathwayTree &tree, const SamplerConfig &sampler) {
  double max_rhat = 0.0;
  double min_ess = std::numeric_limits<double>::infinity();
  for (const auto &n : tree.nodes) {
    if (std::isnan(n.fit.max_split_rhat)) continue;
    max_rhat = std::max(max_rhat, n.fit.max_split_rhat);
    min_ess = std::min(min_ess, n.fit.min_ess);
  }
  return {{"fits", tree.nodes.size()},
          {"chains", sampler.chains},
          {"draws_per_chain", sampler.draws_per_chain},
          {"max_split_rhat", max_rhat},
          {"min_ess", std::isfinite(min_ess) ? Json(min_ess) : Json(nullptr)}};
}

template <class Fit>
std::function<DoseChoice(const Fit &)> with_deadline(std::function<DoseChoice(const Fit &)> policy,
                                                     Clock::time_point deadline) {
  return [policy = std::move(policy), deadline](const Fit &fit) {
    if (Clock::now() > deadline) throw TimeoutError("pathway computation exceeded the request timeout");
    return policy(fit);
  };
}

DtpOptions read_dtp_options(Fields &f, Alphabet alphabet, const Limits &limits) {
  DtpOptions o;
  o.cohort_sizes = f.integers("cohort_sizes");
  if (o.cohort_sizes.empty()) throw ValidationError("cohort_sizes must not be empty", f.name("cohort_sizes"));
  for (int n : o.cohort_sizes)
    if (n < 1) throw ValidationError("cohort sizes must be positive", f.name("cohort_sizes"));
  o.next_dose = f.opt_integer("next_dose");
  o.sampler = read_sampler(f);
  const auto count = dtp_node_count(o.cohort_sizes, alphabet);
  if (count > limits.node_budget) throw BudgetError(count, limits.node_budget);
  return o;
}

}  // namespace

Json fit_crm(const Json &request) {
  Fields f(request);
  const auto spec = read_crm_spec(f);
  const auto data = read_crm_data(f);
  const auto sampler = read_sampler(f);
  f.finish();
  check_doses(data, spec.num_doses(), "outcomes");
  return crm_fit_json(dosefind::fit_crm(spec, data, sampler));
}

Json fit_efftox(const Json &request) {
  Fields f(request);
  const auto spec = read_efftox_spec(f);
  const auto data = read_outcome_string(f, Alphabet::quaternary);
  const int contour = f.opt_integer("contour_resolution").value_or(0);
  if (contour != 0 && contour < 2)
    throw ValidationError("contour_resolution must be 0 or at least 2", f.name("contour_resolution"));
  const auto sampler = read_sampler(f);
  f.finish();
  check_doses(data, spec.num_doses(), "outcomes");
  return efftox_fit_json(dosefind::fit_efftox(spec, data, sampler), contour);
}

Json fit_augbin(const Json &request) {
  Fields f(request);
  const auto data = read_augbin_data(f);
  const auto priors = read_priors_field(f);
  const auto options = read_success_options(f);
  const double conf = f.opt_number("conf_level").value_or(0.95);
  const auto sampler = read_sampler(f);
  f.finish();
  const auto fit = dosefind::fit_augbin(data, priors, sampler);
  const auto preds = predict(fit, options);
  const auto binary = binary_prob_success(data, options.y2_upper, conf);
  double mean_width = 0.0;
  for (const auto &p : preds) mean_width += p.ci_width / static_cast<double>(preds.size());
  Json j = augbin_fit_json(fit);
  j["predictions"] = predictions_json(preds, false);
  j["binary"] = binary_estimate_json(binary);
  j["mean_ci_width"] = mean_width;
  j["ci_width_change"] = mean_width / binary.ci_width - 1.0;
  return j;
}

Json augbin_predict(const Json &request) {
  Fields f(request);
  const auto data = read_augbin_data(f);
  const auto priors = read_priors_field(f);
  const auto options = read_success_options(f);
  const bool include_draws = f.opt_bool("include_draws").value_or(false);
  std::optional<std::vector<PredictCase>> newdata;
  if (const Json *nd = f.get("newdata")) {
    if (!nd->is_array()) throw ValidationError("newdata must be an array of {z0, z1}", f.name("newdata"));
    newdata.emplace();
    for (std::size_t i = 0; i < nd->size(); ++i) {
      Fields r((*nd)[i], f.name("newdata") + "[" + std::to_string(i) + "].");
      const double z0 = r.number("z0");
      const double z1 = r.number("z1");
      r.finish();
      newdata->push_back({z0, z1});
    }
  }
  const auto sampler = read_sampler(f);
  f.finish();
  const auto fit = dosefind::fit_augbin(data, priors, sampler);
  const auto preds = newdata ? success_prob_conditional(fit, *newdata, options) : predict(fit, options);
  return {{"design", "augbin"},
          {"predictions", predictions_json(preds, include_draws)},
          {"y2_upper", options.y2_upper},
          {"seed", fit.draws.seed()},
          {"diagnostics", diagnostics_json(fit.draws)}};
}

Json augbin_prior_predictive(const Json &request) {
  Fields f(request);
  const auto priors = read_priors_field(f);
  const int num_samps = f.opt_integer("num_samps").value_or(1000);
  std::pair<double, double> range{5.0, 10.0};
  if (auto r = f.opt_numbers("z0_range")) {
    if (r->size() != 2) throw ValidationError("z0_range must hold [lower, upper]", f.name("z0_range"));
    range = {(*r)[0], (*r)[1]};
  }
  const auto sampler = read_sampler(f);
  f.finish();
  const auto rows = prior_predictive_2t_1a(priors, num_samps, range, sampler.seed);
  double growth = 0.0, size1 = 0.0, size2 = 0.0, d1 = 0.0;
  for (const auto &r : rows) {
    growth += r.y2 > 0.0;
    size1 += r.z0 * std::exp(r.y1);
    size2 += r.z0 * std::exp(r.y2);
    d1 += r.prob_d1;
  }
  const double n = static_cast<double>(rows.size());
  return {{"design", "augbin"},
          {"samples", prior_predictive_json(rows)},
          {"summary",
           {{"prob_y2_positive", growth / n},
            {"mean_z1", size1 / n},
            {"mean_z2", size2 / n},
            {"mean_prob_d1", d1 / n}}},
          {"seed", sampler.seed},
          {"diagnostics", nullptr}};
}

Json augbin_simulate(const Json &request) {
  Fields f(request);
  ScenarioParams p;
  if (auto v = f.opt_integer("n")) p.n = *v;
  if (auto v = f.opt_number("delta1")) p.delta1 = *v;
  if (auto v = f.opt_number("sigma")) p.sigma = *v;
  if (auto v = f.opt_number("alpha_d")) p.alpha_d = *v;
  if (auto v = f.opt_number("gamma_d")) p.gamma_d = *v;
  const auto sampler = read_sampler(f);
  f.finish();
  try {
    p.validate();
  } catch (const ValidationError &e) {
    throw ValidationError(e.what(), f.name(e.field()));
  }
  const auto data = simulate_scenario(p, sampler.seed);
  Json rows = Json::array();
  for (const auto &t : data.patients)
    rows.push_back({{"z0", t.z0}, {"z1", t.z1}, {"z2", t.z2}, {"d1", t.d1}, {"d2", t.d2}});
  return {{"design", "augbin"},
          {"data", rows},
          {"binary", binary_estimate_json(binary_prob_success(data))},
          {"seed", sampler.seed},
          {"diagnostics", nullptr}};
}

Json dtp_crm(const Json &request, const Limits &limits) {
  const auto deadline = Clock::now() + limits.timeout;
  Fields f(request);
  const auto spec = read_crm_spec(f);
  const auto data = read_outcome_string(f, Alphabet::binary);
  const Json *policy_json = f.get("policy");
  const auto policy = read_crm_policy(policy_json ? *policy_json : Json(nullptr), f.name("policy"));
  const auto options = read_dtp_options(f, Alphabet::binary, limits);
  f.finish();
  check_doses(data, spec.num_doses(), "outcomes");
  if (policy.careful && policy.reference_dose > spec.num_doses())
    throw ValidationError("reference_dose exceeds the number of doses", "policy.reference_dose");
  const auto tree = crm_dtps(spec, data, options, with_deadline<CrmFit>(policy.make(), deadline));
  Json j = pathway_json(tree);
  j["policy"] = policy.to_json();
  j["seed"] = options.sampler.seed;
  j["diagnostics"] = dtp_diagnostics(tree, options.sampler);
  return j;
}

Json dtp_efftox(const Json &request, const Limits &limits) {
  const auto deadline = Clock::now() + limits.timeout;
  Fields f(request);
  const auto spec = read_efftox_spec(f);
  const auto data = read_outcome_string(f, Alphabet::quaternary);
  if (const Json *p = f.get("policy"); p && !(p->is_string() && p->get<std::string>() == "default"))
    throw ValidationError("EffTox pathways support only the default policy", f.name("policy"));
  const auto options = read_dtp_options(f, Alphabet::quaternary, limits);
  f.finish();
  check_doses(data, spec.num_doses(), "outcomes");
  const auto tree =
      efftox_dtps(spec, data, options, with_deadline<EffToxFit>(EffToxPolicy(efftox_default_policy), deadline));
  Json j = pathway_json(tree);
  j["policy"] = "default";
  j["seed"] = options.sampler.seed;
  j["diagnostics"] = dtp_diagnostics(tree, options.sampler);
  return j;
}

Json call(std::string_view endpoint, const Json &request, const Limits &limits) {
  if (endpoint == "fit/crm") return fit_crm(request);
  if (endpoint == "fit/efftox") return fit_efftox(request);
  if (endpoint == "fit/augbin") return fit_augbin(request);
  if (endpoint == "augbin/predict") return augbin_predict(request);
  if (endpoint == "augbin/prior-predictive") return augbin_prior_predictive(request);
  if (endpoint == "augbin/simulate") return augbin_simulate(request);
  if (endpoint == "dtp/crm") return dtp_crm(request, limits);
  if (endpoint == "dtp/efftox") return dtp_efftox(request, limits);
  throw ValidationError("unknown endpoint '" + std::string(endpoint) + "'", "endpoint");
}

Json error_json(std::string_view type, const std::string &message, const std::string &field) {
  Json e{{"type", type}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return {{"error", e}};
}

Json parse_request(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw ValidationError(std::string("request body is not valid JSON: ") + e.what(), "body");
  }
}

}  // namespace dosefind::api
