#include "dosefind/crm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dosefind/errors.hpp"
#include "dosefind/stats.hpp"

namespace dosefind {

std::string_view to_string(CrmModel m) noexcept {
  switch (m) {
    case CrmModel::empiric:
      return "empiric";
    case CrmModel::logistic:
      return "logistic";
    case CrmModel::logistic_gamma:
      return "logistic_gamma";
    case CrmModel::logistic2:
      return "logistic2";
  }
  return "?";
}

CrmModel crm_model_from_string(std::string_view name) {
  for (auto m : {CrmModel::empiric, CrmModel::logistic, CrmModel::logistic_gamma, CrmModel::logistic2})
    if (to_string(m) == name) return m;
  throw ValidationError("unknown CRM model '" + std::string(name) +
                            "' (expected empiric, logistic, logistic_gamma or logistic2)",
                        "model");
}

void CrmSpec::validate() const {
  if (skeleton.empty()) throw ValidationError("skeleton must not be empty", "skeleton");
  for (std::size_t k = 0; k < skeleton.size(); ++k) {
    if (!(skeleton[k] > 0.0 && skeleton[k] < 1.0))
      throw ValidationError("skeleton probabilities must lie in (0, 1)", "skeleton");
    if (k > 0 && !(skeleton[k] > skeleton[k - 1]))
      throw ValidationError("skeleton must be strictly increasing", "skeleton");
  }
  if (!(target > 0.0 && target < 1.0)) throw ValidationError("target must lie in (0, 1)", "target");

  struct Param {
    const std::optional<double> &value;
    const char *name;
    bool positive;
  };
  const Param params[] = {
      {a0, "a0", false},           {beta_mean, "beta_mean", false}, {beta_sd, "beta_sd", true},
      {beta_shape, "beta_shape", true}, {beta_rate, "beta_rate", true}, {alpha_mean, "alpha_mean", false},
      {alpha_sd, "alpha_sd", true},
  };
  auto required = [this](std::string_view name) {
    switch (model) {
      case CrmModel::empiric:
        return name == "beta_mean" || name == "beta_sd";
      case CrmModel::logistic:
        return name == "a0" || name == "beta_mean" || name == "beta_sd";
      case CrmModel::logistic_gamma:
        return name == "a0" || name == "beta_shape" || name == "beta_rate";
      case CrmModel::logistic2:
        return name == "alpha_mean" || name == "alpha_sd" || name == "beta_mean" || name == "beta_sd";
    }
    return false;
  };
  for (const auto &p : params) {
    const bool need = required(p.name);
    if (need && !p.value)
      throw ValidationError(std::string(p.name) + " is required by the " + std::string(to_string(model)) +
                                " model",
                            p.name);
    if (!need && p.value)
      throw ValidationError(std::string(p.name) + " is not a parameter of the " +
                                std::string(to_string(model)) + " model",
                            p.name);
    if (p.value && !std::isfinite(*p.value)) throw ValidationError(std::string(p.name) + " must be finite", p.name);
    if (p.value && p.positive && !(*p.value > 0.0))
      throw ValidationError(std::string(p.name) + " must be positive", p.name);
  }
}

DoseLabels codify_doses(const CrmSpec &spec) {
  spec.validate();
  DoseLabels labels;
  labels.values.reserve(spec.skeleton.size());
  for (double p : spec.skeleton) {
    switch (spec.model) {
      case CrmModel::empiric:
        labels.values.push_back(std::pow(p, std::exp(-*spec.beta_mean)));
        break;
      case CrmModel::logistic:
        labels.values.push_back((stats::logit(p) - *spec.a0) / std::exp(*spec.beta_mean));
        break;
      case CrmModel::logistic_gamma: {
        const double beta_bar = *spec.beta_shape / *spec.beta_rate;
        if (beta_bar == 0.0) throw ValidationError("gamma prior mean must be non-zero", "beta_shape");
        labels.values.push_back((stats::logit(p) - *spec.a0) / beta_bar);
        break;
      }
      case CrmModel::logistic2:
        labels.values.push_back((stats::logit(p) - *spec.alpha_mean) / std::exp(*spec.beta_mean));
        break;
    }
  }
  return labels;
}

namespace {

// log F and log(1 - F) at one dose label.
struct LogProbs {
  double log_p;
  double log_q;
};

LogProbs crm_log_probs(const CrmSpec &spec, double label, std::span<const double> theta) {
  switch (spec.model) {
    case CrmModel::empiric: {
      const double log_p = std::exp(theta[0]) * std::log(label);
      return {log_p, std::log1p(-std::exp(log_p))};
    }
    case CrmModel::logistic: {
      const double eta = *spec.a0 + std::exp(theta[0]) * label;
      return {stats::log_inv_logit(eta), stats::log1m_inv_logit(eta)};
    }
    case CrmModel::logistic_gamma: {
      const double eta = *spec.a0 + theta[0] * label;
      return {stats::log_inv_logit(eta), stats::log1m_inv_logit(eta)};
    }
    case CrmModel::logistic2: {
      const double eta = theta[0] + std::exp(theta[1]) * label;
      return {stats::log_inv_logit(eta), stats::log1m_inv_logit(eta)};
    }
  }
  return {0.0, 0.0};
}

double crm_log_prior(const CrmSpec &spec, std::span<const double> theta) {
  switch (spec.model) {
    case CrmModel::empiric:
    case CrmModel::logistic:
      return stats::normal_lpdf(theta[0], *spec.beta_mean, *spec.beta_sd);
    case CrmModel::logistic_gamma:
      return stats::gamma_lpdf(theta[0], *spec.beta_shape, *spec.beta_rate);
    case CrmModel::logistic2:
      return stats::normal_lpdf(theta[0], *spec.alpha_mean, *spec.alpha_sd) +
             stats::normal_lpdf(theta[1], *spec.beta_mean, *spec.beta_sd);
  }
  return 0.0;
}

void check_data(const CrmSpec &spec, const OutcomeSequence &data) {
  if (data.alphabet() != Alphabet::binary)
    throw ValidationError("CRM data must use the binary T/N alphabet", "outcomes");
  for (const auto &r : data.records()) {
    if (r.dose_level > spec.num_doses())
      throw ValidationError("dose level " + std::to_string(r.dose_level) + " exceeds the " +
                                std::to_string(spec.num_doses()) + "-dose skeleton",
                            "outcomes");
    if (r.weight == 0.0 && has_toxicity(r.event))
      throw ValidationError("a toxicity cannot carry weight 0", "weights");
  }
}

}  // namespace

double crm_tox_prob(const CrmSpec &spec, double label, std::span<const double> theta) {
  return std::exp(crm_log_probs(spec, label, theta).log_p);
}

TargetDensity crm_log_posterior(const CrmSpec &spec, const DoseLabels &labels, const OutcomeSequence &data) {
  spec.validate();
  check_data(spec, data);

  TargetDensity target;
  if (spec.model == CrmModel::logistic2) {
    target.parameter_names = {"alpha", "beta"};
    target.support = {Support::real, Support::real};
  } else {
    target.parameter_names = {"beta"};
    target.support = {spec.model == CrmModel::logistic_gamma ? Support::positive : Support::real};
  }

  // Weighted likelihood {w F}^Y {1 - w F}^(1-Y); unit weights reduce it to the
  // ordinary binomial likelihood.
  target.log_density = [spec, labels, data](std::span<const double> theta) {
    double lp = crm_log_prior(spec, theta);
    if (!std::isfinite(lp)) return stats::neg_inf;
    for (const auto &r : data.records()) {
      const auto [log_p, log_q] = crm_log_probs(spec, labels.values[static_cast<std::size_t>(r.dose_level - 1)], theta);
      if (has_toxicity(r.event)) {
        lp += std::log(r.weight) + log_p;
      } else if (r.weight == 1.0) {
        lp += log_q;
      } else {
        lp += std::log1p(-r.weight * std::exp(log_p));
      }
    }
    return std::isnan(lp) ? stats::neg_inf : lp;
  };
  return target;
}

int closest_to_target(std::span<const double> values, double target) noexcept {
  int best = 1;
  double best_gap = std::abs(values[0] - target);
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double gap = std::abs(values[k] - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<int>(k) + 1;
    }
  }
  return best;
}

CrmFit fit_crm(const CrmSpec &spec, const OutcomeSequence &data, const SamplerConfig &sampler) {
  CrmFit fit;
  fit.spec = spec;
  fit.data = data;
  fit.labels = codify_doses(spec);
  const auto target = crm_log_posterior(spec, fit.labels, data);
  fit.draws = sample(target, sampler);

  const auto K = static_cast<std::size_t>(spec.num_doses());
  const std::size_t S = fit.draws.size();
  fit.prob_tox_draws.resize(S * K);
  fit.prob_tox_mean.assign(K, 0.0);
  fit.prob_mtd.assign(K, 0.0);
  std::vector<std::size_t> mtd_counts(K, 0);
  std::vector<double> row(K);
  for (std::size_t s = 0; s < S; ++s) {
    const auto theta = fit.draws.row(s);
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = crm_tox_prob(spec, fit.labels.values[k], theta);
      fit.prob_tox_draws[s * K + k] = row[k];
      fit.prob_tox_mean[k] += row[k];
    }
    ++mtd_counts[static_cast<std::size_t>(closest_to_target(row, spec.target) - 1)];
  }
  fit.prob_tox_median.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    fit.prob_tox_mean[k] /= static_cast<double>(S);
    fit.prob_mtd[k] = static_cast<double>(mtd_counts[k]) / static_cast<double>(S);
    std::vector<double> col(S);
    for (std::size_t s = 0; s < S; ++s) col[s] = fit.prob_tox_draws[s * K + k];
    fit.prob_tox_median[k] = stats::quantile(std::move(col), 0.5);
  }

  fit.num_patients.assign(K, 0);
  fit.num_tox.assign(K, 0);
  for (const auto &r : data.records()) {
    ++fit.num_patients[static_cast<std::size_t>(r.dose_level - 1)];
    if (has_toxicity(r.event)) ++fit.num_tox[static_cast<std::size_t>(r.dose_level - 1)];
  }

  fit.recommended_dose = closest_to_target(fit.prob_tox_mean, spec.target);
  fit.most_likely_mtd =
      static_cast<int>(std::max_element(fit.prob_mtd.begin(), fit.prob_mtd.end()) - fit.prob_mtd.begin()) + 1;
  fit.entropy = stats::entropy(fit.prob_mtd);
  return fit;
}

CrmFit fit_tite_crm(const CrmSpec &spec, std::span<const int> doses, std::span<const int> tox,
                    std::span<const double> weights, const SamplerConfig &sampler) {
  return fit_crm(spec, from_vectors(doses, tox, weights), sampler);
}

}  // namespace dosefind
