#pragma once

// Continual reassessment method: the empiric, one-parameter logistic (normal
// or gamma slope prior) and two-parameter logistic dose-toxicity models, with
// optional per-patient weights for the time-to-event variant.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dosefind/mcmc.hpp"
#include "dosefind/outcomes.hpp"

namespace dosefind {

enum class CrmModel { empiric, logistic, logistic_gamma, logistic2 };

[[nodiscard]] std::string_view to_string(CrmModel m) noexcept;
// Throws ValidationError on an unknown name.
[[nodiscard]] CrmModel crm_model_from_string(std::string_view name);

struct CrmSpec {
  std::vector<double> skeleton;
  double target = 0.25;
  CrmModel model = CrmModel::empiric;
  std::optional<double> a0;          // logistic, logistic_gamma
  std::optional<double> beta_mean;   // empiric, logistic, logistic2
  std::optional<double> beta_sd;     // empiric, logistic, logistic2
  std::optional<double> beta_shape;  // logistic_gamma
  std::optional<double> beta_rate;   // logistic_gamma
  std::optional<double> alpha_mean;  // logistic2
  std::optional<double> alpha_sd;    // logistic2

  // Checks skeleton ordering, the target, and that exactly the
  // hyperparameters required by `model` are present.
  void validate() const;
  [[nodiscard]] int num_doses() const noexcept { return static_cast<int>(skeleton.size()); }
};

struct DoseLabels {
  std::vector<double> values;
};

// d_k such that F(d_k, prior mean) = p_k.
[[nodiscard]] DoseLabels codify_doses(const CrmSpec &spec);

// F(d, theta); theta is (beta) or (alpha, beta) for logistic2.
[[nodiscard]] double crm_tox_prob(const CrmSpec &spec, double label, std::span<const double> theta);

[[nodiscard]] TargetDensity crm_log_posterior(const CrmSpec &spec, const DoseLabels &labels,
                                              const OutcomeSequence &data);

struct CrmFit {
  CrmSpec spec;
  OutcomeSequence data;
  DoseLabels labels;
  PosteriorDraws draws;

  std::vector<double> prob_tox_draws;  // draws x doses, row-major
  std::vector<double> prob_tox_mean;
  std::vector<double> prob_tox_median;
  std::vector<double> prob_mtd;
  std::vector<int> num_patients;
  std::vector<int> num_tox;
  int recommended_dose = 1;  // closest posterior mean to target, lowest on ties
  int most_likely_mtd = 1;
  double entropy = 0.0;

  [[nodiscard]] int num_doses() const noexcept { return spec.num_doses(); }
  [[nodiscard]] double prob_tox(std::size_t draw, int dose_level) const {
    return prob_tox_draws[draw * static_cast<std::size_t>(num_doses()) + static_cast<std::size_t>(dose_level - 1)];
  }
};

[[nodiscard]] CrmFit fit_crm(const CrmSpec &spec, const OutcomeSequence &data, const SamplerConfig &sampler);

[[nodiscard]] CrmFit fit_tite_crm(const CrmSpec &spec, std::span<const int> doses, std::span<const int> tox,
                                  std::span<const double> weights, const SamplerConfig &sampler);

// Index (1-based) of the value closest to target; lowest index on exact ties.
[[nodiscard]] int closest_to_target(std::span<const double> values, double target) noexcept;

}  // namespace dosefind
