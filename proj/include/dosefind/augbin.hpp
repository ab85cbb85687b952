#pragma once

// Augmented binary model for a single arm with two post-baseline tumour
// assessments. Log size ratios (y1, y2) are bivariate normal given baseline
// size z0; non-shrinkage failures D1, D2 follow logit models in z0 and z1.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dosefind/efftox.hpp"  // NormalPrior
#include "dosefind/mcmc.hpp"

namespace dosefind {

struct TumourRecord {
  double z0 = 1.0, z1 = 1.0, z2 = 1.0;  // cm
  int d1 = 0, d2 = 0;

  [[nodiscard]] double y1() const { return std::log(z1 / z0); }
  [[nodiscard]] double y2() const { return std::log(z2 / z0); }
};

struct AugBinDataset {
  std::vector<TumourRecord> patients;

  void validate() const;
  [[nodiscard]] std::size_t size() const noexcept { return patients.size(); }
};

// Header z0,z1,z2,d1,d2 (any column order).
[[nodiscard]] AugBinDataset read_augbin_csv(std::string_view text);
[[nodiscard]] std::string write_augbin_csv(const AugBinDataset &data);

struct AugBinPriors {
  NormalPrior alpha, beta, gamma;
  NormalPrior sigma;  // half-normal: normal(mean, sd) truncated to (0, inf), both sigmas
  double lkj_eta = 1.0;
  NormalPrior alpha_d1, gamma_d1, alpha_d2, gamma_d2;

  void validate() const;
  [[nodiscard]] static AugBinPriors diffuse();
  [[nodiscard]] static AugBinPriors informative();
};

// Parameter order of every AugBin draw.
inline constexpr std::string_view augbin_parameter_names[] = {
    "alpha", "beta", "gamma", "sigma1", "sigma2", "rho", "alpha_d1", "gamma_d1", "alpha_d2", "gamma_d2"};

[[nodiscard]] TargetDensity augbin_log_posterior(const AugBinDataset &data, const AugBinPriors &priors);

struct AugBinFit {
  AugBinDataset data;
  AugBinPriors priors;
  PosteriorDraws draws;
};

[[nodiscard]] AugBinFit fit_augbin(const AugBinDataset &data, const AugBinPriors &priors,
                                   const SamplerConfig &sampler);

struct SuccessOptions {
  double y2_upper = std::log(0.7);
  std::optional<double> y1_lower;
  std::optional<double> y1_upper;
  std::pair<double, double> probs{0.025, 0.975};

  void validate() const;
};

struct SuccessPrediction {
  int id = 1;
  double z0 = 0.0, z1 = 0.0;
  double prob_success = 0.0;
  double lower = 0.0, upper = 0.0, ci_width = 0.0;
  std::vector<double> draws;  // per posterior draw
};

struct PredictCase {
  double z0, z1;
};

// Success probability conditional on the observed interim size z1.
[[nodiscard]] std::vector<SuccessPrediction> success_prob_conditional(const AugBinFit &fit,
                                                                      const std::vector<PredictCase> &cases,
                                                                      const SuccessOptions &options = {});
// Predictions for the fitted patients themselves.
[[nodiscard]] std::vector<SuccessPrediction> predict(const AugBinFit &fit, const SuccessOptions &options = {});

// Pr(S = 1 | z0, theta) per draw, integrating (y1, y2) by Monte Carlo.
[[nodiscard]] std::vector<double> success_prob_marginal(const AugBinFit &fit, double z0, double y2_upper,
                                                        int mc_samples, std::uint64_t seed);

struct BinaryEstimate {
  std::string method = "exact";
  int x = 0, n = 0;
  double mean = 0.0, lower = 0.0, upper = 0.0, ci_width = 0.0;
};

[[nodiscard]] BinaryEstimate clopper_pearson(int x, int n, double conf_level = 0.95);
// S_i = 1 iff d1 = d2 = 0 and y2 < y2_upper.
[[nodiscard]] BinaryEstimate binary_prob_success(const AugBinDataset &data, double y2_upper = std::log(0.7),
                                                 double conf_level = 0.95);

struct PriorPredictiveRow {
  int id = 1;
  double z0 = 0.0, y0 = 0.0, y1 = 0.0, y2 = 0.0;
  double prob_d1 = 0.0, prob_d2 = 0.0;
  int d1 = 0, d2 = 0;
};

[[nodiscard]] std::vector<PriorPredictiveRow> prior_predictive_2t_1a(const AugBinPriors &priors, int num_samps,
                                                                     std::pair<double, double> z0_range,
                                                                     std::uint64_t seed);

struct ScenarioParams {
  int n = 50;
  double delta1 = -0.356;
  double sigma = 1.0;
  double alpha_d = -1.5;
  double gamma_d = 0.0;

  void validate() const;
};

[[nodiscard]] AugBinDataset simulate_scenario(const ScenarioParams &params, std::uint64_t seed);

}  // namespace dosefind
