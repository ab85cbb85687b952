#pragma once

// EffTox: joint binary efficacy/toxicity dose-finding with a utility contour
// through three neutral "hinge" points.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dosefind/mcmc.hpp"
#include "dosefind/outcomes.hpp"

namespace dosefind {

struct NormalPrior {
  double mean = 0.0;
  double sd = 1.0;
};

// Neutral-utility points (eff0, 0), (1, tox1) and (eff_star, tox_star).
struct HingePoints {
  double eff0 = 0.5;
  double tox1 = 0.65;
  double eff_star = 0.7;
  double tox_star = 0.25;
};

struct EffToxSpec {
  std::vector<double> real_doses;
  double efficacy_hurdle = 0.5;
  double toxicity_hurdle = 0.3;
  double p_e = 0.1;
  double p_t = 0.1;
  HingePoints hinges;
  NormalPrior alpha, beta, gamma, zeta, eta, psi;

  void validate() const;
  [[nodiscard]] int num_doses() const noexcept { return static_cast<int>(real_doses.size()); }
};

struct StandardizedDoses {
  std::vector<double> x;
};

// x_j = log y_j - mean(log y).
[[nodiscard]] StandardizedDoses standardize_doses(std::span<const double> real_doses);

// Pr(Y_E = a, Y_T = b) under the marginal probabilities and association psi.
[[nodiscard]] double joint_prob(int a, int b, double prob_eff, double prob_tox, double psi) noexcept;

// Root p of ((1-eff_star)/(1-eff0))^p + (tox_star/tox1)^p = 1 by bisection.
[[nodiscard]] double solve_contour_exponent(const HingePoints &hinges);

class UtilityContour {
 public:
  explicit UtilityContour(const HingePoints &hinges);

  [[nodiscard]] double operator()(double prob_eff, double prob_tox) const noexcept;
  [[nodiscard]] double exponent() const noexcept { return p_; }
  [[nodiscard]] const HingePoints &hinges() const noexcept { return hinges_; }

 private:
  HingePoints hinges_;
  double p_;
};

[[nodiscard]] TargetDensity efftox_log_posterior(const EffToxSpec &spec, const OutcomeSequence &data);

struct EffToxFit {
  EffToxSpec spec;
  OutcomeSequence data{Alphabet::quaternary};
  StandardizedDoses doses;
  PosteriorDraws draws;
  double contour_exponent = 1.0;

  // draws x doses, row-major
  std::vector<double> prob_eff_draws;
  std::vector<double> prob_tox_draws;
  std::vector<double> utility_draws;

  std::vector<double> prob_eff_mean;
  std::vector<double> prob_tox_mean;
  std::vector<double> prob_acc_eff;
  std::vector<double> prob_acc_tox;
  std::vector<double> utility;       // utility of the posterior-mean probabilities
  std::vector<double> mean_utility;  // posterior mean of per-draw utility
  std::vector<bool> acceptable;
  std::vector<double> prob_obd;
  std::vector<int> num_patients;
  std::vector<int> num_eff;
  std::vector<int> num_tox;
  std::optional<int> recommended_dose;  // nullopt: no acceptable dose, stop
  int most_likely_obd = 1;
  double entropy = 0.0;

  [[nodiscard]] int num_doses() const noexcept { return spec.num_doses(); }
  [[nodiscard]] double utility_draw(std::size_t draw, int dose_level) const {
    return utility_draws[draw * static_cast<std::size_t>(num_doses()) + static_cast<std::size_t>(dose_level - 1)];
  }
};

[[nodiscard]] EffToxFit fit_efftox(const EffToxSpec &spec, const OutcomeSequence &data,
                                   const SamplerConfig &sampler);

// M[r][c] = Pr(utility of dose c > utility of dose r); diagonal is nullopt.
using SuperiorityMatrix = std::vector<std::vector<std::optional<double>>>;
[[nodiscard]] SuperiorityMatrix superiority_matrix(const EffToxFit &fit);

struct ContourData {
  int resolution = 0;
  double exponent = 1.0;
  struct GridPoint {
    double prob_eff, prob_tox, utility;
  };
  struct DosePoint {
    int dose;
    double prob_eff, prob_tox, utility;
  };
  std::vector<GridPoint> grid;  // prob_eff-major over [0,1]^2
  std::vector<DosePoint> doses;
  HingePoints hinges;
};

[[nodiscard]] ContourData contour_data(const EffToxFit &fit, int grid_resolution);
// Columns prob_eff,prob_tox,utility; dose points follow with a `dose` column.
[[nodiscard]] std::string contour_csv(const ContourData &data);

}  // namespace dosefind
