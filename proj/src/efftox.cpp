#include "dosefind/efftox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "dosefind/errors.hpp"
#include "dosefind/stats.hpp"

namespace dosefind {

namespace {

bool in_unit(double p) { return p > 0.0 && p < 1.0; }

void check_prior(const NormalPrior &p, const char *name) {
  if (!std::isfinite(p.mean)) throw ValidationError(std::string(name) + "_mean must be finite", std::string(name) + "_mean");
  if (!(p.sd > 0.0)) throw ValidationError(std::string(name) + "_sd must be positive", std::string(name) + "_sd");
}

constexpr double prob_floor = 1e-12;

}  // namespace

void EffToxSpec::validate() const {
  if (real_doses.empty()) throw ValidationError("real_doses must not be empty", "real_doses");
  for (std::size_t k = 0; k < real_doses.size(); ++k) {
    if (!(real_doses[k] > 0.0)) throw ValidationError("real_doses must be positive", "real_doses");
    if (k > 0 && !(real_doses[k] > real_doses[k - 1]))
      throw ValidationError("real_doses must be strictly increasing", "real_doses");
  }
  if (!in_unit(efficacy_hurdle)) throw ValidationError("efficacy_hurdle must lie in (0, 1)", "efficacy_hurdle");
  if (!in_unit(toxicity_hurdle)) throw ValidationError("toxicity_hurdle must lie in (0, 1)", "toxicity_hurdle");
  if (!in_unit(p_e)) throw ValidationError("p_e must lie in (0, 1)", "p_e");
  if (!in_unit(p_t)) throw ValidationError("p_t must lie in (0, 1)", "p_t");
  if (!in_unit(hinges.eff0)) throw ValidationError("eff0 must lie in (0, 1)", "eff0");
  if (!in_unit(hinges.tox1)) throw ValidationError("tox1 must lie in (0, 1)", "tox1");
  if (!(hinges.eff_star > hinges.eff0 && hinges.eff_star < 1.0))
    throw ValidationError("eff_star must lie in (eff0, 1)", "eff_star");
  if (!(hinges.tox_star > 0.0 && hinges.tox_star < hinges.tox1))
    throw ValidationError("tox_star must lie in (0, tox1)", "tox_star");
  check_prior(alpha, "alpha");
  check_prior(beta, "beta");
  check_prior(gamma, "gamma");
  check_prior(zeta, "zeta");
  check_prior(eta, "eta");
  check_prior(psi, "psi");
}

StandardizedDoses standardize_doses(std::span<const double> real_doses) {
  StandardizedDoses out;
  double mean_log = 0.0;
  for (double y : real_doses) {
    if (!(y > 0.0)) throw ValidationError("doses must be positive to standardise", "real_doses");
    mean_log += std::log(y);
  }
  mean_log /= static_cast<double>(real_doses.size());
  for (double y : real_doses) out.x.push_back(std::log(y) - mean_log);
  return out;
}

double joint_prob(int a, int b, double prob_eff, double prob_tox, double psi) noexcept {
  const double pe = a ? prob_eff : 1.0 - prob_eff;
  const double pt = b ? prob_tox : 1.0 - prob_tox;
  const double sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
  // (e^psi - 1) / (e^psi + 1) = tanh(psi / 2)
  return pe * pt + sign * prob_eff * (1.0 - prob_eff) * prob_tox * (1.0 - prob_tox) * std::tanh(psi / 2.0);
}

double solve_contour_exponent(const HingePoints &h) {
  const double a = (1.0 - h.eff_star) / (1.0 - h.eff0);
  const double b = h.tox_star / h.tox1;
  auto f = [&](double p) { return std::pow(a, p) + std::pow(b, p) - 1.0; };
  double lo = 1e-6;
  double hi = 100.0;
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(a > 0.0 && b > 0.0) || flo * fhi > 0.0)
    throw ValidationError("hinge points do not define a utility contour (no root on [1e-6, 100])", "hinges");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < 1e-12) break;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return mid;
}

UtilityContour::UtilityContour(const HingePoints &hinges) : hinges_(hinges), p_(solve_contour_exponent(hinges)) {}

double UtilityContour::operator()(double prob_eff, double prob_tox) const noexcept {
  const double a = (1.0 - prob_eff) / (1.0 - hinges_.eff0);
  const double b = prob_tox / hinges_.tox1;
  return 1.0 - std::pow(std::pow(a, p_) + std::pow(b, p_), 1.0 / p_);
}

namespace {

struct Marginals {
  double eff;
  double tox;
};

// theta = (alpha, beta, gamma, zeta, eta, psi)
Marginals marginals(std::span<const double> theta, double x) {
  return {stats::inv_logit(theta[2] + theta[3] * x + theta[4] * x * x), stats::inv_logit(theta[0] + theta[1] * x)};
}

}  // namespace

TargetDensity efftox_log_posterior(const EffToxSpec &spec, const OutcomeSequence &data) {
  spec.validate();
  if (data.alphabet() != Alphabet::quaternary)
    throw ValidationError("EffTox data must use the E/T/B/N alphabet", "outcomes");
  for (const auto &r : data.records())
    if (r.dose_level > spec.num_doses())
      throw ValidationError("dose level " + std::to_string(r.dose_level) + " exceeds the number of doses",
                            "outcomes");

  TargetDensity target;
  target.parameter_names = {"alpha", "beta", "gamma", "zeta", "eta", "psi"};
  target.support.assign(6, Support::real);
  const auto x = standardize_doses(spec.real_doses).x;
  target.log_density = [spec, x, data](std::span<const double> theta) {
    double lp = stats::normal_lpdf(theta[0], spec.alpha.mean, spec.alpha.sd) +
                stats::normal_lpdf(theta[1], spec.beta.mean, spec.beta.sd) +
                stats::normal_lpdf(theta[2], spec.gamma.mean, spec.gamma.sd) +
                stats::normal_lpdf(theta[3], spec.zeta.mean, spec.zeta.sd) +
                stats::normal_lpdf(theta[4], spec.eta.mean, spec.eta.sd) +
                stats::normal_lpdf(theta[5], spec.psi.mean, spec.psi.sd);
    for (const auto &r : data.records()) {
      const auto m = marginals(theta, x[static_cast<std::size_t>(r.dose_level - 1)]);
      const double p = joint_prob(has_efficacy(r.event), has_toxicity(r.event), m.eff, m.tox, theta[5]);
      lp += std::log(std::clamp(p, prob_floor, 1.0 - prob_floor));
    }
    return std::isnan(lp) ? stats::neg_inf : lp;
  };
  return target;
}

EffToxFit fit_efftox(const EffToxSpec &spec, const OutcomeSequence &data, const SamplerConfig &sampler) {
  EffToxFit fit;
  fit.spec = spec;
  fit.data = data;
  const auto target = efftox_log_posterior(spec, data);
  fit.doses = standardize_doses(spec.real_doses);
  const UtilityContour contour(spec.hinges);
  fit.contour_exponent = contour.exponent();
  fit.draws = sample(target, sampler);

  const auto K = static_cast<std::size_t>(spec.num_doses());
  const std::size_t S = fit.draws.size();
  fit.prob_eff_draws.resize(S * K);
  fit.prob_tox_draws.resize(S * K);
  fit.utility_draws.resize(S * K);
  fit.prob_eff_mean.assign(K, 0.0);
  fit.prob_tox_mean.assign(K, 0.0);
  fit.prob_acc_eff.assign(K, 0.0);
  fit.prob_acc_tox.assign(K, 0.0);
  fit.mean_utility.assign(K, 0.0);
  std::vector<std::size_t> obd_counts(K, 0);

  for (std::size_t s = 0; s < S; ++s) {
    const auto theta = fit.draws.row(s);
    std::size_t best = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto m = marginals(theta, fit.doses.x[k]);
      const double u = contour(m.eff, m.tox);
      fit.prob_eff_draws[s * K + k] = m.eff;
      fit.prob_tox_draws[s * K + k] = m.tox;
      fit.utility_draws[s * K + k] = u;
      fit.prob_eff_mean[k] += m.eff;
      fit.prob_tox_mean[k] += m.tox;
      fit.prob_acc_eff[k] += m.eff > spec.efficacy_hurdle ? 1.0 : 0.0;
      fit.prob_acc_tox[k] += m.tox < spec.toxicity_hurdle ? 1.0 : 0.0;
      fit.mean_utility[k] += u;
      if (u > fit.utility_draws[s * K + best]) best = k;
    }
    ++obd_counts[best];
  }

  const double n = static_cast<double>(S);
  fit.prob_obd.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    fit.prob_eff_mean[k] /= n;
    fit.prob_tox_mean[k] /= n;
    fit.prob_acc_eff[k] /= n;
    fit.prob_acc_tox[k] /= n;
    fit.mean_utility[k] /= n;
    fit.prob_obd[k] = static_cast<double>(obd_counts[k]) / n;
    fit.utility.push_back(contour(fit.prob_eff_mean[k], fit.prob_tox_mean[k]));
  }

  fit.num_patients.assign(K, 0);
  fit.num_eff.assign(K, 0);
  fit.num_tox.assign(K, 0);
  for (const auto &r : data.records()) {
    const auto k = static_cast<std::size_t>(r.dose_level - 1);
    ++fit.num_patients[k];
    fit.num_eff[k] += has_efficacy(r.event);
    fit.num_tox[k] += has_toxicity(r.event);
  }

  // Untried doses may not be skipped: no more than one level beyond the
  // range given so far. Vacuous before any patient is treated.
  const int lowest = data.min_dose_level();
  const int highest = data.max_dose_level();
  fit.acceptable.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const int level = static_cast<int>(k) + 1;
    const bool adjacent = data.empty() || (level >= lowest - 1 && level <= highest + 1);
    fit.acceptable[k] = fit.prob_acc_eff[k] > spec.p_e && fit.prob_acc_tox[k] > spec.p_t && adjacent;
  }

  for (std::size_t k = 0; k < K; ++k) {
    if (!fit.acceptable[k]) continue;
    if (!fit.recommended_dose || fit.utility[k] > fit.utility[static_cast<std::size_t>(*fit.recommended_dose - 1)])
      fit.recommended_dose = static_cast<int>(k) + 1;
  }
  fit.most_likely_obd =
      static_cast<int>(std::max_element(fit.prob_obd.begin(), fit.prob_obd.end()) - fit.prob_obd.begin()) + 1;
  fit.entropy = stats::entropy(fit.prob_obd);
  return fit;
}

SuperiorityMatrix superiority_matrix(const EffToxFit &fit) {
  const int K = fit.num_doses();
  const std::size_t S = fit.draws.size();
  SuperiorityMatrix m(static_cast<std::size_t>(K), std::vector<std::optional<double>>(static_cast<std::size_t>(K)));
  for (int r = 1; r <= K; ++r) {
    for (int c = 1; c <= K; ++c) {
      if (r == c) continue;
      std::size_t wins = 0;
      for (std::size_t s = 0; s < S; ++s) wins += fit.utility_draw(s, c) > fit.utility_draw(s, r);
      m[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)] = static_cast<double>(wins) / static_cast<double>(S);
    }
  }
  return m;
}

ContourData contour_data(const EffToxFit &fit, int grid_resolution) {
  if (grid_resolution < 2) throw ValidationError("grid resolution must be >= 2", "grid_resolution");
  const UtilityContour contour(fit.spec.hinges);
  ContourData out;
  out.resolution = grid_resolution;
  out.exponent = contour.exponent();
  out.hinges = fit.spec.hinges;
  const double h = 1.0 / (grid_resolution - 1);
  for (int i = 0; i < grid_resolution; ++i) {
    for (int j = 0; j < grid_resolution; ++j) {
      const double pe = i * h;
      const double pt = j * h;
      out.grid.push_back({pe, pt, contour(pe, pt)});
    }
  }
  for (int k = 0; k < fit.num_doses(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out.doses.push_back({k + 1, fit.prob_eff_mean[ku], fit.prob_tox_mean[ku], fit.utility[ku]});
  }
  return out;
}

std::string contour_csv(const ContourData &data) {
  std::string out = "dose,prob_eff,prob_tox,utility\n";
  char buf[128];
  for (const auto &g : data.grid) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", g.prob_eff, g.prob_tox, g.utility);
    out += buf;
  }
  for (const auto &d : data.doses) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", d.dose, d.prob_eff, d.prob_tox, d.utility);
    out += buf;
  }
  return out;
}

}  // namespace dosefind
