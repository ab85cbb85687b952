#include "dosefind/augbin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/distributions/beta.hpp>

#include "dosefind/errors.hpp"
#include "dosefind/stats.hpp"

namespace dosefind {

namespace {

enum Param : std::size_t { alpha, beta, gamma, sigma1, sigma2, rho, alpha_d1, gamma_d1, alpha_d2, gamma_d2 };

void check_normal(const NormalPrior &p, const std::string &name) {
  if (!std::isfinite(p.mean)) throw ValidationError(name + "_mean must be finite", name + "_mean");
  if (!(p.sd > 0.0)) throw ValidationError(name + "_sd must be positive", name + "_sd");
}

double bernoulli_lpmf(int d, double eta) { return d ? stats::log_inv_logit(eta) : stats::log1m_inv_logit(eta); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void AugBinDataset::validate() const {
  for (std::size_t i = 0; i < patients.size(); ++i) {
    const auto &p = patients[i];
    const std::string where = "patient " + std::to_string(i + 1);
    if (!(p.z0 > 0.0 && p.z1 > 0.0 && p.z2 > 0.0) || !std::isfinite(p.z0) || !std::isfinite(p.z1) ||
        !std::isfinite(p.z2))
      throw ValidationError(where + ": tumour sizes must be positive and finite", "tumour_size");
    if ((p.d1 != 0 && p.d1 != 1) || (p.d2 != 0 && p.d2 != 1))
      throw ValidationError(where + ": failure indicators must be 0 or 1", "non_shrinkage_failure");
  }
}

AugBinDataset read_augbin_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::array<int, 5> col{-1, -1, -1, -1, -1};
  const std::array<std::string, 5> names{"z0", "z1", "z2", "d1", "d2"};
  bool header = false;
  AugBinDataset data;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (!header) {
      for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t k = 0; k < names.size(); ++k)
          if (cells[c] == names[k]) col[k] = static_cast<int>(c);
      for (std::size_t k = 0; k < names.size(); ++k)
        if (col[k] < 0) throw ValidationError("CSV header lacks column '" + names[k] + "'", "data");
      header = true;
      continue;
    }
    std::array<double, 5> v{};
    for (std::size_t k = 0; k < 5; ++k) {
      const auto c = static_cast<std::size_t>(col[k]);
      if (c >= cells.size())
        throw ValidationError("CSV line " + std::to_string(line_no) + ": missing column " + names[k], "data");
      std::size_t used = 0;
      try {
        v[k] = std::stod(cells[c], &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size())
        throw ValidationError("CSV line " + std::to_string(line_no) + ": '" + cells[c] + "' is not a number",
                              "data");
    }
    data.patients.push_back({v[0], v[1], v[2], static_cast<int>(v[3]), static_cast<int>(v[4])});
    if (static_cast<double>(data.patients.back().d1) != v[3] || static_cast<double>(data.patients.back().d2) != v[4])
      throw ValidationError("CSV line " + std::to_string(line_no) + ": failure indicators must be 0 or 1", "data");
  }
  if (!header) throw ValidationError("CSV input is empty", "data");
  data.validate();
  return data;
}

std::string write_augbin_csv(const AugBinDataset &data) {
  std::string out = "z0,z1,z2,d1,d2\n";
  char buf[160];
  for (const auto &p : data.patients) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d\n", p.z0, p.z1, p.z2, p.d1, p.d2);
    out += buf;
  }
  return out;
}

void AugBinPriors::validate() const {
  check_normal(alpha, "alpha");
  check_normal(beta, "beta");
  check_normal(gamma, "gamma");
  check_normal(sigma, "sigma");
  if (!(lkj_eta > 0.0)) throw ValidationError("omega_lkj_eta must be positive", "omega_lkj_eta");
  check_normal(alpha_d1, "alpha_d1");
  check_normal(gamma_d1, "gamma_d1");
  check_normal(alpha_d2, "alpha_d2");
  check_normal(gamma_d2, "gamma_d2");
}

AugBinPriors AugBinPriors::diffuse() {
  AugBinPriors p;
  p.alpha = p.beta = p.gamma = p.sigma = {0.0, 1.0};
  p.alpha_d1 = p.gamma_d1 = p.alpha_d2 = p.gamma_d2 = {0.0, 1.0};
  p.lkj_eta = 1.0;
  return p;
}

AugBinPriors AugBinPriors::informative() {
  AugBinPriors p;
  p.alpha = p.beta = p.gamma = {0.0, 0.1};
  p.sigma = {0.0, 0.5};
  p.lkj_eta = 1.0;
  p.alpha_d1 = p.alpha_d2 = {0.0, 0.5};
  p.gamma_d1 = p.gamma_d2 = {0.0, 0.25};
  return p;
}

TargetDensity augbin_log_posterior(const AugBinDataset &data, const AugBinPriors &priors) {
  data.validate();
  priors.validate();

  struct Obs {
    double z0, z1, y1, y2;
    int d1, d2;
  };
  std::vector<Obs> obs;
  obs.reserve(data.size());
  for (const auto &p : data.patients) obs.push_back({p.z0, p.z1, p.y1(), p.y2(), p.d1, p.d2});

  TargetDensity target;
  for (auto name : augbin_parameter_names) target.parameter_names.emplace_back(name);
  target.support = {Support::real,     Support::real, Support::real, Support::positive, Support::positive,
                    Support::signed_unit, Support::real, Support::real, Support::real,     Support::real};

  // Truncation constant of the half-normal; fixed, but kept so the density is
  // properly normalised when the location is non-zero.
  const double log_trunc = std::log(stats::normal_cdf(priors.sigma.mean / priors.sigma.sd));
  constexpr double log_2pi = 1.8378770664093453;

  target.log_density = [priors, obs = std::move(obs), log_trunc](std::span<const double> t) {
    const double s1 = t[sigma1], s2 = t[sigma2], r = t[rho];
    if (!(s1 > 0.0 && s2 > 0.0 && r > -1.0 && r < 1.0)) return stats::neg_inf;
    const double one_m_r2 = 1.0 - r * r;

    double lp = stats::normal_lpdf(t[alpha], priors.alpha.mean, priors.alpha.sd) +
                stats::normal_lpdf(t[beta], priors.beta.mean, priors.beta.sd) +
                stats::normal_lpdf(t[gamma], priors.gamma.mean, priors.gamma.sd) +
                stats::normal_lpdf(s1, priors.sigma.mean, priors.sigma.sd) - log_trunc +
                stats::normal_lpdf(s2, priors.sigma.mean, priors.sigma.sd) - log_trunc +
                (priors.lkj_eta - 1.0) * std::log(one_m_r2) +
                stats::normal_lpdf(t[alpha_d1], priors.alpha_d1.mean, priors.alpha_d1.sd) +
                stats::normal_lpdf(t[gamma_d1], priors.gamma_d1.mean, priors.gamma_d1.sd) +
                stats::normal_lpdf(t[alpha_d2], priors.alpha_d2.mean, priors.alpha_d2.sd) +
                stats::normal_lpdf(t[gamma_d2], priors.gamma_d2.mean, priors.gamma_d2.sd);

    const double norm = -log_2pi - std::log(s1) - std::log(s2) - 0.5 * std::log(one_m_r2);
    for (const auto &o : obs) {
      const double u = (o.y1 - t[alpha] - t[gamma] * o.z0) / s1;
      const double v = (o.y2 - t[beta] - t[gamma] * o.z0) / s2;
      lp += norm - (u * u - 2.0 * r * u * v + v * v) / (2.0 * one_m_r2);
      lp += bernoulli_lpmf(o.d1, t[alpha_d1] + t[gamma_d1] * o.z0);
      if (o.d1 == 0) lp += bernoulli_lpmf(o.d2, t[alpha_d2] + t[gamma_d2] * o.z1);
    }
    return std::isnan(lp) ? stats::neg_inf : lp;
  };
  return target;
}

AugBinFit fit_augbin(const AugBinDataset &data, const AugBinPriors &priors, const SamplerConfig &sampler) {
  if (data.size() == 0) throw ValidationError("AugBin dataset has no patients", "tumour_size");
  AugBinFit fit{data, priors, {}};
  fit.draws = sample(augbin_log_posterior(data, priors), sampler);
  return fit;
}

void SuccessOptions::validate() const {
  if (!std::isfinite(y2_upper)) throw ValidationError("y2_upper must be finite", "y2_upper");
  auto in_unit = [](double p) { return p > 0.0 && p < 1.0; };
  if (!in_unit(probs.first) || !in_unit(probs.second) || !(probs.first < probs.second))
    throw ValidationError("quantile probs must satisfy 0 < lower < upper < 1", "probs");
  if (y1_lower && y1_upper && !(*y1_lower < *y1_upper))
    throw ValidationError("y1_lower must be below y1_upper", "y1_lower");
}

std::vector<SuccessPrediction> success_prob_conditional(const AugBinFit &fit, const std::vector<PredictCase> &cases,
                                                        const SuccessOptions &options) {
  options.validate();
  const auto &d = fit.draws;
  const std::size_t S = d.size();
  std::vector<SuccessPrediction> out;
  out.reserve(cases.size());
  int id = 0;
  for (const auto &c : cases) {
    if (!(c.z0 > 0.0 && c.z1 > 0.0)) throw ValidationError("z0 and z1 must be positive", "newdata");
    SuccessPrediction pred;
    pred.id = ++id;
    pred.z0 = c.z0;
    pred.z1 = c.z1;
    pred.draws.resize(S);
    const double y1 = std::log(c.z1 / c.z0);
    const bool y1_ok = (!options.y1_lower || y1 > *options.y1_lower) && (!options.y1_upper || y1 < *options.y1_upper);
    for (std::size_t s = 0; s < S; ++s) {
      const auto t = d.row(s);
      const double mu1 = t[alpha] + t[gamma] * c.z0;
      const double mu2 = t[beta] + t[gamma] * c.z0;
      const double mu_cond = mu2 + t[rho] * t[sigma2] / t[sigma1] * (y1 - mu1);
      const double sd_cond = t[sigma2] * std::sqrt(1.0 - t[rho] * t[rho]);
      const double p_d1 = stats::inv_logit(t[alpha_d1] + t[gamma_d1] * c.z0);
      const double p_d2 = stats::inv_logit(t[alpha_d2] + t[gamma_d2] * c.z1);
      pred.draws[s] = y1_ok ? (1.0 - p_d1) * (1.0 - p_d2) * stats::normal_cdf((options.y2_upper - mu_cond) / sd_cond)
                            : 0.0;
    }
    pred.prob_success = stats::mean(pred.draws);
    pred.lower = stats::quantile(pred.draws, options.probs.first);
    pred.upper = stats::quantile(pred.draws, options.probs.second);
    pred.ci_width = pred.upper - pred.lower;
    out.push_back(std::move(pred));
  }
  return out;
}

std::vector<SuccessPrediction> predict(const AugBinFit &fit, const SuccessOptions &options) {
  std::vector<PredictCase> cases;
  cases.reserve(fit.data.size());
  for (const auto &p : fit.data.patients) cases.push_back({p.z0, p.z1});
  return success_prob_conditional(fit, cases, options);
}

std::vector<double> success_prob_marginal(const AugBinFit &fit, double z0, double y2_upper, int mc_samples,
                                          std::uint64_t seed) {
  if (!(z0 > 0.0)) throw ValidationError("z0 must be positive", "z0");
  if (mc_samples < 1000) throw ValidationError("mc_samples must be at least 1000", "mc_samples");
  if (!std::isfinite(y2_upper)) throw ValidationError("y2_upper must be finite", "y2_upper");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto &d = fit.draws;
  std::vector<double> out(d.size());
  for (std::size_t s = 0; s < d.size(); ++s) {
    const auto t = d.row(s);
    const double mu1 = t[alpha] + t[gamma] * z0;
    const double mu2 = t[beta] + t[gamma] * z0;
    const double p_d1 = stats::inv_logit(t[alpha_d1] + t[gamma_d1] * z0);
    const double cond_sd = t[sigma2] * std::sqrt(1.0 - t[rho] * t[rho]);
    double acc = 0.0;
    for (int m = 0; m < mc_samples; ++m) {
      const double e1 = normal(rng);
      const double e2 = normal(rng);
      const double y1 = mu1 + t[sigma1] * e1;
      const double y2 = mu2 + t[sigma2] * t[rho] * e1 + cond_sd * e2;
      if (y2 < y2_upper) acc += 1.0 - stats::inv_logit(t[alpha_d2] + t[gamma_d2] * z0 * std::exp(y1));
    }
    out[s] = (1.0 - p_d1) * acc / mc_samples;
  }
  return out;
}

BinaryEstimate clopper_pearson(int x, int n, double conf_level) {
  if (n <= 0) throw ValidationError("binary comparator needs at least one patient", "n");
  if (x < 0 || x > n) throw ValidationError("successes must lie in [0, n]", "x");
  if (!(conf_level > 0.0 && conf_level < 1.0)) throw ValidationError("conf_level must lie in (0, 1)", "conf_level");
  namespace bm = boost::math;
  const double a = 1.0 - conf_level;
  BinaryEstimate est;
  est.x = x;
  est.n = n;
  est.mean = static_cast<double>(x) / n;
  est.lower = x == 0 ? 0.0 : bm::quantile(bm::beta_distribution<double>(x, n - x + 1), a / 2.0);
  est.upper = x == n ? 1.0 : bm::quantile(bm::beta_distribution<double>(x + 1, n - x), 1.0 - a / 2.0);
  est.ci_width = est.upper - est.lower;
  return est;
}

BinaryEstimate binary_prob_success(const AugBinDataset &data, double y2_upper, double conf_level) {
  data.validate();
  int x = 0;
  for (const auto &p : data.patients) x += (p.d1 == 0 && p.d2 == 0 && p.y2() < y2_upper) ? 1 : 0;
  return clopper_pearson(x, static_cast<int>(data.size()), conf_level);
}

std::vector<PriorPredictiveRow> prior_predictive_2t_1a(const AugBinPriors &priors, int num_samps,
                                                       std::pair<double, double> z0_range, std::uint64_t seed) {
  priors.validate();
  if (num_samps < 1) throw ValidationError("num_samps must be at least 1", "num_samps");
  if (!(z0_range.first > 0.0 && z0_range.second > z0_range.first))
    throw ValidationError("z0 range must satisfy 0 < lower < upper", "z0_range");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> lkj_gamma(priors.lkj_eta, 1.0);
  auto normal = [&](const NormalPrior &p) { return p.mean + p.sd * std_normal(rng); };
  auto half_normal = [&](const NormalPrior &p) {
    for (;;) {
      const double v = normal(p);
      if (v > 0.0) return v;
    }
  };
  auto bernoulli = [&](double p) { return unit(rng) < p ? 1 : 0; };

  std::vector<PriorPredictiveRow> rows;
  rows.reserve(static_cast<std::size_t>(num_samps));
  for (int i = 0; i < num_samps; ++i) {
    const double a = normal(priors.alpha);
    const double b = normal(priors.beta);
    const double g = normal(priors.gamma);
    const double s1 = half_normal(priors.sigma);
    const double s2 = half_normal(priors.sigma);
    // The 2x2 LKJ(eta) correlation is 2 * Beta(eta, eta) - 1.
    const double g1 = lkj_gamma(rng);
    const double g2 = lkj_gamma(rng);
    const double r = 2.0 * g1 / (g1 + g2) - 1.0;
    const double ad1 = normal(priors.alpha_d1);
    const double gd1 = normal(priors.gamma_d1);
    const double ad2 = normal(priors.alpha_d2);
    const double gd2 = normal(priors.gamma_d2);

    PriorPredictiveRow row;
    row.id = i + 1;
    row.z0 = z0_range.first + (z0_range.second - z0_range.first) * unit(rng);
    const double e1 = std_normal(rng);
    const double e2 = std_normal(rng);
    row.y1 = a + g * row.z0 + s1 * e1;
    row.y2 = b + g * row.z0 + s2 * (r * e1 + std::sqrt(1.0 - r * r) * e2);
    row.prob_d1 = stats::inv_logit(ad1 + gd1 * row.z0);
    row.prob_d2 = stats::inv_logit(ad2 + gd2 * row.z0 * std::exp(row.y1));
    row.d1 = bernoulli(row.prob_d1);
    row.d2 = bernoulli(row.prob_d2);
    rows.push_back(row);
  }
  return rows;
}

void ScenarioParams::validate() const {
  if (n < 1) throw ValidationError("n must be at least 1", "n");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive", "sigma");
  if (!std::isfinite(delta1) || !std::isfinite(alpha_d) || !std::isfinite(gamma_d))
    throw ValidationError("scenario parameters must be finite", "delta1");
}

AugBinDataset simulate_scenario(const ScenarioParams &params, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Sigma = [[s2/2, s2/2], [s2/2, s2]] has Cholesky factor [[s/sqrt2, 0], [s/sqrt2, s/sqrt2]].
  const double c = params.sigma / std::numbers::sqrt2;
  const double mu1 = 0.5 * params.delta1;
  const double mu2 = params.delta1;

  AugBinDataset data;
  data.patients.reserve(static_cast<std::size_t>(params.n));
  for (int i = 0; i < params.n; ++i) {
    const double e1 = std_normal(rng);
    const double e2 = std_normal(rng);
    const double y1 = mu1 + c * e1;
    const double y2 = mu2 + c * e1 + c * e2;
    TumourRecord p;
    p.z0 = 5.0 + 5.0 * unit(rng);
    p.z1 = p.z0 * std::exp(y1);
    p.z2 = p.z0 * std::exp(y2);
    p.d1 = unit(rng) < stats::inv_logit(params.alpha_d + params.gamma_d * p.z0) ? 1 : 0;
    p.d2 = unit(rng) < stats::inv_logit(params.alpha_d + params.gamma_d * p.z1) ? 1 : 0;
    data.patients.push_back(p);
  }
  return data;
}

}  // namespace dosefind
