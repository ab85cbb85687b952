#include <doctest.h>

#include <cmath>
#include <random>

#include "dosefind/errors.hpp"
#include "dosefind/grid_oracle.hpp"
#include "dosefind/mcmc.hpp"
#include "dosefind/stats.hpp"

using namespace dosefind;

namespace {

TargetDensity std_normal() {
  return {{"x"}, {Support::real}, [](std::span<const double> t) { return -0.5 * t[0] * t[0]; }};
}

TargetDensity correlated_normal(double rho) {
  return {{"x", "y"}, {Support::real, Support::real}, [rho](std::span<const double> t) {
            const double q = (t[0] * t[0] - 2.0 * rho * t[0] * t[1] + t[1] * t[1]) / (1.0 - rho * rho);
            return -0.5 * q;
          }};
}

}  // namespace

TEST_CASE("standard normal moments") {
  SamplerConfig cfg;
  cfg.seed = 11;
  const auto d = sample(std_normal(), cfg);
  REQUIRE(d.size() == 4000);
  const auto x = d.column(0);
  double m = 0.0, v = 0.0;
  for (double xi : x) m += xi / static_cast<double>(x.size());
  for (double xi : x) v += (xi - m) * (xi - m) / static_cast<double>(x.size() - 1);
  const double ess = d.diagnostics()[0].ess;
  CHECK(std::abs(m) < 4.0 / std::sqrt(ess));
  CHECK(v == doctest::Approx(1.0).epsilon(0.1));
  for (double a : d.acceptance_rates()) {
    CHECK(a > 0.1);
    CHECK(a < 0.6);
  }
}

TEST_CASE("correlated normal recovers its correlation") {
  SamplerConfig cfg;
  cfg.seed = 5;
  const auto d = sample(correlated_normal(0.9), cfg);
  const auto x = d.column(0), y = d.column(1);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(0.9).epsilon(0.05 / 0.9));
}

TEST_CASE("identical seeds give identical draws") {
  SamplerConfig cfg;
  cfg.seed = 99;
  cfg.draws_per_chain = 200;
  const auto a = sample(correlated_normal(0.5), cfg);
  const auto b = sample(correlated_normal(0.5), cfg);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) REQUIRE(a(i, j) == b(i, j));
  cfg.seed = 100;
  const auto c = sample(correlated_normal(0.5), cfg);
  CHECK(a(0, 0) != c(0, 0));
}

TEST_CASE("constrained supports hold in every draw") {
  // Gamma(3, 2) on sigma and a Beta(2, 5)-like density on (rho + 1) / 2.
  TargetDensity t{{"sigma", "rho"}, {Support::positive, Support::signed_unit}, [](std::span<const double> p) {
                    if (p[0] <= 0.0 || std::abs(p[1]) >= 1.0) return stats::neg_inf;
                    const double u = (p[1] + 1.0) / 2.0;
                    return 2.0 * std::log(p[0]) - 2.0 * p[0] + std::log(u) + 4.0 * std::log1p(-u);
                  }};
  SamplerConfig cfg;
  cfg.seed = 3;
  const auto d = sample(t, cfg);
  double mean_sigma = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    REQUIRE(d(i, 0) > 0.0);
    REQUIRE(std::abs(d(i, 1)) < 1.0);
    mean_sigma += d(i, 0) / static_cast<double>(d.size());
  }
  CHECK(mean_sigma == doctest::Approx(1.5).epsilon(0.06));
}

TEST_CASE("sampler failures") {
  TargetDensity nowhere{{"x"}, {Support::real}, [](std::span<const double>) { return -INFINITY; }};
  CHECK_THROWS_AS((void)sample(nowhere, SamplerConfig{}), SamplerError);
  TargetDensity nan{{"x"}, {Support::real}, [](std::span<const double> t) { return t[0] > 0.5 ? NAN : 0.0; }};
  CHECK_THROWS_AS((void)sample(nan, SamplerConfig{}), SamplerError);
  SamplerConfig bad;
  bad.chains = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("split R-hat and ESS") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> iid(4, std::vector<double>(1000));
  for (auto &c : iid)
    for (auto &x : c) x = z(rng);
  CHECK(split_rhat(iid) < 1.01);
  CHECK(effective_sample_size(iid) > 2500.0);

  std::vector<std::vector<double>> constant(4, std::vector<double>(100, 2.0));
  CHECK(std::isnan(split_rhat(constant)));
  CHECK(effective_sample_size(constant) == 0.0);

  // Chains drifting in opposite directions disagree between halves.
  std::vector<std::vector<double>> apart(2, std::vector<double>(500));
  for (int i = 0; i < 500; ++i) {
    apart[0][i] = 0.01 * i + 0.1 * z(rng);
    apart[1][i] = -0.01 * i + 0.1 * z(rng);
  }
  CHECK(split_rhat(apart) > 1.1);

  std::vector<std::vector<double>> tiny(2, std::vector<double>(6, 0.0));
  CHECK_THROWS_AS((void)split_rhat(tiny), ValidationError);
}

TEST_CASE("grid oracle on known densities") {
  const GridBounds wide[] = {{-8.0, 8.0}};
  const auto g = grid_oracle(std_normal(), wide, 2001);
  CHECK(g.expectation([](std::span<const double> t) { return t[0]; }) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(g.expectation([](std::span<const double> t) { return t[0] * t[0]; }) - 1.0) < 1e-4);

  TargetDensity beta22{{"p"}, {Support::real}, [](std::span<const double> t) {
                         return (t[0] <= 0.0 || t[0] >= 1.0) ? -INFINITY : std::log(t[0] * (1.0 - t[0]));
                       }};
  const GridBounds unit[] = {{0.0, 1.0}};
  const auto b = grid_oracle(beta22, unit, 1001);
  CHECK(std::abs(b.expectation([](std::span<const double> t) { return t[0]; }) - 0.5) < 1e-6);

  const GridBounds plane[] = {{-8.0, 8.0}, {-8.0, 8.0}};
  const auto c = grid_oracle(correlated_normal(0.6), plane, 301);
  CHECK(c.expectation([](std::span<const double> t) { return t[0] * t[1]; }) == doctest::Approx(0.6).epsilon(1e-3));

  TargetDensity three{{"a", "b", "c"}, {Support::real, Support::real, Support::real},
                      [](std::span<const double>) { return 0.0; }};
  const GridBounds cube[] = {{0, 1}, {0, 1}, {0, 1}};
  CHECK_THROWS_AS((void)grid_oracle(three, cube, 10), ValidationError);
  TargetDensity none{{"x"}, {Support::real}, [](std::span<const double>) { return -INFINITY; }};
  CHECK_THROWS_AS((void)grid_oracle(none, wide, 11), ValidationError);
}
