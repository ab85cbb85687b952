#pragma once

// Adaptive random-walk Metropolis over an unconstrained reparameterisation of
// a target density. Proposal covariance and scale are adapted during warmup
// only and frozen for the stored draws.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dosefind {

// Maps the working (unconstrained) coordinate onto the parameter's support.
enum class Support {
  real,         // identity
  positive,     // exp / log
  signed_unit,  // tanh / atanh, the interval (-1, 1)
};

struct TargetDensity {
  std::vector<std::string> parameter_names;
  std::vector<Support> support;
  // Log density in constrained space, up to a constant. Must return -inf (not
  // NaN) outside the support and be safe to call concurrently.
  std::function<double(std::span<const double>)> log_density;

  [[nodiscard]] std::size_t dimension() const noexcept { return parameter_names.size(); }
};

struct SamplerConfig {
  int chains = 4;
  int warmup = 1000;
  int draws_per_chain = 1000;
  // Iterations per stored draw; 0 picks 2 * dimension. Warmup length is
  // scaled by the same factor.
  int thin = 0;
  std::uint64_t seed = 123;
  double adapt_target_accept = 0.35;

  void validate() const;
  [[nodiscard]] int effective_thin(std::size_t dimension) const noexcept;
};

struct ParameterDiagnostics {
  std::string name;
  double split_rhat = 0.0;  // NaN when undefined (constant chains)
  double ess = 0.0;
};

class PosteriorDraws {
 public:
  PosteriorDraws() = default;
  PosteriorDraws(std::vector<std::string> names, int chains, int draws_per_chain, std::uint64_t seed,
                 std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(chains_) * draws_per_chain_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return names_.size(); }
  [[nodiscard]] int chains() const noexcept { return chains_; }
  [[nodiscard]] int draws_per_chain() const noexcept { return draws_per_chain_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<std::string> &names() const noexcept { return names_; }

  // Draws are stored chain-major: draw index = chain * draws_per_chain + iteration.
  [[nodiscard]] double operator()(std::size_t draw, std::size_t param) const {
    return values_[draw * names_.size() + param];
  }
  [[nodiscard]] std::span<const double> row(std::size_t draw) const {
    return {values_.data() + draw * names_.size(), names_.size()};
  }
  [[nodiscard]] std::vector<double> column(std::size_t param) const;
  [[nodiscard]] std::size_t index_of(std::string_view name) const;
  [[nodiscard]] double mean(std::size_t param) const;

  [[nodiscard]] const std::vector<double> &acceptance_rates() const noexcept { return acceptance_; }
  [[nodiscard]] const std::vector<ParameterDiagnostics> &diagnostics() const noexcept { return diagnostics_; }

  void set_acceptance_rates(std::vector<double> rates) { acceptance_ = std::move(rates); }
  void set_diagnostics(std::vector<ParameterDiagnostics> d) { diagnostics_ = std::move(d); }

 private:
  std::vector<std::string> names_;
  int chains_ = 0;
  int draws_per_chain_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;
  std::vector<double> acceptance_;
  std::vector<ParameterDiagnostics> diagnostics_;
};

// Runs chains in parallel; identical (target, config) give bit-identical draws.
// Throws SamplerError when no finite start point is found or the density
// returns NaN.
[[nodiscard]] PosteriorDraws sample(const TargetDensity &target, const SamplerConfig &config);

// Split-R-hat and multi-chain ESS (Geyer initial positive sequence) for
// sequences given as chains[c][i]. Throws ValidationError when a half-chain
// has fewer than 4 draws.
[[nodiscard]] double split_rhat(const std::vector<std::vector<double>> &chains);
[[nodiscard]] double effective_sample_size(const std::vector<std::vector<double>> &chains);

[[nodiscard]] std::vector<ParameterDiagnostics> diagnostics(const PosteriorDraws &draws);

}  // namespace dosefind
