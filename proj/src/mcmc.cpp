#include "dosefind/mcmc.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

#include "dosefind/errors.hpp"
#include "dosefind/stats.hpp"

namespace dosefind {

void SamplerConfig::validate() const {
  if (chains < 1) throw ValidationError("chains must be positive", "chains");
  if (warmup < 1) throw ValidationError("warmup must be positive", "warmup");
  if (draws_per_chain < 1) throw ValidationError("draws_per_chain must be positive", "draws_per_chain");
  if (thin < 0) throw ValidationError("thin must be non-negative", "thin");
  if (!(adapt_target_accept > 0.0 && adapt_target_accept < 1.0))
    throw ValidationError("adapt_target_accept must lie in (0, 1)", "adapt_target_accept");
}

int SamplerConfig::effective_thin(std::size_t dimension) const noexcept {
  return thin > 0 ? thin : std::max(1, 2 * static_cast<int>(dimension));
}

PosteriorDraws::PosteriorDraws(std::vector<std::string> names, int chains, int draws_per_chain,
                               std::uint64_t seed, std::vector<double> values)
    : names_(std::move(names)),
      chains_(chains),
      draws_per_chain_(draws_per_chain),
      seed_(seed),
      values_(std::move(values)) {
  if (values_.size() != size() * names_.size())
    throw std::logic_error("PosteriorDraws: value count does not match chains x draws x dimension");
}

std::vector<double> PosteriorDraws::column(std::size_t param) const {
  std::vector<double> out(size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = (*this)(s, param);
  return out;
}

std::size_t PosteriorDraws::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("no parameter named " + std::string(name));
  return static_cast<std::size_t>(it - names_.begin());
}

double PosteriorDraws::mean(std::size_t param) const {
  double s = 0.0;
  for (std::size_t d = 0; d < size(); ++d) s += (*this)(d, param);
  return s / static_cast<double>(size());
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Working-space transform with log |Jacobian|.
struct Transform {
  const std::vector<Support> &support;

  void to_constrained(const Vec &u, std::vector<double> &theta) const {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      switch (support[i]) {
        case Support::real:
          theta[i] = u[i];
          break;
        case Support::positive:
          theta[i] = std::exp(u[i]);
          break;
        case Support::signed_unit:
          theta[i] = std::tanh(u[i]);
          break;
      }
    }
  }

  [[nodiscard]] double log_jacobian(const Vec &u) const {
    double lj = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (support[i] == Support::positive) {
        lj += u[i];
      } else if (support[i] == Support::signed_unit) {
        // log(1 - tanh^2 u) = log 4 - 2 log(e^u + e^-u), computed stably
        const double a = std::abs(u[i]);
        lj += std::log(4.0) - 2.0 * (a + std::log1p(std::exp(-2.0 * a)));
      }
    }
    return lj;
  }
};

struct ChainResult {
  std::vector<double> values;  // draws_per_chain x dim
  double acceptance = 0.0;
};

class Chain {
 public:
  Chain(const TargetDensity &target, const SamplerConfig &config, int index)
      : target_(target),
        config_(config),
        transform_{target.support},
        dim_(static_cast<Eigen::Index>(target.dimension())),
        rng_(stats::derive_seed(config.seed, static_cast<std::uint64_t>(index))),
        theta_(target.dimension()),
        index_(index) {}

  ChainResult run() {
    initialise();
    const int thin = config_.effective_thin(target_.dimension());
    adapt(static_cast<long>(config_.warmup) * thin);

    ChainResult out;
    out.values.reserve(static_cast<std::size_t>(config_.draws_per_chain) * target_.dimension());
    long accepted = 0;
    const long iterations = static_cast<long>(config_.draws_per_chain) * thin;
    for (long it = 1; it <= iterations; ++it) {
      step();
      accepted += last_accepted_;
      if (it % thin == 0) {
        transform_.to_constrained(current_, theta_);
        out.values.insert(out.values.end(), theta_.begin(), theta_.end());
      }
    }
    out.acceptance = static_cast<double>(accepted) / static_cast<double>(iterations);
    return out;
  }

 private:
  double log_target(const Vec &u) {
    transform_.to_constrained(u, theta_);
    const double lp = target_.log_density(theta_);
    if (std::isnan(lp))
      throw SamplerError("log density returned NaN in chain " + std::to_string(index_ + 1) +
                         " (invalid model)");
    if (lp == stats::neg_inf) return lp;
    return lp + transform_.log_jacobian(u);
  }

  void initialise() {
    constexpr int max_attempts = 100;
    std::uniform_real_distribution<double> init(-2.0, 2.0);
    current_ = Vec::Zero(dim_);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      for (Eigen::Index i = 0; i < dim_; ++i) current_[i] = init(rng_);
      current_lp_ = log_target(current_);
      if (std::isfinite(current_lp_)) {
        chol_ = Mat::Identity(dim_, dim_);
        log_scale_ = std::log(2.38 / std::sqrt(static_cast<double>(dim_)));
        return;
      }
    }
    throw SamplerError("chain " + std::to_string(index_ + 1) + ": no finite log density at " +
                       std::to_string(max_attempts) + " random start points");
  }

  // One Metropolis step; returns the acceptance probability and records
  // whether the proposal was taken in last_accepted_.
  double step() {
    Vec z(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) z[i] = normal_(rng_);
    const Vec proposal = current_ + std::exp(log_scale_) * (chol_ * z);
    const double lp = log_target(proposal);
    const double log_ratio = lp - current_lp_;
    const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    last_accepted_ = 0;
    if (lp != stats::neg_inf && (log_ratio >= 0.0 || std::log(unit_(rng_)) < log_ratio)) {
      current_ = proposal;
      current_lp_ = lp;
      last_accepted_ = 1;
    }
    return accept_prob;
  }

  // Warmup: an initial scale-only phase, then doubling windows that each end
  // with a covariance re-estimate from the window's states, then a final
  // scale-only phase. Scale follows a Robbins-Monro recursion toward the
  // target acceptance rate, restarted at each window.
  void adapt(long iterations) {
    const long initial = std::max(10L, iterations * 15 / 100);
    const long terminal = std::max(10L, iterations / 10);
    long window = std::max(25L, iterations / 40);
    long it = 0;
    long rm_step = 0;

    auto scale_update = [&](double accept_prob) {
      ++rm_step;
      const double gain = std::pow(static_cast<double>(rm_step) + 1.0, -0.6);
      log_scale_ += gain * (accept_prob - config_.adapt_target_accept);
      log_scale_ = std::clamp(log_scale_, -12.0, 6.0);
    };

    for (; it < initial && it < iterations; ++it) scale_update(step());

    const long slow_end = iterations - terminal;
    while (it < slow_end) {
      long this_window = std::min(window, slow_end - it);
      // Fold a short remainder into the current window.
      if (slow_end - (it + this_window) < 2 * window) this_window = slow_end - it;
      Vec sum = Vec::Zero(dim_);
      Mat sum_sq = Mat::Zero(dim_, dim_);
      for (long k = 0; k < this_window; ++k, ++it) {
        scale_update(step());
        sum += current_;
        sum_sq += current_ * current_.transpose();
      }
      update_covariance(sum, sum_sq, this_window);
      log_scale_ = std::log(2.38 / std::sqrt(static_cast<double>(dim_)));
      rm_step = 0;
      window *= 2;
    }

    for (; it < iterations; ++it) scale_update(step());
  }

  void update_covariance(const Vec &sum, const Mat &sum_sq, long n) {
    if (n < 2) return;
    const double nd = static_cast<double>(n);
    const Vec m = sum / nd;
    Mat cov = (sum_sq - nd * m * m.transpose()) / (nd - 1.0);
    // Shrink toward a small diagonal as Stan's metric adaptation does.
    cov = (nd / (nd + 5.0)) * cov + 1e-3 * (5.0 / (nd + 5.0)) * Mat::Identity(dim_, dim_);
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 1e-10) {
      chol_ = llt.matrixL();
      return;
    }
    // Singular estimate: fall back to per-coordinate scaling.
    Mat diag = Mat::Zero(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) diag(i, i) = std::sqrt(std::max(cov(i, i), 1e-8));
    chol_ = diag;
  }

  const TargetDensity &target_;
  const SamplerConfig &config_;
  Transform transform_;
  Eigen::Index dim_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::vector<double> theta_;
  Vec current_;
  double current_lp_ = 0.0;
  Mat chol_;
  double log_scale_ = 0.0;
  int last_accepted_ = 0;
  int index_;
};

}  // namespace

PosteriorDraws sample(const TargetDensity &target, const SamplerConfig &config) {
  config.validate();
  if (target.dimension() == 0) throw ValidationError("target dimension must be >= 1");
  if (target.support.size() != target.dimension())
    throw ValidationError("support transform count must equal the target dimension");
  if (!target.log_density) throw ValidationError("target has no log density");

  std::vector<std::future<ChainResult>> futures;
  futures.reserve(static_cast<std::size_t>(config.chains));
  for (int c = 0; c < config.chains; ++c) {
    futures.push_back(std::async(std::launch::async, [&target, &config, c] {
      Chain chain(target, config, c);
      return chain.run();
    }));
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(config.chains) * config.draws_per_chain * target.dimension());
  std::vector<double> acceptance;
  // Collect every future before rethrowing so no chain outlives `target`.
  std::exception_ptr failure;
  for (auto &f : futures) {
    try {
      auto r = f.get();
      values.insert(values.end(), r.values.begin(), r.values.end());
      acceptance.push_back(r.acceptance);
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  PosteriorDraws draws(target.parameter_names, config.chains, config.draws_per_chain, config.seed,
                       std::move(values));
  draws.set_acceptance_rates(std::move(acceptance));
  if (config.chains >= 2 && config.draws_per_chain >= 8) draws.set_diagnostics(diagnostics(draws));
  return draws;
}

namespace {

std::vector<std::vector<double>> split_halves(const std::vector<std::vector<double>> &chains) {
  std::vector<std::vector<double>> out;
  for (const auto &c : chains) {
    const std::size_t half = c.size() / 2;
    if (half < 4) throw ValidationError("split diagnostics need at least 4 draws per half-chain");
    // Odd lengths drop the middle draw.
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

struct Moments {
  double within = 0.0;   // W
  double var_plus = 0.0;
  std::vector<double> means;
  std::vector<double> variances;
};

Moments moments(const std::vector<std::vector<double>> &seqs) {
  Moments m;
  const double n = static_cast<double>(seqs.front().size());
  for (const auto &s : seqs) {
    const double mu = stats::mean(s);
    double ss = 0.0;
    for (double v : s) ss += (v - mu) * (v - mu);
    m.means.push_back(mu);
    m.variances.push_back(ss / (n - 1.0));
  }
  m.within = stats::mean(m.variances);
  const double grand = stats::mean(m.means);
  double b = 0.0;
  for (double mu : m.means) b += (mu - grand) * (mu - grand);
  b /= static_cast<double>(seqs.size()) - 1.0;  // B / n
  m.var_plus = (n - 1.0) / n * m.within + b;
  return m;
}

}  // namespace

double split_rhat(const std::vector<std::vector<double>> &chains) {
  const auto seqs = split_halves(chains);
  const auto m = moments(seqs);
  if (!(m.within > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(m.var_plus / m.within);
}

double effective_sample_size(const std::vector<std::vector<double>> &chains) {
  const auto seqs = split_halves(chains);
  const auto m = moments(seqs);
  if (!(m.within > 0.0)) return 0.0;
  const std::size_t n = seqs.front().size();
  const double total = static_cast<double>(n * seqs.size());

  // rho_t = 1 - (W - mean_c autocov_c(t)) / var_plus
  auto rho = [&](std::size_t lag) {
    double acov = 0.0;
    for (std::size_t c = 0; c < seqs.size(); ++c) {
      const auto &s = seqs[c];
      double sum = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) sum += (s[i] - m.means[c]) * (s[i + lag] - m.means[c]);
      acov += sum / static_cast<double>(n);
    }
    acov /= static_cast<double>(seqs.size());
    return 1.0 - (m.within - acov) / m.var_plus;
  };

  // Sum paired autocorrelations until the first negative pair.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (k == 0 ? 1.0 : rho(2 * k)) + rho(2 * k + 1);
    if (pair < 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

std::vector<ParameterDiagnostics> diagnostics(const PosteriorDraws &draws) {
  if (draws.chains() < 2) throw ValidationError("R-hat needs at least 2 chains");
  std::vector<ParameterDiagnostics> out;
  const auto per_chain = static_cast<std::size_t>(draws.draws_per_chain());
  for (std::size_t p = 0; p < draws.dimension(); ++p) {
    std::vector<std::vector<double>> chains(static_cast<std::size_t>(draws.chains()));
    for (std::size_t c = 0; c < chains.size(); ++c) {
      chains[c].reserve(per_chain);
      for (std::size_t i = 0; i < per_chain; ++i) chains[c].push_back(draws(c * per_chain + i, p));
    }
    out.push_back({draws.names()[p], split_rhat(chains), effective_sample_size(chains)});
  }
  return out;
}

}  // namespace dosefind
