#include "dosefind/grid_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dosefind/errors.hpp"

namespace dosefind {

double GridPosterior::expectation(const std::function<double(std::span<const double>)> &g) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) acc += weights_[i] * g(point(i));
  return acc;
}

GridPosterior grid_oracle(const TargetDensity &target, std::span<const GridBounds> bounds, int resolution) {
  const std::size_t dim = target.dimension();
  if (dim == 0 || dim > 2) throw ValidationError("grid oracle supports 1 or 2 dimensions only");
  if (bounds.size() != dim) throw ValidationError("one bound pair is required per dimension");
  if (resolution < 3) throw ValidationError("grid resolution must be >= 3");
  for (const auto &b : bounds)
    if (!(b.upper > b.lower)) throw ValidationError("grid bounds must satisfy lower < upper");

  auto axis = [&](std::size_t d) {
    std::vector<double> x(static_cast<std::size_t>(resolution));
    const double h = (bounds[d].upper - bounds[d].lower) / (resolution - 1);
    for (int i = 0; i < resolution; ++i) x[static_cast<std::size_t>(i)] = bounds[d].lower + h * i;
    return x;
  };
  auto trapezoid = [&](int i) { return (i == 0 || i == resolution - 1) ? 0.5 : 1.0; };

  const auto x0 = axis(0);
  const auto x1 = dim == 2 ? axis(1) : std::vector<double>{0.0};
  const int n1 = dim == 2 ? resolution : 1;

  std::vector<double> points;
  std::vector<double> log_w;
  points.reserve(static_cast<std::size_t>(resolution) * n1 * dim);
  log_w.reserve(static_cast<std::size_t>(resolution) * n1);
  std::vector<double> theta(dim);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < n1; ++j) {
      theta[0] = x0[static_cast<std::size_t>(i)];
      if (dim == 2) theta[1] = x1[static_cast<std::size_t>(j)];
      const double lp = target.log_density(theta);
      const double quad = trapezoid(i) * (dim == 2 ? trapezoid(j) : 1.0);
      points.insert(points.end(), theta.begin(), theta.end());
      log_w.push_back(std::isfinite(lp) ? lp + std::log(quad) : -INFINITY);
    }
  }

  const double peak = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(peak)) throw ValidationError("target has zero mass on the grid");
  std::vector<double> w(log_w.size());
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(log_w[k] - peak);
    total += w[k];
  }
  for (double &v : w) v /= total;
  return GridPosterior(dim, std::move(points), std::move(w));
}

}  // namespace dosefind
