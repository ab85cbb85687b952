#pragma once

// Deterministic quadrature over a bounded 1-D or 2-D parameter grid. Used as
// an independent check on sampler output for the low-dimensional CRM models.

#include <functional>
#include <span>
#include <vector>

#include "dosefind/mcmc.hpp"

namespace dosefind {

struct GridBounds {
  double lower = 0.0;
  double upper = 0.0;
};

class GridPosterior {
 public:
  GridPosterior(std::size_t dimension, std::vector<double> points, std::vector<double> weights)
      : dimension_(dimension), points_(std::move(points)), weights_(std::move(weights)) {}

  // E[g(theta)] under the normalised grid weights.
  [[nodiscard]] double expectation(const std::function<double(std::span<const double>)> &g) const;

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * dimension_, dimension_};
  }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }

 private:
  std::size_t dimension_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

// Trapezoid-rule weights on `resolution` nodes per axis, evaluated in
// constrained space. Throws ValidationError for dimension > 2 or zero mass.
[[nodiscard]] GridPosterior grid_oracle(const TargetDensity &target, std::span<const GridBounds> bounds,
                                        int resolution);

}  // namespace dosefind
