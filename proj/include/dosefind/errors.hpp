#pragma once

#include <stdexcept>
#include <string>

namespace dosefind {

// Bad input: malformed outcome strings, inconsistent specs, out-of-range values.
// `field` names the offending input where one exists (a spec member, CLI flag
// or JSON key) and is empty otherwise.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string &message, std::string field = {})
      : std::invalid_argument(message), field_(std::move(field)) {}

  [[nodiscard]] const std::string &field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The sampler could not start or met an invalid (NaN) log density.
class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dosefind
