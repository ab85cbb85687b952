#pragma once

// Designs used across the unit and acceptance tests.

#include <cmath>

#include "dosefind/augbin.hpp"
#include "dosefind/crm.hpp"
#include "dosefind/efftox.hpp"

namespace fixtures {

inline dosefind::CrmSpec crm_logistic() {
  dosefind::CrmSpec s;
  s.skeleton = {0.05, 0.12, 0.25, 0.40, 0.55};
  s.target = 0.25;
  s.model = dosefind::CrmModel::logistic;
  s.a0 = 3.0;
  s.beta_mean = 0.0;
  s.beta_sd = std::sqrt(1.34);
  return s;
}

inline dosefind::CrmSpec crm_tite() {
  auto s = crm_logistic();
  s.model = dosefind::CrmModel::empiric;
  s.a0.reset();
  return s;
}

inline dosefind::CrmSpec crm_pathways() {
  dosefind::CrmSpec s;
  s.skeleton = {0.05, 0.15, 0.25, 0.4, 0.6};
  s.target = 0.25;
  s.model = dosefind::CrmModel::empiric;
  s.beta_mean = 0.0;
  s.beta_sd = 1.0;
  return s;
}

inline dosefind::EffToxSpec efftox() {
  dosefind::EffToxSpec s;
  s.real_doses = {1.0, 2.0, 4.0, 6.6, 10.0};
  s.efficacy_hurdle = 0.5;
  s.toxicity_hurdle = 0.3;
  s.p_e = 0.1;
  s.p_t = 0.1;
  s.hinges = {0.5, 0.65, 0.7, 0.25};
  s.alpha = {-7.9593, 3.5487};
  s.beta = {1.5482, 3.5018};
  s.gamma = {0.7367, 2.5423};
  s.zeta = {3.4181, 2.4406};
  s.eta = {0.0, 0.2};
  s.psi = {0.0, 1.0};
  return s;
}

inline dosefind::SamplerConfig sampler(std::uint64_t seed = 123, int draws = 1000) {
  dosefind::SamplerConfig c;
  c.seed = seed;
  c.draws_per_chain = draws;
  return c;
}

}  // namespace fixtures
