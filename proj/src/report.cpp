#include "dosefind/report.hpp"

#include <cmath>
#include <cstdio>

#include "dosefind/stats.hpp"

namespace dosefind {

namespace {

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Right-aligned text table; first row is the header.
std::string table(const std::vector<std::vector<std::string>> &rows) {
  if (rows.empty()) return {};
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto &r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (const auto &r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ' ';
      out.append(width[c] - r[c].size(), ' ');
      out += r[c];
    }
    out += '\n';
  }
  return out;
}

Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json diagnostics_json(const PosteriorDraws &draws) {
  Json params = Json::array();
  for (const auto &d : draws.diagnostics())
    params.push_back({{"name", d.name},
                      {"split_rhat", std::isfinite(d.split_rhat) ? Json(d.split_rhat) : Json(nullptr)},
                      {"ess", d.ess}});
  return {{"chains", draws.chains()},
          {"draws_per_chain", draws.draws_per_chain()},
          {"acceptance_rates", draws.acceptance_rates()},
          {"parameters", params}};
}

Json dose_choice_json(DoseChoice d) { return d ? Json(*d) : Json("stop"); }

Json crm_spec_json(const CrmSpec &spec) {
  Json j{{"skeleton", spec.skeleton}, {"target", spec.target}, {"model", to_string(spec.model)}};
  auto put = [&](const char *name, const std::optional<double> &v) {
    if (v) j[name] = *v;
  };
  put("a0", spec.a0);
  put("beta_mean", spec.beta_mean);
  put("beta_sd", spec.beta_sd);
  put("beta_shape", spec.beta_shape);
  put("beta_rate", spec.beta_rate);
  put("alpha_mean", spec.alpha_mean);
  put("alpha_sd", spec.alpha_sd);
  return j;
}

Json efftox_spec_json(const EffToxSpec &spec) {
  Json j{{"real_doses", spec.real_doses}, {"efficacy_hurdle", spec.efficacy_hurdle},
         {"toxicity_hurdle", spec.toxicity_hurdle}, {"p_e", spec.p_e},
         {"p_t", spec.p_t}, {"eff0", spec.hinges.eff0},
         {"tox1", spec.hinges.tox1}, {"eff_star", spec.hinges.eff_star},
         {"tox_star", spec.hinges.tox_star}};
  const std::pair<const char *, const NormalPrior *> priors[] = {{"alpha", &spec.alpha}, {"beta", &spec.beta},
                                                                 {"gamma", &spec.gamma}, {"zeta", &spec.zeta},
                                                                 {"eta", &spec.eta},     {"psi", &spec.psi}};
  for (const auto &[name, p] : priors) {
    j[std::string(name) + "_mean"] = p->mean;
    j[std::string(name) + "_sd"] = p->sd;
  }
  return j;
}

Json augbin_priors_json(const AugBinPriors &priors) {
  Json j;
  const std::pair<const char *, const NormalPrior *> normals[] = {
      {"alpha", &priors.alpha},       {"beta", &priors.beta},         {"gamma", &priors.gamma},
      {"sigma", &priors.sigma},       {"alpha_d1", &priors.alpha_d1}, {"gamma_d1", &priors.gamma_d1},
      {"alpha_d2", &priors.alpha_d2}, {"gamma_d2", &priors.gamma_d2}};
  for (const auto &[name, p] : normals) {
    j[std::string(name) + "_mean"] = p->mean;
    j[std::string(name) + "_sd"] = p->sd;
  }
  j["omega_lkj_eta"] = priors.lkj_eta;
  return j;
}

Json crm_fit_json(const CrmFit &fit) {
  Json patients = Json::array();
  for (const auto &r : fit.data.records())
    patients.push_back(
        {{"Patient", r.patient}, {"Dose", r.dose_level}, {"Toxicity", has_toxicity(r.event) ? 1 : 0}, {"Weight", r.weight}});
  Json doses = Json::array();
  for (int k = 1; k <= fit.num_doses(); ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    doses.push_back({{"Dose", k},
                     {"Skeleton", fit.spec.skeleton[i]},
                     {"N", fit.num_patients[i]},
                     {"Tox", fit.num_tox[i]},
                     {"ProbTox", fit.prob_tox_mean[i]},
                     {"MedianProbTox", fit.prob_tox_median[i]},
                     {"ProbMTD", fit.prob_mtd[i]}});
  }
  return {{"design", "crm"},
          {"spec", crm_spec_json(fit.spec)},
          {"dose_labels", fit.labels.values},
          {"patients", patients},
          {"doses", doses},
          {"recommended_dose", fit.recommended_dose},
          {"recommendation", fit.recommended_dose},
          {"most_likely_mtd", fit.most_likely_mtd},
          {"entropy", fit.entropy},
          {"seed", fit.draws.seed()},
          {"diagnostics", diagnostics_json(fit.draws)}};
}

Json contour_json(const ContourData &c) {
  Json grid = Json::array();
  for (const auto &g : c.grid) grid.push_back({g.prob_eff, g.prob_tox, g.utility});
  Json doses = Json::array();
  for (const auto &d : c.doses)
    doses.push_back({{"Dose", d.dose}, {"ProbEff", d.prob_eff}, {"ProbTox", d.prob_tox}, {"Utility", d.utility}});
  return {{"resolution", c.resolution},
          {"exponent", c.exponent},
          {"hinges",
           {{"eff0", c.hinges.eff0},
            {"tox1", c.hinges.tox1},
            {"eff_star", c.hinges.eff_star},
            {"tox_star", c.hinges.tox_star}}},
          {"grid_columns", {"prob_eff", "prob_tox", "utility"}},
          {"grid", grid},
          {"doses", doses}};
}

Json efftox_fit_json(const EffToxFit &fit, int contour_resolution) {
  Json patients = Json::array();
  for (const auto &r : fit.data.records())
    patients.push_back({{"Patient", r.patient},
                        {"Dose", r.dose_level},
                        {"Toxicity", has_toxicity(r.event) ? 1 : 0},
                        {"Efficacy", has_efficacy(r.event) ? 1 : 0}});
  Json doses = Json::array();
  for (int k = 1; k <= fit.num_doses(); ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    doses.push_back({{"Dose", k},
                     {"N", fit.num_patients[i]},
                     {"ProbEff", fit.prob_eff_mean[i]},
                     {"ProbTox", fit.prob_tox_mean[i]},
                     {"ProbAccEff", fit.prob_acc_eff[i]},
                     {"ProbAccTox", fit.prob_acc_tox[i]},
                     {"Utility", fit.utility[i]},
                     {"MeanUtility", fit.mean_utility[i]},
                     {"Acceptable", static_cast<bool>(fit.acceptable[i])},
                     {"ProbOBD", fit.prob_obd[i]}});
  }
  Json sup = Json::array();
  for (const auto &row : superiority_matrix(fit)) {
    Json r = Json::array();
    for (const auto &v : row) r.push_back(optional_json(v));
    sup.push_back(r);
  }
  Json j{{"design", "efftox"},
         {"spec", efftox_spec_json(fit.spec)},
         {"standardized_doses", fit.doses.x},
         {"utility_exponent", fit.contour_exponent},
         {"patients", patients},
         {"doses", doses},
         {"recommended_dose", fit.recommended_dose ? Json(*fit.recommended_dose) : Json(nullptr)},
         {"recommendation", dose_choice_json(fit.recommended_dose)},
         {"most_likely_obd", fit.most_likely_obd},
         {"entropy", fit.entropy},
         {"superiority", sup},
         {"seed", fit.draws.seed()},
         {"diagnostics", diagnostics_json(fit.draws)}};
  if (contour_resolution > 0) j["contour"] = contour_json(contour_data(fit, contour_resolution));
  return j;
}

Json augbin_fit_json(const AugBinFit &fit) {
  Json params = Json::array();
  for (std::size_t p = 0; p < fit.draws.dimension(); ++p) {
    const auto col = fit.draws.column(p);
    params.push_back({{"name", fit.draws.names()[p]},
                      {"mean", fit.draws.mean(p)},
                      {"q2.5", stats::quantile(col, 0.025)},
                      {"q50", stats::quantile(col, 0.5)},
                      {"q97.5", stats::quantile(col, 0.975)}});
  }
  return {{"design", "augbin"},
          {"model", "2t-1a"},
          {"priors", augbin_priors_json(fit.priors)},
          {"num_patients", fit.data.size()},
          {"parameters", params},
          {"seed", fit.draws.seed()},
          {"diagnostics", diagnostics_json(fit.draws)}};
}

Json predictions_json(const std::vector<SuccessPrediction> &preds, bool include_draws) {
  Json out = Json::array();
  for (const auto &p : preds) {
    Json j{{"id", p.id},       {"z0", p.z0},       {"z1", p.z1},
           {"prob_success", p.prob_success}, {"lower", p.lower}, {"upper", p.upper},
           {"ci_width", p.ci_width}};
    if (include_draws) j["prob_success_samp"] = p.draws;
    out.push_back(std::move(j));
  }
  return out;
}

Json binary_estimate_json(const BinaryEstimate &e) {
  return {{"method", e.method}, {"x", e.x}, {"n", e.n}, {"mean", e.mean},
          {"lower", e.lower}, {"upper", e.upper}, {"ci_width", e.ci_width}};
}

Json prior_predictive_json(const std::vector<PriorPredictiveRow> &rows) {
  Json out = Json::array();
  for (const auto &r : rows)
    out.push_back({{"id", r.id}, {"z0", r.z0}, {"y0", r.y0}, {"y1", r.y1}, {"y2", r.y2},
                   {"prob_d1", r.prob_d1}, {"prob_d2", r.prob_d2}, {"d1", r.d1}, {"d2", r.d2}});
  return out;
}

Json snapshot_json(const FitSnapshot &s) {
  Json j{{"prob_tox", s.prob_tox},
         {"model_recommendation", dose_choice_json(s.model_recommendation)},
         {"entropy", s.entropy},
         {"num_patients", s.num_patients}};
  if (!s.prob_mtd.empty()) j["prob_mtd"] = s.prob_mtd;
  if (!s.prob_eff.empty()) {
    j["prob_eff"] = s.prob_eff;
    j["utility"] = s.utility;
    Json acc = Json::array();
    for (bool a : s.acceptable) acc.push_back(a);
    j["acceptable"] = acc;
    j["prob_obd"] = s.prob_obd;
  }
  return j;
}

Json pathway_json(const PathwayTree &tree) {
  Json nodes = Json::array();
  for (const auto &n : tree.nodes) {
    Json j{{"node", n.id},
           {"parent", n.parent ? Json(*n.parent) : Json(nullptr)},
           {"depth", n.depth},
           {"outcomes", n.outcomes},
           {"dose_given", n.dose_given ? Json(*n.dose_given) : Json(nullptr)},
           {"next_dose", n.next_dose ? Json(*n.next_dose) : Json(nullptr)},
           {"history", n.history},
           {"seed", n.seed},
           {"color", dose_color(n.next_dose)},
           {"fit", snapshot_json(n.fit)}};
    if (n.parent) {
      const auto &parent = tree.node(*n.parent).fit;
      const auto &mine = n.fit;
      const auto &child_prob = tree.design == Design::crm ? mine.prob_mtd : mine.prob_obd;
      const auto &parent_prob = tree.design == Design::crm ? parent.prob_mtd : parent.prob_obd;
      std::vector<double> delta(child_prob.size());
      for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = child_prob[k] - parent_prob[k];
      j[tree.design == Design::crm ? "prob_mtd_delta" : "prob_obd_delta"] = delta;
    }
    nodes.push_back(std::move(j));
  }
  Json wide = Json::array();
  for (const auto &row : spread_paths(tree)) {
    Json r = Json::object();
    for (std::size_t d = 0; d < row.outcomes.size(); ++d) {
      r["outcomes" + std::to_string(d)] = row.outcomes[d];
      r["next_dose" + std::to_string(d)] = row.next_dose[d] ? Json(*row.next_dose[d]) : Json(nullptr);
    }
    wide.push_back(std::move(r));
  }
  return {{"design", to_string(tree.design)},
          {"cohort_sizes", tree.cohort_sizes},
          {"num_nodes", tree.nodes.size()},
          {"num_paths", wide.size()},
          {"nodes", nodes},
          {"paths", wide}};
}

std::string crm_fit_text(const CrmFit &fit) {
  std::vector<std::vector<std::string>> patients{{"Patient", "Dose", "Toxicity", "Weight"}};
  for (const auto &r : fit.data.records())
    patients.push_back({std::to_string(r.patient), std::to_string(r.dose_level), has_toxicity(r.event) ? "1" : "0",
                        fmt("%.4g", r.weight)});
  std::vector<std::vector<std::string>> doses{{"Dose", "Skeleton", "N", "Tox", "ProbTox", "MedianProbTox", "ProbMTD"}};
  for (int k = 1; k <= fit.num_doses(); ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    doses.push_back({std::to_string(k), fmt("%.4g", fit.spec.skeleton[i]), std::to_string(fit.num_patients[i]),
                     std::to_string(fit.num_tox[i]), fmt("%.4f", fit.prob_tox_mean[i]),
                     fmt("%.5f", fit.prob_tox_median[i]), fmt("%.3f", fit.prob_mtd[i])});
  }
  std::string out;
  if (!fit.data.empty()) out += table(patients) + "\n";
  out += table(doses) + "\n";
  out += "Target toxicity level: " + fmt("%.4g", fit.spec.target) + "\n";
  out += "Dose with ProbTox closest to target: " + std::to_string(fit.recommended_dose) + "\n";
  out += "Most likely MTD: " + std::to_string(fit.most_likely_mtd) + "\n";
  out += "Model entropy: " + fmt("%.2f", fit.entropy) + "\n";
  return out;
}

std::string efftox_fit_text(const EffToxFit &fit) {
  std::vector<std::vector<std::string>> patients{{"Patient", "Dose", "Toxicity", "Efficacy"}};
  for (const auto &r : fit.data.records())
    patients.push_back({std::to_string(r.patient), std::to_string(r.dose_level), has_toxicity(r.event) ? "1" : "0",
                        has_efficacy(r.event) ? "1" : "0"});
  std::vector<std::vector<std::string>> doses{
      {"Dose", "N", "ProbEff", "ProbTox", "ProbAccEff", "ProbAccTox", "Utility", "Acceptable", "ProbOBD"}};
  for (int k = 1; k <= fit.num_doses(); ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    doses.push_back({std::to_string(k), std::to_string(fit.num_patients[i]), fmt("%.4f", fit.prob_eff_mean[i]),
                     fmt("%.5f", fit.prob_tox_mean[i]), fmt("%.3f", fit.prob_acc_eff[i]),
                     fmt("%.3f", fit.prob_acc_tox[i]), fmt("%.3f", fit.utility[i]),
                     fit.acceptable[i] ? "TRUE" : "FALSE", fmt("%.4f", fit.prob_obd[i])});
  }
  std::string out;
  if (!fit.data.empty()) out += table(patients) + "\n";
  out += table(doses) + "\n";
  out += fit.recommended_dose ? "Recommended dose: " + std::to_string(*fit.recommended_dose) + "\n"
                              : std::string("Recommended dose: stop (no acceptable dose)\n");
  out += "Most likely OBD: " + std::to_string(fit.most_likely_obd) + "\n";
  out += "Model entropy: " + fmt("%.2f", fit.entropy) + "\n";
  return out;
}

std::string predictions_text(const std::vector<SuccessPrediction> &preds) {
  std::vector<std::vector<std::string>> rows{{"id", "z0", "z1", "prob_success", "lower", "upper", "ci_width"}};
  for (const auto &p : preds)
    rows.push_back({std::to_string(p.id), fmt("%.3g", p.z0), fmt("%.3g", p.z1), fmt("%.3f", p.prob_success),
                    fmt("%.3f", p.lower), fmt("%.3f", p.upper), fmt("%.3f", p.ci_width)});
  return table(rows);
}

std::string binary_estimate_text(const BinaryEstimate &e) {
  return table({{"method", "x", "n", "mean", "lower", "upper", "ci_width"},
                {e.method, std::to_string(e.x), std::to_string(e.n), fmt("%.4g", e.mean), fmt("%.7g", e.lower),
                 fmt("%.7g", e.upper), fmt("%.7g", e.ci_width)}});
}

std::string predictions_csv(const std::vector<SuccessPrediction> &preds) {
  std::string out = "id,z0,z1,prob_success,lower,upper,ci_width\n";
  char buf[256];
  for (const auto &p : preds) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.id, p.z0, p.z1, p.prob_success,
                  p.lower, p.upper, p.ci_width);
    out += buf;
  }
  return out;
}

std::string prior_predictive_csv(const std::vector<PriorPredictiveRow> &rows) {
  std::string out = "id,z0,y0,y1,y2,prob_d1,prob_d2,d1,d2\n";
  char buf[256];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.id, r.z0, r.y0, r.y1, r.y2,
                  r.prob_d1, r.prob_d2, r.d1, r.d2);
    out += buf;
  }
  return out;
}

}  // namespace dosefind
