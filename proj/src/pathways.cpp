#include "dosefind/pathways.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <json.hpp>

#include "dosefind/errors.hpp"
#include "dosefind/stats.hpp"

namespace dosefind {

namespace {

std::string_view letters(Alphabet a) { return a == Alphabet::binary ? "NT" : "BENT"; }

void multisets(std::string_view alphabet, int remaining, std::size_t from, std::string &prefix,
               std::vector<std::string> &out) {
  if (remaining == 0) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t i = from; i < alphabet.size(); ++i) {
    prefix.push_back(alphabet[i]);
    multisets(alphabet, remaining - 1, i, prefix, out);
    prefix.pop_back();
  }
}

std::string dose_text(DoseChoice d) { return d ? std::to_string(*d) : "NA"; }

template <class Fit, class Policy, class FitFn>
PathwayTree build_tree(Design design, Alphabet alphabet, const OutcomeSequence &previous, const DtpOptions &options,
                       int num_doses, const Policy &policy, const FitFn &fit_fn) {
  if (options.cohort_sizes.empty()) throw ValidationError("cohort_sizes must not be empty", "cohort_sizes");
  for (int n : options.cohort_sizes)
    if (n < 1) throw ValidationError("cohort sizes must be positive", "cohort_sizes");
  if (options.next_dose && (*options.next_dose < 1 || *options.next_dose > num_doses))
    throw ValidationError("next_dose must be a dose-level of the design", "next_dose");
  options.sampler.validate();

  std::vector<std::vector<std::string>> cohort_outcomes;
  for (int n : options.cohort_sizes) cohort_outcomes.push_back(enumerate_cohort_outcomes(n, alphabet));

  PathwayTree tree;
  tree.design = design;
  tree.cohort_sizes = options.cohort_sizes;

  auto expand = [&](auto &self, const OutcomeSequence &data, std::optional<int> parent, int depth,
                    const std::string &outcomes, DoseChoice dose_given, const std::string &path) -> void {
    SamplerConfig sampler = options.sampler;
    sampler.seed = node_seed(options.sampler.seed, path);
    PathwayNode node;
    node.id = static_cast<int>(tree.nodes.size()) + 1;
    node.parent = parent;
    node.depth = depth;
    node.outcomes = outcomes;
    node.dose_given = dose_given;
    node.history = data.all_unit_weight() ? serialize_outcomes(data) : std::string();
    node.seed = sampler.seed;
    try {
      const Fit fit = fit_fn(data, sampler);
      node.fit = snapshot(fit);
      node.next_dose = (depth == 0 && options.next_dose) ? options.next_dose : policy(fit);
    } catch (const ValidationError &e) {
      throw ValidationError("pathway '" + path + "': " + e.what(), e.field());
    } catch (const SamplerError &e) {
      throw SamplerError("pathway '" + path + "': " + e.what());
    }
    if (node.next_dose && (*node.next_dose < 1 || *node.next_dose > num_doses))
      throw ValidationError("pathway '" + path + "': dose policy returned level " + std::to_string(*node.next_dose) +
                                " outside the design",
                            "policy");
    const int id = node.id;
    const DoseChoice next = node.next_dose;
    tree.nodes.push_back(std::move(node));
    if (!next || depth >= static_cast<int>(cohort_outcomes.size())) return;
    for (const auto &cohort : cohort_outcomes[static_cast<std::size_t>(depth)]) {
      OutcomeSequence child = data;
      child.append_cohort(*next, cohort);
      self(self, child, id, depth + 1, cohort, next, path.empty() ? cohort : path + "/" + cohort);
    }
  };
  expand(expand, previous, std::nullopt, 0, "", std::nullopt, "");
  return tree;
}

}  // namespace

std::string_view to_string(Design d) noexcept { return d == Design::crm ? "crm" : "efftox"; }

std::vector<std::string> enumerate_cohort_outcomes(int cohort_size, Alphabet alphabet) {
  if (cohort_size < 1) throw ValidationError("cohort size must be at least 1", "cohort_sizes");
  std::vector<std::string> out;
  std::string prefix;
  multisets(letters(alphabet), cohort_size, 0, prefix, out);
  return out;
}

std::size_t cohort_outcome_count(int cohort_size, Alphabet alphabet) {
  const auto m = letters(alphabet).size();
  // C(n + m - 1, m - 1), computed incrementally to stay exact.
  std::size_t c = 1;
  for (std::size_t k = 1; k < m; ++k) c = c * (static_cast<std::size_t>(cohort_size) + k) / k;
  return c;
}

std::size_t dtp_node_count(const std::vector<int> &cohort_sizes, Alphabet alphabet) {
  std::size_t total = 1;
  std::size_t level = 1;
  for (int n : cohort_sizes) {
    level *= cohort_outcome_count(n, alphabet);
    total += level;
  }
  return total;
}

namespace {

void add_diagnostics(FitSnapshot &s, const PosteriorDraws &draws) {
  const auto &d = draws.diagnostics();
  if (d.empty()) {
    s.max_split_rhat = s.min_ess = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  s.max_split_rhat = d.front().split_rhat;
  s.min_ess = d.front().ess;
  for (const auto &p : d) {
    if (std::isnan(p.split_rhat) || p.split_rhat > s.max_split_rhat) s.max_split_rhat = p.split_rhat;
    s.min_ess = std::min(s.min_ess, p.ess);
  }
}

}  // namespace

FitSnapshot snapshot(const CrmFit &fit) {
  FitSnapshot s;
  s.prob_tox = fit.prob_tox_mean;
  s.prob_mtd = fit.prob_mtd;
  s.model_recommendation = fit.recommended_dose;
  s.entropy = fit.entropy;
  s.num_patients = static_cast<int>(fit.data.size());
  add_diagnostics(s, fit.draws);
  return s;
}

FitSnapshot snapshot(const EffToxFit &fit) {
  FitSnapshot s;
  s.prob_tox = fit.prob_tox_mean;
  s.prob_eff = fit.prob_eff_mean;
  s.utility = fit.utility;
  s.acceptable = fit.acceptable;
  s.prob_obd = fit.prob_obd;
  s.model_recommendation = fit.recommended_dose;
  s.entropy = fit.entropy;
  s.num_patients = static_cast<int>(fit.data.size());
  add_diagnostics(s, fit.draws);
  return s;
}

std::vector<int> PathwayTree::children(int id) const {
  std::vector<int> out;
  for (const auto &n : nodes)
    if (n.parent == id) out.push_back(n.id);
  return out;
}

std::size_t PathwayTree::leaf_count() const {
  std::size_t leaves = 0;
  for (const auto &n : nodes) leaves += children(n.id).empty();
  return leaves;
}

std::uint64_t node_seed(std::uint64_t base, std::string_view path) {
  return path.empty() ? base : stats::derive_seed(base, path);
}

DoseChoice crm_default_policy(const CrmFit &fit) { return fit.recommended_dose; }

DoseChoice efftox_default_policy(const EffToxFit &fit) { return fit.recommended_dose; }

DoseChoice careful_escalation(const CrmFit &fit, double tox_threshold, double certainty_threshold,
                              int reference_dose) {
  if (reference_dose < 1 || reference_dose > fit.num_doses())
    throw ValidationError("reference_dose must be a dose-level of the design", "reference_dose");
  const std::size_t S = fit.draws.size();
  std::size_t too_toxic = 0;
  for (std::size_t s = 0; s < S; ++s) too_toxic += fit.prob_tox(s, reference_dose) > tox_threshold;
  if (static_cast<double>(too_toxic) / static_cast<double>(S) > certainty_threshold) return std::nullopt;
  if (fit.data.empty()) return 1;
  return std::min(fit.recommended_dose, fit.data.max_dose_level() + 1);
}

PathwayTree crm_dtps(const CrmSpec &spec, const OutcomeSequence &previous, const DtpOptions &options,
                     const CrmPolicy &policy) {
  spec.validate();
  return build_tree<CrmFit>(Design::crm, Alphabet::binary, previous, options, spec.num_doses(), policy,
                            [&](const OutcomeSequence &data, const SamplerConfig &s) { return fit_crm(spec, data, s); });
}

PathwayTree efftox_dtps(const EffToxSpec &spec, const OutcomeSequence &previous, const DtpOptions &options,
                        const EffToxPolicy &policy) {
  spec.validate();
  return build_tree<EffToxFit>(
      Design::efftox, Alphabet::quaternary, previous, options, spec.num_doses(), policy,
      [&](const OutcomeSequence &data, const SamplerConfig &s) { return fit_efftox(spec, data, s); });
}

std::vector<WidePath> spread_paths(const PathwayTree &tree) {
  std::vector<WidePath> rows;
  for (const auto &n : tree.nodes) {
    if (!tree.children(n.id).empty()) continue;
    WidePath row;
    for (const PathwayNode *p = &n;; p = &tree.node(*p->parent)) {
      row.outcomes.insert(row.outcomes.begin(), p->outcomes);
      row.next_dose.insert(row.next_dose.begin(), p->next_dose);
      if (!p->parent) break;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string wide_csv(const PathwayTree &tree) {
  const auto rows = spread_paths(tree);
  std::size_t depth = 0;
  for (const auto &r : rows) depth = std::max(depth, r.outcomes.size());
  std::string out;
  for (std::size_t d = 0; d < depth; ++d) {
    if (d) out += ',';
    out += "outcomes" + std::to_string(d) + ",next_dose" + std::to_string(d);
  }
  out += '\n';
  for (const auto &r : rows) {
    for (std::size_t d = 0; d < depth; ++d) {
      if (d) out += ',';
      if (d < r.outcomes.size()) out += r.outcomes[d] + "," + dose_text(r.next_dose[d]);
      else out += ",";
    }
    out += '\n';
  }
  return out;
}

std::string long_csv(const PathwayTree &tree) {
  std::string out = "node,parent,depth,outcomes,dose_given,next_dose\n";
  for (const auto &n : tree.nodes) {
    out += std::to_string(n.id) + "," + (n.parent ? std::to_string(*n.parent) : "NA") + "," +
           std::to_string(n.depth) + "," + n.outcomes + "," + (n.dose_given ? std::to_string(*n.dose_given) : "NA") +
           "," + dose_text(n.next_dose) + "\n";
  }
  return out;
}

GraphFormat graph_format_from_string(std::string_view name) {
  if (name == "dot") return GraphFormat::dot;
  if (name == "json") return GraphFormat::json;
  throw ValidationError("unsupported graph format '" + std::string(name) + "' (expected dot or json)", "format");
}

std::string_view dose_color(DoseChoice dose) noexcept {
  if (!dose) return "red";
  switch (*dose) {
    case 1:
      return "slategrey";
    case 2:
      return "skyblue1";
    case 3:
      return "royalblue1";
    case 4:
      return "orchid4";
    case 5:
      return "royalblue4";
    default:
      return "gray50";
  }
}

std::string export_graph(const PathwayTree &tree, GraphFormat format) {
  auto label = [](DoseChoice d) { return d ? std::to_string(*d) : std::string("Stop"); };
  if (format == GraphFormat::dot) {
    std::string out = "digraph dtp {\n  node [shape=circle, style=filled, fontcolor=white];\n";
    for (const auto &n : tree.nodes)
      out += "  n" + std::to_string(n.id) + " [label=\"" + label(n.next_dose) + "\", fillcolor=\"" +
             std::string(dose_color(n.next_dose)) + "\"];\n";
    for (const auto &n : tree.nodes)
      if (n.parent)
        out += "  n" + std::to_string(*n.parent) + " -> n" + std::to_string(n.id) + " [label=\"" + n.outcomes +
               "\"];\n";
    out += "}\n";
    return out;
  }
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto &n : tree.nodes) {
    nodes.push_back({{"id", n.id},
                     {"label", label(n.next_dose)},
                     {"shape", "circle"},
                     {"fillcolor", dose_color(n.next_dose)},
                     {"depth", n.depth},
                     {"outcomes", n.outcomes},
                     {"next_dose", n.next_dose ? nlohmann::json(*n.next_dose) : nlohmann::json(nullptr)}});
    if (n.parent) edges.push_back({{"from", *n.parent}, {"to", n.id}, {"label", n.outcomes}, {"rel", "leading_to"}});
  }
  return nlohmann::json{{"design", to_string(tree.design)}, {"nodes", nodes}, {"edges", edges}}.dump();
}

std::vector<LongRow> long_rows(const PathwayTree &tree) {
  std::vector<LongRow> rows;
  for (const auto &n : tree.nodes) rows.push_back({n.id, n.parent, n.depth, n.outcomes, n.next_dose});
  return rows;
}

std::vector<LongRow> long_rows_from_graph_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ValidationError(std::string("graph JSON is malformed: ") + e.what(), "graph");
  }
  std::vector<LongRow> rows;
  for (const auto &n : j.at("nodes")) {
    LongRow r;
    r.node = n.at("id").get<int>();
    r.depth = n.at("depth").get<int>();
    r.outcomes = n.at("outcomes").get<std::string>();
    if (!n.at("next_dose").is_null()) r.next_dose = n.at("next_dose").get<int>();
    rows.push_back(std::move(r));
  }
  for (const auto &e : j.at("edges")) {
    const int to = e.at("to").get<int>();
    for (auto &r : rows)
      if (r.node == to) r.parent = e.at("from").get<int>();
  }
  return rows;
}

}  // namespace dosefind
