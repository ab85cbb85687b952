#pragma once

// Dose transition pathways: every outcome combination of the next cohorts and
// the dose decision that would follow each, built by refitting the model at
// every node.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dosefind/crm.hpp"
#include "dosefind/efftox.hpp"

namespace dosefind {

// A dose-level, or nullopt for "stop the trial".
using DoseChoice = std::optional<int>;

enum class Design { crm, efftox };
[[nodiscard]] std::string_view to_string(Design d) noexcept;

// Canonical multisets of cohort outcomes, lexicographic over the sorted
// alphabet (N < T; B < E < N < T): size 3 binary gives NNN NNT NTT TTT.
[[nodiscard]] std::vector<std::string> enumerate_cohort_outcomes(int cohort_size, Alphabet alphabet);

// C(n + m - 1, n) for an alphabet of m letters.
[[nodiscard]] std::size_t cohort_outcome_count(int cohort_size, Alphabet alphabet);

// Node count of a full tree (no stops), used to enforce fit budgets.
[[nodiscard]] std::size_t dtp_node_count(const std::vector<int> &cohort_sizes, Alphabet alphabet);

// Summary kept at each node. CRM nodes fill prob_tox/prob_mtd; EffTox nodes
// fill every per-dose vector except prob_mtd.
struct FitSnapshot {
  std::vector<double> prob_tox;
  std::vector<double> prob_eff;
  std::vector<double> utility;
  std::vector<bool> acceptable;
  std::vector<double> prob_mtd;
  std::vector<double> prob_obd;
  DoseChoice model_recommendation;
  double entropy = 0.0;
  int num_patients = 0;
  double max_split_rhat = 0.0;  // NaN when undefined
  double min_ess = 0.0;
};

[[nodiscard]] FitSnapshot snapshot(const CrmFit &fit);
[[nodiscard]] FitSnapshot snapshot(const EffToxFit &fit);

struct PathwayNode {
  int id = 1;
  std::optional<int> parent;
  int depth = 0;
  std::string outcomes;       // this node's cohort, "" at the root
  DoseChoice dose_given;      // dose the cohort was treated at; nullopt at the root
  DoseChoice next_dose;
  std::string history;        // full outcome string up to and including this node
  std::uint64_t seed = 0;
  FitSnapshot fit;
};

struct PathwayTree {
  Design design = Design::crm;
  std::vector<int> cohort_sizes;
  std::vector<PathwayNode> nodes;  // depth-first pre-order; ids are 1-based positions

  [[nodiscard]] const PathwayNode &node(int id) const { return nodes.at(static_cast<std::size_t>(id - 1)); }
  [[nodiscard]] std::vector<int> children(int id) const;
  [[nodiscard]] std::size_t leaf_count() const;
};

// Seed used to fit the node reached by `path` (cohort outcomes joined by
// '/'); the root uses the base seed itself.
[[nodiscard]] std::uint64_t node_seed(std::uint64_t base, std::string_view path);

using CrmPolicy = std::function<DoseChoice(const CrmFit &)>;
using EffToxPolicy = std::function<DoseChoice(const EffToxFit &)>;

[[nodiscard]] DoseChoice crm_default_policy(const CrmFit &fit);
[[nodiscard]] DoseChoice efftox_default_policy(const EffToxFit &fit);

// Stops if Pr(F(reference_dose) > tox_threshold | data) > certainty_threshold,
// otherwise caps the model's choice at one above the highest dose given.
// Returns dose 1 when no patient has been treated.
[[nodiscard]] DoseChoice careful_escalation(const CrmFit &fit, double tox_threshold, double certainty_threshold,
                                            int reference_dose);

struct DtpOptions {
  std::vector<int> cohort_sizes;
  std::optional<int> next_dose;  // overrides the root decision
  SamplerConfig sampler;
};

[[nodiscard]] PathwayTree crm_dtps(const CrmSpec &spec, const OutcomeSequence &previous, const DtpOptions &options,
                                   const CrmPolicy &policy = crm_default_policy);
[[nodiscard]] PathwayTree efftox_dtps(const EffToxSpec &spec, const OutcomeSequence &previous,
                                      const DtpOptions &options, const EffToxPolicy &policy = efftox_default_policy);

struct WidePath {
  std::vector<std::string> outcomes;  // outcomes0 .. outcomesD
  std::vector<DoseChoice> next_dose;
};

// One row per root-to-leaf path.
[[nodiscard]] std::vector<WidePath> spread_paths(const PathwayTree &tree);
// Columns outcomes0,next_dose0,...; a stop is written as NA and cells past a
// path's end are left empty.
[[nodiscard]] std::string wide_csv(const PathwayTree &tree);
// Columns node,parent,depth,outcomes,dose_given,next_dose.
[[nodiscard]] std::string long_csv(const PathwayTree &tree);

enum class GraphFormat { dot, json };
[[nodiscard]] GraphFormat graph_format_from_string(std::string_view name);

// Fill colour for a node: 1 slategrey, 2 skyblue1, 3 royalblue1, 4 orchid4,
// 5 royalblue4, stop red; gray50 beyond five doses.
[[nodiscard]] std::string_view dose_color(DoseChoice dose) noexcept;

[[nodiscard]] std::string export_graph(const PathwayTree &tree, GraphFormat format);

struct LongRow {
  int node = 1;
  std::optional<int> parent;
  int depth = 0;
  std::string outcomes;
  DoseChoice next_dose;

  friend bool operator==(const LongRow &, const LongRow &) = default;
};

[[nodiscard]] std::vector<LongRow> long_rows(const PathwayTree &tree);
// Reads the JSON graph back into long rows.
[[nodiscard]] std::vector<LongRow> long_rows_from_graph_json(std::string_view json);

}  // namespace dosefind
