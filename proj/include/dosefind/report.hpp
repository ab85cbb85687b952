#pragma once

// JSON, CSV and plain-text renderings of fits, predictions and pathways.
// Table column names follow the printed layouts trialists already know
// (Patient/Dose/Toxicity/Weight, Dose/Skeleton/N/Tox/ProbTox/...).

#include <string>
#include <vector>

#include <json.hpp>

#include "dosefind/augbin.hpp"
#include "dosefind/crm.hpp"
#include "dosefind/efftox.hpp"
#include "dosefind/pathways.hpp"

namespace dosefind {

using Json = nlohmann::json;

[[nodiscard]] Json diagnostics_json(const PosteriorDraws &draws);
[[nodiscard]] Json dose_choice_json(DoseChoice d);

[[nodiscard]] Json crm_spec_json(const CrmSpec &spec);
[[nodiscard]] Json efftox_spec_json(const EffToxSpec &spec);
[[nodiscard]] Json augbin_priors_json(const AugBinPriors &priors);

[[nodiscard]] Json crm_fit_json(const CrmFit &fit);
// contour_resolution 0 leaves the contour out.
[[nodiscard]] Json efftox_fit_json(const EffToxFit &fit, int contour_resolution = 0);
[[nodiscard]] Json contour_json(const ContourData &contour);
[[nodiscard]] Json augbin_fit_json(const AugBinFit &fit);
[[nodiscard]] Json predictions_json(const std::vector<SuccessPrediction> &preds, bool include_draws);
[[nodiscard]] Json binary_estimate_json(const BinaryEstimate &est);
[[nodiscard]] Json prior_predictive_json(const std::vector<PriorPredictiveRow> &rows);
[[nodiscard]] Json snapshot_json(const FitSnapshot &s);
// Long format: one object per node, plus the wide view and cohort sizes.
[[nodiscard]] Json pathway_json(const PathwayTree &tree);

[[nodiscard]] std::string crm_fit_text(const CrmFit &fit);
[[nodiscard]] std::string efftox_fit_text(const EffToxFit &fit);
[[nodiscard]] std::string predictions_text(const std::vector<SuccessPrediction> &preds);
[[nodiscard]] std::string binary_estimate_text(const BinaryEstimate &est);

[[nodiscard]] std::string predictions_csv(const std::vector<SuccessPrediction> &preds);
[[nodiscard]] std::string prior_predictive_csv(const std::vector<PriorPredictiveRow> &rows);

}  // namespace dosefind
