#pragma once

#include "ncvcox/cox_model.hpp"
#include "ncvcox/cross_validation.hpp"
#include "ncvcox/nested_cv.hpp"
#include "ncvcox/simulation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ncvcox {

// Doubles are written in shortest round-trip form; NaN becomes null.

nlohmann::json to_json(const CvEstimate& estimate);
nlohmann::json to_json(const NcvEstimate& estimate, bool include_trace = false);
nlohmann::json to_json(const SplitRecord& record);
nlohmann::json to_json(const CoverageReport& report, bool include_trials = true);
nlohmann::json to_json(const CoxFit& fit);

/// One JSON object per line, one line per split.
std::string ncv_trace_jsonl(const NcvEstimate& estimate);

/// Header plus one row per lambda: lambda, log_lambda, nonzero, log_pl, converged, iterations, coefficients.
std::string fit_path_csv(const CoxFit& fit, const std::vector<std::string>& feature_names);

/// One row with point estimates, mean SEs and upper/lower miscoverage per method.
std::string coverage_summary_csv(const CoverageReport& report);
std::string coverage_trials_csv(const CoverageReport& report);

std::string fig2_csv(const std::vector<Fig2Row>& rows);

std::string format_double(double value);

}  // namespace ncvcox
