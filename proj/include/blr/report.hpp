// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON and CSV renderings of analysis, benchmark and sweep results.

#include <json.hpp>
#include <string>
#include <vector>

#include "blr/gmjmcmc.hpp"
#include "blr/simbench.hpp"

namespace blr {

nlohmann::json config_json(const GmjmcmcConfig& cfg);

struct AnalysisInfo {
  std::string input;
  std::string response;
  Family family = Family::Gaussian;
  double threshold = 0.5;
  std::size_t n = 0;
  std::vector<std::string> names;
  std::vector<std::string> warnings;
};

nlohmann::json population_json(const PopulationSnapshot& snap);

/// detections.json for `analyze`.
nlohmann::json analysis_json(const AnalysisInfo& info, const GmjmcmcConfig& cfg, const std::vector<ChainSummary>& chains,
                             const Aggregate& agg, const std::vector<Detection>& detections);
/// tree,probability rows.
std::string detections_csv(const std::vector<Detection>& detections);

nlohmann::json report_json(const DetectionReport& rep, const Scenario& s);
/// metrics.json for `bench`.
nlohmann::json bench_json(const BenchOptions& opts, const BenchResult& res);

/// value,replicates,hits,power rows.
std::string curve_csv(SweepAxis axis, const std::vector<SweepPoint>& points);

nlohmann::json scenarios_json();

/// Writes `content` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace blr
