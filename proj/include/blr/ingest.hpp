// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blr/dataset.hpp"

namespace blr {

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestResult {
  Dataset data;
  /// Human-readable notes, one per dropped duplicate column.
  std::vector<std::string> warnings;
};

/// Reads a comma-separated table with a header row. Every column except
/// `response` is a 0/1 covariate. Covariate columns identical to an earlier
/// one are dropped with a warning. Missing cells ("", "NA", "NaN"),
/// non-binary covariates, a non-numeric response or ragged rows raise
/// IngestError naming the offending line and column.
IngestResult ingest_csv(std::istream& in, const std::string& response, Family family);
IngestResult ingest_file(const std::string& path, const std::string& response, Family family);

}  // namespace blr
