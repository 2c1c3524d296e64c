// SPDX-License-Identifier: Apache-2.0
#include "blr/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace blr {

const char* family_name(Family f) { return f == Family::Gaussian ? "gaussian" : "binomial"; }

Family parse_family(std::string_view s) {
  if (s == "gaussian") return Family::Gaussian;
  if (s == "binomial") return Family::Binomial;
  throw std::invalid_argument("unknown family '" + std::string(s) + "' (expected gaussian or binomial)");
}

void Dataset::validate() const {
  if (n < 2) throw std::invalid_argument("dataset needs at least 2 observations");
  if (x.size() != m) throw std::invalid_argument("dataset: column count does not match m");
  if (y.size() != n) throw std::invalid_argument("dataset: response length does not match n");
  if (!names.empty() && names.size() != m) throw std::invalid_argument("dataset: names do not match m");
  for (const auto& c : x)
    if (c.size() != n) throw std::invalid_argument("dataset: covariate column length does not match n");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) throw std::invalid_argument("dataset: non-finite response at row " + std::to_string(i + 1));
    if (family == Family::Binomial && y[i] != 0.0 && y[i] != 1.0)
      throw std::invalid_argument("dataset: binomial response must be 0 or 1 (row " + std::to_string(i + 1) + ")");
  }
}

std::vector<std::uint8_t> Dataset::row(std::size_t i) const {
  std::vector<std::uint8_t> r(m);
  for (std::size_t j = 0; j < m; ++j) r[j] = x[j].get(i) ? 1 : 0;
  return r;
}

}  // namespace blr
