// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blr/bit_column.hpp"

namespace blr {

enum class Family { Gaussian, Binomial };

const char* family_name(Family f);
/// "gaussian" | "binomial"; throws std::invalid_argument otherwise.
Family parse_family(std::string_view s);

/// n observations of m binary covariates (stored column-wise) and a response.
struct Dataset {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<BitColumn> x;
  std::vector<double> y;
  Family family = Family::Gaussian;
  /// Optional covariate names, same order as x.
  std::vector<std::string> names;

  /// Throws std::invalid_argument on inconsistent shapes, n < 2, or a
  /// binomial response outside {0, 1}.
  void validate() const;
  std::vector<std::uint8_t> row(std::size_t i) const;
};

}  // namespace blr
