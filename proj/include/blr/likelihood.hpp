// SPDX-License-Identifier: Apache-2.0
#pragma once

// GLM fits on logic-regression designs and the two marginal likelihoods
// (Jeffreys/BIC form and robust g-prior).

#include <cstddef>
#include <span>
#include <vector>

#include "blr/bit_column.hpp"
#include "blr/dataset.hpp"
#include "blr/model_space.hpp"

namespace blr {

/// Design matrix of a logic-regression model: an implicit intercept column
/// followed by one binary column per included tree.
struct Design {
  std::size_t n = 0;
  std::vector<BitColumn> columns;

  std::size_t cols() const { return columns.size() + 1; }
  /// Row-major n x cols() matrix of 0/1 values with a leading ones column.
  std::vector<double> dense() const;
  /// True if some tree column is all 0 or all 1 (collinear with the intercept).
  bool has_constant_column() const;
};

Design design_matrix(const ModelIndex& model, std::span<const BitColumn> tree_columns, std::size_t n);
Design design_matrix(const ModelIndex& model, const Population& pop, const Dataset& data);

struct GlmFit {
  /// Intercept first, then one coefficient per design column. Columns that
  /// are linearly dependent on earlier ones get 0.
  std::vector<double> coef;
  double loglik = 0.0;
  /// Gaussian: RSS/n. Binomial: 1.
  double dispersion = 1.0;
  int iterations = 0;
  bool converged = false;
  std::size_t rank = 0;
  /// Observed information at the estimate over all cols() coefficients,
  /// row-major (Gaussian: X'X / dispersion, binomial: X'WX).
  std::vector<double> information;

  bool rank_deficient(std::size_t cols) const { return rank < cols; }
};

struct IrlsOptions {
  int max_iterations = 50;
  double score_tolerance = 1e-8;
  double eta_clamp = 30.0;
  /// A stationary fit with some |eta| at or above this is reported as
  /// separated (converged = false).
  double separation_eta = 15.0;
};

/// Gaussian: least squares, loglik = -(n/2)(log(2 pi RSS/n) + 1).
/// Binomial: Newton/IRLS on the logit link until the largest score component
/// is below the tolerance or the iteration cap is hit (converged = false).
/// Separated data drive the predictor towards infinity; the fit then stops
/// with converged = false and the log-likelihood at the last iterate.
/// Dependent columns are dropped (rank < cols) and the fit proceeds on the
/// remaining ones.
GlmFit fit_glm(const Design& design, std::span<const double> y, Family family, const IrlsOptions& opts = {});

/// Log-likelihood of the data at given coefficients (intercept first).
double glm_loglik(const Design& design, std::span<const double> y, Family family, std::span<const double> coef,
                  double dispersion = 1.0);

/// loglik - (|M|/2) log n. -inf for rank-deficient designs or a non-finite
/// log-likelihood.
double log_marglik_jeffreys(const GlmFit& fit, std::size_t n, std::size_t model_size);

/// Mixture-of-g prior: u = 1/(1+g) ~ tCCH(a/2, b/2, r, s/2, v, kappa) with
/// v = (n+1)/(|M|+1). Defaults are the robust choice.
struct RobustGConfig {
  double a = 1.0;
  double b = 2.0;
  double r = 1.5;
  double s = 0.0;
  double kappa = 1.0;
  std::size_t nodes = 64;
  double epsilon = 1e-10;

  void validate() const;
};

/// Log marginal likelihood under the mixture-of-g prior, on the same scale as
/// the Jeffreys score of the intercept-only model (the two agree exactly for
/// |M| = 0). The g integral is a Gauss-Legendre quadrature over the tCCH
/// support; the fixed-g marginal is exact for Gaussian responses and a
/// Laplace approximation for binomial ones. -inf for rank-deficient designs.
double log_marglik_robust_g(const Design& design, std::span<const double> y, Family family,
                            const RobustGConfig& cfg = {});

/// Log integrand of the robust-g integral at one value of g: log BF(M : null | g)
/// (exposed for quadrature oracles in tests). `r2` is used for Gaussian,
/// `wald` and `laplace_offset` for binomial.
struct GIntegrand {
  Family family = Family::Gaussian;
  double n = 0.0;
  double p = 0.0;
  double r2 = 0.0;
  double wald = 0.0;
  double laplace_offset = 0.0;

  double log_bf(double g) const;
};

/// Builds the integrand for a full-rank model with at least one tree.
GIntegrand robust_g_integrand(const Design& design, std::span<const double> y, Family family, const GlmFit& fit);

/// Log of the unnormalized tCCH kernel in u.
double log_tcch_kernel(double u, double v, const RobustGConfig& cfg);

/// Gauss-Legendre nodes/weights on (0, 1).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_legendre_unit(std::size_t n);

}  // namespace blr
