// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "blr/likelihood.hpp"

namespace blr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}
}  // namespace

void RobustGConfig::validate() const {
  if (nodes < 16) throw std::invalid_argument("robust g: at least 16 quadrature nodes are required");
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("robust g: a and b must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("robust g: kappa must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("robust g: epsilon must lie in (0, 1)");
}

const Quadrature& gauss_legendre_unit(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, Quadrature> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n == 0) throw std::invalid_argument("gauss_legendre_unit: n must be positive");

  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = nn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] to [0, 1].
    q.nodes[i] = 0.5 * (1.0 - x);
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[i] = q.weights[n - 1 - i] = 0.5 * w;
  }
  return cache.emplace(n, std::move(q)).first->second;
}

double log_tcch_kernel(double u, double v, const RobustGConfig& cfg) {
  double lk = (cfg.a / 2.0 - 1.0) * std::log(u) - cfg.s * u / 2.0;
  if (cfg.b != 2.0) lk += (cfg.b / 2.0 - 1.0) * std::log1p(-v * u);
  if (cfg.r != 0.0) lk -= cfg.r * std::log(cfg.kappa + (1.0 - cfg.kappa) * v * u);
  return lk;
}

double GIntegrand::log_bf(double g) const {
  if (family == Family::Gaussian)
    return 0.5 * (n - 1.0 - p) * std::log1p(g) - 0.5 * (n - 1.0) * std::log1p(g * (1.0 - r2));
  return laplace_offset - 0.5 * p * std::log1p(g) - wald / (2.0 * (1.0 + g));
}

GIntegrand robust_g_integrand(const Design& design, std::span<const double> y, Family family, const GlmFit& fit) {
  const Design null_design{design.n, {}};
  const GlmFit null_fit = fit_glm(null_design, y, family);
  const std::size_t p = design.columns.size();
  GIntegrand gi;
  gi.family = family;
  gi.n = static_cast<double>(design.n);
  gi.p = static_cast<double>(p);
  if (family == Family::Gaussian) {
    gi.r2 = null_fit.dispersion > 0.0 ? 1.0 - fit.dispersion / null_fit.dispersion : 0.0;
    return gi;
  }
  // Wald statistic for the slopes: beta' (H_bb - h_b0 h_0b / H_00) beta.
  const std::size_t c = design.cols();
  const auto& h = fit.information;
  const double h00 = h[0];
  double wald = 0.0;
  for (std::size_t a = 1; a < c; ++a)
    for (std::size_t b = 1; b < c; ++b) {
      const double s = h[a * c + b] - h[a * c] * h[b] / h00;
      wald += fit.coef[a] * s * fit.coef[b];
    }
  gi.wald = wald;
  gi.laplace_offset = (fit.loglik - 0.5 * std::log(h00)) - (null_fit.loglik - 0.5 * std::log(null_fit.information[0]));
  return gi;
}

double log_marglik_robust_g(const Design& design, std::span<const double> y, Family family, const RobustGConfig& cfg) {
  cfg.validate();
  const Design null_design{design.n, {}};
  const GlmFit null_fit = fit_glm(null_design, y, family);
  if (!std::isfinite(null_fit.loglik)) return kNegInf;
  const std::size_t p = design.columns.size();
  if (p == 0) return null_fit.loglik;

  const GlmFit fit = fit_glm(design, y, family);
  if (fit.rank_deficient(design.cols()) || !std::isfinite(fit.loglik)) return kNegInf;
  const GIntegrand gi = robust_g_integrand(design, y, family, fit);

  // u = 1/(1+g) lives on (0, 1/v). Substituting u = t^2 / v keeps the
  // integrand smooth near u = 0 where the kernel has an integrable singularity.
  const double v = (static_cast<double>(design.n) + 1.0) / (static_cast<double>(p) + 1.0);
  const Quadrature& q = gauss_legendre_unit(cfg.nodes);
  std::vector<double> num, den;
  num.reserve(cfg.nodes);
  den.reserve(cfg.nodes);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double t = cfg.epsilon + (1.0 - cfg.epsilon) * q.nodes[i];
    const double w = (1.0 - cfg.epsilon) * q.weights[i];
    const double u = t * t / v;
    const double g = 1.0 / u - 1.0;
    const double lk = std::log(w) + log_tcch_kernel(u, v, cfg) + std::log(2.0 * t / v);
    den.push_back(lk);
    num.push_back(lk + gi.log_bf(g));
  }
  const double result = null_fit.loglik + logsumexp(num) - logsumexp(den);
  return std::isfinite(result) ? result : kNegInf;
}

}  // namespace blr
