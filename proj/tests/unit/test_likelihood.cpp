// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "blr/likelihood.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace blr;
using namespace fixture;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

TEST(Design, EmptyModelIsInterceptOnly) {
  const Design d = design_matrix(ModelIndex(0), std::span<const BitColumn>{}, 7);
  EXPECT_EQ(d.cols(), 1U);
  EXPECT_EQ(d.dense(), std::vector<double>(7, 1.0));
  EXPECT_FALSE(d.has_constant_column());
}

TEST(Design, EvaluatesTreesOnRows) {
  Dataset data;
  data.n = 2;
  data.m = 4;
  data.x = {BitColumn::from_bits(std::vector<std::uint8_t>{1, 1}), BitColumn::from_bits(std::vector<std::uint8_t>{0, 1}),
            BitColumn::from_bits(std::vector<std::uint8_t>{0, 0}), BitColumn::from_bits(std::vector<std::uint8_t>{0, 1})};
  data.y = {0.0, 1.0};
  const Population pop({parse_tree("X1 & !X4")}, 0, 0, 5);
  ModelIndex m(1);
  m.set(0, true);
  const Design d = design_matrix(m, pop, data);
  EXPECT_EQ(d.dense(), (std::vector<double>{1, 1, 1, 0}));
  EXPECT_EQ(d.dense(), dense_oracle(d));
}

TEST(Design, ConstantColumnFlagged) {
  Design d{5, {BitColumn(5)}};
  EXPECT_TRUE(d.has_constant_column());
  d.columns = {BitColumn::ones(5)};
  EXPECT_TRUE(d.has_constant_column());
  d.columns = {BitColumn::from_bits(std::vector<std::uint8_t>{1, 0, 0, 0, 0})};
  EXPECT_FALSE(d.has_constant_column());
}

TEST(FitGlm, InterceptOnlyClosedForms) {
  const std::vector<double> y{1.0, 2.0, 4.0, 5.0};
  const GlmFit g = fit_glm(Design{4, {}}, y, Family::Gaussian);
  EXPECT_NEAR(g.coef[0], 3.0, 1e-12);
  EXPECT_NEAR(g.dispersion, 10.0 / 4.0, 1e-12);
  EXPECT_NEAR(g.loglik, gaussian_loglik_oracle(10.0, 4), 1e-12);
  EXPECT_EQ(g.rank, 1U);

  const std::vector<double> b{1, 0, 0, 1, 1, 1, 0, 1};
  const GlmFit f = fit_glm(Design{8, {}}, b, Family::Binomial);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.coef[0], std::log(5.0 / 3.0), 1e-9);
  EXPECT_NEAR(f.loglik, 5 * std::log(5.0 / 8) + 3 * std::log(3.0 / 8), 1e-10);
}

TEST(FitGlm, GaussianMatchesRssClosedForm) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 20 + rng() % 300, p = rng() % 5;
    const Design d = random_design(rng, n, p);
    const auto y = gaussian_response(rng, d);
    const GlmFit fit = fit_glm(d, y, Family::Gaussian);
    if (fit.rank_deficient(d.cols())) continue;
    const double rss = oracle::rss(dense_oracle(d), n, d.cols(), y);
    const double expect = gaussian_loglik_oracle(rss, n) - 0.5 * static_cast<double>(p) * std::log(static_cast<double>(n));
    ASSERT_NEAR(log_marglik_jeffreys(fit, n, p), expect, 1e-10) << "n=" << n << " p=" << p;
    ASSERT_NEAR(fit.dispersion, rss / static_cast<double>(n), 1e-10);
    ++checked;
  }
}

TEST(FitGlm, JeffreysPenaltyExample) {
  std::mt19937_64 rng(12);
  const Design d = random_design(rng, 100, 2);
  const auto y = gaussian_response(rng, d);
  const GlmFit fit = fit_glm(d, y, Family::Gaussian);
  EXPECT_NEAR(log_marglik_jeffreys(fit, 100, 2), fit.loglik - std::log(100.0), 1e-12);
  EXPECT_DOUBLE_EQ(log_marglik_jeffreys(fit, 100, 0) - fit.loglik, 0.0);
}

TEST(FitGlm, JeffreysRankingMatchesBic) {
  std::mt19937_64 rng(13);
  const std::size_t n = 150;
  const Design full = random_design(rng, n, 4);
  const auto y = gaussian_response(rng, full);
  std::vector<std::pair<double, double>> scores;  // (ours, -BIC/2)
  for (unsigned mask = 0; mask < 16; ++mask) {
    Design d{n, {}};
    for (unsigned k = 0; k < 4; ++k)
      if ((mask >> k) & 1U) d.columns.push_back(full.columns[k]);
    const GlmFit fit = fit_glm(d, y, Family::Gaussian);
    const double rss = oracle::rss(dense_oracle(d), n, d.cols(), y);
    const double bic = -2.0 * gaussian_loglik_oracle(rss, n) + static_cast<double>(d.columns.size()) * std::log(double(n));
    scores.emplace_back(log_marglik_jeffreys(fit, n, d.columns.size()), -0.5 * bic);
  }
  for (std::size_t a = 0; a < scores.size(); ++a)
    for (std::size_t b = 0; b < scores.size(); ++b)
      EXPECT_EQ(scores[a].first < scores[b].first, scores[a].second < scores[b].second);
}

TEST(FitGlm, SmallLogisticScoreVanishes) {
  std::mt19937_64 rng(14);
  int checked = 0;
  while (checked < 20) {
    const Design d = random_design(rng, 20, 2);
    const auto y = logistic_response(rng, d);
    const GlmFit fit = fit_glm(d, y, Family::Binomial);
    if (!fit.converged || fit.rank_deficient(d.cols())) continue;
    const auto x = dense_oracle(d);
    for (std::size_t a = 0; a < d.cols(); ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < d.n; ++i) {
        double eta = 0.0;
        for (std::size_t b = 0; b < d.cols(); ++b) eta += x[i * d.cols() + b] * fit.coef[b];
        s += x[i * d.cols() + a] * (y[i] - 1.0 / (1.0 + std::exp(-eta)));
      }
      ASSERT_LT(std::abs(s), 1e-6);
    }
    ++checked;
  }
}

TEST(FitGlm, IrlsFiniteDifferenceGradient) {
  std::mt19937_64 rng(15);
  int checked = 0;
  while (checked < 50) {
    const std::size_t n = 30 + rng() % 400, p = 1 + rng() % 4;
    const Design d = random_design(rng, n, p);
    const auto y = logistic_response(rng, d);
    const GlmFit fit = fit_glm(d, y, Family::Binomial);
    if (!fit.converged || fit.rank_deficient(d.cols())) continue;
    const auto x = dense_oracle(d);
    const std::size_t q = d.cols();
    EXPECT_NEAR(fit.loglik, oracle::logistic_loglik(x, n, q, y, fit.coef), 1e-8);
    double worst = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      const double h = 1e-5;
      auto up = fit.coef, dn = fit.coef;
      up[a] += h;
      dn[a] -= h;
      const double g = (oracle::logistic_loglik(x, n, q, y, up) - oracle::logistic_loglik(x, n, q, y, dn)) / (2 * h);
      worst = std::max(worst, std::abs(g));
    }
    ASSERT_LT(worst, 1e-5) << "n=" << n << " p=" << p;
    ++checked;
  }
}

TEST(FitGlm, PerfectSeparationNotConverged) {
  const BitColumn c = BitColumn::from_bits(std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1});
  const std::vector<double> y{0, 0, 0, 1, 1, 1};
  const GlmFit fit = fit_glm(Design{6, {c}}, y, Family::Binomial);
  EXPECT_FALSE(fit.converged);
  EXPECT_LE(fit.iterations, IrlsOptions{}.max_iterations);
  EXPECT_TRUE(std::isfinite(fit.loglik));
  EXPECT_GT(fit.loglik, -1e-6);
}

TEST(FitGlm, CollinearColumnNeverIncreasesLoglik) {
  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 60;
    Design d = random_design(rng, n, 2);
    for (const Family fam : {Family::Gaussian, Family::Binomial}) {
      const auto y = fam == Family::Gaussian ? gaussian_response(rng, d) : logistic_response(rng, d);
      const GlmFit base = fit_glm(d, y, fam);
      if (!base.converged) continue;
      for (const BitColumn& extra : {d.columns[0], ~d.columns[1], BitColumn::ones(n), BitColumn(n)}) {
        Design e = d;
        e.columns.push_back(extra);
        const GlmFit f = fit_glm(e, y, fam);
        EXPECT_LE(f.loglik, base.loglik + 1e-9);
        EXPECT_NEAR(f.loglik, base.loglik, 1e-7);
        EXPECT_LT(f.rank, e.cols());
        EXPECT_EQ(log_marglik_jeffreys(f, n, e.columns.size()), kNegInf);
        EXPECT_EQ(log_marglik_robust_g(e, y, fam), kNegInf);
      }
    }
  }
}

TEST(RobustG, NullModelEqualsJeffreysNull) {
  std::mt19937_64 rng(17);
  const Design d{80, {}};
  const auto y = gaussian_response(rng, d);
  const GlmFit fit = fit_glm(d, y, Family::Gaussian);
  EXPECT_DOUBLE_EQ(log_marglik_robust_g(d, y, Family::Gaussian), log_marglik_jeffreys(fit, 80, 0));
  EXPECT_NEAR(log_marglik_robust_g(d, y, Family::Gaussian), gaussian_loglik_oracle(null_rss(y), 80), 1e-10);
}

TEST(RobustG, NodeDoublingSelfConvergence) {
  std::mt19937_64 rng(18);
  for (const Family fam : {Family::Gaussian, Family::Binomial}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Design d = random_design(rng, 100, 2);
      const auto y = fam == Family::Gaussian ? gaussian_response(rng, d) : logistic_response(rng, d);
      RobustGConfig c64, c128;
      c128.nodes = 128;
      const double a = log_marglik_robust_g(d, y, fam, c64);
      const double b = log_marglik_robust_g(d, y, fam, c128);
      ASSERT_TRUE(std::isfinite(a));
      EXPECT_LT(std::abs(a - b), 1e-6);
    }
  }
}

TEST(RobustG, MatchesDenseGridIntegral) {
  std::mt19937_64 rng(19);
  for (std::size_t p : {1UL, 2UL, 3UL}) {
    for (std::size_t n : {30UL, 100UL, 500UL}) {
      const Design d = random_design(rng, n, p);
      const auto y = gaussian_response(rng, d);
      const double rss = oracle::rss(dense_oracle(d), n, d.cols(), y);
      const double r0 = null_rss(y);
      const double expect =
          robust_g_grid_oracle(n, p, 1.0 - rss / r0, gaussian_loglik_oracle(r0, n), 10000);
      EXPECT_NEAR(log_marglik_robust_g(d, y, Family::Gaussian), expect, 1e-6) << "n=" << n << " p=" << p;
    }
  }
}

TEST(RobustG, KernelMatchesDefinition) {
  RobustGConfig c;
  c.a = 3.0;
  c.b = 5.0;
  c.r = 0.7;
  c.s = 1.2;
  c.kappa = 2.0;
  const double u = 0.013, v = 40.0;
  const double expect = (c.a / 2 - 1) * std::log(u) + (c.b / 2 - 1) * std::log(1 - v * u) - c.s * u / 2 -
                        c.r * std::log(c.kappa + (1 - c.kappa) * v * u);
  EXPECT_NEAR(log_tcch_kernel(u, v, c), expect, 1e-12);
}

TEST(RobustG, GaussLegendreIntegratesPolynomials) {
  const Quadrature& q = gauss_legendre_unit(16);
  for (int deg = 0; deg < 32; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], deg);
    EXPECT_NEAR(s, 1.0 / (deg + 1), 1e-13) << deg;
  }
}

TEST(RobustG, ConfigValidation) {
  RobustGConfig c;
  c.nodes = 8;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.nodes = 64;
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RobustG, RankingAgreesWithJeffreysOnStrongTruth) {
  std::mt19937_64 rng(20);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 300;
    const Design full = random_design(rng, n, 3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = 1.0 + 8.0 * full.columns[0].get(i) - 6.0 * full.columns[1].get(i) + g(rng);
    // Nested chain: null, {1}, {1,2} (truth), {1,2,3}.
    std::vector<double> jeff, robust;
    for (std::size_t k = 0; k <= 3; ++k) {
      Design d{n, std::vector<BitColumn>(full.columns.begin(), full.columns.begin() + static_cast<long>(k))};
      jeff.push_back(log_marglik_jeffreys(fit_glm(d, y, Family::Gaussian), n, k));
      robust.push_back(log_marglik_robust_g(d, y, Family::Gaussian));
    }
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(jeff[a] < jeff[b], robust[a] < robust[b]);
    EXPECT_EQ(std::max_element(robust.begin(), robust.end()) - robust.begin(), 2);
  }
}

TEST(RobustG, BinomialLaplaceIsFiniteAndPrefersSignal) {
  std::mt19937_64 rng(21);
  const Design d = random_design(rng, 400, 1);
  const auto y = logistic_response(rng, d, 2.0);
  const double with = log_marglik_robust_g(d, y, Family::Binomial);
  const double without = log_marglik_robust_g(Design{400, {}}, y, Family::Binomial);
  EXPECT_TRUE(std::isfinite(with));
  EXPECT_GT(with, without);
}
