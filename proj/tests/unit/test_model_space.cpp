// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "blr/model_space.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace blr;
using fixture::enumerate_all_shapes;
using fixture::enumerate_chain_features;

namespace {

Population leaf_population(std::size_t d) {
  std::vector<LogicTree> trees;
  for (std::size_t j = 0; j < d; ++j) trees.push_back(LogicTree::leaf(static_cast<std::uint32_t>(j)));
  return Population(trees, 0, 0, 5);
}

Population mixed_population(std::size_t d, std::mt19937_64& rng, std::uint32_t m = 30) {
  std::vector<LogicTree> trees;
  std::set<CanonicalKey> keys;
  while (trees.size() < d) {
    LogicTree t = oracle::random_tree(rng, m, 1 + trees.size() % 4);
    if (canonical_key(t).is_constant()) continue;
    if (keys.insert(feature_key(t)).second) trees.push_back(t);
  }
  return Population(trees, 0, 0, 5);
}

}  // namespace

TEST(NTrees, Examples) {
  EXPECT_EQ(n_trees_of_size(50, 1), 50);
  EXPECT_EQ(n_trees_of_size(50, 2), 4900);
  EXPECT_EQ(n_trees_of_size(4, 2), 24);
  EXPECT_THROW(n_trees_of_size(4, 0), std::domain_error);
  EXPECT_THROW(n_trees_of_size(4, 5), std::domain_error);
  // Exceeds 64 bits without overflow.
  EXPECT_EQ(n_trees_of_size(200, 40) % 4, 0);
  EXPECT_GT(n_trees_of_size(200, 40), boost::multiprecision::cpp_int(1) << 100);
}

TEST(NTrees, MatchesChainEnumeration) {
  for (std::uint32_t m = 1; m <= 5; ++m)
    for (std::uint32_t s = 1; s <= std::min(m, 3U); ++s)
      EXPECT_EQ(n_trees_of_size(m, s), enumerate_chain_features(m, s)) << "m=" << m << " s=" << s;
  EXPECT_EQ(enumerate_chain_features(50, 2), 4900U);
}

TEST(NTrees, ThreeLeafShapesWithInnerNegationExceedFormula) {
  // Permuted leaf orders and negated inner nodes reach functions such as
  // (X1 | X3) & X2 that the sorted chain count omits.
  EXPECT_EQ(enumerate_all_shapes(4, 2), 24U);
  EXPECT_EQ(enumerate_all_shapes(5, 3), 320U);
  EXPECT_EQ(n_trees_of_size(5, 3), 160);
}

TEST(Prior, Examples) {
  const PriorConfig cfg{std::exp(-1.0), 10, 5, 50};
  const ModelPrior prior(cfg);
  EXPECT_DOUBLE_EQ(prior.log_prior(std::vector<std::size_t>{}), 0.0);
  EXPECT_NEAR(prior.log_prior(std::vector<std::size_t>{2}), -std::log(4900.0), 1e-12);
  EXPECT_NEAR(prior.log_prior(std::vector<std::size_t>{2}), -8.497, 1e-3);
  EXPECT_NEAR(prior.complexity(1), std::log(50.0), 1e-12);
  EXPECT_EQ(prior.log_prior(std::vector<std::size_t>(11, 1)), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(prior.log_prior(std::vector<std::size_t>{6}), -std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isinf(prior.complexity(6)));
}

TEST(Prior, NonDefaultBase) {
  const ModelPrior prior(PriorConfig{0.5, 10, 5, 20});
  EXPECT_NEAR(prior.log_factor(3), std::log(0.5) * std::log(oracle::choose(20, 3) * 16.0), 1e-12);
}

TEST(Prior, ConfigValidation) {
  EXPECT_THROW(ModelPrior(PriorConfig{1.0, 10, 5, 50}), std::invalid_argument);
  EXPECT_THROW(ModelPrior(PriorConfig{0.0, 10, 5, 50}), std::invalid_argument);
  EXPECT_THROW(ModelPrior(PriorConfig{0.3, 0, 5, 50}), std::invalid_argument);
  EXPECT_THROW(ModelPrior(PriorConfig{0.3, 3, 0, 50}), std::invalid_argument);
}

TEST(Prior, LogModelPriorOnPopulation) {
  const Population pop({parse_tree("X1"), parse_tree("X2 & X3"), parse_tree("X4 | X5 & X6")}, 1, 0, 5);
  const PriorConfig cfg{std::exp(-1.0), 2, 5, 50};
  ModelIndex m(3);
  EXPECT_DOUBLE_EQ(log_model_prior(m, pop, cfg), 0.0);
  m.set(1, true);
  m.set(2, true);
  EXPECT_NEAR(log_model_prior(m, pop, cfg), -std::log(4900.0) - std::log(oracle::choose(50, 3) * 16.0), 1e-12);
  m.set(0, true);
  EXPECT_EQ(log_model_prior(m, pop, cfg), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(log_model_prior(ModelIndex(2), pop, cfg), std::invalid_argument);
}

TEST(Prior, RatioExamples) {
  const Population pop({parse_tree("X1"), parse_tree("X2 & X3")}, 0, 0, 5);
  const PriorConfig cfg{std::exp(-1.0), 2, 5, 50};
  ModelIndex m(2);
  EXPECT_NEAR(prior_ratio_check(m, 0, pop, cfg), -std::log(50.0), 1e-12);
  EXPECT_NEAR(prior_ratio_check(m, 1, pop, cfg), -std::log(4900.0), 1e-12);
  m.set(0, true);
  EXPECT_THROW(prior_ratio_check(m, 0, pop, cfg), std::invalid_argument);
  const PriorConfig tight{std::exp(-1.0), 1, 5, 50};
  EXPECT_THROW(prior_ratio_check(m, 1, pop, tight), std::invalid_argument);
}

TEST(Prior, RatioMatchesDifferenceExhaustively) {
  std::mt19937_64 rng(7);
  for (std::size_t d = 1; d <= 12; ++d) {
    const Population pop = mixed_population(d, rng);
    const PriorConfig cfg{std::exp(-1.0), static_cast<std::uint32_t>(d), 5, 30};
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
      ModelIndex m(d);
      for (std::size_t j = 0; j < d; ++j) m.set(j, (bits >> j) & 1U);
      const double base = log_model_prior(m, pop, cfg);
      for (std::size_t j = 0; j < d; ++j) {
        if (m.test(j)) continue;
        ModelIndex up = m;
        up.set(j, true);
        const double r = prior_ratio_check(m, j, pop, cfg);
        ASSERT_NEAR(r, log_model_prior(up, pop, cfg) - base, 1e-12);
        ASSERT_LT(r, 0.0);
      }
    }
  }
}

TEST(Prior, NormalizerFiniteAndPositive) {
  std::mt19937_64 rng(8);
  for (std::size_t d = 1; d <= 12; ++d) {
    const Population pop = mixed_population(d, rng);
    const PriorConfig cfg{std::exp(-1.0), static_cast<std::uint32_t>(std::max<std::size_t>(1, d / 2)), 5, 30};
    double z = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
      ModelIndex m(d);
      for (std::size_t j = 0; j < d; ++j) m.set(j, (bits >> j) & 1U);
      z += std::exp(log_model_prior(m, pop, cfg));
    }
    EXPECT_TRUE(std::isfinite(z));
    EXPECT_GT(z, 0.0);
  }
}

TEST(Prior, ModelSizeIsBinomialForEqualComplexity) {
  // All trees single leaves: c(L) = log m constant, so |M| ~ Binomial(d, p)
  // with p = a^c / (1 + a^c). Models are drawn by inverse-CDF sampling over
  // the enumerated space.
  const std::size_t d = 10;
  const Population full = leaf_population(d);
  const PriorConfig cfg{std::exp(-1.0), static_cast<std::uint32_t>(d), 5, 12};
  // Exact |M| distribution implied by the prior.
  std::vector<double> mass(d + 1, 0.0);
  double z = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    ModelIndex mi(d);
    for (std::size_t j = 0; j < d; ++j) mi.set(j, (bits >> j) & 1U);
    const double w = std::exp(log_model_prior(mi, full, cfg));
    mass[mi.count()] += w;
    z += w;
  }
  // Monte Carlo: sample models with probability proportional to the prior.
  std::vector<double> cdf;
  std::vector<std::size_t> sizes;
  double acc = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    ModelIndex mi(d);
    for (std::size_t j = 0; j < d; ++j) mi.set(j, (bits >> j) & 1U);
    acc += std::exp(log_model_prior(mi, full, cfg)) / z;
    cdf.push_back(acc);
    sizes.push_back(mi.count());
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int draws = 200000;
  std::vector<int> counts(d + 1, 0);
  for (int i = 0; i < draws; ++i) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u(rng) * acc);
    ++counts[sizes[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1))]];
  }
  const double ac = std::exp(-std::log(static_cast<double>(cfg.m)));
  const double p = ac / (1.0 + ac);
  for (std::size_t k = 0; k <= d; ++k) {
    const double binom = oracle::choose(static_cast<unsigned>(d), static_cast<unsigned>(k)) * std::pow(p, k) *
                         std::pow(1 - p, d - k);
    EXPECT_NEAR(mass[k] / z, binom, 1e-12);
    const double sd = std::sqrt(draws * binom * (1 - binom));
    EXPECT_NEAR(counts[k], draws * binom, 3.0 * sd + 1.0) << "k=" << k;
  }
}

TEST(Population, Invariants) {
  EXPECT_THROW(Population({parse_tree("X1 & X2")}, 1, 0, 5), std::invalid_argument);
  EXPECT_THROW(Population({parse_tree("X1"), parse_tree("!X1")}, 0, 0, 5), std::invalid_argument);
  EXPECT_THROW(Population({parse_tree("X1 & X2"), parse_tree("!(!X2 | !X1)")}, 0, 0, 5), std::invalid_argument);
  EXPECT_THROW(Population({parse_tree("X1 & X2 & X3")}, 0, 0, 2), std::invalid_argument);
  EXPECT_THROW(Population({parse_tree("X1")}, 2, 0, 5), std::invalid_argument);
  const Population p({parse_tree("X3"), parse_tree("X1 & X2")}, 1, 4, 5);
  EXPECT_EQ(p.size(), 2U);
  EXPECT_EQ(p.generation(), 4U);
  EXPECT_EQ(p.founder_leaves(), (std::vector<std::uint32_t>{2}));
  EXPECT_TRUE(p.contains(feature_key(parse_tree("!X1 | !X2"))));
  EXPECT_FALSE(p.contains(feature_key(parse_tree("X1 | X2"))));
}

TEST(ModelIndex, Basics) {
  ModelIndex m(130);
  m.set(0, true);
  m.set(64, true);
  m.flip(129);
  EXPECT_EQ(m.count(), 3U);
  EXPECT_EQ(m.included(), (std::vector<std::size_t>{0, 64, 129}));
  ModelIndex o(130);
  o.set(64, true);
  EXPECT_EQ(m.hamming(o), 2U);
  m.flip(129);
  EXPECT_FALSE(m.test(129));
}
