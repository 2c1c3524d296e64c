// SPDX-License-Identifier: Apache-2.0
#pragma once

// Random instances and brute-force counts shared by the unit tests and the
// acceptance run.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "blr/likelihood.hpp"
#include "blr/model_space.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace blr;

BitColumn random_column(std::mt19937_64& rng, std::size_t n, double p = 0.5) {
  std::bernoulli_distribution b(p);
  std::vector<std::uint8_t> bits(n);
  for (auto& v : bits) v = b(rng);
  return BitColumn::from_bits(bits);
}

Design random_design(std::mt19937_64& rng, std::size_t n, std::size_t p) {
  Design d{n, {}};
  for (std::size_t k = 0; k < p; ++k) d.columns.push_back(random_column(rng, n, 0.2 + 0.6 * (k % 3) / 2.0));
  return d;
}

// Dense row-major matrix built bit by bit, independent of Design::dense.
std::vector<double> dense_oracle(const Design& d) {
  const std::size_t q = d.columns.size() + 1;
  std::vector<double> x(d.n * q);
  for (std::size_t i = 0; i < d.n; ++i) {
    x[i * q] = 1.0;
    for (std::size_t k = 0; k < d.columns.size(); ++k) x[i * q + k + 1] = d.columns[k].get(i) ? 1.0 : 0.0;
  }
  return x;
}

std::vector<double> gaussian_response(std::mt19937_64& rng, const Design& d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> y(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    y[i] = 0.5 + g(rng);
    for (std::size_t k = 0; k < d.columns.size(); ++k) y[i] += (d.columns[k].get(i) ? 1.0 : 0.0) * (k + 1) * 0.7;
  }
  return y;
}

std::vector<double> logistic_response(std::mt19937_64& rng, const Design& d, double scale = 0.8) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> y(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    double eta = -0.3;
    for (std::size_t k = 0; k < d.columns.size(); ++k)
      eta += (d.columns[k].get(i) ? 1.0 : 0.0) * scale * (k % 2 ? -1.0 : 1.0);
    y[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return y;
}

double gaussian_loglik_oracle(double rss, std::size_t n) {
  const double nn = static_cast<double>(n);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * rss / nn) + 1.0);
}

double null_rss(const std::vector<double>& y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double s = 0.0;
  for (double v : y) s += (v - mean) * (v - mean);
  return s;
}

// Midpoint rule in t = sqrt(v u) with the robust defaults (a=1, b=2, r=1.5,
// s=0, kappa=1), where the tCCH kernel reduces to u^{-1/2} and becomes a
// constant density in t. The Gaussian Bayes factor at fixed g is computed
// from an independent R^2.
double robust_g_grid_oracle(std::size_t n, std::size_t p, double r2, double null_ll, std::size_t grid) {
  const double v = (static_cast<double>(n) + 1.0) / (static_cast<double>(p) + 1.0);
  const double nn = static_cast<double>(n), pp = static_cast<double>(p);
  std::vector<double> terms(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    const double g = v / (t * t) - 1.0;
    terms[i] = 0.5 * (nn - 1.0 - pp) * std::log1p(g) - 0.5 * (nn - 1.0) * std::log1p(g * (1.0 - r2));
  }
  return null_ll + oracle::log_sum_exp(terms) - std::log(static_cast<double>(grid));
}

// Distinct regression features computable by chains (((X_a o X_b) o X_c) ...)
// of s leaves a < b < c < ... with optional leaf negations and AND/OR joins,
// keeping only functions that depend on all s leaves.
std::size_t enumerate_chain_features(std::uint32_t m, std::uint32_t s) {
  std::set<CanonicalKey> seen;
  std::vector<std::uint32_t> pick;
  std::function<void()> rec = [&] {
    if (pick.size() == s) {
      for (std::uint32_t neg = 0; neg < (1U << s); ++neg)
        for (std::uint32_t ops = 0; ops < (1U << (s - 1)); ++ops) {
          LogicTree t = LogicTree::leaf(pick[0], neg & 1U);
          for (std::uint32_t k = 1; k < s; ++k)
            t = LogicTree::join((ops >> (k - 1)) & 1U ? Op::Or : Op::And, t, LogicTree::leaf(pick[k], (neg >> k) & 1U));
          const CanonicalKey key = feature_key(t);
          if (key.leaves.size() == s) seen.insert(key);
        }
      return;
    }
    for (std::uint32_t j = pick.empty() ? 0 : pick.back() + 1; j < m; ++j) {
      pick.push_back(j);
      rec();
      pick.pop_back();
    }
  };
  rec();
  return seen.size();
}

// Same, over every binary tree shape with negation allowed on inner nodes.
std::size_t enumerate_all_shapes(std::uint32_t m, std::uint32_t s) {
  std::mt19937_64 rng(5);
  std::set<CanonicalKey> seen;
  // Exhaustive over shapes is small for s <= 3; random sampling covers it
  // with overwhelming probability at this count.
  for (int i = 0; i < 200000; ++i) {
    const LogicTree t = oracle::random_tree(rng, m, s);
    if (t.leaves().size() != s) continue;
    const CanonicalKey key = feature_key(t);
    if (key.leaves.size() == s) seen.insert(key);
  }
  return seen.size();
}

}  // namespace fixture
