// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's evaluation, keying or fitting code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "blr/dataset.hpp"
#include "blr/logic_tree.hpp"
#include "blr/rng.hpp"

namespace oracle {

using blr::LogicTree;
using blr::Op;

/// Random tree with exactly `size` leaves over covariates [0, m), random
/// shape, operators and negation flags.
inline LogicTree random_tree(std::mt19937_64& rng, std::uint32_t m, std::size_t size) {
  std::bernoulli_distribution coin(0.5);
  if (size == 1) return LogicTree::leaf(std::uniform_int_distribution<std::uint32_t>(0, m - 1)(rng), coin(rng));
  const std::size_t left = std::uniform_int_distribution<std::size_t>(1, size - 1)(rng);
  return LogicTree::join(coin(rng) ? Op::And : Op::Or, random_tree(rng, m, left), random_tree(rng, m, size - left),
                         coin(rng));
}

/// Recursive interpreter over an explicit covariate assignment.
inline bool interpret(const LogicTree& t, const std::map<std::uint32_t, bool>& value) {
  bool v;
  if (t.is_leaf()) {
    v = value.at(t.index());
  } else {
    const bool a = interpret(t.lhs(), value);
    const bool b = interpret(t.rhs(), value);
    v = t.op() == Op::And ? (a && b) : (a || b);
  }
  return t.negated() ? !v : v;
}

inline void collect_leaves(const LogicTree& t, std::vector<std::uint32_t>& out) {
  if (t.is_leaf()) {
    out.push_back(t.index());
    return;
  }
  collect_leaves(t.lhs(), out);
  collect_leaves(t.rhs(), out);
}

inline std::vector<std::uint32_t> distinct_leaves(const LogicTree& t) {
  std::vector<std::uint32_t> v;
  collect_leaves(t, v);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// Truth table of a tree over the given leaf order: entry a is the value
/// when leaves[k] = (a >> k) & 1.
inline std::vector<bool> truth_table(const LogicTree& t, const std::vector<std::uint32_t>& leaves) {
  std::vector<bool> out(std::size_t{1} << leaves.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    std::map<std::uint32_t, bool> val;
    for (std::size_t k = 0; k < leaves.size(); ++k) val[leaves[k]] = (a >> k) & 1U;
    out[a] = interpret(t, val);
  }
  return out;
}

/// Leaf set the function really depends on, and the table restricted to it.
struct Function {
  std::vector<std::uint32_t> leaves;
  std::vector<bool> table;
  bool operator==(const Function&) const = default;
};

inline Function reduce_function(const std::vector<std::uint32_t>& leaves, const std::vector<bool>& table) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    bool matters = false;
    for (std::size_t a = 0; a < table.size() && !matters; ++a)
      if (!((a >> k) & 1U) && table[a] != table[a | (std::size_t{1} << k)]) matters = true;
    if (matters) keep.push_back(k);
  }
  Function f;
  for (auto k : keep) f.leaves.push_back(leaves[k]);
  f.table.resize(std::size_t{1} << keep.size());
  for (std::size_t b = 0; b < f.table.size(); ++b) {
    std::size_t a = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if ((b >> i) & 1U) a |= std::size_t{1} << keep[i];
    f.table[b] = table[a];
  }
  return f;
}

inline Function function_of(const LogicTree& t) {
  const auto leaves = distinct_leaves(t);
  return reduce_function(leaves, truth_table(t, leaves));
}

// Equivalence-preserving rewrites applied at a random node.

inline LogicTree rewrite_once(const LogicTree& t, std::mt19937_64& rng) {
  if (t.is_leaf()) {
    // Double negation spelled as a leaf negated twice via join-free flip.
    return t;
  }
  std::uniform_int_distribution<int> pick(0, 3);
  const int where = pick(rng);
  if (where == 0) return LogicTree::join(t.op(), rewrite_once(t.lhs(), rng), t.rhs(), t.negated());
  if (where == 1) return LogicTree::join(t.op(), t.lhs(), rewrite_once(t.rhs(), rng), t.negated());
  std::uniform_int_distribution<int> kind(0, 2);
  switch (kind(rng)) {
    case 0:  // commutativity
      return LogicTree::join(t.op(), t.rhs(), t.lhs(), t.negated());
    case 1: {  // De Morgan: !(a op b) == (!a op' !b), and (a op b) == !(!a op' !b)
      const Op dual = t.op() == Op::And ? Op::Or : Op::And;
      return LogicTree::join(dual, t.lhs().negate(), t.rhs().negate(), !t.negated());
    }
    default: {  // associativity where the left child shares the operator
      const LogicTree l = t.lhs();
      if (l.is_leaf() || l.negated() || l.op() != t.op()) return LogicTree::join(t.op(), t.rhs(), t.lhs(), t.negated());
      return LogicTree::join(t.op(), l.lhs(), LogicTree::join(t.op(), l.rhs(), t.rhs()), t.negated());
    }
  }
}

// Dense linear algebra for closed-form checks.

/// Solves A x = b for a small SPD matrix by Gaussian elimination with
/// partial pivoting.
inline std::vector<double> solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t q = b.size();
  for (std::size_t c = 0; c < q; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < q; ++r)
      if (std::abs(a[r * q + c]) > std::abs(a[p * q + c])) p = r;
    for (std::size_t k = 0; k < q; ++k) std::swap(a[c * q + k], a[p * q + k]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < q; ++r) {
      const double f = a[r * q + c] / a[c * q + c];
      for (std::size_t k = c; k < q; ++k) a[r * q + k] -= f * a[c * q + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(q);
  for (std::size_t r = q; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < q; ++k) s -= a[r * q + k] * x[k];
    x[r] = s / a[r * q + r];
  }
  return x;
}

/// Least-squares RSS for a dense row-major n x q design.
inline double rss(const std::vector<double>& x, std::size_t n, std::size_t q, const std::vector<double>& y) {
  std::vector<double> xtx(q * q, 0.0), xty(q, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < q; ++a) {
      xty[a] += x[i * q + a] * y[i];
      for (std::size_t b = 0; b < q; ++b) xtx[a * q + b] += x[i * q + a] * x[i * q + b];
    }
  const auto beta = solve(xtx, xty);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t a = 0; a < q; ++a) f += x[i * q + a] * beta[a];
    s += (y[i] - f) * (y[i] - f);
  }
  return s;
}

/// Bernoulli log-likelihood for dense design and coefficients.
inline double logistic_loglik(const std::vector<double>& x, std::size_t n, std::size_t q, const std::vector<double>& y,
                              const std::vector<double>& beta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t a = 0; a < q; ++a) eta += x[i * q + a] * beta[a];
    ll += y[i] * eta - (eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)));
  }
  return ll;
}

inline double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

/// Binomial coefficient as a double (small arguments only).
inline double choose(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Every feature of at most two leaves over m covariates, one tree per
/// complement pair: m single leaves and four conjunctions per leaf pair.
inline std::vector<LogicTree> all_small_trees(std::uint32_t m) {
  std::vector<LogicTree> out;
  for (std::uint32_t i = 0; i < m; ++i) out.push_back(LogicTree::leaf(i));
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = i + 1; j < m; ++j)
      for (int mask = 0; mask < 4; ++mask)
        out.push_back(LogicTree::join(Op::And, LogicTree::leaf(i, mask & 1), LogicTree::leaf(j, mask & 2)));
  return out;
}

struct EnumeratedModel {
  std::vector<std::size_t> trees;
  double prob = 0.0;
};

/// Gaussian posterior of every model built from at most two of `trees`
/// (k_max <= 2), scored with a direct RSS fit, the BIC-type penalty and the
/// prior -sum log(C(m, s) 4^(s-1)).
inline std::vector<EnumeratedModel> enumerate_models(const std::vector<LogicTree>& trees, const blr::Dataset& data,
                                                     std::size_t k_max) {
  const std::size_t d = trees.size(), n = data.n;
  std::vector<std::vector<double>> col(d, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::uint32_t, bool> val;
    for (std::uint32_t j = 0; j < data.m; ++j) val[j] = data.x[j].get(i);
    for (std::size_t t = 0; t < d; ++t) col[t][i] = interpret(trees[t], val) ? 1.0 : 0.0;
  }
  std::vector<EnumeratedModel> models{{}};
  for (std::size_t a = 0; a < d && k_max >= 1; ++a) {
    models.push_back({{a}});
    for (std::size_t b = a + 1; b < d && k_max >= 2; ++b) models.push_back({{a, b}});
  }
  const double nn = static_cast<double>(n);
  std::vector<double> lp;
  for (const auto& mdl : models) {
    const std::size_t q = mdl.trees.size() + 1;
    std::vector<double> x(n * q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i * q] = 1.0;
      for (std::size_t k = 0; k < mdl.trees.size(); ++k) x[i * q + k + 1] = col[mdl.trees[k]][i];
    }
    const double r = rss(x, n, q, data.y);
    double v = -0.5 * nn * (std::log(2.0 * std::numbers::pi * r / nn) + 1.0) - 0.5 * double(q - 1) * std::log(nn);
    for (auto t : mdl.trees) {
      const auto s = static_cast<unsigned>(distinct_leaves(trees[t]).size());
      v -= std::log(choose(data.m, s)) + (2.0 * s - 2.0) * std::log(2.0);
    }
    lp.push_back(v);
  }
  const double z = log_sum_exp(lp);
  for (std::size_t k = 0; k < models.size(); ++k) models[k].prob = std::exp(lp[k] - z);
  return models;
}

}  // namespace oracle
