// SPDX-License-Identifier: Apache-2.0
#pragma once

// Search-space populations, model indicator vectors and the tree-complexity
// model prior.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blr/logic_tree.hpp"

namespace blr {

/// Indicator vector over the d members of a population.
class ModelIndex {
 public:
  ModelIndex() = default;
  explicit ModelIndex(std::size_t d) : d_(d), words_((d + 63) / 64, 0) {}

  std::size_t size() const { return d_; }
  bool test(std::size_t j) const { return (words_[j / 64] >> (j % 64)) & 1U; }
  void set(std::size_t j, bool v) {
    const std::uint64_t b = std::uint64_t{1} << (j % 64);
    if (v)
      words_[j / 64] |= b;
    else
      words_[j / 64] &= ~b;
  }
  void flip(std::size_t j) { words_[j / 64] ^= std::uint64_t{1} << (j % 64); }
  /// |M|
  std::size_t count() const;
  /// Positions j with gamma_j = 1, ascending.
  std::vector<std::size_t> included() const;
  std::size_t hamming(const ModelIndex& o) const;

  bool operator==(const ModelIndex&) const = default;

 private:
  std::size_t d_ = 0;
  std::vector<std::uint64_t> words_;
};

/// The current search space: d distinct trees, the first `founders` of which
/// are the protected single-leaf set carried through every generation.
class Population {
 public:
  Population() = default;
  /// Throws std::invalid_argument if trees share a feature key, a founder is
  /// not a single leaf, founders > trees.size(), or a tree exceeds c_max.
  Population(std::vector<LogicTree> trees, std::size_t founders, std::uint32_t generation, std::uint32_t c_max);

  std::size_t size() const { return trees_.size(); }
  std::size_t founders() const { return founders_; }
  std::uint32_t generation() const { return generation_; }
  const LogicTree& tree(std::size_t j) const { return trees_[j]; }
  const std::vector<LogicTree>& trees() const { return trees_; }
  const CanonicalKey& key(std::size_t j) const { return keys_[j]; }
  const std::vector<CanonicalKey>& keys() const { return keys_; }
  bool contains(const CanonicalKey& feature) const;
  /// Covariate indices of the founder leaves.
  std::vector<std::uint32_t> founder_leaves() const;

 private:
  std::vector<LogicTree> trees_;
  std::vector<CanonicalKey> keys_;
  std::size_t founders_ = 0;
  std::uint32_t generation_ = 0;
};

struct PriorConfig {
  double a = std::exp(-1.0);
  std::uint32_t k_max = 10;
  std::uint32_t c_max = 5;
  std::uint32_t m = 50;

  void validate() const;
};

/// N(s) = C(m, s) * 2^(2s-2): number of distinct trees with s leaves.
/// Throws std::domain_error unless 1 <= s <= m.
boost::multiprecision::cpp_int n_trees_of_size(std::uint32_t m, std::uint32_t s);

/// Model prior with c(L) = log N(s(L)), cached per tree size.
class ModelPrior {
 public:
  explicit ModelPrior(const PriorConfig& cfg);

  const PriorConfig& config() const { return cfg_; }
  /// c(L) for a tree of s leaves; +inf when s > C_max or s > m.
  double complexity(std::size_t s) const;
  /// log a^{c(L)} for one included tree of size s.
  double log_factor(std::size_t s) const;
  /// Unnormalized log prior of a model given the sizes of its trees;
  /// -inf if the model has more than k_max trees or any tree is too large.
  double log_prior(std::span<const std::size_t> included_sizes) const;

 private:
  PriorConfig cfg_;
  double log_a_;
  std::vector<double> log_n_;  // index s
};

/// Unnormalized log p(M). Throws std::invalid_argument on a length mismatch.
double log_model_prior(const ModelIndex& model, const Population& pop, const PriorConfig& cfg);

/// log p(M') - log p(M) where M' adds tree j to M. Requires gamma_j = 0 and
/// |M| + 1 <= k_max (std::invalid_argument otherwise).
double prior_ratio_check(const ModelIndex& model, std::size_t j, const Population& pop, const PriorConfig& cfg);

}  // namespace blr
