// SPDX-License-Identifier: Apache-2.0
#include "blr/model_space.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace blr {

std::size_t ModelIndex::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> ModelIndex::included() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t x = words_[w];
    while (x) {
      out.push_back(64 * w + static_cast<std::size_t>(std::countr_zero(x)));
      x &= x - 1;
    }
  }
  return out;
}

std::size_t ModelIndex::hamming(const ModelIndex& o) const {
  std::size_t c = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) c += static_cast<std::size_t>(std::popcount(words_[w] ^ o.words_[w]));
  return c;
}

Population::Population(std::vector<LogicTree> trees, std::size_t founders, std::uint32_t generation,
                       std::uint32_t c_max)
    : trees_(std::move(trees)), founders_(founders), generation_(generation) {
  if (founders_ > trees_.size()) throw std::invalid_argument("population: more founders than members");
  keys_.reserve(trees_.size());
  std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
  for (std::size_t j = 0; j < trees_.size(); ++j) {
    const LogicTree& t = trees_[j];
    if (j < founders_ && !t.is_leaf()) throw std::invalid_argument("population: founder " + to_string(t) + " is not a leaf");
    if (t.size() > c_max) throw std::invalid_argument("population: tree " + to_string(t) + " exceeds C_max");
    CanonicalKey k = feature_key(t);
    if (!seen.insert(k).second) throw std::invalid_argument("population: duplicate tree " + to_string(t));
    keys_.push_back(std::move(k));
  }
}

bool Population::contains(const CanonicalKey& feature) const {
  return std::find(keys_.begin(), keys_.end(), feature) != keys_.end();
}

std::vector<std::uint32_t> Population::founder_leaves() const {
  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < founders_; ++j) out.push_back(trees_[j].index());
  return out;
}

void PriorConfig::validate() const {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("prior: a must lie in (0, 1)");
  if (k_max < 1) throw std::invalid_argument("prior: k_max must be at least 1");
  if (c_max < 1) throw std::invalid_argument("prior: C_max must be at least 1");
  if (m < 1) throw std::invalid_argument("prior: m must be at least 1");
}

boost::multiprecision::cpp_int n_trees_of_size(std::uint32_t m, std::uint32_t s) {
  if (s < 1 || s > m)
    throw std::domain_error("N(s) needs 1 <= s <= m (s=" + std::to_string(s) + ", m=" + std::to_string(m) + ")");
  boost::multiprecision::cpp_int c = 1;
  for (std::uint32_t i = 0; i < s; ++i) c = c * (m - i) / (i + 1);
  return c << (2 * s - 2);
}

ModelPrior::ModelPrior(const PriorConfig& cfg) : cfg_(cfg), log_a_(std::log(cfg.a)) {
  cfg_.validate();
  const std::uint32_t top = std::min(cfg_.c_max, cfg_.m);
  log_n_.assign(top + 1, std::numeric_limits<double>::infinity());
  for (std::uint32_t s = 1; s <= top; ++s)
    log_n_[s] = std::log(n_trees_of_size(cfg_.m, s).convert_to<double>());
}

double ModelPrior::complexity(std::size_t s) const {
  if (s == 0 || s >= log_n_.size()) return std::numeric_limits<double>::infinity();
  return log_n_[s];
}

double ModelPrior::log_factor(std::size_t s) const {
  const double c = complexity(s);
  if (std::isinf(c)) return -std::numeric_limits<double>::infinity();
  return c * log_a_;
}

double ModelPrior::log_prior(std::span<const std::size_t> included_sizes) const {
  if (included_sizes.size() > cfg_.k_max) return -std::numeric_limits<double>::infinity();
  double lp = 0.0;
  for (auto s : included_sizes) lp += log_factor(s);
  return lp;
}

namespace {

std::vector<std::size_t> included_sizes(const ModelIndex& model, const Population& pop) {
  if (model.size() != pop.size()) throw std::invalid_argument("model length does not match population size");
  std::vector<std::size_t> sizes;
  for (auto j : model.included()) sizes.push_back(pop.tree(j).size());
  return sizes;
}

}  // namespace

double log_model_prior(const ModelIndex& model, const Population& pop, const PriorConfig& cfg) {
  return ModelPrior(cfg).log_prior(included_sizes(model, pop));
}

double prior_ratio_check(const ModelIndex& model, std::size_t j, const Population& pop, const PriorConfig& cfg) {
  if (model.size() != pop.size() || j >= pop.size()) throw std::invalid_argument("prior ratio: index out of range");
  if (model.test(j)) throw std::invalid_argument("prior ratio: tree is already in the model");
  if (model.count() + 1 > cfg.k_max) throw std::invalid_argument("prior ratio: adding the tree exceeds k_max");
  return ModelPrior(cfg).log_factor(pop.tree(j).size());
}

}  // namespace blr
