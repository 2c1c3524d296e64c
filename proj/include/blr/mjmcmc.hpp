// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mode-jumping MCMC over model indicator vectors for a fixed search space,
// plus the store of visited models and the posterior summaries derived
// from it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "blr/model_space.hpp"
#include "blr/rng.hpp"

namespace blr {

struct ScoreRecord {
  double log_marglik = 0.0;
  double log_prior = 0.0;
  /// log_marglik + log_prior
  double log_post = 0.0;
};

/// Sorted ids of the trees a model includes. Ids are whatever the caller
/// uses to identify trees across populations.
using ModelKey = std::vector<std::uint32_t>;

struct ModelKeyHash {
  std::size_t operator()(const ModelKey& k) const;
};

/// Visited models and their scores, with a running log-sum-exp of the
/// unnormalized log posteriors.
class PosteriorStore {
 public:
  using Map = std::unordered_map<ModelKey, ScoreRecord, ModelKeyHash>;

  const ScoreRecord* find(const ModelKey& key) const;
  /// Returns false and leaves the store untouched if the key is present.
  bool insert(const ModelKey& key, const ScoreRecord& rec);

  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  /// Running log sum of exp(log_post) over all entries.
  double log_mass() const { return log_mass_; }
  /// Same quantity recomputed from scratch.
  double recompute_log_mass() const;
  const Map& entries() const { return map_; }

 private:
  Map map_;
  double log_mass_ = -std::numeric_limits<double>::infinity();
};

/// What the sampler explores: d binary positions, at most k_max of them
/// set, a key per model and an (expensive, pure) scoring function.
struct SearchTarget {
  std::size_t d = 0;
  std::size_t k_max = 0;
  std::function<ModelKey(const ModelIndex&)> key;
  std::function<ScoreRecord(const ModelIndex&)> score;
};

/// Target whose model key is the list of set positions.
SearchTarget indexed_target(std::size_t d, std::size_t k_max, std::function<double(const ModelIndex&)> log_post);

struct MjmcmcConfig {
  double p_jump = 0.05;
  /// Greedy ascent step cap; 0 means 2d.
  std::size_t ascent_cap = 0;
  /// Per-bit flip probability of the randomization kernel; 0 means 1/d.
  double flip_prob = 0.0;

  void validate() const;
};

struct Budget {
  /// Number of MCMC steps, or 0 to run to a unique-model target.
  std::size_t steps = 0;
  /// Stop once this many distinct feasible models were seen during the run.
  std::size_t unique_target = 0;
  /// Hard cap on steps for unique-target runs.
  std::size_t max_steps = 0;

  static Budget fixed(std::size_t n) { return {n, 0, 0}; }
  static Budget unique(std::size_t target, std::size_t cap) { return {0, target, cap}; }
};

struct SamplerStats {
  std::size_t flips_proposed = 0;
  std::size_t flips_accepted = 0;
  std::size_t jumps_proposed = 0;
  std::size_t jumps_accepted = 0;
};

class Mjmcmc {
 public:
  Mjmcmc(const SearchTarget& target, PosteriorStore& store, const MjmcmcConfig& cfg = {});

  /// Log posterior of a model, scoring and recording it on first sight.
  /// Models above k_max get -inf and are not recorded.
  double log_post(const ModelIndex& m);

  ModelIndex small_flip_step(const ModelIndex& state, Rng& rng);
  ModelIndex mode_jump_step(const ModelIndex& state, Rng& rng);
  /// Mixture: mode jump with probability p_jump, else a small flip.
  ModelIndex step(const ModelIndex& state, Rng& rng);

  /// Greedy best-improvement ascent; ties go to the lowest bit.
  ModelIndex ascend(ModelIndex from);

  /// Distinct feasible models looked up through this sampler.
  std::size_t unique_visited() const { return seen_.size(); }
  const SamplerStats& stats() const { return stats_; }

 private:
  double log_q(const ModelIndex& to, const ModelIndex& from) const;

  const SearchTarget& target_;
  PosteriorStore& store_;
  MjmcmcConfig cfg_;
  std::size_t ascent_cap_;
  double flip_prob_;
  std::unordered_set<ModelKey, ModelKeyHash> seen_;
  SamplerStats stats_;
};

struct RunResult {
  ModelIndex last;
  std::size_t steps = 0;
  std::size_t unique_visited = 0;
  SamplerStats stats;
};

/// Runs the mixture kernel from `init` until the budget is used. The initial
/// model is always scored (and stored if feasible).
RunResult run(const SearchTarget& target, PosteriorStore& store, const ModelIndex& init, const Budget& budget,
              const MjmcmcConfig& cfg, Rng& rng);

/// Posterior probabilities over the store, normalized by log-sum-exp.
/// Throws std::invalid_argument on an empty store.
std::vector<std::pair<ModelKey, double>> renormalized_posterior(const PosteriorStore& store);

struct InclusionResult {
  /// One probability per entry of `ids`.
  std::vector<double> probs;
  /// log-sum-exp of log_post over the models used.
  double log_mass = -std::numeric_limits<double>::infinity();
  std::size_t models = 0;
};

/// Marginal inclusion probabilities for the trees `ids`, renormalized over
/// the stored models built only from those trees. Throws
/// std::invalid_argument on an empty store.
InclusionResult inclusion_probs(const PosteriorStore& store, std::span<const std::uint32_t> ids);

}  // namespace blr
