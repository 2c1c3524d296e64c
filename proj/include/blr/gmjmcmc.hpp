// SPDX-License-Identifier: Apache-2.0
#pragma once

// Genetically modified MJMCMC: population initialization and evolution,
// single-chain driver, parallel chains and cross-chain aggregation.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "blr/dataset.hpp"
#include "blr/likelihood.hpp"
#include "blr/mjmcmc.hpp"
#include "blr/model_space.hpp"

namespace blr {

enum class PriorChoice { Jeffreys, RobustG };

const char* prior_name(PriorChoice p);
/// "jeffreys" | "robust_g"; throws std::invalid_argument otherwise.
PriorChoice parse_prior(std::string_view s);

struct GmjmcmcConfig {
  std::size_t n_init = 300;
  std::size_t n_expl = 300;
  std::size_t m_fin = 10000;
  std::size_t t_max = 16;
  double rho_min = 0.2;
  double p_and = 0.9;
  double p_not = 0.1;
  double p_init = 0.5;
  double p_c = 0.9;
  double rho_del = 0.5;
  std::uint32_t c_max = 5;
  std::uint32_t k_max = 10;
  std::size_t d = 15;

  std::size_t chains = 1;
  std::uint64_t seed = 1;
  PriorChoice prior = PriorChoice::Jeffreys;
  double a = 0.36787944117144233;  // e^-1
  RobustGConfig robust;
  MjmcmcConfig mjmcmc;
  /// Build S_1 from random trees instead of a leaf-level MJMCMC run.
  bool random_init = false;
  /// Keep a snapshot of every generation in the chain summary.
  bool trace_populations = false;

  /// Tuning rows "1".."6", "RD1", "RD2". Throws std::invalid_argument.
  static GmjmcmcConfig preset(std::string_view row);

  GaOperatorParams operator_params() const { return {p_and, p_not, rho_del, c_max}; }
  PriorConfig prior_config(std::uint32_t m) const { return {a, k_max, c_max, m}; }
  /// Throws std::invalid_argument for values that cannot be run on m
  /// covariates.
  void validate(std::size_t m) const;
};

/// Chain-wide interning of tree features to small integer ids.
class TreeRegistry {
 public:
  std::uint32_t intern(const CanonicalKey& feature);
  const CanonicalKey& key(std::uint32_t id) const { return keys_[id]; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_map<CanonicalKey, std::uint32_t, CanonicalKeyHash> ids_;
  std::vector<CanonicalKey> keys_;
};

/// Scores models of one population against a dataset.
class PopulationTarget {
 public:
  PopulationTarget(const Population& pop, const Dataset& data, const GmjmcmcConfig& cfg, TreeRegistry& registry);
  PopulationTarget(const PopulationTarget&) = delete;
  PopulationTarget& operator=(const PopulationTarget&) = delete;

  const SearchTarget& target() const { return target_; }
  const std::vector<std::uint32_t>& ids() const { return ids_; }
  ScoreRecord score(const ModelIndex& m) const;

 private:
  const Population& pop_;
  const Dataset& data_;
  const GmjmcmcConfig& cfg_;
  ModelPrior prior_;
  std::vector<BitColumn> columns_;
  std::vector<std::uint32_t> ids_;
  SearchTarget target_;
};

/// Random model including each of d trees with probability p_init, trimmed
/// to k_max by dropping uniformly chosen members.
ModelIndex initial_model(std::size_t d, double p_init, std::size_t k_max, Rng& rng);

struct InitResult {
  Population population;
  /// Inclusion probabilities of all m leaves from the leaf-level run (empty
  /// for random initialization).
  std::vector<double> leaf_probs;
};

/// Steps 1-2 of the algorithm. The founder set is capped at d - k_max.
InitResult initialize(const Dataset& data, const GmjmcmcConfig& cfg, PosteriorStore& store, TreeRegistry& registry,
                      Rng& rng);

/// Replaces non-founders whose inclusion probability is below rho_min.
/// `probs` holds one probability per member of `pop`.
Population evolve(const Population& pop, std::span<const double> probs, std::uint32_t m, const GmjmcmcConfig& cfg,
                  Rng& rng);

struct TreeProbability {
  CanonicalKey key;
  std::string text;
  double prob = 0.0;
};

struct PopulationSnapshot {
  std::uint32_t generation = 0;
  std::vector<TreeProbability> trees;
};

struct ChainSummary {
  std::uint64_t seed = 0;
  /// Final-generation trees with their inclusion probabilities.
  std::vector<TreeProbability> trees;
  /// log of the posterior mass found in the final search space.
  double log_mass = 0.0;
  std::size_t generations = 0;
  /// Distinct models scored over the whole chain.
  std::size_t models_visited = 0;
  /// Distinct models seen during the final-generation run.
  std::size_t final_unique = 0;
  std::vector<PopulationSnapshot> history;
};

ChainSummary run_chain(const Dataset& data, const GmjmcmcConfig& cfg, std::uint64_t chain_seed);

/// Runs the final-generation phase only, on a caller-supplied population.
ChainSummary run_chain_on(const Population& pop, const Dataset& data, const GmjmcmcConfig& cfg,
                          std::uint64_t chain_seed);

/// Seed of chain b under the master seed.
std::uint64_t chain_seed(std::uint64_t master, std::size_t b);

/// cfg.chains independent chains on up to `threads` workers (0 = hardware
/// concurrency). Results are ordered by chain index.
std::vector<ChainSummary> run_chains(const Dataset& data, const GmjmcmcConfig& cfg, std::size_t threads = 0);

struct AggregatedTree {
  CanonicalKey key;
  std::string text;
  double prob = 0.0;
  std::vector<double> per_chain;
};

struct Aggregate {
  std::vector<double> weights;
  /// Sorted by key.
  std::vector<AggregatedTree> trees;
};

/// Weights w_b = softmax(log_mass_b); probability of a tree = sum_b w_b P_b.
/// Throws std::invalid_argument on empty input.
Aggregate aggregate(std::span<const ChainSummary> chains);

struct Detection {
  std::string text;
  double prob = 0.0;
  CanonicalKey key;
};

/// Trees with probability strictly above pi_c, by probability descending,
/// then text ascending.
std::vector<Detection> detect(const Aggregate& agg, double pi_c);

}  // namespace blr
