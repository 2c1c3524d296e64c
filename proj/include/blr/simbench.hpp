// SPDX-License-Identifier: Apache-2.0
#pragma once

// Simulation scenarios with known data-generating trees, detection scoring
// against them, and power curves for a single target tree.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blr/dataset.hpp"
#include "blr/gmjmcmc.hpp"
#include "blr/logic_tree.hpp"

namespace blr {

struct ScenarioTerm {
  std::string text;
  LogicTree tree;
  double beta = 0.0;
  /// Expressions whose joint detection also counts as finding this term
  /// (empty for most terms).
  std::vector<LogicTree> equivalent_parts;
};

struct Scenario {
  int id = 0;
  Family family = Family::Binomial;
  double rate = 0.5;
  double intercept = 0.0;
  double sigma = 1.0;
  std::uint32_t m = 50;
  std::vector<ScenarioTerm> terms;
  /// Tuning row used by default for this scenario.
  std::string tuning_row;

  double linear_predictor(std::span<const std::uint8_t> row) const;
};

/// Scenarios 1-6 in id order.
const std::vector<Scenario>& scenarios();
/// Throws std::invalid_argument for unknown ids.
const Scenario& scenario(int id);

/// n rows of m Bernoulli(rate) covariates and a response drawn from the
/// scenario's model. Deterministic in the seed.
Dataset generate(const Scenario& s, std::size_t n, std::uint64_t seed);

enum class DetectionClass { TruePositive, SingleTreeLeaves, ModelLeaves, WrongLeaves };

const char* class_name(DetectionClass c);

struct Classification {
  DetectionClass cls = DetectionClass::WrongLeaves;
  /// Term index for TruePositive and SingleTreeLeaves, else -1.
  int term = -1;
  /// Leaves outside the data-generating model (WrongLeaves only).
  std::size_t wrong_leaves = 0;
};

/// TP if the tree (or its complement) computes a true tree's function; else
/// v(L_j) if its effective leaves lie inside one true tree; else v(M) if they
/// lie inside the union of true leaves; else WL(s).
Classification classify(const LogicTree& detected, const Scenario& s);

struct DetectionReport {
  std::size_t replicates = 0;
  bool l8_equivalence = false;
  std::vector<std::size_t> hits;
  std::vector<double> power;
  double overall_power = 0.0;
  double fp_mean = 0.0;
  double fdr = 0.0;
  /// Distinct wrong leaves per replicate, summed over replicates.
  std::size_t wl_total = 0;
  std::vector<std::size_t> single_tree_counts;  // v(L_j)
  std::size_t model_leaf_count = 0;             // v(M)
  std::size_t wl1 = 0, wl2 = 0, wl3plus = 0;    // WL(s)
};

/// `runs[r]` lists the trees detected in replicate r. With l8_equivalence,
/// a term with equivalent_parts counts as found in a replicate detecting all
/// of its parts, and those detections are then not false positives.
DetectionReport score_runs(std::span<const std::vector<LogicTree>> runs, const Scenario& s, bool l8_equivalence);

struct BenchOptions {
  int scenario = 1;
  std::size_t n = 1000;
  std::size_t replicates = 20;
  GmjmcmcConfig cfg;
  double threshold = 0.5;
  std::size_t threads = 0;
  /// Covariate count override (0 keeps the scenario's m).
  std::uint32_t m = 0;
};

struct ReplicateResult {
  std::uint64_t data_seed = 0;
  std::vector<Detection> detections;
  std::vector<double> weights;
};

struct BenchResult {
  std::vector<ReplicateResult> replicates;
  DetectionReport raw;
  /// Same runs scored with the term-equivalence rule.
  DetectionReport adjusted;
};

/// Replicate r uses data seed derive_seed(cfg.seed, 2, r) and chain seeds
/// derived from derive_seed(cfg.seed, 3, r). All (replicate, chain) jobs
/// share one worker pool.
BenchResult bench(const BenchOptions& opts);

enum class SweepAxis { Beta4, SampleSize, PopulationSize };

const char* axis_name(SweepAxis a);
/// "beta4" | "n" | "d"; throws std::invalid_argument otherwise.
SweepAxis parse_axis(std::string_view s);
/// "lo:hi:count" (count evenly spaced points) or a comma list.
std::vector<double> parse_grid(std::string_view s);

struct SweepOptions {
  SweepAxis axis = SweepAxis::Beta4;
  std::vector<double> grid;
  std::size_t replicates = 10;
  std::size_t n = 1000;
  double beta4 = 7.0;
  /// Scenario 5 row with k_max = 20 and d = 30 unless overridden.
  GmjmcmcConfig cfg = default_sweep_config();
  double threshold = 0.5;
  std::size_t threads = 0;
  std::uint32_t m = 0;

  static GmjmcmcConfig default_sweep_config();
};

struct SweepPoint {
  double value = 0.0;
  std::size_t replicates = 0;
  std::size_t hits = 0;
  double power = 0.0;
};

/// Power to detect Scenario 5's four-way tree at each grid value. Throws
/// std::invalid_argument for an empty or decreasing grid.
std::vector<SweepPoint> sweep(const SweepOptions& opts);

}  // namespace blr
