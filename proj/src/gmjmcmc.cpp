// SPDX-License-Identifier: Apache-2.0
#include "blr/gmjmcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "blr/parallel.hpp"

namespace blr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("config: " + msg);
}

bool unit(double p) { return p >= 0.0 && p <= 1.0; }

std::size_t draw_weighted(std::span<const double> w, Rng& rng) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) return uniform_index(rng, w.size());
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return i;
  }
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0.0) return i;
  return w.size() - 1;
}

LogicTree shrink_to_cap(LogicTree t, const GaOperatorParams& params, Rng& rng) {
  while (t.size() > params.c_max) t = reduce(t, params, rng);
  return t;
}

// Builds a population under construction while keeping feature keys unique.
class Filler {
 public:
  explicit Filler(std::uint32_t m) : m_(m) {}

  bool try_add(const LogicTree& t) {
    CanonicalKey k = feature_key(t);
    if (k.is_constant() || !seen_.insert(k).second) return false;
    trees_.push_back(t);
    return true;
  }
  bool contains(const LogicTree& t) const { return seen_.count(feature_key(t)) > 0; }

  // Uniform leaf whose feature is not yet present.
  std::optional<LogicTree> fresh_leaf(std::span<const std::uint32_t> candidates, Rng& rng) const {
    std::vector<std::uint32_t> free;
    for (auto j : candidates)
      if (!contains(LogicTree::leaf(j))) free.push_back(j);
    if (free.empty()) return std::nullopt;
    return LogicTree::leaf(free[uniform_index(rng, free.size())]);
  }

  std::vector<LogicTree>& trees() { return trees_; }
  std::uint32_t m() const { return m_; }

 private:
  std::uint32_t m_;
  std::vector<LogicTree> trees_;
  std::unordered_set<CanonicalKey, CanonicalKeyHash> seen_;
};

constexpr int kRetryBudget = 100;

std::vector<std::uint32_t> all_leaves(std::uint32_t m) {
  std::vector<std::uint32_t> v(m);
  for (std::uint32_t j = 0; j < m; ++j) v[j] = j;
  return v;
}

LogicTree random_tree(std::uint32_t m, const GaOperatorParams& params, Rng& rng) {
  LogicTree t = LogicTree::leaf(static_cast<std::uint32_t>(uniform_index(rng, m)));
  while (t.size() < params.c_max && bernoulli(rng, 0.5))
    t = crossover(t, LogicTree::leaf(static_cast<std::uint32_t>(uniform_index(rng, m))), params, rng);
  return t;
}

double feasible_models(std::size_t d, std::size_t k_max) {
  double total = 0.0, c = 1.0;
  for (std::size_t k = 0; k <= std::min(d, k_max); ++k) {
    total += c;
    c = c * static_cast<double>(d - k) / static_cast<double>(k + 1);
  }
  return total;
}

}  // namespace

const char* prior_name(PriorChoice p) { return p == PriorChoice::Jeffreys ? "jeffreys" : "robust_g"; }

PriorChoice parse_prior(std::string_view s) {
  if (s == "jeffreys") return PriorChoice::Jeffreys;
  if (s == "robust_g") return PriorChoice::RobustG;
  throw std::invalid_argument("unknown prior '" + std::string(s) + "' (expected jeffreys or robust_g)");
}

GmjmcmcConfig GmjmcmcConfig::preset(std::string_view row) {
  GmjmcmcConfig c;
  auto set = [&c](std::size_t ni, std::size_t ne, std::size_t mf, std::size_t tm, double pa, double pn,
                  std::uint32_t cm, std::uint32_t km, std::size_t d) {
    c.n_init = ni;
    c.n_expl = ne;
    c.m_fin = mf;
    c.t_max = tm;
    c.rho_min = 0.2;
    c.p_and = pa;
    c.p_not = pn;
    c.p_init = 0.5;
    c.p_c = 0.9;
    c.rho_del = 0.5;
    c.c_max = cm;
    c.k_max = km;
    c.d = d;
  };
  if (row == "1" || row == "2")
    set(300, 300, 10000, 16, 1.0, 0.2, 2, 10, 15);
  else if (row == "3")
    set(300, 300, 15000, 33, 0.9, 0.1, 5, 10, 15);
  else if (row == "4")
    set(300, 300, 10000, 33, 0.9, 0.1, 5, 10, 15);
  else if (row == "5")
    set(300, 300, 10000, 33, 0.9, 0.1, 5, 10, 20);
  else if (row == "6")
    set(250, 250, 20000, 40, 0.7, 0.1, 5, 20, 40);
  else if (row == "RD1")
    set(250, 250, 35000, 40, 0.7, 0.1, 5, 15, 25);
  else if (row == "RD2")
    set(250, 250, 15000, 40, 0.7, 0.1, 5, 15, 25);
  else
    throw std::invalid_argument("unknown tuning row '" + std::string(row) + "'");
  return c;
}

void GmjmcmcConfig::validate(std::size_t m) const {
  require(m >= 2, "at least 2 covariates are required");
  require(t_max >= 1, "T_max must be at least 1");
  require(m_fin >= 1, "M_fin must be at least 1");
  require(rho_min > 0.0 && rho_min < 1.0, "rho_min must lie in (0, 1)");
  require(unit(p_and) && unit(p_not) && unit(p_init) && unit(p_c) && unit(rho_del),
          "P_and, P_not, P_init, P_c and rho_del must lie in [0, 1]");
  require(c_max >= 1 && c_max <= kMaxKeyLeaves, "C_max must lie in [1, 16]");
  require(k_max >= 1, "k_max must be at least 1");
  require(d >= 1, "d must be at least 1");
  if (random_init)
    require(d >= k_max, "d must be at least k_max");
  else
    require(d >= static_cast<std::size_t>(k_max) + 1, "d - d1 >= k_max needs d > k_max (at least one founder)");
  require(chains >= 1, "at least one chain is required");
  require(a > 0.0 && a < 1.0, "a must lie in (0, 1)");
  if (prior == PriorChoice::RobustG) robust.validate();
  mjmcmc.validate();
}

std::uint32_t TreeRegistry::intern(const CanonicalKey& feature) {
  auto [it, fresh] = ids_.emplace(feature, static_cast<std::uint32_t>(keys_.size()));
  if (fresh) keys_.push_back(feature);
  return it->second;
}

PopulationTarget::PopulationTarget(const Population& pop, const Dataset& data, const GmjmcmcConfig& cfg,
                                   TreeRegistry& registry)
    : pop_(pop), data_(data), cfg_(cfg), prior_(cfg.prior_config(static_cast<std::uint32_t>(data.m))) {
  columns_.reserve(pop.size());
  ids_.reserve(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) {
    columns_.push_back(pop.tree(j).evaluate(data.x));
    ids_.push_back(registry.intern(pop.key(j)));
  }
  target_.d = pop.size();
  target_.k_max = cfg.k_max;
  target_.key = [this](const ModelIndex& m) {
    ModelKey k;
    for (auto j : m.included()) k.push_back(ids_[j]);
    std::sort(k.begin(), k.end());
    return k;
  };
  target_.score = [this](const ModelIndex& m) { return score(m); };
}

ScoreRecord PopulationTarget::score(const ModelIndex& m) const {
  const auto inc = m.included();
  std::vector<std::size_t> sizes;
  Design design;
  design.n = data_.n;
  for (auto j : inc) {
    sizes.push_back(pop_.tree(j).size());
    design.columns.push_back(columns_[j]);
  }
  ScoreRecord rec;
  rec.log_prior = prior_.log_prior(sizes);
  if (rec.log_prior == kNegInf || design.has_constant_column()) {
    rec.log_marglik = kNegInf;
  } else if (cfg_.prior == PriorChoice::Jeffreys) {
    rec.log_marglik = log_marglik_jeffreys(fit_glm(design, data_.y, data_.family), data_.n, inc.size());
  } else {
    rec.log_marglik = log_marglik_robust_g(design, data_.y, data_.family, cfg_.robust);
  }
  rec.log_post = rec.log_marglik == kNegInf ? kNegInf : rec.log_marglik + rec.log_prior;
  return rec;
}

ModelIndex initial_model(std::size_t d, double p_init, std::size_t k_max, Rng& rng) {
  ModelIndex m(d);
  for (std::size_t j = 0; j < d; ++j)
    if (bernoulli(rng, p_init)) m.set(j, true);
  auto inc = m.included();
  while (inc.size() > k_max) {
    const std::size_t r = uniform_index(rng, inc.size());
    m.set(inc[r], false);
    inc.erase(inc.begin() + static_cast<std::ptrdiff_t>(r));
  }
  return m;
}

InitResult initialize(const Dataset& data, const GmjmcmcConfig& cfg, PosteriorStore& store, TreeRegistry& registry,
                      Rng& rng) {
  const auto m = static_cast<std::uint32_t>(data.m);
  const GaOperatorParams params = cfg.operator_params();
  const std::vector<std::uint32_t> leaves = all_leaves(m);
  InitResult res;
  Filler fill(m);

  if (cfg.random_init) {
    for (std::size_t attempts = 0; fill.trees().size() < cfg.d; ++attempts) {
      if (attempts > 1000 * cfg.d) throw std::runtime_error("initialize: could not build a random population");
      fill.try_add(shrink_to_cap(random_tree(m, params, rng), params, rng));
    }
    res.population = Population(std::move(fill.trees()), 0, 1, cfg.c_max);
    return res;
  }

  std::vector<LogicTree> leaf_trees;
  for (auto j : leaves) leaf_trees.push_back(LogicTree::leaf(j));
  const Population leaf_pop(leaf_trees, 0, 0, cfg.c_max);
  const PopulationTarget target(leaf_pop, data, cfg, registry);
  run(target.target(), store, initial_model(m, cfg.p_init, cfg.k_max, rng), Budget::fixed(cfg.n_init), cfg.mjmcmc,
      rng);
  res.leaf_probs = inclusion_probs(store, target.ids()).probs;

  std::vector<std::uint32_t> order = leaves;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return res.leaf_probs[a] > res.leaf_probs[b]; });
  const std::size_t cap = cfg.d - cfg.k_max;
  std::vector<std::uint32_t> founders;
  for (auto j : order)
    if (res.leaf_probs[j] > cfg.rho_min && founders.size() < cap) founders.push_back(j);
  if (founders.empty()) founders.push_back(order.front());
  std::sort(founders.begin(), founders.end());

  for (auto j : founders) fill.try_add(LogicTree::leaf(j));
  while (fill.trees().size() < cfg.d) {
    bool added = false;
    for (int r = 0; r < kRetryBudget && !added; ++r) {
      const LogicTree a = LogicTree::leaf(founders[uniform_index(rng, founders.size())]);
      const LogicTree b = LogicTree::leaf(founders[uniform_index(rng, founders.size())]);
      added = fill.try_add(shrink_to_cap(crossover(a, b, params, rng), params, rng));
    }
    if (added) continue;
    if (auto leaf = fill.fresh_leaf(leaves, rng)) {
      fill.try_add(*leaf);
      continue;
    }
    // Every leaf is in use: combine arbitrary members instead.
    for (int r = 0; r < 100 * kRetryBudget && !added; ++r) {
      auto& ts = fill.trees();
      const LogicTree a = ts[uniform_index(rng, ts.size())];
      const LogicTree b = ts[uniform_index(rng, ts.size())];
      added = fill.try_add(shrink_to_cap(crossover(a, b, params, rng), params, rng));
    }
    if (!added) throw std::runtime_error("initialize: cannot find " + std::to_string(cfg.d) + " distinct trees");
  }
  res.population = Population(std::move(fill.trees()), founders.size(), 1, cfg.c_max);
  return res;
}

Population evolve(const Population& pop, std::span<const double> probs, std::uint32_t m, const GmjmcmcConfig& cfg,
                  Rng& rng) {
  if (probs.size() != pop.size()) throw std::invalid_argument("evolve: one probability per tree is required");
  const GaOperatorParams params = cfg.operator_params();
  const std::size_t d1 = pop.founders();

  std::vector<bool> drop(pop.size(), false);
  for (std::size_t j = d1; j < pop.size(); ++j) drop[j] = probs[j] < cfg.rho_min;

  Filler fill(m);
  for (std::size_t j = 0; j < pop.size(); ++j)
    if (!drop[j]) fill.try_add(pop.tree(j));

  std::vector<std::uint32_t> mutation_leaves;
  {
    const auto founders = pop.founder_leaves();
    for (std::uint32_t j = 0; j < m; ++j)
      if (std::find(founders.begin(), founders.end(), j) == founders.end()) mutation_leaves.push_back(j);
  }

  std::vector<LogicTree> next;
  next.reserve(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) {
    if (!drop[j]) {
      next.push_back(pop.tree(j));
      continue;
    }
    std::optional<LogicTree> child;
    for (int r = 0; r < kRetryBudget && !child; ++r) {
      const LogicTree& p1 = pop.tree(draw_weighted(probs, rng));
      LogicTree c = [&] {
        if (mutation_leaves.empty() || bernoulli(rng, cfg.p_c))
          return crossover(p1, pop.tree(draw_weighted(probs, rng)), params, rng);
        const LogicTree leaf = LogicTree::leaf(mutation_leaves[uniform_index(rng, mutation_leaves.size())]);
        return mutate(p1, leaf, pop.founder_leaves(), params, rng);
      }();
      c = shrink_to_cap(std::move(c), params, rng);
      if (fill.try_add(c)) child = std::move(c);
    }
    if (!child) {
      child = fill.fresh_leaf(mutation_leaves, rng);
      if (child) fill.try_add(*child);
    }
    // No new tree found: reinstate a deleted tree whose feature is still free.
    // There is always one, since each earlier replacement took at most one.
    for (std::size_t k = j; !child; k = (k + 1) % pop.size())
      if (drop[k] && fill.try_add(pop.tree(k))) child = pop.tree(k);
    next.push_back(std::move(*child));
  }
  return Population(std::move(next), d1, pop.generation() + 1, cfg.c_max);
}

namespace {

std::vector<TreeProbability> tree_probs(const Population& pop, std::span<const double> probs) {
  std::vector<TreeProbability> out;
  out.reserve(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) out.push_back({pop.key(j), to_string(pop.tree(j)), probs[j]});
  return out;
}

void final_phase(const Population& pop, const Dataset& data, const GmjmcmcConfig& cfg, PosteriorStore& store,
                 TreeRegistry& registry, Rng& rng, ChainSummary& summary) {
  const PopulationTarget target(pop, data, cfg, registry);
  const double feasible = feasible_models(pop.size(), cfg.k_max);
  const auto goal = static_cast<std::size_t>(std::min(static_cast<double>(cfg.m_fin), feasible));
  const RunResult r = run(target.target(), store, initial_model(pop.size(), cfg.p_init, cfg.k_max, rng),
                          Budget::unique(goal, 100 * cfg.m_fin), cfg.mjmcmc, rng);
  const InclusionResult inc = inclusion_probs(store, target.ids());
  summary.trees = tree_probs(pop, inc.probs);
  summary.log_mass = inc.log_mass;
  summary.final_unique = r.unique_visited;
  summary.models_visited = store.size();
  if (cfg.trace_populations) summary.history.push_back({pop.generation(), summary.trees});
}

}  // namespace

ChainSummary run_chain(const Dataset& data, const GmjmcmcConfig& cfg, std::uint64_t seed) {
  cfg.validate(data.m);
  Rng rng(seed);
  PosteriorStore store;
  TreeRegistry registry;
  ChainSummary summary;
  summary.seed = seed;

  Population pop = initialize(data, cfg, store, registry, rng).population;
  for (std::size_t t = 1; t < cfg.t_max; ++t) {
    std::vector<double> probs;
    {
      const PopulationTarget target(pop, data, cfg, registry);
      run(target.target(), store, initial_model(pop.size(), cfg.p_init, cfg.k_max, rng), Budget::fixed(cfg.n_expl),
          cfg.mjmcmc, rng);
      probs = inclusion_probs(store, target.ids()).probs;
    }
    if (cfg.trace_populations) summary.history.push_back({pop.generation(), tree_probs(pop, probs)});
    pop = evolve(pop, probs, static_cast<std::uint32_t>(data.m), cfg, rng);
  }
  summary.generations = cfg.t_max;
  final_phase(pop, data, cfg, store, registry, rng, summary);
  return summary;
}

ChainSummary run_chain_on(const Population& pop, const Dataset& data, const GmjmcmcConfig& cfg, std::uint64_t seed) {
  cfg.validate(data.m);
  if (pop.size() < cfg.k_max) throw std::invalid_argument("run_chain_on: population smaller than k_max");
  Rng rng(seed);
  PosteriorStore store;
  TreeRegistry registry;
  ChainSummary summary;
  summary.seed = seed;
  summary.generations = 1;
  final_phase(pop, data, cfg, store, registry, rng, summary);
  return summary;
}

std::uint64_t chain_seed(std::uint64_t master, std::size_t b) { return derive_seed(master, 1, b); }

std::vector<ChainSummary> run_chains(const Dataset& data, const GmjmcmcConfig& cfg, std::size_t threads) {
  cfg.validate(data.m);
  std::vector<ChainSummary> out(cfg.chains);
  parallel_for(cfg.chains, resolve_threads(threads),
               [&](std::size_t b) { out[b] = run_chain(data, cfg, chain_seed(cfg.seed, b)); });
  return out;
}

}  // namespace blr
