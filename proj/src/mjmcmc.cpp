// SPDX-License-Identifier: Apache-2.0
#include "blr/mjmcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}
}  // namespace

std::size_t ModelKeyHash::operator()(const ModelKey& k) const {
  std::uint64_t h = 0x51ed270b27a3c4f1ULL ^ k.size();
  for (auto v : k) h = mix64(h ^ v);
  return static_cast<std::size_t>(h);
}

const ScoreRecord* PosteriorStore::find(const ModelKey& key) const {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : &it->second;
}

bool PosteriorStore::insert(const ModelKey& key, const ScoreRecord& rec) {
  if (!map_.emplace(key, rec).second) return false;
  log_mass_ = log_add(log_mass_, rec.log_post);
  return true;
}

double PosteriorStore::recompute_log_mass() const {
  double mx = kNegInf;
  for (const auto& [k, r] : map_) mx = std::max(mx, r.log_post);
  if (mx == kNegInf) return mx;
  double s = 0.0;
  for (const auto& [k, r] : map_) s += std::exp(r.log_post - mx);
  return mx + std::log(s);
}

SearchTarget indexed_target(std::size_t d, std::size_t k_max, std::function<double(const ModelIndex&)> log_post) {
  SearchTarget t;
  t.d = d;
  t.k_max = k_max;
  t.key = [](const ModelIndex& m) {
    ModelKey k;
    for (auto j : m.included()) k.push_back(static_cast<std::uint32_t>(j));
    return k;
  };
  t.score = [f = std::move(log_post)](const ModelIndex& m) {
    const double lp = f(m);
    return ScoreRecord{lp, 0.0, lp};
  };
  return t;
}

void MjmcmcConfig::validate() const {
  if (!(p_jump >= 0.0 && p_jump <= 1.0)) throw std::invalid_argument("mjmcmc: p_jump must lie in [0, 1]");
  if (!(flip_prob >= 0.0 && flip_prob < 1.0)) throw std::invalid_argument("mjmcmc: flip_prob must lie in [0, 1)");
}

Mjmcmc::Mjmcmc(const SearchTarget& target, PosteriorStore& store, const MjmcmcConfig& cfg)
    : target_(target), store_(store), cfg_(cfg) {
  cfg_.validate();
  ascent_cap_ = cfg_.ascent_cap ? cfg_.ascent_cap : 2 * target_.d;
  flip_prob_ = cfg_.flip_prob > 0.0 ? cfg_.flip_prob : (target_.d ? 1.0 / static_cast<double>(target_.d) : 0.0);
}

double Mjmcmc::log_post(const ModelIndex& m) {
  if (m.count() > target_.k_max) return kNegInf;
  ModelKey key = target_.key(m);
  double lp;
  if (const ScoreRecord* r = store_.find(key)) {
    lp = r->log_post;
  } else {
    const ScoreRecord rec = target_.score(m);
    store_.insert(key, rec);
    lp = rec.log_post;
  }
  seen_.insert(std::move(key));
  return lp;
}

ModelIndex Mjmcmc::small_flip_step(const ModelIndex& state, Rng& rng) {
  if (target_.d == 0) return state;
  ++stats_.flips_proposed;
  const double lp = log_post(state);
  ModelIndex prop = state;
  prop.flip(uniform_index(rng, target_.d));
  if (prop.count() > target_.k_max) return state;
  const double lp_new = log_post(prop);
  bool accept;
  if (lp_new == kNegInf)
    accept = false;
  else if (lp == kNegInf || lp_new >= lp)
    accept = true;
  else
    accept = uniform01(rng) < std::exp(lp_new - lp);
  if (!accept) return state;
  ++stats_.flips_accepted;
  return prop;
}

ModelIndex Mjmcmc::ascend(ModelIndex cur) {
  auto excess = [this](const ModelIndex& m) {
    const std::size_t c = m.count();
    return c > target_.k_max ? c - target_.k_max : 0;
  };
  std::size_t cur_ex = excess(cur);
  double cur_lp = cur_ex ? kNegInf : log_post(cur);
  for (std::size_t step = 0; step < ascent_cap_; ++step) {
    std::size_t best = target_.d;
    std::size_t best_ex = cur_ex;
    double best_lp = cur_lp;
    for (std::size_t j = 0; j < target_.d; ++j) {
      cur.flip(j);
      const std::size_t ex = excess(cur);
      const double lp = ex ? kNegInf : log_post(cur);
      cur.flip(j);
      if (ex < best_ex || (ex == best_ex && lp > best_lp)) {
        best = j;
        best_ex = ex;
        best_lp = lp;
      }
    }
    if (best == target_.d) break;
    cur.flip(best);
    cur_ex = best_ex;
    cur_lp = best_lp;
  }
  return cur;
}

double Mjmcmc::log_q(const ModelIndex& to, const ModelIndex& from) const {
  const double h = static_cast<double>(to.hamming(from));
  const double d = static_cast<double>(target_.d);
  return h * std::log(flip_prob_) + (d - h) * std::log1p(-flip_prob_);
}

ModelIndex Mjmcmc::mode_jump_step(const ModelIndex& state, Rng& rng) {
  const std::size_t d = target_.d;
  if (d == 0) return state;
  ++stats_.jumps_proposed;
  const double lp = log_post(state);

  const std::size_t lo = std::max<std::size_t>(1, (d + 3) / 4);
  const std::size_t hi = std::max(lo, std::min(d, (d + 1) / 2));
  const std::size_t k = lo + uniform_index(rng, hi - lo + 1);
  std::vector<std::size_t> positions(d);
  for (std::size_t j = 0; j < d; ++j) positions[j] = j;
  for (std::size_t i = 0; i < k; ++i) std::swap(positions[i], positions[i + uniform_index(rng, d - i)]);
  positions.resize(k);

  ModelIndex jumped = state;
  for (auto j : positions) jumped.flip(j);
  const ModelIndex mode = ascend(std::move(jumped));

  ModelIndex prop = mode;
  for (std::size_t j = 0; j < d; ++j)
    if (bernoulli(rng, flip_prob_)) prop.flip(j);
  if (prop.count() > target_.k_max) return state;
  const double lp_new = log_post(prop);
  if (lp_new == kNegInf) return state;

  ModelIndex back = prop;
  for (auto j : positions) back.flip(j);
  const ModelIndex back_mode = ascend(std::move(back));

  bool accept = lp == kNegInf;
  if (!accept) {
    const double log_alpha = lp_new + log_q(state, back_mode) - lp - log_q(prop, mode);
    accept = log_alpha >= 0.0 || uniform01(rng) < std::exp(log_alpha);
  }
  if (!accept) return state;
  ++stats_.jumps_accepted;
  return prop;
}

ModelIndex Mjmcmc::step(const ModelIndex& state, Rng& rng) {
  return bernoulli(rng, cfg_.p_jump) ? mode_jump_step(state, rng) : small_flip_step(state, rng);
}

RunResult run(const SearchTarget& target, PosteriorStore& store, const ModelIndex& init, const Budget& budget,
              const MjmcmcConfig& cfg, Rng& rng) {
  if (init.size() != target.d) throw std::invalid_argument("mjmcmc run: initial model has the wrong length");
  Mjmcmc sampler(target, store, cfg);
  RunResult res;
  res.last = init;
  sampler.log_post(init);
  if (budget.steps > 0) {
    for (; res.steps < budget.steps; ++res.steps) res.last = sampler.step(res.last, rng);
  } else if (budget.unique_target > 0) {
    while (sampler.unique_visited() < budget.unique_target && res.steps < budget.max_steps) {
      res.last = sampler.step(res.last, rng);
      ++res.steps;
    }
  }
  res.unique_visited = sampler.unique_visited();
  res.stats = sampler.stats();
  return res;
}

std::vector<std::pair<ModelKey, double>> renormalized_posterior(const PosteriorStore& store) {
  if (store.empty()) throw std::invalid_argument("renormalized_posterior: empty store");
  const double lse = store.recompute_log_mass();
  std::vector<std::pair<ModelKey, double>> out;
  out.reserve(store.size());
  for (const auto& [k, r] : store.entries())
    out.emplace_back(k, lse == kNegInf ? 0.0 : std::exp(r.log_post - lse));
  std::sort(out.begin(), out.end());
  return out;
}

InclusionResult inclusion_probs(const PosteriorStore& store, std::span<const std::uint32_t> ids) {
  if (store.empty()) throw std::invalid_argument("inclusion_probs: empty store");
  std::unordered_map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos.emplace(ids[i], i);

  std::vector<const std::pair<const ModelKey, ScoreRecord>*> usable;
  double mx = kNegInf;
  for (const auto& e : store.entries()) {
    const bool inside = std::all_of(e.first.begin(), e.first.end(), [&](std::uint32_t t) { return pos.count(t) > 0; });
    if (!inside) continue;
    usable.push_back(&e);
    mx = std::max(mx, e.second.log_post);
  }
  InclusionResult res;
  res.probs.assign(ids.size(), 0.0);
  res.models = usable.size();
  if (mx == kNegInf) return res;
  // Fixed summation order.
  std::sort(usable.begin(), usable.end(), [](auto* a, auto* b) { return a->first < b->first; });
  double total = 0.0;
  for (auto* e : usable) total += std::exp(e->second.log_post - mx);
  res.log_mass = mx + std::log(total);
  for (auto* e : usable) {
    const double p = std::exp(e->second.log_post - res.log_mass);
    for (auto t : e->first) res.probs[pos[t]] += p;
  }
  for (auto& p : res.probs) p = std::min(p, 1.0);
  return res;
}

}  // namespace blr
