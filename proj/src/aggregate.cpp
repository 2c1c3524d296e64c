// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "blr/gmjmcmc.hpp"

namespace blr {

Aggregate aggregate(std::span<const ChainSummary> chains) {
  if (chains.empty()) throw std::invalid_argument("aggregate: no chains");
  const std::size_t b = chains.size();
  Aggregate agg;
  agg.weights.assign(b, 0.0);

  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& c : chains) mx = std::max(mx, c.log_mass);
  if (!std::isfinite(mx)) {
    std::fill(agg.weights.begin(), agg.weights.end(), 1.0 / static_cast<double>(b));
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) total += agg.weights[i] = std::exp(chains[i].log_mass - mx);
    for (auto& w : agg.weights) w /= total;
  }

  std::map<CanonicalKey, AggregatedTree> by_key;
  for (std::size_t i = 0; i < b; ++i) {
    for (const auto& t : chains[i].trees) {
      auto [it, fresh] = by_key.try_emplace(t.key);
      AggregatedTree& a = it->second;
      if (fresh) {
        a.key = t.key;
        a.text = t.text;
        a.per_chain.assign(b, 0.0);
      }
      a.per_chain[i] = t.prob;
    }
  }
  agg.trees.reserve(by_key.size());
  for (auto& [k, a] : by_key) {
    double p = 0.0;
    for (std::size_t i = 0; i < b; ++i) p += agg.weights[i] * a.per_chain[i];
    a.prob = std::clamp(p, 0.0, 1.0);
    agg.trees.push_back(std::move(a));
  }
  return agg;
}

std::vector<Detection> detect(const Aggregate& agg, double pi_c) {
  if (!(pi_c > 0.0 && pi_c < 1.0)) throw std::invalid_argument("detect: threshold must lie in (0, 1)");
  std::vector<Detection> out;
  for (const auto& t : agg.trees)
    if (t.prob > pi_c) out.push_back({t.text, t.prob, t.key});
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.text < b.text;
  });
  return out;
}

}  // namespace blr
