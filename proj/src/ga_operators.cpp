// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <optional>
#include <string>

#include "blr/logic_tree.hpp"

namespace blr {

void GaOperatorParams::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  };
  prob(p_and, "P_and");
  prob(p_not, "P_not");
  prob(rho_del, "rho_del");
  if (c_max < 1) throw std::invalid_argument("C_max must be at least 1");
}

LogicTree combine(const LogicTree& a, bool negate_a, const LogicTree& b, bool negate_b, Op op) {
  return LogicTree::join(op, negate_a ? a.negate() : a, negate_b ? b.negate() : b);
}

LogicTree crossover(const LogicTree& parent1, const LogicTree& parent2, const GaOperatorParams& params, Rng& rng) {
  const bool n1 = bernoulli(rng, params.p_not);
  const bool n2 = bernoulli(rng, params.p_not);
  const Op op = bernoulli(rng, params.p_and) ? Op::And : Op::Or;
  return combine(parent1, n1, parent2, n2, op);
}

LogicTree mutate(const LogicTree& parent, const LogicTree& leaf, std::span<const std::uint32_t> founder_leaves,
                 const GaOperatorParams& params, Rng& rng) {
  if (!leaf.is_leaf()) throw std::invalid_argument("mutate: second parent must be a single leaf");
  if (std::find(founder_leaves.begin(), founder_leaves.end(), leaf.index()) != founder_leaves.end())
    throw std::invalid_argument("mutate: leaf X" + std::to_string(leaf.index() + 1) + " belongs to the founder set");
  return crossover(parent, leaf, params, rng);
}

namespace {

struct Pruned {
  std::optional<LogicTree> tree;
  bool lost_first = false;  // the leftmost leaf of this subtree was removed
  bool lost_last = false;   // the rightmost leaf of this subtree was removed
};

Pruned prune_rec(const LogicTree& t, const std::vector<bool>& remove, std::size_t& next,
                 const std::function<Op()>& rejoin) {
  if (t.is_leaf()) {
    if (remove[next++]) return {std::nullopt, true, true};
    return {t, false, false};
  }
  Pruned l = prune_rec(t.lhs(), remove, next, rejoin);
  Pruned r = prune_rec(t.rhs(), remove, next, rejoin);
  if (!l.tree && !r.tree) return {std::nullopt, true, true};
  if (!r.tree) return {t.negated() ? l.tree->negate() : *l.tree, l.lost_first, true};
  if (!l.tree) return {t.negated() ? r.tree->negate() : *r.tree, true, r.lost_last};
  // A gap between the two survivors: the operator that spanned it is gone.
  const Op op = (l.lost_last || r.lost_first) ? rejoin() : t.op();
  return {LogicTree::join(op, *l.tree, *r.tree, t.negated()), l.lost_first, r.lost_last};
}

}  // namespace

LogicTree prune(const LogicTree& tree, const std::vector<bool>& remove, const std::function<Op()>& rejoin) {
  if (remove.size() != tree.size()) throw std::invalid_argument("prune: mask length must equal tree size");
  if (std::all_of(remove.begin(), remove.end(), [](bool b) { return b; }))
    throw std::invalid_argument("prune: at least one leaf must be kept");
  std::size_t next = 0;
  return *prune_rec(tree, remove, next, rejoin).tree;
}

LogicTree reduce(const LogicTree& tree, const GaOperatorParams& params, Rng& rng) {
  if (tree.size() < 2) throw std::invalid_argument("reduce: tree must have at least two leaves");
  std::vector<bool> remove(tree.size());
  for (std::size_t i = 0; i < remove.size(); ++i) remove[i] = bernoulli(rng, params.rho_del);
  if (std::all_of(remove.begin(), remove.end(), [](bool b) { return b; })) remove[uniform_index(rng, remove.size())] = false;
  return prune(tree, remove, [&] { return bernoulli(rng, params.p_and) ? Op::And : Op::Or; });
}

}  // namespace blr
