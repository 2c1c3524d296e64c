// SPDX-License-Identifier: Apache-2.0
#pragma once

// Boolean expressions over binary covariates ("trees"), their canonical
// equivalence keys, a textual syntax, and the genetic operators that build
// new trees from existing ones.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blr/bit_column.hpp"
#include "blr/rng.hpp"

namespace blr {

enum class Op : std::uint8_t { And, Or };

/// Immutable Boolean expression. A node is either a leaf (covariate index,
/// 0-based) or a binary AND/OR of two subtrees; any node may carry a
/// negation flag. Subtrees are shared, so copies are cheap.
class LogicTree {
 public:
  static LogicTree leaf(std::uint32_t index, bool negated = false);
  static LogicTree join(Op op, LogicTree lhs, LogicTree rhs, bool negated = false);

  bool is_leaf() const { return node_->is_leaf; }
  bool negated() const { return node_->negated; }
  /// Leaf only.
  std::uint32_t index() const { return node_->index; }
  /// Binary node only.
  Op op() const { return node_->op; }
  LogicTree lhs() const { return LogicTree(node_->lhs); }
  LogicTree rhs() const { return LogicTree(node_->rhs); }

  /// Number of leaf occurrences, s(L).
  std::size_t size() const { return node_->size; }
  /// Sorted distinct covariate indices, v(L).
  std::vector<std::uint32_t> leaves() const;
  /// Leaf occurrences in left-to-right order.
  std::vector<LogicTree> leaf_occurrences() const;
  std::uint32_t max_index() const { return node_->max_index; }

  LogicTree negate() const;

  /// Value of the expression for one observation; row[j] != 0 means X_j is
  /// TRUE. Throws std::out_of_range if a leaf index is >= row.size().
  bool evaluate(std::span<const std::uint8_t> row) const;

  /// Value for every observation at once, given the covariate columns.
  /// Throws std::out_of_range if a leaf index is >= columns.size().
  BitColumn evaluate(std::span<const BitColumn> columns) const;

  /// Structural equality (same shape, operators, indices, flags).
  bool operator==(const LogicTree& o) const;

 private:
  struct Node {
    bool is_leaf = true;
    bool negated = false;
    Op op = Op::And;
    std::uint32_t index = 0;
    std::uint32_t max_index = 0;
    std::size_t size = 1;
    std::shared_ptr<const Node> lhs, rhs;
  };
  explicit LogicTree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Text form: leaves X1..Xm (1-based), `&`, `|`, prefix `!`, parentheses.
// `!` binds tighter than `&`, which binds tighter than `|`.

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string to_string(const LogicTree& tree);
LogicTree parse_tree(std::string_view text);

// ---------------------------------------------------------------------------
// Canonical keys.

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Identity of the Boolean function a tree computes. `leaves` holds the
/// sorted indices the function actually depends on; `table` holds its truth
/// table over 2^|leaves| assignments, where bit a of the table is the value
/// when leaves[k] = (a >> k) & 1.
struct CanonicalKey {
  std::vector<std::uint32_t> leaves;
  std::vector<std::uint64_t> table;

  std::size_t table_bits() const { return std::size_t{1} << leaves.size(); }
  /// Same leaf set, negated function.
  CanonicalKey complement() const;
  bool is_constant() const { return leaves.empty(); }

  auto operator<=>(const CanonicalKey&) const = default;
  bool operator==(const CanonicalKey&) const = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const;
};

inline constexpr std::size_t kMaxKeyLeaves = 16;

/// Throws CapacityError if the tree has more than kMaxKeyLeaves distinct leaves.
CanonicalKey canonical_key(const LogicTree& tree);

/// Key identifying the regression feature a tree induces. L and its
/// complement give the same fitted model once an intercept is present, so
/// this picks whichever of key(L), key(L)^c is FALSE at the all-zero
/// assignment.
CanonicalKey feature_key(const LogicTree& tree);
CanonicalKey feature_key(const CanonicalKey& key);

// ---------------------------------------------------------------------------
// Genetic operators.

struct GaOperatorParams {
  double p_and = 0.9;
  double p_not = 0.1;
  double rho_del = 0.5;
  std::uint32_t c_max = 5;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// (a or a^c) op (b or b^c).
LogicTree combine(const LogicTree& a, bool negate_a, const LogicTree& b, bool negate_b, Op op);

/// Each parent negated with probability p_not, then joined by AND with
/// probability p_and, else OR. The result is not size-capped.
LogicTree crossover(const LogicTree& parent1, const LogicTree& parent2, const GaOperatorParams& params, Rng& rng);

/// Crossover of `parent` with the single leaf `leaf`, which must not be one of
/// the founder leaves (std::invalid_argument otherwise).
LogicTree mutate(const LogicTree& parent, const LogicTree& leaf, std::span<const std::uint32_t> founder_leaves,
                 const GaOperatorParams& params, Rng& rng);

/// Deterministic core of the reduction operator. `remove[k]` marks the k-th
/// leaf occurrence (left to right) for deletion; at least one leaf must be
/// kept. A removed leaf takes its parent operator with it. Where a deletion
/// leaves a gap between two surviving parts, `rejoin()` chooses the operator
/// that joins them.
LogicTree prune(const LogicTree& tree, const std::vector<bool>& remove, const std::function<Op()>& rejoin);

/// Random reduction: each leaf deleted with probability rho_del; if every
/// leaf is marked, one uniformly chosen leaf is kept.
LogicTree reduce(const LogicTree& tree, const GaOperatorParams& params, Rng& rng);

}  // namespace blr
