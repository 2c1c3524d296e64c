// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <string>

#include "blr/logic_tree.hpp"

namespace blr {

LogicTree LogicTree::leaf(std::uint32_t index, bool negated) {
  auto n = std::make_shared<Node>();
  n->is_leaf = true;
  n->negated = negated;
  n->index = index;
  n->max_index = index;
  n->size = 1;
  return LogicTree(std::move(n));
}

LogicTree LogicTree::join(Op op, LogicTree lhs, LogicTree rhs, bool negated) {
  auto n = std::make_shared<Node>();
  n->is_leaf = false;
  n->negated = negated;
  n->op = op;
  n->size = lhs.size() + rhs.size();
  n->max_index = std::max(lhs.max_index(), rhs.max_index());
  n->lhs = std::move(lhs.node_);
  n->rhs = std::move(rhs.node_);
  return LogicTree(std::move(n));
}

LogicTree LogicTree::negate() const {
  auto n = std::make_shared<Node>(*node_);
  n->negated = !n->negated;
  return LogicTree(std::move(n));
}

namespace {

template <typename Visit>
void for_each_leaf(const LogicTree& t, Visit&& visit) {
  if (t.is_leaf()) {
    visit(t);
    return;
  }
  for_each_leaf(t.lhs(), visit);
  for_each_leaf(t.rhs(), visit);
}

}  // namespace

std::vector<std::uint32_t> LogicTree::leaves() const {
  std::vector<std::uint32_t> out;
  out.reserve(size());
  for_each_leaf(*this, [&](const LogicTree& l) { out.push_back(l.index()); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<LogicTree> LogicTree::leaf_occurrences() const {
  std::vector<LogicTree> out;
  out.reserve(size());
  for_each_leaf(*this, [&](const LogicTree& l) { out.push_back(l); });
  return out;
}

bool LogicTree::evaluate(std::span<const std::uint8_t> row) const {
  bool v;
  if (is_leaf()) {
    if (index() >= row.size())
      throw std::out_of_range("leaf X" + std::to_string(index() + 1) + " outside a row of " +
                              std::to_string(row.size()) + " covariates");
    v = row[index()] != 0;
  } else {
    const bool a = lhs().evaluate(row);
    const bool b = rhs().evaluate(row);
    v = op() == Op::And ? (a && b) : (a || b);
  }
  return v != negated();
}

BitColumn LogicTree::evaluate(std::span<const BitColumn> columns) const {
  BitColumn v;
  if (is_leaf()) {
    if (index() >= columns.size())
      throw std::out_of_range("leaf X" + std::to_string(index() + 1) + " outside " + std::to_string(columns.size()) +
                              " covariate columns");
    v = columns[index()];
  } else {
    BitColumn a = lhs().evaluate(columns);
    BitColumn b = rhs().evaluate(columns);
    v = op() == Op::And ? (a & b) : (a | b);
  }
  return negated() ? ~v : v;
}

bool LogicTree::operator==(const LogicTree& o) const {
  if (node_ == o.node_) return true;
  if (is_leaf() != o.is_leaf() || negated() != o.negated() || size() != o.size()) return false;
  if (is_leaf()) return index() == o.index();
  return op() == o.op() && lhs() == o.lhs() && rhs() == o.rhs();
}

}  // namespace blr
