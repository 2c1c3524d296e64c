// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <string>

#include "blr/logic_tree.hpp"
#include "blr/rng.hpp"

namespace blr {
namespace {

using Table = std::vector<std::uint64_t>;

std::size_t words_for_vars(std::size_t k) { return std::max<std::size_t>(1, (std::size_t{1} << k) / 64); }

std::uint64_t low_mask(std::size_t bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

// Truth table of the projection onto variable p among k variables.
Table variable_table(std::size_t p, std::size_t k) {
  static constexpr std::uint64_t kPattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                                0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  Table t(words_for_vars(k));
  for (std::size_t w = 0; w < t.size(); ++w) {
    if (p < 6)
      t[w] = kPattern[p];
    else
      t[w] = ((w >> (p - 6)) & 1U) ? ~std::uint64_t{0} : 0;
  }
  t[0] &= low_mask(std::size_t{1} << k);
  return t;
}

Table eval_table(const LogicTree& t, const std::vector<std::uint32_t>& leaves, const std::vector<Table>& vars,
                 std::size_t k) {
  Table out;
  if (t.is_leaf()) {
    auto it = std::lower_bound(leaves.begin(), leaves.end(), t.index());
    out = vars[static_cast<std::size_t>(it - leaves.begin())];
  } else {
    Table a = eval_table(t.lhs(), leaves, vars, k);
    Table b = eval_table(t.rhs(), leaves, vars, k);
    out.resize(a.size());
    for (std::size_t w = 0; w < a.size(); ++w) out[w] = t.op() == Op::And ? (a[w] & b[w]) : (a[w] | b[w]);
  }
  if (t.negated()) {
    for (auto& w : out) w = ~w;
    out[0] &= low_mask(std::size_t{1} << k);
  }
  return out;
}

bool bit(const Table& t, std::size_t a) { return (t[a / 64] >> (a % 64)) & 1U; }

// Drop variable p from a k-variable table that does not depend on it.
Table drop_variable(const Table& t, std::size_t p, std::size_t k) {
  Table out(words_for_vars(k - 1), 0);
  const std::size_t n = std::size_t{1} << (k - 1);
  const std::size_t low = (std::size_t{1} << p) - 1;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t src = (a & low) | ((a & ~low) << 1);
    if (bit(t, src)) out[a / 64] |= std::uint64_t{1} << (a % 64);
  }
  return out;
}

bool depends_on(const Table& t, std::size_t p, std::size_t k) {
  const std::size_t n = std::size_t{1} << k;
  const std::size_t stride = std::size_t{1} << p;
  for (std::size_t a = 0; a < n; ++a)
    if (!(a & stride) && bit(t, a) != bit(t, a | stride)) return true;
  return false;
}

}  // namespace

CanonicalKey CanonicalKey::complement() const {
  CanonicalKey c = *this;
  for (auto& w : c.table) w = ~w;
  c.table[0] &= low_mask(table_bits());
  return c;
}

std::size_t CanonicalKeyHash::operator()(const CanonicalKey& k) const {
  std::uint64_t h = mix64(k.leaves.size());
  for (auto l : k.leaves) h = mix64(h ^ l);
  for (auto w : k.table) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

CanonicalKey canonical_key(const LogicTree& tree) {
  std::vector<std::uint32_t> leaves = tree.leaves();
  if (leaves.size() > kMaxKeyLeaves)
    throw CapacityError("tree has " + std::to_string(leaves.size()) + " distinct leaves; keys support at most " +
                        std::to_string(kMaxKeyLeaves));
  std::size_t k = leaves.size();
  std::vector<Table> vars;
  vars.reserve(k);
  for (std::size_t p = 0; p < k; ++p) vars.push_back(variable_table(p, k));
  Table table = eval_table(tree, leaves, vars, k);

  // Prune leaves the function does not depend on (absorption and the like).
  for (std::size_t p = k; p-- > 0;) {
    if (!depends_on(table, p, k)) {
      table = drop_variable(table, p, k);
      leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(p));
      --k;
    }
  }
  return CanonicalKey{std::move(leaves), std::move(table)};
}

CanonicalKey feature_key(const CanonicalKey& key) { return (key.table[0] & 1U) ? key.complement() : key; }

CanonicalKey feature_key(const LogicTree& tree) { return feature_key(canonical_key(tree)); }

}  // namespace blr
