// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <charconv>
#include <string>

#include "blr/logic_tree.hpp"

namespace blr {
namespace {

void print(const LogicTree& t, std::string& out, bool wrap) {
  if (t.is_leaf()) {
    if (t.negated()) out += '!';
    out += 'X';
    out += std::to_string(t.index() + 1);
    return;
  }
  // A negated operator node always needs its own parentheses.
  const bool parens = wrap || t.negated();
  if (t.negated()) out += '!';
  if (parens) out += '(';
  const Op op = t.op();
  // Left-associative grammar: a same-operator left child prints bare, a
  // same-operator right child or a different-operator child is wrapped.
  const LogicTree l = t.lhs(), r = t.rhs();
  print(l, out, !l.is_leaf() && !l.negated() && l.op() != op);
  out += op == Op::And ? " & " : " | ";
  print(r, out, !r.is_leaf() && !r.negated());
  if (parens) out += ')';
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  LogicTree parse() {
    LogicTree t = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  LogicTree expr() {
    LogicTree t = term();
    while (accept('|')) t = LogicTree::join(Op::Or, t, term());
    return t;
  }

  LogicTree term() {
    LogicTree t = factor();
    while (accept('&')) t = LogicTree::join(Op::And, t, factor());
    return t;
  }

  LogicTree factor() {
    if (accept('!')) return factor().negate();
    if (accept('(')) {
      LogicTree t = expr();
      if (!accept(')')) fail("expected ')'");
      return t;
    }
    skip();
    if (pos_ < s_.size() && (s_[pos_] == 'X' || s_[pos_] == 'x')) {
      ++pos_;
      std::uint32_t j = 0;
      auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), j);
      if (ec != std::errc{} || j == 0) fail("expected a 1-based covariate number after 'X'");
      pos_ = static_cast<std::size_t>(p - s_.data());
      return LogicTree::leaf(j - 1);
    }
    fail("expected a leaf, '!' or '('");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const LogicTree& tree) {
  std::string out;
  print(tree, out, false);
  return out;
}

LogicTree parse_tree(std::string_view text) { return Parser(text).parse(); }

}  // namespace blr
