#include "ministra/boolexpr.hpp"

#include <cctype>

#include "ministra/types.hpp"

namespace ministra {

class BoolExprParser {
 public:
  BoolExprParser(std::string_view text, BoolExpr& out) : s_(text), out_(out) {}

  int parse() {
    int r = parse_or();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character");
    return r;
  }

 private:
  void fail(const char* what) {
    throw Error("boolean expression '" + std::string(s_) + "': " + what + " at " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  int add(BoolExpr::Node n) {
    out_.nodes_.push_back(std::move(n));
    return static_cast<int>(out_.nodes_.size()) - 1;
  }
  int binary(BoolExpr::Op op, int l, int r) { return add({op, false, {}, l, r}); }

  int parse_or() {
    int l = parse_xor();
    for (;;) {
      skip_ws();
      if (pos_ < s_.size() && (s_[pos_] == '|' || s_[pos_] == '+')) {
        ++pos_;
        l = binary(BoolExpr::Op::or_, l, parse_xor());
      } else {
        return l;
      }
    }
  }
  int parse_xor() {
    int l = parse_and();
    for (;;) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '^') {
        ++pos_;
        l = binary(BoolExpr::Op::xor_, l, parse_and());
      } else {
        return l;
      }
    }
  }
  bool starts_primary() {
    skip_ws();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return c == '(' || c == '!' || std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\\';
  }
  int parse_and() {
    int l = parse_unary();
    for (;;) {
      skip_ws();
      if (pos_ < s_.size() && (s_[pos_] == '&' || s_[pos_] == '*')) {
        ++pos_;
        l = binary(BoolExpr::Op::and_, l, parse_unary());
      } else if (starts_primary()) {
        l = binary(BoolExpr::Op::and_, l, parse_unary());  // juxtaposition
      } else {
        return l;
      }
    }
  }
  int parse_unary() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '!') {
      ++pos_;
      return add({BoolExpr::Op::not_, false, {}, parse_unary(), -1});
    }
    int p = parse_primary();
    for (;;) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '\'') {
        ++pos_;
        p = add({BoolExpr::Op::not_, false, {}, p, -1});
      } else {
        return p;
      }
    }
  }
  int parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      int r = parse_or();
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
      ++pos_;
      return r;
    }
    std::string name;
    while (pos_ < s_.size()) {
      char d = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '[' || d == ']' || d == '.') {
        name.push_back(d);
        ++pos_;
      } else if (d == '\\' && pos_ + 1 < s_.size()) {
        name.push_back(s_[pos_ + 1]);
        pos_ += 2;
      } else {
        break;
      }
    }
    if (name.empty()) fail("expected operand");
    if (name == "0" || name == "1") return add({BoolExpr::Op::constant, name == "1", {}, -1, -1});
    return add({BoolExpr::Op::var, false, std::move(name), -1, -1});
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  BoolExpr& out_;
};

BoolExpr BoolExpr::parse(std::string_view text) {
  BoolExpr e;
  e.text_ = std::string(text);
  BoolExprParser p(text, e);
  e.root_ = p.parse();
  return e;
}

Logic BoolExpr::eval(const std::function<Logic(std::string_view)>& lookup) const {
  if (root_ < 0) return Logic::unknown;
  return eval_node(root_, lookup);
}

Logic BoolExpr::eval_node(int idx, const std::function<Logic(std::string_view)>& lookup) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::constant: return n.value ? Logic::one : Logic::zero;
    case Op::var: return lookup(n.name);
    case Op::not_: {
      Logic v = eval_node(n.lhs, lookup);
      if (v == Logic::unknown) return v;
      return v == Logic::one ? Logic::zero : Logic::one;
    }
    case Op::and_: {
      Logic a = eval_node(n.lhs, lookup);
      Logic b = eval_node(n.rhs, lookup);
      if (a == Logic::zero || b == Logic::zero) return Logic::zero;
      if (a == Logic::one && b == Logic::one) return Logic::one;
      return Logic::unknown;
    }
    case Op::or_: {
      Logic a = eval_node(n.lhs, lookup);
      Logic b = eval_node(n.rhs, lookup);
      if (a == Logic::one || b == Logic::one) return Logic::one;
      if (a == Logic::zero && b == Logic::zero) return Logic::zero;
      return Logic::unknown;
    }
    case Op::xor_: {
      Logic a = eval_node(n.lhs, lookup);
      Logic b = eval_node(n.rhs, lookup);
      if (a == Logic::unknown || b == Logic::unknown) return Logic::unknown;
      return a != b ? Logic::one : Logic::zero;
    }
  }
  return Logic::unknown;
}

std::vector<std::string> BoolExpr::variables() const {
  std::vector<std::string> out;
  for (const Node& n : nodes_) {
    if (n.op != Op::var) continue;
    bool seen = false;
    for (const auto& v : out) seen = seen || v == n.name;
    if (!seen) out.push_back(n.name);
  }
  return out;
}

}  // namespace ministra
