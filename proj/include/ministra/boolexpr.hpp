#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ministra {

/// Three-valued logic used by case analysis.
enum class Logic : std::uint8_t { zero = 0, one = 1, unknown = 2 };

/// Liberty-style boolean expression: `!a`, `a'`, `a & b`, `a * b`, `a b`, `a | b`, `a + b`, `a ^ b`, `0`, `1`.
class BoolExpr {
 public:
  enum class Op : std::uint8_t { constant, var, not_, and_, or_, xor_ };

  static BoolExpr parse(std::string_view text);

  Logic eval(const std::function<Logic(std::string_view)>& lookup) const;

  /// Distinct variable names, in first-occurrence order.
  std::vector<std::string> variables() const;

  const std::string& text() const { return text_; }
  bool empty() const { return nodes_.empty(); }

  friend bool operator==(const BoolExpr& a, const BoolExpr& b) { return a.text_ == b.text_; }

 private:
  struct Node {
    Op op;
    bool value = false;  // for constant
    std::string name;    // for var
    int lhs = -1;
    int rhs = -1;
  };
  Logic eval_node(int idx, const std::function<Logic(std::string_view)>& lookup) const;

  std::string text_;
  std::vector<Node> nodes_;
  int root_ = -1;

  friend class BoolExprParser;
};

}  // namespace ministra
