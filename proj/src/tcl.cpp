#include "ministra/tcl.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <variant>

#include "ministra/io.hpp"
#include "ministra/log.hpp"

namespace ministra {
namespace {

struct BreakSignal {};
struct ContinueSignal {};
struct ReturnSignal {
  std::string value;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }
bool is_varchar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':'; }

}  // namespace

class TclParser {
 public:
  TclParser(TclInterp& in, std::string_view s, std::size_t pos, std::size_t base, bool top)
      : in_(in), s_(s), pos_(pos), base_(base), top_(top) {}

  std::string run(char terminator) {
    std::string result;
    for (;;) {
      while (pos_ < s_.size()) {
        char c = s_[pos_];
        if (is_space(c) || c == '\n' || c == ';') {
          ++pos_;
        } else if (c == '\\' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') {
          pos_ += 2;
        } else {
          break;
        }
      }
      if (pos_ >= s_.size()) {
        if (terminator == ']') fail(pos_, "missing close-bracket");
        return result;
      }
      if (terminator == ']' && s_[pos_] == ']') {
        ++pos_;
        return result;
      }
      if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') pos_ += (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ? 2 : 1;
        continue;
      }
      if (top_) in_.line_ = lines_(base_ + pos_);
      std::vector<std::string> words = parse_words(terminator);
      if (!words.empty()) result = in_.invoke(words);
    }
  }

  std::size_t pos() const { return pos_; }

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    std::size_t off = top_ ? base_ + at : base_;
    throw ParseError(in_.file_, off, top_ ? line_of(in_.source_, off) : in_.line_, msg);
  }

  // Substitutes $var, [cmd] and backslashes in [pos_, until stop char).
  std::string substitute_dollar() {
    ++pos_;  // '$'
    std::string name;
    if (pos_ < s_.size() && s_[pos_] == '{') {
      std::size_t e = s_.find('}', pos_);
      if (e == std::string_view::npos) fail(pos_, "missing close-brace for variable name");
      name = std::string(s_.substr(pos_ + 1, e - pos_ - 1));
      pos_ = e + 1;
    } else {
      std::size_t b = pos_;
      while (pos_ < s_.size() && is_varchar(s_[pos_])) ++pos_;
      if (pos_ == b) return "$";
      name = std::string(s_.substr(b, pos_ - b));
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        std::string idx;
        while (pos_ < s_.size() && s_[pos_] != ')') {
          if (s_[pos_] == '$') {
            idx += substitute_dollar();
          } else if (s_[pos_] == '[') {
            idx += substitute_command();
          } else {
            idx += s_[pos_++];
          }
        }
        if (pos_ >= s_.size()) fail(pos_, "missing ')' in array reference");
        ++pos_;
        name += "(" + idx + ")";
      }
    }
    const std::string* v = in_.get_var(name);
    if (!v) throw TclError(fmt::format("can't read \"{}\": no such variable", name));
    return *v;
  }

  std::string substitute_command() {
    ++pos_;  // '['
    TclParser sub(in_, s_, pos_, base_, false);
    std::string r = sub.run(']');
    pos_ = sub.pos_;
    return r;
  }

  std::string backslash() {
    ++pos_;
    if (pos_ >= s_.size()) return "\\";
    char c = s_[pos_++];
    switch (c) {
      case 'n': return "\n";
      case 't': return "\t";
      case 'r': return "\r";
      case 'a': return "\a";
      case 'b': return "\b";
      case 'f': return "\f";
      case 'v': return "\v";
      case '\n':
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
        return " ";
      default: return std::string(1, c);
    }
  }

 private:
  bool word_end(char terminator) const {
    if (pos_ >= s_.size()) return true;
    char c = s_[pos_];
    return is_space(c) || c == '\n' || c == ';' || (terminator == ']' && c == ']');
  }

  std::vector<std::string> parse_words(char terminator) {
    std::vector<std::string> words;
    for (;;) {
      while (pos_ < s_.size()) {
        if (is_space(s_[pos_])) {
          ++pos_;
        } else if (s_[pos_] == '\\' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') {
          pos_ += 2;
        } else {
          break;
        }
      }
      if (pos_ >= s_.size()) return words;
      char c = s_[pos_];
      if (c == '\n' || c == ';') {
        ++pos_;
        return words;
      }
      if (terminator == ']' && c == ']') return words;
      bool expand = false;
      if (s_.compare(pos_, 3, "{*}") == 0 && pos_ + 3 < s_.size() && !is_space(s_[pos_ + 3]) &&
          s_[pos_ + 3] != '\n') {
        pos_ += 3;
        expand = true;
      }
      std::string w = parse_word(terminator);
      if (expand) {
        for (auto& e : TclInterp::split_list(w)) words.push_back(std::move(e));
      } else {
        words.push_back(std::move(w));
      }
    }
  }

  std::string parse_word(char terminator) {
    const std::size_t start = pos_;
    char c = s_[pos_];
    if (c == '{') {
      int depth = 1;
      ++pos_;
      std::string out;
      while (pos_ < s_.size()) {
        char d = s_[pos_];
        if (d == '\\' && pos_ + 1 < s_.size()) {
          if (s_[pos_ + 1] == '\n') {
            pos_ += 2;
            while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
            out += ' ';
            continue;
          }
          out += d;
          out += s_[pos_ + 1];
          pos_ += 2;
          continue;
        }
        if (d == '{') ++depth;
        if (d == '}' && --depth == 0) break;
        out += d;
        ++pos_;
      }
      if (pos_ >= s_.size()) fail(start, "missing close-brace");
      ++pos_;
      if (!word_end(terminator)) fail(pos_, "extra characters after close-brace");
      return out;
    }
    if (c == '"') {
      ++pos_;
      std::string out;
      for (;;) {
        if (pos_ >= s_.size()) fail(start, "missing \"");
        char d = s_[pos_];
        if (d == '"') break;
        if (d == '$') {
          out += substitute_dollar();
        } else if (d == '[') {
          out += substitute_command();
        } else if (d == '\\') {
          out += backslash();
        } else {
          out += d;
          ++pos_;
        }
      }
      ++pos_;
      if (!word_end(terminator)) fail(pos_, "extra characters after close-quote");
      return out;
    }
    std::string out;
    while (!word_end(terminator)) {
      char d = s_[pos_];
      if (d == '$') {
        out += substitute_dollar();
      } else if (d == '[') {
        out += substitute_command();
      } else if (d == '\\') {
        out += backslash();
      } else {
        out += d;
        ++pos_;
      }
    }
    return out;
  }

  TclInterp& in_;
  std::string_view s_;
  LineCounter lines_{in_.source_};
  std::size_t pos_;
  std::size_t base_;
  bool top_;
};

namespace {

// ---- expr -------------------------------------------------------------------------------

struct Value {
  std::variant<std::int64_t, double, std::string> v;

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_num() const { return !std::holds_alternative<std::string>(v); }
  double as_double() const { return is_int() ? static_cast<double>(std::get<std::int64_t>(v)) : std::get<double>(v); }
};

std::string format_double(double d) {
  if (std::isinf(d)) return d > 0 ? "Inf" : "-Inf";
  if (std::isnan(d)) return "NaN";
  std::string s = fmt::format("{}", d);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string to_string(const Value& x) {
  if (x.is_int()) return std::to_string(std::get<std::int64_t>(x.v));
  if (std::holds_alternative<double>(x.v)) return format_double(std::get<double>(x.v));
  return std::get<std::string>(x.v);
}

// Interprets a string as a number where possible.
Value numeric(std::string_view raw) {
  std::string_view t = raw;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  if (t.empty()) return Value{std::string(raw)};
  std::string_view body = t;
  bool neg = false;
  if (body.front() == '-' || body.front() == '+') {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  std::int64_t iv = 0;
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    auto r = std::from_chars(body.data() + 2, body.data() + body.size(), iv, 16);
    if (r.ec == std::errc() && r.ptr == body.data() + body.size()) return Value{neg ? -iv : iv};
  }
  auto r = std::from_chars(body.data(), body.data() + body.size(), iv);
  if (r.ec == std::errc() && r.ptr == body.data() + body.size()) return Value{neg ? -iv : iv};
  double dv = 0;
  auto rd = std::from_chars(t.data(), t.data() + t.size(), dv);
  if (rd.ec == std::errc() && rd.ptr == t.data() + t.size()) return Value{dv};
  if (t == "true" || t == "yes" || t == "on") return Value{std::int64_t{1}};
  if (t == "false" || t == "no" || t == "off") return Value{std::int64_t{0}};
  return Value{std::string(raw)};
}

bool truthy(const Value& x) {
  if (x.is_int()) return std::get<std::int64_t>(x.v) != 0;
  if (std::holds_alternative<double>(x.v)) return std::get<double>(x.v) != 0.0;
  Value n = numeric(std::get<std::string>(x.v));
  if (!n.is_num()) throw TclError(fmt::format("expected boolean value but got \"{}\"", std::get<std::string>(x.v)));
  return truthy(n);
}

class ExprParser {
 public:
  ExprParser(TclInterp& in, std::string_view s) : in_(in), s_(s) {}

  Value parse() {
    Value v = ternary();
    skip();
    if (pos_ < s_.size()) throw TclError(fmt::format("syntax error in expression \"{}\"", s_));
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view op) {
    skip();
    if (s_.compare(pos_, op.size(), op) != 0) return false;
    // Keep `&&` from matching `&`, `<=` from matching `<`, etc.
    if (op.size() == 1 && pos_ + 1 < s_.size()) {
      char n = s_[pos_ + 1];
      if ((op == "&" && n == '&') || (op == "|" && n == '|') || (op == "<" && (n == '=' || n == '<')) ||
          (op == ">" && (n == '=' || n == '>')) || (op == "!" && n == '=') || (op == "*" && n == '*'))
        return false;
    }
    if (std::isalpha(static_cast<unsigned char>(op[0])) && pos_ + op.size() < s_.size() &&
        std::isalnum(static_cast<unsigned char>(s_[pos_ + op.size()])))
      return false;
    pos_ += op.size();
    return true;
  }
  [[noreturn]] void bad() const { throw TclError(fmt::format("syntax error in expression \"{}\"", s_)); }

  Value ternary() {
    Value c = lor();
    if (eat("?")) {
      Value a = ternary();
      if (!eat(":")) bad();
      Value b = ternary();
      return truthy(c) ? a : b;
    }
    return c;
  }
  Value lor() {
    Value a = land();
    while (eat("||")) {
      Value b = land();
      a = Value{std::int64_t{truthy(a) || truthy(b)}};
    }
    return a;
  }
  Value land() {
    Value a = bor();
    while (eat("&&")) {
      Value b = bor();
      a = Value{std::int64_t{truthy(a) && truthy(b)}};
    }
    return a;
  }
  std::int64_t as_int(const Value& x) const {
    Value n = x.is_num() ? x : numeric(std::get<std::string>(x.v));
    if (!n.is_int()) throw TclError(fmt::format("expected integer in expression \"{}\"", s_));
    return std::get<std::int64_t>(n.v);
  }
  Value bor() {
    Value a = bxor();
    while (eat("|")) a = Value{as_int(a) | as_int(bxor())};
    return a;
  }
  Value bxor() {
    Value a = band();
    while (eat("^")) a = Value{as_int(a) ^ as_int(band())};
    return a;
  }
  Value band() {
    Value a = equality();
    while (eat("&")) a = Value{as_int(a) & as_int(equality())};
    return a;
  }
  static int compare(const Value& a, const Value& b) {
    if (a.is_num() && b.is_num()) {
      if (a.is_int() && b.is_int()) {
        auto x = std::get<std::int64_t>(a.v), y = std::get<std::int64_t>(b.v);
        return x < y ? -1 : x > y ? 1 : 0;
      }
      double x = a.as_double(), y = b.as_double();
      return x < y ? -1 : x > y ? 1 : 0;
    }
    std::string x = to_string(a), y = to_string(b);
    return x < y ? -1 : x > y ? 1 : 0;
  }
  Value equality() {
    Value a = relational();
    for (;;) {
      if (eat("==")) a = Value{std::int64_t{compare(a, relational()) == 0}};
      else if (eat("!=")) a = Value{std::int64_t{compare(a, relational()) != 0}};
      else if (eat("eq")) a = Value{std::int64_t{to_string(a) == to_string(relational())}};
      else if (eat("ne")) a = Value{std::int64_t{to_string(a) != to_string(relational())}};
      else return a;
    }
  }
  Value relational() {
    Value a = shift();
    for (;;) {
      if (eat("<=")) a = Value{std::int64_t{compare(a, shift()) <= 0}};
      else if (eat(">=")) a = Value{std::int64_t{compare(a, shift()) >= 0}};
      else if (eat("<")) a = Value{std::int64_t{compare(a, shift()) < 0}};
      else if (eat(">")) a = Value{std::int64_t{compare(a, shift()) > 0}};
      else return a;
    }
  }
  Value shift() {
    Value a = additive();
    for (;;) {
      if (eat("<<")) a = Value{as_int(a) << as_int(additive())};
      else if (eat(">>")) a = Value{as_int(a) >> as_int(additive())};
      else return a;
    }
  }
  Value num(const Value& x) const {
    Value n = x.is_num() ? x : numeric(std::get<std::string>(x.v));
    if (!n.is_num())
      throw TclError(fmt::format("can't use non-numeric string \"{}\" as operand", std::get<std::string>(x.v)));
    return n;
  }
  Value arith(char op, Value a, Value b) const {
    a = num(a);
    b = num(b);
    if (a.is_int() && b.is_int()) {
      std::int64_t x = std::get<std::int64_t>(a.v), y = std::get<std::int64_t>(b.v);
      switch (op) {
        case '+': return Value{x + y};
        case '-': return Value{x - y};
        case '*': return Value{x * y};
        case '/': {
          if (y == 0) throw TclError("divide by zero");
          std::int64_t q = x / y;
          if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
          return Value{q};
        }
        case '%': {
          if (y == 0) throw TclError("divide by zero");
          std::int64_t m = x % y;
          if (m != 0 && ((m < 0) != (y < 0))) m += y;
          return Value{m};
        }
        case 'p': {
          std::int64_t r = 1;
          for (std::int64_t i = 0; i < y; ++i) r *= x;
          return y < 0 ? Value{std::pow(static_cast<double>(x), static_cast<double>(y))} : Value{r};
        }
      }
    }
    double x = a.as_double(), y = b.as_double();
    switch (op) {
      case '+': return Value{x + y};
      case '-': return Value{x - y};
      case '*': return Value{x * y};
      case '/': return Value{x / y};
      case '%': throw TclError("can't use floating-point value as operand of \"%\"");
      case 'p': return Value{std::pow(x, y)};
    }
    bad();
  }
  Value additive() {
    Value a = multiplicative();
    for (;;) {
      if (eat("+")) a = arith('+', a, multiplicative());
      else if (eat("-")) a = arith('-', a, multiplicative());
      else return a;
    }
  }
  Value multiplicative() {
    Value a = power();
    for (;;) {
      if (eat("*")) a = arith('*', a, power());
      else if (eat("/")) a = arith('/', a, power());
      else if (eat("%")) a = arith('%', a, power());
      else return a;
    }
  }
  Value power() {
    Value a = unary();
    if (eat("**")) return arith('p', a, power());
    return a;
  }
  Value unary() {
    if (eat("-")) {
      Value x = num(unary());
      return x.is_int() ? Value{-std::get<std::int64_t>(x.v)} : Value{-x.as_double()};
    }
    if (eat("+")) return num(unary());
    if (eat("!")) return Value{std::int64_t{!truthy(unary())}};
    if (eat("~")) return Value{~as_int(unary())};
    return primary();
  }
  Value call(const std::string& fn, const std::vector<Value>& args) {
    auto need = [&](std::size_t n) {
      if (args.size() != n) throw TclError(fmt::format("wrong # args for math function \"{}\"", fn));
    };
    auto d = [&](std::size_t i) { return num(args[i]).as_double(); };
    if (fn == "abs") {
      need(1);
      Value x = num(args[0]);
      return x.is_int() ? Value{std::abs(std::get<std::int64_t>(x.v))} : Value{std::fabs(x.as_double())};
    }
    if (fn == "int" || fn == "wide") {
      need(1);
      return Value{static_cast<std::int64_t>(d(0))};
    }
    if (fn == "double") {
      need(1);
      return Value{d(0)};
    }
    if (fn == "round") {
      need(1);
      return Value{static_cast<std::int64_t>(std::llround(d(0)))};
    }
    if (fn == "floor") return need(1), Value{std::floor(d(0))};
    if (fn == "ceil") return need(1), Value{std::ceil(d(0))};
    if (fn == "sqrt") return need(1), Value{std::sqrt(d(0))};
    if (fn == "exp") return need(1), Value{std::exp(d(0))};
    if (fn == "log") return need(1), Value{std::log(d(0))};
    if (fn == "log10") return need(1), Value{std::log10(d(0))};
    if (fn == "pow") return need(2), Value{std::pow(d(0), d(1))};
    if (fn == "fmod") return need(2), Value{std::fmod(d(0), d(1))};
    if (fn == "min" || fn == "max") {
      if (args.empty()) throw TclError(fmt::format("too few arguments for math function \"{}\"", fn));
      Value best = num(args[0]);
      for (std::size_t i = 1; i < args.size(); ++i) {
        Value x = num(args[i]);
        int c = compare(x, best);
        if ((fn == "min" && c < 0) || (fn == "max" && c > 0)) best = x;
      }
      return best;
    }
    throw TclError(fmt::format("unknown math function \"{}\"", fn));
  }
  Value primary() {
    skip();
    if (pos_ >= s_.size()) bad();
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Value v = ternary();
      if (!eat(")")) bad();
      return v;
    }
    if (c == '$' || c == '[' || c == '"') {
      TclParser p(in_, s_, pos_, 0, false);
      std::string text;
      if (c == '$') {
        text = p.substitute_dollar();
        pos_ = p.pos();
      } else if (c == '[') {
        text = p.substitute_command();
        pos_ = p.pos();
      } else {
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
          TclParser q(in_, s_, pos_, 0, false);
          if (s_[pos_] == '$') {
            text += q.substitute_dollar();
            pos_ = q.pos();
          } else if (s_[pos_] == '[') {
            text += q.substitute_command();
            pos_ = q.pos();
          } else if (s_[pos_] == '\\') {
            text += q.backslash();
            pos_ = q.pos();
          } else {
            text += s_[pos_++];
          }
        }
        if (pos_ >= s_.size()) bad();
        ++pos_;
        return Value{text};
      }
      return numeric(text);
    }
    if (c == '{') {
      int depth = 0;
      std::size_t b = pos_;
      for (; pos_ < s_.size(); ++pos_) {
        if (s_[pos_] == '{') ++depth;
        if (s_[pos_] == '}' && --depth == 0) break;
      }
      if (pos_ >= s_.size()) bad();
      ++pos_;
      return Value{std::string(s_.substr(b + 1, pos_ - b - 2))};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t b = pos_;
      if (c == '0' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X')) {
        pos_ += 2;
        while (pos_ < s_.size() && std::isxdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
          std::size_t save = pos_++;
          if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
          if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
          } else {
            pos_ = save;
          }
        }
      }
      Value v = numeric(s_.substr(b, pos_ - b));
      if (!v.is_num()) bad();
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t b = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string word(s_.substr(b, pos_ - b));
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        std::vector<Value> args;
        skip();
        if (pos_ < s_.size() && s_[pos_] == ')') {
          ++pos_;
        } else {
          for (;;) {
            args.push_back(ternary());
            if (eat(")")) break;
            if (!eat(",")) bad();
          }
        }
        return call(word, args);
      }
      Value v = numeric(word);
      if (v.is_num()) return v;
      if (word == "inf" || word == "Inf") return Value{kInf};
      bad();
    }
    bad();
  }

  TclInterp& in_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::int64_t parse_index(const std::string& idx, std::size_t size) {
  auto as_int = [&](std::string_view t) {
    std::int64_t v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw TclError(fmt::format("bad index \"{}\": must be integer or end?-integer?", idx));
    return v;
  };
  if (idx == "end") return static_cast<std::int64_t>(size) - 1;
  if (idx.rfind("end-", 0) == 0) return static_cast<std::int64_t>(size) - 1 - as_int(std::string_view(idx).substr(4));
  if (idx.rfind("end+", 0) == 0) return static_cast<std::int64_t>(size) - 1 + as_int(std::string_view(idx).substr(4));
  return as_int(idx);
}

void want_args(const std::vector<std::string>& a, std::size_t lo, std::size_t hi, const char* usage) {
  if (a.size() < lo || a.size() > hi) throw TclError(fmt::format("wrong # args: should be \"{}\"", usage));
}

}  // namespace

const std::string* TclInterp::get_var(const std::string& name) const {
  auto it = vars_.find(name);
  return it == vars_.end() ? nullptr : &it->second;
}

std::string TclInterp::eval_expr(std::string_view expr) { return to_string(ExprParser(*this, expr).parse()); }

std::string TclInterp::eval(std::string_view script, const std::string& file) {
  file_ = file;
  source_ = script;
  line_ = 1;
  TclParser p(*this, script, 0, 0, true);
  try {
    return p.run('\0');
  } catch (BreakSignal&) {
    throw TclError("invoked \"break\" outside of a loop");
  } catch (ContinueSignal&) {
    throw TclError("invoked \"continue\" outside of a loop");
  } catch (ReturnSignal& r) {
    return r.value;
  }
}

std::string TclInterp::eval_nested(std::string_view script, std::size_t base_offset) {
  if (++depth_ > 1000) {
    --depth_;
    throw TclError("too many nested evaluations");
  }
  struct Guard {
    int& d;
    ~Guard() { --d; }
  } g{depth_};
  TclParser p(*this, script, 0, base_offset, false);
  return p.run('\0');
}

std::string TclInterp::invoke(std::vector<std::string>& words) {
  auto it = commands_.find(words[0]);
  if (it == commands_.end()) {
    if (unknown) return unknown(*this, words);
    throw TclError(fmt::format("invalid command name \"{}\"", words[0]));
  }
  return it->second(*this, words);
}

void TclInterp::register_command(const std::string& name, Command cmd) { commands_[name] = std::move(cmd); }

std::vector<std::string> TclInterp::split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < s.size()) {
    while (i < s.size() && ws(s[i])) ++i;
    if (i >= s.size()) break;
    std::string item;
    if (s[i] == '{') {
      int depth = 1;
      std::size_t b = ++i;
      while (i < s.size()) {
        if (s[i] == '\\' && i + 1 < s.size()) {
          i += 2;
          continue;
        }
        if (s[i] == '{') ++depth;
        if (s[i] == '}' && --depth == 0) break;
        ++i;
      }
      if (i >= s.size()) throw TclError("unmatched open brace in list");
      item = std::string(s.substr(b, i - b));
      ++i;
      if (i < s.size() && !ws(s[i])) throw TclError("list element in braces followed by non-space");
    } else if (s[i] == '"') {
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        item += s[i++];
      }
      if (i >= s.size()) throw TclError("unmatched open quote in list");
      ++i;
    } else {
      while (i < s.size() && !ws(s[i])) {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        item += s[i++];
      }
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::string TclInterp::quote_element(std::string_view item) {
  if (item.empty()) return "{}";
  bool special = false;
  int depth = 0;
  bool balanced = true;
  for (char c : item) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '[' || c == ']' || c == '$' || c == ';' || c == '"' ||
        c == '\\' || c == '{' || c == '}')
      special = true;
    if (c == '{') ++depth;
    if (c == '}' && --depth < 0) balanced = false;
    if (c == '\\') balanced = false;
  }
  if (!special && item.front() != '#') return std::string(item);
  if (balanced && depth == 0 && item.back() != '\\') return fmt::format("{{{}}}", item);
  std::string out;
  for (char c : item) {
    if (c == '{' || c == '}' || c == '[' || c == ']' || c == '$' || c == ';' || c == '"' || c == '\\' || c == ' ')
      out += '\\';
    out += c;
  }
  return out;
}

std::string TclInterp::make_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += quote_element(items[i]);
  }
  return out;
}

TclInterp::TclInterp() {
  register_command("set", [](TclInterp& in, const std::vector<std::string>& a) {
    want_args(a, 2, 3, "set varName ?newValue?");
    if (a.size() == 3) {
      in.vars_[a[1]] = a[2];
      return a[2];
    }
    const std::string* v = in.get_var(a[1]);
    if (!v) throw TclError(fmt::format("can't read \"{}\": no such variable", a[1]));
    return *v;
  });
  register_command("unset", [](TclInterp& in, const std::vector<std::string>& a) {
    for (std::size_t i = 1; i < a.size(); ++i)
      if (a[i] != "-nocomplain") in.vars_.erase(a[i]);
    return std::string();
  });
  register_command("expr", [](TclInterp& in, const std::vector<std::string>& a) {
    if (a.size() < 2) throw TclError("wrong # args: should be \"expr arg ?arg ...?\"");
    std::string e = a[1];
    for (std::size_t i = 2; i < a.size(); ++i) e += " " + a[i];
    return in.eval_expr(e);
  });
  register_command("if", [](TclInterp& in, const std::vector<std::string>& a) {
    std::size_t i = 1;
    for (;;) {
      if (i >= a.size()) throw TclError("wrong # args: no expression after \"if\"");
      bool cond = truthy(numeric(in.eval_expr(a[i])));
      ++i;
      if (i < a.size() && a[i] == "then") ++i;
      if (i >= a.size()) throw TclError("wrong # args: no script following condition");
      if (cond) return in.eval_nested(a[i], 0);
      ++i;
      if (i >= a.size()) return std::string();
      if (a[i] == "elseif") {
        ++i;
        continue;
      }
      if (a[i] == "else") ++i;
      if (i != a.size() - 1) throw TclError("wrong # args: extra words after \"else\" clause");
      return in.eval_nested(a[i], 0);
    }
  });
  register_command("while", [](TclInterp& in, const std::vector<std::string>& a) {
    want_args(a, 3, 3, "while test command");
    while (truthy(numeric(in.eval_expr(a[1])))) {
      try {
        in.eval_nested(a[2], 0);
      } catch (BreakSignal&) {
        break;
      } catch (ContinueSignal&) {
      }
    }
    return std::string();
  });
  register_command("for", [](TclInterp& in, const std::vector<std::string>& a) {
    want_args(a, 5, 5, "for start test next command");
    in.eval_nested(a[1], 0);
    while (truthy(numeric(in.eval_expr(a[2])))) {
      try {
        in.eval_nested(a[4], 0);
      } catch (BreakSignal&) {
        break;
      } catch (ContinueSignal&) {
      }
      in.eval_nested(a[3], 0);
    }
    return std::string();
  });
  register_command("foreach", [](TclInterp& in, const std::vector<std::string>& a) {
    if (a.size() < 4 || a.size() % 2 != 0)
      throw TclError("wrong # args: should be \"foreach varList list ?varList list ...? command\"");
    struct Group {
      std::vector<std::string> vars;
      std::vector<std::string> items;
    };
    std::vector<Group> groups;
    std::size_t iters = 0;
    for (std::size_t i = 1; i + 1 < a.size(); i += 2) {
      Group g{split_list(a[i]), split_list(a[i + 1])};
      if (g.vars.empty()) throw TclError("foreach varlist is empty");
      iters = std::max(iters, (g.items.size() + g.vars.size() - 1) / g.vars.size());
      groups.push_back(std::move(g));
    }
    for (std::size_t k = 0; k < iters; ++k) {
      for (const auto& g : groups)
        for (std::size_t v = 0; v < g.vars.size(); ++v) {
          std::size_t idx = k * g.vars.size() + v;
          in.vars_[g.vars[v]] = idx < g.items.size() ? g.items[idx] : std::string();
        }
      try {
        in.eval_nested(a.back(), 0);
      } catch (BreakSignal&) {
        break;
      } catch (ContinueSignal&) {
      }
    }
    return std::string();
  });
  register_command("break", [](TclInterp&, const std::vector<std::string>&) -> std::string { throw BreakSignal{}; });
  register_command("continue",
                   [](TclInterp&, const std::vector<std::string>&) -> std::string { throw ContinueSignal{}; });
  register_command("return", [](TclInterp&, const std::vector<std::string>& a) -> std::string {
    throw ReturnSignal{a.size() > 1 ? a.back() : std::string()};
  });
  register_command("incr", [](TclInterp& in, const std::vector<std::string>& a) {
    want_args(a, 2, 3, "incr varName ?increment?");
    const std::string* cur = in.get_var(a[1]);
    Value v = numeric(cur ? *cur : "0");
    Value d = numeric(a.size() == 3 ? a[2] : "1");
    if (!v.is_int() || !d.is_int()) throw TclError("expected integer in incr");
    std::string r = std::to_string(std::get<std::int64_t>(v.v) + std::get<std::int64_t>(d.v));
    in.vars_[a[1]] = r;
    return r;
  });
  register_command("list", [](TclInterp&, const std::vector<std::string>& a) {
    return make_list(std::vector<std::string>(a.begin() + 1, a.end()));
  });
  register_command("llength", [](TclInterp&, const std::vector<std::string>& a) {
    want_args(a, 2, 2, "llength list");
    return std::to_string(split_list(a[1]).size());
  });
  register_command("lindex", [](TclInterp&, const std::vector<std::string>& a) {
    want_args(a, 2, 3, "lindex list ?index?");
    if (a.size() == 2) return a[1];
    auto items = split_list(a[1]);
    std::int64_t i = parse_index(a[2], items.size());
    if (i < 0 || i >= static_cast<std::int64_t>(items.size())) return std::string();
    return items[static_cast<std::size_t>(i)];
  });
  register_command("lrange", [](TclInterp&, const std::vector<std::string>& a) {
    want_args(a, 4, 4, "lrange list first last");
    auto items = split_list(a[1]);
    std::int64_t f = std::max<std::int64_t>(0, parse_index(a[2], items.size()));
    std::int64_t l = std::min<std::int64_t>(static_cast<std::int64_t>(items.size()) - 1, parse_index(a[3], items.size()));
    std::vector<std::string> out;
    for (std::int64_t i = f; i <= l; ++i) out.push_back(items[static_cast<std::size_t>(i)]);
    return make_list(out);
  });
  register_command("lappend", [](TclInterp& in, const std::vector<std::string>& a) {
    want_args(a, 2, SIZE_MAX, "lappend varName ?value ...?");
    std::string& v = in.vars_[a[1]];
    for (std::size_t i = 2; i < a.size(); ++i) {
      if (!v.empty()) v += ' ';
      v += quote_element(a[i]);
    }
    return v;
  });
  register_command("concat", [](TclInterp&, const std::vector<std::string>& a) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i < a.size(); ++i)
      for (auto& e : split_list(a[i])) out.push_back(std::move(e));
    return make_list(out);
  });
  register_command("join", [](TclInterp&, const std::vector<std::string>& a) {
    want_args(a, 2, 3, "join list ?joinString?");
    auto items = split_list(a[1]);
    std::string sep = a.size() == 3 ? a[2] : " ";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
  });
  register_command("puts", [](TclInterp& in, const std::vector<std::string>& a) {
    want_args(a, 2, 4, "puts ?-nonewline? ?channelId? string");
    in.output.push_back(a.back());
    log::info("{}", a.back());
    return std::string();
  });
}

}  // namespace ministra
