#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "ministra/chunks.hpp"
#include "ministra/io.hpp"
#include "ministra/parallel.hpp"
#include "ministra/verilog.hpp"

namespace ministra {

std::vector<int> VRange::bits() const {
  std::vector<int> out;
  if (msb >= lsb)
    for (int i = msb; i >= lsb; --i) out.push_back(i);
  else
    for (int i = msb; i <= lsb; ++i) out.push_back(i);
  return out;
}

const VNetDecl* VModule::find_decl(std::string_view n) const {
  for (const auto& d : decls)
    if (d.name == n) return &d;
  return nullptr;
}

const VModule* VerilogDesign::find_module(std::string_view n) const {
  for (const auto& m : modules)
    if (m.name == n) return &m;
  return nullptr;
}

namespace {

enum class VTok { ident, number, sized, string, punct, end };

struct VToken {
  VTok kind = VTok::end;
  std::string text;
  std::size_t offset = 0;
};

class VerilogParser {
 public:
  VerilogParser(std::string_view full, std::size_t begin, std::size_t end, const std::string& file)
      : s_(full), pos_(begin), end_(end), file_(file) {}

  std::vector<VModule> parse() {
    std::vector<VModule> out;
    for (;;) {
      VToken t = next();
      if (t.kind == VTok::end) return out;
      if (t.kind == VTok::ident && (t.text == "module" || t.text == "macromodule")) {
        out.push_back(parse_module(t));
      } else if (t.kind == VTok::ident && (t.text == "always" || t.text == "initial")) {
        fail(t, fmt::format("behavioral construct '{}' is not supported", t.text));
      } else {
        fail(t, fmt::format("unexpected '{}' outside a module", t.text));
      }
    }
  }

 private:
  [[noreturn]] void fail(const VToken& t, const std::string& msg) const {
    throw ParseError(file_, t.offset, line_of(s_, t.offset), msg);
  }

  void skip_space() {
    while (pos_ < end_) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < end_ && s_[pos_ + 1] == '/') {
        while (pos_ < end_ && s_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < end_ && s_[pos_ + 1] == '*') {
        std::size_t e = s_.find("*/", pos_ + 2);
        if (e == std::string_view::npos || e >= end_) throw ParseError(file_, pos_, line_of(s_, pos_), "unterminated comment");
        pos_ = e + 2;
      } else if (c == '(' && pos_ + 1 < end_ && s_[pos_ + 1] == '*' && (pos_ + 2 >= end_ || s_[pos_ + 2] != ')')) {
        std::size_t e = s_.find("*)", pos_ + 2);
        if (e == std::string_view::npos || e >= end_) throw ParseError(file_, pos_, line_of(s_, pos_), "unterminated attribute");
        pos_ = e + 2;
      } else if (c == '`') {
        while (pos_ < end_ && s_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  VToken lex() {
    skip_space();
    VToken t;
    t.offset = pos_;
    if (pos_ >= end_) return t;
    char c = s_[pos_];
    if (c == '\\') {
      std::size_t b = ++pos_;
      while (pos_ < end_ && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      t.kind = VTok::ident;
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t b = pos_;
      while (pos_ < end_ && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '$')) ++pos_;
      t.kind = VTok::ident;
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      std::size_t b = pos_;
      while (pos_ < end_ && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::size_t save = pos_;
      while (save < end_ && (s_[save] == ' ' || s_[save] == '\t')) ++save;
      if (save < end_ && s_[save] == '\'') {
        pos_ = save + 1;
        if (pos_ < end_ && (s_[pos_] == 's' || s_[pos_] == 'S')) ++pos_;
        while (pos_ < end_ && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
        if (pos_ < end_) ++pos_;  // base letter
        while (pos_ < end_ && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
        while (pos_ < end_ && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '?')) ++pos_;
        t.kind = VTok::sized;
      } else {
        t.kind = VTok::number;
      }
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (c == '"') {
      std::size_t b = pos_++;
      while (pos_ < end_ && s_[pos_] != '"') pos_ += (s_[pos_] == '\\') ? 2 : 1;
      ++pos_;
      t.kind = VTok::string;
      t.text = std::string(s_.substr(b, std::min(pos_, end_) - b));
      return t;
    }
    ++pos_;
    t.kind = VTok::punct;
    t.text = std::string(1, c);
    return t;
  }

  VToken next() {
    if (has_peek_) {
      has_peek_ = false;
      return peeked_;
    }
    return lex();
  }
  const VToken& peek() {
    if (!has_peek_) {
      peeked_ = lex();
      has_peek_ = true;
    }
    return peeked_;
  }
  bool accept(const char* p) {
    if (peek().kind == VTok::punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }
  VToken expect(const char* p) {
    VToken t = next();
    if (t.kind != VTok::punct || t.text != p) fail(t, fmt::format("expected '{}', found '{}'", p, t.text));
    return t;
  }
  std::string expect_ident() {
    VToken t = next();
    if (t.kind != VTok::ident) fail(t, fmt::format("expected identifier, found '{}'", t.text));
    return t.text;
  }
  int expect_int() {
    VToken t = next();
    if (t.kind != VTok::number) fail(t, fmt::format("expected integer, found '{}'", t.text));
    std::string digits;
    for (char c : t.text)
      if (c != '_') digits.push_back(c);
    return std::stoi(digits);
  }

  // Skips a balanced (...) group whose '(' has already been consumed.
  void skip_parens() {
    int depth = 1;
    while (depth > 0) {
      VToken t = next();
      if (t.kind == VTok::end) fail(t, "unbalanced parentheses");
      if (t.kind == VTok::punct && t.text == "(") ++depth;
      if (t.kind == VTok::punct && t.text == ")") --depth;
    }
  }
  void skip_to_semicolon() {
    for (;;) {
      VToken t = next();
      if (t.kind == VTok::end) fail(t, "missing ';'");
      if (t.kind == VTok::punct && t.text == ";") return;
    }
  }

  std::optional<VRange> opt_range() {
    if (!accept("[")) return std::nullopt;
    VRange r;
    r.msb = expect_int();
    expect(":");
    r.lsb = expect_int();
    expect("]");
    return r;
  }

  static std::vector<char> expand_constant(const std::string& text, const VToken& t, const VerilogParser& p) {
    std::size_t q = text.find('\'');
    int size = -1;
    if (q != std::string::npos && q > 0) {
      std::string digits;
      for (char c : text.substr(0, q))
        if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
      if (!digits.empty()) size = std::stoi(digits);
    }
    std::size_t i = q + 1;
    if (i < text.size() && (text[i] == 's' || text[i] == 'S')) ++i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) p.fail(t, "malformed constant");
    char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i++])));
    std::string digits;
    for (; i < text.size(); ++i)
      if (text[i] != '_' && !std::isspace(static_cast<unsigned char>(text[i])))
        digits.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    std::vector<char> bits;  // msb first
    auto push_value = [&](unsigned v, int nbits) {
      for (int b = nbits - 1; b >= 0; --b) bits.push_back(((v >> b) & 1u) ? '1' : '0');
    };
    if (base == 'b' || base == 'o' || base == 'h') {
      const int per = base == 'b' ? 1 : base == 'o' ? 3 : 4;
      for (char c : digits) {
        if (c == 'x' || c == 'z' || c == '?') {
          for (int k = 0; k < per; ++k) bits.push_back(c == '?' ? 'z' : c);
        } else {
          unsigned v = std::isdigit(static_cast<unsigned char>(c)) ? static_cast<unsigned>(c - '0')
                                                                   : static_cast<unsigned>(c - 'a' + 10);
          if (v >= (1u << per)) p.fail(t, "bad digit in constant");
          push_value(v, per);
        }
      }
    } else if (base == 'd') {
      unsigned long long v = std::stoull(digits.empty() ? "0" : digits);
      for (int b = 63; b >= 0; --b) bits.push_back(((v >> b) & 1ull) ? '1' : '0');
    } else {
      p.fail(t, "unknown constant base");
    }
    if (size < 0) {
      if (base == 'd') {
        size = 32;
      } else {
        size = static_cast<int>(bits.size());
      }
    }
    if (static_cast<int>(bits.size()) > size) {
      bits.erase(bits.begin(), bits.end() - size);
    } else {
      const char fill = (!bits.empty() && (bits.front() == 'x' || bits.front() == 'z')) ? bits.front() : '0';
      bits.insert(bits.begin(), static_cast<std::size_t>(size) - bits.size(), fill);
    }
    return bits;
  }

  VExpr parse_expr() {
    VExpr e;
    const VToken& t = peek();
    if (t.kind == VTok::punct && t.text == "{") {
      next();
      e.kind = VExpr::Kind::concat;
      // Replication {n{...}}.
      if (peek().kind == VTok::number) {
        int n = expect_int();
        expect("{");
        VExpr inner;
        inner.kind = VExpr::Kind::concat;
        inner.items.push_back(parse_expr());
        while (accept(",")) inner.items.push_back(parse_expr());
        expect("}");
        expect("}");
        for (int i = 0; i < n; ++i) e.items.push_back(inner);
        return e;
      }
      e.items.push_back(parse_expr());
      while (accept(",")) e.items.push_back(parse_expr());
      expect("}");
      return e;
    }
    if (t.kind == VTok::sized) {
      VToken c = next();
      e.kind = VExpr::Kind::constant;
      e.const_bits = expand_constant(c.text, c, *this);
      return e;
    }
    if (t.kind == VTok::number) {
      VToken c = next();
      e.kind = VExpr::Kind::constant;
      e.const_bits = expand_constant("'d" + c.text, c, *this);
      return e;
    }
    if (t.kind == VTok::ident) {
      e.kind = VExpr::Kind::ref;
      e.name = next().text;
      if (accept("[")) {
        VRange r;
        r.msb = expect_int();
        if (accept(":")) {
          r.lsb = expect_int();
        } else {
          r.lsb = r.msb;
          e.bit_select = true;
        }
        expect("]");
        e.select = r;
      }
      return e;
    }
    fail(t, fmt::format("unexpected '{}' in expression", t.text));
  }

  void declare(VModule& m, const VNetDecl& d, const VToken& at) {
    if (decl_module_ != &m) {
      decl_module_ = &m;
      decl_index_.clear();
      for (std::size_t i = 0; i < m.decls.size(); ++i) decl_index_.emplace(m.decls[i].name, i);
    }
    auto [slot, fresh] = decl_index_.emplace(d.name, m.decls.size());
    if (!fresh) {
      auto& existing = m.decls[slot->second];
      // `output y; wire y;` is legal: keep the port kind, adopt a range if one was given.
      if (d.kind == NetKind::wire) return;
      if (existing.kind == NetKind::wire) {
        existing.kind = d.kind;
        if (d.range) existing.range = d.range;
        return;
      }
      if (existing.range != d.range && d.range && existing.range)
        fail(at, fmt::format("conflicting declarations of '{}'", d.name));
      existing.kind = d.kind;
      return;
    }
    m.decls.push_back(d);
  }

  void parse_decl_list(VModule& m, NetKind kind, bool ansi) {
    // Optional net type / signedness after a direction keyword.
    for (;;) {
      const VToken& t = peek();
      if (t.kind == VTok::ident &&
          (t.text == "wire" || t.text == "reg" || t.text == "tri" || t.text == "signed" || t.text == "logic")) {
        next();
        continue;
      }
      break;
    }
    std::optional<VRange> range = opt_range();
    for (;;) {
      VToken nt = next();
      if (nt.kind != VTok::ident) fail(nt, fmt::format("expected identifier, found '{}'", nt.text));
      VNetDecl d{nt.text, kind, range};
      declare(m, d, nt);
      if (ansi) m.port_order.push_back(nt.text);
      if (!ansi && accept("=")) {
        VAssign a;
        a.lhs.kind = VExpr::Kind::ref;
        a.lhs.name = nt.text;
        a.rhs = parse_expr();
        m.assigns.push_back(std::move(a));
      }
      if (ansi) {
        // In an ANSI header a comma may be followed by another direction keyword.
        if (peek().kind == VTok::punct && peek().text == ",") {
          next();
          const VToken& a = peek();
          if (a.kind == VTok::ident && (a.text == "input" || a.text == "output" || a.text == "inout")) return;
          continue;
        }
        return;
      }
      if (accept(",")) continue;
      expect(";");
      return;
    }
  }

  static std::optional<NetKind> direction_kind(const std::string& w) {
    if (w == "input") return NetKind::input;
    if (w == "output") return NetKind::output;
    if (w == "inout") return NetKind::inout;
    return std::nullopt;
  }

  VModule parse_module(const VToken& kw) {
    VModule m;
    decl_module_ = nullptr;
    m.line = lines_(kw.offset);
    m.name = expect_ident();
    if (accept("#")) {
      expect("(");
      skip_parens();
    }
    if (accept("(")) {
      if (!accept(")")) {
        for (;;) {
          const VToken& t = peek();
          if (t.kind == VTok::ident && direction_kind(t.text)) {
            NetKind k = *direction_kind(next().text);
            parse_decl_list(m, k, true);
            if (accept(")")) break;
            continue;
          }
          m.port_order.push_back(expect_ident());
          if (accept(")")) break;
          expect(",");
        }
      }
    }
    expect(";");
    for (;;) {
      VToken t = next();
      if (t.kind == VTok::end) fail(t, fmt::format("missing endmodule for '{}'", m.name));
      if (t.kind == VTok::punct && t.text == ";") continue;
      if (t.kind != VTok::ident) fail(t, fmt::format("unexpected '{}' in module '{}'", t.text, m.name));
      const std::string& w = t.text;
      if (w == "endmodule") break;
      if (auto k = direction_kind(w)) {
        parse_decl_list(m, *k, false);
      } else if (w == "wire" || w == "tri" || w == "reg" || w == "wand" || w == "wor" || w == "logic") {
        parse_decl_list(m, NetKind::wire, false);
      } else if (w == "supply0" || w == "supply1") {
        parse_decl_list(m, w == "supply0" ? NetKind::supply0 : NetKind::supply1, false);
      } else if (w == "assign") {
        for (;;) {
          VAssign a;
          a.lhs = parse_expr();
          expect("=");
          a.rhs = parse_expr();
          m.assigns.push_back(std::move(a));
          if (accept(",")) continue;
          expect(";");
          break;
        }
      } else if (w == "parameter" || w == "localparam" || w == "defparam" || w == "genvar") {
        skip_to_semicolon();
      } else if (w == "specify") {
        for (;;) {
          VToken s = next();
          if (s.kind == VTok::end) fail(s, "missing endspecify");
          if (s.kind == VTok::ident && s.text == "endspecify") break;
        }
      } else if (w == "always" || w == "initial" || w == "function" || w == "task" || w == "generate" ||
                 w == "always_ff" || w == "always_comb") {
        fail(t, fmt::format("behavioral construct '{}' is not supported", w));
      } else {
        parse_instances(m, t);
      }
    }
    return m;
  }

  void parse_instances(VModule& m, const VToken& type_tok) {
    if (accept("#")) {
      if (accept("(")) skip_parens();
      else next();
    }
    for (;;) {
      VInstance inst;
      inst.module = type_tok.text;
      VToken nt = next();
      if (nt.kind != VTok::ident) fail(nt, fmt::format("expected instance name after '{}'", type_tok.text));
      inst.name = nt.text;
      inst.line = lines_(nt.offset);
      if (peek().kind == VTok::punct && peek().text == "[") fail(peek(), "instance arrays are not supported");
      expect("(");
      if (!accept(")")) {
        for (;;) {
          VConnection c;
          if (accept(".")) {
            c.port = expect_ident();
            expect("(");
            if (!(peek().kind == VTok::punct && peek().text == ")")) c.expr = parse_expr();
            expect(")");
          } else {
            if (!(peek().kind == VTok::punct && (peek().text == "," || peek().text == ")"))) c.expr = parse_expr();
          }
          inst.connections.push_back(std::move(c));
          if (accept(")")) break;
          expect(",");
        }
      }
      m.instances.push_back(std::move(inst));
      if (accept(",")) continue;
      expect(";");
      return;
    }
  }

  std::string_view s_;
  LineCounter lines_{s_};
  const VModule* decl_module_ = nullptr;
  std::unordered_map<std::string, std::size_t> decl_index_;
  std::size_t pos_;
  std::size_t end_;
  const std::string& file_;
  VToken peeked_;
  bool has_peek_ = false;
};

}  // namespace

VerilogDesign parse_verilog(std::string_view source, const std::string& name) {
  VerilogDesign d;
  VerilogParser p(source, 0, source.size(), name);
  d.modules = p.parse();
  return d;
}

VerilogDesign parse_verilog_chunked(std::string_view source, std::size_t chunks, const std::string& name) {
  auto ranges = split_chunks(source, chunks, ChunkFormat::verilog);
  std::vector<std::vector<VModule>> parts(ranges.size());
  parallel_for(ranges.size(), [&](std::size_t i) {
    VerilogParser p(source, ranges[i].begin, ranges[i].end, name);
    parts[i] = p.parse();
  });
  VerilogDesign d;
  for (auto& part : parts)
    for (auto& m : part) d.modules.push_back(std::move(m));
  return d;
}

}  // namespace ministra
