#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <mutex>

#include "ministra/liberty.hpp"
#include "ministra/log.hpp"
#include "ministra/parallel.hpp"

namespace ministra {
namespace {

// ---------------------------------------------------------------------------
// Generic Liberty syntax: groups, simple attributes, complex attributes.

struct LibAttr {
  std::string name;
  std::vector<std::string> values;
  bool complex = false;
  std::size_t offset = 0;
};

struct LibGroup {
  std::string type;
  std::vector<std::string> args;
  std::vector<LibAttr> attrs;
  std::vector<LibGroup> groups;
  std::size_t offset = 0;

  const LibAttr* attr(std::string_view n) const {
    for (const auto& a : attrs)
      if (a.name == n) return &a;
    return nullptr;
  }
};

enum class Tok { word, string, lparen, rparen, lbrace, rbrace, colon, semi, comma, end };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
  std::size_t line;
};

class LibLexer {
 public:
  LibLexer(std::string_view s, const std::string& file) : s_(s), file_(file) {}

  Token next() {
    skip();
    if (pos_ >= s_.size()) return {Tok::end, {}, pos_, line_};
    const std::size_t start = pos_;
    const char c = s_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      return Token{k, s_.substr(start, 1), start, line_};
    };
    switch (c) {
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case '{': return single(Tok::lbrace);
      case '}': return single(Tok::rbrace);
      case ':': return single(Tok::colon);
      case ';': return single(Tok::semi);
      case ',': return single(Tok::comma);
      case '"': {
        const std::size_t line = line_;
        ++pos_;
        std::size_t b = pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
          if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
          if (s_[pos_] == '\n') ++line_;
          ++pos_;
        }
        if (pos_ >= s_.size()) throw ParseError(file_, start, line, "unterminated string");
        std::string_view body = s_.substr(b, pos_ - b);
        ++pos_;
        return {Tok::string, body, start, line};
      }
      default: break;
    }
    while (pos_ < s_.size()) {
      char d = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '{' || d == '}' ||
          d == ':' || d == ';' || d == ',' || d == '"')
        break;
      if (d == '\\' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == '\n' || s_[pos_ + 1] == '\r')) break;
      ++pos_;
    }
    return {Tok::word, s_.substr(start, pos_ - start), start, line_};
  }

  Token peek() {
    const std::size_t p = pos_, l = line_;
    Token t = next();
    pos_ = p;
    line_ = l;
    return t;
  }

  std::size_t line() const { return line_; }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '\\' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == '\n' || s_[pos_ + 1] == '\r')) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*') {
        std::size_t e = s_.find("*/", pos_ + 2);
        if (e == std::string_view::npos) throw ParseError(file_, pos_, line_, "unterminated comment");
        line_ += static_cast<std::size_t>(std::count(s_.begin() + pos_, s_.begin() + e, '\n'));
        pos_ = e + 2;
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  std::string_view s_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

class LibSyntaxParser {
 public:
  LibSyntaxParser(std::string_view s, const std::string& file) : lex_(s, file), file_(file) {}

  std::vector<LibGroup> parse_top() {
    std::vector<LibGroup> out;
    for (;;) {
      Token t = lex_.peek();
      if (t.kind == Tok::end) return out;
      if (t.kind == Tok::semi) {
        lex_.next();
        continue;
      }
      LibGroup holder;
      parse_statement(holder);
      for (auto& g : holder.groups) out.push_back(std::move(g));
    }
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(file_, t.offset, t.line, msg);
  }

  Token expect(Tok k, const char* what) {
    Token t = lex_.next();
    if (t.kind != k) fail(t, fmt::format("expected {}, found '{}'", what, t.text));
    return t;
  }

  // One statement inside a group body: simple attribute, complex attribute, or subgroup.
  void parse_statement(LibGroup& parent) {
    Token name = lex_.next();
    if (name.kind != Tok::word && name.kind != Tok::string) fail(name, fmt::format("unexpected '{}'", name.text));
    Token t = lex_.next();
    if (t.kind == Tok::colon) {
      LibAttr a;
      a.name = std::string(name.text);
      a.offset = name.offset;
      const std::size_t line = t.line;
      std::string value;
      for (;;) {
        Token v = lex_.peek();
        if (v.kind == Tok::semi) {
          lex_.next();
          break;
        }
        if (v.kind == Tok::rbrace || v.kind == Tok::end || v.line != line) break;
        lex_.next();
        if (!value.empty()) value.push_back(' ');
        value.append(v.text);
      }
      a.values.push_back(std::move(value));
      parent.attrs.push_back(std::move(a));
      return;
    }
    if (t.kind != Tok::lparen) fail(t, fmt::format("expected ':' or '(' after '{}'", name.text));
    std::vector<std::string> args;
    std::string cur;
    bool have = false;
    for (;;) {
      Token v = lex_.next();
      if (v.kind == Tok::rparen) break;
      if (v.kind == Tok::end) fail(v, "unterminated argument list");
      if (v.kind == Tok::comma) {
        args.push_back(std::move(cur));
        cur.clear();
        have = false;
        continue;
      }
      if (have) cur.push_back(' ');
      cur.append(v.text);
      have = true;
    }
    if (have || !args.empty()) args.push_back(std::move(cur));
    Token after = lex_.peek();
    if (after.kind == Tok::lbrace) {
      lex_.next();
      LibGroup g;
      g.type = std::string(name.text);
      g.args = std::move(args);
      g.offset = name.offset;
      for (;;) {
        Token b = lex_.peek();
        if (b.kind == Tok::rbrace) {
          lex_.next();
          break;
        }
        if (b.kind == Tok::end) fail(b, fmt::format("missing '}}' for group '{}'", g.type));
        if (b.kind == Tok::semi) {
          lex_.next();
          continue;
        }
        parse_statement(g);
      }
      parent.groups.push_back(std::move(g));
      return;
    }
    if (after.kind == Tok::semi) lex_.next();
    LibAttr a;
    a.name = std::string(name.text);
    a.values = std::move(args);
    a.complex = true;
    a.offset = name.offset;
    parent.attrs.push_back(std::move(a));
  }

  LibLexer lex_;
  const std::string& file_;
};

// ---------------------------------------------------------------------------
// Semantic interpretation.

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_double(std::string_view s, double& out) {
  std::string t = trim(s);
  if (t.empty()) return false;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

std::vector<double> parse_number_list(const std::vector<std::string>& args, const std::string& file,
                                      const std::string& text, std::size_t offset) {
  std::vector<double> out;
  for (const auto& a : args) {
    std::size_t i = 0;
    while (i < a.size()) {
      while (i < a.size() && (a[i] == ',' || std::isspace(static_cast<unsigned char>(a[i])) || a[i] == '\\')) ++i;
      std::size_t j = i;
      while (j < a.size() && a[j] != ',' && !std::isspace(static_cast<unsigned char>(a[j])) && a[j] != '\\') ++j;
      if (j > i) {
        double v = 0;
        if (!parse_double(std::string_view(a).substr(i, j - i), v))
          throw ParseError(file, offset, line_of(text, offset),
                           fmt::format("bad number '{}'", std::string_view(a).substr(i, j - i)));
        out.push_back(v);
      }
      i = j;
    }
  }
  return out;
}

enum class Axis { slew, cap, data_slew, clock_slew, none };

Axis axis_of(std::string_view var) {
  if (var == "input_net_transition" || var == "input_transition_time") return Axis::slew;
  if (var == "total_output_net_capacitance") return Axis::cap;
  if (var == "constrained_pin_transition") return Axis::data_slew;
  if (var == "related_pin_transition") return Axis::clock_slew;
  return Axis::none;
}

struct FileUnits {
  double time_ps = 1000.0;
  double cap_ff = 1000.0;
  double res_kohm = 1.0;
  double slew_derate = 1.0;
  bool time_declared = false;
};

double axis_scale(Axis a, const FileUnits& u) { return a == Axis::cap ? u.cap_ff : u.time_ps; }

struct ParsedFile {
  std::string name;
  const std::string* text = nullptr;
  std::vector<LibGroup> top;
  FileUnits units;
  std::string lib_name;
};

class CellBuilder {
 public:
  CellBuilder(const ParsedFile& f, const std::map<std::string, LutTemplate>& templates,
              std::size_t& skipped_groups, std::size_t& skipped_attrs)
      : f_(f), templates_(templates), skipped_groups_(skipped_groups), skipped_attrs_(skipped_attrs) {}

  LibertyCell build(const LibGroup& g) {
    LibertyCell cell;
    if (g.args.empty()) fail(g.offset, "cell without a name");
    cell.name = trim(g.args[0]);
    // First pass: declare pins so timing groups can reference pins declared later.
    for (const auto& sub : g.groups) {
      if (sub.type == "pin") {
        for (const auto& a : sub.args) {
          LibertyPin pin;
          pin.name = trim(a);
          if (cell.find_pin(pin.name)) fail(sub.offset, fmt::format("duplicate pin '{}' in cell '{}'", pin.name, cell.name));
          cell.pins.push_back(std::move(pin));
        }
      } else if (sub.type == "ff" || sub.type == "latch" || sub.type == "ff_bank" || sub.type == "latch_bank") {
        cell.is_sequential = true;
        for (const auto& a : sub.args) cell.state_vars.push_back(trim(a));
      } else {
        ++skipped_groups_;
      }
    }
    for (const auto& sub : g.groups) {
      if (sub.type != "pin") continue;
      for (const auto& a : sub.args) build_pin(cell, *cell.find_pin(trim(a)), sub);
    }
    for (const auto& arc : cell.arcs) {
      if (is_check(arc.kind) || is_clock_to_q(arc.kind)) {
        cell.is_sequential = true;
        cell.pins[arc.from_pin].is_clock = true;
      }
    }
    // Pin functions may reference only pins and state variables.
    for (const auto& pin : cell.pins) {
      if (!pin.function) continue;
      for (const auto& v : pin.function->variables()) {
        bool ok = cell.find_pin(v).has_value() ||
                  std::find(cell.state_vars.begin(), cell.state_vars.end(), v) != cell.state_vars.end();
        if (!ok)
          fail(g.offset, fmt::format("function of pin '{}/{}' references undeclared '{}'", cell.name, pin.name, v));
      }
    }
    return cell;
  }

 private:
  [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
    throw ParseError(f_.name, offset, line_of(*f_.text, offset), msg);
  }

  void build_pin(LibertyCell& cell, std::uint32_t pin_idx, const LibGroup& g) {
    for (const auto& a : g.attrs) {
      LibertyPin& pin = cell.pins[pin_idx];
      const std::string v = a.values.empty() ? std::string() : trim(a.values[0]);
      if (a.name == "direction") {
        std::string d = lower(v);
        if (d == "input") pin.direction = PinDirection::input;
        else if (d == "output") pin.direction = PinDirection::output;
        else if (d == "inout") pin.direction = PinDirection::inout;
        else pin.direction = PinDirection::internal;
      } else if (a.name == "capacitance") {
        double c = 0;
        if (!parse_double(v, c)) fail(a.offset, "bad capacitance");
        pin.capacitance = c * f_.units.cap_ff;
      } else if (a.name == "max_capacitance") {
        double c = 0;
        if (!parse_double(v, c)) fail(a.offset, "bad max_capacitance");
        pin.max_capacitance = c * f_.units.cap_ff;
      } else if (a.name == "function") {
        try {
          pin.function = BoolExpr::parse(v);
        } catch (const Error& e) {
          fail(a.offset, e.what());
        }
      } else if (a.name == "clock") {
        pin.is_clock = lower(v) == "true";
      } else {
        ++skipped_attrs_;
      }
    }
    for (const auto& sub : g.groups) {
      if (sub.type == "timing") {
        build_timing(cell, pin_idx, sub);
      } else {
        ++skipped_groups_;
      }
    }
  }

  void build_timing(LibertyCell& cell, std::uint32_t to_pin, const LibGroup& g) {
    const LibAttr* rel = g.attr("related_pin");
    if (rel == nullptr || rel->values.empty()) fail(g.offset, "timing group without related_pin");
    ArcKind kind = ArcKind::combinational;
    if (const LibAttr* tt = g.attr("timing_type")) {
      std::string t = trim(tt->values.empty() ? "" : tt->values[0]);
      if (t == "combinational") kind = ArcKind::combinational;
      else if (t == "rising_edge") kind = ArcKind::rising_edge_clk_to_q;
      else if (t == "falling_edge") kind = ArcKind::falling_edge_clk_to_q;
      else if (t == "setup_rising") kind = ArcKind::setup_rising;
      else if (t == "setup_falling") kind = ArcKind::setup_falling;
      else if (t == "hold_rising") kind = ArcKind::hold_rising;
      else if (t == "hold_falling") kind = ArcKind::hold_falling;
      else {
        ++skipped_groups_;
        return;
      }
    }
    TimingSense sense = TimingSense::non_unate;
    if (const LibAttr* ts = g.attr("timing_sense")) {
      std::string t = trim(ts->values.empty() ? "" : ts->values[0]);
      if (t == "positive_unate") sense = TimingSense::positive_unate;
      else if (t == "negative_unate") sense = TimingSense::negative_unate;
      else sense = TimingSense::non_unate;
    }
    std::optional<BoolExpr> when;
    if (const LibAttr* w = g.attr("when"); w && !w->values.empty()) {
      try {
        when = BoolExpr::parse(trim(w->values[0]));
      } catch (const Error& e) {
        fail(w->offset, e.what());
      }
    }
    TimingArc proto;
    proto.to_pin = to_pin;
    proto.kind = kind;
    proto.sense = sense;
    proto.when = when;
    const bool check = is_check(kind);
    for (const auto& sub : g.groups) {
      std::optional<Lut2D>* slot = nullptr;
      bool transition = false;
      if (!check && sub.type == "cell_rise") slot = &proto.cell_rise;
      else if (!check && sub.type == "cell_fall") slot = &proto.cell_fall;
      else if (!check && sub.type == "rise_transition") slot = &proto.rise_transition, transition = true;
      else if (!check && sub.type == "fall_transition") slot = &proto.fall_transition, transition = true;
      else if (check && sub.type == "rise_constraint") slot = &proto.rise_constraint;
      else if (check && sub.type == "fall_constraint") slot = &proto.fall_constraint;
      if (slot == nullptr) {
        ++skipped_groups_;
        continue;
      }
      *slot = build_table(sub, check, transition ? f_.units.slew_derate : 1.0);
    }
    for (const auto& a : g.attrs) {
      if (a.name != "related_pin" && a.name != "timing_type" && a.name != "timing_sense" && a.name != "when")
        ++skipped_attrs_;
    }
    // related_pin may name several pins separated by spaces.
    std::string rel_text = rel->values[0];
    std::size_t i = 0;
    bool any = false;
    while (i < rel_text.size()) {
      while (i < rel_text.size() && std::isspace(static_cast<unsigned char>(rel_text[i]))) ++i;
      std::size_t j = i;
      while (j < rel_text.size() && !std::isspace(static_cast<unsigned char>(rel_text[j]))) ++j;
      if (j > i) {
        std::string rp = rel_text.substr(i, j - i);
        auto from = cell.find_pin(rp);
        if (!from) fail(rel->offset, fmt::format("related_pin '{}' not declared in cell '{}'", rp, cell.name));
        TimingArc arc = proto;
        arc.from_pin = *from;
        cell.arcs.push_back(std::move(arc));
        any = true;
      }
      i = j;
    }
    if (!any) fail(rel->offset, "empty related_pin");
  }

  Lut2D build_table(const LibGroup& g, bool check, double value_mult) {
    std::string tmpl_name = g.args.empty() ? "scalar" : trim(g.args[0]);
    std::vector<double> idx1, idx2;
    Axis a1 = Axis::none, a2 = Axis::none;
    if (tmpl_name != "scalar") {
      auto it = templates_.find(tmpl_name);
      if (it == templates_.end()) fail(g.offset, fmt::format("unresolved table template '{}'", tmpl_name));
      const LutTemplate& t = it->second;
      a1 = axis_of(t.variable_1);
      a2 = axis_of(t.variable_2);
      if (!t.variable_1.empty() && a1 == Axis::none)
        fail(g.offset, fmt::format("unsupported table variable '{}'", t.variable_1));
      if (!t.variable_2.empty() && a2 == Axis::none)
        fail(g.offset, fmt::format("unsupported table variable '{}'", t.variable_2));
      idx1 = t.index_1;
      idx2 = t.index_2;
    }
    std::vector<double> values;
    for (const auto& a : g.attrs) {
      if (a.name == "index_1") {
        idx1 = parse_number_list(a.values, f_.name, *f_.text, a.offset);
        for (double& v : idx1) v *= axis_scale(a1, f_.units);
      } else if (a.name == "index_2") {
        idx2 = parse_number_list(a.values, f_.name, *f_.text, a.offset);
        for (double& v : idx2) v *= axis_scale(a2, f_.units);
      } else if (a.name == "values") {
        values = parse_number_list(a.values, f_.name, *f_.text, a.offset);
      }
    }
    if (a1 == Axis::none) idx1.clear();
    if (a2 == Axis::none) idx2.clear();
    const std::size_t r = idx1.empty() ? 1 : idx1.size();
    const std::size_t c = idx2.empty() ? 1 : idx2.size();
    if (values.size() != r * c)
      fail(g.offset, fmt::format("table '{}' has {} values, expected {}x{}", g.type, values.size(), r, c));
    for (auto* idx : {&idx1, &idx2})
      for (std::size_t k = 1; k < idx->size(); ++k)
        if (!((*idx)[k] > (*idx)[k - 1])) fail(g.offset, "table index not strictly ascending");
    for (double& v : values) v *= f_.units.time_ps * value_mult;

    // Normalize axes: delay tables (slew, cap); constraint tables (data slew, clock slew).
    const Axis first = check ? Axis::data_slew : Axis::slew;
    const Axis second = check ? Axis::clock_slew : Axis::cap;
    Lut2D out;
    if ((a1 == first || a1 == Axis::none) && (a2 == second || a2 == Axis::none)) {
      out.index_1 = std::move(idx1);
      out.index_2 = std::move(idx2);
      out.values = std::move(values);
    } else if ((a1 == second || a1 == Axis::none) && (a2 == first || a2 == Axis::none)) {
      out.index_1 = std::move(idx2);
      out.index_2 = std::move(idx1);
      out.values.resize(values.size());
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out.values[j * r + i] = values[i * c + j];
    } else {
      fail(g.offset, fmt::format("table '{}' uses variables incompatible with its arc", g.type));
    }
    return out;
  }

  const ParsedFile& f_;
  const std::map<std::string, LutTemplate>& templates_;
  std::size_t& skipped_groups_;
  std::size_t& skipped_attrs_;
};

FileUnits read_units(const LibGroup& lib, const std::string& file, const std::string& text) {
  FileUnits u;
  for (const auto& a : lib.attrs) {
    try {
      if (a.name == "time_unit") {
        u.time_ps = liberty_time_unit_ps(trim(a.values.at(0)));
        u.time_declared = true;
      } else if (a.name == "capacitive_load_unit") {
        if (a.values.size() != 2) throw Error("capacitive_load_unit needs (value, unit)");
        double m = 0;
        if (!parse_double(a.values[0], m)) throw Error("bad capacitive_load_unit value");
        u.cap_ff = liberty_cap_unit_ff(m, trim(a.values[1]));
      } else if (a.name == "pulling_resistance_unit") {
        u.res_kohm = liberty_res_unit_kohm(trim(a.values.at(0)));
      } else if (a.name == "slew_derate_from_library") {
        if (!parse_double(a.values.at(0), u.slew_derate)) throw Error("bad slew_derate_from_library");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(file, a.offset, line_of(text, a.offset), e.what());
    }
  }
  return u;
}

std::pair<double, std::string> split_unit(std::string_view text) {
  std::string t = lower(trim(text));
  double m = 1.0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  auto [p, ec] = std::from_chars(b, e, m);
  if (ec != std::errc()) {
    m = 1.0;
    p = b;
  }
  return {m, trim(std::string_view(p, static_cast<std::size_t>(e - p)))};
}

}  // namespace

double liberty_time_unit_ps(std::string_view text) {
  auto [m, u] = split_unit(text);
  if (u == "ps") return m;
  if (u == "ns") return m * 1e3;
  if (u == "us") return m * 1e6;
  if (u == "fs") return m * 1e-3;
  if (u == "s") return m * 1e12;
  throw Error("unknown time unit '" + std::string(text) + "'");
}

double liberty_cap_unit_ff(double mult, std::string_view unit) {
  std::string u = lower(trim(unit));
  if (u == "ff") return mult;
  if (u == "pf") return mult * 1e3;
  if (u == "nf") return mult * 1e6;
  if (u == "af") return mult * 1e-3;
  throw Error("unknown capacitance unit '" + std::string(unit) + "'");
}

double liberty_res_unit_kohm(std::string_view text) {
  auto [m, u] = split_unit(text);
  if (u == "ohm") return m * 1e-3;
  if (u == "kohm") return m;
  if (u == "mohm") return m * 1e3;
  throw Error("unknown resistance unit '" + std::string(text) + "'");
}

bool is_check(ArcKind k) {
  return k == ArcKind::setup_rising || k == ArcKind::setup_falling || k == ArcKind::hold_rising ||
         k == ArcKind::hold_falling;
}
bool is_setup(ArcKind k) { return k == ArcKind::setup_rising || k == ArcKind::setup_falling; }
bool is_clock_to_q(ArcKind k) { return k == ArcKind::rising_edge_clk_to_q || k == ArcKind::falling_edge_clk_to_q; }

RiseFall active_clock_edge(ArcKind k) {
  switch (k) {
    case ArcKind::falling_edge_clk_to_q:
    case ArcKind::setup_falling:
    case ArcKind::hold_falling: return RiseFall::fall;
    default: return RiseFall::rise;
  }
}

const char* to_string(ArcKind k) {
  switch (k) {
    case ArcKind::combinational: return "combinational";
    case ArcKind::rising_edge_clk_to_q: return "rising_edge";
    case ArcKind::falling_edge_clk_to_q: return "falling_edge";
    case ArcKind::setup_rising: return "setup_rising";
    case ArcKind::setup_falling: return "setup_falling";
    case ArcKind::hold_rising: return "hold_rising";
    case ArcKind::hold_falling: return "hold_falling";
  }
  return "?";
}

const char* to_string(TimingSense s) {
  switch (s) {
    case TimingSense::positive_unate: return "positive_unate";
    case TimingSense::negative_unate: return "negative_unate";
    case TimingSense::non_unate: return "non_unate";
  }
  return "?";
}

std::optional<std::uint32_t> LibertyCell::find_pin(std::string_view n) const {
  for (std::uint32_t i = 0; i < pins.size(); ++i)
    if (pins[i].name == n) return i;
  return std::nullopt;
}

const LibertyCell* LibertyLibrary::find_cell(std::string_view n) const {
  auto id = find_cell_id(n);
  return id ? &cells[*id] : nullptr;
}

std::optional<LibCellId> LibertyLibrary::find_cell_id(std::string_view n) const {
  auto it = cell_index_.find(std::string(n));
  if (it == cell_index_.end()) return std::nullopt;
  return it->second;
}

double LibertyLibrary::default_slew() const {
  double best = kInf;
  for (const auto& c : cells)
    for (const auto& a : c.arcs)
      for (const auto* t : {&a.cell_rise, &a.cell_fall, &a.rise_transition, &a.fall_transition})
        if (*t && !(*t)->index_1.empty()) best = std::min(best, (*t)->index_1.front());
  return best == kInf ? 0.0 : best;
}

void LibertyLibrary::build_index() {
  cell_index_.clear();
  for (LibCellId i = 0; i < cells.size(); ++i) cell_index_.emplace(cells[i].name, i);
}

LibertyLibrary parse_liberty(std::string_view text, const std::string& name) {
  return parse_liberty(std::vector<SourceText>{SourceText{name, std::string(text)}});
}

LibertyLibrary parse_liberty(const std::vector<SourceText>& sources) {
  std::vector<SourceText> texts(sources.size());
  std::vector<ParsedFile> files(sources.size());
  parallel_for(sources.size(), [&](std::size_t i) {
    texts[i].name = sources[i].name;
    texts[i].bytes = maybe_gunzip(sources[i].bytes, sources[i].name);
    files[i].name = texts[i].name;
    files[i].text = &texts[i].bytes;
    LibSyntaxParser p(texts[i].bytes, texts[i].name);
    files[i].top = p.parse_top();
  });

  LibertyLibrary lib;
  std::map<std::string, LutTemplate> templates;
  bool main_set = false;
  for (auto& f : files) {
    for (const auto& g : f.top) {
      if (g.type != "library") throw ParseError(f.name, g.offset, line_of(*f.text, g.offset), "expected library group");
      f.units = read_units(g, f.name, *f.text);
      f.lib_name = g.args.empty() ? "" : trim(g.args[0]);
      if (!main_set) {
        lib.name = f.lib_name;
        lib.time_unit_ps = f.units.time_ps;
        lib.cap_unit_ff = f.units.cap_ff;
        lib.res_unit_kohm = f.units.res_kohm;
        lib.slew_derate = f.units.slew_derate;
        main_set = true;
      }
      for (const auto& sub : g.groups) {
        if (sub.type != "lu_table_template") continue;
        LutTemplate t;
        t.name = sub.args.empty() ? "" : trim(sub.args[0]);
        Axis a1 = Axis::none, a2 = Axis::none;
        for (const auto& a : sub.attrs) {
          if (a.name == "variable_1") t.variable_1 = trim(a.values.at(0)), a1 = axis_of(t.variable_1);
          if (a.name == "variable_2") t.variable_2 = trim(a.values.at(0)), a2 = axis_of(t.variable_2);
        }
        for (const auto& a : sub.attrs) {
          if (a.name == "index_1") {
            t.index_1 = parse_number_list(a.values, f.name, *f.text, a.offset);
            for (double& v : t.index_1) v *= axis_scale(a1, f.units);
          } else if (a.name == "index_2") {
            t.index_2 = parse_number_list(a.values, f.name, *f.text, a.offset);
            for (double& v : t.index_2) v *= axis_scale(a2, f.units);
          }
        }
        auto [it, inserted] = templates.emplace(t.name, t);
        if (!inserted && !(it->second == t))
          throw ParseError(f.name, sub.offset, line_of(*f.text, sub.offset),
                           fmt::format("template '{}' redefined with different content", t.name));
      }
    }
  }

  std::vector<std::vector<LibertyCell>> per_file(files.size());
  std::vector<std::size_t> skipped_g(files.size(), 0), skipped_a(files.size(), 0);
  parallel_for(files.size(), [&](std::size_t i) {
    for (const auto& g : files[i].top) {
      CellBuilder b(files[i], templates, skipped_g[i], skipped_a[i]);
      for (const auto& sub : g.groups) {
        if (sub.type == "cell") per_file[i].push_back(b.build(sub));
        else if (sub.type != "lu_table_template") ++skipped_g[i];
      }
      for (const auto& a : g.attrs) {
        if (a.name != "time_unit" && a.name != "capacitive_load_unit" && a.name != "pulling_resistance_unit" &&
            a.name != "slew_derate_from_library")
          ++skipped_a[i];
      }
    }
  });

  std::map<std::string, LibertyCell> cells;
  for (std::size_t i = 0; i < files.size(); ++i) {
    lib.skipped_groups += skipped_g[i];
    lib.skipped_attributes += skipped_a[i];
    for (auto& c : per_file[i]) {
      auto it = cells.find(c.name);
      if (it == cells.end()) {
        cells.emplace(c.name, std::move(c));
      } else if (!(it->second == c)) {
        throw ParseError(files[i].name, 0, 0, fmt::format("cell '{}' redefined with conflicting content", c.name));
      }
    }
  }
  for (auto& [n, t] : templates) lib.templates.push_back(std::move(t));
  for (auto& [n, c] : cells) lib.cells.push_back(std::move(c));
  lib.build_index();
  if (lib.skipped_groups + lib.skipped_attributes > 0)
    log::debug("liberty: skipped {} groups and {} attributes outside the supported subset", lib.skipped_groups,
               lib.skipped_attributes);
  return lib;
}

}  // namespace ministra
