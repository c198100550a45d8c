#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "ministra/chunks.hpp"
#include "ministra/io.hpp"
#include "ministra/log.hpp"
#include "ministra/parallel.hpp"
#include "ministra/spef.hpp"

namespace ministra {
namespace {

struct Tok {
  std::string_view text;
  std::size_t offset = 0;
  bool eol_before = false;
};

class SpefReader {
 public:
  SpefReader(std::string_view s, std::size_t begin, std::size_t end, const std::string& file, SpefData& ctx,
             char divider)
      : s_(s), pos_(begin), end_(end), file_(file), ctx_(ctx), divider_(divider) {}

  // Header statements up to the first *D_NET.
  void parse_header() {
    for (;;) {
      Tok t = peek();
      if (t.text.empty() || t.text == "*D_NET") return;
      next();
      if (t.text == "*SPEF" || t.text == "*DATE" || t.text == "*VENDOR" || t.text == "*PROGRAM" ||
          t.text == "*VERSION" || t.text == "*DESIGN_FLOW") {
        skip_line_values();
      } else if (t.text == "*DESIGN") {
        ctx_.design = unquote(next().text);
      } else if (t.text == "*DIVIDER") {
        ctx_.divider = next().text.front();
      } else if (t.text == "*DELIMITER") {
        ctx_.delimiter = next().text.front();
      } else if (t.text == "*BUS_DELIMITER") {
        skip_line_values();
      } else if (t.text == "*T_UNIT" || t.text == "*L_UNIT") {
        next();
        next();
      } else if (t.text == "*C_UNIT") {
        double v = number(next());
        Tok u = next();
        std::string unit = upper(u.text);
        double scale = unit == "PF" ? 1000.0 : unit == "FF" ? 1.0 : unit == "NF" ? 1e6 : unit == "F" ? 1e15 : -1;
        if (scale < 0) fail(u, fmt::format("unknown capacitance unit '{}'", u.text));
        ctx_.cap_unit_ff = v * scale;
      } else if (t.text == "*R_UNIT") {
        double v = number(next());
        Tok u = next();
        std::string unit = upper(u.text);
        double scale = unit == "OHM" ? 1e-3 : unit == "KOHM" ? 1.0 : unit == "MOHM" ? 1e3 : -1;
        if (scale < 0) fail(u, fmt::format("unknown resistance unit '{}'", u.text));
        ctx_.res_unit_kohm = v * scale;
      } else if (t.text == "*NAME_MAP") {
        while (!peek().text.empty() && peek().text.front() == '*' && is_index(peek().text)) {
          Tok idx = next();
          Tok nm = next();
          ctx_.name_map[index_of(idx)] = translate(nm.text);
        }
      } else if (t.text == "*PORTS") {
        while (!peek().text.empty() && !is_keyword(peek().text)) {
          SpefConn c;
          c.is_port = true;
          c.name = resolve(next());
          c.direction = next().text.front();
          skip_conn_attrs();
          ctx_.ports.push_back(std::move(c));
        }
      } else if (t.text == "*POWER_NETS" || t.text == "*GROUND_NETS") {
        skip_line_values();
      } else {
        fail(t, fmt::format("unexpected '{}' in SPEF header", t.text));
      }
    }
  }

  std::vector<SpefNet> parse_nets() {
    std::vector<SpefNet> nets;
    for (;;) {
      Tok t = next();
      if (t.text.empty()) return nets;
      if (t.text == "*D_NET") {
        nets.push_back(parse_dnet(t));
      } else if (t.text == "*R_NET") {
        fail(t, "reduced *R_NET sections are not supported");
      } else {
        fail(t, fmt::format("unexpected '{}' between nets", t.text));
      }
    }
  }

 private:
  [[noreturn]] void fail(const Tok& t, const std::string& msg) const {
    throw ParseError(file_, t.offset, line_of(s_, t.offset), msg);
  }

  Tok lex() {
    Tok t;
    while (pos_ < end_) {
      char c = s_[pos_];
      if (c == '\n') {
        t.eol_before = true;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < end_ && s_[pos_ + 1] == '/') {
        while (pos_ < end_ && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    t.offset = pos_;
    if (pos_ >= end_) return t;
    std::size_t b = pos_;
    if (s_[pos_] == '"') {
      ++pos_;
      while (pos_ < end_ && s_[pos_] != '"') ++pos_;
      if (pos_ < end_) ++pos_;
    } else {
      while (pos_ < end_ && !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        if (s_[pos_] == '\\' && pos_ + 1 < end_) ++pos_;
        ++pos_;
      }
    }
    t.text = s_.substr(b, pos_ - b);
    return t;
  }
  Tok next() {
    if (has_peek_) {
      has_peek_ = false;
      return peek_;
    }
    return lex();
  }
  const Tok& peek() {
    if (!has_peek_) {
      peek_ = lex();
      has_peek_ = true;
    }
    return peek_;
  }

  void skip_line_values() {
    while (!peek().text.empty() && !peek().eol_before) next();
  }

  static bool is_keyword(std::string_view t) {
    return t.size() > 1 && t.front() == '*' && std::isalpha(static_cast<unsigned char>(t[1]));
  }
  static bool is_index(std::string_view t) {
    return t.size() > 1 && t.front() == '*' && std::all_of(t.begin() + 1, t.end(), [](char c) {
             return std::isdigit(static_cast<unsigned char>(c));
           });
  }
  std::uint64_t index_of(const Tok& t) const {
    std::uint64_t v = 0;
    std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), v);
    return v;
  }
  static std::string upper(std::string_view t) {
    std::string u(t);
    for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
  }
  static std::string unquote(std::string_view t) {
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return std::string(t.substr(1, t.size() - 2));
    return std::string(t);
  }

  double number(const Tok& t) const {
    // Triples a:b:c take the typical (middle) value.
    std::string_view v = t.text;
    std::size_t c1 = v.find(':');
    if (c1 != std::string_view::npos) {
      std::size_t c2 = v.find(':', c1 + 1);
      v = v.substr(c1 + 1, c2 == std::string_view::npos ? std::string_view::npos : c2 - c1 - 1);
    }
    double out = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
      fail(t, fmt::format("expected number, found '{}'", t.text));
    return out;
  }

  // Removes escapes and rewrites the file divider to the caller's.
  std::string translate(std::string_view raw) const {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      char c = raw[i];
      if (c == '\\' && i + 1 < raw.size()) {
        out.push_back(raw[++i]);
      } else if (c == ctx_.divider) {
        out.push_back(divider_);
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  std::string resolve(const Tok& t) const {
    std::string_view text = t.text;
    if (text.empty() || text.front() != '*') return translate(text);
    std::size_t d = text.find(ctx_.delimiter);
    std::string_view head = text.substr(0, d);
    if (!is_index(head)) return translate(text);
    std::uint64_t idx = 0;
    std::from_chars(head.data() + 1, head.data() + head.size(), idx);
    auto it = ctx_.name_map.find(idx);
    if (it == ctx_.name_map.end()) fail(t, fmt::format("unresolved name-map index '{}'", head));
    if (d == std::string_view::npos) return it->second;
    return it->second + std::string(1, ctx_.delimiter) + translate(text.substr(d + 1));
  }

  void skip_conn_attrs() {
    for (;;) {
      std::string_view p = peek().text;
      if (p == "*C") {
        next();
        next();
        next();
      } else if (p == "*L" || p == "*S") {
        next();
        next();
        if (p == "*S") next();
      } else if (p == "*D") {
        next();
        next();
      } else {
        return;
      }
    }
  }

  SpefNet parse_dnet(const Tok& kw) {
    SpefNet net;
    net.line = lines_(kw.offset);
    net.name = resolve(next());
    net.total_cap = number(next()) * ctx_.cap_unit_ff;
    for (;;) {
      Tok t = next();
      if (t.text.empty()) fail(kw, fmt::format("missing *END for net '{}'", net.name));
      if (t.text == "*END") return net;
      if (t.text == "*CONN") {
        while (peek().text == "*P" || peek().text == "*I") {
          SpefConn c;
          c.is_port = next().text == "*P";
          c.name = resolve(next());
          c.direction = next().text.front();
          skip_conn_attrs();
          net.conns.push_back(std::move(c));
        }
      } else if (t.text == "*CAP") {
        while (!peek().text.empty() && !is_keyword(peek().text)) {
          next();  // ordinal
          SpefCap c;
          c.node = resolve(next());
          Tok a = next();
          const Tok& b = peek();
          if (!b.text.empty() && !b.eol_before && !is_keyword(b.text)) {
            c.partner = resolve(a);
            c.value = number(next()) * ctx_.cap_unit_ff;
          } else {
            c.value = number(a) * ctx_.cap_unit_ff;
          }
          net.caps.push_back(std::move(c));
        }
      } else if (t.text == "*RES") {
        while (!peek().text.empty() && !is_keyword(peek().text)) {
          next();
          SpefRes r;
          r.a = resolve(next());
          r.b = resolve(next());
          Tok v = next();
          r.value = number(v) * ctx_.res_unit_kohm;
          if (r.value < 0) fail(v, "negative resistance");
          net.res.push_back(std::move(r));
        }
      } else if (t.text == "*INDUC") {
        while (!peek().text.empty() && !is_keyword(peek().text)) next();
      } else {
        fail(t, fmt::format("unexpected '{}' in net '{}'", t.text, net.name));
      }
    }
  }

  std::string_view s_;
  LineCounter lines_{s_};
  std::size_t pos_;
  std::size_t end_;
  const std::string& file_;
  SpefData& ctx_;
  char divider_;
  Tok peek_;
  bool has_peek_ = false;
};

std::size_t first_dnet(std::string_view s) {
  std::size_t p = 0;
  while (p < s.size()) {
    std::size_t i = p;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (s.compare(i, 6, "*D_NET") == 0) return p;
    std::size_t nl = s.find('\n', p);
    if (nl == std::string_view::npos) break;
    p = nl + 1;
  }
  return s.size();
}

}  // namespace

SpefData parse_spef(std::string_view source, char hierarchy_divider, const std::string& name) {
  return parse_spef_chunked(source, 1, hierarchy_divider, name);
}

SpefData parse_spef_chunked(std::string_view source, std::size_t chunks, char hierarchy_divider,
                            const std::string& name) {
  SpefData data;
  const std::size_t header_end = first_dnet(source);
  SpefReader(source, 0, header_end, name, data, hierarchy_divider).parse_header();
  auto ranges = split_chunks(source, chunks, ChunkFormat::spef);
  ranges.front().begin = header_end;
  if (ranges.front().end < header_end) ranges.front().end = header_end;
  std::vector<std::vector<SpefNet>> parts(ranges.size());
  parallel_for(ranges.size(), [&](std::size_t i) {
    SpefReader r(source, ranges[i].begin, ranges[i].end, name, data, hierarchy_divider);
    parts[i] = r.parse_nets();
  });
  for (auto& p : parts)
    for (auto& n : p) data.nets.push_back(std::move(n));
  return data;
}

}  // namespace ministra
