#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>

#include "ministra/chunks.hpp"
#include "ministra/io.hpp"
#include "ministra/log.hpp"
#include "ministra/parallel.hpp"
#include "ministra/sdf.hpp"

namespace ministra {

std::optional<double> SdfValue::early() const { return min ? min : typ ? typ : max; }
std::optional<double> SdfValue::late() const { return max ? max : typ ? typ : min; }

SdfValue SdfValue::early_late(double e, double l) {
  SdfValue v;
  v.min = e;
  v.max = l;
  return v;
}

namespace {

struct SNode {
  bool is_list = false;
  std::string atom;
  std::vector<SNode> items;
  std::size_t offset = 0;

  const std::string& head() const {
    static const std::string none;
    return is_list && !items.empty() && !items[0].is_list ? items[0].atom : none;
  }
};

std::string upper(std::string_view t) {
  std::string u(t);
  for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return u;
}

std::string unescape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
    out.push_back(raw[i]);
  }
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

struct Header {
  double timescale_ps = 1.0;
  char divider = '/';
  std::string version;
  std::string design;
};

class SdfReader {
 public:
  SdfReader(std::string_view s, std::size_t begin, std::size_t end, const std::string& file)
      : s_(s), pos_(begin), end_(end), file_(file) {}

  int depth = 0;
  bool saw_delayfile = false;

  // header != nullptr: record header items. Otherwise `ctx` provides them.
  void run(Header* header, const Header& ctx, std::vector<SdfIopath>& io, std::vector<SdfInterconnect>& ic,
           std::size_t& skipped) {
    for (;;) {
      skip_space();
      if (pos_ >= end_) return;
      char c = s_[pos_];
      if (c == ')') {
        ++pos_;
        --depth;
        continue;
      }
      if (c != '(') fail(pos_, "expected '('");
      std::size_t open = pos_++;
      skip_space();
      std::string kw = upper(atom());
      if (kw == "DELAYFILE") {
        ++depth;
        saw_delayfile = true;
        continue;
      }
      pos_ = open;
      SNode n = read_node();
      if (kw == "CELL") {
        if (header) {
          pos_ = open;
          return;
        }
        cell(n, ctx, io, ic, skipped);
      } else if (header) {
        header_item(kw, n, *header);
      }
    }
  }

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ParseError(file_, at, line_of(s_, at), msg);
  }

 private:
  void skip_space() {
    while (pos_ < end_) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < end_ && s_[pos_ + 1] == '/') {
        while (pos_ < end_ && s_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < end_ && s_[pos_ + 1] == '*') {
        std::size_t e = s_.find("*/", pos_ + 2);
        if (e == std::string_view::npos || e >= end_) fail(pos_, "unterminated comment");
        pos_ = e + 2;
      } else {
        return;
      }
    }
  }

  std::string atom() {
    std::size_t b = pos_;
    if (pos_ < end_ && s_[pos_] == '"') {
      ++pos_;
      while (pos_ < end_ && s_[pos_] != '"') ++pos_;
      if (pos_ >= end_) fail(b, "unterminated string");
      ++pos_;
      return std::string(s_.substr(b, pos_ - b));
    }
    while (pos_ < end_) {
      char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < end_) {
        pos_ += 2;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos_;
    }
    return std::string(s_.substr(b, pos_ - b));
  }

  SNode read_node() {
    skip_space();
    SNode n;
    n.offset = pos_;
    if (pos_ >= end_) fail(pos_, "unexpected end of input");
    if (s_[pos_] == '(') {
      ++pos_;
      n.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= end_) fail(n.offset, "unbalanced parentheses");
        if (s_[pos_] == ')') {
          ++pos_;
          return n;
        }
        n.items.push_back(read_node());
      }
    }
    if (s_[pos_] == ')') fail(pos_, "unexpected ')'");
    n.atom = atom();
    return n;
  }

  void header_item(const std::string& kw, const SNode& n, Header& h) {
    auto arg = [&](std::size_t i) -> std::string {
      return i < n.items.size() && !n.items[i].is_list ? n.items[i].atom : std::string();
    };
    if (kw == "SDFVERSION") {
      h.version = unescape(arg(1));
    } else if (kw == "DESIGN") {
      h.design = unescape(arg(1));
    } else if (kw == "DIVIDER") {
      std::string d = arg(1);
      if (d.size() != 1) fail(n.offset, "bad DIVIDER");
      h.divider = d[0];
    } else if (kw == "TIMESCALE") {
      std::string text;
      for (std::size_t i = 1; i < n.items.size(); ++i) text += n.items[i].atom;
      double mult = 0;
      auto r = std::from_chars(text.data(), text.data() + text.size(), mult);
      if (r.ec != std::errc()) fail(n.offset, fmt::format("bad TIMESCALE '{}'", text));
      std::string unit = upper(std::string_view(r.ptr, text.data() + text.size() - r.ptr));
      double scale = unit == "US" ? 1e6 : unit == "NS" ? 1e3 : unit == "PS" ? 1.0 : unit == "FS" ? 1e-3 : -1;
      if (scale < 0) fail(n.offset, fmt::format("bad TIMESCALE unit '{}'", unit));
      h.timescale_ps = mult * scale;
    }
  }

  SdfValue value(const SNode& n, const Header& ctx) const {
    SdfValue v;
    if (!n.is_list) fail(n.offset, "expected delay value");
    if (n.items.empty()) return v;
    if (n.items.size() != 1 || n.items[0].is_list) fail(n.offset, "malformed delay triple");
    const std::string& a = n.items[0].atom;
    std::vector<std::string_view> parts;
    std::size_t b = 0;
    for (;;) {
      std::size_t c = a.find(':', b);
      parts.push_back(std::string_view(a).substr(b, c == std::string::npos ? std::string::npos : c - b));
      if (c == std::string::npos) break;
      b = c + 1;
    }
    auto num = [&](std::string_view t) -> std::optional<double> {
      if (t.empty()) return std::nullopt;
      double x = 0;
      auto r = std::from_chars(t.data(), t.data() + t.size(), x);
      if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(n.offset, fmt::format("malformed delay triple '{}'", a));
      return x * ctx.timescale_ps;
    };
    if (parts.size() == 1) {
      v.typ = num(parts[0]);
    } else if (parts.size() == 3) {
      v.min = num(parts[0]);
      v.typ = num(parts[1]);
      v.max = num(parts[2]);
    } else {
      fail(n.offset, fmt::format("malformed delay triple '{}'", a));
    }
    if ((v.min && v.typ && *v.min > *v.typ) || (v.typ && v.max && *v.typ > *v.max) ||
        (v.min && v.max && *v.min > *v.max))
      fail(n.offset, fmt::format("delay triple '{}' is not ordered min <= typ <= max", a));
    return v;
  }

  // (rise)(fall) from the value list starting at items[first].
  std::pair<SdfValue, SdfValue> rise_fall(const SNode& n, std::size_t first, const Header& ctx) const {
    if (n.items.size() <= first) fail(n.offset, "missing delay values");
    SdfValue r = value(n.items[first], ctx);
    SdfValue f = n.items.size() > first + 1 ? value(n.items[first + 1], ctx) : r;
    return {r, f};
  }

  void cell(const SNode& n, const Header& ctx, std::vector<SdfIopath>& io, std::vector<SdfInterconnect>& ic,
            std::size_t& skipped) {
    std::string type, inst;
    bool wildcard = false;
    for (std::size_t i = 1; i < n.items.size(); ++i) {
      const SNode& it = n.items[i];
      std::string h = upper(it.head());
      if (h == "CELLTYPE" && it.items.size() > 1) type = unescape(it.items[1].atom);
      if (h == "INSTANCE") {
        if (it.items.size() > 1) inst = unescape(it.items[1].atom);
        if (inst == "*") wildcard = true;
      }
    }
    if (wildcard) {
      ++skipped;
      log::warn("SDF: wildcard INSTANCE in CELL '{}' skipped", type);
      return;
    }
    std::string div(1, ctx.divider);
    auto path = [&](const std::string& raw) {
      std::string p = unescape(raw);
      if (ctx.divider != '/')
        for (auto& c : p)
          if (c == ctx.divider) c = '/';
      return inst.empty() ? p : inst + "/" + p;
    };
    for (std::size_t i = 1; i < n.items.size(); ++i) {
      const SNode& it = n.items[i];
      std::string h = upper(it.head());
      if (h == "CELLTYPE" || h == "INSTANCE") continue;
      if (h != "DELAY") {
        ++skipped;
        log::debug("SDF: skipped {} in CELL '{}'", h, type);
        continue;
      }
      for (std::size_t j = 1; j < it.items.size(); ++j) {
        const SNode& blk = it.items[j];
        if (upper(blk.head()) != "ABSOLUTE") {
          ++skipped;
          log::warn("SDF: unsupported {} block skipped", blk.head());
          continue;
        }
        for (std::size_t k = 1; k < blk.items.size(); ++k) {
          const SNode& e = blk.items[k];
          std::string eh = upper(e.head());
          if (eh == "IOPATH" && e.items.size() >= 4) {
            SdfIopath p;
            p.instance = inst;
            p.cell_type = type;
            const SNode& from = e.items[1];
            if (from.is_list) {
              if (from.items.size() != 2) fail(from.offset, "malformed IOPATH port");
              std::string edge = upper(from.items[0].atom);
              p.from_edge = edge == "POSEDGE" ? SdfEdge::posedge : edge == "NEGEDGE" ? SdfEdge::negedge : SdfEdge::none;
              if (p.from_edge == SdfEdge::none) fail(from.offset, fmt::format("unsupported port edge '{}'", edge));
              p.from_pin = unescape(from.items[1].atom);
            } else {
              p.from_pin = unescape(from.atom);
            }
            p.to_pin = unescape(e.items[2].atom);
            std::tie(p.rise, p.fall) = rise_fall(e, 3, ctx);
            io.push_back(std::move(p));
          } else if (eh == "INTERCONNECT" && e.items.size() >= 4) {
            SdfInterconnect c;
            c.from = path(e.items[1].atom);
            c.to = path(e.items[2].atom);
            std::tie(c.rise, c.fall) = rise_fall(e, 3, ctx);
            ic.push_back(std::move(c));
          } else {
            ++skipped;
            log::warn("SDF: unsupported {} entry skipped", eh.empty() ? std::string("?") : eh);
          }
        }
      }
    }
  }

  std::string_view s_;
  std::size_t pos_;
  std::size_t end_;
  const std::string& file_;
};

std::size_t first_cell(std::string_view s) {
  std::size_t p = 0;
  while (p < s.size()) {
    std::size_t i = p;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (s.compare(i, 5, "(CELL") == 0 && (i + 5 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 5]))))
      return p;
    std::size_t nl = s.find('\n', p);
    if (nl == std::string_view::npos) break;
    p = nl + 1;
  }
  return s.size();
}

std::string escape(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '/') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string fmt_value(const SdfValue& v) {
  auto f = [](const std::optional<double>& x) { return x ? fmt::format("{:.3f}", *x) : std::string(); };
  if (v.empty()) return "()";
  if (!v.min && !v.max) return fmt::format("({})", f(v.typ));
  return fmt::format("({}:{}:{})", f(v.min), f(v.typ), f(v.max));
}

}  // namespace

SdfData parse_sdf(std::string_view source, const std::string& name) { return parse_sdf_chunked(source, 1, name); }

SdfData parse_sdf_chunked(std::string_view source, std::size_t chunks, const std::string& name) {
  const std::size_t header_end = first_cell(source);
  Header h;
  SdfData data;
  SdfReader hr(source, 0, header_end, name);
  hr.run(&h, h, data.iopaths, data.interconnects, data.skipped);
  if (!hr.saw_delayfile) hr.fail(0, "missing DELAYFILE");
  auto ranges = split_chunks(source, chunks, ChunkFormat::sdf);
  ranges.front().begin = header_end;
  if (ranges.front().end < header_end) ranges.front().end = header_end;
  struct Part {
    std::vector<SdfIopath> io;
    std::vector<SdfInterconnect> ic;
    std::size_t skipped = 0;
    int depth = 0;
  };
  std::vector<Part> parts(ranges.size());
  parallel_for(ranges.size(), [&](std::size_t i) {
    SdfReader r(source, ranges[i].begin, ranges[i].end, name);
    r.run(nullptr, h, parts[i].io, parts[i].ic, parts[i].skipped);
    parts[i].depth = r.depth;
  });
  int depth = hr.depth;
  for (auto& p : parts) {
    depth += p.depth;
    std::move(p.io.begin(), p.io.end(), std::back_inserter(data.iopaths));
    std::move(p.ic.begin(), p.ic.end(), std::back_inserter(data.interconnects));
    data.skipped += p.skipped;
  }
  if (depth != 0) hr.fail(source.size(), "unbalanced DELAYFILE parentheses");
  data.version = h.version;
  data.design = h.design;
  data.timescale_ps = h.timescale_ps;
  data.divider = h.divider;
  return data;
}

std::string format_sdf(const SdfData& data) {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "(DELAYFILE\n");
  fmt::format_to(it, "  (SDFVERSION \"3.0\")\n");
  fmt::format_to(it, "  (DESIGN \"{}\")\n", data.design);
  fmt::format_to(it, "  (DIVIDER /)\n");
  fmt::format_to(it, "  (TIMESCALE 1ps)\n");
  std::size_t i = 0;
  while (i < data.iopaths.size()) {
    const SdfIopath& first = data.iopaths[i];
    fmt::format_to(it, "  (CELL\n    (CELLTYPE \"{}\")\n    (INSTANCE {})\n    (DELAY\n      (ABSOLUTE\n",
                   first.cell_type, escape(first.instance));
    for (; i < data.iopaths.size() && data.iopaths[i].instance == first.instance; ++i) {
      const SdfIopath& p = data.iopaths[i];
      std::string from = escape(p.from_pin);
      if (p.from_edge != SdfEdge::none)
        from = fmt::format("({} {})", p.from_edge == SdfEdge::posedge ? "posedge" : "negedge", from);
      fmt::format_to(it, "        (IOPATH {} {} {} {})\n", from, escape(p.to_pin), fmt_value(p.rise), fmt_value(p.fall));
    }
    fmt::format_to(it, "      )\n    )\n  )\n");
  }
  if (!data.interconnects.empty()) {
    fmt::format_to(it, "  (CELL\n    (CELLTYPE \"{}\")\n    (INSTANCE)\n    (DELAY\n      (ABSOLUTE\n", data.design);
    for (const auto& c : data.interconnects)
      fmt::format_to(it, "        (INTERCONNECT {} {} {} {})\n", escape(c.from), escape(c.to), fmt_value(c.rise),
                     fmt_value(c.fall));
    fmt::format_to(it, "      )\n    )\n  )\n");
  }
  fmt::format_to(it, ")\n");
  return fmt::to_string(out);
}

}  // namespace ministra
