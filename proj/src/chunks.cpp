#include "ministra/chunks.hpp"

#include <algorithm>
#include <cctype>

namespace ministra {
namespace {

std::string_view marker(ChunkFormat f) {
  switch (f) {
    case ChunkFormat::verilog: return "module";
    case ChunkFormat::spef: return "*D_NET";
    case ChunkFormat::sdf: return "(CELL";
  }
  return {};
}

bool is_boundary(std::string_view s, std::size_t line_start, std::string_view m, std::size_t& at) {
  std::size_t i = line_start;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  if (s.compare(i, m.size(), m) != 0) return false;
  const std::size_t after = i + m.size();
  if (after < s.size()) {
    const char c = s[after];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
  }
  at = line_start;
  return true;
}

// First boundary whose line starts at or after `from`.
std::size_t next_boundary(std::string_view s, std::size_t from, std::string_view m) {
  std::size_t pos = from;
  if (pos > 0 && s[pos - 1] != '\n') {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) return std::string_view::npos;
    pos = nl + 1;
  }
  while (pos < s.size()) {
    std::size_t at = 0;
    if (is_boundary(s, pos, m, at)) return at;
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) return std::string_view::npos;
    pos = nl + 1;
  }
  return std::string_view::npos;
}

}  // namespace

std::vector<ByteRange> split_chunks(std::string_view source, std::size_t n, ChunkFormat format) {
  std::vector<ByteRange> out;
  if (n <= 1 || source.empty()) {
    out.push_back({0, source.size()});
    return out;
  }
  const std::string_view m = marker(format);
  // Boundaries must come after the first statement so that chunk 0 keeps the header.
  const std::size_t first = next_boundary(source, 0, m);
  if (first == std::string_view::npos) {
    out.push_back({0, source.size()});
    return out;
  }
  std::vector<std::size_t> cuts;
  const std::size_t step = source.size() / n;
  std::size_t last = first;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t target = std::max(last + 1, i * step);
    if (target >= source.size()) break;
    const std::size_t b = next_boundary(source, target, m);
    if (b == std::string_view::npos) break;
    if (b <= last) continue;
    cuts.push_back(b);
    last = b;
  }
  std::size_t begin = 0;
  for (std::size_t c : cuts) {
    out.push_back({begin, c});
    begin = c;
  }
  out.push_back({begin, source.size()});
  return out;
}

}  // namespace ministra
