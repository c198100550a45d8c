#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ministra {

/// In-memory text of one input file. `bytes` is always decompressed.
struct SourceText {
  std::string name;
  std::string bytes;
};

bool is_gzip(std::string_view bytes);

/// Inflates gzip data (detected by the 0x1f 0x8b magic); returns other input unchanged.
std::string maybe_gunzip(std::string bytes, const std::string& name = "<memory>");

/// Compresses with a gzip wrapper. Used by tests and by callers emitting .gz bundles.
std::string gzip_compress(std::string_view bytes);

/// Reads a whole file and transparently decompresses it.
SourceText read_source(const std::string& path);

std::string read_file_raw(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

/// 1-based line number of `offset` within `text`.
std::size_t line_of(std::string_view text, std::size_t offset);

/// Line lookup that counts incrementally from the previous query; cheap for increasing offsets.
class LineCounter {
 public:
  explicit LineCounter(std::string_view text) : text_(text) {}
  std::size_t operator()(std::size_t offset);

 private:
  std::string_view text_;
  std::size_t offset_ = 0;
  std::size_t line_ = 1;
};

}  // namespace ministra
