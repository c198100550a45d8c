#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace ministra {

enum class ChunkFormat { verilog, spef, sdf };

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

/// Partitions `source` into at most n ranges whose boundaries sit at top-level statement
/// breaks: Verilog `module`, SPEF `*D_NET`, SDF `(CELL`, each at the start of a line. The
/// first range always begins at 0 and keeps any header. Falls back to one range when no
/// safe boundary exists.
std::vector<ByteRange> split_chunks(std::string_view source, std::size_t n, ChunkFormat format);

}  // namespace ministra
