#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ministra/types.hpp"

namespace ministra {

struct VRange {
  int msb = 0;
  int lsb = 0;
  int width() const { return (msb >= lsb ? msb - lsb : lsb - msb) + 1; }
  /// Bit indices from msb to lsb.
  std::vector<int> bits() const;
  friend bool operator==(const VRange&, const VRange&) = default;
};

/// Connection / assignment expression, kept unexpanded.
struct VExpr {
  enum class Kind { ref, constant, concat, empty };
  Kind kind = Kind::empty;
  std::string name;              // ref
  std::optional<VRange> select;  // ref: [i] is msb == lsb with `bit_select` set
  bool bit_select = false;
  std::vector<char> const_bits;  // constant, msb first: '0', '1', 'x', 'z'
  std::vector<VExpr> items;      // concat, msb first
  friend bool operator==(const VExpr&, const VExpr&) = default;
};

enum class NetKind { wire, input, output, inout, supply0, supply1 };

struct VNetDecl {
  std::string name;
  NetKind kind = NetKind::wire;
  std::optional<VRange> range;
  friend bool operator==(const VNetDecl&, const VNetDecl&) = default;
};

struct VConnection {
  std::string port;  // empty for positional connections
  VExpr expr;
  friend bool operator==(const VConnection&, const VConnection&) = default;
};

struct VInstance {
  std::string module;  // module or library cell
  std::string name;
  std::vector<VConnection> connections;
  std::size_t line = 0;
  friend bool operator==(const VInstance&, const VInstance&) = default;
};

struct VAssign {
  VExpr lhs;
  VExpr rhs;
  friend bool operator==(const VAssign&, const VAssign&) = default;
};

struct VModule {
  std::string name;
  std::vector<std::string> port_order;
  std::vector<VNetDecl> decls;  // ports and wires, declaration order
  std::vector<VAssign> assigns;
  std::vector<VInstance> instances;
  std::size_t line = 0;

  const VNetDecl* find_decl(std::string_view n) const;
  friend bool operator==(const VModule&, const VModule&) = default;
};

struct VerilogDesign {
  std::vector<VModule> modules;
  std::string top;  // filled by elaboration or the caller; empty = auto-detect

  const VModule* find_module(std::string_view n) const;
  friend bool operator==(const VerilogDesign& a, const VerilogDesign& b) { return a.modules == b.modules; }
};

/// Parses structural gate-level Verilog. Behavioral constructs (always/initial) are hard errors.
VerilogDesign parse_verilog(std::string_view source, const std::string& name = "<verilog>");

/// Splits the source at module boundaries and parses chunks concurrently.
VerilogDesign parse_verilog_chunked(std::string_view source, std::size_t chunks, const std::string& name = "<verilog>");

}  // namespace ministra
