#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ministra/types.hpp"

namespace ministra {

struct SpefConn {
  std::string name;  // port name or `inst<delim>pin`
  bool is_port = false;
  char direction = 'B';  // I, O or B
  friend bool operator==(const SpefConn&, const SpefConn&) = default;
};

struct SpefCap {
  std::string node;
  std::string partner;  // empty for a grounded cap; otherwise a coupling cap
  double value = 0.0;   // fF
  friend bool operator==(const SpefCap&, const SpefCap&) = default;
};

struct SpefRes {
  std::string a;
  std::string b;
  double value = 0.0;  // kOhm
  friend bool operator==(const SpefRes&, const SpefRes&) = default;
};

struct SpefNet {
  std::string name;
  double total_cap = 0.0;  // fF
  std::vector<SpefConn> conns;
  std::vector<SpefCap> caps;
  std::vector<SpefRes> res;
  std::size_t line = 0;
  friend bool operator==(const SpefNet&, const SpefNet&) = default;
};

/// Parsed SPEF with all name-map references resolved and hierarchy dividers rewritten to the
/// caller's divider. Pin references keep the file's delimiter (`delimiter`).
struct SpefData {
  std::string design;
  char divider = '/';
  char delimiter = ':';
  double cap_unit_ff = 1.0;
  double res_unit_kohm = 1.0;
  std::map<std::uint64_t, std::string> name_map;
  std::vector<SpefConn> ports;
  std::vector<SpefNet> nets;

  bool operator==(const SpefData& o) const {
    return design == o.design && delimiter == o.delimiter && ports == o.ports && nets == o.nets;
  }
};

SpefData parse_spef(std::string_view source, char hierarchy_divider = '/', const std::string& name = "<spef>");

/// Header (units, name map, ports) is read once; the *D_NET sections are parsed in parallel.
SpefData parse_spef_chunked(std::string_view source, std::size_t chunks, char hierarchy_divider = '/',
                            const std::string& name = "<spef>");

}  // namespace ministra
