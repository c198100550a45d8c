#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "ministra/io.hpp"
#include "ministra/pipeline.hpp"
#include "ministra/spef.hpp"
#include "ministra/verilog.hpp"

namespace test {

inline std::string data_path(const std::string& rel) { return std::string(MINISTRA_TEST_DATA) + "/" + rel; }

inline ministra::LibertyLibrary toy_lib() { return ministra::parse_liberty(ministra::read_source(data_path("toy.lib")).bytes); }

inline ministra::Design toy_design(const std::string& verilog, const std::string& sdc, const std::string& spef = "",
                                   const ministra::DelayConfig& delay = {}) {
  auto lib = toy_lib();
  auto nl = ministra::elaborate(ministra::parse_verilog(verilog), lib);
  ministra::RcStore rc(nl.num_nets());
  if (!spef.empty()) rc = ministra::annotate_spef(ministra::parse_spef(spef), nl);
  return ministra::make_design(std::move(lib), std::move(nl), sdc, std::move(rc), delay);
}

// Fresh per-process directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ministra_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace test
