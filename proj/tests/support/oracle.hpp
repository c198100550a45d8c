#pragma once

#include <vector>

#include "ministra/pipeline.hpp"

namespace test {

struct OraclePath {
  ministra::ClockEvent launch = 0;
  ministra::ClockEvent capture = 0;
  std::vector<ministra::PinId> pins;
  double slack = 0.0;
};

struct OracleResult {
  // Per pin; +inf off endpoints and where nothing is checked.
  std::vector<double> setup_slack;
  std::vector<double> hold_slack;
  // Report order: slack, endpoint, pin sequence, launch, capture.
  std::vector<OraclePath> setup_paths;
  std::vector<OraclePath> hold_paths;
  std::size_t pin_paths = 0;
};

/// Walks every startpoint-to-endpoint pin sequence and applies clock relationships and SDC
/// exceptions to each one directly. Delays are taken from the design's arc timing.
OracleResult exhaustive_oracle(const ministra::Design& d, bool collect_paths = false);

/// Setup and hold relationship by listing every edge over the common period.
std::pair<double, double> brute_relationship(double launch_period, double launch_edge, double capture_period,
                                             double capture_edge);

}  // namespace test
