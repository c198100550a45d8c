#pragma once

#include <vector>

#include "ministra/boolexpr.hpp"
#include "ministra/graph.hpp"

namespace ministra {

struct CaseResult {
  std::vector<Logic> value;  // per pin
  std::size_t disabled = 0;  // edges disabled by constants or falsified guards
};

/// Propagates set_case_analysis values and netlist constant ties forward through pin functions
/// to a fixpoint, then disables every edge touching a constant pin and every arc whose `when`
/// guard evaluates to 0.
CaseResult apply_case_analysis(TimingGraph& graph, const FlatNetlist& netlist, const LibertyLibrary& lib,
                               const Constraints& constraints);

}  // namespace ministra
