#pragma once

#include <vector>

#include "ministra/graph.hpp"
#include "ministra/liberty.hpp"
#include "ministra/parasitics.hpp"
#include "ministra/sdc.hpp"
#include "ministra/sdf.hpp"

namespace ministra {

/// Bilinear inside the grid, linear extrapolation from the boundary cell outside.
double lut_eval(const Lut2D& table, double slew, double cap);

/// Delay and output slew of one arc, [mode][output edge].
struct ArcDelay {
  ModeEdge<double> delay{};
  ModeEdge<double> slew{};
};

/// `in_slew` is [mode][input edge]. Late mode takes the worst of the contributing input edges,
/// early mode the best.
ArcDelay cell_arc(const TimingArc& arc, const ModeEdge<double>& in_slew, double load);

/// Setup or hold margin per data edge, [mode][data edge]. Mode selects which slews are used.
ModeEdge<double> check_margin(const TimingArc& arc, const ModeEdge<double>& data_slew,
                              const ModeEdge<double>& clock_slew);

struct ElmoreResult {
  std::vector<double> delay;    // per node
  std::vector<double> impulse;  // ln(9) * delay
};

ElmoreResult elmore(const RcNet& rc);
ElmoreResult elmore(const RcNet& rc, const RcTree& tree);

/// H(s) = sum_k m_k s^k per node, for k in [0, count). Node 0 is the ideal source.
std::vector<std::vector<double>> rc_moments(const RcNet& rc, std::size_t count);

/// Reduced response at one node: H(s) = e1' (I + s T)^-1 e1 = sum_j residue_j / (1 + s * tau_j).
struct SinkModel {
  std::size_t order = 0;
  std::vector<double> t;    // order x order, row-major
  std::vector<double> tau;  // time constants, ps
  std::vector<double> residue;
  bool stable = true;

  double moment(std::size_t k) const;
};

struct ReducedModel {
  std::size_t order = 0;  // largest order reached over the sinks
  std::vector<std::uint32_t> nodes;
  std::vector<SinkModel> sinks;  // parallel to nodes
  double total_cap = 0.0;
  bool stable = true;
};

/// Two-sided Lanczos per sink, so each sink's first 2q moments match. `nodes` defaults to every
/// non-root node.
ReducedModel arnoldi_reduce(const RcNet& rc, std::size_t q, std::vector<std::uint32_t> nodes = {});

struct RampThresholds {
  double low = 0.2;
  double high = 0.8;
};

struct NetResponse {
  double delay = 0.0;
  double slew = 0.0;
  bool fallback = false;
};

/// Ramp with `drv_slew` between the thresholds; delay is the 50% to 50% time, slew the
/// threshold to threshold time at the sink.
NetResponse sink_response(const SinkModel& m, double drv_slew, const RampThresholds& th = {});
std::vector<NetResponse> arnoldi_delay(const ReducedModel& model, double drv_slew, const ElmoreResult& elmore_fallback,
                                       const RampThresholds& th = {});

double net_slew(double drv_slew, double impulse);

enum class DelayModel : std::uint8_t { elmore, arnoldi };

struct DelayConfig {
  DelayModel model = DelayModel::elmore;
  std::size_t order = 4;
  RampThresholds thresholds;
};

/// Per edge [mode][output edge]. Check edges hold their margin per data edge. Slews are per pin
/// (late = max, early = min over fanin).
struct ArcTiming {
  std::vector<ModeEdge<double>> delay;
  std::vector<ModeEdge<double>> slew;
  std::vector<ModeEdge<double>> pin_slew;
  std::vector<double> net_load;  // fF, per net
  std::size_t sdf_annotated = 0;
  std::size_t arnoldi_fallbacks = 0;
};

/// Slews propagate level by level, so each arc sees its final input slew.
ArcTiming compute_all_arcs(const TimingGraph& graph, const FlatNetlist& netlist, const LibertyLibrary& lib,
                           const Constraints& constraints, const RcStore& rc, const DelayConfig& config,
                           const SdfData* sdf = nullptr);

/// Startpoint slew of a pin with no enabled fanin.
ModeEdge<double> source_slew(PinId pin, const LibertyLibrary& lib, const Constraints& constraints);

}  // namespace ministra
