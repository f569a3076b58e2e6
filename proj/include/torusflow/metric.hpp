#pragma once

// Chart metrics g^(p) = diag(e^{-|x^i|}, e^{-|y^i|}) glued by a partition of
// unity, and the decay of the field norm along the flow.
//
// The weight e^{-|x|} is continuous but not smooth across {x = 0}; it is used
// as written and never differentiated.

#include <cstdint>
#include <span>
#include <vector>

#include "torusflow/flow.hpp"
#include "torusflow/verdict.hpp"

namespace torusflow {

enum class MetricVariant {
  exponential,  ///< g_ii = e^{-|coordinate|}
  euclidean,    ///< g_ii = 1; a deliberately wrong metric for negative controls
};

/// g^(p)_x(u, v) with u, v given as (u_x1, u_y1, ..., u_xn, u_yn).
double chart_metric_eval(std::span<const double> x, std::span<const double> u, std::span<const double> v,
                         MetricVariant variant = MetricVariant::exponential);

/// Complex-coordinate convenience overload.
double chart_metric_eval(const Coords& x, const Coords& u, const Coords& v,
                         MetricVariant variant = MetricVariant::exponential);

/// rho^(p) = beta_p / sum_q beta_q, beta_p(w) = exp(1 / (|w|^2 / R^2 - 1)) for |w| < R.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(const WeightChartModel& model, double radius = 10.0);

  double radius() const { return radius_; }
  /// Bump of each chart at x (zero outside the chart or its radius-R ball).
  std::vector<double> bumps(const ChartPoint& x) const;
  /// Normalized weights; throws ConsistencyError if no chart contains x within R.
  std::vector<double> weights(const ChartPoint& x) const;

 private:
  const WeightChartModel* model_;
  double radius_;
};

/// sqrt(sum_p rho^(p)(x) g^(p)(xi, xi)), xi the field expressed in each chart.
double global_field_norm(const FlowSystem& system, const PartitionOfUnity& pou, const ChartPoint& x,
                         MetricVariant variant = MetricVariant::exponential);

/// ||xi||^(p) in chart p at the point with chart coordinates `coords`.
double chart_field_norm(const Coords& coords, std::span<const double> exponents,
                        MetricVariant variant = MetricVariant::exponential);

/// Closed form of ||xi||^(p) at phi_s(x) for a trajectory that stays in chart p:
/// sqrt(sum a_i^2 p_i^2 e^{-2 a_i s - |p_i| e^{-a_i s}} + same with q_i). Evaluated in
/// log space so expanding directions underflow cleanly to 0.
double norm_along_flow_closed_form(const Coords& start, std::span<const double> exponents, double s);

struct DecayOptions {
  int samples = 100;
  std::uint64_t seed = 1;
  double threshold = 1e-6;
  /// Horizon = horizon_factor / min|a_i|.
  double horizon_factor = 60.0;
  int grid_points = 61;
  MetricVariant variant = MetricVariant::exponential;
};

struct DecayCurve {
  int sample = 0;
  Direction direction = Direction::forward;
  std::vector<double> s;
  std::vector<double> global_norm;
  std::vector<double> chart_norm;
};

struct DecayResult {
  Verdict verdict;
  std::vector<DecayCurve> curves;
};

/// For each sample and both time directions: the global norm at the horizon
/// and the home-chart norm along the in-chart flow must fall below threshold.
DecayResult verify_norm_decay(const FlowSystem& system, const DecayOptions& opts);

}  // namespace torusflow
