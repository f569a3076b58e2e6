#pragma once

// The gradient-like flow generated by a0 on a weight-chart model.
//
// Sign convention: in the chart of fixed point p with tangential weights
// m_1..m_n the field is dw_i/ds = -a_i w_i, a_i = 2 pi <m_i, a0>, so the
// flow is w_i(s) = w_i e^{-a_i s}. Coordinate i is contracted forward in
// time iff a_i > 0.

#include <functional>
#include <optional>
#include <vector>

#include "torusflow/manifold.hpp"
#include "torusflow/torus.hpp"
#include "torusflow/verdict.hpp"

namespace torusflow {

struct TrajectoryOptions {
  double step = 1e-3;
  double max_time = 1e4;
  /// Leave a chart once some |w_i| exceeds 1/switch_margin.
  double switch_margin = 0.1;
  /// Chart-local Euclidean norm below which a trajectory has reached its limit.
  double tolerance = 1e-9;
};

enum class Direction { forward, backward };

std::string to_string(Direction d);

struct LimitResult {
  int point_id = -1;
  Direction direction = Direction::forward;
  /// Flow time at which the chart-local norm dropped below the tolerance.
  double s_reached = 0.0;
  int chart_switches = 0;
  /// Closed-form answer where the model has one (projective).
  std::optional<int> analytic_id;
};

struct EigenvalueTable {
  /// e^{-a_i}, each listed twice (real and imaginary directions).
  std::vector<double> values;
  bool hyperbolic = true;
};

/// Complex-coordinate field w -> dw/ds on one chart.
using ChartField = std::function<Coords(const ChartPoint&)>;
using FlowMap = std::function<ChartPoint(const ChartPoint&, double)>;

class FlowSystem {
 public:
  FlowSystem(const WeightChartModel& model, GeneratorVector a0, TrajectoryOptions options = {});

  const WeightChartModel& model() const { return *model_; }
  const GeneratorVector& generator() const { return a0_; }
  const TrajectoryOptions& options() const { return options_; }
  const std::vector<FlowExponent>& exponents(int chart) const { return exponents_.at(chart); }
  /// Fixed-point records with exponents and unstable dimensions filled.
  std::vector<FixedPointRecord> fixed_point_records() const;

  GenericityVerdict genericity() const;
  /// Throws GenericityError naming the offending weights.
  void require_generic() const;

  /// (dx_1, dy_1, ..., dx_n, dy_n) = (-a_1 x_1, -a_1 y_1, ...).
  std::vector<double> vector_field(const ChartPoint& x) const;
  Coords field(const ChartPoint& x) const;

  /// Closed-form diagonal flow with chart switching.
  ChartPoint flow_exact(const ChartPoint& x, double s) const;
  /// Classical RK4 on `field` (default: the true field) with chart switching.
  ChartPoint flow_rk4(const ChartPoint& x, double s, const TrajectoryOptions& opts,
                      const ChartField& field = {}) const;

  /// Requires a generic a0. Projective models also compute the closed-form
  /// answer; a disagreement throws ConsistencyError.
  LimitResult limit(const ChartPoint& x, Direction d) const;
  LimitResult limit_by_trajectory(const ChartPoint& x, Direction d) const;
  /// argmin / argmax of <w_j, a0> over nonzero homogeneous coordinates; nullopt
  /// for non-projective models. Ties throw GenericityError.
  std::optional<int> limit_analytic(const ChartPoint& x, Direction d) const;

  EigenvalueTable time_one_map_eigenvalues(int id) const;
  /// Central-difference Jacobian (2n x 2n, row-major) of the time-s map at the
  /// origin of fixed point id's chart.
  std::vector<std::vector<double>> time_map_jacobian(int id, double s = 1.0, double eps = 1e-6) const;

  double field_norm(const ChartPoint& x) const;

 private:
  void segment(ChartPoint& p, double tau) const;
  double exit_time(const ChartPoint& p, double dir) const;

  const WeightChartModel* model_;
  GeneratorVector a0_;
  TrajectoryOptions options_;
  std::vector<std::vector<FlowExponent>> exponents_;
};

/// Global closed form on CP^n: z_j -> z_j e^{-2 pi <w_j, a0> s}, re-normalized.
AmbientPoint flow_projective_closed_form(const ProjectiveModel& model, const GeneratorVector& a0,
                                         const AmbientPoint& x, double s);

struct FlowEquivarianceOptions {
  int trials = 1000;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  double s_min = -5.0;
  double s_max = 5.0;
};

/// max distance(flow(t.x, s), t.flow(x, s)) over random (t, x, s). `flow`
/// defaults to the exact flow.
Verdict flow_equivariance_check(const FlowSystem& system, const FlowEquivarianceOptions& opts,
                                const FlowMap& flow = {});

}  // namespace torusflow
