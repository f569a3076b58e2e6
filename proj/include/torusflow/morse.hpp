#pragma once

// Global Morse / Bialynicki-Birula picture of a generic flow: indices,
// Poincare polynomial, basins of attraction and the connection poset.

#include <cstdint>
#include <span>
#include <vector>

#include "torusflow/flow.hpp"
#include "torusflow/verdict.hpp"

namespace torusflow {

/// Passes iff every tangential weight at every fixed point pairs nonzero with a0.
/// details["exponents"] holds the full exponent table.
Verdict verify_hyperbolic(const TorusManifold& model, const GeneratorVector& a0);

/// 2 * #{i : a_i < 0}. Throws GenericityError on a zero exponent.
int unstable_dim(const FixedPointRecord& rec);

/// Coefficient k counts fixed points of unstable dimension k (k = 0..2n).
std::vector<std::int64_t> poincare_polynomial(const FlowSystem& system);

/// Number of fixed points; equals the Poincare polynomial at t = 1.
std::int64_t euler_characteristic(const FlowSystem& system);

/// Samples as chart points (converted through the model's best chart).
std::vector<ChartPoint> draw_samples(const TorusManifold& model, int count, std::uint64_t seed, Sampling mode);

struct BasinClassification {
  std::vector<int> forward;   ///< forward limit of each sample
  std::vector<int> backward;  ///< backward limit of each sample
  std::vector<std::int64_t> basin_counts;
  std::vector<std::int64_t> co_basin_counts;
  /// Samples for which a closed-form answer existed, and agreed with the trajectory.
  std::int64_t analytic_checked = 0;
  std::int64_t analytic_agreed = 0;
  /// chart_membership[p][c]: forward-basin members of p lying in chart c's domain.
  std::vector<std::vector<std::int64_t>> chart_membership;
};

/// Requires a hyperbolic generator. Disagreement between trajectory following
/// and the closed form throws ConsistencyError.
BasinClassification basin_classify(const FlowSystem& system, std::span<const ChartPoint> samples);

/// Definition-level check of the convergence condition:
///  (1) the field vanishes at every fixed point,
///  (2) stable and unstable coordinate subspaces meet only at the origin, and
///      mixed points leave p in both time directions,
///  (3) every sample has fixed-point limits in both directions.
/// Throws GenericityError before sampling when a0 is not generic.
Verdict verify_convergence_condition(const FlowSystem& system, int samples, std::uint64_t seed);

struct PosetEdge {
  int source = 0;  ///< the flow leaves this point
  int target = 0;  ///< and arrives here
  ChartPoint witness;
};

struct ConnectionPoset {
  std::vector<PosetEdge> edges;
  /// Seeds whose trajectory never left the source chart within max_time.
  std::vector<nlohmann::json> inconclusive;
  double seed_radius = 1e-4;
  double max_time = 0.0;
};

/// Seeds at `radius` in every nonempty subset of each point's unstable
/// directions, flowed forward. max_time defaults to 200 / min|a_i|.
ConnectionPoset connection_poset(const FlowSystem& system, int per_point_samples, std::uint64_t seed,
                                 double radius = 1e-4);

struct DecompositionReport {
  std::string model_name;
  std::string generator;  ///< "p/q,p/q,..."
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  std::vector<FixedPointRecord> fixed_points;
  std::vector<std::int64_t> basin_counts;
  std::vector<std::int64_t> co_basin_counts;
  std::vector<std::vector<std::int64_t>> chart_membership;
  std::vector<std::int64_t> poincare;
  std::int64_t euler = 0;
  ConnectionPoset poset;
  std::vector<std::pair<std::string, Verdict>> verdicts;
  nlohmann::json tolerances = nlohmann::json::object();
  /// Per-sample limits, for the basin CSV.
  std::vector<int> forward;
  std::vector<int> backward;

  bool all_pass() const;
};

struct DecomposeOptions {
  int samples = 10000;
  std::uint64_t seed = 1;
  int poset_seeds = 8;
  double seed_radius = 1e-4;
};

/// The full pipeline behind `decompose`: hyperbolicity gate, basins, indices,
/// poset and the structural checks (index duality, poset monotonicity,
/// Poincare/Euler consistency, toric h-vector agreement).
DecompositionReport decompose(const FlowSystem& system, const DecomposeOptions& opts);

}  // namespace torusflow
