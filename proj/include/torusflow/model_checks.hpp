#pragma once

// Verification of the representation-covering property: every chart is
// T-equivariant onto its tangential representation, and the charts cover.

#include <cstdint>
#include <optional>
#include <vector>

#include "torusflow/manifold.hpp"
#include "torusflow/verdict.hpp"

namespace torusflow {

struct WeightInference {
  std::vector<Weight> weights;
  /// Largest distance between a measured rotation rate and its rounded integer.
  double residual = 0.0;
};

/// Recover the characters acting on the coordinates of fixed point `id`'s
/// home chart by rotating a point near the chart origin around each circle
/// factor of T. Throws InferenceError when the residual reaches `max_residual`.
WeightInference infer_tangential_weights_numeric(const TorusManifold& model, int id, double max_residual = 1e-6);

struct EquivarianceOptions {
  int trials = 1000;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  /// Characters of rho_p; defaults to the model's chart weights.
  std::optional<std::vector<Weight>> weights;
};

/// max || chart(t.x) - rho(t) chart(x) || over random (t, x in the chart domain).
Verdict verify_chart_equivariance(const TorusManifold& model, int chart, const EquivarianceOptions& opts);

/// Runs verify_chart_equivariance on every chart; details hold the per-chart maxima.
Verdict verify_atlas_equivariance(const TorusManifold& model, const EquivarianceOptions& opts);

struct CoveringOptions {
  int samples = 10000;
  std::uint64_t seed = 1;
  /// Restrict to a sub-atlas; empty means every chart.
  std::vector<int> charts;
};

/// Stratified samples must each lie in at least one chart domain; reports per-chart hit counts.
Verdict verify_covering(const TorusManifold& model, const CoveringOptions& opts);

/// chart -> ambient -> chart round trip on random in-domain points.
Verdict verify_chart_round_trip(const TorusManifold& model, int samples, std::uint64_t seed, double tol = 1e-10);

/// A bijection between the fixed points of two models with equal tangential
/// weight multisets, found by search over all matchings. perm[i] = index in b.
std::optional<std::vector<int>> match_fixed_points(const TorusManifold& a, const TorusManifold& b);

}  // namespace torusflow
