#pragma once

// T-manifolds with equivariant atlases.
//
// Every model exposes ambient points, a torus action on them and a finite
// atlas whose charts are linear T-representations: in chart c the torus acts
// on coordinate k by the character of chart_weights(c)[k].
//
// Projective and toric models are "weight chart" models: chart c is centred
// at fixed point c, it is a copy of C^n, and chart transitions are monomial
// maps w'_j = prod_i w_i^{E[j][i]} with an integer exponent matrix E.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "torusflow/fan.hpp"
#include "torusflow/torus.hpp"

namespace torusflow {

using Complex = std::complex<double>;
using Coords = std::vector<Complex>;

/// Point in chart coordinates (w_1..w_n), w_k = x_k + i y_k.
struct ChartPoint {
  int chart = 0;
  Coords coords;
};

/// Model-specific global coordinates.
///  projective: homogeneous [z_0 : ... : z_n], max-modulus coordinate scaled to 1, chart = -1
///  sphere:     (z_1, ..., z_n, s) with s stored as the real part of the last entry, chart = -1
///  toric:      chart coordinates, chart >= 0
struct AmbientPoint {
  int chart = -1;
  Coords coords;
};

struct FixedPointRecord {
  int id = 0;
  std::string label;
  int home_chart = 0;
  std::vector<Weight> tangential_weights;
  /// Filled once a generator is supplied (see with_exponents).
  std::vector<FlowExponent> exponents;
  /// 2 * #{i : exponent_i < 0}; meaningful only when exponents are filled.
  int unstable_dim = 0;
};

/// Fill exponents and unstable_dim for a generator. Zero exponents are kept;
/// callers that need hyperbolicity check them (morse::unstable_dim throws).
FixedPointRecord with_exponents(FixedPointRecord rec, const GeneratorVector& a0);

enum class Sampling {
  generic,     ///< Gaussian draw; lands on lower strata with probability zero
  stratified,  ///< one in four samples has a random proper subset of coordinates zeroed
};

class TorusManifold {
 public:
  virtual ~TorusManifold() = default;

  virtual std::string kind() const = 0;
  virtual std::string name() const = 0;
  virtual int complex_dim() const = 0;
  virtual int torus_rank() const = 0;

  virtual const std::vector<FixedPointRecord>& fixed_points() const = 0;
  virtual AmbientPoint fixed_point_location(int id) const = 0;

  virtual int chart_count() const = 0;
  virtual std::string chart_label(int chart) const = 0;
  /// Characters by which T acts on the chart's coordinates.
  virtual const std::vector<Weight>& chart_weights(int chart) const = 0;

  virtual AmbientPoint act(const TorusElement& t, const AmbientPoint& x) const = 0;
  /// Full chart domain (used by covering checks); exact zero tests.
  virtual bool in_chart_domain(int chart, const AmbientPoint& x) const = 0;
  /// Throws DomainError outside the chart domain.
  virtual ChartPoint to_chart(int chart, const AmbientPoint& x) const = 0;
  virtual AmbientPoint from_chart(const ChartPoint& p) const = 0;

  virtual AmbientPoint sample(std::mt19937_64& rng, Sampling mode) const = 0;

  /// Distance between two ambient points in a model-appropriate metric.
  virtual double distance(const AmbientPoint& a, const AmbientPoint& b) const = 0;

  /// True for models that carry the gradient-like flow (projective, toric).
  virtual bool supports_flow() const { return false; }

  /// Weights in fixed_points()[id].tangential_weights. Throws DomainError for bad ids.
  const std::vector<Weight>& tangential_weights(int id) const;
  /// All tangential weights of all fixed points, in order.
  std::vector<Weight> all_tangential_weights() const;
};

/// Integer n x n exponent matrix of a monomial chart transition.
using ExponentMatrix = std::vector<std::vector<std::int64_t>>;

class WeightChartModel : public TorusManifold {
 public:
  int complex_dim() const override { return dim_; }
  int torus_rank() const override { return rank_; }
  const std::vector<FixedPointRecord>& fixed_points() const override { return fixed_points_; }
  int chart_count() const override { return static_cast<int>(charts_.size()); }
  const std::vector<Weight>& chart_weights(int chart) const override;
  bool supports_flow() const override { return true; }

  const ExponentMatrix& transition_exponents(int from, int to) const;

  /// Re-express a chart point in another chart; nullopt outside that chart's domain.
  std::optional<ChartPoint> transition(const ChartPoint& p, int to) const;
  /// The domain chart whose coordinates have the smallest maximum modulus
  /// (ties to the lowest chart id).
  ChartPoint best_chart(const ChartPoint& p) const;
  ChartPoint act_chart(const TorusElement& t, const ChartPoint& p) const;
  /// Euclidean distance measured in the best chart of `a`; +inf when `b` is
  /// not in that chart.
  double chart_distance(const ChartPoint& a, const ChartPoint& b) const;

  ChartPoint to_chart_point(const AmbientPoint& x) const;

  double distance(const AmbientPoint& a, const AmbientPoint& b) const override;

 protected:
  WeightChartModel() = default;
  /// charts[c] = weights of chart c (centred at fixed point c); transitions[from][to].
  void install(int dim, int rank, std::vector<std::vector<Weight>> charts,
               std::vector<std::vector<ExponentMatrix>> transitions, std::vector<std::string> labels);

  int dim_ = 0;
  int rank_ = 0;
  std::vector<std::vector<Weight>> charts_;
  std::vector<std::vector<ExponentMatrix>> transitions_;
  std::vector<FixedPointRecord> fixed_points_;
};

/// CP^n with T acting by t . [z_0 : ... : z_n] = [chi_{w_0}(t) z_0 : ... : chi_{w_n}(t) z_n].
class ProjectiveModel final : public WeightChartModel {
 public:
  /// Default action: rank n, w_0 = 0, w_i = e_i.
  explicit ProjectiveModel(int n);
  /// Throws ModelError unless all w_j - w_i (j != i) are nonzero.
  ProjectiveModel(int n, std::vector<Weight> coordinate_weights);

  std::string kind() const override { return "projective"; }
  std::string name() const override;
  std::string chart_label(int chart) const override;
  const std::vector<Weight>& coordinate_weights() const { return weights_; }

  AmbientPoint fixed_point_location(int id) const override;
  AmbientPoint act(const TorusElement& t, const AmbientPoint& x) const override;
  bool in_chart_domain(int chart, const AmbientPoint& x) const override;
  ChartPoint to_chart(int chart, const AmbientPoint& x) const override;
  AmbientPoint from_chart(const ChartPoint& p) const override;
  AmbientPoint sample(std::mt19937_64& rng, Sampling mode) const override;
  /// Chordal (Fubini-Study) distance between lines.
  double distance(const AmbientPoint& a, const AmbientPoint& b) const override;

  /// Scale so the largest-modulus coordinate equals 1 (lowest index on ties).
  static AmbientPoint normalize(Coords homogeneous);

 private:
  std::vector<Weight> weights_;
};

/// Smooth complete toric manifold of a fan; one chart and one fixed point per maximal cone.
class ToricModel final : public WeightChartModel {
 public:
  /// Throws ModelError with the validation report when the fan is not smooth and complete.
  explicit ToricModel(Fan fan, std::string name = "toric");

  std::string kind() const override { return "toric"; }
  std::string name() const override { return name_; }
  std::string chart_label(int chart) const override;
  const Fan& fan() const { return fan_; }

  AmbientPoint fixed_point_location(int id) const override;
  AmbientPoint act(const TorusElement& t, const AmbientPoint& x) const override;
  bool in_chart_domain(int chart, const AmbientPoint& x) const override;
  ChartPoint to_chart(int chart, const AmbientPoint& x) const override;
  AmbientPoint from_chart(const ChartPoint& p) const override;
  AmbientPoint sample(std::mt19937_64& rng, Sampling mode) const override;

 private:
  Fan fan_;
  std::string name_;
};

/// S^{2n} in C^n x R with t . (z, s) = (t_1 z_1, ..., t_n z_n, s) and the two
/// stereographic charts phi_0(z, s) = conj(z) / (1 - s) on {s != 1} and
/// phi_inf(z, s) = z / (1 + s) on {s != -1}.
///
/// Chart 0 is indexed by the pole (0,...,0,1) and chart 1 by (0,...,0,-1),
/// following the original labelling even though chart 0 excludes its pole.
/// Chart weights are those of the representation that makes each chart
/// equivariant: -e_k for the conjugated chart, +e_k for the other.
class SphereModel final : public TorusManifold {
 public:
  struct Options {
    /// Compose phi_0 with componentwise conjugation. Disabling it gives a
    /// deliberately broken chart for negative controls.
    bool conjugate_chart0 = true;
  };

  explicit SphereModel(int n) : SphereModel(n, Options{}) {}
  SphereModel(int n, Options options);

  std::string kind() const override { return "sphere"; }
  std::string name() const override;
  int complex_dim() const override { return n_; }
  int torus_rank() const override { return n_; }
  const std::vector<FixedPointRecord>& fixed_points() const override { return fixed_points_; }
  AmbientPoint fixed_point_location(int id) const override;

  int chart_count() const override { return 2; }
  std::string chart_label(int chart) const override;
  const std::vector<Weight>& chart_weights(int chart) const override;

  AmbientPoint act(const TorusElement& t, const AmbientPoint& x) const override;
  bool in_chart_domain(int chart, const AmbientPoint& x) const override;
  ChartPoint to_chart(int chart, const AmbientPoint& x) const override;
  AmbientPoint from_chart(const ChartPoint& p) const override;
  AmbientPoint sample(std::mt19937_64& rng, Sampling mode) const override;
  double distance(const AmbientPoint& a, const AmbientPoint& b) const override;

  static AmbientPoint make_point(const Coords& z, double s);

 private:
  int n_;
  Options options_;
  std::vector<std::vector<Weight>> chart_weights_;
  std::vector<FixedPointRecord> fixed_points_;
};

/// Integer power of a complex number (negative exponents allowed).
Complex ipow(Complex w, std::int64_t k);

}  // namespace torusflow
