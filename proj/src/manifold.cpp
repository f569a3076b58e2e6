#include "torusflow/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

Complex complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

// Zero a random subset of `coords`: size in [1, max_zeroed].
void zero_random_subset(std::mt19937_64& rng, Coords& coords, std::size_t max_zeroed) {
  std::vector<std::size_t> idx(coords.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_int_distribution<std::size_t> count(1, max_zeroed);
  const std::size_t m = count(rng);
  for (std::size_t k = 0; k < m; ++k) coords[idx[k]] = 0.0;
}

bool draw_stratum(std::mt19937_64& rng, Sampling mode) {
  if (mode != Sampling::stratified) return false;
  std::uniform_int_distribution<int> quarter(0, 3);
  return quarter(rng) == 0;
}

double max_modulus(const Coords& c) {
  double m = 0.0;
  for (const auto& w : c) m = std::max(m, std::abs(w));
  return m;
}

}  // namespace

Complex ipow(Complex w, std::int64_t k) {
  if (k == 0) return 1.0;
  const bool invert = k < 0;
  std::uint64_t e = invert ? static_cast<std::uint64_t>(-k) : static_cast<std::uint64_t>(k);
  Complex result = 1.0;
  Complex base = w;
  while (e) {
    if (e & 1u) result *= base;
    base *= base;
    e >>= 1u;
  }
  return invert ? Complex(1.0) / result : result;
}

FixedPointRecord with_exponents(FixedPointRecord rec, const GeneratorVector& a0) {
  rec.exponents.clear();
  int negative = 0;
  for (const auto& m : rec.tangential_weights) {
    rec.exponents.push_back(exponent(m, a0));
    if (rec.exponents.back().value < 0) ++negative;
  }
  rec.unstable_dim = 2 * negative;
  return rec;
}

const std::vector<Weight>& TorusManifold::tangential_weights(int id) const {
  const auto& fps = fixed_points();
  if (id < 0 || id >= static_cast<int>(fps.size()))
    throw DomainError("fixed point id " + std::to_string(id) + " does not name a fixed point of " + name());
  return fps[id].tangential_weights;
}

std::vector<Weight> TorusManifold::all_tangential_weights() const {
  std::vector<Weight> out;
  for (const auto& fp : fixed_points())
    out.insert(out.end(), fp.tangential_weights.begin(), fp.tangential_weights.end());
  return out;
}

// ---------------------------------------------------------------- weight charts

void WeightChartModel::install(int dim, int rank, std::vector<std::vector<Weight>> charts,
                               std::vector<std::vector<ExponentMatrix>> transitions,
                               std::vector<std::string> labels) {
  dim_ = dim;
  rank_ = rank;
  charts_ = std::move(charts);
  transitions_ = std::move(transitions);
  fixed_points_.clear();
  for (std::size_t c = 0; c < charts_.size(); ++c) {
    FixedPointRecord rec;
    rec.id = static_cast<int>(c);
    rec.label = labels[c];
    rec.home_chart = static_cast<int>(c);
    rec.tangential_weights = charts_[c];
    fixed_points_.push_back(std::move(rec));
  }
}

const std::vector<Weight>& WeightChartModel::chart_weights(int chart) const {
  if (chart < 0 || chart >= chart_count()) throw DomainError("no chart " + std::to_string(chart));
  return charts_[chart];
}

const ExponentMatrix& WeightChartModel::transition_exponents(int from, int to) const {
  if (from < 0 || from >= chart_count() || to < 0 || to >= chart_count())
    throw DomainError("transition between unknown charts");
  return transitions_[from][to];
}

std::optional<ChartPoint> WeightChartModel::transition(const ChartPoint& p, int to) const {
  if (static_cast<int>(p.coords.size()) != dim_) throw DimensionError("chart point has wrong dimension");
  if (to == p.chart) return p;
  const auto& e = transition_exponents(p.chart, to);
  ChartPoint q{to, Coords(dim_)};
  for (int j = 0; j < dim_; ++j) {
    Complex v = 1.0;
    for (int i = 0; i < dim_; ++i) {
      const auto k = e[j][i];
      if (k == 0) continue;
      if (k < 0 && p.coords[i] == 0.0) return std::nullopt;
      v *= ipow(p.coords[i], k);
    }
    q.coords[j] = v;
  }
  return q;
}

ChartPoint WeightChartModel::best_chart(const ChartPoint& p) const {
  std::optional<ChartPoint> best;
  double best_max = std::numeric_limits<double>::infinity();
  for (int c = 0; c < chart_count(); ++c) {
    auto q = transition(p, c);
    if (!q) continue;
    const double m = max_modulus(q->coords);
    if (!best || m < best_max) {
      best = std::move(q);
      best_max = m;
    }
  }
  if (!best) throw ConsistencyError("point lies in no chart");
  return *best;
}

ChartPoint WeightChartModel::act_chart(const TorusElement& t, const ChartPoint& p) const {
  const auto& w = chart_weights(p.chart);
  ChartPoint q = p;
  for (int k = 0; k < dim_; ++k) q.coords[k] *= character_eval(w[k], t);
  return q;
}

double WeightChartModel::chart_distance(const ChartPoint& a, const ChartPoint& b) const {
  const ChartPoint a1 = best_chart(a);
  const auto b1 = transition(b, a1.chart);
  if (!b1) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int k = 0; k < dim_; ++k) sum += std::norm(a1.coords[k] - b1->coords[k]);
  return std::sqrt(sum);
}

ChartPoint WeightChartModel::to_chart_point(const AmbientPoint& x) const {
  if (x.chart >= 0) return ChartPoint{x.chart, x.coords};
  for (int c = 0; c < chart_count(); ++c) {
    if (in_chart_domain(c, x)) return best_chart(to_chart(c, x));
  }
  throw DomainError("point lies in no chart of " + name());
}

double WeightChartModel::distance(const AmbientPoint& a, const AmbientPoint& b) const {
  return chart_distance(to_chart_point(a), to_chart_point(b));
}

// ---------------------------------------------------------------- projective

namespace {

std::vector<Weight> default_projective_weights(int n) {
  std::vector<Weight> w;
  w.emplace_back(std::vector<std::int64_t>(n, 0));
  for (int i = 0; i < n; ++i) w.push_back(unit_weight(n, i));
  return w;
}

// Position of homogeneous index j among the affine coordinates of chart i.
int affine_index(int i, int j) { return j < i ? j : j - 1; }

std::string coordinate_point_label(int n, int i) {
  std::ostringstream os;
  os << '[';
  for (int j = 0; j <= n; ++j) os << (j ? ":" : "") << (j == i ? 1 : 0);
  os << ']';
  return os.str();
}

}  // namespace

ProjectiveModel::ProjectiveModel(int n) : ProjectiveModel(n, default_projective_weights(n)) {}

ProjectiveModel::ProjectiveModel(int n, std::vector<Weight> coordinate_weights)
    : weights_(std::move(coordinate_weights)) {
  if (n < 1) throw ModelError("projective model needs n >= 1");
  if (static_cast<int>(weights_.size()) != n + 1)
    throw ModelError("projective model CP^" + std::to_string(n) + " needs " + std::to_string(n + 1) +
                     " coordinate weights");
  const auto rank = weights_[0].rank();
  for (const auto& w : weights_)
    if (w.rank() != rank) throw ModelError("coordinate weights have inconsistent ranks");
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (weights_[i] == weights_[j])
        throw ModelError("coordinate weights w_" + std::to_string(i) + " and w_" + std::to_string(j) +
                         " coincide; fixed points would not be isolated");

  std::vector<std::vector<Weight>> charts(n + 1);
  std::vector<std::string> labels;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j)
      if (j != i) charts[i].push_back(weights_[j] - weights_[i]);
    labels.push_back(coordinate_point_label(n, i));
  }

  std::vector<std::vector<ExponentMatrix>> trans(n + 1, std::vector<ExponentMatrix>(n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int k = 0; k <= n; ++k) {
      ExponentMatrix e(n, std::vector<std::int64_t>(n, 0));
      if (i == k) {
        for (int d = 0; d < n; ++d) e[d][d] = 1;
      } else {
        // z_j / z_k = (z_j / z_i) / (z_k / z_i);  z_i / z_k = (z_k / z_i)^{-1}
        for (int j = 0; j <= n; ++j) {
          if (j == k) continue;
          const int row = affine_index(k, j);
          if (j != i) e[row][affine_index(i, j)] += 1;
          e[row][affine_index(i, k)] -= 1;
        }
      }
      trans[i][k] = std::move(e);
    }
  }
  install(n, static_cast<int>(rank), std::move(charts), std::move(trans), std::move(labels));
}

std::string ProjectiveModel::name() const { return "CP^" + std::to_string(dim_); }

std::string ProjectiveModel::chart_label(int chart) const { return "U_" + std::to_string(chart); }

AmbientPoint ProjectiveModel::normalize(Coords z) {
  std::size_t best = 0;
  double best_mod = -1.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double m = std::abs(z[j]);
    if (m > best_mod) {
      best_mod = m;
      best = j;
    }
  }
  if (!(best_mod > 0.0) || !std::isfinite(best_mod))
    throw DomainError("homogeneous coordinates must be finite and not all zero");
  const Complex scale = z[best];
  for (auto& v : z) v /= scale;
  z[best] = 1.0;
  return AmbientPoint{-1, std::move(z)};
}

AmbientPoint ProjectiveModel::fixed_point_location(int id) const {
  if (id < 0 || id > dim_) throw DomainError("no fixed point " + std::to_string(id));
  Coords z(dim_ + 1, 0.0);
  z[id] = 1.0;
  return AmbientPoint{-1, std::move(z)};
}

AmbientPoint ProjectiveModel::act(const TorusElement& t, const AmbientPoint& x) const {
  if (static_cast<int>(x.coords.size()) != dim_ + 1) throw DimensionError("expected homogeneous coordinates");
  Coords z = x.coords;
  for (int j = 0; j <= dim_; ++j) z[j] *= character_eval(weights_[j], t);
  return normalize(std::move(z));
}

bool ProjectiveModel::in_chart_domain(int chart, const AmbientPoint& x) const {
  if (chart < 0 || chart > dim_) return false;
  return x.coords.at(chart) != 0.0;
}

ChartPoint ProjectiveModel::to_chart(int chart, const AmbientPoint& x) const {
  if (static_cast<int>(x.coords.size()) != dim_ + 1) throw DimensionError("expected homogeneous coordinates");
  if (!in_chart_domain(chart, x))
    throw DomainError("point has z_" + std::to_string(chart) + " = 0, outside U_" + std::to_string(chart));
  ChartPoint p{chart, {}};
  for (int j = 0; j <= dim_; ++j)
    if (j != chart) p.coords.push_back(x.coords[j] / x.coords[chart]);
  return p;
}

AmbientPoint ProjectiveModel::from_chart(const ChartPoint& p) const {
  if (static_cast<int>(p.coords.size()) != dim_) throw DimensionError("chart point has wrong dimension");
  Coords z(dim_ + 1);
  for (int j = 0; j <= dim_; ++j) z[j] = (j == p.chart) ? Complex(1.0) : p.coords[affine_index(p.chart, j)];
  return normalize(std::move(z));
}

AmbientPoint ProjectiveModel::sample(std::mt19937_64& rng, Sampling mode) const {
  Coords z(dim_ + 1);
  for (auto& v : z) v = complex_gaussian(rng);
  if (draw_stratum(rng, mode)) zero_random_subset(rng, z, z.size() - 1);
  return normalize(std::move(z));
}

double ProjectiveModel::distance(const AmbientPoint& a, const AmbientPoint& b) const {
  // || a/|a| - e^{i phi} b/|b| || with the phase chosen to align b with a.
  double na = 0.0, nb = 0.0;
  Complex inner = 0.0;
  for (std::size_t j = 0; j < a.coords.size(); ++j) {
    na += std::norm(a.coords[j]);
    nb += std::norm(b.coords[j]);
    inner += std::conj(b.coords[j]) * a.coords[j];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  const Complex phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : Complex(1.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.coords.size(); ++j) sum += std::norm(a.coords[j] / na - phase * b.coords[j] / nb);
  return std::sqrt(sum);
}

// ---------------------------------------------------------------- toric

namespace {

std::string cone_label(const std::vector<int>& cone) {
  std::ostringstream os;
  os << "cone{";
  for (std::size_t k = 0; k < cone.size(); ++k) os << (k ? "," : "") << cone[k];
  os << '}';
  return os.str();
}

}  // namespace

ToricModel::ToricModel(Fan fan, std::string name) : fan_(std::move(fan)), name_(std::move(name)) {
  const auto check = validate_fan(fan_);
  if (!check.valid) {
    std::ostringstream os;
    os << "fan is not smooth and complete:";
    for (const auto& v : check.violations) os << "\n  " << v.kind << ": " << v.message;
    throw ModelError(os.str());
  }
  const int n = fan_.rank;
  const auto cones = fan_.maximal_cones.size();
  std::vector<std::vector<Weight>> charts;
  std::vector<std::string> labels;
  for (const auto& cone : fan_.maximal_cones) {
    charts.push_back(dual_basis(fan_, cone));
    labels.push_back(cone_label(cone));
  }
  // E[j][i] = <m'_j, v_i>, v_i the rays of the source cone, m'_j the dual basis of the target.
  std::vector<std::vector<ExponentMatrix>> trans(cones, std::vector<ExponentMatrix>(cones));
  for (std::size_t s = 0; s < cones; ++s) {
    for (std::size_t t = 0; t < cones; ++t) {
      ExponentMatrix e(n, std::vector<std::int64_t>(n, 0));
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const auto& v = fan_.rays[fan_.maximal_cones[s][i]];
          std::int64_t dot = 0;
          for (int k = 0; k < n; ++k) dot += charts[t][j].components[k] * v[k];
          e[j][i] = dot;
        }
      }
      trans[s][t] = std::move(e);
    }
  }
  install(n, n, std::move(charts), std::move(trans), std::move(labels));
}

std::string ToricModel::chart_label(int chart) const { return fixed_points_.at(chart).label; }

AmbientPoint ToricModel::fixed_point_location(int id) const {
  if (id < 0 || id >= chart_count()) throw DomainError("no fixed point " + std::to_string(id));
  return AmbientPoint{id, Coords(dim_, 0.0)};
}

AmbientPoint ToricModel::act(const TorusElement& t, const AmbientPoint& x) const {
  const auto p = act_chart(t, ChartPoint{x.chart, x.coords});
  return AmbientPoint{p.chart, p.coords};
}

bool ToricModel::in_chart_domain(int chart, const AmbientPoint& x) const {
  if (chart < 0 || chart >= chart_count()) return false;
  return transition(ChartPoint{x.chart, x.coords}, chart).has_value();
}

ChartPoint ToricModel::to_chart(int chart, const AmbientPoint& x) const {
  auto p = transition(ChartPoint{x.chart, x.coords}, chart);
  if (!p) throw DomainError("point is outside chart " + chart_label(chart));
  return *p;
}

AmbientPoint ToricModel::from_chart(const ChartPoint& p) const { return AmbientPoint{p.chart, p.coords}; }

AmbientPoint ToricModel::sample(std::mt19937_64& rng, Sampling mode) const {
  std::uniform_int_distribution<int> pick(0, chart_count() - 1);
  ChartPoint p{pick(rng), Coords(dim_)};
  for (auto& v : p.coords) v = complex_gaussian(rng);
  if (draw_stratum(rng, mode)) zero_random_subset(rng, p.coords, p.coords.size());
  if (auto q = transition(p, pick(rng))) p = std::move(*q);
  return AmbientPoint{p.chart, p.coords};
}

// ---------------------------------------------------------------- sphere

SphereModel::SphereModel(int n, Options options) : n_(n), options_(options) {
  if (n < 1) throw ModelError("sphere model needs n >= 1");
  std::vector<Weight> north, south;
  for (int k = 0; k < n; ++k) {
    north.push_back(-unit_weight(n, k));
    south.push_back(unit_weight(n, k));
  }
  chart_weights_ = {north, south};
  std::string zeros;
  for (int k = 0; k < n; ++k) zeros += "0,";
  fixed_points_ = {
      FixedPointRecord{0, "(" + zeros + "1)", 0, north, {}, 0},
      FixedPointRecord{1, "(" + zeros + "-1)", 1, south, {}, 0},
  };
}

std::string SphereModel::name() const { return "S^" + std::to_string(2 * n_); }

std::string SphereModel::chart_label(int chart) const {
  if (chart == 0) return "phi_0";
  if (chart == 1) return "phi_inf";
  throw DomainError("no chart " + std::to_string(chart));
}

const std::vector<Weight>& SphereModel::chart_weights(int chart) const {
  if (chart < 0 || chart > 1) throw DomainError("no chart " + std::to_string(chart));
  return chart_weights_[chart];
}

AmbientPoint SphereModel::make_point(const Coords& z, double s) {
  AmbientPoint x{-1, z};
  x.coords.emplace_back(s, 0.0);
  return x;
}

AmbientPoint SphereModel::fixed_point_location(int id) const {
  if (id < 0 || id > 1) throw DomainError("no fixed point " + std::to_string(id));
  return make_point(Coords(n_, 0.0), id == 0 ? 1.0 : -1.0);
}

AmbientPoint SphereModel::act(const TorusElement& t, const AmbientPoint& x) const {
  if (static_cast<int>(x.coords.size()) != n_ + 1) throw DimensionError("expected (z, s) coordinates");
  AmbientPoint y = x;
  for (int k = 0; k < n_; ++k) y.coords[k] *= character_eval(unit_weight(n_, k), t);
  return y;
}

bool SphereModel::in_chart_domain(int chart, const AmbientPoint& x) const {
  const double s = x.coords.back().real();
  if (chart == 0) return s != 1.0;
  if (chart == 1) return s != -1.0;
  return false;
}

ChartPoint SphereModel::to_chart(int chart, const AmbientPoint& x) const {
  if (static_cast<int>(x.coords.size()) != n_ + 1) throw DimensionError("expected (z, s) coordinates");
  if (!in_chart_domain(chart, x)) throw DomainError("point is outside chart " + chart_label(chart));
  const double s = x.coords.back().real();
  ChartPoint p{chart, Coords(n_)};
  for (int k = 0; k < n_; ++k) {
    const Complex z = x.coords[k];
    if (chart == 0)
      p.coords[k] = (options_.conjugate_chart0 ? std::conj(z) : z) / (1.0 - s);
    else
      p.coords[k] = z / (1.0 + s);
  }
  return p;
}

AmbientPoint SphereModel::from_chart(const ChartPoint& p) const {
  if (static_cast<int>(p.coords.size()) != n_) throw DimensionError("chart point has wrong dimension");
  double r2 = 0.0;
  for (const auto& w : p.coords) r2 += std::norm(w);
  Coords z(n_);
  for (int k = 0; k < n_; ++k) {
    Complex w = p.coords[k];
    if (p.chart == 0 && options_.conjugate_chart0) w = std::conj(w);
    z[k] = 2.0 * w / (1.0 + r2);
  }
  const double s = p.chart == 0 ? (r2 - 1.0) / (r2 + 1.0) : (1.0 - r2) / (1.0 + r2);
  return make_point(z, s);
}

AmbientPoint SphereModel::sample(std::mt19937_64& rng, Sampling mode) const {
  std::normal_distribution<double> g(0.0, 1.0);
  Coords z(n_);
  for (auto& v : z) v = complex_gaussian(rng);
  double s = g(rng);
  if (draw_stratum(rng, mode)) {
    // zero some of the z_k, possibly all of them (a pole)
    std::uniform_int_distribution<int> bit(0, 1);
    bool all = bit(rng) == 0;
    if (all)
      std::fill(z.begin(), z.end(), Complex(0.0));
    else
      zero_random_subset(rng, z, z.size());
  }
  double r2 = s * s;
  for (const auto& v : z) r2 += std::norm(v);
  const double r = std::sqrt(r2);
  for (auto& v : z) v /= r;
  s /= r;
  bool pole = true;
  for (const auto& v : z) pole = pole && v == 0.0;
  if (pole) s = s > 0 ? 1.0 : -1.0;
  return make_point(z, s);
}

double SphereModel::distance(const AmbientPoint& a, const AmbientPoint& b) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.coords.size(); ++k) sum += std::norm(a.coords[k] - b.coords[k]);
  return std::sqrt(sum);
}

}  // namespace torusflow
