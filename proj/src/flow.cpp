#include "torusflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

double max_modulus(const Coords& c) {
  double m = 0.0;
  for (const auto& w : c) m = std::max(m, std::abs(w));
  return m;
}

double euclidean(const Coords& c) {
  double s = 0.0;
  for (const auto& w : c) s += std::norm(w);
  return std::sqrt(s);
}

double sign_of(Direction d) { return d == Direction::forward ? 1.0 : -1.0; }

}  // namespace

std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

FlowSystem::FlowSystem(const WeightChartModel& model, GeneratorVector a0, TrajectoryOptions options)
    : model_(&model), a0_(std::move(a0)), options_(options) {
  if (static_cast<int>(a0_.rank()) != model.torus_rank())
    throw DimensionError("generator has rank " + std::to_string(a0_.rank()) + ", model torus has rank " +
                         std::to_string(model.torus_rank()));
  if (!(options_.switch_margin > 0.0 && options_.switch_margin < 1.0))
    throw std::invalid_argument("switch_margin must lie in (0, 1)");
  if (!(options_.step > 0.0) || !(options_.max_time > 0.0))
    throw std::invalid_argument("trajectory step and max_time must be positive");
  for (int c = 0; c < model.chart_count(); ++c) {
    std::vector<FlowExponent> e;
    for (const auto& m : model.chart_weights(c)) e.push_back(exponent(m, a0_));
    exponents_.push_back(std::move(e));
  }
}

std::vector<FixedPointRecord> FlowSystem::fixed_point_records() const {
  std::vector<FixedPointRecord> out;
  for (const auto& rec : model_->fixed_points()) out.push_back(with_exponents(rec, a0_));
  return out;
}

GenericityVerdict FlowSystem::genericity() const {
  const auto weights = model_->all_tangential_weights();
  return is_generic(a0_, weights);
}

void FlowSystem::require_generic() const {
  const auto g = genericity();
  if (g.generic && g.zero_weights.empty()) return;
  std::ostringstream os;
  os << "generator is not generic for " << model_->name() << ": ";
  for (const auto& m : g.witnesses) os << format_weight(m) << " pairs to 0; ";
  if (!g.zero_weights.empty()) os << "zero tangential weight present";
  throw GenericityError(os.str());
}

Coords FlowSystem::field(const ChartPoint& x) const {
  const auto& e = exponents(x.chart);
  if (x.coords.size() != e.size()) throw DimensionError("chart point has wrong dimension");
  Coords d(x.coords.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = -e[i].scaled * x.coords[i];
  return d;
}

std::vector<double> FlowSystem::vector_field(const ChartPoint& x) const {
  const Coords d = field(x);
  std::vector<double> out;
  out.reserve(2 * d.size());
  for (const auto& v : d) {
    out.push_back(v.real());
    out.push_back(v.imag());
  }
  return out;
}

double FlowSystem::field_norm(const ChartPoint& x) const { return euclidean(field(model_->best_chart(x))); }

double FlowSystem::exit_time(const ChartPoint& p, double dir) const {
  const double bound = 1.0 / options_.switch_margin;
  const auto& e = exponents(p.chart);
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    const double growth = -e[i].scaled * dir;
    const double r = std::abs(p.coords[i]);
    if (growth > 0.0 && r > 0.0) t = std::min(t, std::max(0.0, std::log(bound / r) / growth));
  }
  return t;
}

void FlowSystem::segment(ChartPoint& p, double tau) const {
  const auto& e = exponents(p.chart);
  for (std::size_t i = 0; i < p.coords.size(); ++i) p.coords[i] *= std::exp(-e[i].scaled * tau);
}

ChartPoint FlowSystem::flow_exact(const ChartPoint& x, double s) const {
  ChartPoint p = x;
  const double bound = 1.0 / options_.switch_margin;
  if (max_modulus(p.coords) > bound) p = model_->best_chart(p);
  const double dir = s >= 0.0 ? 1.0 : -1.0;
  double remaining = std::abs(s);
  const int max_switches = 16 * model_->chart_count() + 64;
  int switches = 0;
  while (remaining > 0.0) {
    const double t = exit_time(p, dir);
    if (t >= remaining) {
      segment(p, dir * remaining);
      break;
    }
    segment(p, dir * t);
    remaining -= t;
    ChartPoint q = model_->best_chart(p);
    if (q.chart == p.chart || ++switches > max_switches)
      throw ConsistencyError("exact flow could not leave chart " + model_->chart_label(p.chart));
    p = std::move(q);
  }
  return p;
}

ChartPoint FlowSystem::flow_rk4(const ChartPoint& x, double s, const TrajectoryOptions& opts,
                                const ChartField& custom) const {
  const ChartField f = custom ? custom : ChartField([this](const ChartPoint& p) { return field(p); });
  ChartPoint p = x;
  const double bound = 1.0 / opts.switch_margin;
  if (max_modulus(p.coords) > bound) p = model_->best_chart(p);
  if (s == 0.0) return p;
  const auto steps = static_cast<long>(std::ceil(std::abs(s) / opts.step - 1e-9));
  const double h = s / static_cast<double>(steps);
  const std::size_t n = p.coords.size();
  int consecutive_switches = 0;
  auto axpy = [&](const ChartPoint& base, const Coords& k, double scale) {
    ChartPoint q = base;
    for (std::size_t i = 0; i < n; ++i) q.coords[i] += scale * k[i];
    return q;
  };
  for (long step = 0; step < steps; ++step) {
    const Coords k1 = f(p);
    const Coords k2 = f(axpy(p, k1, h / 2));
    const Coords k3 = f(axpy(p, k2, h / 2));
    const Coords k4 = f(axpy(p, k3, h));
    for (std::size_t i = 0; i < n; ++i) p.coords[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (max_modulus(p.coords) > bound) {
      p = model_->best_chart(p);
      if (++consecutive_switches > 100)
        throw SwitchingThrashError("RK4 switched charts on more than 100 consecutive steps");
    } else {
      consecutive_switches = 0;
    }
  }
  return p;
}

LimitResult FlowSystem::limit_by_trajectory(const ChartPoint& x, Direction d) const {
  const double dir = sign_of(d);
  const double bound = 1.0 / options_.switch_margin;
  ChartPoint p = x;
  if (max_modulus(p.coords) > bound) p = model_->best_chart(p);
  LimitResult out;
  out.direction = d;
  double elapsed = 0.0;
  const int max_switches = 16 * model_->chart_count() + 64;
  while (true) {
    const auto& e = exponents(p.chart);
    bool escaping = false;
    for (std::size_t i = 0; i < p.coords.size(); ++i) {
      if (p.coords[i] == 0.0) continue;
      if (e[i].value.numerator() == 0) throw GenericityError("zero exponent on a nonzero coordinate");
      if (-e[i].scaled * dir > 0.0) escaping = true;
    }
    if (!escaping) {
      // every nonzero coordinate contracts toward this chart's centre
      const double norm = euclidean(p.coords);
      double need = 0.0;
      if (!(norm < options_.tolerance)) {
        const double root_n = std::sqrt(static_cast<double>(p.coords.size()));
        for (std::size_t i = 0; i < p.coords.size(); ++i) {
          const double r = std::abs(p.coords[i]);
          if (r == 0.0) continue;
          need = std::max(need, std::log(r * root_n / options_.tolerance) / (e[i].scaled * dir));
        }
      }
      out.point_id = p.chart;
      out.s_reached = dir * (elapsed + need);
      return out;
    }
    const double t = exit_time(p, dir);
    segment(p, dir * t);
    elapsed += t;
    ChartPoint q = model_->best_chart(p);
    if (q.chart == p.chart || ++out.chart_switches > max_switches || elapsed > options_.max_time)
      throw ConsistencyError("trajectory did not settle in any chart");
    p = std::move(q);
  }
}

std::optional<int> FlowSystem::limit_analytic(const ChartPoint& x, Direction d) const {
  const auto* proj = dynamic_cast<const ProjectiveModel*>(model_);
  if (!proj) return std::nullopt;
  const AmbientPoint z = proj->from_chart(x);
  const auto& w = proj->coordinate_weights();
  std::optional<int> best;
  Rational best_q(0);
  bool tie = false;
  for (std::size_t j = 0; j < z.coords.size(); ++j) {
    if (z.coords[j] == 0.0) continue;
    const Rational q = pairing(w[j], a0_);
    const bool better = !best || (d == Direction::forward ? q < best_q : q > best_q);
    if (best && q == best_q) tie = true;
    if (better) {
      best = static_cast<int>(j);
      best_q = q;
      tie = false;
    }
  }
  if (tie) throw GenericityError("two nonzero coordinates share the extremal exponent; see is_generic");
  return best;
}

LimitResult FlowSystem::limit(const ChartPoint& x, Direction d) const {
  require_generic();
  LimitResult r = limit_by_trajectory(x, d);
  r.analytic_id = limit_analytic(x, d);
  if (r.analytic_id && *r.analytic_id != r.point_id) {
    std::ostringstream os;
    os << to_string(d) << " limit: trajectory reached " << model_->fixed_points()[r.point_id].label
       << " but the closed form gives " << model_->fixed_points()[*r.analytic_id].label;
    throw ConsistencyError(os.str());
  }
  return r;
}

EigenvalueTable FlowSystem::time_one_map_eigenvalues(int id) const {
  const auto& rec = model_->fixed_points().at(id);
  EigenvalueTable t;
  for (const auto& e : exponents(rec.home_chart)) {
    const double lambda = std::exp(-e.scaled);
    t.values.push_back(lambda);
    t.values.push_back(lambda);
    if (e.value.numerator() == 0) t.hyperbolic = false;
  }
  return t;
}

std::vector<std::vector<double>> FlowSystem::time_map_jacobian(int id, double s, double eps) const {
  const int chart = model_->fixed_points().at(id).home_chart;
  const int n = model_->complex_dim();
  std::vector<std::vector<double>> jac(2 * n, std::vector<double>(2 * n, 0.0));
  auto image = [&](int col, double delta) {
    ChartPoint p{chart, Coords(n, 0.0)};
    p.coords[col / 2] += (col % 2 == 0) ? Complex(delta, 0.0) : Complex(0.0, delta);
    auto q = model_->transition(flow_exact(p, s), chart);
    if (!q) throw ConsistencyError("time map left the chart of the fixed point");
    return *q;
  };
  for (int col = 0; col < 2 * n; ++col) {
    const ChartPoint plus = image(col, eps);
    const ChartPoint minus = image(col, -eps);
    for (int row = 0; row < 2 * n; ++row) {
      const Complex dv = plus.coords[row / 2] - minus.coords[row / 2];
      jac[row][col] = ((row % 2 == 0) ? dv.real() : dv.imag()) / (2.0 * eps);
    }
  }
  return jac;
}

AmbientPoint flow_projective_closed_form(const ProjectiveModel& model, const GeneratorVector& a0,
                                         const AmbientPoint& x, double s) {
  const auto& w = model.coordinate_weights();
  const std::size_t m = x.coords.size();
  std::vector<double> log_mod(m, -std::numeric_limits<double>::infinity());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    if (x.coords[j] == 0.0) continue;
    const double a = exponent(w[j], a0).scaled;
    log_mod[j] = std::log(std::abs(x.coords[j])) - a * s;
    top = std::max(top, log_mod[j]);
  }
  Coords z(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (x.coords[j] == 0.0) continue;
    z[j] = std::polar(std::exp(log_mod[j] - top), std::arg(x.coords[j]));
  }
  return ProjectiveModel::normalize(std::move(z));
}

Verdict flow_equivariance_check(const FlowSystem& system, const FlowEquivarianceOptions& opts, const FlowMap& flow) {
  const FlowMap phi = flow ? flow : FlowMap([&system](const ChartPoint& x, double s) { return system.flow_exact(x, s); });
  const auto& model = system.model();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> time(opts.s_min, opts.s_max);
  Verdict v;
  for (int trial = 0; trial < opts.trials; ++trial) {
    const ChartPoint x = model.to_chart_point(model.sample(rng, Sampling::stratified));
    std::vector<double> angles(model.torus_rank());
    for (auto& a : angles) a = unit(rng);
    const TorusElement t(std::move(angles));
    const double s = time(rng);
    const ChartPoint lhs = phi(model.act_chart(t, x), s);
    const ChartPoint rhs = model.act_chart(t, phi(x, s));
    const double violation = model.chart_distance(lhs, rhs);
    const bool was_passing = v.pass;
    v.observe(violation, opts.tol);
    if (was_passing && !v.pass) v.witnesses.push_back({{"trial", trial}, {"s", s}, {"violation", violation}});
  }
  return v;
}

}  // namespace torusflow
