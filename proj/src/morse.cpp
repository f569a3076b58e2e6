#include "torusflow/morse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

nlohmann::json coords_json(const Coords& c) {
  auto j = nlohmann::json::array();
  for (const auto& v : c) j.push_back({v.real(), v.imag()});
  return j;
}

std::string generator_string(const GeneratorVector& a0) {
  std::string s;
  for (std::size_t k = 0; k < a0.rank(); ++k) s += (k ? "," : "") + format_rational(a0.components[k]);
  return s;
}

}  // namespace

Verdict verify_hyperbolic(const TorusManifold& model, const GeneratorVector& a0) {
  Verdict v;
  auto table = nlohmann::json::array();
  for (const auto& rec : model.fixed_points()) {
    auto row = nlohmann::json::array();
    for (const auto& m : rec.tangential_weights) {
      const FlowExponent e = exponent(m, a0);
      row.push_back({{"weight", m.components}, {"value", format_rational(e.value)}, {"scaled", e.scaled}});
      if (e.value.numerator() == 0) {
        v.pass = false;
        v.witnesses.push_back({{"fixed_point", rec.label}, {"weight", m.components}});
      }
    }
    table.push_back({{"fixed_point", rec.label}, {"exponents", row}});
  }
  v.max_violation = static_cast<double>(v.witnesses.size());
  v.details["exponents"] = table;
  return v;
}

int unstable_dim(const FixedPointRecord& rec) {
  if (rec.exponents.size() != rec.tangential_weights.size())
    throw std::invalid_argument("unstable_dim: exponents not computed for " + rec.label);
  int negative = 0;
  for (const auto& e : rec.exponents) {
    if (e.value.numerator() == 0) throw GenericityError("zero exponent at " + rec.label);
    if (e.value < 0) ++negative;
  }
  return 2 * negative;
}

std::vector<std::int64_t> poincare_polynomial(const FlowSystem& system) {
  system.require_generic();
  std::vector<std::int64_t> coeffs(2 * system.model().complex_dim() + 1, 0);
  for (const auto& rec : system.fixed_point_records()) ++coeffs.at(unstable_dim(rec));
  return coeffs;
}

std::int64_t euler_characteristic(const FlowSystem& system) {
  system.require_generic();
  return static_cast<std::int64_t>(system.model().fixed_points().size());
}

std::vector<ChartPoint> draw_samples(const TorusManifold& model, int count, std::uint64_t seed, Sampling mode) {
  const auto* wcm = dynamic_cast<const WeightChartModel*>(&model);
  if (!wcm) throw UnsupportedError("chart-point samples need a weight-chart model");
  std::mt19937_64 rng(seed);
  std::vector<ChartPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(wcm->to_chart_point(model.sample(rng, mode)));
  return out;
}

BasinClassification basin_classify(const FlowSystem& system, std::span<const ChartPoint> samples) {
  system.require_generic();
  const auto& model = system.model();
  const auto npts = model.fixed_points().size();
  BasinClassification out;
  out.basin_counts.assign(npts, 0);
  out.co_basin_counts.assign(npts, 0);
  out.chart_membership.assign(npts, std::vector<std::int64_t>(model.chart_count(), 0));
  for (const auto& x : samples) {
    const LimitResult f = system.limit(x, Direction::forward);
    const LimitResult b = system.limit(x, Direction::backward);
    out.forward.push_back(f.point_id);
    out.backward.push_back(b.point_id);
    ++out.basin_counts[f.point_id];
    ++out.co_basin_counts[b.point_id];
    if (f.analytic_id) {
      ++out.analytic_checked;
      // limit() throws on disagreement, so reaching here means agreement
      if (*f.analytic_id == f.point_id && b.analytic_id && *b.analytic_id == b.point_id) ++out.analytic_agreed;
    }
    for (int c = 0; c < model.chart_count(); ++c)
      if (model.transition(x, c)) ++out.chart_membership[f.point_id][c];
  }
  return out;
}

Verdict verify_convergence_condition(const FlowSystem& system, int samples, std::uint64_t seed) {
  system.require_generic();
  const auto& model = system.model();
  const int n = model.complex_dim();
  Verdict v;

  // (1) fixed points are zeros of the field
  double worst_zero = 0.0;
  for (const auto& rec : model.fixed_points()) {
    const ChartPoint origin{rec.home_chart, Coords(n, 0.0)};
    const double norm = system.field_norm(origin);
    worst_zero = std::max(worst_zero, norm);
    if (!(norm < 1e-12)) {
      v.pass = false;
      v.witnesses.push_back({{"condition", 1}, {"fixed_point", rec.label}, {"field_norm", norm}});
    }
  }

  // (2) W^u(p) and W^s(p) are complementary coordinate subspaces of p's chart
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> g(0.0, 1.0);
  std::int64_t mixed_checked = 0;
  for (const auto& rec : system.fixed_point_records()) {
    std::vector<int> contracted, expanded;
    for (int i = 0; i < n; ++i) (rec.exponents[i].value > 0 ? contracted : expanded).push_back(i);
    if (contracted.size() + expanded.size() != static_cast<std::size_t>(n)) {
      v.pass = false;
      v.witnesses.push_back({{"condition", 2}, {"fixed_point", rec.label}, {"reason", "neutral direction"}});
    }
    if (contracted.empty() || expanded.empty()) continue;
    for (int trial = 0; trial < 4; ++trial) {
      ChartPoint x{rec.home_chart, Coords(n, 0.0)};
      x.coords[contracted[trial % contracted.size()]] = Complex(g(rng), g(rng)) * 0.1;
      x.coords[expanded[trial % expanded.size()]] = Complex(g(rng), g(rng)) * 0.1;
      ++mixed_checked;
      const int fwd = system.limit(x, Direction::forward).point_id;
      const int bwd = system.limit(x, Direction::backward).point_id;
      if (fwd == rec.id || bwd == rec.id) {
        v.pass = false;
        v.witnesses.push_back({{"condition", 2}, {"fixed_point", rec.label}, {"x", coords_json(x.coords)}});
      }
    }
  }

  // (3) limits exist in both directions
  std::int64_t failures = 0;
  const auto pts = draw_samples(model, samples, seed, Sampling::stratified);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (Direction d : {Direction::forward, Direction::backward}) {
      try {
        const LimitResult r = system.limit(pts[i], d);
        if (r.point_id < 0) throw ConsistencyError("no limit");
      } catch (const std::exception& e) {
        ++failures;
        v.pass = false;
        if (v.witnesses.size() < 20)
          v.witnesses.push_back({{"condition", 3}, {"sample", i}, {"direction", to_string(d)}, {"error", e.what()}});
      }
    }
  }
  v.max_violation = static_cast<double>(failures);
  v.details["samples"] = samples;
  v.details["mixed_points_checked"] = mixed_checked;
  v.details["max_field_norm_at_fixed_points"] = worst_zero;
  return v;
}

ConnectionPoset connection_poset(const FlowSystem& system, int per_point_samples, std::uint64_t seed, double radius) {
  system.require_generic();
  const auto& model = system.model();
  const int n = model.complex_dim();
  if (n > 16) throw UnsupportedError("connection_poset enumerates direction subsets; dimension too large");
  ConnectionPoset out;
  out.seed_radius = radius;
  double min_rate = std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.chart_count(); ++c)
    for (const auto& e : system.exponents(c)) min_rate = std::min(min_rate, std::abs(e.scaled));
  out.max_time = 200.0 / min_rate;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::map<std::pair<int, int>, PosetEdge> found;
  for (const auto& rec : system.fixed_point_records()) {
    std::vector<int> unstable;
    for (int i = 0; i < n; ++i)
      if (rec.exponents[i].value < 0) unstable.push_back(i);
    const std::uint64_t subsets = std::uint64_t{1} << unstable.size();
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
      for (int k = 0; k < per_point_samples; ++k) {
        ChartPoint x{rec.home_chart, Coords(n, 0.0)};
        double norm2 = 0.0;
        for (std::size_t b = 0; b < unstable.size(); ++b) {
          if (!(mask & (std::uint64_t{1} << b))) continue;
          const Complex c(g(rng), g(rng));
          x.coords[unstable[b]] = c;
          norm2 += std::norm(c);
        }
        const double scale = radius / std::sqrt(norm2);
        for (auto& c : x.coords) c *= scale;
        LimitResult r;
        try {
          r = system.limit(x, Direction::forward);
        } catch (const ConsistencyError& e) {
          out.inconclusive.push_back({{"source", rec.label}, {"x", coords_json(x.coords)}, {"error", e.what()}});
          continue;
        }
        if (r.point_id == rec.id || std::abs(r.s_reached) > out.max_time) {
          out.inconclusive.push_back({{"source", rec.label}, {"x", coords_json(x.coords)}});
          continue;
        }
        found.try_emplace({rec.id, r.point_id}, PosetEdge{rec.id, r.point_id, x});
      }
    }
  }
  for (auto& [key, edge] : found) out.edges.push_back(std::move(edge));
  return out;
}

bool DecompositionReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second.pass; });
}

DecompositionReport decompose(const FlowSystem& system, const DecomposeOptions& opts) {
  system.require_generic();
  const auto& model = system.model();
  const int n = model.complex_dim();
  DecompositionReport rep;
  rep.model_name = model.name();
  rep.generator = generator_string(system.generator());
  rep.seed = opts.seed;
  rep.samples = opts.samples;
  rep.fixed_points = system.fixed_point_records();
  for (auto& rec : rep.fixed_points) rec.unstable_dim = unstable_dim(rec);

  rep.verdicts.emplace_back("hyperbolic", verify_hyperbolic(model, system.generator()));

  const auto samples = draw_samples(model, opts.samples, opts.seed, Sampling::stratified);
  const BasinClassification basins = basin_classify(system, samples);
  rep.basin_counts = basins.basin_counts;
  rep.co_basin_counts = basins.co_basin_counts;
  rep.chart_membership = basins.chart_membership;
  rep.forward = basins.forward;
  rep.backward = basins.backward;
  {
    Verdict v;
    std::int64_t fsum = 0, bsum = 0;
    for (auto c : basins.basin_counts) fsum += c;
    for (auto c : basins.co_basin_counts) bsum += c;
    v.pass = fsum == opts.samples && bsum == opts.samples && basins.analytic_agreed == basins.analytic_checked;
    v.max_violation = static_cast<double>(basins.analytic_checked - basins.analytic_agreed);
    v.details["analytic_checked"] = basins.analytic_checked;
    v.details["analytic_agreed"] = basins.analytic_agreed;
    rep.verdicts.emplace_back("basin_partition", v);
  }

  rep.poincare = poincare_polynomial(system);
  rep.euler = euler_characteristic(system);
  {
    Verdict v;
    std::int64_t at_one = 0;
    for (std::size_t k = 0; k < rep.poincare.size(); ++k) {
      at_one += rep.poincare[k];
      if (k % 2 == 1 && rep.poincare[k] != 0) v.pass = false;
    }
    if (at_one != rep.euler) v.pass = false;
    v.details["poincare_at_one"] = at_one;
    if (const auto* toric = dynamic_cast<const ToricModel*>(&model)) {
      const auto h = h_vector(toric->fan());
      for (int k = 0; k <= n; ++k)
        if (h[k] != rep.poincare[2 * k]) v.pass = false;
      v.details["h_vector"] = h;
    }
    rep.verdicts.emplace_back("poincare_consistency", v);
  }

  {
    // index under -a0 complements the index under a0
    const FlowSystem dual(model, -system.generator(), system.options());
    const auto dual_records = dual.fixed_point_records();
    Verdict v;
    for (std::size_t i = 0; i < rep.fixed_points.size(); ++i) {
      const int sum = rep.fixed_points[i].unstable_dim + unstable_dim(dual_records[i]);
      if (sum != 2 * n) {
        v.pass = false;
        v.witnesses.push_back({{"fixed_point", rep.fixed_points[i].label}, {"sum", sum}});
      }
    }
    rep.verdicts.emplace_back("index_duality", v);
  }

  rep.poset = connection_poset(system, opts.poset_seeds, opts.seed + 1, opts.seed_radius);
  {
    Verdict v;
    for (const auto& e : rep.poset.edges) {
      if (!(rep.fixed_points[e.source].unstable_dim > rep.fixed_points[e.target].unstable_dim)) {
        v.pass = false;
        v.witnesses.push_back({{"source", rep.fixed_points[e.source].label},
                               {"target", rep.fixed_points[e.target].label}});
      }
    }
    v.details["inconclusive_seeds"] = rep.poset.inconclusive.size();
    rep.verdicts.emplace_back("poset_monotone", v);
  }

  rep.verdicts.emplace_back("convergence", verify_convergence_condition(system, std::min(opts.samples, 2000), opts.seed + 2));

  rep.tolerances = {
      {"limit_tolerance", system.options().tolerance},
      {"switch_margin", system.options().switch_margin},
      {"seed_radius", opts.seed_radius},
      {"poset_max_time", rep.poset.max_time},
      {"zero_field", 1e-12},
  };
  return rep;
}

}  // namespace torusflow
