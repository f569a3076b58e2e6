#include "torusflow/model_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TorusElement rotation(std::size_t rank, std::size_t factor, double theta) {
  std::vector<double> angles(rank, 0.0);
  angles[factor] = theta;
  return TorusElement(std::move(angles));
}

TorusElement random_torus_element(std::mt19937_64& rng, std::size_t rank) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> angles(rank);
  for (auto& a : angles) a = u(rng);
  return TorusElement(std::move(angles));
}

double norm(const Coords& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(s);
}

nlohmann::json coords_json(const Coords& c) {
  auto j = nlohmann::json::array();
  for (const auto& v : c) j.push_back({v.real(), v.imag()});
  return j;
}

}  // namespace

WeightInference infer_tangential_weights_numeric(const TorusManifold& model, int id, double max_residual) {
  const auto& rec = model.fixed_points().at(id);
  const int chart = rec.home_chart;
  const int n = model.complex_dim();
  const auto rank = static_cast<std::size_t>(model.torus_rank());

  ChartPoint base{chart, Coords(n)};
  for (int k = 0; k < n; ++k) base.coords[k] = 1e-2 * (1.0 + 0.1 * k) * Complex(0.6, 0.8);
  const AmbientPoint x = model.from_chart(base);
  const ChartPoint w0 = model.to_chart(chart, x);

  WeightInference out;
  out.weights.assign(n, Weight(std::vector<std::int64_t>(rank, 0)));
  constexpr double kSmall = 1e-3;
  constexpr int kSteps = 256;
  for (std::size_t l = 0; l < rank; ++l) {
    // local rotation rate
    const ChartPoint ws = model.to_chart(chart, model.act(rotation(rank, l, kSmall), x));
    // winding number of each coordinate as theta_l circles once
    std::vector<double> winding(n, 0.0);
    ChartPoint prev = w0;
    for (int step = 1; step <= kSteps; ++step) {
      const double theta = static_cast<double>(step) / kSteps;
      const ChartPoint cur = model.to_chart(chart, model.act(rotation(rank, l, theta), x));
      for (int k = 0; k < n; ++k) winding[k] += std::arg(cur.coords[k] / prev.coords[k]);
      prev = cur;
    }
    for (int k = 0; k < n; ++k) {
      const Complex ratio = ws.coords[k] / w0.coords[k];
      const double rate = std::arg(ratio) / (kTwoPi * kSmall);
      const double turns = winding[k] / kTwoPi;
      const double m = std::round(turns);
      const double residual =
          std::max({std::abs(rate - m), std::abs(turns - m), std::abs(std::abs(ratio) - 1.0)});
      out.residual = std::max(out.residual, residual);
      out.weights[k].components[l] = static_cast<std::int64_t>(m);
    }
  }
  if (!(out.residual < max_residual)) {
    std::ostringstream os;
    os << "weight inference at " << rec.label << " failed: residual " << out.residual
       << " (chart is not a diagonal representation)";
    throw InferenceError(os.str());
  }
  return out;
}

Verdict verify_chart_equivariance(const TorusManifold& model, int chart, const EquivarianceOptions& opts) {
  const auto& weights = opts.weights ? *opts.weights : model.chart_weights(chart);
  if (static_cast<int>(weights.size()) != model.complex_dim())
    throw DimensionError("equivariance check: weight count differs from dimension");
  std::mt19937_64 rng(opts.seed);
  Verdict v;
  const auto rank = static_cast<std::size_t>(model.torus_rank());
  for (int trial = 0; trial < opts.trials; ++trial) {
    AmbientPoint x = model.sample(rng, Sampling::generic);
    for (int attempt = 0; attempt < 100 && !model.in_chart_domain(chart, x); ++attempt)
      x = model.sample(rng, Sampling::generic);
    if (!model.in_chart_domain(chart, x)) continue;
    const TorusElement t = random_torus_element(rng, rank);
    const ChartPoint lhs = model.to_chart(chart, model.act(t, x));
    ChartPoint rhs = model.to_chart(chart, x);
    for (std::size_t k = 0; k < rhs.coords.size(); ++k) rhs.coords[k] *= character_eval(weights[k], t);
    Coords diff(rhs.coords.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = lhs.coords[k] - rhs.coords[k];
    const double violation = norm(diff) / std::max(1.0, norm(rhs.coords));
    const bool was_passing = v.pass;
    v.observe(violation, opts.tol);
    if (was_passing && !v.pass)
      v.witnesses.push_back({{"chart", chart}, {"x", coords_json(x.coords)}, {"t", t.angles()}, {"violation", violation}});
  }
  return v;
}

Verdict verify_atlas_equivariance(const TorusManifold& model, const EquivarianceOptions& opts) {
  Verdict all;
  all.details["per_chart"] = nlohmann::json::array();
  for (int c = 0; c < model.chart_count(); ++c) {
    EquivarianceOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(c);
    if (opts.weights) o.weights.reset();
    const Verdict v = verify_chart_equivariance(model, c, o);
    all.observe(v.max_violation, opts.tol);
    all.pass = all.pass && v.pass;
    for (const auto& w : v.witnesses) all.witnesses.push_back(w);
    all.details["per_chart"].push_back({{"chart", model.chart_label(c)}, {"max_violation", v.max_violation}});
  }
  return all;
}

Verdict verify_covering(const TorusManifold& model, const CoveringOptions& opts) {
  std::vector<int> charts = opts.charts;
  if (charts.empty())
    for (int c = 0; c < model.chart_count(); ++c) charts.push_back(c);
  std::mt19937_64 rng(opts.seed);
  std::vector<std::int64_t> hits(charts.size(), 0);
  std::int64_t misses = 0;
  Verdict v;
  for (int s = 0; s < opts.samples; ++s) {
    const AmbientPoint x = model.sample(rng, Sampling::stratified);
    bool covered = false;
    for (std::size_t c = 0; c < charts.size(); ++c) {
      if (model.in_chart_domain(charts[c], x)) {
        ++hits[c];
        covered = true;
      }
    }
    if (!covered) {
      ++misses;
      if (v.witnesses.size() < 10) v.witnesses.push_back({{"sample", s}, {"x", coords_json(x.coords)}});
    }
  }
  v.pass = misses == 0;
  v.max_violation = static_cast<double>(misses);
  auto counts = nlohmann::json::object();
  for (std::size_t c = 0; c < charts.size(); ++c) counts[model.chart_label(charts[c])] = hits[c];
  v.details["hits"] = counts;
  v.details["misses"] = misses;
  v.details["samples"] = opts.samples;
  return v;
}

Verdict verify_chart_round_trip(const TorusManifold& model, int samples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  Verdict v;
  for (int s = 0; s < samples; ++s) {
    const AmbientPoint x = model.sample(rng, Sampling::stratified);
    for (int c = 0; c < model.chart_count(); ++c) {
      if (!model.in_chart_domain(c, x)) continue;
      const ChartPoint p = model.to_chart(c, x);
      const ChartPoint q = model.to_chart(c, model.from_chart(p));
      Coords diff(p.coords.size());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = p.coords[k] - q.coords[k];
      v.observe(norm(diff) / std::max(1.0, norm(p.coords)), tol);
    }
  }
  return v;
}

std::optional<std::vector<int>> match_fixed_points(const TorusManifold& a, const TorusManifold& b) {
  const auto& fa = a.fixed_points();
  const auto& fb = b.fixed_points();
  if (fa.size() != fb.size() || fa.size() > 9) return std::nullopt;
  auto sorted = [](std::vector<Weight> w) {
    std::sort(w.begin(), w.end());
    return w;
  };
  std::vector<std::vector<Weight>> wa, wb;
  for (const auto& r : fa) wa.push_back(sorted(r.tangential_weights));
  for (const auto& r : fb) wb.push_back(sorted(r.tangential_weights));
  std::vector<int> perm(fa.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size() && ok; ++i) ok = wa[i] == wb[perm[i]];
    if (ok) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

}  // namespace torusflow
