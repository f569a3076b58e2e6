#include "torusflow/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torusflow/errors.hpp"
#include "torusflow/morse.hpp"

namespace torusflow {

namespace {

// u * v * weight, with weight == 0 winning over overflowing products
double weighted_term(double u, double v, double coordinate, MetricVariant variant) {
  if (variant == MetricVariant::euclidean) return u * v;
  const double w = std::exp(-std::abs(coordinate));
  return w == 0.0 ? 0.0 : u * v * w;
}

}  // namespace

double chart_metric_eval(std::span<const double> x, std::span<const double> u, std::span<const double> v,
                         MetricVariant variant) {
  if (x.size() != u.size() || x.size() != v.size() || x.size() % 2 != 0)
    throw DimensionError("chart_metric_eval: expected 2n-vectors of equal length");
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += weighted_term(u[k], v[k], x[k], variant);
  return sum;
}

double chart_metric_eval(const Coords& x, const Coords& u, const Coords& v, MetricVariant variant) {
  auto flat = [](const Coords& c) {
    std::vector<double> out;
    for (const auto& w : c) {
      out.push_back(w.real());
      out.push_back(w.imag());
    }
    return out;
  };
  const auto fx = flat(x), fu = flat(u), fv = flat(v);
  return chart_metric_eval(std::span<const double>(fx), std::span<const double>(fu), std::span<const double>(fv),
                           variant);
}

PartitionOfUnity::PartitionOfUnity(const WeightChartModel& model, double radius) : model_(&model), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("partition of unity radius must be positive");
}

std::vector<double> PartitionOfUnity::bumps(const ChartPoint& x) const {
  std::vector<double> b(model_->chart_count(), 0.0);
  for (int c = 0; c < model_->chart_count(); ++c) {
    const auto p = model_->transition(x, c);
    if (!p) continue;
    double r2 = 0.0;
    for (const auto& w : p->coords) r2 += std::norm(w);
    const double t = r2 / (radius_ * radius_);
    if (t < 1.0) b[c] = std::exp(1.0 / (t - 1.0));
  }
  return b;
}

std::vector<double> PartitionOfUnity::weights(const ChartPoint& x) const {
  auto b = bumps(x);
  double total = 0.0;
  for (double v : b) total += v;
  if (!(total > 0.0)) throw ConsistencyError("partition of unity: point lies in no chart ball");
  for (double& v : b) v /= total;
  return b;
}

double chart_field_norm(const Coords& coords, std::span<const double> exponents, MetricVariant variant) {
  double sum = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double a = exponents[i];
    const double x = coords[i].real();
    const double y = coords[i].imag();
    sum += weighted_term(-a * x, -a * x, x, variant) + weighted_term(-a * y, -a * y, y, variant);
  }
  return std::sqrt(sum);
}

double global_field_norm(const FlowSystem& system, const PartitionOfUnity& pou, const ChartPoint& x,
                         MetricVariant variant) {
  const auto& model = system.model();
  const auto rho = pou.weights(x);
  double sum = 0.0;
  for (int c = 0; c < model.chart_count(); ++c) {
    if (rho[c] == 0.0) continue;
    const auto p = model.transition(x, c);
    std::vector<double> a;
    for (const auto& e : system.exponents(c)) a.push_back(e.scaled);
    const double n = chart_field_norm(p->coords, a, variant);
    sum += rho[c] * n * n;
  }
  return std::sqrt(sum);
}

double norm_along_flow_closed_form(const Coords& start, std::span<const double> exponents, double s) {
  double sum = 0.0;
  auto term = [&](double a, double c) {
    if (a == 0.0 || c == 0.0) return 0.0;
    // log(a^2 c^2 e^{-2 a s - |c| e^{-a s}})
    const double log_term = 2.0 * std::log(std::abs(a * c)) - 2.0 * a * s - std::abs(c) * std::exp(-a * s);
    return std::exp(log_term);
  };
  for (std::size_t i = 0; i < start.size(); ++i)
    sum += term(exponents[i], start[i].real()) + term(exponents[i], start[i].imag());
  return std::sqrt(sum);
}

DecayResult verify_norm_decay(const FlowSystem& system, const DecayOptions& opts) {
  system.require_generic();
  const auto& model = system.model();
  const FlowSystem reversed(model, -system.generator(), system.options());
  const PartitionOfUnity pou(model);

  double min_rate = std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.chart_count(); ++c)
    for (const auto& e : system.exponents(c)) min_rate = std::min(min_rate, std::abs(e.scaled));
  const double horizon = opts.horizon_factor / min_rate;

  DecayResult out;
  out.verdict.details["horizon"] = horizon;
  out.verdict.details["threshold"] = opts.threshold;
  const auto samples = draw_samples(model, opts.samples, opts.seed, Sampling::stratified);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (Direction d : {Direction::forward, Direction::backward}) {
      // s -> -infinity for a0 is s -> +infinity for -a0
      const FlowSystem& sys = d == Direction::forward ? system : reversed;
      const ChartPoint home = model.best_chart(samples[i]);
      std::vector<double> a;
      for (const auto& e : sys.exponents(home.chart)) a.push_back(e.scaled);

      DecayCurve curve;
      curve.sample = static_cast<int>(i);
      curve.direction = d;
      for (int k = 0; k < opts.grid_points; ++k) {
        const double s = horizon * k / (opts.grid_points - 1);
        const ChartPoint y = sys.flow_exact(samples[i], s);
        Coords in_chart = home.coords;
        for (std::size_t j = 0; j < in_chart.size(); ++j) in_chart[j] *= std::exp(-a[j] * s);
        curve.s.push_back(d == Direction::forward ? s : -s);
        curve.global_norm.push_back(global_field_norm(sys, pou, y, opts.variant));
        curve.chart_norm.push_back(chart_field_norm(in_chart, a, opts.variant));
      }
      const double final_norm = std::max(curve.global_norm.back(), curve.chart_norm.back());
      const bool was_passing = out.verdict.pass;
      out.verdict.observe(final_norm, opts.threshold);
      if (was_passing && !out.verdict.pass)
        out.verdict.witnesses.push_back({{"sample", i}, {"direction", to_string(d)}, {"final_norm", final_norm}});
      out.curves.push_back(std::move(curve));
    }
  }
  return out;
}

}  // namespace torusflow
