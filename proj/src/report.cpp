#include "torusflow/report.hpp"

#include <sstream>

namespace torusflow {

nlohmann::json fixed_point_json(const FixedPointRecord& rec) {
  auto weights = nlohmann::json::array();
  for (const auto& m : rec.tangential_weights) weights.push_back(m.components);
  auto exps = nlohmann::json::array();
  for (const auto& e : rec.exponents) exps.push_back({{"value", format_rational(e.value)}, {"scaled", e.scaled}});
  return {{"id", rec.id},
          {"label", rec.label},
          {"home_chart", rec.home_chart},
          {"tangential_weights", weights},
          {"exponents", exps},
          {"unstable_dim", rec.unstable_dim}};
}

nlohmann::json report_to_json(const DecompositionReport& rep) {
  nlohmann::json j;
  j["sign_convention"] = kSignConvention;
  j["model"] = rep.model_name;
  j["a0"] = rep.generator;
  j["seed"] = rep.seed;
  j["samples"] = rep.samples;
  auto fps = nlohmann::json::array();
  for (const auto& r : rep.fixed_points) fps.push_back(fixed_point_json(r));
  j["fixed_points"] = fps;
  auto basins = nlohmann::json::object();
  auto co_basins = nlohmann::json::object();
  auto membership = nlohmann::json::object();
  for (std::size_t i = 0; i < rep.fixed_points.size(); ++i) {
    const auto& label = rep.fixed_points[i].label;
    basins[label] = rep.basin_counts[i];
    co_basins[label] = rep.co_basin_counts[i];
    membership[label] = rep.chart_membership[i];
  }
  j["basin_counts"] = basins;
  j["co_basin_counts"] = co_basins;
  j["basin_chart_membership"] = membership;
  j["poincare"] = rep.poincare;
  j["euler"] = rep.euler;
  auto edges = nlohmann::json::array();
  for (const auto& e : rep.poset.edges) {
    auto w = nlohmann::json::array();
    for (const auto& c : e.witness.coords) w.push_back({c.real(), c.imag()});
    edges.push_back({{"source", rep.fixed_points[e.source].label},
                     {"target", rep.fixed_points[e.target].label},
                     {"witness", {{"chart", e.witness.chart}, {"coords", w}}}});
  }
  j["poset_edges"] = edges;
  j["poset_inconclusive"] = rep.poset.inconclusive;
  auto verdicts = nlohmann::json::object();
  for (const auto& [name, v] : rep.verdicts) verdicts[name] = v;
  j["verdicts"] = verdicts;
  j["tolerances"] = rep.tolerances;
  j["pass"] = rep.all_pass();
  return j;
}

std::string poset_to_dot(const DecompositionReport& rep) {
  std::ostringstream os;
  os << "digraph connections {\n  rankdir=TB;\n";
  for (const auto& r : rep.fixed_points)
    os << "  p" << r.id << " [label=\"" << r.label << "\\nindex " << r.unstable_dim << "\"];\n";
  for (const auto& e : rep.poset.edges) os << "  p" << e.source << " -> p" << e.target << ";\n";
  os << "}\n";
  return os.str();
}

std::string basins_csv(const DecompositionReport& rep) {
  std::ostringstream os;
  os << "sample,forward,backward\n";
  for (std::size_t i = 0; i < rep.forward.size(); ++i)
    os << i << ',' << rep.fixed_points[rep.forward[i]].label << ',' << rep.fixed_points[rep.backward[i]].label
       << '\n';
  return os.str();
}

nlohmann::json limit_to_json(const LimitResult& r, const TorusManifold& model) {
  return {{"point_id", r.point_id},
          {"label", model.fixed_points().at(r.point_id).label},
          {"direction", to_string(r.direction)},
          {"s_reached", r.s_reached}};
}

std::string decay_csv(const DecayResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "sample,direction,s,global_norm,chart_norm\n";
  for (const auto& c : result.curves)
    for (std::size_t k = 0; k < c.s.size(); ++k)
      os << c.sample << ',' << to_string(c.direction) << ',' << c.s[k] << ',' << c.global_norm[k] << ','
         << c.chart_norm[k] << '\n';
  return os.str();
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace torusflow
