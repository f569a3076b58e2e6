#include "torusflow/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <regex>

#include "torusflow/errors.hpp"

namespace torusflow {

nlohmann::json weight_to_json(const Weight& m) { return m.components; }

Weight weight_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("weight must be an integer array");
  Weight m;
  for (const auto& c : j) {
    if (!c.is_number_integer()) throw std::invalid_argument("weight entries must be integers");
    m.components.push_back(c.get<std::int64_t>());
  }
  return m;
}

nlohmann::json generator_to_json(const GeneratorVector& a0) {
  auto j = nlohmann::json::array();
  for (const auto& q : a0.components) j.push_back(format_rational(q));
  return j;
}

GeneratorVector generator_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("generator must be an array of \"p/q\" strings");
  GeneratorVector a;
  for (const auto& c : j) {
    if (c.is_string())
      a.components.push_back(parse_rational(c.get<std::string>()));
    else if (c.is_number_integer())
      a.components.emplace_back(c.get<std::int64_t>());
    else
      throw std::invalid_argument("generator entries must be \"p/q\" strings");
  }
  return a;
}

Fan fan_from_json(const nlohmann::json& j) {
  Fan f;
  try {
    f.rank = j.at("rank").get<int>();
    f.rays = j.at("rays").get<std::vector<std::vector<std::int64_t>>>();
    f.maximal_cones = j.at("maximal_cones").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed fan: ") + e.what());
  }
  return f;
}

nlohmann::json fan_to_json(const Fan& fan) {
  return {{"rank", fan.rank}, {"rays", fan.rays}, {"maximal_cones", fan.maximal_cones}};
}

std::unique_ptr<TorusManifold> model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("model descriptor must be a JSON object");
  std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : std::string();
  if (kind.empty() && j.contains("rays")) kind = "toric";
  if (kind == "projective") {
    const int n = j.at("n").get<int>();
    if (!j.contains("coordinate_weights")) return std::make_unique<ProjectiveModel>(n);
    std::vector<Weight> w;
    for (const auto& c : j.at("coordinate_weights")) w.push_back(weight_from_json(c));
    return std::make_unique<ProjectiveModel>(n, std::move(w));
  }
  if (kind == "toric") {
    const Fan f = fan_from_json(j.contains("fan") ? j.at("fan") : j);
    return std::make_unique<ToricModel>(f, j.value("name", std::string("toric")));
  }
  if (kind == "sphere") return std::make_unique<SphereModel>(j.at("n").get<int>());
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

nlohmann::json model_to_json(const TorusManifold& model) {
  if (const auto* p = dynamic_cast<const ProjectiveModel*>(&model)) {
    auto w = nlohmann::json::array();
    for (const auto& m : p->coordinate_weights()) w.push_back(weight_to_json(m));
    return {{"kind", "projective"}, {"n", p->complex_dim()}, {"coordinate_weights", w}};
  }
  if (const auto* t = dynamic_cast<const ToricModel*>(&model)) {
    return {{"kind", "toric"}, {"name", t->name()}, {"fan", fan_to_json(t->fan())}};
  }
  return {{"kind", model.kind()}, {"n", model.complex_dim()}};
}

std::unique_ptr<TorusManifold> model_from_preset(std::string_view name) {
  static const std::regex cp(R"(cp([1-9][0-9]?))");
  static const std::regex sphere(R"(s([1-9][0-9]?))");
  static const std::regex fan_cp(R"(fan:cp([1-9][0-9]?))");
  static const std::regex hirz(R"(fan:hirzebruch(-?[0-9]+))");
  const std::string s(name);
  std::smatch m;
  if (std::regex_match(s, m, cp)) return std::make_unique<ProjectiveModel>(std::stoi(m[1]));
  if (std::regex_match(s, m, sphere)) {
    const int d = std::stoi(m[1]);
    if (d % 2 != 0) throw std::invalid_argument("sphere presets are even-dimensional (s2, s4, ...)");
    return std::make_unique<SphereModel>(d / 2);
  }
  if (std::regex_match(s, m, fan_cp))
    return std::make_unique<ToricModel>(fans::projective_space(std::stoi(m[1])), "fan:cp" + std::string(m[1]));
  if (std::regex_match(s, m, hirz))
    return std::make_unique<ToricModel>(fans::hirzebruch(std::stoi(m[1])), "fan:hirzebruch" + std::string(m[1]));
  return nullptr;
}

std::unique_ptr<TorusManifold> load_model(std::string_view spec) {
  if (auto preset = model_from_preset(spec)) return preset;
  const std::filesystem::path path{std::string(spec)};
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("'" + std::string(spec) + "' is neither a preset nor a readable file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

GeneratorVector default_generator(std::size_t rank) {
  static constexpr std::int64_t kDenominators[] = {3, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
  GeneratorVector a;
  for (std::size_t k = 0; k < rank; ++k) {
    const std::int64_t den = k < std::size(kDenominators) ? kDenominators[k] : 43 + 2 * static_cast<std::int64_t>(k);
    a.components.emplace_back(1, den);
  }
  return a;
}

}  // namespace torusflow
