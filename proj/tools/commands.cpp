#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/metric.hpp"
#include "torusflow/model_checks.hpp"
#include "torusflow/model_io.hpp"
#include "torusflow/morse.hpp"
#include "torusflow/report.hpp"

namespace torusflow::cli {

namespace {

struct Tolerances {
  double limit_tolerance = 1e-9;
  double switch_margin = 0.1;
  double chart_equivariance = 1e-10;
  double flow_equivariance = 1e-9;
  double decay_threshold = 1e-6;
  double seed_radius = 1e-4;
  int equivariance_trials = 1000;
  int decay_samples = 100;

  nlohmann::json to_json() const {
    return {{"limit_tolerance", limit_tolerance},       {"switch_margin", switch_margin},
            {"chart_equivariance", chart_equivariance}, {"flow_equivariance", flow_equivariance},
            {"decay_threshold", decay_threshold},       {"seed_radius", seed_radius},
            {"equivariance_trials", equivariance_trials}, {"decay_samples", decay_samples}};
  }
};

struct RunConfig {
  std::string model = "cp2";
  std::string a0;
  std::uint64_t seed = 1;
  int samples = 10000;
  std::string out = ".";
  std::string config_file;
  Tolerances tol;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void apply_config_file(RunConfig& cfg, bool model_set, bool a0_set, bool seed_set, bool samples_set, bool out_set) {
  if (cfg.config_file.empty()) return;
  std::ifstream in(cfg.config_file);
  if (!in) throw InputError("cannot read config file " + cfg.config_file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config file: ") + e.what());
  }
  if (!model_set && j.contains("model")) {
    cfg.model = j["model"].is_string() ? j["model"].get<std::string>() : std::string();
    if (!j["model"].is_string()) {
      // inline descriptor: stash it next to the output
      const auto path = std::filesystem::path(cfg.out) / "model.inline.json";
      std::filesystem::create_directories(cfg.out);
      std::ofstream(path) << j["model"].dump();
      cfg.model = path.string();
    }
  }
  if (!a0_set && j.contains("a0")) {
    cfg.a0.clear();
    if (j["a0"].is_string()) {
      cfg.a0 = j["a0"].get<std::string>();
    } else {
      const auto g = generator_from_json(j["a0"]);
      for (std::size_t k = 0; k < g.rank(); ++k) cfg.a0 += (k ? "," : "") + format_rational(g.components[k]);
    }
  }
  if (!seed_set && j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (!samples_set && j.contains("samples")) cfg.samples = j["samples"].get<int>();
  if (!out_set && j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    auto& tol = cfg.tol;
    tol.limit_tolerance = t.value("limit_tolerance", tol.limit_tolerance);
    tol.switch_margin = t.value("switch_margin", tol.switch_margin);
    tol.chart_equivariance = t.value("chart_equivariance", tol.chart_equivariance);
    tol.flow_equivariance = t.value("flow_equivariance", tol.flow_equivariance);
    tol.decay_threshold = t.value("decay_threshold", tol.decay_threshold);
    tol.seed_radius = t.value("seed_radius", tol.seed_radius);
    tol.equivariance_trials = t.value("equivariance_trials", tol.equivariance_trials);
    tol.decay_samples = t.value("decay_samples", tol.decay_samples);
  }
}

std::unique_ptr<TorusManifold> load(const RunConfig& cfg) {
  try {
    return load_model(cfg.model);
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

GeneratorVector generator_for(const RunConfig& cfg, const TorusManifold& model) {
  GeneratorVector a0;
  if (cfg.a0.empty()) {
    a0 = default_generator(model.torus_rank());
  } else {
    try {
      a0 = parse_generator(cfg.a0);
    } catch (const std::exception& e) {
      throw InputError(std::string("bad --a0: ") + e.what());
    }
  }
  if (static_cast<int>(a0.rank()) != model.torus_rank())
    throw InputError("--a0 has " + std::to_string(a0.rank()) + " entries; the torus has rank " +
                     std::to_string(model.torus_rank()));
  return a0;
}

std::string generator_text(const GeneratorVector& a0) {
  std::string s;
  for (std::size_t k = 0; k < a0.rank(); ++k) s += (k ? "," : "") + format_rational(a0.components[k]);
  return s;
}

TrajectoryOptions trajectory_options(const Tolerances& tol) {
  TrajectoryOptions o;
  o.switch_margin = tol.switch_margin;
  o.tolerance = tol.limit_tolerance;
  return o;
}

const WeightChartModel& flow_model(const TorusManifold& model) {
  const auto* wcm = dynamic_cast<const WeightChartModel*>(&model);
  if (!wcm) throw UnsupportedError(model.name() + " carries no flow (sphere models support covering and equivariance only)");
  return *wcm;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw InputError("cannot write " + (std::filesystem::path(dir) / name).string());
  f << text;
}

std::string genericity_message(const GenericityVerdict& g) {
  std::ostringstream os;
  os << "generator is not generic; weights pairing to zero:";
  for (const auto& m : g.witnesses) os << ' ' << format_weight(m);
  if (!g.zero_weights.empty()) os << " (zero tangential weight present)";
  return os.str();
}

// ------------------------------------------------------------------ describe

int cmd_describe(const RunConfig& cfg, bool as_json, bool a0_given, std::ostream& out) {
  const auto model = load(cfg);
  std::optional<GeneratorVector> a0;
  if (a0_given) a0 = generator_for(cfg, *model);
  if (as_json) {
    nlohmann::json j;
    j["model"] = model_to_json(*model);
    j["name"] = model->name();
    j["complex_dim"] = model->complex_dim();
    j["torus_rank"] = model->torus_rank();
    j["charts"] = model->chart_count();
    auto fps = nlohmann::json::array();
    for (const auto& rec : model->fixed_points()) fps.push_back(fixed_point_json(a0 ? with_exponents(rec, *a0) : rec));
    j["fixed_points"] = fps;
    out << dump(j);
    return kExitOk;
  }
  out << "model: " << model->name() << " (" << model->kind() << "), complex dimension " << model->complex_dim()
      << ", torus rank " << model->torus_rank() << '\n';
  out << "charts: " << model->chart_count() << '\n';
  out << "fixed points: " << model->fixed_points().size() << '\n';
  for (const auto& raw : model->fixed_points()) {
    const auto rec = a0 ? with_exponents(raw, *a0) : raw;
    out << "  " << std::left << std::setw(14) << rec.label << " chart " << model->chart_label(rec.home_chart)
        << "  weights";
    for (const auto& m : rec.tangential_weights) out << ' ' << format_weight(m);
    if (a0) {
      out << "  exponents";
      for (const auto& e : rec.exponents) out << ' ' << format_rational(e.value);
      out << "  unstable_dim " << rec.unstable_dim;
    }
    out << '\n';
  }
  if (a0) out << "sign convention: " << kSignConvention << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ decompose

int cmd_decompose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load(cfg);
  const auto& wcm = flow_model(*model);
  const GeneratorVector a0 = generator_for(cfg, *model);
  const FlowSystem system(wcm, a0, trajectory_options(cfg.tol));
  const auto g = system.genericity();
  if (!g.generic || !g.zero_weights.empty()) {
    err << genericity_message(g) << '\n';
    return kExitNotGeneric;
  }
  DecomposeOptions opts;
  opts.samples = cfg.samples;
  opts.seed = cfg.seed;
  opts.seed_radius = cfg.tol.seed_radius;
  const DecompositionReport rep = decompose(system, opts);
  auto j = report_to_json(rep);
  j["tolerances"].update(cfg.tol.to_json());
  write_file(cfg.out, "report.json", dump(j));
  write_file(cfg.out, "poset.dot", poset_to_dot(rep));
  write_file(cfg.out, "basins.csv", basins_csv(rep));
  out << model->name() << " a0=(" << generator_text(a0) << "): poincare";
  for (auto c : rep.poincare) out << ' ' << c;
  out << ", euler " << rep.euler << ", " << rep.poset.edges.size() << " poset edges, "
      << (rep.all_pass() ? "all checks pass" : "CHECKS FAILED") << '\n';
  for (const auto& [name, v] : rep.verdicts)
    if (!v.pass) err << "failed: " << name << '\n';
  return rep.all_pass() ? kExitOk : kExitVerificationFailed;
}

// ------------------------------------------------------------------ verify

Verdict refused(const std::exception& e) {
  Verdict v;
  v.pass = false;
  v.witnesses.push_back({{"refused", e.what()}});
  return v;
}

Verdict not_applicable(const std::string& why) {
  Verdict v;
  v.details["not_applicable"] = why;
  return v;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kSuites = {"covering", "equivariance", "hyperbolic", "convergence", "decay"};
  std::vector<std::string> selected;
  if (suite == "all") {
    selected = kSuites;
  } else if (std::find(kSuites.begin(), kSuites.end(), suite) != kSuites.end()) {
    selected = {suite};
  } else {
    err << "unknown suite '" << suite << "' (covering|equivariance|hyperbolic|convergence|decay|all)\n";
    return kExitInputError;
  }
  const auto model = load(cfg);
  const GeneratorVector a0 = generator_for(cfg, *model);
  const auto* wcm = dynamic_cast<const WeightChartModel*>(model.get());
  if (!wcm && suite != "all" && (suite == "convergence" || suite == "decay")) {
    err << model->name() << " carries no flow; suite '" << suite << "' does not apply\n";
    return kExitInputError;
  }
  std::optional<FlowSystem> system;
  if (wcm) system.emplace(*wcm, a0, trajectory_options(cfg.tol));

  nlohmann::json suites = nlohmann::json::object();
  bool pass = true;
  std::optional<DecayResult> decay;
  for (const auto& name : selected) {
    Verdict v;
    if (name == "covering") {
      v = verify_covering(*model, CoveringOptions{cfg.samples, cfg.seed, {}});
    } else if (name == "equivariance") {
      EquivarianceOptions eo;
      eo.trials = cfg.tol.equivariance_trials;
      eo.tol = cfg.tol.chart_equivariance;
      eo.seed = cfg.seed;
      v = verify_atlas_equivariance(*model, eo);
      // symbolic tangential weights must match the numerically inferred ones
      auto inferred = nlohmann::json::array();
      for (const auto& rec : model->fixed_points()) {
        try {
          const auto w = infer_tangential_weights_numeric(*model, rec.id);
          auto a = w.weights, b = rec.tangential_weights;
          std::sort(a.begin(), a.end());
          std::sort(b.begin(), b.end());
          auto wj = nlohmann::json::array();
          for (const auto& m : w.weights) wj.push_back(m.components);
          inferred.push_back({{"fixed_point", rec.label}, {"weights", wj}, {"residual", w.residual}});
          if (a != b) {
            v.pass = false;
            v.witnesses.push_back({{"fixed_point", rec.label}, {"reason", "inferred weights differ"}});
          }
        } catch (const InferenceError& e) {
          v.pass = false;
          v.witnesses.push_back({{"fixed_point", rec.label}, {"reason", e.what()}});
        }
      }
      v.details["inferred_weights"] = inferred;
      if (system) {
        FlowEquivarianceOptions fo;
        fo.trials = cfg.tol.equivariance_trials;
        fo.tol = cfg.tol.flow_equivariance;
        fo.seed = cfg.seed + 1;
        const Verdict fv = flow_equivariance_check(*system, fo);
        v.details["flow"] = fv;
        v.pass = v.pass && fv.pass;
      }
    } else if (name == "hyperbolic") {
      v = verify_hyperbolic(*model, a0);
    } else if (!system) {
      v = not_applicable(model->name() + " carries no flow");
    } else {
      try {
        if (name == "convergence") {
          v = verify_convergence_condition(*system, cfg.samples, cfg.seed);
        } else {
          DecayOptions d;
          d.samples = cfg.tol.decay_samples;
          d.seed = cfg.seed;
          d.threshold = cfg.tol.decay_threshold;
          decay = verify_norm_decay(*system, d);
          v = decay->verdict;
        }
      } catch (const GenericityError& e) {
        v = refused(e);
      }
    }
    pass = pass && v.pass;
    suites[name] = v;
    const char* status = v.details.contains("not_applicable") ? "n/a " : (v.pass ? "pass" : "FAIL");
    out << std::left << std::setw(14) << name << status << "  max_violation "
        << v.max_violation << '\n';
  }
  nlohmann::json j;
  j["sign_convention"] = kSignConvention;
  j["model"] = model->name();
  j["a0"] = generator_text(a0);
  j["seed"] = cfg.seed;
  j["suites"] = suites;
  j["tolerances"] = cfg.tol.to_json();
  j["pass"] = pass;
  write_file(cfg.out, "verdicts.json", dump(j));
  if (decay) write_file(cfg.out, "decay.csv", decay_csv(*decay));
  return pass ? kExitOk : kExitVerificationFailed;
}

// ------------------------------------------------------------------ flow

Complex parse_complex(std::string text) {
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
  if (text.empty()) throw InputError("empty coordinate");
  auto to_double = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InputError("bad coordinate '" + text + "'");
    return v;
  };
  try {
    if (text.back() != 'i') return {to_double(text), 0.0};
    const std::string body = text.substr(0, text.size() - 1);
    // split at the last sign that is not an exponent sign or the leading sign
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        split = k;
        break;
      }
    }
    if (split == std::string::npos) return {0.0, to_double(body)};
    return {to_double(body.substr(0, split)), to_double(body.substr(split))};
  } catch (const std::logic_error&) {
    throw InputError("bad coordinate '" + text + "'");
  }
}

int cmd_flow(const RunConfig& cfg, const std::string& start, int chart, const std::string& range, int rows,
             double step, const std::string& emit, std::ostream& out) {
  const auto model = load(cfg);
  const WeightChartModel* wcm = dynamic_cast<const WeightChartModel*>(model.get());
  if (!wcm) throw InputError(model->name() + " carries no flow");
  const GeneratorVector a0 = generator_for(cfg, *model);
  TrajectoryOptions topts = trajectory_options(cfg.tol);
  topts.step = step;
  const FlowSystem system(*wcm, a0, topts);

  Coords coords;
  std::stringstream ss(start);
  std::string piece;
  while (std::getline(ss, piece, ',')) coords.push_back(parse_complex(piece));

  ChartPoint x;
  try {
    if (chart >= 0) {
      if (chart >= wcm->chart_count()) throw InputError("no chart " + std::to_string(chart));
      if (static_cast<int>(coords.size()) != wcm->complex_dim())
        throw InputError("start needs " + std::to_string(wcm->complex_dim()) + " chart coordinates");
      x = ChartPoint{chart, coords};
    } else if (model->kind() == "projective") {
      if (static_cast<int>(coords.size()) != wcm->complex_dim() + 1)
        throw InputError("start needs " + std::to_string(wcm->complex_dim() + 1) + " homogeneous coordinates");
      x = wcm->to_chart_point(ProjectiveModel::normalize(coords));
    } else {
      if (static_cast<int>(coords.size()) != wcm->complex_dim())
        throw InputError("start needs --chart and " + std::to_string(wcm->complex_dim()) + " chart coordinates");
      x = ChartPoint{0, coords};
    }
  } catch (const DomainError& e) {
    throw InputError(std::string("start is not a point of the model: ") + e.what());
  }
  for (const auto& c : x.coords)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("start has non-finite coordinates");

  const auto colon = range.find(':');
  if (colon == std::string::npos) throw InputError("--s-range expects s0:s1");
  double s0 = 0.0, s1 = 0.0;
  try {
    s0 = std::stod(range.substr(0, colon));
    s1 = std::stod(range.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw InputError("bad --s-range '" + range + "'");
  }
  if (rows < 2) throw InputError("--rows must be at least 2");

  std::ostringstream csv;
  csv.precision(17);
  const int n = wcm->complex_dim();
  csv << "s,chart_id";
  for (int i = 1; i <= n; ++i) csv << ",x_" << i << ",y_" << i;
  csv << ",rk4_chart_id";
  for (int i = 1; i <= n; ++i) csv << ",rk4_x_" << i << ",rk4_y_" << i;
  csv << ",deviation\n";

  ChartPoint exact = s0 == 0.0 ? x : system.flow_exact(x, s0);
  ChartPoint rk4 = s0 == 0.0 ? x : system.flow_rk4(x, s0, topts);
  const double ds = (s1 - s0) / (rows - 1);
  for (int r = 0; r < rows; ++r) {
    if (r > 0) {
      exact = system.flow_exact(exact, ds);
      rk4 = system.flow_rk4(rk4, ds, topts);
    }
    csv << s0 + ds * r << ',' << exact.chart;
    for (const auto& c : exact.coords) csv << ',' << c.real() << ',' << c.imag();
    csv << ',' << rk4.chart;
    for (const auto& c : rk4.coords) csv << ',' << c.real() << ',' << c.imag();
    csv << ',' << wcm->chart_distance(exact, rk4) << '\n';
  }

  if (emit.empty() || emit == "-")
    out << csv.str();
  else
    write_file(std::filesystem::path(emit).parent_path().string().empty() ? "." : std::filesystem::path(emit).parent_path().string(),
               std::filesystem::path(emit).filename().string(), csv.str());

  if (system.genericity().generic) {
    auto limits = nlohmann::json::array();
    for (Direction d : {Direction::forward, Direction::backward}) limits.push_back(limit_to_json(system.limit(x, d), *model));
    write_file(cfg.out, "limits.json", dump(limits));
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equivariant gradient-like flows on torus manifolds"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "preset (cp1 cp2 cp3 s2 s4 fan:cp2 fan:hirzebruch1 ...) or JSON file");
    sub->add_option("--a0", cfg.a0, "generator as p/q,p/q,...");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--samples", cfg.samples, "sample count")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--config", cfg.config_file, "JSON config with tolerance overrides");
  };

  auto* describe = app.add_subcommand("describe", "print fixed points, tangential weights and charts");
  add_common(describe);
  bool as_json = false;
  describe->add_flag("--json", as_json, "emit JSON");

  auto* decompose_cmd = app.add_subcommand("decompose", "basins, indices, Poincare polynomial and poset");
  add_common(decompose_cmd);

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify);
  std::string suite = "all";
  verify->add_option("suite", suite, "covering|equivariance|hyperbolic|convergence|decay|all");

  auto* flow = app.add_subcommand("flow", "trajectory CSV with exact and RK4 columns");
  flow->set_help_flag("--help", "print help");
  add_common(flow);
  std::string start;
  int chart = -1;
  std::string range = "0:1";
  int rows = 11;
  double step = 1e-3;
  std::string emit;
  flow->add_option("--start", start, "homogeneous coordinates (projective) or chart coordinates with --chart")
      ->required();
  flow->add_option("--chart", chart, "interpret --start as coordinates in this chart");
  flow->add_option("--s-range", range, "s0:s1");
  flow->add_option("--rows", rows, "number of rows");
  flow->add_option("--h", step, "RK4 step")->check(CLI::PositiveNumber);
  flow->add_option("--emit", emit, "CSV destination (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  auto was_set = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  CLI::App* active = app.get_subcommands().front();
  try {
    apply_config_file(cfg, was_set(active, "--model"), was_set(active, "--a0"), was_set(active, "--seed"),
                      was_set(active, "--samples"), was_set(active, "--out"));
    if (active == describe) return cmd_describe(cfg, as_json, !cfg.a0.empty(), out);
    if (active == decompose_cmd) return cmd_decompose(cfg, out, err);
    if (active == verify) return cmd_verify(cfg, suite, out, err);
    return cmd_flow(cfg, start, chart, range, rows, step, emit, out);
  } catch (const ModelError& e) {
    err << "invalid model: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InputError& e) {
    err << e.what() << '\n';
    return kExitInputError;
  } catch (const UnsupportedError& e) {
    err << e.what() << '\n';
    return kExitInputError;
  } catch (const GenericityError& e) {
    err << e.what() << '\n';
    return kExitNotGeneric;
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace torusflow::cli
