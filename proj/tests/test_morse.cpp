#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/morse.hpp"

using namespace torusflow;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

const GeneratorVector kA0{q(1, 3), q(1, 7)};

}  // namespace

TEST_CASE("hyperbolicity verdicts") {
  const ProjectiveModel cp2(2);
  const auto ok = verify_hyperbolic(cp2, kA0);
  CHECK(ok.pass);
  REQUIRE(ok.details["exponents"].size() == 3);
  std::vector<std::string> values;
  for (const auto& row : ok.details["exponents"])
    for (const auto& e : row["exponents"]) values.push_back(e["value"]);
  std::sort(values.begin(), values.end());
  CHECK(values == std::vector<std::string>{"-1/3", "-1/7", "-4/21", "1/3", "1/7", "4/21"});

  const auto bad = verify_hyperbolic(cp2, GeneratorVector{q(1, 3), q(1, 3)});
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.witnesses.size() == 2);
  CHECK(bad.witnesses[0]["fixed_point"] == "[0:1:0]");
  CHECK(bad.witnesses[0]["weight"] == nlohmann::json::array({-1, 1}));

  CHECK(verify_hyperbolic(ToricModel(fans::hirzebruch(1)), kA0).pass);
}

TEST_CASE("unstable dimensions") {
  const ProjectiveModel cp2(2);
  const FlowSystem sys(cp2, kA0);
  const auto recs = sys.fixed_point_records();
  CHECK(unstable_dim(recs[0]) == 0);
  CHECK(unstable_dim(recs[1]) == 4);
  CHECK(unstable_dim(recs[2]) == 2);
  const auto flat = FlowSystem(cp2, GeneratorVector{q(1, 3), q(1, 3)}).fixed_point_records();
  CHECK_THROWS_AS(unstable_dim(flat[1]), GenericityError);
  CHECK_NOTHROW(unstable_dim(flat[0]));
}

TEST_CASE("Poincare polynomials") {
  for (int n = 1; n <= 3; ++n) {
    const ProjectiveModel cp(n);
    std::vector<Rational> a{q(1, 3), q(1, 7), q(1, 11)};
    a.resize(n);
    const FlowSystem sys(cp, GeneratorVector(a));
    std::vector<std::int64_t> expected(2 * n + 1, 0);
    for (int k = 0; k <= n; ++k) expected[2 * k] = 1;
    CHECK(poincare_polynomial(sys) == expected);
    CHECK(euler_characteristic(sys) == n + 1);
  }
  for (int a : {1, 2, 3}) {
    const ToricModel f(fans::hirzebruch(a));
    const FlowSystem sys(f, kA0);
    const auto p = poincare_polynomial(sys);
    CHECK(p == std::vector<std::int64_t>{1, 0, 2, 0, 1});
    // h-vector from the face numbers, counted independently of the library
    const auto h = oracle::h_from_faces(cone_counts(f.fan()));
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(p[2 * k] == h[k]);
    CHECK(euler_characteristic(sys) == 4);
  }
  CHECK_THROWS_AS(poincare_polynomial(FlowSystem(ProjectiveModel(2), GeneratorVector{q(1, 3), q(1, 3)})),
                  GenericityError);
}

TEST_CASE("index duality under a0 -> -a0") {
  const ProjectiveModel cp3(3);
  const ToricModel f1(fans::hirzebruch(1));
  for (const WeightChartModel* model : {static_cast<const WeightChartModel*>(&cp3), static_cast<const WeightChartModel*>(&f1)}) {
    std::vector<Rational> a{q(1, 3), q(1, 7), q(1, 11)};
    a.resize(model->torus_rank());
    const GeneratorVector a0(a);
    const auto plus = FlowSystem(*model, a0).fixed_point_records();
    const auto minus = FlowSystem(*model, -a0).fixed_point_records();
    for (std::size_t i = 0; i < plus.size(); ++i)
      CHECK(unstable_dim(plus[i]) + unstable_dim(minus[i]) == 2 * model->complex_dim());
  }
}

TEST_CASE("convergence condition") {
  const ProjectiveModel cp2(2);
  const FlowSystem sys(cp2, kA0);
  const auto v = verify_convergence_condition(sys, 2000, 1);
  CHECK(v.pass);
  CHECK(v.details["mixed_points_checked"].get<int>() > 0);
  CHECK(verify_convergence_condition(FlowSystem(ToricModel(fans::hirzebruch(1)), kA0), 2000, 1).pass);
  CHECK_THROWS_AS(verify_convergence_condition(FlowSystem(cp2, GeneratorVector{q(1, 3), q(1, 3)}), 10, 1),
                  GenericityError);
}

TEST_CASE("basins") {
  SUBCASE("CP^1") {
    const ProjectiveModel cp1(1);
    const FlowSystem sys(cp1, GeneratorVector{q(1)});
    const auto samples = draw_samples(cp1, 2000, 5, Sampling::stratified);
    const auto b = basin_classify(sys, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto z = cp1.from_chart(samples[i]).coords;
      CHECK(b.forward[i] == (z[0] != 0.0 ? 0 : 1));
    }
    CHECK(b.basin_counts[0] + b.basin_counts[1] == 2000);
    CHECK(b.basin_counts[1] > 0);
    CHECK(b.analytic_checked == 2000);
    CHECK(b.analytic_agreed == 2000);
  }
  SUBCASE("CP^2 generic samples") {
    const ProjectiveModel cp2(2);
    const FlowSystem sys(cp2, kA0);
    const auto b = basin_classify(sys, draw_samples(cp2, 1000, 6, Sampling::generic));
    CHECK(b.basin_counts == std::vector<std::int64_t>{1000, 0, 0});
    CHECK(b.co_basin_counts == std::vector<std::int64_t>{0, 1000, 0});
  }
  SUBCASE("CP^2 restricted to z_0 = 0") {
    const ProjectiveModel cp2(2);
    const FlowSystem sys(cp2, kA0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<ChartPoint> line;
    for (int i = 0; i < 500; ++i) {
      Coords z{0.0, Complex(g(rng), g(rng)), Complex(g(rng), g(rng))};
      if (i % 10 == 0) z[2] = 0.0;
      line.push_back(cp2.to_chart_point(ProjectiveModel::normalize(z)));
    }
    const auto b = basin_classify(sys, line);
    CHECK(b.basin_counts[0] == 0);
    CHECK(b.basin_counts[1] == 50);
    CHECK(b.basin_counts[2] == 450);
  }
}

TEST_CASE("connection posets") {
  const ProjectiveModel cp1(1);
  const auto p1 = connection_poset(FlowSystem(cp1, GeneratorVector{q(1)}), 4, 1);
  REQUIRE(p1.edges.size() == 1);
  CHECK(p1.edges[0].source == 1);
  CHECK(p1.edges[0].target == 0);

  const ProjectiveModel cp2(2);
  const FlowSystem sys(cp2, kA0);
  const auto p2 = connection_poset(sys, 8, 1);
  std::set<std::pair<int, int>> edges;
  for (const auto& e : p2.edges) edges.insert({e.source, e.target});
  CHECK(edges == std::set<std::pair<int, int>>{{1, 0}, {1, 2}, {2, 0}});
  CHECK(p2.inconclusive.empty());
  CHECK(p2.seed_radius == 1e-4);
  CHECK(p2.max_time == doctest::Approx(200.0 / (2 * M_PI / 7)));

  const auto recs = sys.fixed_point_records();
  for (const auto& e : p2.edges) {
    CHECK(recs[e.source].unstable_dim > recs[e.target].unstable_dim);
    CHECK(e.source != 0);  // the attractor has no outgoing edges
  }

  const ToricModel f1(fans::hirzebruch(1));
  const FlowSystem tsys(f1, kA0);
  const auto trecs = tsys.fixed_point_records();
  for (const auto& e : connection_poset(tsys, 8, 2).edges) CHECK(trecs[e.source].unstable_dim > trecs[e.target].unstable_dim);
}

TEST_CASE("decomposition report") {
  const ProjectiveModel cp2(2);
  const FlowSystem sys(cp2, kA0);
  DecomposeOptions opts;
  opts.samples = 3000;
  const auto rep = decompose(sys, opts);
  CHECK(rep.all_pass());
  CHECK(rep.poincare == std::vector<std::int64_t>{1, 0, 1, 0, 1});
  CHECK(rep.euler == 3);
  std::int64_t total = 0, co_total = 0;
  for (auto c : rep.basin_counts) total += c;
  for (auto c : rep.co_basin_counts) co_total += c;
  CHECK(total == 3000);
  CHECK(co_total == 3000);
  std::vector<std::string> names;
  for (const auto& [name, v] : rep.verdicts) names.push_back(name);
  CHECK(names == std::vector<std::string>{"hyperbolic", "basin_partition", "poincare_consistency", "index_duality",
                                          "poset_monotone", "convergence"});

  const ToricModel f1(fans::hirzebruch(1));
  const auto trep = decompose(FlowSystem(f1, kA0), opts);
  CHECK(trep.all_pass());
  CHECK(trep.poincare == std::vector<std::int64_t>{1, 0, 2, 0, 1});
}
