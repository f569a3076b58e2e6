#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using torusflow::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& tag) {
  std::random_device rd;
  const fs::path dir = fs::temp_directory_path() / ("torusflow_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("describe") {
  const auto cp2 = cli({"describe", "--model", "cp2"});
  CHECK(cp2.code == 0);
  CHECK(cp2.out.find("fixed points: 3") != std::string::npos);
  CHECK(cp2.out.find("[0:1:0]") != std::string::npos);
  CHECK(cp2.out.find("(-1,1)") != std::string::npos);

  const auto dir = scratch("describe");
  const auto f1 = write(dir / "f1.json",
                        R"({"rank": 2, "rays": [[1,0],[0,1],[-1,1],[0,-1]], "maximal_cones": [[0,1],[1,2],[2,3],[3,0]]})");
  const auto r = cli({"describe", "--model", f1.string(), "--json"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["fixed_points"].size() == 4);

  const auto bad = write(dir / "bad.json", R"({"rank": 2, "rays": [[2,0],[0,1]], "maximal_cones": [[0,1]]})");
  const auto b = cli({"describe", "--model", bad.string()});
  CHECK(b.code == 2);
  CHECK(b.err.find("smoothness") != std::string::npos);

  CHECK(cli({"describe", "--model", "nonsense"}).code == 2);
  CHECK(cli({"describe", "--model", (dir / "missing.json").string()}).code == 2);
  CHECK(cli({"describe", "--model", "cp2", "--a0", "1/3"}).code == 2);
  CHECK(cli({"describe", "--model", "s4"}).code == 0);
  CHECK(cli({}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("decompose") {
  const auto dir = scratch("decompose");
  const auto r = cli({"decompose", "--model", "cp2", "--a0", "1/3,1/7", "--samples", "2000", "--out", (dir / "a").string()});
  CHECK(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["poincare"] == nlohmann::json::array({1, 0, 1, 0, 1}));
  CHECK(report["pass"] == true);
  CHECK(report["sign_convention"].get<std::string>().find("a_i > 0") != std::string::npos);
  CHECK(report["tolerances"].contains("limit_tolerance"));
  CHECK(slurp(dir / "a" / "poset.dot").find("p1 -> p0") != std::string::npos);
  CHECK(slurp(dir / "a" / "basins.csv").rfind("sample,forward,backward\n", 0) == 0);

  SUBCASE("identical seeds give byte-identical reports") {
    CHECK(cli({"decompose", "--model", "cp2", "--samples", "2000", "--seed", "9", "--out", (dir / "b").string()}).code == 0);
    CHECK(cli({"decompose", "--model", "cp2", "--samples", "2000", "--seed", "9", "--out", (dir / "c").string()}).code == 0);
    CHECK(slurp(dir / "b" / "report.json") == slurp(dir / "c" / "report.json"));
    CHECK(slurp(dir / "b" / "basins.csv") == slurp(dir / "c" / "basins.csv"));
    CHECK(slurp(dir / "b" / "report.json") != slurp(dir / "a" / "report.json"));
  }

  SUBCASE("non-generic generator") {
    const auto bad = cli({"decompose", "--model", "cp2", "--a0", "1/3,1/3", "--out", (dir / "d").string()});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("(-1,1)") != std::string::npos);
  }

  SUBCASE("toric") {
    CHECK(cli({"decompose", "--model", "fan:hirzebruch1", "--samples", "1000", "--out", (dir / "e").string()}).code == 0);
    const auto rep = nlohmann::json::parse(slurp(dir / "e" / "report.json"));
    CHECK(rep["poincare"] == nlohmann::json::array({1, 0, 2, 0, 1}));
  }

  SUBCASE("config file overrides") {
    const auto cfg = write(dir / "cfg.json", R"({"model": "cp1", "a0": ["1"], "samples": 500, "seed": 4,
                                                 "tolerances": {"seed_radius": 0.001}})");
    CHECK(cli({"decompose", "--config", cfg.string(), "--out", (dir / "f").string()}).code == 0);
    const auto rep = nlohmann::json::parse(slurp(dir / "f" / "report.json"));
    CHECK(rep["model"] == "CP^1");
    CHECK(rep["samples"] == 500);
    CHECK(rep["tolerances"]["seed_radius"] == 0.001);
  }

  CHECK(cli({"decompose", "--model", "s2"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("verify") {
  const auto dir = scratch("verify");
  const auto all = cli({"verify", "all", "--model", "cp1", "--samples", "2000", "--out", dir.string()});
  CHECK(all.code == 0);
  const auto verdicts = nlohmann::json::parse(slurp(dir / "verdicts.json"));
  CHECK(verdicts["pass"] == true);
  for (const char* suite : {"covering", "equivariance", "hyperbolic", "convergence", "decay"}) {
    CAPTURE(suite);
    CHECK(verdicts["suites"][suite]["pass"] == true);
    CHECK(verdicts["suites"][suite].contains("max_violation"));
    CHECK(verdicts["suites"][suite]["witnesses"].is_array());
  }
  CHECK(fs::exists(dir / "decay.csv"));

  CHECK(cli({"verify", "covering", "--model", "s4", "--out", dir.string()}).code == 0);
  CHECK(cli({"verify", "equivariance", "--model", "s2", "--out", dir.string()}).code == 0);

  const auto hyp = cli({"verify", "hyperbolic", "--model", "cp2", "--a0", "1/3,1/3", "--out", dir.string()});
  CHECK(hyp.code == 1);
  const auto hv = nlohmann::json::parse(slurp(dir / "verdicts.json"));
  CHECK(hv["suites"]["hyperbolic"]["witnesses"].size() == 2);

  const auto conv = cli({"verify", "convergence", "--model", "cp2", "--a0", "1/3,1/3", "--out", dir.string()});
  CHECK(conv.code == 1);

  CHECK(cli({"verify", "everything", "--model", "cp2", "--out", dir.string()}).code == 2);
  CHECK(cli({"verify", "decay", "--model", "s2", "--out", dir.string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("flow") {
  const auto dir = scratch("flow");
  const auto r = cli({"flow", "--model", "cp1", "--a0", "1", "--start", "1,1", "--s-range", "0:3", "--rows", "31",
                      "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 31);
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // s, chart, x, y, rk4 chart, rk4 x, rk4 y, deviation
    REQUIRE(rows[i].size() == 8);
    CHECK(rows[i][1] == 0.0);
    if (i > 0) CHECK(std::hypot(rows[i][2], rows[i][3]) < std::hypot(rows[i - 1][2], rows[i - 1][3]));
    worst = std::max(worst, rows[i][7]);
  }
  CHECK(worst < 1e-6);
  const auto limits = nlohmann::json::parse(slurp(dir / "limits.json"));
  CHECK(limits[0]["label"] == "[1:0]");
  CHECK(limits[1]["label"] == "[0:1]");

  const auto fixed = cli({"flow", "--model", "cp2", "--start", "0,1,0", "--s-range", "-2:2", "--rows", "5",
                          "--out", dir.string()});
  REQUIRE(fixed.code == 0);
  for (const auto& row : csv_rows(fixed.out))
    for (std::size_t k = 2; k < row.size(); ++k)
      if (k != 6) CHECK(row[k] == 0.0);

  const auto emitted = dir / "traj.csv";
  CHECK(cli({"flow", "--model", "fan:cp2", "--chart", "1", "--start", "0.5+0.5i,-2", "--emit", emitted.string(),
             "--out", dir.string()})
            .code == 0);
  CHECK(csv_rows(slurp(emitted)).size() == 11);

  CHECK(cli({"flow", "--model", "cp2", "--start", "0,0,0", "--out", dir.string()}).code == 2);
  CHECK(cli({"flow", "--model", "cp2", "--start", "1,abc,0", "--out", dir.string()}).code == 2);
  CHECK(cli({"flow", "--model", "cp2", "--start", "1,1", "--out", dir.string()}).code == 2);
  CHECK(cli({"flow", "--model", "s2", "--start", "0,0", "--out", dir.string()}).code == 2);
  fs::remove_all(dir);
}
