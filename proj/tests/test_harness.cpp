#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "neass/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <sys/wait.h>

using namespace neass;

namespace {

const char* kChain = R"(
[lattice]
dimension = 1
radius = 2
boundary = open

[h0]
hopping 1 = -1
onsite.staggered = 1

[perturbation]
potential = linear 0.5
switching = ramp 0 1 0 1

[observables]
n0 = density 0
j01 = current 0 1

[experiment]
order = 1
eps = 0.05, 0.025
eta = 0.05
t0 = 0
t = 1
)";

ExperimentSetup setup_from(const std::string& text) { return load_setup(Config::parse(text, "test.cfg")); }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string config_error(const std::string& text) {
  try {
    setup_from(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse("# c\n[a]\nx = 1.5\ny 2 3 = 4, 5\n\n[b]\nz = hello world\n", "t");
  REQUIRE(c.sections().size() == 2);
  CHECK(c.get_double("a", "x", 0.0) == 1.5);
  CHECK(c.get_doubles("a", "y", {}) == std::vector<double>{4.0, 5.0});
  CHECK(c.section("a")->find("y")->args == std::vector<std::string>{"2", "3"});
  CHECK(c.get_string("b", "z", "") == "hello world");
  CHECK(c.get_int("b", "missing", 7) == 7);
  CHECK(c.canonical() == "[a]\nx=1.5\ny 2 3=4,5\n[b]\nz=helloworld\n");

  CHECK(parse_complex("1.5-2i") == cplx(1.5, -2.0));
  CHECK(parse_complex("-i") == cplx(0.0, -1.0));
  CHECK(parse_complex("3") == cplx(3.0, 0.0));
  CHECK_FALSE(parse_complex("x").has_value());
  const auto m = parse_matrix("0,1i;-1i,0");
  REQUIRE(m.has_value());
  CHECK((*m)(0, 1) == cplx(0.0, 1.0));
  CHECK((*m)(1, 0) == cplx(0.0, -1.0));
}

TEST_CASE("config errors carry positions") {
  CHECK(config_error("[lattice]\nradius = two\n").find("test.cfg:2:") != std::string::npos);
  CHECK(config_error("[lattice]\nradius = 2\nbogus = 1\n").find("test.cfg:3:") != std::string::npos);
  CHECK(config_error("key = 1\n").find("test.cfg:1:") != std::string::npos);
  CHECK(config_error("[lattice]\n[h0]\nhopping 1 = 1,2\n").find("test.cfg:3:") != std::string::npos);
  CHECK(config_error(std::string(kChain) + "axis = sideways\n").find("axis") != std::string::npos);
  CHECK(config_error("[lattice]\nradius = 1\n[h0]\nhopping 1 = -1\n[experiment]\neta = 0\n").find("test.cfg:6:") !=
        std::string::npos);
  CHECK_FALSE(config_error("[lattice]\nradius = 1\n[h0]\n[h0.x]\nonsite = 1\n").empty());
}

TEST_CASE("setup contents") {
  const ExperimentSetup s = setup_from(kChain);
  CHECK(s.radius == 2);
  CHECK(s.family.boundary == Boundary::Open);
  CHECK(s.perturbation.kind == "linear");
  REQUIRE(s.observables.size() == 2);
  CHECK(s.observables[1].kind == "current");
  CHECK(s.params.eps == std::vector<double>{0.05, 0.025});
  CHECK(s.params.k_list == std::vector<int>{2});
}

TEST_CASE("CSV rendering") {
  Table t;
  t.name = "x";
  t.columns = {"a", "b,c", "d"};
  t.add_row({std::string("plain"), 0.1, std::int64_t{3}});
  t.add_row({std::string("has \"quote\", comma"), 1.0 / 3.0, std::int64_t{-4}});
  const std::string out = render_csv(t, {1, 0x1234});
  CHECK(out ==
        "#schema_version=1,metadata_hash=0000000000001234\r\n"
        "a,\"b,c\",d\r\n"
        "plain,0.10000000000000001,3\r\n"
        "\"has \"\"quote\"\", comma\",0.33333333333333331,-4\r\n");
  CHECK_THROWS_AS(t.add_row({std::string("short")}), Error);

  const auto dir = std::filesystem::temp_directory_path() / "neass_csv_test";
  std::filesystem::create_directories(dir);
  const std::string empty_path = (dir / "empty.csv").string();
  std::filesystem::remove(empty_path);
  Table empty;
  empty.name = "empty";
  empty.columns = {"a"};
  CHECK_THROWS_AS(export_csv(empty, empty_path, {}), Error);
  CHECK_FALSE(std::filesystem::exists(empty_path));
  CHECK_THROWS_AS(export_csv(t, (dir / "missing" / "x.csv").string(), {}), Error);

  std::vector<DefectRecord> one(1);
  one[0].observable = "n0";
  one[0].defect = 1e-5;
  const std::string p1 = (dir / "one.csv").string();
  export_csv(defect_table(one), p1, {});
  const std::string text = read_file(p1);
  std::size_t lines = 0;
  for (std::size_t i = text.find("\r\n"); i != std::string::npos; i = text.find("\r\n", i + 2)) ++lines;
  CHECK(lines == 3);  // metadata, header, one record

  CHECK(metadata_hash("abc", 1) != metadata_hash("abc", 2));
  CHECK(metadata_hash("abc", 1) == metadata_hash("abc", 1));
}

TEST_CASE("log-log slope fits") {
  std::vector<double> x, y, yn, yc;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (double v = 1e-2; v <= 1.0001; v *= std::pow(10.0, 0.25)) {
    x.push_back(v);
    y.push_back(v * v);
    yn.push_back(v * v + 1e-14 * g(rng));
    yc.push_back(0.3);
  }
  CHECK(fit_loglog_slope(x, y).slope == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(fit_loglog_slope(x, yn).slope - 2.0) <= 0.05);
  CHECK(std::abs(fit_loglog_slope(x, yc).slope) <= 1e-12);

  try {
    fit_loglog_slope({1.0, 2.0, 3.0, 4.0}, {1.0, 4.0, 9.0, 16.0});
    FAIL("expected DynamicRangeTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DynamicRangeTooSmall);
  }
  try {
    fit_loglog_slope({1e-3, 1e-2, 1e-1, 1.0}, {1e-18, 1e-17, 1e-2, 1.0});
    FAIL("expected FloorContamination");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FloorContamination);
  }
}

TEST_CASE("defect sweep: static model without perturbation has no defect") {
  std::string text = kChain;
  text.replace(text.find("potential = linear 0.5\nswitching = ramp 0 1 0 1\n"),
               std::string("potential = linear 0.5\nswitching = ramp 0 1 0 1\n").size(), "");
  const ExperimentSetup s = setup_from(text);
  const auto records = run_defect_sweep(s, 1, 1);
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    CHECK(r.error.empty());
    CHECK(r.defect <= 1e-9);
    CHECK(r.unitarity_defect <= 1e-8);
  }
}

TEST_CASE("defect sweep records regime flags and support") {
  const ExperimentSetup s = setup_from(kChain);
  const auto records = run_defect_sweep(s, 1, 1);
  REQUIRE(records.size() == 4);
  CHECK(records[0].support == 1);
  CHECK(records[1].support == 2);
  CHECK_FALSE(records[0].eps_dominated);  // eps = eta
  CHECK_FALSE(records[0].eta_dominated);
  for (const auto& r : records) CHECK(r.defect > 0.0);
  const Table t = defect_table(records);
  CHECK(t.rows.size() == 4);
}

TEST_CASE("lifetime trivial limits") {
  std::string text = kChain;
  text.replace(text.find("switching = ramp 0 1 0 1"), std::string("switching = ramp 0 1 0 1").size(),
               "switching = constant 1");
  ExperimentSetup s = setup_from(text);
  s.params.orders = {2};
  s.params.s_grid = {0.0, 1.0, 2.0};
  s.params.eps = {0.0, 0.01};
  const auto records = lifetime_experiment(s, 1, 1);
  for (const auto& r : records) {
    if (r.eps == 0.0 || r.s == 0.0) CHECK(r.drift <= 1e-12);
    else CHECK(r.drift > 0.0);
  }
}

TEST_CASE("thermodynamic-limit table") {
  SUBCASE("largest k is the reference") {
    std::string text = kChain;
    text += "k_list = 1, 2\n";
    const ExperimentSetup s = setup_from(text);
    const auto rows = tdl_convergence_experiment(s, 1, 1);
    for (const auto& r : rows)
      if (r.k == 2) CHECK(r.difference == 0.0);
    CHECK(tdl_table(rows).rows.size() == rows.size());
  }
  SUBCASE("atomic limit is k-independent") {
    const ExperimentSetup s = setup_from(R"(
[lattice]
radius = 3
boundary = open
[h0]
onsite = 1
chemical_potential = 0.5
[observables]
n0 = density 0
[experiment]
k_list = 1, 2, 3
eps = 0.05
eta = 0.05
t = 1
)");
    const auto rows = tdl_convergence_experiment(s, 1, 1);
    for (const auto& r : rows) CHECK(r.difference <= 1e-12);
    CHECK(tdl_monotone(rows));
  }
}

TEST_CASE("model check and norms on a small chain") {
  std::string text = kChain;
  text += "k_list = 1, 2\nt_grid = 0, 0.5, 1\ngap_threshold = 0.1\ninterior_l = 0\n";
  const ExperimentSetup s = setup_from(text);
  const ModelCheck mc = model_check(s, 1);
  CHECK(mc.gaps.rows.size() == 6);
  CHECK(mc.uniform_gap);
  CHECK(mc.pass);
  const Table n = norms_table(s);
  CHECK_FALSE(n.rows.empty());
}

#ifdef NEASS_LAB_PATH
TEST_CASE("command line exit codes") {
  const auto dir = std::filesystem::temp_directory_path() / "neass_cli_test";
  std::filesystem::create_directories(dir);
  const std::string cfg = (dir / "chain.cfg").string();
  {
    std::ofstream f(cfg);
    f << kChain << "k_list = 1, 2\n";
  }
  const std::string lab = NEASS_LAB_PATH;
  const std::string out = " --out " + (dir / "out").string() + " > /dev/null 2>&1";
  auto code = [](const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(code(lab + " norms --config " + cfg + out) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "norms.csv"));
  CHECK(code(lab + " model check --config " + cfg + out) == 0);
  CHECK(code(lab + " norms --config " + (dir / "nope.cfg").string() + out) == 1);
  CHECK(code(lab + " frobnicate" + out) == 1);

  const std::string broken = (dir / "broken.cfg").string();
  {
    std::ofstream f(broken);
    f << "[lattice]\nradius = x\n";
  }
  CHECK(code(lab + " norms --config " + broken + out) == 1);

  // a gapless atomic chain fails the gap acceptance
  const std::string gapless = (dir / "gapless.cfg").string();
  {
    std::ofstream f(gapless);
    f << "[lattice]\nradius = 1\nboundary = open\n[h0]\nonsite = 0.01\n[experiment]\ngap_threshold = 0.5\n";
  }
  CHECK(code(lab + " model check --config " + gapless + out) == 2);
}
#endif
