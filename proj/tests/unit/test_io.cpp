#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "motility/io/config.hpp"
#include "motility/io/csv.hpp"
#include "motility/io/experiment.hpp"

using namespace motility;
using namespace motility::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("motility-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunOptions into(const fs::path& dir, unsigned threads = 1) {
  RunOptions o;
  o.output_dir = dir;
  o.threads = threads;
  return o;
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("config grammar: comments, sections, dotted keys") {
  const auto c = Config::parse(
      "# header comment\n"
      "beta = 150   # trailing\n"
      "\n"
      "[schedule]\n"
      "knots = 0:-2.25, 1:-1\n"
      "[]\n"
      "roots.v_scan = 20\n"
      "name = two words\n");
  CHECK(c.find("beta") == "150");
  CHECK(c.find("schedule.knots") == "0:-2.25, 1:-1");
  CHECK(c.find("roots.v_scan") == "20");
  CHECK(c.find("name") == "two words");
  CHECK_FALSE(c.has("knots"));
  CHECK(c.render() == "beta = 150\nname = two words\nroots.v_scan = 20\nschedule.knots = 0:-2.25, 1:-1\n");
  CHECK(Config::parse(c.render()).render() == c.render());
}

TEST_CASE("config grammar errors are all listed with line numbers") {
  try {
    Config::parse("a = 1\nno equals sign\n[bad\na = 2\nb c = 3\n", "x.cfg");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    REQUIRE(e.problems().size() == 4);
    CHECK(e.problems()[0] == "x.cfg:2: expected key = value");
    CHECK(e.problems()[1] == "x.cfg:3: unterminated section header");
    CHECK(e.problems()[2] == "x.cfg:4: duplicate key 'a'");
    CHECK(e.problems()[3] == "x.cfg:5: bad key 'b c'");
    CHECK(std::string(e.what()).find("x.cfg:5") != std::string::npos);
  }
}

TEST_CASE("parameter reader: typed values, defaults, unknown keys") {
  const auto c = Config::parse("beta = 150\nn = 12\nflag = true\nlist = 1, 2.5,-3\nknots = 0:1, 2:3\ntypo = 1\n");
  ParamReader r(c);
  CHECK(r.real("beta", 0.0) == 150.0);
  CHECK(r.integer("n", 0) == 12);
  CHECK(r.boolean("flag", false));
  CHECK(r.reals("list", {}) == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(r.pairs("knots", {}) == std::vector<std::pair<double, double>>{{0.0, 1.0}, {2.0, 3.0}});
  CHECK(r.real("missing", 0.25) == 0.25);
  CHECK(r.resolved().find("missing") == "0.25");
  CHECK_THROWS_WITH_AS(r.finish(), doctest::Contains("typo: unknown key"), ConfigError);

  const auto bad = Config::parse("beta = fast\nn = 1.5\nmode = sideways\n");
  ParamReader b(bad);
  b.real("beta", 0.0);
  b.integer("n", 0);
  b.choice("mode", "up", {"up", "down"});
  try {
    b.finish();
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 3);
  }
}

TEST_CASE("real formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.25, 1e-300, 6.02214076e23, 14.634448520766425}) {
    const auto s = format_real(x);
    CHECK(std::stod(s) == x);
    CHECK(std::stod(format_csv_real(x)) == x);
  }
  CHECK(format_real(150.0) == "150");
  CHECK_THROWS_AS(format_csv_real(std::numeric_limits<double>::quiet_NaN()), SchemaError);
}

TEST_CASE("csv schemas: headers, validation, round trip") {
  CHECK(schema("hysteresis").header() == "t,F,V,branch,jump_flag");
  CHECK(schema("roots").header() == "F,V,stable");
  CHECK(schema("curve").header() == "t,node,x,y,V,kappa,lambda");
  CHECK_THROWS_AS(schema("nope"), std::invalid_argument);

  const auto dir = scratch("csv");
  write_csv(dir / "empty.csv", "jumps", {});
  CHECK(slurp(dir / "empty.csv") == "t,F,V_before,V_after\n");

  CHECK_THROWS_AS(write_csv(dir / "bad.csv", "roots", {{1.0, 2.0}}), SchemaError);
  CHECK_THROWS_AS(write_csv(dir / "bad.csv", "roots", {{1.0, 2.0, 1.0}}), SchemaError);
  CHECK_THROWS_AS(write_csv(dir / "bad.csv", "roots", {{1.0, std::numeric_limits<double>::infinity(), std::int64_t{1}}}),
                  SchemaError);
  CHECK_FALSE(fs::exists(dir / "bad.csv"));

  const double third = 1.0 / 3.0;
  write_csv(dir / "roots.csv", "roots", {{-2.25, third, std::int64_t{1}}, {-2.25, -1e-17, std::int64_t{0}}});
  const auto t = read_csv(dir / "roots.csv", "roots");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == third);
  CHECK(t.rows[1][1] == -1e-17);
  CHECK(t.column("stable") == std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(read_csv(dir / "roots.csv", "jumps"), SchemaError);
}

TEST_CASE("field snapshot round trip") {
  auto s = make_state_2d(5, 3, 0.01, 0.04, 10.0);
  s.t = 0.125;
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    s.rho[k] = std::sin(1.0 + k);
    s.Px[k] = -1.0 / (k + 1.0);
    s.Py[k] = k * 1e-7;
  }
  const auto dir = scratch("snap");
  write_field_snapshot(dir / "f.bin", s);
  const auto r = read_field_snapshot(dir / "f.bin");
  CHECK(r.nx == 5);
  CHECK(r.ny == 3);
  CHECK(r.dx == 0.01);
  CHECK(r.t == 0.125);
  CHECK(r.eps == 0.04);
  CHECK(r.beta == 10.0);
  CHECK(r.rho == s.rho);
  CHECK(r.Px == s.Px);
  CHECK(r.Py == s.Py);
  const auto bytes = slurp(dir / "f.bin");
  CHECK(bytes.rfind("motility-field2d 1\nnx 5\nny 3\n", 0) == 0);
  CHECK(bytes.size() == bytes.find("end\n") + 4 + 3 * 15 * 8);
  spit(dir / "cut.bin", bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS(read_field_snapshot(dir / "cut.bin"));
}

TEST_CASE("experiment run writes resolved config, csv and manifest") {
  const auto dir = scratch("hyst");
  const auto cfg = Config::parse("experiment = hysteresis\nhysteresis.samples_per_segment = 100\n");
  const auto rep = run_experiment(cfg, into(dir / "a"));
  for (const char* f : {"resolved.cfg", "hysteresis.csv", "jumps.csv", "folds.csv", "manifest.txt"})
    CHECK(fs::exists(dir / "a" / f));
  const auto h = read_csv(dir / "a" / "hysteresis.csv", "hysteresis");
  CHECK(h.rows.size() > 100);
  const auto resolved = Config::load(dir / "a" / "resolved.cfg");
  CHECK(resolved.find("beta") == "150");
  CHECK(resolved.find("hysteresis.samples_per_segment") == "100");
  const auto manifest = slurp(dir / "a" / "manifest.txt");
  CHECK(manifest.find("status = ok") != std::string::npos);
  CHECK(manifest.find("experiment = hysteresis") != std::string::npos);
  CHECK(rep.results.count("jumps") == 1);

  // same parameters, same bytes
  const auto again = run_experiment(cfg, into(dir / "b"));
  CHECK(again.parameter_hash == rep.parameter_hash);
  for (const char* f : {"resolved.cfg", "hysteresis.csv", "jumps.csv", "folds.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}

TEST_CASE("invalid experiment configs fail before writing anything") {
  const auto dir = scratch("bad");
  try {
    run_experiment(Config::parse("experiment = pde1d\neps = -1\nbeta = -3\nfrobnicate = 2\n"), into(dir / "x"));
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    CHECK(m.find("eps") != std::string::npos);
    CHECK(m.find("beta") != std::string::npos);
    CHECK(m.find("frobnicate: unknown key") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "x"));
  CHECK_THROWS_AS(run_experiment(Config::parse("experiment = kernel\nprofile.points = 1000\n"), into(dir / "y")),
                  ConfigError);
  CHECK_THROWS_AS(run_experiment(Config::parse("experiment = tw\n"), [&] {
                    auto o = into(dir / "z");
                    o.experiment = "kernel";
                    return o;
                  }()),
                  ConfigError);
  CHECK_THROWS_AS(run_experiment(Config::parse("experiment = warp\n"), into(dir / "w")), ConfigError);
}

TEST_CASE("sweep over a key fans out to one directory per value") {
  const auto dir = scratch("sweep");
  spit(dir / "base.cfg", "experiment = sil-roots\nroots.stability = monotone\nF = -2.25\n");
  spit(dir / "sweep.cfg", "experiment = sweep\nsweep.base = base.cfg\nsweep.key = beta\nsweep.values = 0, 150\n");
  const auto items = run_sweep(dir / "sweep.cfg", into(dir / "out", 2));
  REQUIRE(items.size() == 2);
  for (const auto& it : items) CHECK(it.ok);
  const auto zero = read_csv(dir / "out" / "beta-0" / "roots.csv", "roots");
  const auto fast = read_csv(dir / "out" / "beta-150" / "roots.csv", "roots");
  CHECK(zero.rows.size() == 1);
  CHECK(fast.rows.size() == 3);

  spit(dir / "bad.cfg", "experiment = sweep\nsweep.base = base.cfg\nsweep.key = beta\nsweep.values = -1\n");
  const auto failed = run_sweep(dir / "bad.cfg", into(dir / "out2"));
  REQUIRE(failed.size() == 1);
  CHECK_FALSE(failed[0].ok);
  CHECK(failed[0].error.find("beta") != std::string::npos);
}
