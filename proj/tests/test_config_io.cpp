#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anisoflow/app.hpp"
#include "anisoflow/config.hpp"
#include "anisoflow/io.hpp"

using namespace anisoflow;
namespace fs = std::filesystem;

namespace {

Ini ini_from(const std::string& text) {
  std::istringstream in(text);
  return parse_ini(in, "test.ini");
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("anisoflow_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Config, Defaults) {
  const auto c = load_experiment(ini_from(""));
  EXPECT_EQ(c.params.n, 2);
  EXPECT_EQ(c.grid_kind, GridKind::axisym_polar);
  EXPECT_EQ(c.m, 128);
  EXPECT_EQ(c.mode, FlowMode::normalized);
  EXPECT_EQ(c.initial.shape, InitialShape::ellipsoid);
}

TEST(Config, ParsesSections) {
  const auto c = load_experiment(ini_from(
      "# comment\n[flow]\nn = 1\nk = 1 ; trailing\nalpha = 2.5\nbeta=0.5\nmode = unnormalized\n"
      "[grid]\nm = 64\n[initial]\nshape = sphere\nradius = 2\n[stepper]\ncfl = 0.1\nscheme = euler\n"
      "[output]\nformats = json\ndirectory = somewhere\n"));
  EXPECT_EQ(c.params.n, 1);
  EXPECT_EQ(c.params.alpha, 2.5);
  EXPECT_EQ(c.params.beta, 0.5);
  EXPECT_EQ(c.mode, FlowMode::unnormalized);
  EXPECT_EQ(c.grid_kind, GridKind::periodic_circle);
  EXPECT_EQ(c.m, 64);
  EXPECT_EQ(c.initial.shape, InitialShape::sphere);
  EXPECT_EQ(c.stepper.cfl, 0.1);
  EXPECT_EQ(c.stepper.scheme, Scheme::euler);
  EXPECT_FALSE(c.output.csv);
  EXPECT_TRUE(c.output.json);
  EXPECT_EQ(c.output.directory, "somewhere");
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  try {
    load_experiment(ini_from("[flow]\nn = 2\nalpah = 3\n"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line, 3);
    EXPECT_EQ(e.key, "flow.alpah");
    EXPECT_NE(std::string(e.what()).find("test.ini:3:"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("flow.alpah"), std::string::npos);
  }
}

TEST(Config, BadValuesAreAnchored) {
  auto line_of = [](const std::string& text) {
    try {
      load_experiment(ini_from(text));
    } catch (const ConfigError& e) {
      return e.line;
    }
    return -1;
  };
  EXPECT_EQ(line_of("[flow]\nalpha = three\n"), 2);
  EXPECT_EQ(line_of("[flow]\nn = 2\nk = 3\n"), 2);
  EXPECT_EQ(line_of("[flow]\nn = 1\n[grid]\nkind = axisym-polar\n"), 4);
  EXPECT_EQ(line_of("[grid]\nm = 4\n"), 2);
  EXPECT_EQ(line_of("[initial]\naspect = 1\n"), 2);
  EXPECT_EQ(line_of("[stepper]\n\ncfl = 2\n"), 3);
  EXPECT_EQ(line_of("[flow]\nn = 2\nn = 3\n"), 3);
  EXPECT_EQ(line_of("[flow\n"), 1);
  EXPECT_EQ(line_of("just words\n"), 1);
  EXPECT_EQ(line_of("[initial]\nshape = file\n"), 2);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_experiment(std::string("/nonexistent/x.ini")), ConfigError); }

TEST(Sweep, CellsAreDeduplicatedInOrder) {
  const auto [base, ax] = load_sweep(ini_from("[sweep]\nalpha = 3, 2, 3\nk = 1, 1\n"));
  const auto cells = sweep_cells(ax);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].alpha, 3.0);
  EXPECT_EQ(cells[1].alpha, 2.0);
  EXPECT_EQ(cells[0].beta, base.params.beta);
  EXPECT_EQ(cells[0].aspect, base.initial.aspect);
}

TEST(Sweep, CartesianProduct) {
  const auto [base, ax] = load_sweep(ini_from("[sweep]\nalpha = 2, 3\nbeta = 1, 2\naspect = 1.2, 1.4, 1.6\n"));
  EXPECT_EQ(sweep_cells(ax).size(), 12u);
}

TEST(Sweep, Errors) {
  EXPECT_THROW(load_sweep(ini_from("[sweep]\nalpha =\n")), ConfigError);
  EXPECT_THROW(load_sweep(ini_from("[flow]\nalpha = 3\n")), ConfigError);
  EXPECT_THROW(load_sweep(ini_from("[sweep]\nk = 1.5\n")), ConfigError);
  EXPECT_THROW(load_sweep(ini_from("[sweep]\nalpha = 1, x\n")), ConfigError);
}

TEST(Io, SeriesCsvRoundTripsExactly) {
  const auto dir = scratch("csv");
  DiagnosticsRecord d;
  d.t = 0.1;
  d.R = 1.0 / 3.0;
  d.F_min = std::numeric_limits<double>::quiet_NaN();
  d.sphere_dev = 1e-300;
  std::vector<DiagnosticsRecord> s{d, d};
  s[1].t = 2.0 / 7.0;
  io::write_series_csv(dir / "s.csv", s);
  const auto t = io::read_csv(dir / "s.csv");
  ASSERT_EQ(t.header.size(), 14u);
  EXPECT_EQ(t.header.front(), "t");
  EXPECT_EQ(t.header.back(), "sphere_dev");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][0], 2.0 / 7.0);
  EXPECT_EQ(t.rows[0][3], 1.0 / 3.0);
  EXPECT_TRUE(std::isnan(t.rows[0][6]));
  EXPECT_EQ(t.rows[0][13], 1e-300);
}

TEST(Io, SnapshotRoundTrip) {
  const auto dir = scratch("snap");
  const Grid g(GridKind::axisym_polar, 16);
  const Snapshot s{0.25, 7, elongated_initial(g, 1.3)};
  io::write_snapshot(dir / "a.json", s);
  const auto back = io::read_snapshot(dir / "a.json");
  EXPECT_EQ(back.t, 0.25);
  EXPECT_EQ(back.step, 7);
  EXPECT_TRUE(back.field.grid == g);
  EXPECT_EQ(back.field.phi, s.field.phi);
  write(dir / "bad.json", "{\"grid\": {\"kind\": \"axisym-polar\", \"m\": 16}, \"phi\": [1, 2]}");
  EXPECT_THROW(io::read_snapshot(dir / "bad.json"), std::runtime_error);
}

TEST(Io, EmitPlotWritesOneFilePerColumn) {
  const auto dir = scratch("plot");
  std::vector<DiagnosticsRecord> s(3);
  for (int i = 0; i < 3; ++i) {
    s[i].t = i;
    s[i].R = 1.0 + i;
  }
  io::write_series_csv(dir / "series.csv", s);
  const auto files = io::emit_plot(dir / "series.csv", dir / "plot");
  EXPECT_EQ(files.size(), 13u);
  EXPECT_EQ(slurp(dir / "plot" / "R.dat"), "# t R\n0 1\n1 2\n2 3\n");
}

TEST(App, RunWritesArtifactsAndIsReproducible) {
  const auto dir = scratch("run");
  write(dir / "c.ini",
        "[grid]\nm = 32\n[initial]\naspect = 1.2\n[stepper]\nt_end = 0.2\nsnapshot_every = 20\n");
  std::ostringstream out, err;
  ASSERT_EQ(app::cmd_run((dir / "c.ini").string(), out, err, (dir / "a").string()), 0) << err.str();
  ASSERT_EQ(app::cmd_run((dir / "c.ini").string(), out, err, (dir / "b").string()), 0) << err.str();
  EXPECT_EQ(slurp(dir / "a" / "series.csv"), slurp(dir / "b" / "series.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  EXPECT_EQ(j.at("status"), "t_end");
  EXPECT_EQ(j.at("regime"), "super");
  EXPECT_EQ(j.at("version"), kVersion);
  EXPECT_EQ(j.at("params").at("alpha"), 3.0);
  EXPECT_TRUE(j.at("final").contains("sphere_dev"));
  EXPECT_TRUE(j.at("decay_fit").contains("rate"));
  EXPECT_TRUE(j.at("bounds").contains("u_min"));
  EXPECT_FALSE(fs::is_empty(dir / "a" / "snapshots"));
}

TEST(App, SphereConfigConverges) {
  const auto dir = scratch("sphere");
  write(dir / "c.ini", "[grid]\nm = 32\n[initial]\nshape = sphere\nradius = 2\n");
  std::ostringstream out, err;
  ASSERT_EQ(app::cmd_run((dir / "c.ini").string(), out, err, dir.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(j.at("status"), "converged");
  EXPECT_LT(j.at("final").at("R").get<double>() - 1.0, 1e-8);
}

TEST(App, RestartFromSnapshot) {
  const auto dir = scratch("restart");
  const Grid g(GridKind::axisym_polar, 32);
  io::write_snapshot(dir / "init.json", {0.0, 0, elongated_initial(g, 1.4)});
  write(dir / "c.ini", "[initial]\nshape = file\nfile = " + (dir / "init.json").string() +
                           "\n[stepper]\nt_end = 0.01\n");
  std::ostringstream out, err;
  EXPECT_EQ(app::cmd_run((dir / "c.ini").string(), out, err, (dir / "o").string()), 0) << err.str();
}

TEST(App, MalformedKeyExitsTwo) {
  const auto dir = scratch("bad");
  write(dir / "c.ini", "[flow]\nn = 2\nalpah = 3\n");
  std::ostringstream out, err;
  EXPECT_EQ(app::cmd_run((dir / "c.ini").string(), out, err), 2);
  EXPECT_NE(err.str().find("flow.alpah"), std::string::npos);
  EXPECT_NE(err.str().find(":3:"), std::string::npos);
}

TEST(App, SweepRecordsErrorsAndContinues) {
  const auto dir = scratch("sweep");
  write(dir / "c.ini",
        "[flow]\nn = 2\n[grid]\nm = 16\n[stepper]\nt_end = 0.05\n[output]\nformats = csv\n"
        "[sweep]\nalpha = 2, 3, 3\nk = 1, 3\n");
  std::ostringstream out, err;
  ASSERT_EQ(app::cmd_sweep((dir / "c.ini").string(), out, err, dir.string()), 0) << err.str();
  const auto text = slurp(dir / "sweep.csv");
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);  // header + 2 alphas x 2 k
  EXPECT_NE(lines[1].find("critical,t_end"), std::string::npos);
  EXPECT_NE(lines[2].find(",error,"), std::string::npos);
  EXPECT_NE(lines[3].find("super,t_end"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "cell_000" / "series.csv"));
  EXPECT_FALSE(fs::exists(dir / "cell_001"));
}

TEST(App, SweepEmptyListExitsTwo) {
  const auto dir = scratch("sweep_empty");
  write(dir / "c.ini", "[sweep]\nalpha = \n");
  std::ostringstream out, err;
  EXPECT_EQ(app::cmd_sweep((dir / "c.ini").string(), out, err, dir.string()), 2);
}
