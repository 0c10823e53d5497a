#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>

#include "gdqfi/experiments.hpp"

using namespace gdqfi;

namespace {

SweepConfig parse(const std::string& text, const ConfigOverrides& overrides = {}) {
  std::istringstream in(text);
  return parse_config(in, overrides);
}

std::string csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

const SweepRow& row_at(const std::vector<SweepRow>& rows, const std::string& probe, double t) {
  for (const auto& r : rows) {
    if (r.probe_name == probe && r.t == t) return r;
  }
  FAIL("missing row " << probe << " t=" << t);
  return rows.front();
}

std::map<std::string, double> parse_report(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(' ') + 1);
    out[key] = std::strtod(line.c_str() + eq + 1, nullptr);
  }
  return out;
}

}  // namespace

TEST_CASE("parse_config: empty input gives the defaults") {
  const SweepConfig cfg = parse("");
  const PhysicalParams defaults;
  CHECK(cfg.params.omega_m == defaults.omega_m);
  CHECK(cfg.params.gamma == defaults.gamma);
  CHECK(cfg.params.n_th == defaults.n_th);
  CHECK(cfg.params.lambda_g == defaults.lambda_g);
  REQUIRE(cfg.probes.size() == 4);
  CHECK(cfg.probes[0].name == "coherent");
  CHECK(cfg.probes[1].name == "thermal");
  CHECK(cfg.probes[2].name == "squeezed_vacuum");
  CHECK(cfg.probes[3].name == "squeezed_thermal");
  CHECK(cfg.time_grid.min == 0.0);
  CHECK(cfg.time_grid.max == 20.0 / defaults.gamma);
  CHECK_FALSE(cfg.lambda_g_grid.has_value());
  CHECK(cfg.n_repetitions == 1);
}

TEST_CASE("parse_config: values, comments and probes") {
  const SweepConfig cfg = parse(
      "# comment\n"
      "params.lambda_g = 1e-8\n"
      "params.gamma = 0.2   # trailing\n"
      "\n"
      "time.n_points = 11\n"
      "time.spacing = log\n"
      "time.t_min = 0.1\n"
      "r_grid = 0.5, 0.9\n"
      "probe.a.kind = squeezed_thermal\n"
      "probe.a.n_th0 = 1\n"
      "probe.a.r = 0.3\n"
      "probe.b.kind = coherent\n"
      "probe.b.alpha_re = 1.5\n");
  CHECK(cfg.params.lambda_g == 1e-8);
  CHECK(cfg.params.gamma == 0.2);
  CHECK(cfg.time_grid.max == 100.0);
  CHECK(cfg.time_grid.spacing == Spacing::kLog);
  REQUIRE(cfg.probes.size() == 2);
  CHECK(cfg.probes[0].name == "a");
  CHECK(std::get<SqueezedThermal>(cfg.probes[0].spec).r == 0.3);
  CHECK(std::get<Coherent>(cfg.probes[1].spec).alpha_re == 1.5);
  const auto expanded = cfg.expanded_probes();
  REQUIRE(expanded.size() == 4);
  CHECK(expanded[2].name == r_grid_probe_name(0.5));
  CHECK(expanded[3].name == r_grid_probe_name(0.9));
}

TEST_CASE("parse_config: overrides replace file values") {
  const SweepConfig cfg = parse("params.gamma = 0.2\n", {{"params.gamma", "0.05"}, {"params.n_th", "1"}});
  CHECK(cfg.params.gamma == 0.05);
  CHECK(cfg.params.n_th == 1.0);
}

TEST_CASE("parse_config: physical bridges") {
  const SweepConfig cfg = parse("mirror.density = 19300\nbath.temperature = 0\n");
  CHECK(cfg.params.lambda_g == doctest::Approx(lambda_g_from(MirrorSpec{19300.0, 1.0})));
  CHECK(cfg.params.lambda_T == 0.0);
  CHECK_THROWS_AS(parse("mirror.density = 1\nparams.lambda_g = 1e-8\n"), ConfigError);
}

TEST_CASE("parse_config: errors") {
  CHECK_THROWS_WITH_AS(parse("time.t_min = 5\ntime.t_max = 1\n"), doctest::Contains("time.t_min"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("params.gamma = 0.1\nbogus\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("\nparams.colour = 3\n"), doctest::Contains("line 2: params.colour: unknown key"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse("params.gamma = 0.1\nparams.gamma = 0.2\n"), doctest::Contains("duplicate"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse("params.gamma = fast\n"), doctest::Contains("params.gamma"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("params.gamma = -1\n"), doctest::Contains("gamma"), ConfigError);
  CHECK_THROWS_AS(parse("lambda_g_grid.min = 1e-8\n"), ConfigError);
  CHECK_THROWS_AS(parse("lambda_g_grid.min = 0\nlambda_g_grid.max = 1\nlambda_g_grid.spacing = log\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("probe.x.kind = cat\n"), ConfigError);
  CHECK_THROWS_AS(parse("probe.x.kind = thermal\nprobe.x.n_th0 = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("n_repetitions = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("Grid::points") {
  const auto lin = Grid{0.0, 1.0, 5, Spacing::kLinear}.points();
  REQUIRE(lin.size() == 5);
  CHECK(lin[2] == 0.5);
  CHECK(lin.back() == 1.0);
  const auto lg = Grid{1e-8, 1e-2, 7, Spacing::kLog}.points();
  REQUIRE(lg.size() == 7);
  CHECK(lg[0] == 1e-8);
  CHECK(lg[3] == doctest::Approx(1e-5));
  CHECK(lg.back() == 1e-2);
  CHECK(Grid{3.0, 4.0, 1, Spacing::kLinear}.points() == std::vector<double>{3.0});
}

TEST_CASE("run_purity_sweep: initial purities and early decoherence") {
  SweepConfig cfg = parse("");
  const auto rows = run_purity_sweep(cfg);
  const auto ts = cfg.time_grid.points();
  CHECK(rows.size() == ts.size() * 4);
  CHECK(row_at(rows, "coherent", 0.0).purity == 1.0);
  CHECK(row_at(rows, "thermal", 0.0).purity == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(std::abs(row_at(rows, "squeezed_vacuum", 0.0).purity - 1.0) < 1e-12);
  CHECK(row_at(rows, "squeezed_thermal", 0.0).purity == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // early window: squeezed vacuum below coherent
  SweepConfig early = cfg;
  early.time_grid = Grid{0.0, 1.0 / cfg.params.gamma, 51, Spacing::kLinear};
  const auto erows = run_purity_sweep(early);
  bool below = false;
  for (double t : early.time_grid.points()) {
    if (t > 0.0 && row_at(erows, "squeezed_vacuum", t).purity < row_at(erows, "coherent", t).purity) below = true;
  }
  CHECK(below);

  for (const auto& r : rows) {
    CHECK(r.purity > 0.0);
    CHECK(r.purity <= 1.0);
  }
}

TEST_CASE("run_purity_sweep: stronger squeezing decoheres faster") {
  SweepConfig cfg = parse("r_grid = 0.5, 0.9, 1.2, 1.4436\n");
  cfg.time_grid = Grid{1.0 / cfg.params.gamma, 1.0 / cfg.params.gamma, 1, Spacing::kLinear};
  const auto rows = run_purity_sweep(cfg);
  double previous = 2.0;
  for (double r : cfg.r_grid) {
    const double pur = row_at(rows, r_grid_probe_name(r), cfg.time_grid.min).purity;
    CHECK(pur < previous);
    previous = pur;
  }
}

TEST_CASE("run_qfi_sweep") {
  SweepConfig cfg = parse("params.lambda_g = 1e-8\n");
  const double ts = short_time_sample(cfg.params);
  const double late = 15.0 / cfg.params.gamma;
  cfg.time_grid = Grid{0.0, late, 151, Spacing::kLinear};
  const auto rows = run_qfi_sweep(cfg);
  CHECK(rows.size() == 151 * 4);
  for (const auto& r : rows) {
    if (r.t == 0.0) {
      CHECK(r.qfi_total == 0.0);
      CHECK(std::isinf(r.crb));
    } else {
      CHECK(std::isfinite(r.crb));
    }
    CHECK(r.qfi_total >= r.cfi_best_theta - 1e-12);
  }

  SweepConfig shortcfg = cfg;
  shortcfg.time_grid = Grid{ts, ts, 1, Spacing::kLinear};
  const auto srows = run_qfi_sweep(shortcfg);
  const double sq = row_at(srows, "squeezed_vacuum", ts).qfi_total;
  for (const char* other : {"coherent", "thermal", "squeezed_thermal"}) {
    CHECK(sq > row_at(srows, other, ts).qfi_total);
  }

  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& r : rows) {
    if (r.t == late) {
      lo = std::min(lo, r.qfi_total);
      hi = std::max(hi, r.qfi_total);
    }
  }
  CHECK((hi - lo) / lo < 0.01);

  const auto best = argmax_qfi(rows, "squeezed_vacuum");
  REQUIRE(best.has_value());
  for (const auto& r : rows) {
    if (r.probe_name == "squeezed_vacuum") CHECK(r.qfi_total <= best->qfi_total);
  }
  CHECK_FALSE(argmax_qfi(rows, "nobody").has_value());
}

TEST_CASE("run_qfi_sweep: crb scales with repetitions") {
  SweepConfig cfg = parse("time.t_min = 5\ntime.t_max = 5\ntime.n_points = 1\n");
  const auto one = run_qfi_sweep(cfg);
  cfg.n_repetitions = 1000;
  const auto many = run_qfi_sweep(cfg);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(many[i].crb == doctest::Approx(one[i].crb / 1000.0));
    CHECK(one[i].crb == doctest::Approx(1.0 / one[i].qfi_total));
  }
}

TEST_CASE("run_qfi_contour") {
  SweepConfig cfg = parse(
      "lambda_g_grid.min = 1e-8\n"
      "lambda_g_grid.max = 0.1\n"
      "lambda_g_grid.n_points = 15\n"
      "lambda_g_grid.spacing = log\n");
  const auto rows = run_qfi_contour(cfg);
  const auto ts = cfg.time_grid.points();
  const auto ls = cfg.lambda_g_grid->points();
  REQUIRE(rows.size() == ts.size() * ls.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ls.size(); ++j) {
      const SweepRow& r = rows[i * ls.size() + j];
      CHECK(r.t == ts[i]);
      CHECK(r.lambda_g == ls[j]);
      CHECK(r.probe_name == "squeezed_vacuum");
      if (r.t == 0.0) CHECK(r.qfi_total == 0.0);
      CHECK(r.qfi_total >= r.cfi_best_theta - 1e-12);
    }
  }

  // t_max = 20/gamma; 0.8 t_max is grid index 160 of 200
  const std::size_t i_end = ts.size() - 1;
  const std::size_t i_80 = 160;
  REQUIRE(ts[i_80] == doctest::Approx(0.8 * ts[i_end]));
  for (std::size_t j = 0; j < ls.size(); ++j) {
    const double q_end = rows[i_end * ls.size() + j].qfi_total;
    const double q_80 = rows[i_80 * ls.size() + j].qfi_total;
    CHECK(std::abs(q_end - q_80) / q_end < 0.02);
  }

  // tail toward lambda_g ~ gamma
  for (std::size_t j = ls.size() / 2; j + 1 < ls.size(); ++j) {
    CHECK(rows[i_end * ls.size() + j + 1].qfi_total < rows[i_end * ls.size() + j].qfi_total);
  }
}

TEST_CASE("run_qfi_contour: errors") {
  SweepConfig cfg = parse("");
  CHECK_THROWS_AS(run_qfi_contour(cfg), ConfigError);
  cfg.lambda_g_grid = Grid{1e-8, 1e-6, 3, Spacing::kLog};
  cfg.contour_probe = "missing";
  CHECK_THROWS_AS(run_qfi_contour(cfg), ConfigError);
}

TEST_CASE("write_csv: header, format and determinism") {
  SweepConfig cfg = parse("time.n_points = 21\n");
  const std::string a = csv(run_qfi_sweep(cfg));
  const std::string b = csv(run_qfi_sweep(cfg));
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == kCsvHeader);
  CHECK(format_real(0.1) == "1.00000000000e-01");
  CHECK(format_real(534.13) == "5.34130000000e+02");
  CHECK(csv({}) == std::string(kCsvHeader) + "\n");

  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(count == 21 * 4);
}

TEST_CASE("report_steady_state") {
  PhysicalParams p;
  const auto fields = parse_report(report_steady_state(p));
  for (const char* key : {"n_eff", "A_inf", "B_inf", "B_inf/A_inf", "Q", "purity", "qfi_total"}) {
    CHECK(fields.count(key) == 1);
  }
  CHECK(std::abs(fields.at("B_inf/A_inf") + 2.0 * fields.at("Q")) < 1e-12 * 2.0 * fields.at("Q"));

  // round trip through %.17g is exact
  const GaussianState ss = steady_state(p);
  CHECK(fields.at("sigma_xx") == ss.cov.xx);
  CHECK(fields.at("sigma_xp") == ss.cov.xp);
  CHECK(fields.at("sigma_pp") == ss.cov.pp);
  CHECK(fields.at("purity") == purity(ss.cov));
  CHECK(fields.at("qfi_total") == steady_qfi(p).total);
  CHECK(fields.at("n_eff") == p.n_eff());

  PhysicalParams quiet;
  quiet.lambda_g = 0.0;
  const auto q = parse_report(report_steady_state(quiet));
  CHECK(q.at("A_inf") == 0.0);
  CHECK(q.at("B_inf") == 0.0);
  CHECK(q.at("sigma_xx") == doctest::Approx(quiet.n_th + 0.5));
  CHECK(q.at("sigma_xp") == 0.0);
  CHECK(q.at("sigma_pp") == doctest::Approx(quiet.n_th + 0.5));
}
