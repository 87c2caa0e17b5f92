#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <sys/wait.h>

#include "escape/error.hpp"
#include "escape/report.hpp"

using namespace escape;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

RunConfig parse(const char* text) { return config_from_json(Json::parse(text)); }

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ESCAPE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, RoundTrip) {
  RunConfig cfg;
  cfg.graph = {Torus{8, 2}, 1};
  cfg.potential.mode = PotentialMode::heat_flow;
  cfg.potential.box_side = 3;
  cfg.walk.t_max = 64;
  cfg.walk.n_samples = 100;
  cfg.walk.seed = 9;
  cfg.walk.occupation_epsilons = {0.1, 0.25};
  cfg.walk.hitting_radii = {4};
  cfg.checks = {"bounds", "mark"};
  cfg.times = {1, 4, 16};
  cfg.martingale.family = MartingaleFamily::lazy;
  cfg.martingale.params.hit_radii = {3.0};
  cfg.sweep.families = {{Cycle{16}, 0}, {Hypercube{3}, 0}};
  cfg.defaults.eigen_method = EigenMethod::lobpcg;
  cfg.output.format = "csv";
  EXPECT_TRUE(config_from_json(config_to_json(cfg)) == cfg);

  RunConfig table;
  table.graph = {CayleyTable{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {1, 2}}, 0};
  EXPECT_TRUE(config_from_json(config_to_json(table)) == table);
}

TEST(Config, DefaultsFromMinimalFile) {
  const auto cfg = parse(R"({"graph": {"family": "cycle", "n": 6}})");
  EXPECT_TRUE(cfg == RunConfig{});
  EXPECT_EQ(cfg.defaults.tol, 1e-10);
  EXPECT_EQ(cfg.defaults.c_occ, 8.0);
  EXPECT_EQ(cfg.defaults.tolerance_sigmas, 3.0);
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { parse(R"({"graph": {"family": "moebius", "n": 6}})"); }), Errc::config);
  EXPECT_EQ(code_of([] { parse(R"({"graph": {"family": "cycle", "n": 6}, "colour": 1})"); }),
            Errc::config);
  EXPECT_EQ(code_of([] { parse(R"({"graph": {"family": "cycle", "n": 6, "dim": 2}})"); }),
            Errc::config);
  EXPECT_EQ(code_of([] { parse(R"({"graph": {"family": "cycle", "n": "six"}})"); }), Errc::config);
  EXPECT_EQ(code_of([] { parse(R"({"checks": ["bounds", "nonsense"]})"); }), Errc::config);
  EXPECT_EQ(code_of([] { parse(R"({"output": {"format": "xml"}})"); }), Errc::config);
  EXPECT_EQ(code_of([] { load_config("/nonexistent/escape.json"); }), Errc::config);
  const auto dup = parse(R"({"checks": ["bounds", "mark", "bounds"]})");
  EXPECT_EQ(dup.checks, (std::vector<std::string>{"bounds", "mark"}));
}

TEST(Report, Cycle6Verify) {
  const auto cfg = parse(R"({
    "graph": {"family": "cycle", "n": 6},
    "walk": {"t_max": 2, "n_samples": 4000, "seed": 3},
    "checks": ["bounds", "harmonic"]
  })");
  const Report r = run(cfg);
  ASSERT_NE(r.curve, std::nullopt);
  EXPECT_EQ(r.curve->times, (std::vector<std::size_t>{1, 2}));
  ASSERT_NE(r.find("bounds"), nullptr);
  EXPECT_EQ(r.find("bounds")->verdict, Verdict::pass);
  EXPECT_EQ(r.find("harmonic")->verdict, Verdict::pass);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_NEAR(r.data["spectrum"]["lambda"].get<double>(), 0.5, 1e-9);

  const std::string a = to_json_text(r);
  EXPECT_EQ(a, to_json_text(run(cfg)));
  const auto j = Json::parse(a);
  EXPECT_EQ(j["tool"], "escape");
  EXPECT_EQ(j["version"], std::string(kToolVersion));
  EXPECT_EQ(j["stage"], "verify");
  EXPECT_EQ(j["config"], config_to_json(cfg));

  const std::string csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "time,mean_dist,mean_sq_dist,ci_half_width,exact_bound,quadratic_bound,improved_bound,"
            "geometric_bound");
}

TEST(Report, BoundTimesClipToRelaxation) {
  RunConfig cfg;
  cfg.walk.t_max = 100;
  EXPECT_EQ(bound_times(cfg, 10.0), (std::vector<std::size_t>{1, 2, 4, 8}));
  EXPECT_EQ(bound_times(cfg, 1000.0), (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 100}));
  cfg.times = {0, 3, 50, 200};
  EXPECT_EQ(bound_times(cfg, 60.0), (std::vector<std::size_t>{3, 50}));
}

TEST(Report, CompleteGraphBoundsAreInconclusive) {
  // On K_4 the relaxation time is 3/4 < 1, so no time lies in the bound window.
  const auto cfg = parse(R"({
    "graph": {"family": "complete", "n": 4},
    "walk": {"t_max": 4, "n_samples": 100},
    "checks": ["bounds"]
  })");
  const Report r = run(cfg);
  EXPECT_EQ(r.find("bounds")->verdict, Verdict::inconclusive);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Report, StagesAndErrors) {
  EXPECT_EQ(parse_stage("sweep"), Stage::sweep);
  EXPECT_EQ(to_string(Stage::martingale), "martingale");
  EXPECT_THROW(parse_stage("everything"), Error);
  EXPECT_EQ(exit_code_for(Error(Errc::config, "x")), 2);
  EXPECT_EQ(exit_code_for(ConvergenceError("x", 1.0, 2)), 3);
  EXPECT_EQ(exit_code_for(Error(Errc::search_exhausted, "x")), 3);
  EXPECT_EQ(exit_code_for(Error(Errc::invalid_argument, "x")), 2);

  const auto bad = parse(R"({
    "graph": {"family": "cycle", "n": 6},
    "walk": {"t_max": 8, "n_samples": 10},
    "inequality_horizon": 8,
    "checks": ["mark"]
  })");
  EXPECT_EQ(code_of([&] { run(bad); }), Errc::insufficient_horizon);
}

TEST(Sweep, WindowsFollowDiameter) {
  Json data;
  const auto c = conjecture_sweep({{Cycle{64}, 0}, {Hypercube{6}, 0}}, {0.25}, 200, 1, data);
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
  ASSERT_EQ(data["sweep"].size(), 2u);
  EXPECT_EQ(data["sweep"][0]["diameter"], 32);
  EXPECT_EQ(data["sweep"][0]["windows"][0]["window"], 256);
  EXPECT_EQ(data["sweep"][1]["diameter"], 6);
  EXPECT_EQ(data["sweep"][1]["windows"][0]["window"], 9);
  // t = 1 always gives ratio d * 1 / 1 = degree on a loopless graph.
  EXPECT_DOUBLE_EQ(data["sweep"][1]["ratio"][0].get<double>(), 6.0);

  Json empty;
  const auto e = conjecture_sweep({}, {0.25}, 10, 1, empty);
  EXPECT_EQ(e.verdict, Verdict::inconclusive);
  EXPECT_TRUE(empty["sweep"].empty());
}

TEST(Cli, ExitCodes) {
  const auto good = temp_file("escape_cli_good.json",
                              R"({"graph": {"family": "cycle", "n": 6},
                                  "walk": {"t_max": 2, "n_samples": 500},
                                  "checks": ["bounds"]})");
  EXPECT_EQ(run_cli("verify --config " + good.string()), 0);
  EXPECT_EQ(run_cli("graph --config " + good.string() + " --format csv"), 0);
  const auto family = temp_file("escape_cli_family.json", R"({"graph": {"family": "moebius"}})");
  EXPECT_EQ(run_cli("verify --config " + family.string()), 2);
  EXPECT_EQ(run_cli("verify --config /nonexistent.json"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  const auto stuck = temp_file("escape_cli_stuck.json",
                               R"({"graph": {"family": "cycle", "n": 500},
                                   "defaults": {"max_iter": 2, "eigen_method": "power"}})");
  EXPECT_EQ(run_cli("spectrum --config " + stuck.string()), 3);
  const auto out = std::filesystem::temp_directory_path() / "escape_cli_out.json";
  std::filesystem::remove(out);
  EXPECT_EQ(run_cli("graph --config " + good.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(out));
}
