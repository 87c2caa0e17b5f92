// Command-line front end: one subcommand per pipeline stage.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "escape/config.hpp"
#include "escape/error.hpp"
#include "escape/harmonic.hpp"
#include "escape/kernel.hpp"
#include "escape/report.hpp"
#include "escape/spectral.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::string embedding;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--seed", o.seed, "Override the walk and martingale seeds");
  sub->add_option("--out", o.out, "Write the report to this path instead of stdout");
  sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw escape::Error(escape::Errc::config, "cannot write '" + path + "'");
  f << text;
}

int execute(escape::Stage stage, const Options& o) {
  escape::RunConfig cfg = o.config.empty() ? escape::RunConfig{} : escape::load_config(o.config);
  if (o.seed) {
    cfg.walk.seed = *o.seed;
    cfg.martingale.params.seed = *o.seed;
  }
  if (!o.format.empty()) cfg.output.format = o.format;
  if (!o.out.empty()) cfg.output.path = o.out;

  const escape::Report report = escape::run(cfg, stage);
  const std::string text =
      cfg.output.format == "csv" ? escape::to_csv(report) : escape::to_json_text(report);
  write_text(cfg.output.path, text);

  if (stage == escape::Stage::harmonic && !o.embedding.empty()) {
    const auto graph = escape::build_graph(cfg.graph);
    const auto kernel = escape::srw_kernel(graph);
    escape::SpectralOptions opt{cfg.defaults.tol, cfg.defaults.max_iter, cfg.defaults.eigen_method};
    const auto psi = escape::second_eigenpair(kernel, opt).psi;
    std::ofstream f(o.embedding);
    if (!f) throw escape::Error(escape::Errc::config, "cannot write '" + o.embedding + "'");
    escape::write_embedding_csv(f, escape::embed(graph, kernel, psi));
  }

  const int code = report.exit_code();
  if (code != 0) {
    for (const auto& c : report.checks) {
      if (c.verdict == escape::Verdict::fail) std::cerr << "check failed: " << c.name << '\n';
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape-rate bounds and random-walk verification on Cayley graphs"};
  app.require_subcommand(1);

  const std::pair<escape::Stage, const char*> stages[] = {
      {escape::Stage::graph, "Build the graph and print its basic invariants"},
      {escape::Stage::spectrum, "Second eigenvalue and relaxation time"},
      {escape::Stage::bound, "Potential and lower-bound curves"},
      {escape::Stage::harmonic, "Equivariant embedding identities"},
      {escape::Stage::simulate, "Monte Carlo walk summary"},
      {escape::Stage::verify, "Run every configured check"},
      {escape::Stage::martingale, "Martingale lemma checks"},
      {escape::Stage::sweep, "Exploratory diameter-scale sweep"},
  };
  Options opts;
  std::optional<escape::Stage> chosen;
  for (const auto& [stage, help] : stages) {
    CLI::App* sub = app.add_subcommand(std::string(escape::to_string(stage)), help);
    add_common(sub, opts);
    if (stage == escape::Stage::harmonic) {
      sub->add_option("--embedding", opts.embedding,
                      "Also write the eigenfunction embedding as CSV to this path");
    }
    sub->callback([&chosen, stage = stage] { chosen = stage; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return execute(*chosen, opts);
  } catch (const escape::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return escape::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
