#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "escape/checks.hpp"
#include "escape/config.hpp"
#include "escape/error.hpp"
#include "escape/potential.hpp"
#include "escape/walker.hpp"

namespace escape {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Stage { graph, spectrum, bound, harmonic, simulate, verify, martingale, sweep };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

struct Report {
  Stage stage = Stage::verify;
  Json config;  // echo of the effective RunConfig
  std::uint64_t seed = 0;
  std::vector<NamedCheck> checks;
  std::optional<WalkSummary> walk;
  std::optional<BoundCurve> curve;
  Json data = Json::object();  // stage-specific results (spectrum, potential, sweep, ...)

  /// 0 when no check failed, 1 otherwise.
  int exit_code() const;
  const NamedCheck* find(std::string_view name) const;
};

/// Runs one stage of the pipeline graph -> kernel -> potential -> bounds ->
/// simulation -> checks. `verify` runs every check listed in the config.
Report run(const RunConfig& cfg, Stage stage = Stage::verify);

/// Exploratory: simulates each graph to eps0 D^2 steps and reports
/// min_t mean_sq_dist[t] d / t. Verdict is always inconclusive.
NamedCheck conjecture_sweep(const std::vector<GraphSpec>& families,
                            const std::vector<double>& eps0_grid, std::size_t n_samples,
                            std::uint64_t seed, Json& data);

/// The bound grid used by `run`: configured times, or powers of two up to
/// t_max (and t_max itself), clipped to [1, relaxation] and to t_max.
std::vector<std::size_t> bound_times(const RunConfig& cfg, double relaxation);

std::string to_json_text(const Report& report);
/// One row per time step: time, mean_dist, mean_sq_dist, ci_half_width,
/// exact_bound, quadratic_bound, improved_bound, geometric_bound.
std::string to_csv(const Report& report);

/// Maps a library error to the CLI exit code (2 usage/config, 3 non-convergence).
int exit_code_for(const Error& e);

}  // namespace escape
