#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "escape/graph.hpp"
#include "escape/martingale.hpp"
#include "escape/spectral.hpp"
#include "escape/walker.hpp"

namespace escape {

using Json = nlohmann::ordered_json;

enum class PotentialMode { eigenfunction, heat_flow };

std::string_view to_string(PotentialMode m);

struct PotentialConfig {
  PotentialMode mode = PotentialMode::eigenfunction;
  std::size_t box_side = 0;  // 0: half the side length
  double theta_cap = 0.5;

  bool operator==(const PotentialConfig&) const = default;
};

/// Numeric defaults shared by every stage; echoed into each report.
struct Defaults {
  double tol = 1e-10;
  long max_iter = 1'000'000;
  double c_occ = 8.0;
  double tolerance_sigmas = 3.0;
  double censor_threshold = 0.01;
  EigenMethod eigen_method = EigenMethod::automatic;

  bool operator==(const Defaults&) const = default;
};

struct MartingaleConfig {
  MartingaleFamily family = MartingaleFamily::srw;
  double holding = 0.5;
  MartingaleParams params;

  bool operator==(const MartingaleConfig&) const = default;
};

struct SweepConfig {
  std::vector<GraphSpec> families;  // empty: the run graph
  std::vector<double> eps0_grid{0.25};
  std::size_t n_samples = 2000;

  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string format = "json";  // json | csv
  std::string path;              // empty: standard output

  bool operator==(const OutputConfig&) const = default;
};

/// Registry of check selectors accepted in `checks`.
const std::vector<std::string>& check_registry();

struct RunConfig {
  GraphSpec graph{Cycle{6}, 0};
  PotentialConfig potential;
  WalkConfig walk;
  std::vector<std::string> checks;
  std::vector<std::size_t> times;      // bound grid; empty: powers of two up to t_max
  std::size_t inequality_horizon = 0;  // T of mark/lindrift/smallball; 0: t_max / 2
  std::size_t harmonic_time = 0;       // walk length of the embedded check; 0: min(16, t_max)
  MartingaleConfig martingale;
  SweepConfig sweep;
  Defaults defaults;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

Json graph_to_json(const GraphSpec& spec);
GraphSpec graph_from_json(const Json& j);

Json config_to_json(const RunConfig& cfg);
/// Throws Error(Errc::config) on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);

}  // namespace escape
