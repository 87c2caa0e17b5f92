#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "escape/checks.hpp"
#include "escape/graph.hpp"
#include "escape/kernel.hpp"
#include "escape/potential.hpp"

namespace escape {

struct WalkConfig {
  std::size_t t_max = 1;
  std::size_t n_samples = 1;
  std::uint64_t seed = 0;
  Vertex x0 = 0;
  std::vector<double> occupation_epsilons;
  /// Horizons T for the occupation sums; empty means {t_max}.
  std::vector<std::size_t> occupation_horizons;
  std::vector<std::size_t> hitting_radii;

  bool operator==(const WalkConfig&) const = default;
};

enum class OccupationKind {
  diffusive,  // radius eps * sqrt(T / d)
  hitting,    // radius eps * k / B_step for a hitting radius k
};

struct OccupationEntry {
  OccupationKind kind = OccupationKind::diffusive;
  double epsilon = 0.0;
  std::size_t horizon = 0;
  std::size_t k = 0;  // hitting radius, hitting kind only
  std::uint32_t radius = 0;
  double fraction = 0.0;  // (1/T) sum_{s=0}^{T} P[dist(X_0, X_s) <= radius]
  double se = 0.0;

  bool operator==(const OccupationEntry&) const = default;
};

struct HittingEntry {
  std::size_t k = 0;
  double mean = 0.0;  // censored values count as t_max
  double se = 0.0;
  std::size_t censored = 0;

  bool operator==(const HittingEntry&) const = default;
};

/// Per-time statistics are indexed by t = 0..t_max. Standard errors are of the
/// sample means; `ci_half_width` is 3 standard errors of mean_sq_dist.
struct WalkSummary {
  std::size_t t_max = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  Vertex x0 = 0;
  std::size_t degree = 0;
  std::uint32_t step_bound = 0;
  std::vector<double> mean_dist;
  std::vector<double> se_dist;
  std::vector<double> mean_sq_dist;
  std::vector<double> se_sq_dist;
  std::vector<double> ci_half_width;
  std::vector<double> mean_shift_sq;  // E[(dist + 1)^2]
  std::vector<double> se_shift_sq;
  std::vector<OccupationEntry> occupation;
  std::vector<HittingEntry> hitting;

  const HittingEntry* hitting_for(std::size_t k) const;
  const OccupationEntry* occupation_for(OccupationKind kind, double epsilon, std::size_t horizon,
                                        std::size_t k = 0) const;

  bool operator==(const WalkSummary&) const = default;
};

/// Integer radius for a real radius r: dist <= r iff dist <= floor(r).
std::uint32_t radius_floor(double r);

/// Runs n_samples trajectories over OpenMP threads (0 = runtime default).
/// Every draw is keyed by (seed, trajectory, step) and all sums are exact
/// integers, so the summary does not depend on the thread count.
WalkSummary simulate(const Kernel& kernel, const Graph& graph, const WalkConfig& cfg,
                     int threads = 0);

/// Single-threaded reference for `simulate`.
WalkSummary simulate_serial(const Kernel& kernel, const Graph& graph, const WalkConfig& cfg);

/// X_t of each trajectory, drawn from the same streams as `simulate`.
std::vector<Vertex> sample_endpoints(const Kernel& kernel, Vertex x0, std::size_t t,
                                     std::size_t n_samples, std::uint64_t seed);

/// Compares the simulated second moments with every series present in
/// `curve` at its times: lower bounds on mean_sq_dist, the improved bound on
/// E[(dist+1)^2], and the 2t/d upper bound.
NamedCheck verify_against_bounds(const WalkSummary& summary, const BoundCurve& curve,
                                 double tolerance_sigmas = 3.0);

struct InequalityParams {
  std::size_t horizon = 0;  // T
  std::size_t degree = 0;   // d
  std::uint32_t step_bound = 1;
  double c_occ = 8.0;
  double tolerance_sigmas = 3.0;
  double censor_threshold = 0.01;
};

/// mark, lindrift and smallball. smallball carries both the hitting-radius
/// form and the diffusive form eps sqrt(T/d) for eps >= 1/sqrt(T).
std::vector<NamedCheck> verify_walk_inequalities(const WalkSummary& summary,
                                                 const InequalityParams& params);

}  // namespace escape
