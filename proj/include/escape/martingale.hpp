#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "escape/checks.hpp"
#include "escape/graph.hpp"
#include "escape/harmonic.hpp"
#include "escape/kernel.hpp"

namespace escape {

enum class MartingaleFamily {
  srw,       // simple random walk on the integers, steps +-1
  lazy,      // holds with probability p, otherwise steps +-1/sqrt(1-p)
  embedded,  // Psi(X_t) for the kernel walk X_t and an embedding Psi
};

std::string_view to_string(MartingaleFamily f);
MartingaleFamily parse_martingale_family(std::string_view s);

/// The embedded family refers to caller-owned graph, kernel and embedding.
struct MartingaleSpec {
  MartingaleFamily family = MartingaleFamily::srw;
  double holding = 0.0;
  const Graph* graph = nullptr;
  const Kernel* kernel = nullptr;
  const Embedding* embedding = nullptr;
  Vertex x0 = 0;

  static MartingaleSpec srw() { return {}; }
  static MartingaleSpec lazy(double p);
  static MartingaleSpec embedded(const Graph& graph, const Kernel& kernel, const Embedding& emb,
                                 Vertex x0 = 0);

  /// Almost-sure bound on ||M_{t+1} - M_t||, at least 1.
  double step_bound() const;
  std::size_t dimension() const;
  /// Throws invalid_argument for an inconsistent spec.
  void validate() const;
};

/// max over states of |E[||M_{t+1} - M_t||^2 | state] - 1|, evaluated
/// exhaustively over the one-step transitions.
double conditional_second_moment_error(const MartingaleSpec& spec);

struct MartingaleSummary {
  std::size_t t_max = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> mean_sq_increment;  // E||M_t - M_0||^2
  std::vector<double> se_sq_increment;
  std::vector<double> mean_increment;  // E||M_t - M_0||
  std::vector<double> se_increment;

  bool operator==(const MartingaleSummary&) const = default;
};

/// Trajectories are keyed by (seed, index, step) and reduced in fixed chunks
/// in index order, so the summary does not depend on the thread count.
MartingaleSummary simulate_martingale(const MartingaleSpec& spec, std::size_t t_max,
                                      std::size_t n_samples, std::uint64_t seed, int threads = 0);

struct MartingaleParams {
  std::size_t n_samples = 100'000;
  std::uint64_t seed = 1;
  std::vector<double> hit_radii{5.0, 10.0};
  std::size_t hit_horizon = 0;  // 0: 40 (R + B)^2 per radius
  std::size_t l1_horizon = 100;
  double yuval_offset = 10.0;
  double yuval_r = 5.0;
  double yuval_r_prime = 5.0;
  std::size_t yuval_horizon = 0;  // 0: 40 (2R + B)^2
  std::size_t occ_horizon = 10'000;
  std::vector<double> occ_epsilons{0.05, 0.1, 0.2};
  double c_occ = 8.0;
  double tolerance_sigmas = 3.0;
  double censor_threshold = 0.01;

  bool operator==(const MartingaleParams&) const = default;
};

NamedCheck check_mghit(const MartingaleSpec& spec, const MartingaleParams& params);
NamedCheck check_l1mg(const MartingaleSpec& spec, const MartingaleParams& params);
NamedCheck check_yuval(const MartingaleSpec& spec, const MartingaleParams& params);
NamedCheck check_mgocc(const MartingaleSpec& spec, const MartingaleParams& params);

/// mghit, l1mg, yuval and mgocc in that order.
std::vector<NamedCheck> verify_martingale_lemmas(const MartingaleSpec& spec,
                                                 const MartingaleParams& params);

}  // namespace escape
