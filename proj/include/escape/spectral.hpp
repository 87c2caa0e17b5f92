#pragma once

#include <string_view>
#include <vector>

#include "escape/kernel.hpp"

namespace escape {

enum class EigenMethod {
  power,      // power iteration on (I + P)/2
  lobpcg,     // locally optimal block-size-one iteration on (I + P)/2
  automatic,  // power for small kernels, lobpcg otherwise
};

std::string_view to_string(EigenMethod m);
EigenMethod parse_eigen_method(std::string_view s);

struct SpectralOptions {
  double tol = 1e-10;
  long max_iter = 1'000'000;
  EigenMethod method = EigenMethod::power;
};

/// Second-largest eigenvalue of P and a unit eigenvector orthogonal to the
/// constants. `residual` is ||P psi - lambda psi||.
struct SpectralResult {
  double lambda = 0.0;
  std::vector<double> psi;
  double residual = 0.0;
  long iterations = 0;
  EigenMethod method = EigenMethod::power;

  /// 1 / (1 - lambda)
  double relaxation_time() const { return 1.0 / (1.0 - lambda); }
};

/// Power iteration on (I + P)/2 restricted to the mean-zero subspace, so the
/// largest signed eigenvalue is found even on bipartite graphs.
SpectralResult second_eigenpair(const Kernel& kernel, double tol = 1e-10,
                                long max_iter = 1'000'000);

SpectralResult second_eigenpair(const Kernel& kernel, const SpectralOptions& options);

}  // namespace escape
