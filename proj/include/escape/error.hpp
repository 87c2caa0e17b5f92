#pragma once

#include <stdexcept>
#include <string>

namespace escape {

enum class Errc {
  invalid_argument,
  unsupported,
  disconnected,
  non_generating,
  degenerate_potential,
  degenerate_seed,
  theta_too_large,
  not_converged,
  no_second_eigenvalue,
  search_exhausted,
  size_limit,
  window_exceeded,
  insufficient_horizon,
  grid_mismatch,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised by the eigensolvers; carries the state of the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : Error(Errc::not_converged, what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

}  // namespace escape
