#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "escape/graph.hpp"

namespace escape {

/// Symmetric stochastic matrix in CSR form. Entries of a row are sorted by
/// target and merged, so a double edge appears once with twice the mass.
class Kernel {
 public:
  /// Validates row sums (within 1e-12), nonnegativity and exact symmetry.
  static Kernel from_rows(std::vector<std::vector<std::pair<Vertex, double>>> rows,
                          std::size_t degree_context = 0);

  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t degree_context() const { return degree_context_; }

  /// Minimum transition probability across a non-loop entry.
  double p_star() const { return p_star_; }

  std::span<const Vertex> targets(Vertex x) const {
    return {targets_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }
  std::span<const double> probs(Vertex x) const {
    return {probs_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }

  double entry(Vertex x, Vertex y) const;

 private:
  friend Kernel srw_kernel(const Graph& graph);

  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> targets_;
  std::vector<double> probs_;
  double p_star_ = 1.0;
  std::size_t degree_context_ = 0;
};

/// Simple random walk: P(x,y) = (multiplicity of y among x's slots) / d.
Kernel srw_kernel(const Graph& graph);

// Vector helpers. Reductions run sequentially in index order.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

/// out = P v. Rows are distributed over OpenMP threads; each row is summed
/// sequentially so the result does not depend on the thread count.
void apply(const Kernel& kernel, std::span<const double> v, std::span<double> out);
std::vector<double> apply(const Kernel& kernel, std::span<const double> v);

/// Single-threaded reference for `apply`.
void apply_serial(const Kernel& kernel, std::span<const double> v, std::span<double> out);
std::vector<double> apply_serial(const Kernel& kernel, std::span<const double> v);

/// (I - P) psi, evaluated row-wise as sum_y P(x,y) (psi(x) - psi(y)).
std::vector<double> laplacian(const Kernel& kernel, std::span<const double> psi);

/// <psi, (I - P) psi>
double dirichlet_form(const Kernel& kernel, std::span<const double> psi);

/// ||(I - P) psi||^2
double laplacian_norm_sq(const Kernel& kernel, std::span<const double> psi);

/// ||(I - P) psi||^2 / <psi, (I - P) psi>; throws for a constant psi.
double rayleigh_ratio(const Kernel& kernel, std::span<const double> psi);

/// <psi, (I - P^t) psi>, accumulated as sum_{i<t} <(I - P) psi, P^i psi>.
double quadratic_under_power(const Kernel& kernel, std::span<const double> psi, std::size_t t);

/// quadratic_under_power for every entry of `times` (any order) with a
/// single sweep of max(times) kernel applications.
std::vector<double> quadratic_under_powers(const Kernel& kernel, std::span<const double> psi,
                                           std::span<const std::size_t> times);

}  // namespace escape
