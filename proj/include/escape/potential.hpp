#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "escape/graph.hpp"
#include "escape/kernel.hpp"

namespace escape {

/// Heat-flow potential phi = sum_{i<k} P^i f for the dyadic k = 2^m selected by
/// the search, together with every quantity the search inspected.
struct PotentialResult {
  std::vector<double> phi;
  std::size_t k = 0;      // 2^m
  std::size_t m = 0;      // selected dyadic exponent
  std::size_t ell = 0;    // starting exponent: 2^ell theta <= 1/2 < 2^(ell+1) theta
  double theta = 0.0;     // ||P f - f||, measured
  double ratio = 0.0;     // rayleigh_ratio(phi)
  double seed_norm = 0.0; // ||f||
  /// a_j = <phi_{2^j}, f> for j = ell, ..., m + 1 (a_values[i] is a_{ell+i}).
  std::vector<double> a_values;
  /// <P^j f, f> for j = 0, ..., 2^(m+1) - 1.
  std::vector<double> autocorrelation;

  double a(std::size_t j) const { return a_values.at(j - ell); }
};

/// Lower bounds on E[dist(X_0, X_t)^2] on a time grid. A series that a
/// constructor does not fill is left empty.
struct BoundCurve {
  std::vector<std::size_t> times;
  std::vector<double> exact_bound;      // p* <psi,(I-P^t)psi> / <psi,(I-P)psi>
  std::vector<double> quadratic_bound;  // p* (t - t^2 R / 2)
  std::vector<double> improved_bound;   // lower bound on E[(dist+1)^2]: twice exact
  std::vector<double> geometric_bound;  // p* (1 + lambda + ... + lambda^(t-1))
  std::vector<double> linear_bound;     // p* t / 2 inside the relaxation window, NaN outside
  std::vector<double> upper_bound;      // 2t/d on cycles with loops; upper, not lower
  double p_star = 0.0;
};

struct HeatFlowOptions {
  /// Cap on kernel applications spent by the dyadic search.
  std::size_t max_applies = std::size_t{1} << 26;
};

/// Mean-zero, unit-norm indicator of the box [0, box_side)^dim on a cycle or
/// torus.
std::vector<double> folner_indicator(const Graph& graph, std::size_t box_side);

PotentialResult heat_flow_potential(const Kernel& kernel, std::span<const double> f,
                                    double theta_cap, const HeatFlowOptions& options = {});

/// Fills exact, quadratic and improved bounds for the potential psi.
BoundCurve escape_lower_bound(const Kernel& kernel, std::span<const double> psi,
                              std::span<const std::size_t> times);

/// Fills the geometric-sum bound and the half-linear bound p* t / 2 for
/// t <= 1/(1 - lambda).
BoundCurve finite_bound_curve(double lambda, double p_star, std::span<const std::size_t> times);

/// p* t / 2, valid for t <= 1 / (32 (1 - lambda)).
double nearly_amenable_bound(double lambda, double p_star, std::size_t t);

}  // namespace escape
