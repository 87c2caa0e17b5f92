#include "escape/potential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "escape/error.hpp"

namespace escape {
namespace {

// Relative slack for window comparisons of integer times against real limits.
constexpr double kWindowSlack = 1e-9;

std::size_t box_dimension(const Graph& graph, std::size_t& side) {
  const auto& spec = graph.spec();
  if (spec) {
    if (const auto* c = std::get_if<Cycle>(&spec->family)) {
      side = c->n;
      return 1;
    }
    if (const auto* t = std::get_if<Torus>(&spec->family)) {
      side = t->n;
      return t->dim;
    }
  }
  throw Error(Errc::unsupported, "folner_indicator needs a cycle or torus graph");
}

double geometric_sum(double lambda, std::size_t t) {
  if (t == 0) return 0.0;
  if (lambda == 0.0) return 1.0;
  const double gap = 1.0 - lambda;
  if (lambda > 0.0) return -std::expm1(static_cast<double>(t) * std::log(lambda)) / gap;
  return (1.0 - std::pow(lambda, static_cast<double>(t))) / gap;
}

}  // namespace

std::vector<double> folner_indicator(const Graph& graph, std::size_t box_side) {
  std::size_t n = 0;
  const std::size_t dim = box_dimension(graph, n);
  if (box_side == 0 || box_side >= n) {
    throw Error(Errc::invalid_argument, "box_side must satisfy 1 <= box_side < n (n = " +
                                            std::to_string(n) + ")");
  }
  std::vector<double> f(graph.size(), 0.0);
  std::size_t inside = 0;
  for (std::size_t x = 0; x < graph.size(); ++x) {
    std::size_t rest = x;
    bool in = true;
    for (std::size_t i = 0; i < dim && in; ++i) {
      in = rest % n < box_side;
      rest /= n;
    }
    if (in) {
      f[x] = 1.0;
      ++inside;
    }
  }
  const double mean = static_cast<double>(inside) / static_cast<double>(graph.size());
  for (double& v : f) v -= mean;
  const double s = 1.0 / norm(f);
  for (double& v : f) v *= s;
  return f;
}

PotentialResult heat_flow_potential(const Kernel& kernel, std::span<const double> f,
                                    double theta_cap, const HeatFlowOptions& options) {
  const std::size_t n = kernel.size();
  if (f.size() != n) throw Error(Errc::invalid_argument, "seed length does not match kernel");

  PotentialResult out;
  out.seed_norm = norm(f);
  if (std::abs(out.seed_norm - 1.0) > 1e-9) {
    throw Error(Errc::invalid_argument, "seed must have unit norm");
  }
  double total = 0.0;
  for (double v : f) total += v;
  if (std::abs(total) > 1e-9 * std::sqrt(static_cast<double>(n))) {
    throw Error(Errc::invalid_argument, "seed must be orthogonal to the constants");
  }

  auto power = apply(kernel, f);
  for (std::size_t i = 0; i < n; ++i) power[i] -= f[i];
  out.theta = norm(power);
  if (out.theta == 0.0) {
    throw Error(Errc::degenerate_seed, "seed is P-invariant (theta = 0)");
  }
  if (out.theta >= 0.5) {
    throw Error(Errc::theta_too_large,
                "seed has theta = " + std::to_string(out.theta) + " >= 1/2");
  }
  if (out.theta > theta_cap) {
    throw Error(Errc::theta_too_large, "seed has theta = " + std::to_string(out.theta) +
                                           " above the cap " + std::to_string(theta_cap));
  }

  while (std::ldexp(out.theta, static_cast<int>(out.ell) + 1) <= 0.5) ++out.ell;
  const double target = 1.0 / (8.0 * out.theta);

  // phi accumulates P^i f for i < built; power holds P^built f.
  std::vector<double> phi(n, 0.0);
  power.assign(f.begin(), f.end());
  std::vector<double> next(n);
  std::size_t built = 0;
  auto extend_to = [&](std::size_t k) {
    if (k > options.max_applies) {
      throw Error(Errc::search_exhausted,
                  "dyadic search needs " + std::to_string(k) + " kernel applications, above the cap");
    }
    while (built < k) {
      for (std::size_t i = 0; i < n; ++i) phi[i] += power[i];
      out.autocorrelation.push_back(dot(power, f));
      apply(kernel, power, next);
      power.swap(next);
      ++built;
    }
  };

  extend_to(std::size_t{1} << out.ell);
  out.a_values.push_back(dot(phi, f));
  const std::size_t m_max = out.ell + 64;
  for (std::size_t m = out.ell; m < m_max && m + 1 < 63; ++m) {
    std::vector<double> candidate = phi;
    extend_to(std::size_t{1} << (m + 1));
    out.a_values.push_back(dot(phi, f));
    const double a_m = out.a_values[m - out.ell];
    const double a_next = out.a_values[m + 1 - out.ell];
    if (2.0 * a_m - a_next >= target) {
      out.m = m;
      out.k = std::size_t{1} << m;
      out.phi = std::move(candidate);
      out.ratio = rayleigh_ratio(kernel, out.phi);
      return out;
    }
  }
  throw Error(Errc::search_exhausted, "no dyadic level satisfied 2a_m - a_{m+1} >= 1/(8 theta)");
}

BoundCurve escape_lower_bound(const Kernel& kernel, std::span<const double> psi,
                              std::span<const std::size_t> times) {
  const double ratio = rayleigh_ratio(kernel, psi);
  const double form = dirichlet_form(kernel, psi);
  const auto quad = quadratic_under_powers(kernel, psi, times);

  BoundCurve curve;
  curve.p_star = kernel.p_star();
  curve.times.assign(times.begin(), times.end());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = static_cast<double>(times[j]);
    const double exact = curve.p_star * quad[j] / form;
    curve.exact_bound.push_back(exact);
    curve.quadratic_bound.push_back(curve.p_star * (t - 0.5 * t * t * ratio));
    curve.improved_bound.push_back(2.0 * exact);
  }
  return curve;
}

BoundCurve finite_bound_curve(double lambda, double p_star, std::span<const std::size_t> times) {
  if (!(lambda > -1.0 && lambda < 1.0)) {
    throw Error(Errc::invalid_argument, "lambda must lie in (-1, 1)");
  }
  if (!(p_star > 0.0 && p_star <= 1.0)) {
    throw Error(Errc::invalid_argument, "p_star must lie in (0, 1]");
  }
  const double relaxation = 1.0 / (1.0 - lambda);
  BoundCurve curve;
  curve.p_star = p_star;
  curve.times.assign(times.begin(), times.end());
  for (std::size_t t : times) {
    const double geometric = p_star * geometric_sum(lambda, t);
    curve.geometric_bound.push_back(geometric);
    const double td = static_cast<double>(t);
    if (td <= relaxation * (1.0 + kWindowSlack)) {
      const double linear = p_star * td / 2.0;
      if (geometric < linear * (1.0 - 1e-12)) {
        throw std::logic_error("geometric bound fell below p* t/2 inside the relaxation window");
      }
      curve.linear_bound.push_back(linear);
    } else {
      curve.linear_bound.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return curve;
}

double nearly_amenable_bound(double lambda, double p_star, std::size_t t) {
  if (!(lambda > -1.0 && lambda < 1.0)) {
    throw Error(Errc::invalid_argument, "lambda must lie in (-1, 1)");
  }
  const double window = 1.0 / (32.0 * (1.0 - lambda));
  if (static_cast<double>(t) > window * (1.0 + kWindowSlack)) {
    throw Error(Errc::window_exceeded, "t = " + std::to_string(t) +
                                           " exceeds the validity window " +
                                           std::to_string(window));
  }
  return p_star * static_cast<double>(t) / 2.0;
}

}  // namespace escape
