#include "escape/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "escape/error.hpp"

namespace escape {
namespace {

// Below this size the OpenMP fork costs more than the row loop.
constexpr std::size_t kParallelRows = 4096;

void check_length(const Kernel& kernel, std::size_t len) {
  if (len != kernel.size()) {
    throw Error(Errc::invalid_argument, "vector length " + std::to_string(len) +
                                            " does not match kernel size " +
                                            std::to_string(kernel.size()));
  }
}

inline double row_product(const Kernel& kernel, Vertex x, std::span<const double> v) {
  const auto ts = kernel.targets(x);
  const auto ps = kernel.probs(x);
  double acc = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) acc += ps[j] * v[ts[j]];
  return acc;
}

}  // namespace

Kernel Kernel::from_rows(std::vector<std::vector<std::pair<Vertex, double>>> rows,
                         std::size_t degree_context) {
  const std::size_t n = rows.size();
  if (n == 0) throw Error(Errc::invalid_argument, "kernel must have at least one state");
  Kernel k;
  k.degree_context_ = degree_context;
  k.p_star_ = 1.0;
  bool any_edge = false;
  for (std::size_t x = 0; x < n; ++x) {
    auto& row = rows[x];
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    Vertex prev = 0;
    bool first = true;
    for (const auto& [y, p] : row) {
      if (y >= n) throw Error(Errc::invalid_argument, "kernel target out of range");
      if (!(p >= 0.0)) throw Error(Errc::invalid_argument, "kernel entry is negative");
      if (!first && y == prev) throw Error(Errc::invalid_argument, "duplicate kernel entry");
      first = false;
      prev = y;
      sum += p;
      k.targets_.push_back(y);
      k.probs_.push_back(p);
      if (y != x && p > 0.0) {
        k.p_star_ = std::min(k.p_star_, p);
        any_edge = true;
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw Error(Errc::invalid_argument,
                  "kernel row " + std::to_string(x) + " does not sum to 1");
    }
    k.offsets_.push_back(k.targets_.size());
  }
  for (std::size_t x = 0; x < n; ++x) {
    const auto ts = k.targets(static_cast<Vertex>(x));
    const auto ps = k.probs(static_cast<Vertex>(x));
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (k.entry(ts[j], static_cast<Vertex>(x)) != ps[j]) {
        throw Error(Errc::invalid_argument, "kernel is not symmetric at (" + std::to_string(x) +
                                                "," + std::to_string(ts[j]) + ")");
      }
    }
  }
  if (!any_edge) k.p_star_ = 1.0;
  return k;
}

double Kernel::entry(Vertex x, Vertex y) const {
  const auto ts = targets(x);
  auto it = std::lower_bound(ts.begin(), ts.end(), y);
  if (it == ts.end() || *it != y) return 0.0;
  return probs(x)[static_cast<std::size_t>(it - ts.begin())];
}

Kernel srw_kernel(const Graph& graph) {
  const std::size_t n = graph.size();
  const std::size_t d = graph.degree();
  // One rounding of 1/d shared by both directions keeps P bit-symmetric.
  const double unit = 1.0 / static_cast<double>(d);

  Kernel k;
  k.degree_context_ = d;
  k.p_star_ = 1.0;
  k.offsets_.reserve(n + 1);
  std::vector<Vertex> slots(d);
  for (std::size_t x = 0; x < n; ++x) {
    const auto nb = graph.neighbors(static_cast<Vertex>(x));
    std::copy(nb.begin(), nb.end(), slots.begin());
    std::sort(slots.begin(), slots.end());
    for (std::size_t j = 0; j < d;) {
      std::size_t mult = 1;
      while (j + mult < d && slots[j + mult] == slots[j]) ++mult;
      const double p = static_cast<double>(mult) * unit;
      k.targets_.push_back(slots[j]);
      k.probs_.push_back(p);
      if (slots[j] != x) k.p_star_ = std::min(k.p_star_, p);
      j += mult;
    }
    k.offsets_.push_back(k.targets_.size());
  }
  return k;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::invalid_argument, "dot: length mismatch");
  // Four interleaved partial sums in a fixed order: deterministic, and not
  // bound by the latency of a single accumulator.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[i & 3] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void apply(const Kernel& kernel, std::span<const double> v, std::span<double> out) {
  check_length(kernel, v.size());
  check_length(kernel, out.size());
  const auto n = static_cast<std::ptrdiff_t>(kernel.size());
#pragma omp parallel for schedule(static) if (kernel.size() >= kParallelRows)
  for (std::ptrdiff_t x = 0; x < n; ++x) {
    out[static_cast<std::size_t>(x)] = row_product(kernel, static_cast<Vertex>(x), v);
  }
}

std::vector<double> apply(const Kernel& kernel, std::span<const double> v) {
  std::vector<double> out(kernel.size());
  apply(kernel, v, out);
  return out;
}

void apply_serial(const Kernel& kernel, std::span<const double> v, std::span<double> out) {
  check_length(kernel, v.size());
  check_length(kernel, out.size());
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    out[x] = row_product(kernel, static_cast<Vertex>(x), v);
  }
}

std::vector<double> apply_serial(const Kernel& kernel, std::span<const double> v) {
  std::vector<double> out(kernel.size());
  apply_serial(kernel, v, out);
  return out;
}

std::vector<double> laplacian(const Kernel& kernel, std::span<const double> psi) {
  check_length(kernel, psi.size());
  std::vector<double> out(psi.size());
  const auto n = static_cast<std::ptrdiff_t>(kernel.size());
#pragma omp parallel for schedule(static) if (kernel.size() >= kParallelRows)
  for (std::ptrdiff_t xi = 0; xi < n; ++xi) {
    const auto x = static_cast<Vertex>(xi);
    const auto ts = kernel.targets(x);
    const auto ps = kernel.probs(x);
    double acc = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j) acc += ps[j] * (psi[x] - psi[ts[j]]);
    out[x] = acc;
  }
  return out;
}

double dirichlet_form(const Kernel& kernel, std::span<const double> psi) {
  const auto lap = laplacian(kernel, psi);
  return std::max(0.0, dot(psi, lap));
}

double laplacian_norm_sq(const Kernel& kernel, std::span<const double> psi) {
  const auto lap = laplacian(kernel, psi);
  return dot(lap, lap);
}

double rayleigh_ratio(const Kernel& kernel, std::span<const double> psi) {
  const auto lap = laplacian(kernel, psi);
  const double form = dot(psi, lap);
  const double scale = dot(psi, psi);
  if (!(form > 1e-14 * scale)) {
    throw Error(Errc::degenerate_potential,
                "potential has zero Dirichlet form (constant on the state space)");
  }
  return dot(lap, lap) / form;
}

double quadratic_under_power(const Kernel& kernel, std::span<const double> psi, std::size_t t) {
  const std::size_t times[] = {t};
  return quadratic_under_powers(kernel, psi, times).front();
}

std::vector<double> quadratic_under_powers(const Kernel& kernel, std::span<const double> psi,
                                           std::span<const std::size_t> times) {
  check_length(kernel, psi.size());
  std::vector<double> out(times.size(), 0.0);
  if (times.empty()) return out;
  const std::size_t t_max = *std::max_element(times.begin(), times.end());

  // partial[t] = sum_{i<t} <(I-P)psi, P^i psi>
  std::vector<double> partial(t_max + 1, 0.0);
  const auto lap = laplacian(kernel, psi);
  std::vector<double> power(psi.begin(), psi.end());
  std::vector<double> next(psi.size());
  for (std::size_t i = 0; i < t_max; ++i) {
    partial[i + 1] = partial[i] + dot(lap, power);
    if (i + 1 < t_max) {
      apply(kernel, power, next);
      power.swap(next);
    }
  }
  for (std::size_t j = 0; j < times.size(); ++j) out[j] = partial[times[j]];
  return out;
}

}  // namespace escape
