#include "escape/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "escape/error.hpp"
#include "escape/philox.hpp"

namespace escape {
namespace {

constexpr std::uint64_t kStartSeed = 0x5eed'2a11'0c0f'fee5ULL;
constexpr std::size_t kPowerLimit = 1024;

void remove_mean(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

// v <- v - c w
void axpy(std::vector<double>& v, double c, const std::vector<double>& w) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
}

std::vector<double> start_vector(std::size_t n) {
  const CounterRng rng(kStartSeed, n, RngDomain::eigen_start);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform(i) - 0.5;
  remove_mean(v);
  scale(v, 1.0 / norm(v));
  return v;
}

// (I + P)/2 v
void shifted_apply(const Kernel& kernel, const std::vector<double>& v, std::vector<double>& out) {
  apply(kernel, v, out);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 0.5 * (v[i] + out[i]);
}

void fix_sign(std::vector<double>& psi) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    if (std::abs(psi[i]) > std::abs(psi[best]) + 1e-12) best = i;
  }
  if (psi[best] < 0) scale(psi, -1.0);
}

SpectralResult finish(const Kernel& kernel, std::vector<double> psi, long iterations,
                      EigenMethod method) {
  fix_sign(psi);
  std::vector<double> shifted(psi.size());
  shifted_apply(kernel, psi, shifted);
  const double rho = dot(psi, shifted);
  axpy(shifted, rho, psi);
  SpectralResult out;
  out.lambda = 2.0 * rho - 1.0;
  out.residual = 2.0 * norm(shifted);
  out.psi = std::move(psi);
  out.iterations = iterations;
  out.method = method;
  return out;
}

void validate(const Kernel& kernel, double tol) {
  if (kernel.size() < 2) {
    throw Error(Errc::no_second_eigenvalue, "a single-state kernel has no second eigenvalue");
  }
  if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "eigensolver tolerance must be positive");
}

SpectralResult power_iteration(const Kernel& kernel, double tol, long max_iter) {
  validate(kernel, tol);
  auto x = start_vector(kernel.size());
  std::vector<double> y(x.size());
  std::vector<double> r(x.size());
  double residual = 0.0;
  for (long it = 1; it <= max_iter; ++it) {
    shifted_apply(kernel, x, y);
    const double rho = dot(x, y);
    r = y;
    axpy(r, rho, x);
    residual = 2.0 * norm(r);
    if (residual <= tol) return finish(kernel, std::move(x), it, EigenMethod::power);
    x.swap(y);
    remove_mean(x);
    scale(x, 1.0 / norm(x));
  }
  throw ConvergenceError("power iteration did not reach residual " + std::to_string(tol) +
                             " within " + std::to_string(max_iter) + " iterations",
                         residual, max_iter);
}

// Basis of the Rayleigh-Ritz step: columns q[0..k) with a[j] = A q[j].
struct Basis {
  std::vector<double> q[3];
  std::vector<double> a[3];
  std::size_t k = 0;
};

// Gram-Schmidt (two passes) of the candidate column into the basis; dropped
// when it collapses below `drop` of its incoming norm.
void append(Basis& b, std::vector<double>& v, std::vector<double>& av) {
  constexpr double drop = 1e-10;
  const double before = norm(v);
  if (!(before > 0.0)) return;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < b.k; ++i) {
      const double c = dot(b.q[i], v);
      axpy(v, c, b.q[i]);
      axpy(av, c, b.a[i]);
    }
  }
  const double after = norm(v);
  if (after <= drop * before) return;
  scale(v, 1.0 / after);
  scale(av, 1.0 / after);
  b.q[b.k].swap(v);
  b.a[b.k].swap(av);
  ++b.k;
}

// Block-size-one LOBPCG. A x is carried through the Ritz combinations and
// recomputed explicitly every kRefresh iterations and before convergence is
// reported.
SpectralResult lobpcg(const Kernel& kernel, double tol, long max_iter) {
  constexpr long kRefresh = 64;
  validate(kernel, tol);
  const std::size_t n = kernel.size();
  auto x = start_vector(n);
  std::vector<double> ax(n), r(n), ar(n), p, ap;
  shifted_apply(kernel, x, ax);
  Basis b;
  double residual = 0.0;
  for (long it = 1; it <= max_iter; ++it) {
    bool fresh = false;
    if (it % kRefresh == 0) {
      remove_mean(x);
      scale(x, 1.0 / norm(x));
      shifted_apply(kernel, x, ax);
      fresh = true;
    }
    for (;;) {
      const double rho = dot(x, ax);
      for (std::size_t i = 0; i < n; ++i) r[i] = ax[i] - rho * x[i];
      residual = 2.0 * norm(r);
      if (residual > tol || fresh) break;
      shifted_apply(kernel, x, ax);
      fresh = true;
    }
    if (residual <= tol) return finish(kernel, std::move(x), it, EigenMethod::lobpcg);
    remove_mean(r);
    shifted_apply(kernel, r, ar);

    b.k = 0;
    append(b, x, ax);
    append(b, r, ar);
    if (!p.empty()) append(b, p, ap);
    const auto k = static_cast<Eigen::Index>(b.k);
    Eigen::MatrixXd H(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i; j < k; ++j) {
        const double h = dot(b.q[i], b.a[j]);
        H(i, j) = h;
        H(j, i) = h;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const Eigen::VectorXd c = eig.eigenvectors().col(k - 1);

    x.assign(n, 0.0);
    ax.assign(n, 0.0);
    if (k > 1) {
      p.assign(n, 0.0);
      ap.assign(n, 0.0);
    } else {
      p.clear();
      ap.clear();
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      const double cj = c(j);
      const auto& q = b.q[j];
      const auto& a = b.a[j];
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += cj * q[i];
        ax[i] += cj * a[i];
      }
      if (j > 0) {
        for (std::size_t i = 0; i < n; ++i) {
          p[i] += cj * q[i];
          ap[i] += cj * a[i];
        }
      }
    }
    const double s = 1.0 / norm(x);
    scale(x, s);
    scale(ax, s);
    // The basis buffers were swapped out of r and ar; restore their sizes.
    r.resize(n);
    ar.resize(n);
  }
  throw ConvergenceError("lobpcg did not reach residual " + std::to_string(tol) + " within " +
                             std::to_string(max_iter) + " iterations",
                         residual, max_iter);
}

}  // namespace

std::string_view to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::power:
      return "power";
    case EigenMethod::lobpcg:
      return "lobpcg";
    case EigenMethod::automatic:
      return "automatic";
  }
  return "automatic";
}

EigenMethod parse_eigen_method(std::string_view s) {
  if (s == "power") return EigenMethod::power;
  if (s == "lobpcg") return EigenMethod::lobpcg;
  if (s == "automatic" || s == "auto") return EigenMethod::automatic;
  throw Error(Errc::config, "unknown eigensolver '" + std::string(s) + "'");
}

SpectralResult second_eigenpair(const Kernel& kernel, double tol, long max_iter) {
  return power_iteration(kernel, tol, max_iter);
}

SpectralResult second_eigenpair(const Kernel& kernel, const SpectralOptions& options) {
  switch (options.method) {
    case EigenMethod::power:
      return power_iteration(kernel, options.tol, options.max_iter);
    case EigenMethod::lobpcg:
      return lobpcg(kernel, options.tol, options.max_iter);
    case EigenMethod::automatic:
      break;
  }
  return kernel.size() <= kPowerLimit ? power_iteration(kernel, options.tol, options.max_iter)
                                      : lobpcg(kernel, options.tol, options.max_iter);
}

}  // namespace escape
