#include "escape/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "escape/error.hpp"
#include "escape/format.hpp"
#include "escape/philox.hpp"

namespace escape {
namespace {

constexpr std::size_t kSampledVertices = 8;
constexpr double kIdentityTol = 1e-9;

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    const double d = a[g] - b[g];
    s += d * d;
  }
  return s;
}

void check_dimensions(const Kernel& kernel, const Embedding& emb) {
  if (kernel.size() != emb.n || emb.matrix.size() != emb.n * emb.m) {
    throw Error(Errc::invalid_argument, "embedding does not match the kernel dimension");
  }
}

// sum_y P(x,y) Psi(y)
void neighbour_average(const Kernel& kernel, const Embedding& emb, Vertex x,
                       std::vector<double>& avg) {
  avg.assign(emb.m, 0.0);
  const auto ys = kernel.targets(x);
  const auto ps = kernel.probs(x);
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const auto r = emb.row(ys[j]);
    for (std::size_t g = 0; g < emb.m; ++g) avg[g] += ps[j] * r[g];
  }
}

}  // namespace

Embedding embed(const Graph& graph, const Kernel& kernel, std::span<const double> psi) {
  const Group* group = graph.group();
  if (group == nullptr) {
    throw Error(Errc::unsupported, "embedding needs a graph with group structure");
  }
  const std::size_t n = graph.size();
  if (kernel.size() != n || psi.size() != n) {
    throw Error(Errc::invalid_argument, "potential length does not match the graph");
  }
  const std::size_t m = group->order();
  if (n != 0 && m > kEmbeddingEntryLimit / n) {
    throw Error(Errc::size_limit, "embedding would need " + std::to_string(n) + " x " +
                                      std::to_string(m) + " entries, above the limit");
  }
  const double form = dirichlet_form(kernel, psi);
  if (!(form > 1e-14 * dot(psi, psi))) {
    throw Error(Errc::degenerate_potential, "potential has zero Dirichlet form");
  }

  Embedding emb;
  emb.n = n;
  emb.m = m;
  emb.norm_const = std::sqrt(2.0 * form);
  emb.source_psi.assign(psi.begin(), psi.end());
  emb.matrix.resize(n * m);
  const double inv = 1.0 / emb.norm_const;
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (n * m >= (1u << 16))
  for (std::int64_t x = 0; x < rows; ++x) {
    double* out = emb.matrix.data() + static_cast<std::size_t>(x) * m;
    for (std::size_t g = 0; g < m; ++g) {
      out[g] = psi[group->multiply(g, static_cast<std::size_t>(x))] * inv;
    }
  }
  return emb;
}

double embedded_sq_distance(const Embedding& emb, Vertex x, Vertex y) {
  return sq_distance(emb.row(x), emb.row(y));
}

double harmonic_defect_at(const Kernel& kernel, const Embedding& emb, Vertex x) {
  check_dimensions(kernel, emb);
  std::vector<double> avg;
  neighbour_average(kernel, emb, x, avg);
  return sq_distance(emb.row(x), avg);
}

double DefectReport::energy_deviation() const {
  double worst = 0.0;
  for (double e : local_energy) worst = std::max(worst, std::abs(e - 1.0));
  return worst;
}

double DefectReport::defect_spread() const {
  double worst = 0.0;
  const double scale = defect > 0.0 ? defect : 1.0;
  for (double d : sampled_defects) worst = std::max(worst, std::abs(d - defect) / scale);
  return worst;
}

DefectReport defect_report(const Graph& graph, const Kernel& kernel, const Embedding& emb,
                           std::uint64_t seed) {
  check_dimensions(kernel, emb);
  if (graph.size() != emb.n) {
    throw Error(Errc::invalid_argument, "embedding does not match the graph");
  }
  const std::size_t n = emb.n;
  DefectReport rep;
  rep.local_energy.assign(n, 0.0);
  std::vector<double> edge_max(n, 0.0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (n * emb.m >= (1u << 16))
  for (std::int64_t xi = 0; xi < rows; ++xi) {
    const auto x = static_cast<Vertex>(xi);
    const auto ys = kernel.targets(x);
    const auto ps = kernel.probs(x);
    double energy = 0.0;
    double longest = 0.0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (ys[j] == x) continue;
      const double sq = sq_distance(emb.row(x), emb.row(ys[j]));
      energy += ps[j] * sq;
      longest = std::max(longest, sq);
    }
    rep.local_energy[x] = energy;
    edge_max[x] = longest;
  }
  double longest = 0.0;
  for (double v : edge_max) longest = std::max(longest, v);
  rep.lipschitz = std::sqrt(longest);

  rep.defect = harmonic_defect_at(kernel, emb, 0);
  const CounterRng rng(seed, 0, RngDomain::vertex_sample);
  const std::size_t samples = std::min(kSampledVertices, n);
  for (std::size_t i = 0; i < samples; ++i) {
    const Vertex x = rng.below(i, static_cast<std::uint32_t>(n));
    rep.sampled_vertices.push_back(x);
    rep.sampled_defects.push_back(harmonic_defect_at(kernel, emb, x));
  }
  return rep;
}

void write_embedding_csv(std::ostream& out, const Embedding& emb) {
  for (std::size_t x = 0; x < emb.n; ++x) {
    out << x;
    for (double v : emb.row(static_cast<Vertex>(x))) out << ',' << format_double(v);
    out << '\n';
  }
}

NamedCheck embedded_martingale_check(const Graph& graph, const Kernel& kernel,
                                     const Embedding& emb, Vertex x0,
                                     std::span<const Vertex> endpoints, std::size_t t,
                                     std::optional<double> lambda, double sigmas) {
  check_dimensions(kernel, emb);
  if (graph.size() != emb.n || x0 >= emb.n) {
    throw Error(Errc::invalid_argument, "embedding does not match the graph");
  }
  NamedCheck check;
  check.name = "harmonic";

  double mean_gap = 0.0;
  double eigen_gap = 0.0;
  std::vector<double> avg;
  std::vector<double> slots(emb.m);
  const double inv_d = 1.0 / static_cast<double>(graph.degree());
  for (std::size_t xi = 0; xi < emb.n; ++xi) {
    const auto x = static_cast<Vertex>(xi);
    neighbour_average(kernel, emb, x, avg);
    std::fill(slots.begin(), slots.end(), 0.0);
    for (Vertex y : graph.neighbors(x)) {
      const auto r = emb.row(y);
      for (std::size_t g = 0; g < emb.m; ++g) slots[g] += r[g];
    }
    const auto own = emb.row(x);
    const double scale = std::max(std::sqrt(dot(own, own)), 1e-300);
    double gap = 0.0;
    double egap = 0.0;
    for (std::size_t g = 0; g < emb.m; ++g) {
      const double a = slots[g] * inv_d - avg[g];
      gap += a * a;
      if (lambda) {
        const double b = avg[g] - *lambda * own[g];
        egap += b * b;
      }
    }
    mean_gap = std::max(mean_gap, std::sqrt(gap) / scale);
    eigen_gap = std::max(eigen_gap, std::sqrt(egap) / scale);
  }
  check.items.push_back(at_most("conditional mean vs kernel average", mean_gap, kIdentityTol, 0.0));
  if (lambda) {
    check.items.push_back(at_most("P Psi = lambda Psi", eigen_gap, kIdentityTol, 0.0));
  }

  if (!endpoints.empty()) {
    const auto start = emb.row(x0);
    const std::size_t samples = endpoints.size();
    double sum = 0.0;
    double sum_sq = 0.0;
    for (Vertex y : endpoints) {
      const double v = sq_distance(emb.row(y), start);
      sum += v;
      sum_sq += v * v;
    }
    const double ns = static_cast<double>(samples);
    const double mean = sum / ns;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - ns * mean * mean) / (ns - 1.0)) : 0.0;
    const double exact = quadratic_under_power(kernel, emb.source_psi, t) /
                         dirichlet_form(kernel, emb.source_psi);
    const double ci = sigmas * std::sqrt(var / ns) + 1e-9 * std::max(1.0, exact);

    CheckItem match{"E||Psi(X_t)-Psi(X_0)||^2 vs exact", mean, exact, ci, Verdict::fail};
    if (std::abs(mean - exact) <= ci) match.verdict = Verdict::pass;
    check.items.push_back(match);

    const double td = static_cast<double>(t);
    const double ratio = rayleigh_ratio(kernel, emb.source_psi);
    check.items.push_back(at_least("E||Psi(X_t)-Psi(X_0)||^2 >= t(1 - Rt/2)", mean,
                                   td * (1.0 - 0.5 * ratio * td), ci));
    check.items.push_back(at_most("E||Psi(X_t)-Psi(X_0)||^2 <= t", mean, td, ci));
  }
  check.settle();
  return check;
}

}  // namespace escape
