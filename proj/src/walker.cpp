#include "escape/walker.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "escape/error.hpp"
#include "escape/format.hpp"
#include "escape/philox.hpp"

namespace escape {
namespace {

using u128 = unsigned __int128;

// Cumulative transition probabilities aligned with kernel.probs().
struct Sampler {
  const Kernel& kernel;
  std::vector<double> cumulative;

  explicit Sampler(const Kernel& k) : kernel(k) {
    for (std::size_t x = 0; x < k.size(); ++x) {
      double acc = 0.0;
      for (double p : k.probs(static_cast<Vertex>(x))) {
        acc += p;
        cumulative.push_back(acc);
      }
    }
  }

  Vertex step(Vertex x, double u) const {
    const auto ys = kernel.targets(x);
    const std::size_t base = static_cast<std::size_t>(ys.data() - kernel.targets(0).data());
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      if (u < cumulative[base + j]) return ys[j];
    }
    return ys.back();
  }
};

struct Plan {
  std::vector<std::uint32_t> dist;
  std::vector<OccupationEntry> occupation;
  std::vector<std::size_t> radii;
};

struct Acc {
  std::vector<std::uint64_t> s1, s2;
  std::vector<u128> s3, s4;
  std::vector<std::uint64_t> occ_sum, occ_sq;
  std::vector<std::uint64_t> hit_sum, hit_sq, censored;

  Acc(std::size_t times, std::size_t occ, std::size_t hits)
      : s1(times), s2(times), s3(times), s4(times), occ_sum(occ), occ_sq(occ), hit_sum(hits),
        hit_sq(hits), censored(hits) {}

  void merge(const Acc& o) {
    for (std::size_t i = 0; i < s1.size(); ++i) {
      s1[i] += o.s1[i];
      s2[i] += o.s2[i];
      s3[i] += o.s3[i];
      s4[i] += o.s4[i];
    }
    for (std::size_t i = 0; i < occ_sum.size(); ++i) {
      occ_sum[i] += o.occ_sum[i];
      occ_sq[i] += o.occ_sq[i];
    }
    for (std::size_t i = 0; i < hit_sum.size(); ++i) {
      hit_sum[i] += o.hit_sum[i];
      hit_sq[i] += o.hit_sq[i];
      censored[i] += o.censored[i];
    }
  }
};

void validate(const Kernel& kernel, const Graph& graph, const WalkConfig& cfg) {
  if (cfg.t_max < 1) throw Error(Errc::invalid_argument, "t_max must be at least 1");
  if (cfg.n_samples < 1) throw Error(Errc::invalid_argument, "n_samples must be at least 1");
  if (kernel.size() != graph.size()) {
    throw Error(Errc::invalid_argument, "kernel and graph sizes differ");
  }
  if (cfg.x0 >= graph.size()) {
    throw Error(Errc::invalid_argument, "x0 = " + std::to_string(cfg.x0) + " is out of range");
  }
  for (double e : cfg.occupation_epsilons) {
    if (!(e > 0.0)) throw Error(Errc::invalid_argument, "occupation epsilons must be positive");
  }
  for (std::size_t h : cfg.occupation_horizons) {
    if (h < 1 || h > cfg.t_max) {
      throw Error(Errc::invalid_argument, "occupation horizon must lie in [1, t_max]");
    }
  }
}

std::uint32_t step_bound_of(const Graph& graph, const std::vector<std::uint32_t>& dist,
                            Vertex x0) {
  std::uint32_t b = 0;
  for (Vertex y : graph.neighbors(x0)) b = std::max(b, dist[y]);
  return b;
}

Plan make_plan(const Graph& graph, const WalkConfig& cfg, std::uint32_t step_bound,
               std::vector<std::uint32_t> dist) {
  Plan plan;
  plan.dist = std::move(dist);
  plan.radii = cfg.hitting_radii;
  std::vector<std::size_t> horizons = cfg.occupation_horizons;
  if (horizons.empty()) horizons.push_back(cfg.t_max);
  const double d = static_cast<double>(graph.degree());
  for (std::size_t T : horizons) {
    for (double eps : cfg.occupation_epsilons) {
      OccupationEntry e;
      e.kind = OccupationKind::diffusive;
      e.epsilon = eps;
      e.horizon = T;
      e.radius = radius_floor(eps * std::sqrt(static_cast<double>(T) / d));
      plan.occupation.push_back(e);
    }
    if (step_bound == 0) continue;
    for (std::size_t k : cfg.hitting_radii) {
      for (double eps : cfg.occupation_epsilons) {
        OccupationEntry e;
        e.kind = OccupationKind::hitting;
        e.epsilon = eps;
        e.horizon = T;
        e.k = k;
        e.radius = radius_floor(eps * static_cast<double>(k) / step_bound);
        plan.occupation.push_back(e);
      }
    }
  }
  return plan;
}

void run_trajectory(const Sampler& sampler, const Plan& plan, const WalkConfig& cfg,
                    std::uint64_t index, Acc& acc, std::vector<std::uint64_t>& occ,
                    std::vector<std::uint64_t>& hit) {
  const CounterRng rng(cfg.seed, index, RngDomain::walk);
  std::fill(occ.begin(), occ.end(), 0);
  std::fill(hit.begin(), hit.end(), std::numeric_limits<std::uint64_t>::max());
  Vertex x = cfg.x0;
  for (std::size_t t = 0; t <= cfg.t_max; ++t) {
    if (t > 0) x = sampler.step(x, rng.uniform(t - 1));
    const std::uint64_t d = plan.dist[x];
    const std::uint64_t d2 = d * d;
    acc.s1[t] += d;
    acc.s2[t] += d2;
    acc.s3[t] += static_cast<u128>(d2) * d;
    acc.s4[t] += static_cast<u128>(d2) * d2;
    for (std::size_t j = 0; j < occ.size(); ++j) {
      const auto& e = plan.occupation[j];
      if (t <= e.horizon && d <= e.radius) ++occ[j];
    }
    for (std::size_t j = 0; j < hit.size(); ++j) {
      if (hit[j] == std::numeric_limits<std::uint64_t>::max() && d >= plan.radii[j]) hit[j] = t;
    }
  }
  for (std::size_t j = 0; j < occ.size(); ++j) {
    acc.occ_sum[j] += occ[j];
    acc.occ_sq[j] += occ[j] * occ[j];
  }
  for (std::size_t j = 0; j < hit.size(); ++j) {
    std::uint64_t h = hit[j];
    if (h == std::numeric_limits<std::uint64_t>::max()) {
      h = cfg.t_max;
      ++acc.censored[j];
    }
    acc.hit_sum[j] += h;
    acc.hit_sq[j] += h * h;
  }
}

// Standard error of a sample mean from exact first and second sums.
double standard_error(u128 sum, u128 sum_sq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const u128 nn = n;
  const u128 num = nn * sum_sq - sum * sum;  // >= 0 by Cauchy-Schwarz
  const double var = static_cast<double>(num) / (static_cast<double>(n) * static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

WalkSummary summarize(const Plan& plan, const WalkConfig& cfg, const Graph& graph,
                      std::uint32_t step_bound, const Acc& acc) {
  const std::uint64_t n = cfg.n_samples;
  const double nd = static_cast<double>(n);
  WalkSummary s;
  s.t_max = cfg.t_max;
  s.n_samples = cfg.n_samples;
  s.seed = cfg.seed;
  s.x0 = cfg.x0;
  s.degree = graph.degree();
  s.step_bound = step_bound;
  const std::size_t times = cfg.t_max + 1;
  for (std::size_t t = 0; t < times; ++t) {
    const u128 s1 = acc.s1[t], s2 = acc.s2[t], s3 = acc.s3[t], s4 = acc.s4[t];
    s.mean_dist.push_back(static_cast<double>(s1) / nd);
    s.se_dist.push_back(standard_error(s1, s2, n));
    s.mean_sq_dist.push_back(static_cast<double>(s2) / nd);
    s.se_sq_dist.push_back(standard_error(s2, s4, n));
    s.ci_half_width.push_back(3.0 * s.se_sq_dist.back());
    const u128 a1 = s2 + 2 * s1 + n;
    const u128 a2 = s4 + 4 * s3 + 6 * s2 + 4 * s1 + n;
    s.mean_shift_sq.push_back(static_cast<double>(a1) / nd);
    s.se_shift_sq.push_back(standard_error(a1, a2, n));
  }
  for (std::size_t j = 0; j < plan.occupation.size(); ++j) {
    OccupationEntry e = plan.occupation[j];
    const double T = static_cast<double>(e.horizon);
    e.fraction = static_cast<double>(acc.occ_sum[j]) / (nd * T);
    e.se = standard_error(acc.occ_sum[j], acc.occ_sq[j], n) / T;
    s.occupation.push_back(e);
  }
  for (std::size_t j = 0; j < plan.radii.size(); ++j) {
    HittingEntry h;
    h.k = plan.radii[j];
    h.mean = static_cast<double>(acc.hit_sum[j]) / nd;
    h.se = standard_error(acc.hit_sum[j], acc.hit_sq[j], n);
    h.censored = acc.censored[j];
    s.hitting.push_back(h);
  }
  return s;
}

WalkSummary simulate_impl(const Kernel& kernel, const Graph& graph, const WalkConfig& cfg,
                          int threads, bool parallel) {
  validate(kernel, graph, cfg);
  auto field = bfs_distances(graph, cfg.x0);
  const std::uint32_t step_bound = step_bound_of(graph, field.dist, cfg.x0);
  const Plan plan = make_plan(graph, cfg, step_bound, std::move(field.dist));
  const Sampler sampler(kernel);
  const std::size_t times = cfg.t_max + 1;
  Acc total(times, plan.occupation.size(), plan.radii.size());
  const auto samples = static_cast<std::int64_t>(cfg.n_samples);

  if (!parallel) {
    std::vector<std::uint64_t> occ(plan.occupation.size()), hit(plan.radii.size());
    for (std::int64_t i = 0; i < samples; ++i) {
      run_trajectory(sampler, plan, cfg, static_cast<std::uint64_t>(i), total, occ, hit);
    }
    return summarize(plan, cfg, graph, step_bound, total);
  }

  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
  {
    Acc local(times, plan.occupation.size(), plan.radii.size());
    std::vector<std::uint64_t> occ(plan.occupation.size()), hit(plan.radii.size());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < samples; ++i) {
      run_trajectory(sampler, plan, cfg, static_cast<std::uint64_t>(i), local, occ, hit);
    }
#pragma omp critical(escape_walk_merge)
    total.merge(local);
  }
  return summarize(plan, cfg, graph, step_bound, total);
}

bool hypothesis_holds(const HittingEntry& h, std::size_t horizon, double sigmas) {
  return h.mean - sigmas * h.se <= static_cast<double>(horizon);
}

std::string at_time(std::string_view what, std::size_t t) {
  return std::string(what) + " t=" + std::to_string(t);
}

}  // namespace

std::uint32_t radius_floor(double r) {
  if (!(r >= 0.0)) return 0;
  return static_cast<std::uint32_t>(std::floor(r + 1e-9));
}

const HittingEntry* WalkSummary::hitting_for(std::size_t k) const {
  for (const auto& h : hitting) {
    if (h.k == k) return &h;
  }
  return nullptr;
}

const OccupationEntry* WalkSummary::occupation_for(OccupationKind kind, double epsilon,
                                                   std::size_t horizon, std::size_t k) const {
  for (const auto& e : occupation) {
    if (e.kind == kind && e.epsilon == epsilon && e.horizon == horizon &&
        (kind == OccupationKind::diffusive || e.k == k)) {
      return &e;
    }
  }
  return nullptr;
}

WalkSummary simulate(const Kernel& kernel, const Graph& graph, const WalkConfig& cfg,
                     int threads) {
  return simulate_impl(kernel, graph, cfg, threads, true);
}

WalkSummary simulate_serial(const Kernel& kernel, const Graph& graph, const WalkConfig& cfg) {
  return simulate_impl(kernel, graph, cfg, 1, false);
}

std::vector<Vertex> sample_endpoints(const Kernel& kernel, Vertex x0, std::size_t t,
                                     std::size_t n_samples, std::uint64_t seed) {
  if (x0 >= kernel.size()) throw Error(Errc::invalid_argument, "x0 is out of range");
  const Sampler sampler(kernel);
  std::vector<Vertex> ends(n_samples);
  const auto samples = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < samples; ++i) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(i), RngDomain::walk);
    Vertex x = x0;
    for (std::size_t s = 0; s < t; ++s) x = sampler.step(x, rng.uniform(s));
    ends[static_cast<std::size_t>(i)] = x;
  }
  return ends;
}

NamedCheck verify_against_bounds(const WalkSummary& summary, const BoundCurve& curve,
                                 double tolerance_sigmas) {
  const std::size_t m = curve.times.size();
  auto require_grid = [&](const std::vector<double>& series, const char* name) {
    if (!series.empty() && series.size() != m) {
      throw Error(Errc::grid_mismatch, std::string(name) + " does not match the time grid");
    }
  };
  require_grid(curve.exact_bound, "exact_bound");
  require_grid(curve.quadratic_bound, "quadratic_bound");
  require_grid(curve.improved_bound, "improved_bound");
  require_grid(curve.geometric_bound, "geometric_bound");
  require_grid(curve.linear_bound, "linear_bound");
  require_grid(curve.upper_bound, "upper_bound");
  for (std::size_t t : curve.times) {
    if (t > summary.t_max) {
      throw Error(Errc::grid_mismatch,
                  "bound time " + std::to_string(t) + " exceeds the simulated horizon");
    }
  }

  NamedCheck check;
  check.name = "bounds";
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t t = curve.times[j];
    const double sq = summary.mean_sq_dist[t];
    const double ci = tolerance_sigmas * summary.se_sq_dist[t];
    auto lower = [&](const std::vector<double>& series, const char* name) {
      if (series.empty() || std::isnan(series[j])) return;
      check.items.push_back(at_least(at_time(name, t), sq, series[j], ci));
    };
    lower(curve.exact_bound, "exact");
    lower(curve.quadratic_bound, "quadratic");
    lower(curve.geometric_bound, "geometric");
    lower(curve.linear_bound, "linear");
    if (!curve.improved_bound.empty()) {
      check.items.push_back(at_least(at_time("improved", t), summary.mean_shift_sq[t],
                                     curve.improved_bound[j],
                                     tolerance_sigmas * summary.se_shift_sq[t]));
    }
    if (!curve.upper_bound.empty()) {
      check.items.push_back(at_most(at_time("upper", t), sq, curve.upper_bound[j], ci));
    }
  }
  if (check.items.empty()) check.note = "no bound times to compare";
  check.settle();
  return check;
}

std::vector<NamedCheck> verify_walk_inequalities(const WalkSummary& summary,
                                                 const InequalityParams& params) {
  const std::size_t T = params.horizon;
  if (T < 1) throw Error(Errc::invalid_argument, "inequality horizon must be at least 1");
  if (2 * T > summary.t_max) {
    throw Error(Errc::insufficient_horizon,
                "walk inequalities at T = " + std::to_string(T) + " need t_max >= " +
                    std::to_string(2 * T) + ", got " + std::to_string(summary.t_max));
  }
  const double sig = params.tolerance_sigmas;
  const auto& md = summary.mean_dist;
  const auto& se = summary.se_dist;
  const double n = static_cast<double>(summary.n_samples);

  NamedCheck mark;
  mark.name = "mark";
  {
    std::size_t best = 0;
    for (std::size_t t = 0; t <= T; ++t) {
      if (md[t] - md[1] > md[best] - md[1]) best = t;
    }
    const double bound = 0.5 * (md[best] - md[1]);
    const double ci = sig * (se[T] + 0.5 * (se[best] + se[1]));
    mark.items.push_back(at_least("E dist[T] >= max_t (E dist[t] - E dist[1]) / 2", md[T], bound, ci));
  }
  mark.settle();

  // Radii whose hypothesis h(k) <= T is supported by the simulation.
  std::vector<const HittingEntry*> usable;
  NamedCheck lindrift;
  lindrift.name = "lindrift";
  std::string skipped;
  for (const auto& h : summary.hitting) {
    const double censor = static_cast<double>(h.censored) / n;
    if (censor > params.censor_threshold) {
      CheckItem item{"k=" + std::to_string(h.k) + " censoring " + format_double(censor), h.mean,
                     static_cast<double>(T), sig * h.se, Verdict::inconclusive};
      lindrift.items.push_back(item);
      continue;
    }
    if (!hypothesis_holds(h, T, sig)) {
      skipped += (skipped.empty() ? "" : ", ") + std::to_string(h.k);
      continue;
    }
    usable.push_back(&h);
    const double bound = static_cast<double>(h.k) / 12.0 - 0.5 * md[1];
    const double ci = sig * (se[2 * T] + 0.5 * se[1]);
    lindrift.items.push_back(at_least("k=" + std::to_string(h.k) + ": E dist[2T] >= k/12 - E dist[1]/2",
                                      md[2 * T], bound, ci));
  }
  if (!skipped.empty()) lindrift.note = "h(k) > T for k in {" + skipped + "}";
  lindrift.settle();

  NamedCheck smallball;
  smallball.name = "smallball";
  for (const HittingEntry* h : usable) {
    for (const auto& e : summary.occupation) {
      if (e.kind != OccupationKind::hitting || e.k != h->k || e.horizon != T) continue;
      if (e.epsilon * static_cast<double>(h->k) < 1.0 - 1e-12) continue;
      smallball.items.push_back(at_most("k=" + std::to_string(h->k) + " eps=" + format_double(e.epsilon) +
                                            " radius=" + std::to_string(e.radius),
                                        e.fraction, params.c_occ * e.epsilon, sig * e.se));
    }
  }
  for (const auto& e : summary.occupation) {
    if (e.kind != OccupationKind::diffusive) continue;
    if (e.epsilon * std::sqrt(static_cast<double>(e.horizon)) < 1.0 - 1e-12) continue;
    smallball.items.push_back(at_most("T=" + std::to_string(e.horizon) + " eps=" + format_double(e.epsilon) +
                                          " radius=" + std::to_string(e.radius) + " (diffusive)",
                                      e.fraction, params.c_occ * e.epsilon, sig * e.se));
  }
  smallball.settle();

  return {mark, lindrift, smallball};
}

}  // namespace escape
