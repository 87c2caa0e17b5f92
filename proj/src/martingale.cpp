#include "escape/martingale.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "escape/error.hpp"
#include "escape/format.hpp"
#include "escape/philox.hpp"

namespace escape {
namespace {

// Stream tags keep the trajectories of different lemmas independent.
enum class Tag : std::uint64_t { summary = 1, mghit = 2, l1mg = 3, yuval = 4, mgocc = 5 };

std::uint64_t stream_of(Tag tag, std::uint64_t sub, std::uint64_t index) {
  return (static_cast<std::uint64_t>(tag) << 56) | (sub << 48) | index;
}

constexpr std::size_t kChunk = 256;

// Draw source for one trajectory; single bits are peeled off cached blocks.
class Draws {
 public:
  explicit Draws(const CounterRng& rng) : rng_(rng) {}

  bool bit(std::uint64_t t) {
    const std::uint64_t idx = t >> 7;
    if (idx != cached_) {
      block_ = rng_.block(idx);
      cached_ = idx;
    }
    return (block_[(t >> 5) & 3] >> (t & 31)) & 1u;
  }
  double uniform(std::uint64_t t) const { return rng_.uniform(t); }

 private:
  const CounterRng& rng_;
  std::uint64_t cached_ = ~std::uint64_t{0};
  Philox4x32::Block block_{};
};

// The state is an integer step count for the scalar families and a vertex
// for the embedded family.
class Process {
 public:
  Process(const MartingaleSpec& spec, double offset) : spec_(spec) {
    spec.validate();
    if (spec.family == MartingaleFamily::embedded) {
      const auto& emb = *spec.embedding;
      const auto start = emb.row(spec.x0);
      const double start_norm = std::sqrt(dot(start, start));
      // M_t = Psi(X_t) - Psi(x0) + offset u with u = Psi(x0) / ||Psi(x0)||.
      const double shift = offset / start_norm - 1.0;
      increment_.resize(emb.n);
      shifted_.resize(emb.n);
      for (std::size_t y = 0; y < emb.n; ++y) {
        const auto r = emb.row(static_cast<Vertex>(y));
        double inc = 0.0, sh = 0.0;
        for (std::size_t g = 0; g < emb.m; ++g) {
          const double a = r[g] - start[g];
          const double b = r[g] + shift * start[g];
          inc += a * a;
          sh += b * b;
        }
        increment_[y] = std::sqrt(inc);
        shifted_[y] = std::sqrt(sh);
      }
      cumulative_.reserve(spec.kernel->size() * spec.graph->degree());
      for (std::size_t x = 0; x < spec.kernel->size(); ++x) {
        double acc = 0.0;
        for (double p : spec.kernel->probs(static_cast<Vertex>(x))) {
          acc += p;
          cumulative_.push_back(acc);
        }
      }
    } else {
      scale_ = spec.family == MartingaleFamily::lazy ? 1.0 / std::sqrt(1.0 - spec.holding) : 1.0;
    }
    offset_ = offset;
  }

  std::int64_t start() const {
    return spec_.family == MartingaleFamily::embedded ? static_cast<std::int64_t>(spec_.x0) : 0;
  }

  std::int64_t step(std::int64_t s, Draws& draws, std::uint64_t t) const {
    switch (spec_.family) {
      case MartingaleFamily::srw:
        return draws.bit(t) ? s + 1 : s - 1;
      case MartingaleFamily::lazy: {
        const double u = draws.uniform(t);
        if (u < spec_.holding) return s;
        return (u - spec_.holding) < 0.5 * (1.0 - spec_.holding) ? s - 1 : s + 1;
      }
      case MartingaleFamily::embedded:
        break;
    }
    const auto x = static_cast<Vertex>(s);
    const auto ys = spec_.kernel->targets(x);
    const std::size_t base = static_cast<std::size_t>(ys.data() - spec_.kernel->targets(0).data());
    const double u = draws.uniform(t);
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      if (u < cumulative_[base + j]) return ys[j];
    }
    return ys.back();
  }

  // ||M_t - M_0||
  double increment(std::int64_t s) const {
    if (spec_.family == MartingaleFamily::embedded) return increment_[static_cast<std::size_t>(s)];
    return std::abs(static_cast<double>(s)) * scale_;
  }

  // ||M_t|| for the process started at norm `offset`.
  double shifted(std::int64_t s) const {
    if (spec_.family == MartingaleFamily::embedded) return shifted_[static_cast<std::size_t>(s)];
    return std::abs(offset_ + static_cast<double>(s) * scale_);
  }

 private:
  const MartingaleSpec& spec_;
  double scale_ = 1.0;
  double offset_ = 0.0;
  std::vector<double> increment_;
  std::vector<double> shifted_;
  std::vector<double> cumulative_;
};

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

// Mean and standard error, summed in index order.
Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

template <class F>
void for_each_trajectory(std::size_t n, F&& body) {
  const auto samples = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < samples; ++i) body(static_cast<std::uint64_t>(i));
}

std::size_t auto_horizon(std::size_t configured, double scale) {
  if (configured > 0) return configured;
  return static_cast<std::size_t>(std::ceil(40.0 * scale * scale));
}

}  // namespace

std::string_view to_string(MartingaleFamily f) {
  switch (f) {
    case MartingaleFamily::srw:
      return "srw";
    case MartingaleFamily::lazy:
      return "lazy";
    case MartingaleFamily::embedded:
      return "embedded";
  }
  return "srw";
}

MartingaleFamily parse_martingale_family(std::string_view s) {
  if (s == "srw" || s == "srw_on_integers") return MartingaleFamily::srw;
  if (s == "lazy" || s == "lazy_srw") return MartingaleFamily::lazy;
  if (s == "embedded") return MartingaleFamily::embedded;
  throw Error(Errc::config, "unknown martingale family '" + std::string(s) + "'");
}

MartingaleSpec MartingaleSpec::lazy(double p) {
  MartingaleSpec s;
  s.family = MartingaleFamily::lazy;
  s.holding = p;
  return s;
}

MartingaleSpec MartingaleSpec::embedded(const Graph& graph, const Kernel& kernel,
                                        const Embedding& emb, Vertex x0) {
  MartingaleSpec s;
  s.family = MartingaleFamily::embedded;
  s.graph = &graph;
  s.kernel = &kernel;
  s.embedding = &emb;
  s.x0 = x0;
  return s;
}

void MartingaleSpec::validate() const {
  switch (family) {
    case MartingaleFamily::srw:
      return;
    case MartingaleFamily::lazy:
      if (!(holding >= 0.0 && holding < 1.0)) {
        throw Error(Errc::invalid_argument, "holding probability must lie in [0, 1)");
      }
      return;
    case MartingaleFamily::embedded:
      if (graph == nullptr || kernel == nullptr || embedding == nullptr) {
        throw Error(Errc::invalid_argument, "embedded martingale needs graph, kernel and embedding");
      }
      if (kernel->size() != embedding->n || graph->size() != embedding->n || x0 >= embedding->n) {
        throw Error(Errc::invalid_argument, "embedded martingale dimensions disagree");
      }
      return;
  }
}

double MartingaleSpec::step_bound() const {
  validate();
  switch (family) {
    case MartingaleFamily::srw:
      return 1.0;
    case MartingaleFamily::lazy:
      return std::max(1.0, 1.0 / std::sqrt(1.0 - holding));
    case MartingaleFamily::embedded:
      break;
  }
  // Every vertex looks the same under translation; the edges at x0 suffice.
  double longest = 0.0;
  for (Vertex y : kernel->targets(x0)) {
    longest = std::max(longest, std::sqrt(embedded_sq_distance(*embedding, x0, y)));
  }
  return std::max(1.0, longest);
}

std::size_t MartingaleSpec::dimension() const {
  return family == MartingaleFamily::embedded && embedding != nullptr ? embedding->m : 1;
}

double conditional_second_moment_error(const MartingaleSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case MartingaleFamily::srw:
      return std::abs(0.5 * 1.0 + 0.5 * 1.0 - 1.0);
    case MartingaleFamily::lazy: {
      const double s2 = 1.0 / (1.0 - spec.holding);
      return std::abs((1.0 - spec.holding) * s2 - 1.0);
    }
    case MartingaleFamily::embedded:
      break;
  }
  double worst = 0.0;
  for (std::size_t xi = 0; xi < spec.kernel->size(); ++xi) {
    const auto x = static_cast<Vertex>(xi);
    const auto ys = spec.kernel->targets(x);
    const auto ps = spec.kernel->probs(x);
    double m2 = 0.0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      m2 += ps[j] * embedded_sq_distance(*spec.embedding, x, ys[j]);
    }
    worst = std::max(worst, std::abs(m2 - 1.0));
  }
  return worst;
}

MartingaleSummary simulate_martingale(const MartingaleSpec& spec, std::size_t t_max,
                                      std::size_t n_samples, std::uint64_t seed, int threads) {
  if (n_samples < 1) throw Error(Errc::invalid_argument, "n_samples must be at least 1");
  const Process proc(spec, 0.0);
  const std::size_t times = t_max + 1;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  // Per chunk: sum and sum of squares of ||dM|| and ||dM||^2 for each t.
  std::vector<double> acc(chunks * times * 4, 0.0);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    double* a = acc.data() + static_cast<std::size_t>(c) * times * 4;
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n_samples, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const CounterRng rng(seed, stream_of(Tag::summary, 0, i), RngDomain::martingale);
      Draws draws(rng);
      std::int64_t s = proc.start();
      for (std::size_t t = 0; t < times; ++t) {
        if (t > 0) s = proc.step(s, draws, t - 1);
        const double v = proc.increment(s);
        const double v2 = v * v;
        a[4 * t] += v;
        a[4 * t + 1] += v2;
        a[4 * t + 2] += v2;
        a[4 * t + 3] += v2 * v2;
      }
    }
  }
  MartingaleSummary out;
  out.t_max = t_max;
  out.n_samples = n_samples;
  out.seed = seed;
  const double n = static_cast<double>(n_samples);
  for (std::size_t t = 0; t < times; ++t) {
    double s[4] = {0, 0, 0, 0};
    for (std::size_t c = 0; c < chunks; ++c) {
      for (int k = 0; k < 4; ++k) s[k] += acc[(c * times + t) * 4 + k];
    }
    auto se = [&](double sum, double sum_sq) {
      if (n_samples < 2) return 0.0;
      const double mean = sum / n;
      return std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) / n);
    };
    out.mean_increment.push_back(s[0] / n);
    out.se_increment.push_back(se(s[0], s[1]));
    out.mean_sq_increment.push_back(s[2] / n);
    out.se_sq_increment.push_back(se(s[2], s[3]));
  }
  return out;
}

NamedCheck check_mghit(const MartingaleSpec& spec, const MartingaleParams& params) {
  const double B = spec.step_bound();
  const Process proc(spec, 0.0);
  NamedCheck check;
  check.name = "mghit";
  const double sig = params.tolerance_sigmas;
  for (std::size_t r = 0; r < params.hit_radii.size(); ++r) {
    const double R = params.hit_radii[r];
    if (!(R >= 0.0)) throw Error(Errc::invalid_argument, "hitting radius must be nonnegative");
    const std::size_t horizon = auto_horizon(params.hit_horizon, R + B);
    std::vector<double> tau(params.n_samples);
    std::vector<unsigned char> cens(params.n_samples, 0);
    for_each_trajectory(params.n_samples, [&](std::uint64_t i) {
      const CounterRng rng(params.seed, stream_of(Tag::mghit, r, i), RngDomain::martingale);
      Draws draws(rng);
      std::int64_t s = proc.start();
      std::size_t t = 0;
      while (proc.increment(s) < R && t < horizon) {
        s = proc.step(s, draws, t);
        ++t;
      }
      if (proc.increment(s) < R) cens[i] = 1;
      tau[i] = static_cast<double>(t);
    });
    std::size_t censored = 0;
    for (unsigned char c : cens) censored += c;
    const auto m = moments(tau);
    const std::string tag = "R=" + format_double(R);
    const double frac = static_cast<double>(censored) / static_cast<double>(params.n_samples);
    if (frac > params.censor_threshold) {
      check.items.push_back({tag + " censoring " + format_double(frac), m.mean, R * R, sig * m.se,
                             Verdict::inconclusive});
      continue;
    }
    check.items.push_back(at_least(tag + ": E tau >= R^2", m.mean, R * R, sig * m.se));
    check.items.push_back(at_most(tag + ": E tau <= (R+B)^2", m.mean, (R + B) * (R + B), sig * m.se));
  }
  check.settle();
  return check;
}

NamedCheck check_l1mg(const MartingaleSpec& spec, const MartingaleParams& params) {
  const double B = spec.step_bound();
  const std::size_t T = params.l1_horizon;
  if (static_cast<double>(T) < B) throw Error(Errc::invalid_argument, "l1mg needs T >= B");
  const Process proc(spec, 0.0);
  std::vector<double> v(params.n_samples);
  for_each_trajectory(params.n_samples, [&](std::uint64_t i) {
    const CounterRng rng(params.seed, stream_of(Tag::l1mg, 0, i), RngDomain::martingale);
    Draws draws(rng);
    std::int64_t s = proc.start();
    for (std::size_t t = 0; t < T; ++t) s = proc.step(s, draws, t);
    v[i] = proc.increment(s);
  });
  const auto m = moments(v);
  NamedCheck check;
  check.name = "l1mg";
  check.items.push_back(at_least("T=" + std::to_string(T) + ": E||M_T - M_0|| >= sqrt((T-B)/8)",
                                 m.mean, std::sqrt((static_cast<double>(T) - B) / 8.0),
                                 params.tolerance_sigmas * m.se));
  check.settle();
  return check;
}

NamedCheck check_yuval(const MartingaleSpec& spec, const MartingaleParams& params) {
  const double B = spec.step_bound();
  const double R = params.yuval_r;
  const double Rp = params.yuval_r_prime;
  const double offset = params.yuval_offset;
  if (!(R >= Rp && Rp >= 0.0) || !(offset > Rp)) {
    throw Error(Errc::invalid_argument, "yuval needs R >= R' >= 0 and offset > R'");
  }
  const std::size_t horizon = auto_horizon(params.yuval_horizon, 2.0 * R + B);
  const Process proc(spec, offset);
  std::vector<double> hit(params.n_samples, 0.0);
  std::vector<unsigned char> cens(params.n_samples, 0);
  for_each_trajectory(params.n_samples, [&](std::uint64_t i) {
    const CounterRng rng(params.seed, stream_of(Tag::yuval, 0, i), RngDomain::martingale);
    Draws draws(rng);
    std::int64_t s = proc.start();
    for (std::size_t t = 0;; ++t) {
      const double norm = proc.shifted(s);
      if (norm >= offset + R) {
        hit[i] = 1.0;
        return;
      }
      if (norm <= offset - Rp) return;
      if (t == horizon) {
        cens[i] = 1;
        return;
      }
      s = proc.step(s, draws, t);
    }
  });
  std::size_t censored = 0;
  for (unsigned char c : cens) censored += c;
  const auto m = moments(hit);
  const double bound = Rp / (2.0 * R + B);
  NamedCheck check;
  check.name = "yuval";
  const double frac = static_cast<double>(censored) / static_cast<double>(params.n_samples);
  if (frac > params.censor_threshold) {
    check.items.push_back({"censoring " + format_double(frac), m.mean, bound,
                           params.tolerance_sigmas * m.se, Verdict::inconclusive});
  } else {
    check.items.push_back(at_least("p_R >= R'/(2R+B)", m.mean, bound, params.tolerance_sigmas * m.se));
  }
  check.settle();
  return check;
}

NamedCheck check_mgocc(const MartingaleSpec& spec, const MartingaleParams& params) {
  const double B = spec.step_bound();
  const std::size_t T = params.occ_horizon;
  if (T < 1) throw Error(Errc::invalid_argument, "mgocc needs T >= 1");
  const Process proc(spec, 0.0);
  const std::size_t E = params.occ_epsilons.size();
  const double sqrtT = std::sqrt(static_cast<double>(T));
  std::vector<double> radius(E);
  for (std::size_t e = 0; e < E; ++e) radius[e] = params.occ_epsilons[e] * sqrtT;
  std::vector<double> counts(params.n_samples * E, 0.0);
  for_each_trajectory(params.n_samples, [&](std::uint64_t i) {
    const CounterRng rng(params.seed, stream_of(Tag::mgocc, 0, i), RngDomain::martingale);
    Draws draws(rng);
    std::int64_t s = proc.start();
    std::vector<std::uint64_t> c(E, 0);
    for (std::size_t t = 0; t <= T; ++t) {
      if (t > 0) s = proc.step(s, draws, t - 1);
      const double v = proc.increment(s);
      for (std::size_t e = 0; e < E; ++e) c[e] += v <= radius[e];
    }
    for (std::size_t e = 0; e < E; ++e) counts[i * E + e] = static_cast<double>(c[e]);
  });
  NamedCheck check;
  check.name = "mgocc";
  std::string ratios;
  std::vector<double> col(params.n_samples);
  for (std::size_t e = 0; e < E; ++e) {
    const double eps = params.occ_epsilons[e];
    for (std::size_t i = 0; i < params.n_samples; ++i) col[i] = counts[i * E + e];
    const auto m = moments(col);
    const double fraction = m.mean / static_cast<double>(T);
    const double se = m.se / static_cast<double>(T);
    const std::string tag = "eps=" + format_double(eps);
    ratios += (ratios.empty() ? "" : ", ") + tag + " fraction/eps=" + format_double(fraction / eps);
    if (eps * sqrtT < B * (1.0 - 1e-12)) {
      check.items.push_back({tag + " below B/sqrt(T)", fraction, params.c_occ * eps,
                             params.tolerance_sigmas * se, Verdict::inconclusive});
      continue;
    }
    check.items.push_back(at_most(tag + ": occupation <= C_occ eps", fraction, params.c_occ * eps,
                                  params.tolerance_sigmas * se));
  }
  check.note = ratios;
  check.settle();
  return check;
}

std::vector<NamedCheck> verify_martingale_lemmas(const MartingaleSpec& spec,
                                                 const MartingaleParams& params) {
  return {check_mghit(spec, params), check_l1mg(spec, params), check_yuval(spec, params),
          check_mgocc(spec, params)};
}

}  // namespace escape
