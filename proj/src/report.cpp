#include "escape/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "escape/error.hpp"
#include "escape/format.hpp"
#include "escape/harmonic.hpp"
#include "escape/kernel.hpp"
#include "escape/martingale.hpp"
#include "escape/spectral.hpp"

namespace escape {
namespace {

constexpr double kIdentityTol = 1e-9;

bool wants(const RunConfig& cfg, std::string_view name) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

bool is_martingale_check(std::string_view name) {
  return name == "mghit" || name == "l1mg" || name == "yuval" || name == "mgocc";
}

Json check_to_json(const NamedCheck& c) {
  Json j;
  j["name"] = c.name;
  j["verdict"] = to_string(c.verdict);
  j["note"] = c.note;
  Json items = Json::array();
  for (const auto& it : c.items) {
    items.push_back({{"label", it.label},
                     {"measured", it.measured},
                     {"bound", it.bound},
                     {"ci", it.ci},
                     {"verdict", to_string(it.verdict)}});
  }
  j["items"] = std::move(items);
  return j;
}

// Selected martingale lemma checks; numeric defaults come from cfg.defaults.
std::vector<NamedCheck> run_martingale_checks(const RunConfig& cfg, const MartingaleSpec& spec,
                                              const std::vector<std::string>& names, Json& data) {
  MartingaleParams p = cfg.martingale.params;
  p.c_occ = cfg.defaults.c_occ;
  p.tolerance_sigmas = cfg.defaults.tolerance_sigmas;
  p.censor_threshold = cfg.defaults.censor_threshold;
  data["martingale"] = {{"family", to_string(spec.family)},
                        {"step_bound", spec.step_bound()},
                        {"dimension", spec.dimension()},
                        {"second_moment_error", conditional_second_moment_error(spec)}};
  std::vector<NamedCheck> out;
  for (const auto& n : names) {
    if (n == "mghit") out.push_back(check_mghit(spec, p));
    if (n == "l1mg") out.push_back(check_l1mg(spec, p));
    if (n == "yuval") out.push_back(check_yuval(spec, p));
    if (n == "mgocc") out.push_back(check_mgocc(spec, p));
  }
  return out;
}

std::vector<NamedCheck> scalar_martingale_checks(const RunConfig& cfg,
                                                 const std::vector<std::string>& names, Json& data) {
  const MartingaleSpec spec = cfg.martingale.family == MartingaleFamily::lazy
                                  ? MartingaleSpec::lazy(cfg.martingale.holding)
                                  : MartingaleSpec::srw();
  return run_martingale_checks(cfg, spec, names, data);
}

// Lazily built pipeline state shared by the stages.
class Pipeline {
 public:
  explicit Pipeline(const RunConfig& cfg)
      : cfg_(cfg), graph_(build_graph(cfg.graph)), kernel_(srw_kernel(graph_)) {}

  const Graph& graph() const { return graph_; }
  const Kernel& kernel() const { return kernel_; }

  const SpectralResult& spectrum() {
    if (!spectrum_) {
      SpectralOptions opt;
      opt.tol = cfg_.defaults.tol;
      opt.max_iter = cfg_.defaults.max_iter;
      opt.method = cfg_.defaults.eigen_method;
      spectrum_ = second_eigenpair(kernel_, opt);
    }
    return *spectrum_;
  }

  const std::vector<double>& potential() {
    if (!psi_) {
      if (cfg_.potential.mode == PotentialMode::eigenfunction) {
        psi_ = spectrum().psi;
      } else {
        std::size_t side = cfg_.potential.box_side;
        if (side == 0) {
          const auto& fam = cfg_.graph.family;
          if (const auto* c = std::get_if<Cycle>(&fam)) side = c->n / 2;
          if (const auto* t = std::get_if<Torus>(&fam)) side = t->n / 2;
        }
        const auto seed = folner_indicator(graph_, side);
        heat_ = heat_flow_potential(kernel_, seed, cfg_.potential.theta_cap);
        psi_ = heat_->phi;
      }
    }
    return *psi_;
  }

  Json potential_json() {
    potential();
    Json j;
    j["mode"] = to_string(cfg_.potential.mode);
    j["dirichlet_form"] = dirichlet_form(kernel_, *psi_);
    j["rayleigh_ratio"] = rayleigh_ratio(kernel_, *psi_);
    if (heat_) {
      j["theta"] = heat_->theta;
      j["ell"] = heat_->ell;
      j["m"] = heat_->m;
      j["k"] = heat_->k;
      j["a_values"] = heat_->a_values;
      j["ratio_over_theta"] = heat_->ratio / heat_->theta;
    }
    return j;
  }

  std::optional<double> eigenvalue_of_potential() {
    if (cfg_.potential.mode == PotentialMode::eigenfunction) return spectrum().lambda;
    return std::nullopt;
  }

  BoundCurve curve() {
    const auto& sp = spectrum();
    const auto times = bound_times(cfg_, sp.relaxation_time());
    BoundCurve c = escape_lower_bound(kernel_, potential(), times);
    const BoundCurve fin = finite_bound_curve(sp.lambda, kernel_.p_star(), times);
    c.geometric_bound = fin.geometric_bound;
    c.linear_bound = fin.linear_bound;
    if (std::holds_alternative<Cycle>(cfg_.graph.family)) {
      const double d = static_cast<double>(graph_.degree());
      for (std::size_t t : times) c.upper_bound.push_back(2.0 * static_cast<double>(t) / d);
    }
    return c;
  }

  std::size_t inequality_horizon() const {
    return cfg_.inequality_horizon > 0 ? cfg_.inequality_horizon
                                       : std::max<std::size_t>(1, cfg_.walk.t_max / 2);
  }

  const WalkSummary& walk() {
    if (!walk_) {
      WalkConfig w = cfg_.walk;
      if (wants(cfg_, "smallball")) {
        if (w.occupation_horizons.empty()) w.occupation_horizons.push_back(w.t_max);
        const std::size_t T = inequality_horizon();
        if (T <= w.t_max &&
            std::find(w.occupation_horizons.begin(), w.occupation_horizons.end(), T) ==
                w.occupation_horizons.end()) {
          w.occupation_horizons.push_back(T);
        }
      }
      walk_ = simulate(kernel_, graph_, w);
    }
    return *walk_;
  }

  NamedCheck harmonic_check(Json& data) {
    const auto& psi = potential();
    const Embedding emb = embed(graph_, kernel_, psi);
    const DefectReport rep = defect_report(graph_, kernel_, emb);
    const double ratio = rayleigh_ratio(kernel_, psi);
    const double half = 0.5 * ratio;
    const std::size_t t =
        cfg_.harmonic_time > 0 ? cfg_.harmonic_time : std::min<std::size_t>(16, cfg_.walk.t_max);
    const auto ends =
        sample_endpoints(kernel_, cfg_.walk.x0, t, cfg_.walk.n_samples, cfg_.walk.seed);
    NamedCheck check = embedded_martingale_check(graph_, kernel_, emb, cfg_.walk.x0, ends, t,
                                                 eigenvalue_of_potential(),
                                                 cfg_.defaults.tolerance_sigmas);
    std::vector<CheckItem> items;
    items.push_back(at_most("max |local_energy - 1|", rep.energy_deviation(), kIdentityTol, 0.0));
    items.push_back(at_most("|defect - R/2| / (R/2)", std::abs(rep.defect - half) / half,
                            kIdentityTol, 0.0));
    items.push_back(at_most("defect spread over sampled vertices", rep.defect_spread(),
                            kIdentityTol, 0.0));
    items.push_back(at_most("lipschitz <= sqrt(1/p*)", rep.lipschitz,
                            std::sqrt(1.0 / kernel_.p_star()) + kIdentityTol, 0.0));
    check.items.insert(check.items.begin(), items.begin(), items.end());
    check.settle();
    data["harmonic"] = {{"norm_const", emb.norm_const},
                        {"defect", rep.defect},
                        {"rayleigh_ratio", ratio},
                        {"lipschitz", rep.lipschitz},
                        {"energy_deviation", rep.energy_deviation()},
                        {"walk_time", t}};
    return check;
  }

  std::vector<NamedCheck> martingale_checks(const std::vector<std::string>& names, Json& data) {
    if (cfg_.martingale.family != MartingaleFamily::embedded) {
      return scalar_martingale_checks(cfg_, names, data);
    }
    const Embedding emb = embed(graph_, kernel_, potential());
    return run_martingale_checks(cfg_, MartingaleSpec::embedded(graph_, kernel_, emb, cfg_.walk.x0),
                                 names, data);
  }

  bool has_walk() const { return walk_.has_value(); }

 private:
  const RunConfig& cfg_;
  Graph graph_;
  Kernel kernel_;
  std::optional<SpectralResult> spectrum_;
  std::optional<std::vector<double>> psi_;
  std::optional<PotentialResult> heat_;
  std::optional<WalkSummary> walk_;
};

Json spectrum_json(const SpectralResult& s) {
  return {{"lambda", s.lambda},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"method", to_string(s.method)},
          {"relaxation_time", s.relaxation_time()}};
}

Json graph_json(const RunConfig& cfg, const Graph& g, const Kernel& k) {
  return {{"description", describe(cfg.graph)},
          {"size", g.size()},
          {"degree", g.degree()},
          {"self_loops", g.self_loops()},
          {"p_star", k.p_star()},
          {"eccentricity", bfs_distances(g, 0).eccentricity()}};
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::graph:
      return "graph";
    case Stage::spectrum:
      return "spectrum";
    case Stage::bound:
      return "bound";
    case Stage::harmonic:
      return "harmonic";
    case Stage::simulate:
      return "simulate";
    case Stage::verify:
      return "verify";
    case Stage::martingale:
      return "martingale";
    case Stage::sweep:
      return "sweep";
  }
  return "verify";
}

Stage parse_stage(std::string_view s) {
  for (Stage st : {Stage::graph, Stage::spectrum, Stage::bound, Stage::harmonic, Stage::simulate,
                   Stage::verify, Stage::martingale, Stage::sweep}) {
    if (to_string(st) == s) return st;
  }
  throw Error(Errc::config, "unknown subcommand '" + std::string(s) + "'");
}

int Report::exit_code() const {
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return 1;
  }
  return 0;
}

const NamedCheck* Report::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::not_converged:
    case Errc::search_exhausted:
      return 3;
    default:
      return 2;
  }
}

std::vector<std::size_t> bound_times(const RunConfig& cfg, double relaxation) {
  std::vector<std::size_t> grid = cfg.times;
  if (grid.empty()) {
    for (std::size_t t = 1; t <= cfg.walk.t_max; t *= 2) grid.push_back(t);
    if (grid.back() != cfg.walk.t_max) grid.push_back(cfg.walk.t_max);
  }
  std::vector<std::size_t> out;
  const double limit = relaxation * (1.0 + 1e-9);
  for (std::size_t t : grid) {
    if (t >= 1 && t <= cfg.walk.t_max && static_cast<double>(t) <= limit) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

NamedCheck conjecture_sweep(const std::vector<GraphSpec>& families,
                            const std::vector<double>& eps0_grid, std::size_t n_samples,
                            std::uint64_t seed, Json& data) {
  NamedCheck check;
  check.name = "conjecture-sweep";
  check.note = "exploratory: min_t mean_sq_dist[t] d / t, no verdict";
  Json rows = Json::array();
  for (const auto& spec : families) {
    const Graph g = build_graph(spec);
    const Kernel k = srw_kernel(g);
    const std::uint32_t D = bfs_distances(g, 0).eccentricity();
    const double d = static_cast<double>(g.degree());
    std::vector<std::size_t> windows;
    std::size_t t_max = 1;
    for (double eps0 : eps0_grid) {
      const auto w = static_cast<std::size_t>(std::floor(eps0 * D * D + 1e-9));
      windows.push_back(w);
      t_max = std::max(t_max, w);
    }
    WalkConfig w;
    w.t_max = t_max;
    w.n_samples = n_samples;
    w.seed = seed;
    const WalkSummary s = simulate(k, g, w);
    std::vector<double> ratio;
    for (std::size_t t = 1; t <= t_max; ++t) {
      ratio.push_back(s.mean_sq_dist[t] * d / static_cast<double>(t));
    }
    Json per = Json::array();
    for (std::size_t i = 0; i < eps0_grid.size(); ++i) {
      Json e = {{"eps0", eps0_grid[i]}, {"window", windows[i]}};
      if (windows[i] >= 1) {
        const auto it = std::min_element(ratio.begin(), ratio.begin() + windows[i]);
        e["min_ratio"] = *it;
        e["argmin"] = static_cast<std::size_t>(it - ratio.begin()) + 1;
      } else {
        e["min_ratio"] = nullptr;
        e["argmin"] = nullptr;
      }
      per.push_back(std::move(e));
    }
    rows.push_back({{"graph", describe(spec)},
                    {"diameter", D},
                    {"degree", g.degree()},
                    {"t_max", t_max},
                    {"windows", std::move(per)},
                    {"ratio", ratio}});
  }
  data["sweep"] = std::move(rows);
  check.verdict = Verdict::inconclusive;
  return check;
}

Report run(const RunConfig& cfg, Stage stage) {
  Report rep;
  rep.stage = stage;
  rep.config = config_to_json(cfg);
  rep.seed = cfg.walk.seed;

  if (stage == Stage::sweep) {
    const auto families = cfg.sweep.families;
    rep.checks.push_back(
        conjecture_sweep(families, cfg.sweep.eps0_grid, cfg.sweep.n_samples, cfg.walk.seed, rep.data));
    return rep;
  }
  if (stage == Stage::martingale && cfg.martingale.family != MartingaleFamily::embedded) {
    // Scalar martingales need no graph.
    std::vector<std::string> names;
    for (const auto& c : cfg.checks) {
      if (is_martingale_check(c)) names.push_back(c);
    }
    if (names.empty()) names = {"mghit", "l1mg", "yuval", "mgocc"};
    rep.checks = scalar_martingale_checks(cfg, names, rep.data);
    return rep;
  }

  Pipeline p(cfg);
  rep.data["graph"] = graph_json(cfg, p.graph(), p.kernel());
  switch (stage) {
    case Stage::graph:
      return rep;
    case Stage::spectrum:
      rep.data["spectrum"] = spectrum_json(p.spectrum());
      return rep;
    case Stage::bound:
      rep.data["spectrum"] = spectrum_json(p.spectrum());
      rep.data["potential"] = p.potential_json();
      rep.curve = p.curve();
      return rep;
    case Stage::harmonic:
      if (cfg.potential.mode == PotentialMode::eigenfunction) {
        rep.data["spectrum"] = spectrum_json(p.spectrum());
      }
      rep.data["potential"] = p.potential_json();
      rep.checks.push_back(p.harmonic_check(rep.data));
      return rep;
    case Stage::simulate:
      rep.walk = p.walk();
      return rep;
    case Stage::martingale: {
      std::vector<std::string> names;
      for (const auto& c : cfg.checks) {
        if (is_martingale_check(c)) names.push_back(c);
      }
      if (names.empty()) names = {"mghit", "l1mg", "yuval", "mgocc"};
      rep.checks = p.martingale_checks(names, rep.data);
      return rep;
    }
    case Stage::verify:
    case Stage::sweep:
      break;
  }

  // verify: every configured check, in the configured order.
  std::optional<std::vector<NamedCheck>> inequalities;
  std::vector<std::string> martingale_names;
  for (const auto& c : cfg.checks) {
    if (is_martingale_check(c)) martingale_names.push_back(c);
  }
  std::optional<std::vector<NamedCheck>> martingale;
  for (const auto& name : cfg.checks) {
    if (name == "bounds") {
      rep.data["spectrum"] = spectrum_json(p.spectrum());
      rep.data["potential"] = p.potential_json();
      rep.curve = p.curve();
      NamedCheck c = verify_against_bounds(p.walk(), *rep.curve, cfg.defaults.tolerance_sigmas);
      if (rep.curve->times.empty()) c.note = "relaxation window contains no bound times";
      rep.checks.push_back(std::move(c));
    } else if (name == "mark" || name == "lindrift" || name == "smallball") {
      if (!inequalities) {
        InequalityParams ip;
        ip.horizon = p.inequality_horizon();
        ip.degree = p.graph().degree();
        ip.step_bound = std::max<std::uint32_t>(1, p.walk().step_bound);
        ip.c_occ = cfg.defaults.c_occ;
        ip.tolerance_sigmas = cfg.defaults.tolerance_sigmas;
        ip.censor_threshold = cfg.defaults.censor_threshold;
        inequalities = verify_walk_inequalities(p.walk(), ip);
      }
      for (const auto& c : *inequalities) {
        if (c.name == name) rep.checks.push_back(c);
      }
    } else if (is_martingale_check(name)) {
      if (!martingale) martingale = p.martingale_checks(martingale_names, rep.data);
      for (const auto& c : *martingale) {
        if (c.name == name) rep.checks.push_back(c);
      }
    } else if (name == "harmonic") {
      rep.data["potential"] = p.potential_json();
      rep.checks.push_back(p.harmonic_check(rep.data));
    } else if (name == "conjecture-sweep") {
      const auto families =
          cfg.sweep.families.empty() ? std::vector<GraphSpec>{cfg.graph} : cfg.sweep.families;
      rep.checks.push_back(conjecture_sweep(families, cfg.sweep.eps0_grid, cfg.sweep.n_samples,
                                            cfg.walk.seed, rep.data));
    }
  }
  if (p.has_walk()) rep.walk = p.walk();
  return rep;
}

std::string to_json_text(const Report& report) {
  Json j;
  j["tool"] = "escape";
  j["version"] = kToolVersion;
  j["stage"] = to_string(report.stage);
  j["seed"] = report.seed;
  j["config"] = report.config;
  j["defaults"] = report.config.at("defaults");
  Json checks = Json::array();
  for (const auto& c : report.checks) checks.push_back(check_to_json(c));
  j["checks"] = std::move(checks);
  j["data"] = report.data;

  std::map<std::size_t, std::size_t> at;
  if (report.curve) {
    for (std::size_t i = 0; i < report.curve->times.size(); ++i) at[report.curve->times[i]] = i;
  }
  auto series_value = [&](const std::vector<double>& s, std::size_t t) -> Json {
    const auto it = at.find(t);
    if (it == at.end() || s.empty() || std::isnan(s[it->second])) return nullptr;
    return s[it->second];
  };
  auto row = [&](std::size_t t) {
    Json r;
    r["time"] = t;
    if (report.walk) {
      r["mean_dist"] = report.walk->mean_dist[t];
      r["mean_sq_dist"] = report.walk->mean_sq_dist[t];
      r["ci_half_width"] = report.walk->ci_half_width[t];
    } else {
      r["mean_dist"] = nullptr;
      r["mean_sq_dist"] = nullptr;
      r["ci_half_width"] = nullptr;
    }
    const BoundCurve empty;
    const BoundCurve& c = report.curve ? *report.curve : empty;
    r["exact_bound"] = series_value(c.exact_bound, t);
    r["quadratic_bound"] = series_value(c.quadratic_bound, t);
    r["improved_bound"] = series_value(c.improved_bound, t);
    r["geometric_bound"] = series_value(c.geometric_bound, t);
    return r;
  };
  Json series = Json::array();
  if (report.walk) {
    for (std::size_t t = 0; t <= report.walk->t_max; ++t) series.push_back(row(t));
  } else if (report.curve) {
    for (std::size_t t : report.curve->times) series.push_back(row(t));
  }
  j["series"] = std::move(series);

  if (report.walk) {
    const auto& w = *report.walk;
    Json occ = Json::array();
    for (const auto& e : w.occupation) {
      occ.push_back({{"kind", e.kind == OccupationKind::diffusive ? "diffusive" : "hitting"},
                     {"epsilon", e.epsilon},
                     {"horizon", e.horizon},
                     {"k", e.k},
                     {"radius", e.radius},
                     {"fraction", e.fraction},
                     {"ci_half_width", 3.0 * e.se},
                     {"fraction_over_epsilon", e.fraction / e.epsilon}});
    }
    Json hit = Json::array();
    for (const auto& h : w.hitting) {
      hit.push_back({{"k", h.k},
                     {"mean", h.mean},
                     {"ci_half_width", 3.0 * h.se},
                     {"censored", h.censored}});
    }
    j["walk"] = {{"t_max", w.t_max},
                 {"n_samples", w.n_samples},
                 {"x0", w.x0},
                 {"degree", w.degree},
                 {"step_bound", w.step_bound},
                 {"occupation", std::move(occ)},
                 {"hitting", std::move(hit)}};
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  out << "time,mean_dist,mean_sq_dist,ci_half_width,exact_bound,quadratic_bound,improved_bound,"
         "geometric_bound\n";
  std::map<std::size_t, std::size_t> at;
  if (report.curve) {
    for (std::size_t i = 0; i < report.curve->times.size(); ++i) at[report.curve->times[i]] = i;
  }
  auto cell = [&](const std::vector<double>& s, std::size_t t) -> std::string {
    const auto it = at.find(t);
    if (it == at.end() || s.empty() || std::isnan(s[it->second])) return "";
    return format_double(s[it->second]);
  };
  auto row = [&](std::size_t t) {
    out << t << ',';
    if (report.walk) {
      out << format_double(report.walk->mean_dist[t]) << ','
          << format_double(report.walk->mean_sq_dist[t]) << ','
          << format_double(report.walk->ci_half_width[t]);
    } else {
      out << ",,";
    }
    if (report.curve) {
      const auto& c = *report.curve;
      out << ',' << cell(c.exact_bound, t) << ',' << cell(c.quadratic_bound, t) << ','
          << cell(c.improved_bound, t) << ',' << cell(c.geometric_bound, t);
    } else {
      out << ",,,,";
    }
    out << '\n';
  };
  if (report.walk) {
    for (std::size_t t = 0; t <= report.walk->t_max; ++t) row(t);
  } else if (report.curve) {
    for (std::size_t t : report.curve->times) row(t);
  }
  return out.str();
}

}  // namespace escape
