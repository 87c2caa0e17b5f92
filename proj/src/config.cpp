#include "escape/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "escape/error.hpp"

namespace escape {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::config, what); }

void only_keys(const Json& j, std::string_view ctx, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) bad(std::string(ctx) + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      bad("unknown key '" + item.key() + "' in " + std::string(ctx));
    }
  }
}

template <class T>
T read(const Json& j, std::string_view key, std::string_view ctx) {
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        bad(std::string(ctx) + "." + std::string(key) + " must be a nonnegative integer");
      }
    }
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(std::string(ctx) + "." + std::string(key) + " has the wrong type");
  }
}

template <class T>
void maybe(const Json& obj, std::string_view key, std::string_view ctx, T& out) {
  const auto it = obj.find(std::string(key));
  if (it != obj.end()) out = read<T>(*it, key, ctx);
}

template <class T>
void maybe_list(const Json& obj, std::string_view key, std::string_view ctx, std::vector<T>& out) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return;
  if (!it->is_array()) bad(std::string(ctx) + "." + std::string(key) + " must be a list");
  out.clear();
  for (const auto& v : *it) out.push_back(read<T>(v, key, ctx));
}

std::size_t need(const Json& obj, std::string_view key, std::string_view ctx) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) bad(std::string(ctx) + " needs '" + std::string(key) + "'");
  return read<std::size_t>(*it, key, ctx);
}

PotentialMode parse_mode(const std::string& s) {
  if (s == "eigenfunction") return PotentialMode::eigenfunction;
  if (s == "heat_flow") return PotentialMode::heat_flow;
  bad("unknown potential mode '" + s + "'");
}

}  // namespace

std::string_view to_string(PotentialMode m) {
  return m == PotentialMode::eigenfunction ? "eigenfunction" : "heat_flow";
}

const std::vector<std::string>& check_registry() {
  static const std::vector<std::string> names{"bounds", "mark",  "lindrift", "smallball",
                                              "mghit",  "l1mg",  "yuval",    "mgocc",
                                              "harmonic", "conjecture-sweep"};
  return names;
}

Json graph_to_json(const GraphSpec& spec) {
  Json j;
  j["family"] = family_name(spec.family);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Torus>) {
          j["n"] = f.n;
          j["dim"] = f.dim;
        } else if constexpr (std::is_same_v<T, Hypercube>) {
          j["k"] = f.k;
        } else if constexpr (std::is_same_v<T, CayleyTable>) {
          j["table"] = f.table;
          j["generators"] = f.generators;
        } else {
          j["n"] = f.n;
        }
      },
      spec.family);
  j["self_loops"] = spec.self_loops;
  return j;
}

GraphSpec graph_from_json(const Json& j) {
  constexpr std::string_view ctx = "graph";
  only_keys(j, ctx, {"family", "n", "dim", "k", "table", "generators", "self_loops"});
  const auto it = j.find("family");
  if (it == j.end()) bad("graph needs 'family'");
  const auto name = read<std::string>(*it, "family", ctx);
  GraphSpec spec;
  maybe(j, "self_loops", ctx, spec.self_loops);
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (j.contains(k)) bad("graph family '" + name + "' does not take '" + k + "'");
    }
  };
  if (name == "cycle") {
    forbid({"dim", "k", "table", "generators"});
    spec.family = Cycle{need(j, "n", ctx)};
  } else if (name == "torus") {
    forbid({"k", "table", "generators"});
    spec.family = Torus{need(j, "n", ctx), need(j, "dim", ctx)};
  } else if (name == "hypercube") {
    forbid({"n", "dim", "table", "generators"});
    spec.family = Hypercube{need(j, "k", ctx)};
  } else if (name == "complete") {
    forbid({"dim", "k", "table", "generators"});
    spec.family = Complete{need(j, "n", ctx)};
  } else if (name == "dihedral") {
    forbid({"dim", "k", "table", "generators"});
    spec.family = Dihedral{need(j, "n", ctx)};
  } else if (name == "lamplighter") {
    forbid({"dim", "k", "table", "generators"});
    spec.family = Lamplighter{need(j, "n", ctx)};
  } else if (name == "cayley") {
    forbid({"n", "dim", "k"});
    CayleyTable t;
    if (!j.contains("table") || !j.contains("generators")) {
      bad("cayley graph needs 'table' and 'generators'");
    }
    try {
      t.table = j.at("table").get<std::vector<std::vector<std::uint32_t>>>();
      t.generators = j.at("generators").get<std::vector<std::uint32_t>>();
    } catch (const nlohmann::json::exception&) {
      bad("cayley table and generators must be lists of nonnegative integers");
    }
    spec.family = std::move(t);
  } else {
    bad("unknown graph family '" + name + "'");
  }
  return spec;
}

Json config_to_json(const RunConfig& cfg) {
  Json j;
  j["graph"] = graph_to_json(cfg.graph);
  j["potential"] = {{"mode", to_string(cfg.potential.mode)},
                    {"box_side", cfg.potential.box_side},
                    {"theta_cap", cfg.potential.theta_cap}};
  const auto& w = cfg.walk;
  j["walk"] = {{"t_max", w.t_max},
               {"n_samples", w.n_samples},
               {"seed", w.seed},
               {"x0", w.x0},
               {"occupation_epsilons", w.occupation_epsilons},
               {"occupation_horizons", w.occupation_horizons},
               {"hitting_radii", w.hitting_radii}};
  j["checks"] = cfg.checks;
  j["times"] = cfg.times;
  j["inequality_horizon"] = cfg.inequality_horizon;
  j["harmonic_time"] = cfg.harmonic_time;
  const auto& m = cfg.martingale;
  const auto& p = m.params;
  j["martingale"] = {{"family", to_string(m.family)},
                     {"holding", m.holding},
                     {"n_samples", p.n_samples},
                     {"seed", p.seed},
                     {"hit_radii", p.hit_radii},
                     {"hit_horizon", p.hit_horizon},
                     {"l1_horizon", p.l1_horizon},
                     {"yuval_offset", p.yuval_offset},
                     {"yuval_r", p.yuval_r},
                     {"yuval_r_prime", p.yuval_r_prime},
                     {"yuval_horizon", p.yuval_horizon},
                     {"occ_horizon", p.occ_horizon},
                     {"occ_epsilons", p.occ_epsilons}};
  Json families = Json::array();
  for (const auto& g : cfg.sweep.families) families.push_back(graph_to_json(g));
  j["sweep"] = {{"families", families},
                {"eps0_grid", cfg.sweep.eps0_grid},
                {"n_samples", cfg.sweep.n_samples}};
  const auto& d = cfg.defaults;
  j["defaults"] = {{"tol", d.tol},
                   {"max_iter", d.max_iter},
                   {"c_occ", d.c_occ},
                   {"tolerance_sigmas", d.tolerance_sigmas},
                   {"censor_threshold", d.censor_threshold},
                   {"eigen_method", to_string(d.eigen_method)}};
  j["output"] = {{"format", cfg.output.format}, {"path", cfg.output.path}};
  return j;
}

RunConfig config_from_json(const Json& j) {
  only_keys(j, "config",
            {"graph", "potential", "walk", "checks", "times", "inequality_horizon", "harmonic_time",
             "martingale", "sweep", "defaults", "output"});
  RunConfig cfg;
  if (j.contains("graph")) cfg.graph = graph_from_json(j.at("graph"));

  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    only_keys(p, "potential", {"mode", "box_side", "theta_cap"});
    std::string mode(to_string(cfg.potential.mode));
    maybe(p, "mode", "potential", mode);
    cfg.potential.mode = parse_mode(mode);
    maybe(p, "box_side", "potential", cfg.potential.box_side);
    maybe(p, "theta_cap", "potential", cfg.potential.theta_cap);
  }

  if (j.contains("walk")) {
    const auto& w = j.at("walk");
    constexpr std::string_view ctx = "walk";
    only_keys(w, ctx,
              {"t_max", "n_samples", "seed", "x0", "occupation_epsilons", "occupation_horizons",
               "hitting_radii"});
    maybe(w, "t_max", ctx, cfg.walk.t_max);
    maybe(w, "n_samples", ctx, cfg.walk.n_samples);
    maybe(w, "seed", ctx, cfg.walk.seed);
    std::size_t x0 = cfg.walk.x0;
    maybe(w, "x0", ctx, x0);
    cfg.walk.x0 = static_cast<Vertex>(x0);
    maybe_list(w, "occupation_epsilons", ctx, cfg.walk.occupation_epsilons);
    maybe_list(w, "occupation_horizons", ctx, cfg.walk.occupation_horizons);
    maybe_list(w, "hitting_radii", ctx, cfg.walk.hitting_radii);
  }
  if (cfg.walk.t_max < 1) bad("walk.t_max must be at least 1");
  if (cfg.walk.n_samples < 1) bad("walk.n_samples must be at least 1");

  maybe_list(j, "checks", "config", cfg.checks);
  std::vector<std::string> unique;
  for (const auto& c : cfg.checks) {
    const auto& reg = check_registry();
    if (std::find(reg.begin(), reg.end(), c) == reg.end()) bad("unknown check '" + c + "'");
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  }
  cfg.checks = std::move(unique);
  maybe_list(j, "times", "config", cfg.times);
  maybe(j, "inequality_horizon", "config", cfg.inequality_horizon);
  maybe(j, "harmonic_time", "config", cfg.harmonic_time);

  if (j.contains("martingale")) {
    const auto& m = j.at("martingale");
    constexpr std::string_view ctx = "martingale";
    only_keys(m, ctx,
              {"family", "holding", "n_samples", "seed", "hit_radii", "hit_horizon", "l1_horizon",
               "yuval_offset", "yuval_r", "yuval_r_prime", "yuval_horizon", "occ_horizon",
               "occ_epsilons"});
    std::string family(to_string(cfg.martingale.family));
    maybe(m, "family", ctx, family);
    cfg.martingale.family = parse_martingale_family(family);
    maybe(m, "holding", ctx, cfg.martingale.holding);
    auto& p = cfg.martingale.params;
    maybe(m, "n_samples", ctx, p.n_samples);
    maybe(m, "seed", ctx, p.seed);
    maybe_list(m, "hit_radii", ctx, p.hit_radii);
    maybe(m, "hit_horizon", ctx, p.hit_horizon);
    maybe(m, "l1_horizon", ctx, p.l1_horizon);
    maybe(m, "yuval_offset", ctx, p.yuval_offset);
    maybe(m, "yuval_r", ctx, p.yuval_r);
    maybe(m, "yuval_r_prime", ctx, p.yuval_r_prime);
    maybe(m, "yuval_horizon", ctx, p.yuval_horizon);
    maybe(m, "occ_horizon", ctx, p.occ_horizon);
    maybe_list(m, "occ_epsilons", ctx, p.occ_epsilons);
    if (p.n_samples < 1) bad("martingale.n_samples must be at least 1");
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    only_keys(s, "sweep", {"families", "eps0_grid", "n_samples"});
    if (s.contains("families")) {
      if (!s.at("families").is_array()) bad("sweep.families must be a list");
      for (const auto& g : s.at("families")) cfg.sweep.families.push_back(graph_from_json(g));
    }
    maybe_list(s, "eps0_grid", "sweep", cfg.sweep.eps0_grid);
    maybe(s, "n_samples", "sweep", cfg.sweep.n_samples);
  }

  if (j.contains("defaults")) {
    const auto& d = j.at("defaults");
    constexpr std::string_view ctx = "defaults";
    only_keys(d, ctx,
              {"tol", "max_iter", "c_occ", "tolerance_sigmas", "censor_threshold", "eigen_method"});
    maybe(d, "tol", ctx, cfg.defaults.tol);
    maybe(d, "max_iter", ctx, cfg.defaults.max_iter);
    maybe(d, "c_occ", ctx, cfg.defaults.c_occ);
    maybe(d, "tolerance_sigmas", ctx, cfg.defaults.tolerance_sigmas);
    maybe(d, "censor_threshold", ctx, cfg.defaults.censor_threshold);
    std::string method(to_string(cfg.defaults.eigen_method));
    maybe(d, "eigen_method", ctx, method);
    cfg.defaults.eigen_method = parse_eigen_method(method);
    if (!(cfg.defaults.tol > 0.0)) bad("defaults.tol must be positive");
    if (cfg.defaults.max_iter < 1) bad("defaults.max_iter must be positive");
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    only_keys(o, "output", {"format", "path"});
    maybe(o, "format", "output", cfg.output.format);
    maybe(o, "path", "output", cfg.output.path);
  }
  if (cfg.output.format != "json" && cfg.output.format != "csv") {
    bad("output.format must be json or csv");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace escape
