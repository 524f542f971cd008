#include "epsflow/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace epsflow {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::array<double, 3> get_vec3(const json& j, const char* key,
                               std::array<double, 3> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw ConfigError(std::string("config: '") + key + "' must be a 3-vector");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  ExperimentConfig cfg;
  cfg.source_text = json_text;
  try {
    if (!j.contains("model")) throw ConfigError(origin + ": missing section 'model'");
    const json& model = j.at("model");
    if (!model.contains("potential"))
      throw ConfigError(origin + ": missing key 'model.potential'");
    const json& pot = model.at("potential");
    cfg.potential.kind = get_or<std::string>(pot, "kind", "gl");
    if (cfg.potential.kind != "gl" && cfg.potential.kind != "ldg")
      throw ConfigError(origin + ": model.potential.kind must be 'gl' or 'ldg'");
    cfg.potential.a2 = get_or(pot, "a2", 1.0);
    cfg.potential.b2 = get_or(pot, "b2", 10.0);
    cfg.potential.c2 = get_or(pot, "c2", 1.0);

    if (!model.contains("elastic"))
      throw ConfigError(origin + ": missing key 'model.elastic'");
    const json& el = model.at("elastic");
    cfg.elastic.kind = get_or<std::string>(el, "kind", "isotropic");
    if (cfg.elastic.kind != "isotropic" && cfg.elastic.kind != "ldg" &&
        cfg.elastic.kind != "general")
      throw ConfigError(origin + ": model.elastic.kind must be isotropic|ldg|general");
    cfg.elastic.L1 = get_or(el, "L1", 1.0);
    cfg.elastic.L2 = get_or(el, "L2", 0.0);
    cfg.elastic.L3 = get_or(el, "L3", 0.0);
    if (el.contains("coefficients"))
      cfg.elastic.coefficients = el.at("coefficients").get<std::vector<double>>();
    if (model.contains("weight")) {
      const json& w = model.at("weight");
      cfg.elastic.weight.kind = get_or<std::string>(w, "kind", "none");
      cfg.elastic.weight.amplitude = get_or(w, "amplitude", 0.0);
      cfg.elastic.weight.wavevector = get_vec3(w, "wavevector", {1, 0, 0});
    }

    if (!j.contains("domain")) throw ConfigError(origin + ": missing section 'domain'");
    const json& dom = j.at("domain");
    cfg.domain.kind = get_or<std::string>(dom, "kind", "ball");
    if (cfg.domain.kind != "ball" && cfg.domain.kind != "box" &&
        cfg.domain.kind != "half_ball")
      throw ConfigError(origin + ": domain.kind must be ball|box|half_ball");
    cfg.domain.radius = get_or(dom, "radius", 1.0);
    cfg.domain.center = get_vec3(dom, "center", {0, 0, 0});
    cfg.domain.resolution = get_or(dom, "resolution", 32);
    if (cfg.domain.resolution < 3)
      throw ConfigError(origin + ": domain.resolution must be >= 3");

    const json anch = j.contains("anchoring") ? j.at("anchoring") : json::object();
    cfg.anchoring.kind = get_or<std::string>(anch, "kind", "dirichlet");
    if (cfg.anchoring.kind != "dirichlet" && cfg.anchoring.kind != "weak" &&
        cfg.anchoring.kind != "free")
      throw ConfigError(origin + ": anchoring.kind must be dirichlet|weak|free");
    cfg.anchoring.data = get_or<std::string>(anch, "data", "hedgehog");
    if (cfg.anchoring.data != "hedgehog" && cfg.anchoring.data != "constant" &&
        cfg.anchoring.data != "tilt")
      throw ConfigError(origin + ": anchoring.data must be hedgehog|constant|tilt");
    cfg.anchoring.amplitude = get_or(anch, "amplitude", 0.1);
    cfg.anchoring.director = get_vec3(anch, "director", {0, 0, 1});
    cfg.anchoring.strength = get_or(anch, "strength", 1.0);
    cfg.anchoring.init = get_or<std::string>(anch, "init", "data");
    if (cfg.anchoring.init != "data" && cfg.anchoring.init != "ramp" &&
        cfg.anchoring.init != "constant")
      throw ConfigError(origin + ": anchoring.init must be data|ramp|constant");
    cfg.anchoring.ramp_radius = get_or(anch, "ramp_radius", 0.25);

    if (!j.contains("solver")) throw ConfigError(origin + ": missing section 'solver'");
    const json& sol = j.at("solver");
    cfg.solver.minimize.epsilon = get_or(sol, "epsilon", 0.125);
    cfg.solver.minimize.max_iters = get_or(sol, "max_iters", 20000);
    cfg.solver.minimize.grad_tol = get_or(sol, "grad_tol", 1e-3);
    cfg.solver.minimize.initial_step = get_or(sol, "initial_step", 1e-4);
    cfg.solver.minimize.armijo_c = get_or(sol, "armijo_c", 1e-4);
    cfg.solver.minimize.step_shrink = get_or(sol, "step_shrink", 0.5);
    if (sol.contains("sweep")) {
      cfg.solver.has_sweep = true;
      const json& sw = sol.at("sweep");
      cfg.solver.sweep.epsilon0 = get_or(sw, "epsilon0", 0.25);
      cfg.solver.sweep.ratio = get_or(sw, "ratio", 0.5);
      cfg.solver.sweep.count = get_or(sw, "count", 4);
      cfg.solver.sweep.warm_start = get_or(sw, "warm_start", true);
    }

    const json diag = j.contains("diagnostics") ? j.at("diagnostics") : json::object();
    if (diag.contains("centers"))
      for (const auto& c : diag.at("centers"))
        cfg.diagnostics.centers.push_back({c[0].get<double>(), c[1].get<double>(),
                                           c[2].get<double>()});
    if (diag.contains("radii"))
      cfg.diagnostics.radii = diag.at("radii").get<std::vector<double>>();
    cfg.diagnostics.theta = get_or(diag, "theta", 0.25);
    cfg.diagnostics.r0 = get_or(diag, "r0", 0.0);
    if (diag.contains("alpha_grid"))
      cfg.diagnostics.alpha_grid = diag.at("alpha_grid").get<std::vector<double>>();
    cfg.diagnostics.delta = get_or(diag, "delta", 0.1);
    cfg.diagnostics.defect_tau = get_or(diag, "defect_tau", 0.0);
    cfg.diagnostics.exclusion_radius = get_or(diag, "exclusion_radius", 0.25);
    cfg.diagnostics.sup_bound_M = get_or(diag, "sup_bound_M", 0.0);
    cfg.diagnostics.growth_p = get_or(diag, "growth_p", 2.0);
    cfg.diagnostics.growth_a = get_or(diag, "growth_a", 0.75);
    if (diag.contains("growth_radii"))
      cfg.diagnostics.growth_radii = diag.at("growth_radii").get<std::vector<double>>();

    const json out = j.contains("output") ? j.at("output") : json::object();
    cfg.output.directory = get_or<std::string>(out, "directory", "out");
    cfg.output.deterministic = get_or(out, "deterministic", true);
    cfg.output.write_snapshots = get_or(out, "write_snapshots", true);
    cfg.output.write_vtk = get_or(out, "write_vtk", false);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<std::string> preset_names() {
  return {"hedgehog", "hedgehog-mini", "smooth", "ldg-hedgehog", "ldg-smooth",
          "boundary-smooth"};
}

std::string preset_text(const std::string& name) {
  if (name == "hedgehog") {
    return R"({
  "model": {
    "potential": {"kind": "gl"},
    "elastic": {"kind": "isotropic"}
  },
  "domain": {"kind": "ball", "radius": 1.0, "center": [0, 0, 0], "resolution": 33},
  "anchoring": {"kind": "dirichlet", "data": "hedgehog", "init": "ramp"},
  "solver": {
    "epsilon": 0.125, "max_iters": 20000, "grad_tol": 2e-3, "initial_step": 1e-4,
    "sweep": {"epsilon0": 0.25, "ratio": 0.5, "count": 2, "warm_start": true}
  },
  "diagnostics": {"theta": 0.25, "delta": 0.1, "exclusion_radius": 0.25, "sup_bound_M": 1.1},
  "output": {"directory": "out", "deterministic": true}
})";
  }
  if (name == "hedgehog-mini") {
    return R"({
  "model": {
    "potential": {"kind": "gl"},
    "elastic": {"kind": "isotropic"}
  },
  "domain": {"kind": "ball", "radius": 1.0, "center": [0, 0, 0], "resolution": 17},
  "anchoring": {"kind": "dirichlet", "data": "hedgehog", "init": "ramp"},
  "solver": {
    "epsilon": 0.25, "max_iters": 2000, "grad_tol": 5e-3, "initial_step": 1e-4,
    "sweep": {"epsilon0": 0.5, "ratio": 0.5, "count": 2, "warm_start": true}
  },
  "diagnostics": {"theta": 0.25, "delta": 0.1, "exclusion_radius": 0.25, "sup_bound_M": 1.1},
  "output": {"directory": "out", "deterministic": true}
})";
  }
  if (name == "smooth") {
    return R"({
  "model": {
    "potential": {"kind": "gl"},
    "elastic": {"kind": "isotropic"}
  },
  "domain": {"kind": "ball", "radius": 1.0, "center": [0, 0, 0], "resolution": 33},
  "anchoring": {"kind": "dirichlet", "data": "tilt", "amplitude": 0.05, "init": "data"},
  "solver": {"epsilon": 0.125, "max_iters": 20000, "grad_tol": 1e-3, "initial_step": 1e-4},
  "diagnostics": {"theta": 0.25, "delta": 0.1, "sup_bound_M": 1.1},
  "output": {"directory": "out", "deterministic": true}
})";
  }
  if (name == "ldg-hedgehog") {
    return R"({
  "model": {
    "potential": {"kind": "ldg", "a2": 1.0, "b2": 10.0, "c2": 1.0},
    "elastic": {"kind": "ldg", "L1": 1.0, "L2": 0.5, "L3": 0.5}
  },
  "domain": {"kind": "ball", "radius": 1.0, "center": [0, 0, 0], "resolution": 25},
  "anchoring": {"kind": "dirichlet", "data": "hedgehog", "init": "ramp"},
  "solver": {
    "epsilon": 0.25, "max_iters": 30000, "grad_tol": 0.05, "initial_step": 1e-5,
    "sweep": {"epsilon0": 0.5, "ratio": 0.5, "count": 2, "warm_start": true}
  },
  "diagnostics": {"theta": 0.25, "delta": 0.5, "exclusion_radius": 0.25, "sup_bound_M": 4.0},
  "output": {"directory": "out", "deterministic": true}
})";
  }
  if (name == "ldg-smooth") {
    return R"({
  "model": {
    "potential": {"kind": "ldg", "a2": 1.0, "b2": 10.0, "c2": 1.0},
    "elastic": {"kind": "ldg", "L1": 1.0, "L2": 0.5, "L3": 0.5}
  },
  "domain": {"kind": "ball", "radius": 1.0, "center": [0, 0, 0], "resolution": 25},
  "anchoring": {"kind": "dirichlet", "data": "tilt", "amplitude": 0.05, "init": "data"},
  "solver": {"epsilon": 0.25, "max_iters": 30000, "grad_tol": 0.05, "initial_step": 1e-5},
  "diagnostics": {"theta": 0.25, "delta": 0.5, "sup_bound_M": 4.0},
  "output": {"directory": "out", "deterministic": true}
})";
  }
  if (name == "boundary-smooth") {
    return R"({
  "model": {
    "potential": {"kind": "gl"},
    "elastic": {"kind": "isotropic"}
  },
  "domain": {"kind": "half_ball", "radius": 1.0, "center": [0, 0, 0], "resolution": 49},
  "anchoring": {"kind": "dirichlet", "data": "tilt", "amplitude": 0.08, "init": "data"},
  "solver": {"epsilon": 0.125, "max_iters": 20000, "grad_tol": 1e-3, "initial_step": 1e-4},
  "diagnostics": {"delta": 0.1},
  "output": {"directory": "out", "deterministic": true}
})";
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::function<TargetPoint(const Vec3&)> data_generator(const ExperimentConfig& cfg) {
  const int k = cfg.k();
  const Vec3 c{cfg.domain.center[0], cfg.domain.center[1], cfg.domain.center[2]};
  const double R = cfg.domain.radius;
  const bool ldg = k == 5;
  double sstar = 1.0;
  if (ldg) sstar = s_star(cfg.potential.a2, cfg.potential.b2, cfg.potential.c2);

  auto to_point = [k, ldg, sstar](const Vec3& n) {
    if (ldg) return q_from_director(n, sstar);
    TargetPoint p(k);
    for (int a = 0; a < 3; ++a) p[a] = n[a];
    return p;
  };

  if (cfg.anchoring.data == "hedgehog") {
    return [c, to_point](const Vec3& x) {
      Vec3 d{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
      const double n = norm3(d);
      if (n < 1e-14) d = Vec3{0, 0, 1};
      return to_point(normalized3(d));
    };
  }
  if (cfg.anchoring.data == "constant") {
    const Vec3 n0 = normalized3(
        Vec3{cfg.anchoring.director[0], cfg.anchoring.director[1], cfg.anchoring.director[2]});
    return [n0, to_point](const Vec3&) { return to_point(n0); };
  }
  // "tilt": slowly rotating director around the configured axis.
  const double amp = cfg.anchoring.amplitude;
  const double kappa = M_PI / (2.0 * R);
  return [c, amp, kappa, to_point](const Vec3& x) {
    const Vec3 n{amp * std::sin(kappa * (x[0] - c[0])),
                 amp * std::sin(kappa * (x[1] - c[1])), 1.0};
    return to_point(normalized3(n));
  };
}

namespace {

std::function<double(const Vec3&)> weight_function(const ExperimentConfig& cfg) {
  if (cfg.elastic.weight.kind == "none") return {};
  if (cfg.elastic.weight.kind != "cosine")
    throw ConfigError("config: model.weight.kind must be none|cosine");
  const double amp = cfg.elastic.weight.amplitude;
  const Vec3 kv{cfg.elastic.weight.wavevector[0], cfg.elastic.weight.wavevector[1],
                cfg.elastic.weight.wavevector[2]};
  return [amp, kv](const Vec3& x) { return 1.0 + amp * std::cos(dot3(kv, x)); };
}

Potential build_potential(const ExperimentConfig& cfg) {
  if (cfg.potential.kind == "ldg")
    return Potential::ldg(cfg.potential.a2, cfg.potential.b2, cfg.potential.c2);
  return Potential::ginzburg_landau();
}

ElasticModel build_elastic(const ExperimentConfig& cfg) {
  ElasticModel m = [&] {
    if (cfg.elastic.kind == "ldg") {
      if (cfg.k() != 5) throw ConfigError("config: ldg elastic requires the ldg potential");
      return ElasticModel::ldg(cfg.elastic.L1, cfg.elastic.L2, cfg.elastic.L3);
    }
    if (cfg.elastic.kind == "general")
      return ElasticModel::general(cfg.k(), cfg.elastic.coefficients);
    return ElasticModel::isotropic(cfg.k());
  }();
  auto w = weight_function(cfg);
  if (w) m.set_weight(std::move(w));
  return m;
}

Grid build_grid(const ExperimentConfig& cfg) {
  const Vec3 c{cfg.domain.center[0], cfg.domain.center[1], cfg.domain.center[2]};
  if (cfg.domain.kind == "ball")
    return make_ball_grid(c, cfg.domain.radius, cfg.domain.resolution);
  if (cfg.domain.kind == "half_ball")
    return make_half_ball_grid(c, cfg.domain.radius, cfg.domain.resolution);
  const Vec3 origin{c[0] - cfg.domain.radius, c[1] - cfg.domain.radius,
                    c[2] - cfg.domain.radius};
  return make_box_grid(origin, 2.0 * cfg.domain.radius, cfg.domain.resolution);
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg) {
  const Grid grid = build_grid(cfg);
  Potential pot = build_potential(cfg);
  ElasticModel model = build_elastic(cfg);
  const auto gen = data_generator(cfg);
  const int k = cfg.k();

  Field init = [&] {
    if (cfg.anchoring.init == "ramp") {
      const Vec3 c = grid.center;
      const double rc = cfg.anchoring.ramp_radius * cfg.domain.radius;
      // uniaxial amplitude (or vector length) ramps linearly out of the core
      return sample_field(grid, k, [&](const Vec3& x) {
        const Vec3 d{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        const double ramp = std::min(norm3(d) / rc, 1.0);
        TargetPoint p = gen(x);
        p *= ramp;
        return p;
      });
    }
    if (cfg.anchoring.init == "constant") {
      const TargetPoint z0 = gen(grid.center);
      return sample_field(grid, k, [&](const Vec3&) { return z0; });
    }
    return sample_field(grid, k, gen);
  }();

  AnchoringSpec anch = AnchoringSpec::dirichlet();
  if (cfg.anchoring.kind == "free") {
    anch = AnchoringSpec::free_boundary();
    init.dirichlet.assign(grid.size(), 0);
  } else if (cfg.anchoring.kind == "weak") {
    if (cfg.domain.kind == "ball")
      throw ConfigError("weak anchoring needs a flat boundary face (box or half_ball)");
    anch = AnchoringSpec::weak(cfg.anchoring.strength, gen);
    init.dirichlet.assign(grid.size(), 0);
  } else {
    mark_domain_boundary(init);
    // bake the boundary data into the frozen nodes
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
      if (init.dirichlet[idx]) init.set_point(idx, gen(grid.pos(idx)));
  }

  return Problem{grid,          std::move(pot), std::move(model), std::move(anch),
                 std::move(init), cfg.solver.minimize, cfg.solver.has_sweep,
                 cfg.solver.sweep};
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ValidationReport validate_config(const ExperimentConfig& cfg) {
  ValidationReport rep;
  auto add = [&rep](const std::string& name, bool pass, const std::string& detail) {
    rep.items.push_back({name, pass, detail});
  };
  char buf[256];

  // Elastic positivity (closed form) and (A1) eigen bounds.
  if (cfg.elastic.kind == "ldg") {
    const auto p = check_positivity(cfg.elastic.L1, cfg.elastic.L2, cfg.elastic.L3);
    rep.positivity_lhs = p.lhs;
    std::snprintf(buf, sizeof(buf), "L1+L2=%.6g, 2L1-L2=%.6g, 6L1+L2+10L3=%.6g", p.lhs[0],
                  p.lhs[1], p.lhs[2]);
    add("elastic positivity (elastWpos)", p.positive,
        p.positive ? buf : std::string("violated: ") + buf);
    if (!p.positive) return rep;
  }
  Potential pot = Potential::ginzburg_landau();
  try {
    pot = build_potential(cfg);
    rep.s_star = pot.s_star();
    std::snprintf(buf, sizeof(buf), "s_star=%.9g, normalization=%.9g", pot.s_star(),
                  pot.normalization());
    add("potential admissible", true, buf);
  } catch (const Error& e) {
    add("potential admissible", false, e.what());
    return rep;
  }
  ElasticModel model = ElasticModel::isotropic(3);
  try {
    model = build_elastic(cfg);
    rep.lambda_min = model.lambda_min();
    rep.lambda_max = model.lambda_max();
    std::snprintf(buf, sizeof(buf), "lambda=%.9g, Lambda=%.9g", model.lambda_min(),
                  model.lambda_max());
    add("(A1) ellipticity bounds", model.lambda_min() > 0, buf);
  } catch (const Error& e) {
    add("(A1) ellipticity bounds", false, e.what());
    return rep;
  }

  // (A2) tube comparability: f ~ dist^2 within the tube dist <= s_star/4.
  {
    const int k = cfg.k();
    std::mt19937_64 eng(0xa2a2u);
    auto uniform = [&]() { return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53; };
    double c1 = 1e300, c2 = 0.0;
    const auto dirs = unit_shell_samples(k, 128, 0x77u);
    int used = 0;
    for (int s = 0; s < 10000 && used < 10000; ++s) {
      // random N point: random director (k=5) or shell direction (k=3)
      TargetPoint base(k);
      if (k == 5) {
        const Vec3 n = normalized3(Vec3{uniform() * 2 - 1, uniform() * 2 - 1,
                                        uniform() * 2 - 1});
        base = q_from_director(n, pot.s_star());
      } else {
        base = dirs[static_cast<std::size_t>(s % dirs.size())];
      }
      TargetPoint off(k);
      for (int a = 0; a < k; ++a) off[a] = uniform() * 2 - 1;
      if (off.norm() < 1e-9) continue;
      off *= (uniform() * pot.s_star() / 4.0) / off.norm();
      const TargetPoint z = base + off;
      const double d = dist_to_N(z, pot);
      if (d < 1e-6 * pot.s_star()) continue;
      const double fv = pot.f_raw(z.data());
      c1 = std::min(c1, fv / (d * d));
      c2 = std::max(c2, fv / (d * d));
      ++used;
    }
    rep.tube_c1 = c1;
    rep.tube_c2 = c2;
    std::snprintf(buf, sizeof(buf), "c1=%.6g, c2=%.6g over %d samples", c1, c2, used);
    add("(A2) tube comparability", c1 > 0 && std::isfinite(c2) && c2 > 0, buf);
  }

  // (A3b) growth ratios.
  try {
    const GrowthParams gp(cfg.diagnostics.growth_p, cfg.diagnostics.growth_a);
    std::vector<double> radii = cfg.diagnostics.growth_radii;
    if (radii.empty())
      for (double m : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) radii.push_back(m * pot.s_star());
    const GrowthReport gr = check_A2_A3b(pot, gp, radii);
    std::snprintf(buf, sizeof(buf), "last shell ratios: |grad f|/|z|^{6/p}=%.6g, |grad f|/f^a=%.6g",
                  gr.rows.back().max_ratio_power, gr.rows.back().max_ratio_falpha);
    add("(A3b) growth bounds", gr.pass, gr.pass ? buf : gr.note);
  } catch (const Error& e) {
    add("(A3b) growth bounds", false, e.what());
  }

  // Grid resolution vs epsilon schedule.
  {
    const Grid grid = build_grid(cfg);
    double min_eps = cfg.solver.minimize.epsilon;
    if (cfg.solver.has_sweep)
      for (double e : cfg.solver.sweep.schedule()) min_eps = std::min(min_eps, e);
    std::snprintf(buf, sizeof(buf), "min eps=%.6g, 2h=%.6g", min_eps, 2.0 * grid.h);
    add("epsilon resolvable (min eps >= 2h)", min_eps >= 2.0 * grid.h, buf);
    try {
      cfg.solver.minimize.validate(grid);
      add("solver parameters", true, "");
    } catch (const Error& e) {
      add("solver parameters", false, e.what());
    }
  }

  // Dirichlet data on N.
  if (cfg.anchoring.kind == "dirichlet") {
    const Grid grid = build_grid(cfg);
    Field probe = make_field(grid, cfg.k());
    mark_domain_boundary(probe);
    const auto gen = data_generator(cfg);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
      if (probe.dirichlet[idx])
        worst = std::max(worst, dist_to_N(gen(grid.pos(idx)), pot));
    std::snprintf(buf, sizeof(buf), "max dist to N = %.3g", worst);
    add("Dirichlet data on N (<= 1e-8)", worst <= 1e-8 * (1.0 + pot.s_star()), buf);
  }

  // Weight bounds (B1).
  if (model.has_weight()) {
    const Grid grid = build_grid(cfg);
    double lo = 1e300, hi = -1e300, grad_max = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const Vec3 x = grid.pos(idx);
      const double a = model.weight(x);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      const double d = 1e-5;
      for (int ax = 0; ax < 3; ++ax) {
        Vec3 xp = x, xm = x;
        xp[static_cast<std::size_t>(ax)] += d;
        xm[static_cast<std::size_t>(ax)] -= d;
        grad_max = std::max(grad_max,
                            std::abs(model.weight(xp) - model.weight(xm)) / (2 * d));
      }
    }
    std::snprintf(buf, sizeof(buf), "a in [%.4g, %.4g], max |grad a| = %.4g", lo, hi,
                  grad_max);
    add("(B1) weight bounds", lo >= 0.5 && hi <= 1.5 && grad_max <= 0.5, buf);
  }

  return rep;
}

}  // namespace epsflow
