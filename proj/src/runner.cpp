#include "epsflow/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "epsflow/luckhaus.hpp"
#include "epsflow/snapshot.hpp"

namespace epsflow {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("runner: cannot open " + path + " for writing");
  return os;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& out_dir,
                    const std::vector<std::string>& files, const ojson& measured) {
  ojson m;
  m["tool"] = "epsflow";
  m["version"] = "0.1.0";
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(cfg.source_text)));
  m["config_hash"] = hash;
  m["deterministic"] = cfg.output.deterministic;
  m["measured"] = measured;
  std::vector<std::string> names;
  names.reserve(files.size());
  for (const auto& f : files) names.push_back(fs::path(f).filename().string());
  m["outputs"] = names;
  auto os = open_out(out_dir + "/manifest.json");
  os << m.dump(2) << "\n";
}

ojson validation_json(const ValidationReport& rep) {
  ojson v;
  v["s_star"] = rep.s_star;
  v["lambda_min"] = rep.lambda_min;
  v["lambda_max"] = rep.lambda_max;
  v["tube_c1"] = rep.tube_c1;
  v["tube_c2"] = rep.tube_c2;
  return v;
}

Vec3 default_center(const Grid& g) { return g.center; }

std::vector<double> default_radii(const Grid& g) {
  std::vector<double> out;
  for (double r = 8.0 * g.h; r <= 0.95 * g.radius; r *= std::sqrt(2.0)) out.push_back(r);
  if (out.size() < 3) {
    out.clear();
    for (double r = 4.0 * g.h; r <= 0.95 * g.radius; r *= std::sqrt(2.0)) out.push_back(r);
  }
  return out;
}

void maybe_write_field(const ExperimentConfig& cfg, const Field& f,
                       const std::string& out_dir, const std::string& stem,
                       std::vector<std::string>& files) {
  if (cfg.output.write_snapshots) {
    const std::string p = out_dir + "/" + stem + ".field";
    write_snapshot(f, p);
    files.push_back(p);
  }
  if (cfg.output.write_vtk) {
    const std::string p = out_dir + "/" + stem + ".vtk";
    write_vtk(f, p);
    files.push_back(p);
  }
}

}  // namespace

int print_validation(const ValidationReport& rep, std::ostream& os) {
  for (const auto& it : rep.items)
    os << (it.pass ? "[PASS] " : "[FAIL] ") << it.name
       << (it.detail.empty() ? "" : ": " + it.detail) << "\n";
  os << "s_star=" << fmt(rep.s_star) << " lambda=" << fmt(rep.lambda_min)
     << " Lambda=" << fmt(rep.lambda_max) << "\n";
  return rep.all_pass() ? 0 : 2;
}

void write_iteration_log(const std::vector<IterRow>& log, const std::string& path) {
  auto os = open_out(path);
  os << "iter,energy_total,energy_elastic,energy_potential,max_residual,step_size\n";
  for (const auto& r : log)
    os << r.iter << "," << fmt(r.energy_total) << "," << fmt(r.energy_elastic) << ","
       << fmt(r.energy_potential) << "," << fmt(r.max_residual) << "," << fmt(r.step_size)
       << "\n";
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  auto os = open_out(path);
  os << "stage,epsilon,energy_total,energy_elastic,energy_potential,max_dist_to_n,"
        "h1_increment,sup_norm,iterations,final_residual\n";
  for (std::size_t s = 0; s < sweep.stages.size(); ++s) {
    const auto& r = sweep.stages[s];
    os << s << "," << fmt(r.epsilon) << "," << fmt(r.energy_total) << ","
       << fmt(r.energy_elastic) << "," << fmt(r.energy_potential) << ","
       << fmt(r.max_dist_to_N) << "," << fmt(r.h1_increment) << "," << fmt(r.sup_norm)
       << "," << r.iterations << "," << fmt(r.final_residual) << "\n";
  }
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path) {
  auto os = open_out(path);
  os << "epsilon,h1_increment,linf_to_final,sup_norm,defect_components\n";
  for (const auto& r : rows)
    os << fmt(r.epsilon) << "," << fmt(r.h1_increment) << "," << fmt(r.linf_to_final)
       << "," << fmt(r.sup_norm) << "," << r.defect_components << "\n";
}

void write_decay_csv(const DecayReport& rep, const std::string& path) {
  auto os = open_out(path);
  os << "r,renorm_energy,renorm_dirichlet,data_norm,below_delta\n";
  for (const auto& row : rep.rows)
    os << fmt(row.r) << "," << fmt(row.renorm_energy) << "," << fmt(row.renorm_dirichlet)
       << "," << fmt(row.data_norm) << "," << (row.below_delta ? 1 : 0) << "\n";
}

namespace {

ojson defects_json(const DefectSet& set, const Grid& grid) {
  ojson d;
  d["tau"] = set.tau;
  d["beta_threshold"] = set.beta_threshold;
  d["node_count"] = set.nodes.size();
  ojson comps = ojson::array();
  for (const auto& c : set.components) {
    ojson cc;
    cc["center"] = {c.center[0], c.center[1], c.center[2]};
    cc["size"] = c.size;
    comps.push_back(cc);
  }
  d["components"] = comps;
  d["h"] = grid.h;
  return d;
}

}  // namespace

RunOutputs run_minimize(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Problem prob = build_problem(cfg);
  const MinimizeResult res =
      minimize(prob.initial, prob.minimize, prob.model, prob.pot, prob.anchoring);
  RunOutputs out;
  write_iteration_log(res.log, out_dir + "/iterations.csv");
  out.files.push_back(out_dir + "/iterations.csv");
  maybe_write_field(cfg, res.field, out_dir, "final", out.files);
  ojson measured;
  measured["converged"] = res.converged;
  measured["final_residual"] = res.final_residual;
  measured["final_energy"] = res.log.back().energy_total;
  write_manifest(cfg, out_dir, out.files, measured);
  return out;
}

RunOutputs run_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Problem prob = build_problem(cfg);
  if (!prob.has_sweep) throw ConfigError("sweep: config has no solver.sweep section");
  const SweepResult sweep =
      epsilon_sweep(prob.initial, prob.sweep, prob.minimize, prob.model, prob.pot,
                    prob.anchoring);
  RunOutputs out;
  write_sweep_csv(sweep, out_dir + "/sweep.csv");
  out.files.push_back(out_dir + "/sweep.csv");

  const double tau = cfg.diagnostics.defect_tau > 0 ? cfg.diagnostics.defect_tau
                                                    : prob.pot.s_star() / 4.0;
  const auto conv = convergence_report(sweep, prob.pot, tau,
                                       cfg.diagnostics.exclusion_radius);
  write_convergence_csv(conv, out_dir + "/convergence.csv");
  out.files.push_back(out_dir + "/convergence.csv");

  const DefectSet defects = detect_defects(sweep.fields.back(), prob.pot, tau);
  {
    auto os = open_out(out_dir + "/defects.json");
    os << defects_json(defects, prob.grid).dump(2) << "\n";
    out.files.push_back(out_dir + "/defects.json");
  }
  for (std::size_t s = 0; s < sweep.fields.size(); ++s)
    maybe_write_field(cfg, sweep.fields[s], out_dir, "stage" + std::to_string(s),
                      out.files);
  ojson measured;
  measured["stages"] = sweep.stages.size();
  measured["final_energy"] = sweep.stages.back().energy_total;
  measured["defect_components"] = defects.components.size();
  write_manifest(cfg, out_dir, out.files, measured);
  return out;
}

namespace {

// Runs the configured solve (sweep when present, else a single minimize) and
// returns the final field.
Field solve_final_field(const ExperimentConfig&, Problem& prob) {
  if (prob.has_sweep) {
    SweepResult sweep = epsilon_sweep(prob.initial, prob.sweep, prob.minimize, prob.model,
                                      prob.pot, prob.anchoring);
    return std::move(sweep.fields.back());
  }
  MinimizeResult res =
      minimize(prob.initial, prob.minimize, prob.model, prob.pot, prob.anchoring);
  return std::move(res.field);
}

double final_epsilon(const ExperimentConfig& cfg) {
  if (cfg.solver.has_sweep) {
    const auto sched = cfg.solver.sweep.schedule();
    return sched.back();
  }
  return cfg.solver.minimize.epsilon;
}

}  // namespace

RunOutputs run_decay(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Problem prob = build_problem(cfg);
  const Field field = solve_final_field(cfg, prob);
  const double eps = final_epsilon(cfg);

  RunOutputs out;
  std::vector<Vec3> centers;
  for (const auto& c : cfg.diagnostics.centers) centers.push_back({c[0], c[1], c[2]});
  if (centers.empty()) centers.push_back(default_center(prob.grid));
  std::vector<double> radii = cfg.diagnostics.radii;
  if (radii.empty()) radii = default_radii(prob.grid);

  ojson measured;
  ojson profiles = ojson::array();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const DecayReport rep = decay_profile(field, eps, prob.model, prob.pot, centers[c],
                                          radii, cfg.diagnostics.delta);
    const std::string path = out_dir + "/decay" + std::to_string(c) + ".csv";
    write_decay_csv(rep, path);
    out.files.push_back(path);
    ojson p;
    p["center"] = {centers[c][0], centers[c][1], centers[c][2]};
    p["alpha_defined"] = rep.alpha_defined;
    p["alpha"] = rep.alpha;
    p["fit_residual"] = rep.fit_residual;
    profiles.push_back(p);
  }
  measured["profiles"] = profiles;
  maybe_write_field(cfg, field, out_dir, "final", out.files);
  write_manifest(cfg, out_dir, out.files, measured);
  return out;
}

RunOutputs run_boundary_decay(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (cfg.domain.kind != "half_ball")
    throw ConfigError("boundary-decay: requires domain.kind = half_ball");
  Problem prob = build_problem(cfg);
  const Field field = solve_final_field(cfg, prob);
  const double eps = final_epsilon(cfg);

  RunOutputs out;
  std::vector<Vec3> centers;
  for (const auto& c : cfg.diagnostics.centers) centers.push_back({c[0], c[1], c[2]});
  if (centers.empty()) centers.push_back(prob.grid.center);
  std::vector<double> radii = cfg.diagnostics.radii;
  if (radii.empty()) radii = default_radii(prob.grid);

  ojson measured;
  ojson profiles = ojson::array();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const auto rep = boundary_decay_profile(field, eps, prob.model, prob.pot, centers[c],
                                            radii, cfg.diagnostics.delta);
    const std::string path = out_dir + "/boundary_decay" + std::to_string(c) + ".csv";
    write_decay_csv(rep.decay, path);
    out.files.push_back(path);
    ojson p;
    p["center"] = {centers[c][0], centers[c][1], centers[c][2]};
    p["alpha_defined"] = rep.decay.alpha_defined;
    p["alpha"] = rep.decay.alpha;
    profiles.push_back(p);
  }
  measured["profiles"] = profiles;
  maybe_write_field(cfg, field, out_dir, "final", out.files);
  write_manifest(cfg, out_dir, out.files, measured);
  return out;
}

RunOutputs run_extend(const ExperimentConfig& cfg, const std::string& out_dir, int levels) {
  fs::create_directories(out_dir);
  if (levels < 1 || levels > 5) throw ConfigError("extend: levels must lie in {1..5}");
  Problem prob = build_problem(cfg);
  const Potential& pot = prob.pot;
  const int k = pot.dim();
  const double ss = pot.s_star();

  RunOutputs out;
  auto os = open_out(out_dir + "/extend.csv");
  os << "lambda,e_sphere,e_annulus,grad_w_sq,c_phi,c_w,lk_grad_u,lk_grad_v,lk_l2_diff,"
        "lk_grad_phi,lk_f_u,lk_f_phi,lk_c_grad,lk_c_f\n";

  // Perturbed-constant boundary data, identical across the dyadic levels.
  const double delta = 1e-2;
  auto tangent_dir = [&](const Vec3& x) {
    return Vec3{delta * std::sin(2.0 * x[1]), delta * std::cos(2.0 * x[0]), 1.0};
  };
  ojson rows = ojson::array();
  for (int lv = 0; lv < levels; ++lv) {
    const int nu = 2 + lv;
    const SphereMesh mesh = build_sphere_mesh(nu);
    const double lam = mesh.lambda();
    const double eps = lam / 2.0;
    const int m = 8, mr = 8;

    const MeshField u = sample_mesh_field(mesh, m, k, [&](const Vec3& x) {
      if (k == 5) return q_from_director(normalized3(tangent_dir(x)), ss);
      TargetPoint p(3);
      const Vec3 n = normalized3(tangent_dir(x));
      for (int a = 0; a < 3; ++a) p[a] = n[a];
      return p;
    });
    const ModifyBoundaryResult mb = modify_boundary(mesh, u, eps, pot, 1.0, mr);

    // Extension-lemma data: u slightly off N, v_star a small rotation of the
    // projected data; differences scale with lambda to balance the bound.
    const double off_amp = 0.3 * 1e-2 * lam;
    const double rot_amp = 0.25 * 1e-2 * lam;
    const MeshField u2 = sample_mesh_field(mesh, m, k, [&](const Vec3& x) {
      const Vec3 n = normalized3(tangent_dir(x));
      if (k == 5) {
        TargetPoint q = q_from_director(n, ss);
        q *= 1.0 + off_amp * std::cos(3.0 * x[0]);
        return q;
      }
      TargetPoint p(3);
      for (int a = 0; a < 3; ++a) p[a] = n[a] * (1.0 + off_amp * std::cos(3.0 * x[0]));
      return p;
    });
    const MeshField v2 = sample_mesh_field(mesh, m, k, [&](const Vec3& x) {
      Vec3 n = normalized3(tangent_dir(x));
      const double c = std::cos(rot_amp), s = std::sin(rot_amp);
      const Vec3 rn{c * n[0] - s * n[1], s * n[0] + c * n[1], n[2]};
      if (k == 5) return q_from_director(normalized3(rn), ss);
      TargetPoint p(3);
      const Vec3 nn = normalized3(rn);
      for (int a = 0; a < 3; ++a) p[a] = nn[a];
      return p;
    });
    const LuckhausResult lk = luckhaus_interpolant(mesh, u2, v2, eps, pot, 1e-2, mr);

    os << fmt(lam) << "," << fmt(mb.sphere_energy.total) << "," << fmt(mb.annulus.total)
       << "," << fmt(mb.grad_w_sq) << "," << fmt(mb.c_phi) << "," << fmt(mb.c_w) << ","
       << fmt(lk.grad_u_sq) << "," << fmt(lk.grad_v_sq) << "," << fmt(lk.l2_diff) << ","
       << fmt(lk.annulus.dirichlet) << "," << fmt(lk.f_u_int) << ","
       << fmt(lk.annulus.potential) << "," << fmt(lk.c_grad) << "," << fmt(lk.c_f) << "\n";

    ojson r;
    r["lambda"] = lam;
    r["c_phi"] = mb.c_phi;
    r["c_w"] = mb.c_w;
    r["c_grad"] = lk.c_grad;
    r["c_f"] = lk.c_f;
    rows.push_back(r);

    if (cfg.output.write_snapshots && lv == levels - 1) {
      write_mesh_field(mb.w, out_dir + "/w.meshfield");
      write_annulus_field(mb.phi, out_dir + "/phi.annulus");
      out.files.push_back(out_dir + "/w.meshfield");
      out.files.push_back(out_dir + "/phi.annulus");
    }
  }
  out.files.push_back(out_dir + "/extend.csv");
  ojson measured;
  measured["levels"] = rows;
  write_manifest(cfg, out_dir, out.files, measured);
  return out;
}

RunOutputs run_report(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Problem prob = build_problem(cfg);
  RunOutputs out;
  ojson measured;
  measured["validation"] = validation_json(validate_config(cfg));

  Field final_field = make_field(prob.grid, prob.initial.k);
  if (prob.has_sweep) {
    const SweepResult sweep = epsilon_sweep(prob.initial, prob.sweep, prob.minimize,
                                            prob.model, prob.pot, prob.anchoring);
    write_sweep_csv(sweep, out_dir + "/sweep.csv");
    out.files.push_back(out_dir + "/sweep.csv");
    const double tau = cfg.diagnostics.defect_tau > 0 ? cfg.diagnostics.defect_tau
                                                      : prob.pot.s_star() / 4.0;
    const auto conv =
        convergence_report(sweep, prob.pot, tau, cfg.diagnostics.exclusion_radius);
    write_convergence_csv(conv, out_dir + "/convergence.csv");
    out.files.push_back(out_dir + "/convergence.csv");
    final_field = sweep.fields.back();
  } else {
    const MinimizeResult res =
        minimize(prob.initial, prob.minimize, prob.model, prob.pot, prob.anchoring);
    write_iteration_log(res.log, out_dir + "/iterations.csv");
    out.files.push_back(out_dir + "/iterations.csv");
    final_field = res.field;
  }
  const double eps = final_epsilon(cfg);
  const double tau = cfg.diagnostics.defect_tau > 0 ? cfg.diagnostics.defect_tau
                                                    : prob.pot.s_star() / 4.0;

  const DefectSet defects = detect_defects(final_field, prob.pot, tau);
  {
    auto os = open_out(out_dir + "/defects.json");
    os << defects_json(defects, prob.grid).dump(2) << "\n";
    out.files.push_back(out_dir + "/defects.json");
  }

  std::vector<Vec3> centers;
  for (const auto& c : cfg.diagnostics.centers) centers.push_back({c[0], c[1], c[2]});
  if (centers.empty()) centers.push_back(default_center(prob.grid));
  std::vector<double> radii = cfg.diagnostics.radii;
  if (radii.empty()) radii = default_radii(prob.grid);

  ojson profiles = ojson::array();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const DecayReport rep = decay_profile(final_field, eps, prob.model, prob.pot,
                                          centers[c], radii, cfg.diagnostics.delta);
    const std::string path = out_dir + "/decay" + std::to_string(c) + ".csv";
    write_decay_csv(rep, path);
    out.files.push_back(path);
    ojson p;
    p["center"] = {centers[c][0], centers[c][1], centers[c][2]};
    p["alpha_defined"] = rep.alpha_defined;
    p["alpha"] = rep.alpha;
    bool all_below = true;
    for (const auto& row : rep.rows)
      if (!row.below_delta) all_below = false;
    p["below_delta_all"] = all_below;
    profiles.push_back(p);

    const double r0 = cfg.diagnostics.r0 > 0 ? cfg.diagnostics.r0 : prob.grid.radius / 2.0;
    try {
      const auto ratio = large_scale_ratio(final_field, eps, prob.model, prob.pot,
                                           centers[c], r0, cfg.diagnostics.theta);
      if (ratio)
        profiles.back()["large_scale_ratio"] = *ratio;
      else
        profiles.back()["large_scale_ratio"] = "undefined (vacuum)";
    } catch (const Error& e) {
      profiles.back()["large_scale_ratio"] = std::string("unresolvable: ") + e.what();
    }
  }
  measured["profiles"] = profiles;
  measured["defect_components"] = defects.components.size();
  maybe_write_field(cfg, final_field, out_dir, "final", out.files);

  {
    auto os = open_out(out_dir + "/summary.json");
    os << measured.dump(2) << "\n";
    out.files.push_back(out_dir + "/summary.json");
  }
  write_manifest(cfg, out_dir, out.files, measured);
  return out;
}

}  // namespace epsflow
