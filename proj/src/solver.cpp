#include "epsflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "epsflow/parallel.hpp"

namespace epsflow {

AnchoringSpec AnchoringSpec::weak(double w0, std::function<TargetPoint(const Vec3&)> qb) {
  if (w0 < 0) throw InputDomainError("AnchoringSpec::weak: W0 must be nonnegative");
  AnchoringSpec a;
  a.kind = AnchoringKind::Weak;
  a.strength = w0;
  a.preferred = std::move(qb);
  return a;
}

void MinimizeConfig::validate(const Grid& grid) const {
  if (epsilon <= 0) throw InputDomainError("MinimizeConfig: epsilon must be positive");
  const double diam =
      std::sqrt(grid.extent(0) * grid.extent(0) + grid.extent(1) * grid.extent(1) +
                grid.extent(2) * grid.extent(2));
  if (epsilon > diam) throw InputDomainError("MinimizeConfig: epsilon exceeds domain diameter");
  if (max_iters <= 0 || grad_tol <= 0 || initial_step <= 0 || armijo_c <= 0 ||
      step_shrink <= 0 || step_shrink >= 1)
    throw InputDomainError("MinimizeConfig: parameters must be positive (shrink in (0,1))");
}

void SweepConfig::validate() const {
  if (epsilon0 <= 0 || ratio <= 0 || ratio >= 1 || count < 1)
    throw InputDomainError("SweepConfig: need epsilon0 > 0, ratio in (0,1), count >= 1");
}

std::vector<double> SweepConfig::schedule() const {
  validate();
  std::vector<double> eps(static_cast<std::size_t>(count));
  double e = epsilon0;
  for (int i = 0; i < count; ++i, e *= ratio) eps[static_cast<std::size_t>(i)] = e;
  return eps;
}

namespace {

// Surface quadrature nodes for the weak anchoring term.
struct SurfaceNode {
  std::uint32_t idx;
  double weight;  // area fraction, multiplied by h^2 at use
};

std::vector<SurfaceNode> surface_nodes(const Grid& g) {
  std::vector<SurfaceNode> out;
  if (g.domain == DomainKind::Box) {
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      int c[3];
      g.coords(idx, &c[0], &c[1], &c[2]);
      double w = 0.0;
      for (int ax = 0; ax < 3; ++ax) {
        if (c[ax] != 0 && c[ax] != g.n[static_cast<std::size_t>(ax)] - 1) continue;
        double face_w = 1.0;  // trapezoid weight within the face
        for (int o = 0; o < 3; ++o) {
          if (o == ax) continue;
          if (c[o] == 0 || c[o] == g.n[static_cast<std::size_t>(o)] - 1) face_w *= 0.5;
        }
        w += face_w;
      }
      if (w > 0) out.push_back({static_cast<std::uint32_t>(idx), w});
    }
    return out;
  }
  if (g.domain == DomainKind::HalfBall) {
    // Flat face only: disc of radius R with 4-point partial-area weights.
    const double q = 0.25 * g.h;
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const std::size_t idx = g.index(i, j, 0);
        const Vec3 x = g.pos(idx);
        const double dx = x[0] - g.center[0], dy = x[1] - g.center[1];
        int inside = 0;
        for (int s = 0; s < 4; ++s) {
          const double sx = dx + ((s & 1) ? q : -q);
          const double sy = dy + ((s & 2) ? q : -q);
          if (sx * sx + sy * sy <= g.radius * g.radius) ++inside;
        }
        if (inside > 0) out.push_back({static_cast<std::uint32_t>(idx), inside / 4.0});
      }
    return out;
  }
  throw InputDomainError("weak anchoring: unsupported domain kind");
}

// The full discrete objective: variational elastic + midpoint potential over
// box-trapezoid cell weights + optional surface term.
class Objective {
 public:
  Objective(const Grid& grid, int k, double eps, const ElasticModel& model,
            const Potential& pot, const AnchoringSpec& anchoring)
      : grid_(grid), k_(k), eps_(eps), model_(model), pot_(pot), anchoring_(anchoring) {
    cellw_.resize(grid.size());
    aw_.assign(grid.size(), 1.0);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      int c[3];
      grid.coords(idx, &c[0], &c[1], &c[2]);
      double w = 1.0;
      for (int ax = 0; ax < 3; ++ax)
        if (c[ax] == 0 || c[ax] == grid.n[static_cast<std::size_t>(ax)] - 1) w *= 0.5;
      cellw_[idx] = w;
      if (model.has_weight()) aw_[idx] = model.weight(grid.pos(idx));
    }
    if (anchoring.kind == AnchoringKind::Weak) {
      surf_ = surface_nodes(grid);
      qb_.resize(surf_.size() * static_cast<std::size_t>(k));
      for (std::size_t s = 0; s < surf_.size(); ++s) {
        const TargetPoint p = anchoring.preferred(grid.pos(surf_[s].idx));
        for (int a = 0; a < k; ++a) qb_[s * static_cast<std::size_t>(k) + a] = p[a];
      }
    }
  }

  EnergyBreakdown energy(const Field& f) const {
    EnergyBreakdown out;
    out.elastic = elastic_energy_variational(f, model_);
    const double h3 = grid_.h * grid_.h * grid_.h;
    std::vector<double> terms(grid_.size());
    parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t idx = b; idx < e; ++idx)
        terms[idx] = cellw_[idx] * aw_[idx] * pot_.f_raw(f.at(idx)) * h3;
    });
    out.potential = pairwise_sum(terms);
    out.total = out.elastic + out.potential / (eps_ * eps_);
    out.total += surface_energy(f);
    return out;
  }

  double surface_energy(const Field& f) const {
    if (surf_.empty()) return 0.0;
    const double h2 = grid_.h * grid_.h;
    std::vector<double> terms(surf_.size());
    for (std::size_t s = 0; s < surf_.size(); ++s) {
      const double* u = f.at(surf_[s].idx);
      const double* qb = qb_.data() + s * static_cast<std::size_t>(k_);
      double d2 = 0.0;
      for (int a = 0; a < k_; ++a) d2 += (u[a] - qb[a]) * (u[a] - qb[a]);
      terms[s] = surf_[s].weight * anchoring_.strength * d2 * h2;
    }
    return pairwise_sum(terms);
  }

  // dE/du for every node (no Dirichlet zeroing here).
  void gradient(const Field& f, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    elastic_gradient_accumulate(f, model_, 1.0, out);
    const double h3 = grid_.h * grid_.h * grid_.h;
    const double pscale = h3 / (eps_ * eps_);
    parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
      double gf[5];
      for (std::size_t idx = b; idx < e; ++idx) {
        pot_.grad_f_raw(f.at(idx), gf);
        double* gp = out.data() + idx * static_cast<std::size_t>(k_);
        const double c = pscale * cellw_[idx] * aw_[idx];
        for (int a = 0; a < k_; ++a) gp[a] += c * gf[a];
      }
    });
    if (!surf_.empty()) {
      const double h2 = grid_.h * grid_.h;
      for (std::size_t s = 0; s < surf_.size(); ++s) {
        const double* u = f.at(surf_[s].idx);
        const double* qb = qb_.data() + s * static_cast<std::size_t>(k_);
        double* gp = out.data() + surf_[s].idx * static_cast<std::size_t>(k_);
        const double c = 2.0 * anchoring_.strength * surf_[s].weight * h2;
        for (int a = 0; a < k_; ++a) gp[a] += c * (u[a] - qb[a]);
      }
    }
  }

 private:
  const Grid& grid_;
  int k_;
  double eps_;
  const ElasticModel& model_;
  const Potential& pot_;
  const AnchoringSpec& anchoring_;
  std::vector<double> cellw_;
  std::vector<double> aw_;
  std::vector<SurfaceNode> surf_;
  std::vector<double> qb_;
};

double max_node_residual(const std::vector<double>& grad, const Field& f, double inv_h3) {
  double best = 0.0;
  const int k = f.k;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    if (f.dirichlet[idx]) continue;
    const double* gp = grad.data() + idx * static_cast<std::size_t>(k);
    double n2 = 0.0;
    for (int a = 0; a < k; ++a) n2 += gp[a] * gp[a];
    best = std::max(best, n2);
  }
  return std::sqrt(best) * inv_h3;
}

void zero_dirichlet(std::vector<double>& grad, const Field& f) {
  const int k = f.k;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx)
    if (f.dirichlet[idx]) {
      double* gp = grad.data() + idx * static_cast<std::size_t>(k);
      for (int a = 0; a < k; ++a) gp[a] = 0.0;
    }
}

}  // namespace

Field el_residual(const Field& f, double eps, const ElasticModel& model,
                  const Potential& pot, const AnchoringSpec& anchoring) {
  if (eps <= 0) throw InputDomainError("el_residual: eps must be positive");
  Objective obj(f.grid, f.k, eps, model, pot, anchoring);
  Field out = make_field(f.grid, f.k);
  obj.gradient(f, out.values);
  zero_dirichlet(out.values, f);
  const double inv_h3 = 1.0 / (f.grid.h * f.grid.h * f.grid.h);
  for (double& v : out.values) v *= inv_h3;
  return out;
}

EnergyBreakdown objective_energy(const Field& f, double eps, const ElasticModel& model,
                                 const Potential& pot, const AnchoringSpec& anchoring) {
  Objective obj(f.grid, f.k, eps, model, pot, anchoring);
  return obj.energy(f);
}

MinimizeResult minimize(const Field& init, const MinimizeConfig& cfg,
                        const ElasticModel& model, const Potential& pot,
                        const AnchoringSpec& anchoring) {
  cfg.validate(init.grid);
  if (!init.all_finite()) throw InputDomainError("minimize: initial field has non-finite values");
  if (model.dim() != init.k || pot.dim() != init.k)
    throw InputDomainError("minimize: model/potential dimension does not match field");

  MinimizeResult res;
  res.field = init;
  Field& u = res.field;
  const std::size_t nvals = u.values.size();
  const double h3 = u.grid.h * u.grid.h * u.grid.h;
  const double inv_h3 = 1.0 / h3;

  Objective obj(u.grid, u.k, cfg.epsilon, model, pot, anchoring);
  std::vector<double> grad(nvals, 0.0), grad_prev(nvals, 0.0);
  std::vector<double> u_prev(nvals, 0.0);
  std::vector<double> trial(nvals, 0.0);

  obj.gradient(u, grad);
  zero_dirichlet(grad, u);
  EnergyBreakdown en = obj.energy(u);
  double residual = max_node_residual(grad, u, inv_h3);
  res.log.push_back({0, en.total, en.elastic, en.potential / (cfg.epsilon * cfg.epsilon),
                     residual, 0.0});

  double step = cfg.initial_step;
  bool have_prev = false;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (residual < cfg.grad_tol) break;

    // Trial step: Barzilai-Borwein when history exists, clamped; the Armijo
    // backtracking below keeps every accepted step a strict descent step.
    double tau = step;
    if (have_prev) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < nvals; ++i) {
        const double s = u.values[i] - u_prev[i];
        ss += s * s;
        sy += s * (grad[i] - grad_prev[i]) * inv_h3;
      }
      if (sy > 0.0 && ss > 0.0) tau = std::clamp(ss / sy, 1e-6 * step, 1e4 * step);
    }

    const double slope = [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < nvals; ++i) s += grad[i] * grad[i];
      return -s * inv_h3;  // <dE/du, direction> with direction = -grad/h^3
    }();

    bool accepted = false;
    EnergyBreakdown en_trial;
    Field tf;
    tf.grid = u.grid;
    tf.k = u.k;
    for (int halvings = 0; halvings <= 60; ++halvings) {
      for (std::size_t i = 0; i < nvals; ++i)
        trial[i] = u.values[i] - tau * grad[i] * inv_h3;
      tf.values.swap(trial);
      en_trial = obj.energy(tf);
      tf.values.swap(trial);
      if (en_trial.total <= en.total + cfg.armijo_c * tau * slope) {
        accepted = true;
        break;
      }
      tau *= cfg.step_shrink;
    }
    if (!accepted)
      throw StagnationError("minimize: line search failed after 60 halvings", it, en.total,
                            residual);

    u_prev = u.values;
    grad_prev = grad;
    u.values.swap(trial);
    have_prev = true;
    step = tau;
    en = en_trial;

    obj.gradient(u, grad);
    zero_dirichlet(grad, u);
    residual = max_node_residual(grad, u, inv_h3);
    res.iterations = it;
    res.log.push_back({it, en.total, en.elastic, en.potential / (cfg.epsilon * cfg.epsilon),
                       residual, tau});
  }

  res.final_residual = residual;
  res.converged = residual < cfg.grad_tol;
  return res;
}

SweepResult epsilon_sweep(const Field& init, const SweepConfig& sweep,
                          const MinimizeConfig& base, const ElasticModel& model,
                          const Potential& pot, const AnchoringSpec& anchoring) {
  const std::vector<double> eps = sweep.schedule();
  SweepResult out;
  const Mask dom = domain_mask(init.grid);
  Field start = init;
  for (std::size_t stage = 0; stage < eps.size(); ++stage) {
    MinimizeConfig cfg = base;
    cfg.epsilon = eps[stage];
    MinimizeResult r;
    try {
      r = minimize(sweep.warm_start && stage > 0 ? out.fields.back() : start, cfg, model,
                   pot, anchoring);
    } catch (const Error& e) {
      throw Error("epsilon_sweep: stage " + std::to_string(stage) + ": " + e.what());
    }
    SweepStage row{};
    row.epsilon = eps[stage];
    row.energy_total = r.log.back().energy_total;
    row.energy_elastic = r.log.back().energy_elastic;
    row.energy_potential = r.log.back().energy_potential;
    row.iterations = r.iterations;
    row.final_residual = r.final_residual;
    double md = 0.0, sn = 0.0;
    for (std::size_t m = 0; m < dom.nodes.size(); ++m) {
      const TargetPoint p = r.field.point(dom.nodes[m]);
      md = std::max(md, dist_to_N(p, pot));
      sn = std::max(sn, p.norm());
    }
    row.max_dist_to_N = md;
    row.sup_norm = sn;
    row.h1_increment =
        stage == 0 ? 0.0 : h1_distance(r.field, out.fields.back(), dom);
    out.stages.push_back(row);
    out.fields.push_back(std::move(r.field));
  }
  return out;
}

}  // namespace epsflow
