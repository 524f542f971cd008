#include "epsflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace epsflow {

namespace {

// Least squares slope of log(y) against log(x) over positive entries.
bool loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                  double* slope, double* rms) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 1e-300) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return false;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-14) return false;
  *slope = (n * sxy - sx * sy) / den;
  const double b = (sy - *slope * sx) / n;
  double acc = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (*slope * lx[i] + b);
    acc += r * r;
  }
  *rms = std::sqrt(acc / n);
  return true;
}

}  // namespace

DecayReport decay_profile(const Field& f, double eps, const ElasticModel& model,
                          const Potential& pot, const Vec3& center,
                          const std::vector<double>& radii, double delta) {
  DecayReport rep;
  rep.center = center;
  rep.delta = delta;
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> rs, ds;
  for (double r : sorted) {
    if (r < 4.0 * f.grid.h) continue;
    Mask m;
    try {
      m = ball_mask(f.grid, center, r);
    } catch (const GeometryError&) {
      continue;
    }
    const EnergyBreakdown en = energy(f, eps, model, pot, m);
    DecayRow row{};
    row.r = r;
    row.renorm_energy = en.total / r;
    row.renorm_dirichlet = masked_dirichlet_energy(f, m) / r;
    row.data_norm = 0.0;
    row.below_delta = delta > 0.0 && row.renorm_energy <= delta * delta;
    rep.rows.push_back(row);
    rs.push_back(r);
    ds.push_back(row.renorm_dirichlet);
  }
  if (rep.rows.size() < 2)
    throw InsufficientDataError("decay_profile: fewer than two resolvable radii");
  double slope = 0, rms = 0;
  if (rep.rows.size() >= 3 && loglog_slope(rs, ds, &slope, &rms)) {
    rep.alpha_defined = true;
    rep.alpha = slope;
    rep.fit_residual = rms;
  }
  return rep;
}

std::optional<double> large_scale_ratio(const Field& f, double eps,
                                        const ElasticModel& model, const Potential& pot,
                                        const Vec3& center, double r0, double theta) {
  if (!(theta > 0.0 && theta <= 0.5))
    throw InputDomainError("large_scale_ratio: theta must lie in (0, 1/2]");
  if (theta * r0 < 4.0 * f.grid.h)
    throw GeometryError("large_scale_ratio: inner ball below 4h");
  const Mask outer = ball_mask(f.grid, center, r0);
  const Mask inner = ball_mask(f.grid, center, theta * r0);
  const double e_outer = energy(f, eps, model, pot, outer).total;
  if (e_outer < 1e-14) return std::nullopt;
  const double e_inner = energy(f, eps, model, pot, inner).total;
  return (e_inner / theta) / e_outer;
}

CampanatoReport campanato_holder(const Field& f, const Vec3& center, double region_radius,
                                 double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InputDomainError("campanato_holder: alpha must lie in (0,1)");
  const double h = f.grid.h;
  if (region_radius < 8.0 * h)
    throw InputDomainError("campanato_holder: region smaller than the smallest ball");
  CampanatoReport rep;

  // Dyadic radii and a coarse sublattice of centers anchored at the node
  // nearest to the queried center.
  std::vector<double> radii;
  for (double r = 4.0 * h; r <= region_radius / 2.0; r *= 2.0) radii.push_back(r);
  const int stride = std::max(1, f.grid.n[0] / 9);
  int anchor[3];
  for (int ax = 0; ax < 3; ++ax)
    anchor[ax] = static_cast<int>(
        std::lround((center[static_cast<std::size_t>(ax)] -
                     f.grid.origin[static_cast<std::size_t>(ax)]) /
                    h));
  const int off[3] = {((anchor[0] % stride) + stride) % stride,
                      ((anchor[1] % stride) + stride) % stride,
                      ((anchor[2] % stride) + stride) % stride};
  for (double r : radii) {
    for (int kk = off[2]; kk < f.grid.n[2]; kk += stride)
      for (int jj = off[1]; jj < f.grid.n[1]; jj += stride)
        for (int ii = off[0]; ii < f.grid.n[0]; ii += stride) {
          const Vec3 x = f.grid.pos(ii, jj, kk);
          const Vec3 d{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
          if (norm3(d) + r > region_radius) continue;
          Mask m;
          try {
            m = ball_mask(f.grid, x, r);
          } catch (const GeometryError&) {
            continue;
          }
          const double dir = masked_dirichlet_energy(f, m);
          rep.sup_value = std::max(rep.sup_value, dir / std::pow(r, 1.0 + 2.0 * alpha));
          ++rep.balls;
        }
  }
  // Morrey-type dimensional constant for n = 3; reported, not asserted.
  rep.holder_bound = (8.0 / alpha) / std::sqrt(4.0 * M_PI / 3.0) * std::sqrt(rep.sup_value);

  // Direct discrete Hoelder quotient over sampled pairs.
  std::vector<std::size_t> pts;
  for (int kk = off[2]; kk < f.grid.n[2]; kk += stride)
    for (int jj = off[1]; jj < f.grid.n[1]; jj += stride)
      for (int ii = off[0]; ii < f.grid.n[0]; ii += stride) {
        const Vec3 x = f.grid.pos(ii, jj, kk);
        const Vec3 d{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
        if (norm3(d) <= region_radius) pts.push_back(f.grid.index(ii, jj, kk));
      }
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const Vec3 xa = f.grid.pos(pts[a]);
      const Vec3 xb = f.grid.pos(pts[b]);
      const Vec3 d{xa[0] - xb[0], xa[1] - xb[1], xa[2] - xb[2]};
      const double dist = norm3(d);
      if (dist < 1e-14) continue;
      const TargetPoint diff = f.point(pts[a]) - f.point(pts[b]);
      rep.direct_quotient =
          std::max(rep.direct_quotient, diff.norm() / std::pow(dist, alpha));
    }
  return rep;
}

BoundaryDecayReport boundary_decay_profile(const Field& f, double eps,
                                           const ElasticModel& model, const Potential& pot,
                                           const Vec3& x0_prime,
                                           const std::vector<double>& radii, double delta) {
  const Grid& grid = f.grid;
  if (grid.domain != DomainKind::HalfBall)
    throw InputDomainError("boundary_decay_profile: needs a half-ball domain");
  const double plane_z = grid.center[2];
  if (std::abs(x0_prime[2] - plane_z) > 0.25 * grid.h)
    throw InputDomainError("boundary_decay_profile: point is not on the flat boundary face");

  BoundaryDecayReport out;
  DecayReport& rep = out.decay;
  rep.center = x0_prime;
  rep.delta = delta;
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> rs, ds;
  for (double r : sorted) {
    if (r < 4.0 * grid.h) continue;
    Mask m;
    try {
      m = half_ball_mask(grid, x0_prime, r, plane_z);
    } catch (const GeometryError&) {
      continue;
    }
    const EnergyBreakdown en = energy(f, eps, model, pot, m);
    DecayRow row{};
    row.r = r;
    row.renorm_energy = en.total / r;
    row.renorm_dirichlet = masked_dirichlet_energy(f, m) / r;

    // N(u_b; B'_r): tangential first and second differences of the plane data.
    double g1 = 0.0, g2 = 0.0;
    const double r2 = r * r;
    for (int jj = 1; jj + 1 < grid.n[1]; ++jj)
      for (int ii = 1; ii + 1 < grid.n[0]; ++ii) {
        const Vec3 x = grid.pos(ii, jj, 0);
        const double dx = x[0] - x0_prime[0], dy = x[1] - x0_prime[1];
        if (dx * dx + dy * dy > r2) continue;
        double gsq = 0.0, hsq = 0.0;
        const std::size_t c = grid.index(ii, jj, 0);
        const std::size_t xp = grid.index(ii + 1, jj, 0), xm = grid.index(ii - 1, jj, 0);
        const std::size_t yp = grid.index(ii, jj + 1, 0), ym = grid.index(ii, jj - 1, 0);
        const std::size_t pp = grid.index(ii + 1, jj + 1, 0),
                          pm = grid.index(ii + 1, jj - 1, 0),
                          mp = grid.index(ii - 1, jj + 1, 0),
                          mm = grid.index(ii - 1, jj - 1, 0);
        for (int a = 0; a < f.k; ++a) {
          const double ux = (f.at(xp)[a] - f.at(xm)[a]) / (2 * grid.h);
          const double uy = (f.at(yp)[a] - f.at(ym)[a]) / (2 * grid.h);
          gsq += ux * ux + uy * uy;
          const double uxx =
              (f.at(xp)[a] - 2 * f.at(c)[a] + f.at(xm)[a]) / (grid.h * grid.h);
          const double uyy =
              (f.at(yp)[a] - 2 * f.at(c)[a] + f.at(ym)[a]) / (grid.h * grid.h);
          const double uxy = (f.at(pp)[a] - f.at(pm)[a] - f.at(mp)[a] + f.at(mm)[a]) /
                             (4 * grid.h * grid.h);
          hsq += uxx * uxx + uyy * uyy + 2 * uxy * uxy;
        }
        g1 = std::max(g1, gsq);
        g2 = std::max(g2, std::sqrt(hsq));
      }
    row.data_norm = r2 * g1 + r2 * r2 * g2;
    row.below_delta = delta > 0.0 && row.renorm_energy + row.data_norm <= delta * delta;
    rep.rows.push_back(row);
    rs.push_back(r);
    ds.push_back(row.renorm_dirichlet);
  }
  if (rep.rows.size() < 2)
    throw InsufficientDataError("boundary_decay_profile: fewer than two resolvable radii");
  double slope = 0, rms = 0;
  if (rep.rows.size() >= 3 && loglog_slope(rs, ds, &slope, &rms)) {
    rep.alpha_defined = true;
    rep.alpha = slope;
    rep.fit_residual = rms;
  }
  return out;
}

DefectSet detect_defects(const Field& f, const Potential& pot, double tau) {
  DefectSet set;
  set.tau = tau;
  set.beta_threshold = 0.9;
  const Grid& g = f.grid;
  std::vector<std::uint8_t> flag(g.size(), 0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const TargetPoint p = f.point(idx);
    bool defect = dist_to_N(p, pot) > tau;
    if (!defect && f.k == 5 && p.norm() > 1e-6 * pot.s_star())
      defect = biaxiality(p) > set.beta_threshold;
    if (defect) {
      flag[idx] = 1;
      set.nodes.push_back(static_cast<std::uint32_t>(idx));
    }
  }
  // 6-connected components in index order.
  std::vector<std::uint8_t> seen(g.size(), 0);
  for (std::uint32_t start : set.nodes) {
    if (seen[start]) continue;
    DefectComponent comp;
    std::deque<std::uint32_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::uint32_t idx = queue.front();
      queue.pop_front();
      comp.nodes.push_back(idx);
      int ci, cj, ck;
      g.coords(idx, &ci, &cj, &ck);
      const int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                             {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
      for (const auto& o : off) {
        const int ni = ci + o[0], nj = cj + o[1], nk = ck + o[2];
        if (ni < 0 || nj < 0 || nk < 0 || ni >= g.n[0] || nj >= g.n[1] || nk >= g.n[2])
          continue;
        const std::size_t nidx = g.index(ni, nj, nk);
        if (!flag[nidx] || seen[nidx]) continue;
        seen[nidx] = 1;
        queue.push_back(static_cast<std::uint32_t>(nidx));
      }
    }
    comp.size = static_cast<int>(comp.nodes.size());
    Vec3 c{0, 0, 0};
    for (std::uint32_t idx : comp.nodes) {
      const Vec3 x = g.pos(idx);
      for (int a = 0; a < 3; ++a) c[a] += x[a];
    }
    for (int a = 0; a < 3; ++a) c[a] /= comp.size;
    comp.center = c;
    set.components.push_back(std::move(comp));
  }
  return set;
}

std::vector<ConvergenceRow> convergence_report(const SweepResult& sweep,
                                               const Potential& pot, double tau,
                                               double exclusion_radius) {
  if (sweep.fields.size() < 2)
    throw InsufficientDataError("convergence_report: need at least two sweep stages");
  const Field& final_field = sweep.fields.back();
  const DefectSet final_defects = detect_defects(final_field, pot, tau);
  const Mask dom = domain_mask(final_field.grid);

  // Domain mask minus exclusion balls around the final defect components.
  Mask excl = dom;
  {
    std::vector<std::uint32_t> nodes;
    std::vector<double> weights;
    for (std::size_t m = 0; m < dom.nodes.size(); ++m) {
      const Vec3 x = final_field.grid.pos(dom.nodes[m]);
      bool keep = true;
      for (const auto& comp : final_defects.components) {
        const Vec3 d{x[0] - comp.center[0], x[1] - comp.center[1], x[2] - comp.center[2]};
        if (norm3(d) < exclusion_radius) {
          keep = false;
          break;
        }
      }
      if (keep) {
        nodes.push_back(dom.nodes[m]);
        weights.push_back(dom.weights[m]);
      }
    }
    excl.nodes = std::move(nodes);
    excl.weights = std::move(weights);
  }

  std::vector<ConvergenceRow> rows;
  for (std::size_t s = 0; s < sweep.fields.size(); ++s) {
    ConvergenceRow row{};
    row.epsilon = sweep.stages[s].epsilon;
    row.h1_increment = sweep.stages[s].h1_increment;
    row.linf_to_final = linf_distance(sweep.fields[s], final_field, excl);
    row.sup_norm = sweep.stages[s].sup_norm;
    row.defect_components =
        static_cast<int>(detect_defects(sweep.fields[s], pot, tau).components.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace epsflow
