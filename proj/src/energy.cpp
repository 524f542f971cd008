#include "epsflow/energy.hpp"

#include <cmath>
#include <vector>

#include "epsflow/parallel.hpp"

namespace epsflow {

namespace {

// Collects the per-axis staggered differences (averaged forward/backward,
// one-sided at lattice faces) and the central differences used by the mixed
// blocks into G[alpha*3 + ax].
void node_differences(const Field& f, std::size_t idx, double* staggered_sq_acc,
                      double* central, bool* have_both) {
  const Grid& g = f.grid;
  const int k = f.k;
  const std::size_t strides[3] = {1, static_cast<std::size_t>(g.n[0]),
                                  static_cast<std::size_t>(g.n[0]) *
                                      static_cast<std::size_t>(g.n[1])};
  int c[3];
  g.coords(idx, &c[0], &c[1], &c[2]);
  const double* u0 = f.at(idx);
  for (int ax = 0; ax < 3; ++ax) {
    const bool has_p = c[ax] < g.n[static_cast<std::size_t>(ax)] - 1;
    const bool has_m = c[ax] > 0;
    const double* up = has_p ? f.at(idx + strides[ax]) : nullptr;
    const double* um = has_m ? f.at(idx - strides[ax]) : nullptr;
    have_both[ax] = has_p && has_m;
    for (int a = 0; a < k; ++a) {
      const double dp = has_p ? (up[a] - u0[a]) / g.h : 0.0;
      const double dm = has_m ? (u0[a] - um[a]) / g.h : 0.0;
      if (has_p && has_m) {
        staggered_sq_acc[(a * 3 + ax) * 2] = dp;
        staggered_sq_acc[(a * 3 + ax) * 2 + 1] = dm;
        central[a * 3 + ax] = 0.5 * (dp + dm);
      } else {
        const double d = has_p ? dp : dm;
        staggered_sq_acc[(a * 3 + ax) * 2] = d;
        staggered_sq_acc[(a * 3 + ax) * 2 + 1] = d;
        central[a * 3 + ax] = d;
      }
    }
  }
}

}  // namespace

double variational_node_density(const Field& f, const ElasticModel& model,
                                std::size_t idx) {
  const int k = f.k;
  double stag[5 * 3 * 2];
  double cen[5 * 3];
  bool have_both[3];
  node_differences(f, idx, stag, cen, have_both);
  double acc = 0.0;
  // axis-aligned blocks on the two half-faces
  for (int ax = 0; ax < 3; ++ax) {
    const auto& blk = model.block(ax, ax);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const double w = blk[static_cast<std::size_t>(a * k + b)];
        if (w == 0.0) continue;
        acc += 0.5 * w *
               (stag[(a * 3 + ax) * 2] * stag[(b * 3 + ax) * 2] +
                stag[(a * 3 + ax) * 2 + 1] * stag[(b * 3 + ax) * 2 + 1]);
      }
  }
  // mixed blocks from central differences
  for (int ai = 0; ai < 3; ++ai)
    for (int aj = 0; aj < 3; ++aj) {
      if (ai == aj) continue;
      const auto& blk = model.block(ai, aj);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const double w = blk[static_cast<std::size_t>(a * k + b)];
          if (w == 0.0) continue;
          acc += w * cen[a * 3 + ai] * cen[b * 3 + aj];
        }
    }
  return acc;
}

double dirichlet_node_density(const Field& f, std::size_t idx) {
  const int k = f.k;
  double stag[5 * 3 * 2];
  double cen[5 * 3];
  bool have_both[3];
  node_differences(f, idx, stag, cen, have_both);
  double acc = 0.0;
  for (int a = 0; a < k * 3; ++a)
    acc += 0.5 * (stag[a * 2] * stag[a * 2] + stag[a * 2 + 1] * stag[a * 2 + 1]);
  return acc;
}

EnergyBreakdown energy(const Field& f, double eps, const ElasticModel& model,
                       const Potential& pot, const Mask& mask) {
  if (eps <= 0) throw InputDomainError("energy: eps must be positive");
  if (model.dim() != f.k || pot.dim() != f.k)
    throw InputDomainError("energy: model/potential dimension does not match field");
  const double h3 = f.grid.h * f.grid.h * f.grid.h;
  std::vector<double> el(mask.nodes.size()), po(mask.nodes.size());
  for (std::size_t m = 0; m < mask.nodes.size(); ++m) {
    const std::size_t idx = mask.nodes[m];
    const double aw = model.has_weight() ? model.weight(f.grid.pos(idx)) : 1.0;
    el[m] = mask.weights[m] * aw * variational_node_density(f, model, idx) * h3;
    po[m] = mask.weights[m] * aw * pot.f_raw(f.at(idx)) * h3;
  }
  EnergyBreakdown out;
  out.elastic = pairwise_sum(el);
  out.potential = pairwise_sum(po);
  out.total = out.elastic + out.potential / (eps * eps);
  return out;
}

double renormalized_energy(const Field& f, double eps, const ElasticModel& model,
                           const Potential& pot, const Vec3& center, double r) {
  if (r < 4.0 * f.grid.h)
    throw GeometryError("renormalized_energy: radius below 4h is not resolvable");
  const Mask m = ball_mask(f.grid, center, r);
  return energy(f, eps, model, pot, m).total / r;
}

double masked_dirichlet_energy(const Field& f, const Mask& mask) {
  const double h3 = f.grid.h * f.grid.h * f.grid.h;
  std::vector<double> terms(mask.nodes.size());
  for (std::size_t m = 0; m < mask.nodes.size(); ++m)
    terms[m] = mask.weights[m] * dirichlet_node_density(f, mask.nodes[m]) * h3;
  return pairwise_sum(terms);
}

namespace {

// Applies the k x k block to a difference vector: out[b] = sum_a blk[a*k+b] d[a].
inline void block_apply_t(const std::vector<double>& blk, int k, const double* d,
                          double* out) {
  for (int b = 0; b < k; ++b) {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += blk[static_cast<std::size_t>(a * k + b)] * d[a];
    out[b] = s;
  }
}

inline void block_apply(const std::vector<double>& blk, int k, const double* d,
                        double* out) {
  for (int a = 0; a < k; ++a) {
    double s = 0.0;
    const double* row = blk.data() + static_cast<std::size_t>(a * k);
    for (int b = 0; b < k; ++b) s += row[b] * d[b];
    out[a] = s;
  }
}

}  // namespace

// Shared face/node walker. When grad_out is null only the energy terms are
// collected; otherwise scale * dE/du is scattered into grad_out.
static double elastic_walk(const Field& f, const ElasticModel& model, double scale,
                           std::vector<double>* grad_out) {
  const Grid& g = f.grid;
  for (int a = 0; a < 3; ++a)
    if (g.n[static_cast<std::size_t>(a)] < 3)
      throw InputDomainError("elastic operator: need >= 3 nodes per axis");
  const int k = f.k;
  if (model.dim() != k) throw InputDomainError("elastic operator: dimension mismatch");
  const double h = g.h;
  const double h3 = h * h * h;
  const std::size_t strides[3] = {1, static_cast<std::size_t>(g.n[0]),
                                  static_cast<std::size_t>(g.n[0]) *
                                      static_cast<std::size_t>(g.n[1])};
  const bool weighted = model.has_weight();

  std::vector<double> energy_terms;
  if (!grad_out) energy_terms.reserve(g.size() * 4);

  double d[5], t[5], ci[5], cj[5];

  // Axis-aligned blocks on staggered faces.
  for (int ax = 0; ax < 3; ++ax) {
    const auto& blk = model.block(ax, ax);
    const std::size_t s = strides[ax];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      int c[3];
      g.coords(idx, &c[0], &c[1], &c[2]);
      if (c[ax] >= g.n[static_cast<std::size_t>(ax)] - 1) continue;
      const double* u0 = f.at(idx);
      const double* u1 = f.at(idx + s);
      for (int a = 0; a < k; ++a) d[a] = (u1[a] - u0[a]) / h;
      double aw = 1.0;
      if (weighted) {
        Vec3 x = g.pos(idx);
        x[static_cast<std::size_t>(ax)] += 0.5 * h;
        aw = model.weight(x);
      }
      if (grad_out) {
        block_apply(blk, k, d, t);
        const double c2 = scale * 2.0 * h3 * aw / h;
        double* gp0 = grad_out->data() + idx * static_cast<std::size_t>(k);
        double* gp1 = grad_out->data() + (idx + s) * static_cast<std::size_t>(k);
        for (int a = 0; a < k; ++a) {
          gp1[a] += c2 * t[a];
          gp0[a] -= c2 * t[a];
        }
      } else {
        double q = 0.0;
        block_apply(blk, k, d, t);
        for (int a = 0; a < k; ++a) q += d[a] * t[a];
        energy_terms.push_back(h3 * aw * q);
      }
    }
  }

  // Mixed blocks at nodes where both central differences exist.
  for (int ai = 0; ai < 3; ++ai)
    for (int aj = ai + 1; aj < 3; ++aj) {
      const auto& blk = model.block(ai, aj);
      const std::size_t si = strides[ai], sj = strides[aj];
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int c[3];
        g.coords(idx, &c[0], &c[1], &c[2]);
        if (c[ai] == 0 || c[ai] == g.n[static_cast<std::size_t>(ai)] - 1) continue;
        if (c[aj] == 0 || c[aj] == g.n[static_cast<std::size_t>(aj)] - 1) continue;
        const double* uip = f.at(idx + si);
        const double* uim = f.at(idx - si);
        const double* ujp = f.at(idx + sj);
        const double* ujm = f.at(idx - sj);
        for (int a = 0; a < k; ++a) {
          ci[a] = (uip[a] - uim[a]) / (2.0 * h);
          cj[a] = (ujp[a] - ujm[a]) / (2.0 * h);
        }
        const double aw = weighted ? model.weight(g.pos(idx)) : 1.0;
        if (grad_out) {
          const double c2 = scale * 2.0 * h3 * aw / (2.0 * h);
          block_apply(blk, k, cj, t);  // t = A_ij c_j
          double* gp;
          gp = grad_out->data() + (idx + si) * static_cast<std::size_t>(k);
          for (int a = 0; a < k; ++a) gp[a] += c2 * t[a];
          gp = grad_out->data() + (idx - si) * static_cast<std::size_t>(k);
          for (int a = 0; a < k; ++a) gp[a] -= c2 * t[a];
          block_apply_t(blk, k, ci, t);  // t = A_ij^T c_i
          gp = grad_out->data() + (idx + sj) * static_cast<std::size_t>(k);
          for (int a = 0; a < k; ++a) gp[a] += c2 * t[a];
          gp = grad_out->data() + (idx - sj) * static_cast<std::size_t>(k);
          for (int a = 0; a < k; ++a) gp[a] -= c2 * t[a];
        } else {
          block_apply(blk, k, cj, t);
          double q = 0.0;
          for (int a = 0; a < k; ++a) q += ci[a] * t[a];
          energy_terms.push_back(2.0 * h3 * aw * q);
        }
      }
    }

  if (grad_out) return 0.0;
  return pairwise_sum(energy_terms);
}

double elastic_energy_variational(const Field& f, const ElasticModel& model) {
  return elastic_walk(f, model, 1.0, nullptr);
}

void elastic_gradient_accumulate(const Field& f, const ElasticModel& model, double scale,
                                 std::vector<double>& out) {
  elastic_walk(f, model, scale, &out);
}

Field elastic_operator_apply(const Field& f, const ElasticModel& model) {
  Field out = make_field(f.grid, f.k);
  const double inv_h3 = 1.0 / (f.grid.h * f.grid.h * f.grid.h);
  elastic_gradient_accumulate(f, model, inv_h3, out.values);
  return out;
}

}  // namespace epsflow
