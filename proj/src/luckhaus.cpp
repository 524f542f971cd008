#include "epsflow/luckhaus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "epsflow/parallel.hpp"

namespace epsflow {

namespace {

// Cube face frames: fixed axis = f/2 with sign +1 for even f, local axes
// (u, v) = (fixed+1, fixed+2) mod 3.
struct FaceFrame {
  int fixed, ua, va;
  double sign;
};

FaceFrame frame_of(int cube_face) {
  FaceFrame fr;
  fr.fixed = cube_face / 2;
  fr.sign = (cube_face % 2 == 0) ? 1.0 : -1.0;
  fr.ua = (fr.fixed + 1) % 3;
  fr.va = (fr.fixed + 2) % 3;
  return fr;
}

// Integer key of an angular lattice point on the cube surface; identical
// across the faces that share it.
std::int64_t lattice_key(int cube_face, long I, long J, long Nt) {
  const FaceFrame fr = frame_of(cube_face);
  long t[3];
  t[fr.fixed] = fr.sign > 0 ? Nt : -Nt;
  t[fr.ua] = 2 * I - Nt;
  t[fr.va] = 2 * J - Nt;
  const std::int64_t base = 2 * Nt + 1;
  return ((t[0] + Nt) * base + (t[1] + Nt)) * base + (t[2] + Nt);
}

}  // namespace

SphereMesh::SphereMesh(int nu) : nu_(nu) {
  if (nu < 1 || nu > 6) throw InputDomainError("SphereMesh: nu must lie in {1..6}");
  n_ = 1 << nu;
  lambda_ = 1.0 / n_;

  // Count vertices and edges of the lambda-level complex via canonical keys.
  std::set<std::int64_t> verts;
  std::set<std::pair<std::int64_t, std::int64_t>> edges;
  for (int cf = 0; cf < 6; ++cf)
    for (int cj = 0; cj < n_; ++cj)
      for (int ci = 0; ci < n_; ++ci) {
        const std::int64_t k00 = lattice_key(cf, ci, cj, n_);
        const std::int64_t k10 = lattice_key(cf, ci + 1, cj, n_);
        const std::int64_t k01 = lattice_key(cf, ci, cj + 1, n_);
        const std::int64_t k11 = lattice_key(cf, ci + 1, cj + 1, n_);
        for (std::int64_t v : {k00, k10, k01, k11}) verts.insert(v);
        auto add_edge = [&edges](std::int64_t a, std::int64_t b) {
          edges.insert({std::min(a, b), std::max(a, b)});
        };
        add_edge(k00, k10);
        add_edge(k10, k11);
        add_edge(k11, k01);
        add_edge(k01, k00);
      }
  num_vertices_ = static_cast<int>(verts.size());
  num_edges_ = static_cast<int>(edges.size());
}

SphereMesh build_sphere_mesh(int nu) { return SphereMesh(nu); }

void SphereMesh::face_decode(int face, int* cube_face, int* ci, int* cj) const {
  *ci = face % n_;
  *cj = (face / n_) % n_;
  *cube_face = face / (n_ * n_);
}

Vec3 SphereMesh::chart(int face, double s, double t) const {
  int cf, ci, cj;
  face_decode(face, &cf, &ci, &cj);
  const FaceFrame fr = frame_of(cf);
  const double alpha = -M_PI / 4.0 + (ci + s) * (M_PI / 2.0) / n_;
  const double beta = -M_PI / 4.0 + (cj + t) * (M_PI / 2.0) / n_;
  Vec3 v{};
  v[fr.fixed] = fr.sign;
  v[fr.ua] = std::tan(alpha);
  v[fr.va] = std::tan(beta);
  return normalized3(v);
}

void SphereMesh::chart_tangents(int face, double s, double t, Vec3* xs, Vec3* xt) const {
  int cf, ci, cj;
  face_decode(face, &cf, &ci, &cj);
  const FaceFrame fr = frame_of(cf);
  const double da = (M_PI / 2.0) / n_;
  const double alpha = -M_PI / 4.0 + (ci + s) * da;
  const double beta = -M_PI / 4.0 + (cj + t) * da;
  Vec3 v{};
  v[fr.fixed] = fr.sign;
  v[fr.ua] = std::tan(alpha);
  v[fr.va] = std::tan(beta);
  const double vn = norm3(v);
  const Vec3 xhat{v[0] / vn, v[1] / vn, v[2] / vn};
  const double ca = std::cos(alpha), cb = std::cos(beta);
  Vec3 dva{}, dvb{};
  dva[fr.ua] = da / (ca * ca);
  dvb[fr.va] = da / (cb * cb);
  auto project = [&](const Vec3& dv) {
    const double c = dot3(xhat, dv);
    return Vec3{(dv[0] - c * xhat[0]) / vn, (dv[1] - c * xhat[1]) / vn,
                (dv[2] - c * xhat[2]) / vn};
  };
  *xs = project(dva);
  *xt = project(dvb);
}

double SphereMesh::face_area(int face, int subdiv) const {
  double area = 0.0;
  const double d = 1.0 / subdiv;
  for (int j = 0; j < subdiv; ++j)
    for (int i = 0; i < subdiv; ++i) {
      Vec3 xs, xt;
      chart_tangents(face, (i + 0.5) * d, (j + 0.5) * d, &xs, &xt);
      const Vec3 cr{xs[1] * xt[2] - xs[2] * xt[1], xs[2] * xt[0] - xs[0] * xt[2],
                    xs[0] * xt[1] - xs[1] * xt[0]};
      area += norm3(cr) * d * d;
    }
  return area;
}

MeshField sample_mesh_field(const SphereMesh& mesh, int m, int k,
                            const std::function<TargetPoint(const Vec3&)>& fn) {
  if (m < 2) throw InputDomainError("sample_mesh_field: chart resolution m must be >= 2");
  MeshField out;
  out.m = m;
  out.k = k;
  out.faces = mesh.faces();
  const std::size_t nodes = static_cast<std::size_t>(out.faces) * (m + 1) * (m + 1);
  out.values.assign(nodes * static_cast<std::size_t>(k), 0.0);
  out.positions.assign(nodes * 3, 0.0);

  const long n = mesh.cells_per_edge();
  const long Nt = n * m;
  std::unordered_map<std::int64_t, std::size_t> registry;  // key -> canonical node
  for (int face = 0; face < out.faces; ++face) {
    int cf, ci, cj;
    mesh.face_decode(face, &cf, &ci, &cj);
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const std::size_t nd = out.node(face, i, j);
        const long I = static_cast<long>(ci) * m + i;
        const long J = static_cast<long>(cj) * m + j;
        const bool on_cube_edge = I == 0 || I == Nt || J == 0 || J == Nt;
        if (on_cube_edge) {
          const auto key = lattice_key(cf, I, J, Nt);
          auto it = registry.find(key);
          if (it != registry.end()) {
            const std::size_t src = it->second;
            for (int a = 0; a < 3; ++a) out.positions[nd * 3 + a] = out.positions[src * 3 + a];
            for (int a = 0; a < k; ++a)
              out.values[nd * static_cast<std::size_t>(k) + a] =
                  out.values[src * static_cast<std::size_t>(k) + a];
            continue;
          }
          registry.emplace(key, nd);
        }
        const Vec3 x = mesh.chart(face, static_cast<double>(i) / m, static_cast<double>(j) / m);
        const TargetPoint v = fn(x);
        for (int a = 0; a < 3; ++a) out.positions[nd * 3 + a] = x[a];
        for (int a = 0; a < k; ++a) out.values[nd * static_cast<std::size_t>(k) + a] = v[a];
      }
  }
  return out;
}

namespace {

// Bilinear interpolation inside one face of a mesh field; (s,t) in [0,1]^2.
TargetPoint face_bilerp(const MeshField& f, int face, double s, double t) {
  const int m = f.m;
  const double x = std::clamp(s, 0.0, 1.0) * m;
  const double y = std::clamp(t, 0.0, 1.0) * m;
  const int i0 = std::min(static_cast<int>(x), m - 1);
  const int j0 = std::min(static_cast<int>(y), m - 1);
  const double fx = x - i0, fy = y - j0;
  TargetPoint out(f.k);
  const double* v00 = f.value(face, i0, j0);
  const double* v10 = f.value(face, i0 + 1, j0);
  const double* v01 = f.value(face, i0, j0 + 1);
  const double* v11 = f.value(face, i0 + 1, j0 + 1);
  for (int a = 0; a < f.k; ++a)
    out[a] = (1 - fx) * (1 - fy) * v00[a] + fx * (1 - fy) * v10[a] +
             (1 - fx) * fy * v01[a] + fx * fy * v11[a];
  return out;
}

// Linear interpolation along one side of a face. Sides: 0: j=0, 1: i=m,
// 2: j=m, 3: i=0, parameter xi in [0,1] along increasing index.
TargetPoint side_lerp(const MeshField& f, int face, int side, double xi) {
  const int m = f.m;
  const double x = std::clamp(xi, 0.0, 1.0) * m;
  const int i0 = std::min(static_cast<int>(x), m - 1);
  const double fx = x - i0;
  auto at = [&](int q) -> const double* {
    switch (side) {
      case 0: return f.value(face, q, 0);
      case 1: return f.value(face, m, q);
      case 2: return f.value(face, q, m);
      default: return f.value(face, 0, q);
    }
  };
  const double* a0 = at(i0);
  const double* a1 = at(i0 + 1);
  TargetPoint out(f.k);
  for (int a = 0; a < f.k; ++a) out[a] = (1 - fx) * a0[a] + fx * a1[a];
  return out;
}

// Lateral prism profile: value at (side, xi, rho) with rho in [0,1],
// rho = 0 on the inner sphere and 1 on the outer sphere.
using LateralProfile = std::function<TargetPoint(int face, int side, double xi, double rho)>;

// Fills an annulus field: outer layer from u, inner layer from `inner`,
// lateral walls from `profile`, interior by sup-norm projection onto the
// prism boundary (the discrete 0-homogeneous extension).
AnnulusField build_annulus(const SphereMesh& mesh, const MeshField& u,
                           const MeshField& inner, const Potential& pot,
                           const LateralProfile& profile, int mr) {
  const int m = u.m;
  AnnulusField phi;
  phi.m = m;
  phi.mr = mr;
  phi.k = u.k;
  phi.faces = u.faces;
  phi.lambda = mesh.lambda();
  phi.values.assign(static_cast<std::size_t>(u.faces) * (mr + 1) * (m + 1) * (m + 1) *
                        static_cast<std::size_t>(u.k),
                    0.0);

  for (int face = 0; face < u.faces; ++face) {
    for (int l = 0; l <= mr; ++l)
      for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i) {
          double* dst = phi.value(face, i, j, l);
          TargetPoint val(u.k);
          if (l == mr) {
            const double* src = u.value(face, i, j);
            for (int a = 0; a < u.k; ++a) val[a] = src[a];
          } else if (l == 0) {
            const double* src = inner.value(face, i, j);
            for (int a = 0; a < u.k; ++a) val[a] = src[a];
          } else if (i == 0 || i == m || j == 0 || j == m) {
            int side;
            double xi;
            if (j == 0) {
              side = 0;
              xi = static_cast<double>(i) / m;
            } else if (i == m) {
              side = 1;
              xi = static_cast<double>(j) / m;
            } else if (j == m) {
              side = 2;
              xi = static_cast<double>(i) / m;
            } else {
              side = 3;
              xi = static_cast<double>(j) / m;
            }
            val = profile(face, side, xi, static_cast<double>(l) / mr);
          } else {
            // 0-homogeneous extension: project from the prism center to the
            // boundary in the sup norm, then evaluate that facet.
            const double da = static_cast<double>(i) / m - 0.5;
            const double db = static_cast<double>(j) / m - 0.5;
            const double dc = static_cast<double>(l) / mr - 0.5;
            const double aa = std::abs(da), ab = std::abs(db), ac = std::abs(dc);
            const double mx = std::max({aa, ab, ac});
            if (mx < 1e-15) {
              // Prism center: use the inner facet center.
              val = face_bilerp(inner, face, 0.5, 0.5);
              val = project_to_N(val, pot);
            } else if (ac >= aa && ac >= ab) {
              const double s = 0.5 / ac;
              const double ba = 0.5 + s * da, bb = 0.5 + s * db;
              if (dc > 0) {
                val = face_bilerp(u, face, ba, bb);
              } else {
                val = project_to_N(face_bilerp(inner, face, ba, bb), pot);
              }
            } else if (aa >= ab) {
              const double s = 0.5 / aa;
              const double bb = 0.5 + s * db, bc = 0.5 + s * dc;
              val = profile(face, da > 0 ? 1 : 3, bb, bc);
            } else {
              const double s = 0.5 / ab;
              const double ba = 0.5 + s * da, bc = 0.5 + s * dc;
              val = profile(face, db > 0 ? 2 : 0, ba, bc);
            }
          }
          for (int a = 0; a < u.k; ++a) dst[a] = val[a];
        }
  }
  return phi;
}

struct SurfaceCellGeometry {
  double g11, g12, g22;  // chart metric
  double area;           // sqrt(det g) * ds * dt
};

SurfaceCellGeometry surface_cell_geometry(const SphereMesh& mesh, int face, double s,
                                          double t, double ds, double dt) {
  Vec3 xs, xt;
  mesh.chart_tangents(face, s, t, &xs, &xt);
  SurfaceCellGeometry g;
  g.g11 = dot3(xs, xs);
  g.g12 = dot3(xs, xt);
  g.g22 = dot3(xt, xt);
  const double det = g.g11 * g.g22 - g.g12 * g.g12;
  g.area = std::sqrt(std::max(det, 0.0)) * ds * dt;
  return g;
}

}  // namespace

namespace {

SurfaceEnergy mesh_surface_energy_impl(const SphereMesh& mesh, const MeshField& u,
                                       double eps, const Potential* pot) {
  if (eps <= 0) throw InputDomainError("mesh_surface_energy: eps must be positive");
  const int m = u.m;
  const double d = 1.0 / m;
  std::vector<double> dir_terms, pot_terms;
  dir_terms.reserve(static_cast<std::size_t>(u.faces) * m * m);
  pot_terms.reserve(dir_terms.capacity());
  for (int face = 0; face < u.faces; ++face)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const auto g = surface_cell_geometry(mesh, face, (i + 0.5) * d, (j + 0.5) * d, d, d);
        const double* v00 = u.value(face, i, j);
        const double* v10 = u.value(face, i + 1, j);
        const double* v01 = u.value(face, i, j + 1);
        const double* v11 = u.value(face, i + 1, j + 1);
        double dir = 0.0;
        const double det = g.g11 * g.g22 - g.g12 * g.g12;
        for (int a = 0; a < u.k; ++a) {
          const double us = 0.5 * ((v10[a] - v00[a]) + (v11[a] - v01[a])) / d;
          const double ut = 0.5 * ((v01[a] - v00[a]) + (v11[a] - v10[a])) / d;
          // |grad_T u|^2 = (us, ut) g^{-1} (us, ut)^T
          dir += (g.g22 * us * us - 2.0 * g.g12 * us * ut + g.g11 * ut * ut) / det;
        }
        dir_terms.push_back(dir * g.area);
        if (pot) {
          const double fv = 0.25 * (pot->f_raw(v00) + pot->f_raw(v10) + pot->f_raw(v01) +
                                    pot->f_raw(v11));
          pot_terms.push_back(fv * g.area);
        }
      }
  SurfaceEnergy out;
  out.dirichlet = pairwise_sum(dir_terms);
  out.potential = pot ? pairwise_sum(pot_terms) : 0.0;
  out.total = out.dirichlet + out.potential / (eps * eps);
  return out;
}

}  // namespace

SurfaceEnergy mesh_surface_energy(const SphereMesh& mesh, const MeshField& u, double eps,
                                  const Potential& pot) {
  return mesh_surface_energy_impl(mesh, u, eps, &pot);
}

double mesh_surface_dirichlet(const SphereMesh& mesh, const MeshField& u) {
  return mesh_surface_energy_impl(mesh, u, 1.0, nullptr).dirichlet;
}

double mesh_surface_l2_difference(const SphereMesh& mesh, const MeshField& u,
                                  const MeshField& v) {
  if (u.m != v.m || u.k != v.k || u.faces != v.faces)
    throw InputDomainError("mesh_surface_l2_difference: incompatible mesh fields");
  const int m = u.m;
  const double d = 1.0 / m;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(u.faces) * m * m);
  for (int face = 0; face < u.faces; ++face)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const auto g = surface_cell_geometry(mesh, face, (i + 0.5) * d, (j + 0.5) * d, d, d);
        double acc = 0.0;
        for (int ci = 0; ci < 2; ++ci)
          for (int cj = 0; cj < 2; ++cj) {
            const double* a = u.value(face, i + ci, j + cj);
            const double* b = v.value(face, i + ci, j + cj);
            double n2 = 0.0;
            for (int c = 0; c < u.k; ++c) n2 += (a[c] - b[c]) * (a[c] - b[c]);
            acc += 0.25 * n2;
          }
        terms.push_back(acc * g.area);
      }
  return pairwise_sum(terms);
}

AnnulusEnergy annulus_energy(const SphereMesh& mesh, const AnnulusField& phi, double eps,
                             const Potential& pot) {
  if (eps <= 0) throw InputDomainError("annulus_energy: eps must be positive");
  const int m = phi.m, mr = phi.mr, k = phi.k;
  const double ds = 1.0 / m, dr = phi.lambda / mr;
  std::vector<double> dir_terms, pot_terms;
  dir_terms.reserve(static_cast<std::size_t>(phi.faces) * m * m * mr);
  pot_terms.reserve(dir_terms.capacity());
  for (int face = 0; face < phi.faces; ++face)
    for (int l = 0; l < mr; ++l)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          const double sc = (i + 0.5) * ds, tc = (j + 0.5) * ds;
          const double r = 1.0 - phi.lambda + (l + 0.5) * dr;
          Vec3 xs, xt;
          mesh.chart_tangents(face, sc, tc, &xs, &xt);
          const Vec3 xhat = mesh.chart(face, sc, tc);
          // Jacobian columns: r*xs, r*xt, xhat.
          double J[3][3];
          for (int a = 0; a < 3; ++a) {
            J[a][0] = r * xs[a];
            J[a][1] = r * xt[a];
            J[a][2] = xhat[a];
          }
          const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                             J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                             J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
          double inv[3][3];
          const double id = 1.0 / det;
          inv[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) * id;
          inv[0][1] = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) * id;
          inv[0][2] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) * id;
          inv[1][0] = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) * id;
          inv[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) * id;
          inv[1][2] = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) * id;
          inv[2][0] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) * id;
          inv[2][1] = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) * id;
          inv[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) * id;

          double dir = 0.0, fv = 0.0;
          for (int a = 0; a < k; ++a) {
            // corner-averaged parametric derivatives
            double dpa = 0, dpb = 0, dpc = 0;
            for (int cb = 0; cb < 2; ++cb)
              for (int cc = 0; cc < 2; ++cc) {
                dpa += phi.value(face, i + 1, j + cb, l + cc)[a] -
                       phi.value(face, i, j + cb, l + cc)[a];
                dpb += phi.value(face, i + cb, j + 1, l + cc)[a] -
                       phi.value(face, i + cb, j, l + cc)[a];
                dpc += phi.value(face, i + cb, j + cc, l + 1)[a] -
                       phi.value(face, i + cb, j + cc, l)[a];
              }
            dpa *= 0.25 / ds;
            dpb *= 0.25 / ds;
            dpc *= 0.25 / dr;
            // grad phi^a = J^{-T} (dpa, dpb, dpc)
            for (int r3 = 0; r3 < 3; ++r3) {
              const double gcomp = inv[0][r3] * dpa + inv[1][r3] * dpb + inv[2][r3] * dpc;
              dir += gcomp * gcomp;
            }
          }
          for (int cb = 0; cb < 2; ++cb)
            for (int cc = 0; cc < 2; ++cc)
              for (int cd = 0; cd < 2; ++cd)
                fv += 0.125 * pot.f_raw(phi.value(face, i + cb, j + cc, l + cd));
          const double vol = std::abs(det) * ds * ds * dr;
          dir_terms.push_back(dir * vol);
          pot_terms.push_back(fv * vol);
        }
  AnnulusEnergy out;
  out.dirichlet = pairwise_sum(dir_terms);
  out.potential = pairwise_sum(pot_terms);
  out.total = out.dirichlet + out.potential / (eps * eps);
  return out;
}

ModifyBoundaryResult modify_boundary(const SphereMesh& mesh, const MeshField& u, double eps,
                                     const Potential& pot, double delta1, int mr) {
  if (u.k != pot.dim()) throw InputDomainError("modify_boundary: dimension mismatch");
  if (eps <= 0 || eps > mesh.lambda())
    throw InputDomainError("modify_boundary: requires 0 < eps <= lambda");
  ModifyBoundaryResult res;
  res.sphere_energy = mesh_surface_energy(mesh, u, eps, pot);
  if (res.sphere_energy.total > delta1 * delta1)
    throw SmallnessViolationError("modify_boundary: E_eps(u; dB_1) exceeds delta1^2");

  const int m = u.m;
  // Harmonic extension of the edge trace on each face chart (flat 5-point
  // Laplace, SOR), then pointwise projection onto N.
  MeshField ubar = u;
  const double omega = 2.0 / (1.0 + std::sin(M_PI / m));
  for (int face = 0; face < u.faces; ++face) {
    for (int sweep = 0; sweep < 4000; ++sweep) {
      double max_upd = 0.0;
      for (int j = 1; j < m; ++j)
        for (int i = 1; i < m; ++i) {
          double* c = ubar.value(face, i, j);
          const double* e = ubar.value(face, i + 1, j);
          const double* w = ubar.value(face, i - 1, j);
          const double* n = ubar.value(face, i, j + 1);
          const double* s = ubar.value(face, i, j - 1);
          for (int a = 0; a < u.k; ++a) {
            const double target = 0.25 * (e[a] + w[a] + n[a] + s[a]);
            const double upd = omega * (target - c[a]);
            c[a] += upd;
            max_upd = std::max(max_upd, std::abs(upd));
          }
        }
      if (max_upd < 1e-13) break;
    }
  }

  res.w = ubar;
  for (int face = 0; face < u.faces; ++face)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        TargetPoint z(u.k);
        const double* src = ubar.value(face, i, j);
        for (int a = 0; a < u.k; ++a) z[a] = src[a];
        TargetPoint p(u.k);
        try {
          p = project_to_N(z, pot);
        } catch (const ProjectionUndefinedError&) {
          char buf[96];
          std::snprintf(buf, sizeof(buf),
                        "modify_boundary: projection undefined on face %d", face);
          throw SmallnessViolationError(buf);
        }
        double* dst = res.w.value(face, i, j);
        for (int a = 0; a < u.k; ++a) dst[a] = p[a];
      }

  // Lateral profile: linear interpolation u -> w along the radius.
  const MeshField& w = res.w;
  auto profile = [&](int face, int side, double xi, double rho) {
    const TargetPoint uu = side_lerp(u, face, side, xi);
    TargetPoint ww(u.k);
    try {
      ww = project_to_N(uu, pot);
    } catch (const ProjectionUndefinedError&) {
      char buf[96];
      std::snprintf(buf, sizeof(buf),
                    "modify_boundary: projection undefined on face %d side %d", face, side);
      throw SmallnessViolationError(buf);
    }
    TargetPoint out(u.k);
    for (int a = 0; a < u.k; ++a) out[a] = rho * uu[a] + (1.0 - rho) * ww[a];
    return out;
  };
  res.phi = build_annulus(mesh, u, w, pot, profile, mr);
  res.annulus = annulus_energy(mesh, res.phi, eps, pot);
  res.grad_w_sq = mesh_surface_dirichlet(mesh, w);
  const double es = res.sphere_energy.total;
  res.c_phi = es > 0 ? res.annulus.total / (mesh.lambda() * es) : 0.0;
  res.c_w = es > 0 ? res.grad_w_sq / es : 0.0;
  return res;
}

LuckhausResult luckhaus_interpolant(const SphereMesh& mesh, const MeshField& u,
                                    const MeshField& v_star, double eps,
                                    const Potential& pot, double eta, int mr) {
  if (u.k != pot.dim() || v_star.k != u.k || v_star.m != u.m)
    throw InputDomainError("luckhaus_interpolant: incompatible inputs");
  LuckhausResult res;
  res.grad_u_sq = mesh_surface_dirichlet(mesh, u);
  res.grad_v_sq = mesh_surface_dirichlet(mesh, v_star);
  res.l2_diff = mesh_surface_l2_difference(mesh, u, v_star);
  res.f_u_int = mesh_surface_energy(mesh, u, 1.0, pot).potential;

  // v_star must be N-valued.
  for (int face = 0; face < v_star.faces; ++face)
    for (int j = 0; j <= v_star.m; ++j)
      for (int i = 0; i <= v_star.m; ++i) {
        TargetPoint z(u.k);
        const double* src = v_star.value(face, i, j);
        for (int a = 0; a < u.k; ++a) z[a] = src[a];
        if (dist_to_N(z, pot) > 1e-8 * (1.0 + pot.s_star()))
          throw InputDomainError("luckhaus_interpolant: v_star is not N-valued");
      }

  const double lam = mesh.lambda();
  if (res.grad_u_sq + res.grad_v_sq > 1.0 + 1e-12)
    throw SmallnessViolationError(
        "luckhaus_interpolant: Dirichlet energies exceed the unit normalization");
  if (res.l2_diff > eta * eta * lam * lam)
    throw SmallnessViolationError(
        "luckhaus_interpolant: int |u - v_star|^2 exceeds eta^2 lambda^2");

  auto profile = [&](int face, int side, double xi, double rho) {
    const TargetPoint uu = side_lerp(u, face, side, xi);
    TargetPoint pu(u.k);
    try {
      pu = project_to_N(uu, pot);
    } catch (const ProjectionUndefinedError&) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "luckhaus_interpolant: projection undefined on face %d side %d xi %.4f",
                    face, side, xi);
      throw ConstructionError(buf);
    }
    if (rho >= 0.5) {
      const double s = 2.0 * (1.0 - rho);  // 0 at outer sphere, 1 at half layer
      TargetPoint out(u.k);
      for (int a = 0; a < u.k; ++a) out[a] = uu[a] + s * (pu[a] - uu[a]);
      return out;
    }
    const TargetPoint vv = project_to_N(side_lerp(v_star, face, side, xi), pot);
    const double t = 1.0 - 2.0 * rho;  // 0 at half layer, 1 at inner sphere
    try {
      return geodesic(t, pu, vv, pot);
    } catch (const NonuniqueGeodesicError&) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "luckhaus_interpolant: geodesic not unique on face %d side %d xi %.4f",
                    face, side, xi);
      throw ConstructionError(buf);
    }
  };
  res.phi = build_annulus(mesh, u, v_star, pot, profile, mr);
  res.annulus = annulus_energy(mesh, res.phi, eps, pot);
  const double rhs = lam * (res.grad_u_sq + res.grad_v_sq + res.l2_diff / (lam * lam));
  res.c_grad = rhs > 0 ? res.annulus.dirichlet / rhs : 0.0;
  res.c_f = res.f_u_int > 1e-300 ? res.annulus.potential / (lam * res.f_u_int) : 0.0;
  return res;
}

}  // namespace epsflow

namespace epsflow {

namespace {

template <class T>
void put_bin(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get_bin(std::ifstream& is, T* v) {
  is.read(reinterpret_cast<char*>(v), sizeof(T));
  if (!is) throw Error("mesh snapshot: truncated file");
}

void write_doubles(std::ofstream& os, const std::vector<double>& v) {
  put_bin(os, static_cast<std::uint64_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& is) {
  std::uint64_t n = 0;
  get_bin(is, &n);
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw Error("mesh snapshot: truncated data");
  return v;
}

}  // namespace

void write_mesh_field(const MeshField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("mesh snapshot: cannot open " + path);
  os.write("EPSMESHF", 8);
  put_bin(os, static_cast<std::int32_t>(1));
  put_bin(os, static_cast<std::int32_t>(f.m));
  put_bin(os, static_cast<std::int32_t>(f.k));
  put_bin(os, static_cast<std::int32_t>(f.faces));
  write_doubles(os, f.values);
  write_doubles(os, f.positions);
  if (!os) throw Error("mesh snapshot: write failed");
}

MeshField read_mesh_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("mesh snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "EPSMESHF")
    throw Error("mesh snapshot: bad magic");
  std::int32_t version, m, k, faces;
  get_bin(is, &version);
  get_bin(is, &m);
  get_bin(is, &k);
  get_bin(is, &faces);
  MeshField f;
  f.m = m;
  f.k = k;
  f.faces = faces;
  f.values = read_doubles(is);
  f.positions = read_doubles(is);
  return f;
}

void write_annulus_field(const AnnulusField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("annulus snapshot: cannot open " + path);
  os.write("EPSANNUL", 8);
  put_bin(os, static_cast<std::int32_t>(1));
  put_bin(os, static_cast<std::int32_t>(f.m));
  put_bin(os, static_cast<std::int32_t>(f.mr));
  put_bin(os, static_cast<std::int32_t>(f.k));
  put_bin(os, static_cast<std::int32_t>(f.faces));
  put_bin(os, f.lambda);
  write_doubles(os, f.values);
  if (!os) throw Error("annulus snapshot: write failed");
}

AnnulusField read_annulus_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("annulus snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "EPSANNUL")
    throw Error("annulus snapshot: bad magic");
  std::int32_t version, m, mr, k, faces;
  get_bin(is, &version);
  get_bin(is, &m);
  get_bin(is, &mr);
  get_bin(is, &k);
  get_bin(is, &faces);
  AnnulusField f;
  f.m = m;
  f.mr = mr;
  f.k = k;
  f.faces = faces;
  get_bin(is, &f.lambda);
  f.values = read_doubles(is);
  return f;
}

}  // namespace epsflow
