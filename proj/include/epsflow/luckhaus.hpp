#pragma once

#include <functional>
#include <string>
#include <vector>

#include "epsflow/manifold.hpp"

namespace epsflow {

// Equal-angle cube-sphere cell complex at dyadic scale lambda = 2^{-nu}.
// Each face is a spherical quad with a bilipschitz chart from [0,1]^2; cell
// areas stay within a fixed factor of lambda^2 across levels.
class SphereMesh {
 public:
  explicit SphereMesh(int nu);

  int nu() const { return nu_; }
  double lambda() const { return lambda_; }
  int cells_per_edge() const { return n_; }
  int faces() const { return 6 * n_ * n_; }
  int vertices() const { return num_vertices_; }
  int edges() const { return num_edges_; }
  int euler_characteristic() const { return vertices() - edges() + faces(); }

  // face id = (cube_face * n + cj) * n + ci.
  void face_decode(int face, int* cube_face, int* ci, int* cj) const;

  Vec3 chart(int face, double s, double t) const;
  void chart_tangents(int face, double s, double t, Vec3* xs, Vec3* xt) const;
  double face_area(int face, int subdiv = 16) const;

 private:
  int nu_;
  int n_;  // 2^nu cells per cube-face axis
  double lambda_;
  int num_vertices_ = 0;
  int num_edges_ = 0;
};

SphereMesh build_sphere_mesh(int nu);

// Samples of a map on the mesh: one (m+1)x(m+1) chart grid per face, with
// shared boundary samples canonicalized so traces agree bit for bit.
struct MeshField {
  int m = 0;
  int k = 0;
  int faces = 0;
  std::vector<double> values;     // faces*(m+1)^2*k
  std::vector<double> positions;  // faces*(m+1)^2*3

  std::size_t node(int face, int i, int j) const {
    return (static_cast<std::size_t>(face) * (m + 1) + j) * (m + 1) + i;
  }
  const double* value(int face, int i, int j) const {
    return values.data() + node(face, i, j) * static_cast<std::size_t>(k);
  }
  double* value(int face, int i, int j) {
    return values.data() + node(face, i, j) * static_cast<std::size_t>(k);
  }
  const double* position(int face, int i, int j) const {
    return positions.data() + node(face, i, j) * 3;
  }
};

MeshField sample_mesh_field(const SphereMesh& mesh, int m, int k,
                            const std::function<TargetPoint(const Vec3&)>& fn);

// Radially layered samples on B_1 \ B_{1-lambda} over the mesh prisms.
// Layer 0 is the inner sphere r = 1-lambda, layer mr the outer r = 1.
struct AnnulusField {
  int m = 0, mr = 0, k = 0, faces = 0;
  double lambda = 0;
  std::vector<double> values;  // faces*(mr+1)*(m+1)^2*k

  std::size_t node(int face, int i, int j, int l) const {
    return ((static_cast<std::size_t>(face) * (mr + 1) + l) * (m + 1) + j) * (m + 1) + i;
  }
  const double* value(int face, int i, int j, int l) const {
    return values.data() + node(face, i, j, l) * static_cast<std::size_t>(k);
  }
  double* value(int face, int i, int j, int l) {
    return values.data() + node(face, i, j, l) * static_cast<std::size_t>(k);
  }
};

struct SurfaceEnergy {
  double dirichlet = 0;  // int |grad_T u|^2
  double potential = 0;  // int f(u)
  double total = 0;      // dirichlet + potential / eps^2
};

SurfaceEnergy mesh_surface_energy(const SphereMesh& mesh, const MeshField& u, double eps,
                                  const Potential& pot);
double mesh_surface_dirichlet(const SphereMesh& mesh, const MeshField& u);
double mesh_surface_l2_difference(const SphereMesh& mesh, const MeshField& u,
                                  const MeshField& v);

struct AnnulusEnergy {
  double dirichlet = 0;  // int |grad phi|^2 over the annulus
  double potential = 0;  // int f(phi)
  double total = 0;
};

AnnulusEnergy annulus_energy(const SphereMesh& mesh, const AnnulusField& phi, double eps,
                             const Potential& pot);

struct ModifyBoundaryResult {
  MeshField w;
  AnnulusField phi;
  SurfaceEnergy sphere_energy;  // E_eps(u; dB_1)
  double grad_w_sq = 0;         // int_{dB_1} |grad w|^2
  AnnulusEnergy annulus;        // E_eps(phi; B_1 \ B_{1-lambda})
  double c_phi = 0;             // annulus.total / (lambda * sphere_energy.total)
  double c_w = 0;               // grad_w_sq / sphere_energy.total
};

// Appendix-A construction: per-face harmonic extension of the edge traces,
// projection onto N, radial interpolation over edge prisms and 0-homogeneous
// extension over face prisms.
ModifyBoundaryResult modify_boundary(const SphereMesh& mesh, const MeshField& u, double eps,
                                     const Potential& pot, double delta1, int mr = 8);

struct LuckhausResult {
  AnnulusField phi;
  double grad_u_sq = 0;
  double grad_v_sq = 0;
  double l2_diff = 0;   // int |u - v_star|^2 over the sphere
  double f_u_int = 0;   // int f(u) over the sphere
  AnnulusEnergy annulus;
  double c_grad = 0;  // grad part over lambda*(grad_u + grad_v + l2_diff/lambda^2)
  double c_f = 0;     // potential part over lambda * f_u_int
};

// Appendix-B interpolant: linear u -> pi_N(u) on the outer half layer, then
// the constant-speed geodesic pi_N(u) -> v_star on the inner half layer.
LuckhausResult luckhaus_interpolant(const SphereMesh& mesh, const MeshField& u,
                                    const MeshField& v_star, double eps,
                                    const Potential& pot, double eta, int mr = 8);

// Binary snapshots of mesh-sampled and annulus fields (magic, dims, values).
void write_mesh_field(const MeshField& f, const std::string& path);
MeshField read_mesh_field(const std::string& path);
void write_annulus_field(const AnnulusField& f, const std::string& path);
AnnulusField read_annulus_field(const std::string& path);

}  // namespace epsflow
