#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "epsflow/errors.hpp"

namespace epsflow {

using Vec3 = std::array<double, 3>;

double dot3(const Vec3& a, const Vec3& b);
double norm3(const Vec3& a);
Vec3 normalized3(const Vec3& a);

// Point in the order-parameter space R^k. k = 5 for Landau-de Gennes
// coordinates on an orthonormal basis of the symmetric traceless 3x3
// matrices, k = 3 for the sphere-valued Ginzburg-Landau model.
class TargetPoint {
 public:
  TargetPoint() = default;
  explicit TargetPoint(int dim) : dim_(dim) { c_.fill(0.0); }
  TargetPoint(std::initializer_list<double> vals);

  static TargetPoint zero(int dim) { return TargetPoint(dim); }

  int dim() const { return dim_; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const double* data() const { return c_.data(); }
  double* data() { return c_.data(); }

  double dot(const TargetPoint& o) const;
  double norm() const;

  TargetPoint& operator+=(const TargetPoint& o);
  TargetPoint& operator-=(const TargetPoint& o);
  TargetPoint& operator*=(double s);
  friend TargetPoint operator+(TargetPoint a, const TargetPoint& b) { return a += b; }
  friend TargetPoint operator-(TargetPoint a, const TargetPoint& b) { return a -= b; }
  friend TargetPoint operator*(double s, TargetPoint a) { return a *= s; }

 private:
  std::array<double, 5> c_{};
  int dim_ = 0;
};

// Fixed orthonormal basis of the symmetric traceless 3x3 matrices under the
// Frobenius inner product, so that the R^5 Euclidean norm of coordinates
// equals the Frobenius norm of the reconstructed matrix.
void coords_to_matrix(const double* q, double M[3][3]);
void matrix_to_coords(const double M[3][3], double* q);
TargetPoint matrix_to_coords(const double M[3][3]);

// Coordinates of s (n (x) n - I/3) for a unit director n.
TargetPoint q_from_director(const Vec3& n, double s);

// Positive minimizer of the uniaxial bulk profile
//   s -> (2 a^2/3) s^2 - (2 b^2/9) s^3 + (4 c^2/9) s^4.
double s_star(double a2, double b2, double c2);

// Value of the uniaxial profile at s (unnormalized bulk density on the ray).
double uniaxial_profile(double s, double a2, double b2, double c2);

enum class PotentialKind { LdG, GinzburgLandau };

// Bulk potential f >= 0 with N = {f = 0}. The Landau-de Gennes density is
// shifted by a constant so its minimum over the uniaxial ray is zero.
class Potential {
 public:
  static Potential ldg(double a2, double b2, double c2);
  static Potential ginzburg_landau();

  PotentialKind kind() const { return kind_; }
  int dim() const { return kind_ == PotentialKind::LdG ? 5 : 3; }
  double s_star() const { return s_star_; }
  double normalization() const { return normalization_; }
  double a2() const { return a2_; }
  double b2() const { return b2_; }
  double c2() const { return c2_; }

  double f(const TargetPoint& z) const { return f_raw(z.data()); }
  TargetPoint grad_f(const TargetPoint& z) const;

  // Raw-pointer kernels for node loops; z and out have dim() entries.
  double f_raw(const double* z) const;
  void grad_f_raw(const double* z, double* out) const;

 private:
  Potential() = default;
  PotentialKind kind_ = PotentialKind::GinzburgLandau;
  double a2_ = 0, b2_ = 0, c2_ = 0;
  double s_star_ = 1.0;
  double normalization_ = 0.0;
};

// Growth exponents of assumption (A3b): p > 3/2 and
// a in [1/2, min(4/5, 4/3 - 1/p)]; A = 4/3 - 1/p.
struct GrowthParams {
  GrowthParams(double p, double a_exp);
  double p;
  double a_exp;
  double A_exp() const { return 4.0 / 3.0 - 1.0 / p; }
};

TargetPoint project_to_N(const TargetPoint& z, const Potential& pot);
double dist_to_N(const TargetPoint& z, const Potential& pot);

// Defect indicator beta = 1 - 6 tr(Q^3)^2 / |Q|^6 in [0,1]; 0 on uniaxial Q.
double biaxiality(const TargetPoint& q);

// Constant-speed geodesic on N from z1 to z2 evaluated at t in [0,1].
TargetPoint geodesic(double t, const TargetPoint& z1, const TargetPoint& z2,
                     const Potential& pot);

struct GrowthShellRow {
  double radius;
  double max_ratio_power;   // max |grad f| / |z|^{6/p} on the shell
  double max_ratio_falpha;  // max |grad f| / f^a on the shell
};

struct GrowthReport {
  std::vector<GrowthShellRow> rows;
  bool pass = false;
  std::string note;
};

// Samples shells |z| = R and reports the (A3b) growth ratios; passes when
// both ratios are non-increasing (2% slack) across shells beyond 2 s_star.
GrowthReport check_A2_A3b(const Potential& pot, const GrowthParams& gp,
                          const std::vector<double>& sample_radii,
                          int samples_per_shell = 1200);

// Deterministic quasi-uniform unit directors (Fibonacci spiral).
std::vector<Vec3> fibonacci_directors(int count);

// Deterministic samples on the unit sphere of R^k (k = 3 or 5).
std::vector<TargetPoint> unit_shell_samples(int k, int count, std::uint64_t seed);

// Conjugation Q -> R Q R^T expressed on coordinates (k = 5 only).
TargetPoint conjugate_coords(const TargetPoint& q, const double R[3][3]);

}  // namespace epsflow
