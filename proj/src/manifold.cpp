#include "epsflow/manifold.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

namespace epsflow {

namespace {

constexpr double kSqrt6 = 2.449489742783178;
constexpr double kSqrt2 = 1.4142135623730951;

// Orthonormal basis of S0: B0 = diag(-1,-1,2)/sqrt6, B1 = diag(1,-1,0)/sqrt2,
// B2..B4 = off-diagonal pair matrices / sqrt2.
struct Basis {
  double B[5][3][3] = {};
  Basis() {
    B[0][0][0] = -1.0 / kSqrt6;
    B[0][1][1] = -1.0 / kSqrt6;
    B[0][2][2] = 2.0 / kSqrt6;
    B[1][0][0] = 1.0 / kSqrt2;
    B[1][1][1] = -1.0 / kSqrt2;
    B[2][0][1] = B[2][1][0] = 1.0 / kSqrt2;
    B[3][0][2] = B[3][2][0] = 1.0 / kSqrt2;
    B[4][1][2] = B[4][2][1] = 1.0 / kSqrt2;
  }
};

const Basis& basis() {
  static const Basis b;
  return b;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 120; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Bisection on the sign of a Richardson-extrapolated central difference of f;
// resolves the minimizer of a smooth 1-D profile to ~1e-12 relative.
double refine_min_by_slope(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (lo + hi);
    const double d = 1e-4 * std::max(1.0, m);
    const double d1 = (f(m + d) - f(m - d)) / (2.0 * d);
    const double d2 = (f(m + 2.0 * d) - f(m - 2.0 * d)) / (4.0 * d);
    const double slope = (4.0 * d1 - d2) / 3.0;
    if (slope > 0.0)
      hi = m;
    else
      lo = m;
  }
  return 0.5 * (lo + hi);
}

Eigen::Matrix3d reconstruct(const double* q) {
  double M[3][3];
  coords_to_matrix(q, M);
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = M[i][j];
  return out;
}

Vec3 leading_eigvec(const Eigen::Matrix3d& M, double* gap) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  const auto& ev = es.eigenvalues();
  *gap = ev(2) - ev(1);
  const auto v = es.eigenvectors().col(2);
  return Vec3{v(0), v(1), v(2)};
}

Vec3 slerp_director(const Vec3& n1, const Vec3& n2, double t) {
  double c = std::clamp(dot3(n1, n2), -1.0, 1.0);
  const double omega = std::acos(c);
  if (omega < 1e-9) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = (1.0 - t) * n1[i] + t * n2[i];
    return normalized3(r);
  }
  const double s = std::sin(omega);
  const double w1 = std::sin((1.0 - t) * omega) / s;
  const double w2 = std::sin(t * omega) / s;
  Vec3 r{};
  for (int i = 0; i < 3; ++i) r[i] = w1 * n1[i] + w2 * n2[i];
  return r;
}

}  // namespace

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

Vec3 normalized3(const Vec3& a) {
  const double n = norm3(a);
  return Vec3{a[0] / n, a[1] / n, a[2] / n};
}

TargetPoint::TargetPoint(std::initializer_list<double> vals) {
  dim_ = static_cast<int>(vals.size());
  int i = 0;
  for (double v : vals) c_[static_cast<std::size_t>(i++)] = v;
}

double TargetPoint::dot(const TargetPoint& o) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[static_cast<std::size_t>(i)] * o[i];
  return s;
}

double TargetPoint::norm() const { return std::sqrt(dot(*this)); }

TargetPoint& TargetPoint::operator+=(const TargetPoint& o) {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] += o[i];
  return *this;
}

TargetPoint& TargetPoint::operator-=(const TargetPoint& o) {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] -= o[i];
  return *this;
}

TargetPoint& TargetPoint::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] *= s;
  return *this;
}

void coords_to_matrix(const double* q, double M[3][3]) {
  const auto& B = basis().B;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int a = 0; a < 5; ++a) v += q[a] * B[a][i][j];
      M[i][j] = v;
    }
}

void matrix_to_coords(const double M[3][3], double* q) {
  const auto& B = basis().B;
  for (int a = 0; a < 5; ++a) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v += M[i][j] * B[a][i][j];
    q[a] = v;
  }
}

TargetPoint matrix_to_coords(const double M[3][3]) {
  TargetPoint q(5);
  matrix_to_coords(M, q.data());
  return q;
}

TargetPoint q_from_director(const Vec3& n, double s) {
  if (std::abs(norm3(n) - 1.0) > 1e-10)
    throw InputDomainError("q_from_director: director is not a unit vector");
  double M[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M[i][j] = s * (n[i] * n[j] - (i == j ? 1.0 / 3.0 : 0.0));
  return matrix_to_coords(M);
}

double uniaxial_profile(double s, double a2, double b2, double c2) {
  return (2.0 * a2 / 3.0) * s * s - (2.0 * b2 / 9.0) * s * s * s +
         (4.0 * c2 / 9.0) * s * s * s * s;
}

double s_star(double a2, double b2, double c2) {
  if (a2 <= 0 || b2 <= 0 || c2 <= 0)
    throw InputDomainError("s_star: a^2, b^2, c^2 must be positive");
  const double disc = 9.0 * b2 * b2 - 192.0 * a2 * c2;
  if (disc <= 0.0)
    throw DegenerateManifoldError("s_star: 9 b^4 <= 192 a^2 c^2, no uniaxial minimizer");
  return (3.0 * b2 + std::sqrt(disc)) / (16.0 * c2);
}

Potential Potential::ldg(double a2, double b2, double c2) {
  Potential p;
  p.kind_ = PotentialKind::LdG;
  p.a2_ = a2;
  p.b2_ = b2;
  p.c2_ = c2;
  p.s_star_ = epsflow::s_star(a2, b2, c2);
  const double fmin = uniaxial_profile(p.s_star_, a2, b2, c2);
  if (fmin >= 0.0)
    throw DegenerateManifoldError(
        "Potential::ldg: uniaxial minimum is not below the isotropic value; "
        "the zero set of the normalized density would not equal N");
  p.normalization_ = -fmin;

  // Cross-check the closed form against a 1-D search at construction.
  auto prof = [&](double s) { return uniaxial_profile(s, a2, b2, c2); };
  const double bracket = golden_section_min(prof, 1e-9, 10.0 * p.s_star_ + 10.0);
  const double oracle = refine_min_by_slope(prof, bracket - 1e-3, bracket + 1e-3);
  if (std::abs(oracle - p.s_star_) > 1e-8 * (1.0 + p.s_star_))
    throw DegenerateManifoldError("Potential::ldg: s_star closed form disagrees with 1-D search");
  return p;
}

Potential Potential::ginzburg_landau() {
  Potential p;
  p.kind_ = PotentialKind::GinzburgLandau;
  p.s_star_ = 1.0;
  p.normalization_ = 0.0;
  return p;
}

double Potential::f_raw(const double* z) const {
  if (kind_ == PotentialKind::GinzburgLandau) {
    const double n2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    const double d = 1.0 - n2;
    return d * d;
  }
  double n2 = 0.0;
  for (int i = 0; i < 5; ++i) n2 += z[i] * z[i];
  double M[3][3];
  coords_to_matrix(z, M);
  double tr3 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) tr3 += M[i][j] * M[j][k] * M[k][i];
  return a2_ * n2 - b2_ * tr3 + c2_ * n2 * n2 + normalization_;
}

void Potential::grad_f_raw(const double* z, double* out) const {
  if (kind_ == PotentialKind::GinzburgLandau) {
    const double n2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    const double c = -4.0 * (1.0 - n2);
    for (int i = 0; i < 3; ++i) out[i] = c * z[i];
    return;
  }
  double n2 = 0.0;
  for (int i = 0; i < 5; ++i) n2 += z[i] * z[i];
  double M[3][3];
  coords_to_matrix(z, M);
  double M2[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += M[i][k] * M[k][j];
      M2[i][j] = v;
    }
  // 2 a^2 Q - 3 b^2 (Q^2 - |Q|^2 I / 3) + 4 c^2 |Q|^2 Q, in coordinates.
  double G[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      G[i][j] = 2.0 * a2_ * M[i][j] - 3.0 * b2_ * (M2[i][j] - (i == j ? n2 / 3.0 : 0.0)) +
                4.0 * c2_ * n2 * M[i][j];
  matrix_to_coords(G, out);
}

TargetPoint Potential::grad_f(const TargetPoint& z) const {
  TargetPoint g(dim());
  grad_f_raw(z.data(), g.data());
  return g;
}

GrowthParams::GrowthParams(double p_in, double a_in) : p(p_in), a_exp(a_in) {
  if (!(p > 1.5)) throw InputDomainError("GrowthParams: p must exceed 3/2");
  const double upper = std::min(0.8, 4.0 / 3.0 - 1.0 / p);
  if (!(a_exp >= 0.5 && a_exp <= upper + 1e-12))
    throw InputDomainError("GrowthParams: a must lie in [1/2, min(4/5, 4/3 - 1/p)]");
}

TargetPoint project_to_N(const TargetPoint& z, const Potential& pot) {
  if (pot.kind() == PotentialKind::GinzburgLandau) {
    const double n = z.norm();
    if (n <= 1e-9)
      throw ProjectionUndefinedError("project_to_N: zero vector has no nearest sphere point");
    TargetPoint out = z;
    out *= 1.0 / n;
    return out;
  }
  double gap = 0.0;
  const Vec3 n = leading_eigvec(reconstruct(z.data()), &gap);
  if (gap < 1e-9)
    throw ProjectionUndefinedError("project_to_N: leading eigenvalue is not simple");
  return q_from_director(n, pot.s_star());
}

double dist_to_N(const TargetPoint& z, const Potential& pot) {
  try {
    return (z - project_to_N(z, pot)).norm();
  } catch (const ProjectionUndefinedError&) {
    if (pot.kind() == PotentialKind::GinzburgLandau) return std::abs(z.norm() - 1.0);
    // Degenerate leading eigenvalue: brute-force over a director grid.
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& n : fibonacci_directors(10000))
      best = std::min(best, (z - q_from_director(n, pot.s_star())).norm());
    return best;
  }
}

double biaxiality(const TargetPoint& q) {
  if (q.dim() != 5) throw InputDomainError("biaxiality: expects k = 5 coordinates");
  const double n = q.norm();
  if (n <= 1e-12) throw InputDomainError("biaxiality: |Q| too small");
  double M[3][3];
  coords_to_matrix(q.data(), M);
  double tr3 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) tr3 += M[i][j] * M[j][k] * M[k][i];
  const double b = 1.0 - 6.0 * tr3 * tr3 / (n * n * n * n * n * n);
  return std::clamp(b, 0.0, 1.0);
}

TargetPoint geodesic(double t, const TargetPoint& z1, const TargetPoint& z2,
                     const Potential& pot) {
  const double tol = 1e-8 * (1.0 + pot.s_star());
  if (dist_to_N(z1, pot) > tol || dist_to_N(z2, pot) > tol)
    throw InputDomainError("geodesic: endpoints must lie on N");
  if (pot.kind() == PotentialKind::GinzburgLandau) {
    const double c = std::clamp(z1.dot(z2) / (z1.norm() * z2.norm()), -1.0, 1.0);
    if (c < -1.0 + 1e-12)
      throw NonuniqueGeodesicError("geodesic: antipodal sphere points");
    Vec3 a{z1[0], z1[1], z1[2]}, b{z2[0], z2[1], z2[2]};
    const Vec3 r = slerp_director(normalized3(a), normalized3(b), t);
    TargetPoint out(3);
    for (int i = 0; i < 3; ++i) out[i] = r[i];
    return out;
  }
  double gap = 0.0;
  Vec3 n1 = leading_eigvec(reconstruct(z1.data()), &gap);
  Vec3 n2 = leading_eigvec(reconstruct(z2.data()), &gap);
  if (dot3(n1, n2) < 0.0)
    for (int i = 0; i < 3; ++i) n2[i] = -n2[i];
  if (std::abs(dot3(n1, n2)) < 1e-9)
    throw NonuniqueGeodesicError("geodesic: directors at 90 degrees, geodesic not unique");
  return q_from_director(slerp_director(n1, n2, t), pot.s_star());
}

GrowthReport check_A2_A3b(const Potential& pot, const GrowthParams& gp,
                          const std::vector<double>& sample_radii, int samples_per_shell) {
  const double s = pot.s_star();
  if (sample_radii.size() < 3)
    throw InputDomainError("check_A2_A3b: need at least three sample radii");
  for (std::size_t i = 1; i < sample_radii.size(); ++i)
    if (sample_radii[i] <= sample_radii[i - 1])
      throw InputDomainError("check_A2_A3b: radii must be strictly increasing");
  if (sample_radii.back() < 2.0 * s)
    throw InputDomainError("check_A2_A3b: radii must reach beyond 2 s_star");

  const int k = pot.dim();
  const auto dirs = unit_shell_samples(k, samples_per_shell, 0x5eedu);
  GrowthReport rep;
  for (double R : sample_radii) {
    GrowthShellRow row{R, 0.0, 0.0};
    TargetPoint z(k), g(k);
    for (const auto& d : dirs) {
      for (int i = 0; i < k; ++i) z[i] = R * d[i];
      pot.grad_f_raw(z.data(), g.data());
      const double gn = g.norm();
      row.max_ratio_power = std::max(row.max_ratio_power, gn / std::pow(R, 6.0 / gp.p));
      const double fv = pot.f_raw(z.data());
      if (fv > 0.0)
        row.max_ratio_falpha = std::max(row.max_ratio_falpha, gn / std::pow(fv, gp.a_exp));
    }
    rep.rows.push_back(row);
  }
  // Boundedness: a bounded ratio chain flattens out, so the tail log-log
  // slope against the radius must vanish; an unbounded power keeps a
  // positive slope.
  std::vector<const GrowthShellRow*> tail;
  for (const auto& row : rep.rows)
    if (row.radius >= 2.0 * s) tail.push_back(&row);
  if (tail.size() < 3)
    throw InputDomainError("check_A2_A3b: need at least three shells beyond 2 s_star");
  const auto& a = *tail[tail.size() - 3];
  const auto& b = *tail[tail.size() - 1];
  const double dlr = std::log(b.radius / a.radius);
  const double slope_power = std::log(b.max_ratio_power / a.max_ratio_power) / dlr;
  const double slope_falpha = std::log(b.max_ratio_falpha / a.max_ratio_falpha) / dlr;
  rep.pass = slope_power <= 0.02 && slope_falpha <= 0.02;
  if (!rep.pass) {
    char note[128];
    std::snprintf(note, sizeof(note),
                  "growth ratio keeps increasing: tail slopes %.4g (power), %.4g (f^a)",
                  slope_power, slope_falpha);
    rep.note = note;
  }
  return rep;
}

std::vector<Vec3> fibonacci_directors(int count) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = ga * i;
    out.push_back(Vec3{r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

std::vector<TargetPoint> unit_shell_samples(int k, int count, std::uint64_t seed) {
  std::vector<TargetPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  if (k == 3) {
    for (const Vec3& n : fibonacci_directors(count)) {
      TargetPoint p(3);
      for (int i = 0; i < 3; ++i) p[i] = n[i];
      out.push_back(p);
    }
    return out;
  }
  // Gaussian directions via Box-Muller on the raw engine stream, which keeps
  // the sequence identical across standard library implementations.
  std::mt19937_64 eng(seed);
  auto uniform = [&]() {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
  };
  while (static_cast<int>(out.size()) < count) {
    TargetPoint p(k);
    double n2 = 0.0;
    for (int i = 0; i < k; i += 2) {
      const double u1 = uniform(), u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      p[i] = r * std::cos(2.0 * M_PI * u2);
      if (i + 1 < k) p[i + 1] = r * std::sin(2.0 * M_PI * u2);
    }
    for (int i = 0; i < k; ++i) n2 += p[i] * p[i];
    if (n2 < 1e-12) continue;
    p *= 1.0 / std::sqrt(n2);
    out.push_back(p);
  }
  return out;
}

TargetPoint conjugate_coords(const TargetPoint& q, const double R[3][3]) {
  if (q.dim() != 5) throw InputDomainError("conjugate_coords: expects k = 5");
  double M[3][3], RM[3][3], RMRt[3][3];
  coords_to_matrix(q.data(), M);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += R[i][k] * M[k][j];
      RM[i][j] = v;
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += RM[i][k] * R[j][k];
      RMRt[i][j] = v;
    }
  return matrix_to_coords(RMRt);
}

}  // namespace epsflow
