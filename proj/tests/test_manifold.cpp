#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "epsflow/manifold.hpp"

using namespace epsflow;

namespace {

// Independent 1-D oracle: golden-section bracketing plus bisection on the
// sign of a Richardson-extrapolated central difference of the profile.
double s_star_oracle(double a2, double b2, double c2) {
  auto f = [&](double s) { return uniaxial_profile(s, a2, b2, c2); };
  const double g = 0.6180339887498949;
  double a = 1e-9, b = 100.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 100; ++it) {
    if (f(c) < f(d)) {
      b = d;
      d = c;
      c = b - g * (b - a);
    } else {
      a = c;
      c = d;
      d = a + g * (b - a);
    }
  }
  double lo = std::max(a - 1e-4, 1e-9), hi = b + 1e-4;
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (lo + hi);
    const double dl = 1e-4 * std::max(1.0, m);
    const double d1 = (f(m + dl) - f(m - dl)) / (2 * dl);
    const double d2 = (f(m + 2 * dl) - f(m - 2 * dl)) / (4 * dl);
    if ((4 * d1 - d2) / 3 > 0)
      hi = m;
    else
      lo = m;
  }
  return 0.5 * (lo + hi);
}

TargetPoint random_point(std::mt19937_64& eng, int k, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TargetPoint p(k);
  for (int i = 0; i < k; ++i) p[i] = scale * u(eng);
  return p;
}

}  // namespace

TEST_CASE("q_from_director basics") {
  const TargetPoint q = q_from_director(Vec3{0, 0, 1}, 1.0);
  double M[3][3];
  coords_to_matrix(q.data(), M);
  CHECK(M[0][0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  CHECK(M[1][1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  CHECK(M[2][2] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(M[0][1]) < 1e-14);
  CHECK(std::abs(M[0][0] + M[1][1] + M[2][2]) < 1e-12);

  // head-to-tail symmetry
  const TargetPoint qm = q_from_director(Vec3{0, 0, -1}, 1.0);
  CHECK((q - qm).norm() < 1e-14);

  // |Q|^2 = 2 s^2 / 3
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    const Vec3 n = normalized3(Vec3{u(eng), u(eng), u(eng)});
    const double s = 3.539;
    const TargetPoint p = q_from_director(n, s);
    CHECK(p.dot(p) == doctest::Approx(2.0 * s * s / 3.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(q_from_director(Vec3{0, 0, 2}, 1.0), InputDomainError);
}

TEST_CASE("coordinates are Frobenius-orthonormal") {
  std::mt19937_64 eng(11);
  for (int it = 0; it < 30; ++it) {
    const TargetPoint a = random_point(eng, 5, 2.0);
    const TargetPoint b = random_point(eng, 5, 2.0);
    double Ma[3][3], Mb[3][3];
    coords_to_matrix(a.data(), Ma);
    coords_to_matrix(b.data(), Mb);
    double frob = 0;
    double tr = 0;
    for (int i = 0; i < 3; ++i) {
      tr += Ma[i][i];
      for (int j = 0; j < 3; ++j) {
        frob += Ma[i][j] * Mb[i][j];
        CHECK(Ma[i][j] == doctest::Approx(Ma[j][i]).epsilon(1e-14));
      }
    }
    CHECK(std::abs(tr) < 1e-12);
    CHECK(frob == doctest::Approx(a.dot(b)).epsilon(1e-12));
    // round trip
    TargetPoint back = matrix_to_coords(Ma);
    CHECK((back - a).norm() < 1e-12);
  }
}

TEST_CASE("s_star closed form against the 1-D oracle") {
  CHECK(s_star(1, 10, 1) == doctest::Approx(3.539).epsilon(1e-3));
  CHECK(std::abs(s_star(1, 10, 1) - s_star_oracle(1, 10, 1)) < 1e-10 * (1 + 3.54));
  CHECK(std::abs(s_star(1, 8, 1) - s_star_oracle(1, 8, 1)) < 1e-10 * (1 + 2.8));
  CHECK_THROWS_AS(s_star(1, 1, 1), DegenerateManifoldError);
  // a stationary uniaxial branch exists here but sits above the isotropic
  // state, so the normalized density would not vanish exactly on N
  CHECK_THROWS_AS(Potential::ldg(1.0, std::sqrt(22.0), 1.0), DegenerateManifoldError);
}

TEST_CASE("bulk potential normalization and values") {
  const Potential pot = Potential::ldg(1, 10, 1);
  const double ss = pot.s_star();

  // zero on N
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    const Vec3 n = normalized3(Vec3{u(eng), u(eng), u(eng)});
    CHECK(std::abs(pot.f(q_from_director(n, ss))) < 1e-10);
  }
  // f(0) equals the negated uniaxial minimum, computed by the oracle
  const double s_or = s_star_oracle(1, 10, 1);
  const double expected_f0 = -uniaxial_profile(s_or, 1, 10, 1);
  CHECK(pot.f(TargetPoint::zero(5)) == doctest::Approx(expected_f0).epsilon(1e-10));

  // nonnegative on random samples
  for (int it = 0; it < 1000; ++it)
    CHECK(pot.f(random_point(eng, 5, 3.0 * ss)) >= -1e-12);

  const Potential gl = Potential::ginzburg_landau();
  TargetPoint unit{1.0, 0.0, 0.0};
  CHECK(gl.f(unit) == doctest::Approx(0.0).epsilon(1e-15));
  TargetPoint z{0.0, 0.0, 0.0};
  CHECK(gl.f(z) == doctest::Approx(1.0));
}

TEST_CASE("grad_f matches central differences") {
  std::mt19937_64 eng(7);
  for (const bool ldg : {true, false}) {
    const Potential pot = ldg ? Potential::ldg(1, 10, 1) : Potential::ginzburg_landau();
    const int k = pot.dim();
    const double scale = 3.0 * pot.s_star();
    // critical points
    CHECK(pot.grad_f(TargetPoint::zero(k)).norm() < 1e-14);
    if (ldg)
      CHECK(pot.grad_f(q_from_director(Vec3{0, 0, 1}, pot.s_star())).norm() < 1e-8);

    int checked = 0;
    for (int it = 0; it < 1000; ++it) {
      const TargetPoint z = random_point(eng, k, scale);
      const TargetPoint g = pot.grad_f(z);
      TargetPoint fd(k);
      const double d = 1e-5;
      for (int a = 0; a < k; ++a) {
        TargetPoint zp = z, zm = z;
        zp[a] += d;
        zm[a] -= d;
        fd[a] = (pot.f(zp) - pot.f(zm)) / (2 * d);
      }
      const double denom = std::max(fd.norm(), 1e-3 * (1.0 + z.norm() * z.norm() * z.norm()));
      CHECK((fd - g).norm() / denom < 1e-6);
      ++checked;
    }
    CHECK(checked == 1000);
  }
}

TEST_CASE("projection onto N") {
  const Potential gl = Potential::ginzburg_landau();
  TargetPoint p{2.0, 0.0, 0.0};
  const TargetPoint proj = project_to_N(p, gl);
  CHECK(proj[0] == doctest::Approx(1.0));
  CHECK(std::abs(proj[1]) < 1e-15);
  CHECK_THROWS_AS(project_to_N(TargetPoint::zero(3), gl), ProjectionUndefinedError);

  const Potential ldg = Potential::ldg(1, 10, 1);
  const double ss = ldg.s_star();
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  // idempotence on N
  for (int it = 0; it < 50; ++it) {
    const Vec3 n = normalized3(Vec3{u(eng), u(eng), u(eng)});
    const TargetPoint q = q_from_director(n, ss);
    CHECK((project_to_N(q, ldg) - q).norm() < 1e-10);
  }

  // brute force director grid oracle
  const auto grid = fibonacci_directors(10000);
  const double grid_res = 4.0 / std::sqrt(10000.0);
  for (int it = 0; it < 100; ++it) {
    const TargetPoint z = random_point(eng, 5, 2.0 * ss);
    TargetPoint best(5);
    double best_d = 1e300;
    for (const Vec3& n : grid) {
      const TargetPoint q = q_from_director(n, ss);
      const double d = (z - q).norm();
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    const TargetPoint proj_z = project_to_N(z, ldg);
    CHECK((proj_z - best).norm() < 2.0 * std::sqrt(2.0) * ss * grid_res);
    CHECK((z - proj_z).norm() <= best_d + 1e-12);
  }

  // double projection is projection
  for (int it = 0; it < 50; ++it) {
    const TargetPoint z = random_point(eng, 5, 2.0 * ss);
    const TargetPoint p1 = project_to_N(z, ldg);
    CHECK((project_to_N(p1, ldg) - p1).norm() < 1e-10);
  }
}

TEST_CASE("dist_to_N and biaxiality") {
  const Potential gl = Potential::ginzburg_landau();
  TargetPoint p{2.0, 0.0, 0.0};
  CHECK(dist_to_N(p, gl) == doctest::Approx(1.0));
  CHECK(dist_to_N(TargetPoint::zero(3), gl) == doctest::Approx(1.0));

  const Potential ldg = Potential::ldg(1, 10, 1);
  const double ss = ldg.s_star();
  const Vec3 e3{0, 0, 1};
  // uniaxial ray: dist = |s - s_star| sqrt(2/3)
  const TargetPoint half = q_from_director(e3, ss / 2.0);
  CHECK(dist_to_N(half, ldg) ==
        doctest::Approx(ss / 2.0 * std::sqrt(2.0 / 3.0)).epsilon(1e-9));
  CHECK(dist_to_N(q_from_director(e3, ss), ldg) < 1e-12);

  CHECK(biaxiality(q_from_director(e3, ss)) < 1e-10);
  // degenerate point Q = 0: falls back to the director grid
  const double d0 = dist_to_N(TargetPoint::zero(5), ldg);
  CHECK(d0 == doctest::Approx(ss * std::sqrt(2.0 / 3.0)).epsilon(1e-6));
  CHECK_THROWS_AS(biaxiality(TargetPoint::zero(5)), InputDomainError);

  // an algebraic second route: dist^2 = |Q|^2 - 2 s* lmax + 2 s*^2/3
  std::mt19937_64 eng(23);
  for (int it = 0; it < 200; ++it) {
    const TargetPoint z = random_point(eng, 5, 2.0 * ss);
    double M[3][3];
    coords_to_matrix(z.data(), M);
    // leading eigenvalue by characteristic cubic (symmetric 3x3)
    const double q = (M[0][0] + M[1][1] + M[2][2]) / 3.0;
    double p2 = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p2 += M[i][j] * M[i][j];
    p2 = (p2 - 3 * q * q) / 6.0;
    const double pp = std::sqrt(p2);
    double det = 0;
    double B[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) B[i][j] = (M[i][j] - (i == j ? q : 0.0)) / pp;
    det = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
          B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
          B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    const double phi = std::acos(std::clamp(det / 2.0, -1.0, 1.0)) / 3.0;
    const double lmax = q + 2 * pp * std::cos(phi);
    const double d2 = z.dot(z) - 2 * ss * lmax + 2.0 * ss * ss / 3.0;
    CHECK(dist_to_N(z, ldg) == doctest::Approx(std::sqrt(std::max(d2, 0.0))).epsilon(1e-7));
  }
}

TEST_CASE("A2 tube comparability") {
  for (const bool ldg : {true, false}) {
    const Potential pot = ldg ? Potential::ldg(1, 10, 1) : Potential::ginzburg_landau();
    const int k = pot.dim();
    const double ss = pot.s_star();
    std::mt19937_64 eng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c1 = 1e300, c2 = 0.0;
    int used = 0;
    for (int it = 0; it < 10000; ++it) {
      TargetPoint base(k);
      if (ldg) {
        base = q_from_director(normalized3(Vec3{u(eng), u(eng), u(eng)}), ss);
      } else {
        const Vec3 n = normalized3(Vec3{u(eng), u(eng), u(eng)});
        for (int a = 0; a < 3; ++a) base[a] = n[a];
      }
      TargetPoint off(k);
      for (int a = 0; a < k; ++a) off[a] = u(eng);
      if (off.norm() < 1e-9) continue;
      off *= (0.5 + 0.5 * u(eng)) * (ss / 4.0) / off.norm();
      const TargetPoint z = base + off;
      const double d = dist_to_N(z, pot);
      if (d < 1e-8) continue;
      const double r = pot.f(z) / (d * d);
      c1 = std::min(c1, r);
      c2 = std::max(c2, r);
      ++used;
    }
    CHECK(used > 9000);
    CHECK(c1 > 0.0);
    CHECK(std::isfinite(c2));
    CHECK(c2 >= c1);
  }
}

TEST_CASE("geodesics") {
  const Potential gl = Potential::ginzburg_landau();
  TargetPoint e1{1.0, 0.0, 0.0}, e2{0.0, 1.0, 0.0};
  CHECK((geodesic(0.0, e1, e2, gl) - e1).norm() < 1e-14);
  CHECK((geodesic(1.0, e1, e2, gl) - e2).norm() < 1e-14);
  const TargetPoint mid = geodesic(0.5, e1, e2, gl);
  CHECK(mid[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(mid[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  const Potential ldg = Potential::ldg(1, 10, 1);
  const double ss = ldg.s_star();
  // n and -n give the same Q: geodesic is constant
  const TargetPoint qa = q_from_director(Vec3{0, 0, 1}, ss);
  const TargetPoint qb = q_from_director(Vec3{0, 0, -1}, ss);
  for (double t : {0.0, 0.3, 0.7, 1.0})
    CHECK((geodesic(t, qa, qb, ldg) - qa).norm() < 1e-10);

  // orthogonal directors: not unique
  const TargetPoint qx = q_from_director(Vec3{1, 0, 0}, ss);
  CHECK_THROWS_AS(geodesic(0.5, qa, qx, ldg), NonuniqueGeodesicError);

  // endpoints off N rejected
  TargetPoint bad = qa;
  bad *= 1.5;
  CHECK_THROWS_AS(geodesic(0.5, bad, qa, ldg), InputDomainError);

  // constant speed, points stay on N
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const bool use_ldg : {true, false}) {
    const Potential& pot = use_ldg ? ldg : gl;
    for (int rep = 0; rep < 20; ++rep) {
      const Vec3 n1 = normalized3(Vec3{u(eng), u(eng), u(eng)});
      Vec3 n2 = normalized3(Vec3{u(eng), u(eng), u(eng)});
      if (std::abs(dot3(n1, n2)) < 0.05) continue;
      TargetPoint z1(pot.dim()), z2(pot.dim());
      if (use_ldg) {
        z1 = q_from_director(n1, ss);
        z2 = q_from_director(n2, ss);
      } else {
        for (int a = 0; a < 3; ++a) {
          z1[a] = n1[a];
          z2[a] = n2[a];
        }
      }
      const int nt = 64;
      double smin = 1e300, smax = 0.0;
      TargetPoint prev = geodesic(0.0, z1, z2, pot);
      for (int i = 1; i <= nt; ++i) {
        const TargetPoint cur = geodesic(static_cast<double>(i) / nt, z1, z2, pot);
        CHECK(dist_to_N(cur, pot) < 1e-9 * (1 + ss));
        const double sp = (cur - prev).norm();
        smin = std::min(smin, sp);
        smax = std::max(smax, sp);
        prev = cur;
      }
      if (smax > 1e-12) CHECK((smax - smin) / smax < 1e-5);
    }
  }
}

TEST_CASE("growth params and A3b check") {
  CHECK_THROWS_AS(GrowthParams(1.4, 0.75), InputDomainError);
  CHECK_THROWS_AS(GrowthParams(2.0, 0.9), InputDomainError);
  const GrowthParams gp(2.0, 0.75);
  CHECK(gp.A_exp() == doctest::Approx(4.0 / 3.0 - 0.5));

  const Potential ldg = Potential::ldg(1, 10, 1);
  const double ss = ldg.s_star();
  const GrowthReport r1 =
      check_A2_A3b(ldg, gp, {2 * ss, 4 * ss, 8 * ss, 16 * ss, 32 * ss});
  CHECK(r1.pass);

  const Potential gl = Potential::ginzburg_landau();
  const GrowthReport r2 = check_A2_A3b(gl, gp, {2, 5, 10, 20, 40});
  CHECK(r2.pass);
  // |grad f| ~ 4|z|^3 against |z|^{6/p} = |z|^3: the ratio approaches 4
  CHECK(r2.rows.back().max_ratio_power == doctest::Approx(4.0).epsilon(0.02));

  CHECK_THROWS_AS(check_A2_A3b(gl, gp, {5.0}), InputDomainError);
  CHECK_THROWS_AS(check_A2_A3b(gl, gp, {4.0, 8.0}), InputDomainError);
}

TEST_CASE("conjugation acts orthogonally on coordinates") {
  const double c = std::cos(0.7), s = std::sin(0.7);
  const double R[3][3] = {{c, -s, 0}, {s, c, 0}, {0, 0, 1}};
  std::mt19937_64 eng(37);
  for (int it = 0; it < 30; ++it) {
    const TargetPoint a = random_point(eng, 5, 2.0);
    const TargetPoint ra = conjugate_coords(a, R);
    CHECK(ra.norm() == doctest::Approx(a.norm()).epsilon(1e-12));
  }
  // director rotation commutes with q_from_director
  const Vec3 n{0.3, -0.4, std::sqrt(1 - 0.09 - 0.16)};
  const Vec3 rn{c * n[0] - s * n[1], s * n[0] + c * n[1], n[2]};
  const TargetPoint lhs = conjugate_coords(q_from_director(n, 2.0), R);
  const TargetPoint rhs = q_from_director(rn, 2.0);
  CHECK((lhs - rhs).norm() < 1e-12);
}
