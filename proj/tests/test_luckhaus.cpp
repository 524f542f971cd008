#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <filesystem>

#include "epsflow/luckhaus.hpp"

using namespace epsflow;

namespace {

TargetPoint unit3(const Vec3& n) {
  TargetPoint p(3);
  for (int a = 0; a < 3; ++a) p[a] = n[a];
  return p;
}

// smooth tangent-ish perturbation of a constant sphere value
TargetPoint perturbed_sphere(const Vec3& x, double delta) {
  const Vec3 v{delta * std::sin(2.0 * x[1]), delta * std::cos(2.0 * x[0]), 1.0};
  return unit3(normalized3(v));
}

}  // namespace

TEST_CASE("cube-sphere mesh combinatorics") {
  const SphereMesh m1 = build_sphere_mesh(1);
  CHECK(m1.faces() == 24);
  CHECK(m1.vertices() == 26);
  CHECK(m1.edges() == 48);
  CHECK(m1.euler_characteristic() == 2);

  const SphereMesh m2 = build_sphere_mesh(2);
  CHECK(m2.faces() == 96);
  CHECK(m2.euler_characteristic() == 2);

  for (int nu : {3, 4}) {
    const SphereMesh m = build_sphere_mesh(nu);
    CHECK(m.faces() == 6 * (1 << (2 * nu)));
    CHECK(m.euler_characteristic() == 2);
  }
  CHECK_THROWS_AS(build_sphere_mesh(0), InputDomainError);
  CHECK_THROWS_AS(build_sphere_mesh(7), InputDomainError);
}

TEST_CASE("face areas stay within the bilipschitz factor of lambda^2") {
  double total_prev = 0.0;
  for (int nu : {1, 2, 3, 4}) {
    const SphereMesh m = build_sphere_mesh(nu);
    const double lam2 = m.lambda() * m.lambda();
    double total = 0.0;
    for (int f = 0; f < m.faces(); ++f) {
      const double a = m.face_area(f);
      CHECK(a >= lam2 / 3.0);
      CHECK(a <= 3.0 * lam2);
      total += a;
    }
    // areas tile the sphere
    CHECK(total == doctest::Approx(4.0 * M_PI).epsilon(1e-3));
    total_prev = total;
  }
  (void)total_prev;
}

TEST_CASE("mesh field sampling has canonical shared traces") {
  const SphereMesh mesh = build_sphere_mesh(2);
  const MeshField u = sample_mesh_field(mesh, 6, 3, [](const Vec3& x) {
    return perturbed_sphere(x, 0.3);
  });
  // positions on shared boundaries coincide bitwise across faces: collect all
  // boundary samples and count distinct positions per rounded key
  int shared_hits = 0;
  for (int f1 = 0; f1 < u.faces; ++f1)
    for (int f2 = f1 + 1; f2 < u.faces; ++f2)
      for (int s1 = 0; s1 <= 6; s1 += 6)
        for (int i1 = 0; i1 <= 6; ++i1) {
          const double* pa = u.position(f1, i1, s1);
          // compare against f2's boundary samples
          for (int j = 0; j <= 6; ++j)
            for (int s2 = 0; s2 <= 6; s2 += 6) {
              const double* pb = u.position(f2, j, s2);
              if (std::abs(pa[0] - pb[0]) < 1e-9 && std::abs(pa[1] - pb[1]) < 1e-9 &&
                  std::abs(pa[2] - pb[2]) < 1e-9) {
                CHECK(pa[0] == pb[0]);
                CHECK(pa[1] == pb[1]);
                CHECK(pa[2] == pb[2]);
                const double* va = u.value(f1, i1, s1);
                const double* vb = u.value(f2, j, s2);
                for (int c = 0; c < 3; ++c) CHECK(va[c] == vb[c]);
                ++shared_hits;
              }
            }
        }
  CHECK(shared_hits > 0);

  // surface quadrature of a constant is 4 pi
  const Potential gl = Potential::ginzburg_landau();
  const MeshField one = sample_mesh_field(mesh, 6, 3, [](const Vec3&) {
    TargetPoint p(3);
    p[0] = 1.0;
    return p;
  });
  const SurfaceEnergy se = mesh_surface_energy(mesh, one, 0.1, gl);
  CHECK(se.dirichlet == doctest::Approx(0.0));
  CHECK(se.potential == doctest::Approx(0.0));
}

TEST_CASE("modify_boundary on constant data is exact") {
  const SphereMesh mesh = build_sphere_mesh(2);
  const Potential gl = Potential::ginzburg_landau();
  const MeshField u = sample_mesh_field(mesh, 6, 3, [](const Vec3&) {
    TargetPoint p(3);
    p[2] = 1.0;
    return p;
  });
  const auto res = modify_boundary(mesh, u, mesh.lambda() / 2, gl, 0.1, 6);
  CHECK(res.sphere_energy.total == doctest::Approx(0.0));
  CHECK(res.grad_w_sq == doctest::Approx(0.0));
  CHECK(res.annulus.total == doctest::Approx(0.0));
  for (double v : res.phi.values) CHECK(std::isfinite(v));
  // w identical to the constant
  for (int f = 0; f < res.w.faces; ++f)
    for (int j = 0; j <= res.w.m; ++j)
      for (int i = 0; i <= res.w.m; ++i) {
        CHECK(res.w.value(f, i, j)[2] == doctest::Approx(1.0).epsilon(1e-12));
      }
}

TEST_CASE("modify_boundary on perturbed data") {
  const Potential gl = Potential::ginzburg_landau();
  const double delta = 1e-2;
  double c_phi_min = 1e300, c_phi_max = 0, c_w_min = 1e300, c_w_max = 0;
  for (int nu : {2, 3}) {
    const SphereMesh mesh = build_sphere_mesh(nu);
    const MeshField u = sample_mesh_field(mesh, 8, 3, [&](const Vec3& x) {
      return perturbed_sphere(x, delta);
    });
    const auto res = modify_boundary(mesh, u, mesh.lambda() / 2, gl, 1.0, 8);

    // w lies on N everywhere
    for (int f = 0; f < res.w.faces; ++f)
      for (int j = 0; j <= res.w.m; ++j)
        for (int i = 0; i <= res.w.m; ++i) {
          TargetPoint z(3);
          for (int a = 0; a < 3; ++a) z[a] = res.w.value(f, i, j)[a];
          CHECK(dist_to_N(z, gl) < 1e-8);
        }

    // trace compatibility, sample for sample
    for (int f = 0; f < res.phi.faces; ++f)
      for (int j = 0; j <= res.phi.m; ++j)
        for (int i = 0; i <= res.phi.m; ++i)
          for (int a = 0; a < 3; ++a) {
            CHECK(res.phi.value(f, i, j, res.phi.mr)[a] == u.value(f, i, j)[a]);
            CHECK(res.phi.value(f, i, j, 0)[a] == res.w.value(f, i, j)[a]);
          }

    CHECK(res.annulus.total >= 0.0);
    c_phi_min = std::min(c_phi_min, res.c_phi);
    c_phi_max = std::max(c_phi_max, res.c_phi);
    c_w_min = std::min(c_w_min, res.c_w);
    c_w_max = std::max(c_w_max, res.c_w);
  }
  // lambda-uniform constants within a factor 2 across the two levels
  CHECK(c_phi_max <= 2.0 * c_phi_min);
  CHECK(c_w_max <= 2.0 * c_w_min);

  // preconditions
  const SphereMesh mesh = build_sphere_mesh(2);
  const MeshField u = sample_mesh_field(mesh, 8, 3, [&](const Vec3& x) {
    return perturbed_sphere(x, delta);
  });
  CHECK_THROWS_AS(modify_boundary(mesh, u, 2.0 * mesh.lambda(), gl, 1.0, 8),
                  InputDomainError);
  CHECK_THROWS_AS(modify_boundary(mesh, u, mesh.lambda() / 2, gl, 1e-6, 8),
                  SmallnessViolationError);
}

TEST_CASE("pointwise potential bound on the lateral walls") {
  // f(phi) <= C f(u) on edge prisms, with C from the measured tube constants
  const Potential gl = Potential::ginzburg_landau();
  const SphereMesh mesh = build_sphere_mesh(2);
  // data slightly off the sphere so f(u) > 0
  const MeshField u = sample_mesh_field(mesh, 8, 3, [&](const Vec3& x) {
    TargetPoint p = perturbed_sphere(x, 1e-2);
    const double stretch = 1.0 + 5e-3 * std::cos(3.0 * x[2]);
    p *= stretch;
    return p;
  });
  const auto res = modify_boundary(mesh, u, mesh.lambda() / 2, gl, 1.0, 8);
  // GL tube constants on dist <= 1/4: f/d^2 = (1+|u|)^2 in [c1, c2]
  const double c1 = 2.25, c2 = 5.1;
  for (int f = 0; f < res.phi.faces; ++f)
    for (int l = 0; l <= res.phi.mr; ++l)
      for (int j = 0; j <= res.phi.m; ++j)
        for (int i : {0, res.phi.m}) {
          const double fu = gl.f_raw(u.value(f, i, j));
          const double fphi = gl.f_raw(res.phi.value(f, i, j, l));
          CHECK(fphi <= (c2 / c1) * fu * 1.2 + 1e-15);
        }
}

TEST_CASE("luckhaus interpolant: trivial data") {
  const SphereMesh mesh = build_sphere_mesh(2);
  const Potential gl = Potential::ginzburg_landau();
  const MeshField u = sample_mesh_field(mesh, 6, 3, [](const Vec3&) {
    TargetPoint p(3);
    p[2] = 1.0;
    return p;
  });
  const auto res = luckhaus_interpolant(mesh, u, u, mesh.lambda() / 2, gl, 1e-2, 6);
  CHECK(res.annulus.dirichlet == doctest::Approx(0.0));
  CHECK(res.annulus.potential == doctest::Approx(0.0));
  CHECK(res.l2_diff == doctest::Approx(0.0));
}

TEST_CASE("luckhaus interpolant: perturbed data and scaling") {
  const Potential gl = Potential::ginzburg_landau();
  double cg_min = 1e300, cg_max = 0;
  for (int nu : {2, 3}) {
    const SphereMesh mesh = build_sphere_mesh(nu);
    const double lam = mesh.lambda();
    const double off = 0.3 * 1e-2 * lam;
    const double rot = 0.25 * 1e-2 * lam;
    const MeshField u = sample_mesh_field(mesh, 8, 3, [&](const Vec3& x) {
      TargetPoint p = perturbed_sphere(x, 0.05);
      p *= 1.0 + off * std::cos(3.0 * x[0]);
      return p;
    });
    const MeshField v = sample_mesh_field(mesh, 8, 3, [&](const Vec3& x) {
      const TargetPoint p = perturbed_sphere(x, 0.05);
      const double c = std::cos(rot), s = std::sin(rot);
      TargetPoint q(3);
      q[0] = c * p[0] - s * p[1];
      q[1] = s * p[0] + c * p[1];
      q[2] = p[2];
      return q;
    });
    const auto res = luckhaus_interpolant(mesh, u, v, lam / 2, gl, 1e-2, 8);

    // inner half layer exactly on N: f vanishes at the stored samples
    for (int f = 0; f < res.phi.faces; ++f)
      for (int l = 0; l <= res.phi.mr / 2; ++l)
        for (int j = 0; j <= res.phi.m; ++j)
          for (int i = 0; i <= res.phi.m; ++i)
            CHECK(gl.f_raw(res.phi.value(f, i, j, l)) < 1e-12);

    // traces
    for (int f = 0; f < res.phi.faces; ++f)
      for (int j = 0; j <= res.phi.m; ++j)
        for (int i = 0; i <= res.phi.m; ++i)
          for (int a = 0; a < 3; ++a) {
            CHECK(res.phi.value(f, i, j, res.phi.mr)[a] == u.value(f, i, j)[a]);
            CHECK(res.phi.value(f, i, j, 0)[a] == v.value(f, i, j)[a]);
          }

    CHECK(res.c_grad > 0.0);
    cg_min = std::min(cg_min, res.c_grad);
    cg_max = std::max(cg_max, res.c_grad);
  }
  CHECK(cg_max <= 2.0 * cg_min);

  // smallness violation: v_star far from u
  const SphereMesh mesh = build_sphere_mesh(2);
  const MeshField u = sample_mesh_field(mesh, 6, 3, [](const Vec3& x) {
    return perturbed_sphere(x, 0.05);
  });
  const MeshField w = sample_mesh_field(mesh, 6, 3, [](const Vec3& x) {
    TargetPoint p = perturbed_sphere(x, 0.05);
    p *= -1.0;  // antipodal field
    return p;
  });
  CHECK_THROWS_AS(luckhaus_interpolant(mesh, u, w, mesh.lambda() / 2, gl, 1e-2, 6),
                  SmallnessViolationError);

  // with the closeness gate opened wide, antipodal directors hit the
  // nonunique-geodesic path
  CHECK_THROWS_AS(luckhaus_interpolant(mesh, u, w, mesh.lambda() / 2, gl, 1e3, 6),
                  ConstructionError);
}

TEST_CASE("mesh and annulus snapshots round trip") {
  const SphereMesh mesh = build_sphere_mesh(2);
  const Potential gl = Potential::ginzburg_landau();
  const MeshField u = sample_mesh_field(mesh, 4, 3, [](const Vec3& x) {
    return perturbed_sphere(x, 0.05);
  });
  const auto res = modify_boundary(mesh, u, mesh.lambda() / 2, gl, 10.0, 4);
  const auto dir = std::filesystem::temp_directory_path() / "epsflow_luck_io";
  std::filesystem::create_directories(dir);
  write_mesh_field(res.w, (dir / "w.meshfield").string());
  const MeshField w2 = read_mesh_field((dir / "w.meshfield").string());
  CHECK(w2.m == res.w.m);
  CHECK(w2.values == res.w.values);
  CHECK(w2.positions == res.w.positions);
  write_annulus_field(res.phi, (dir / "phi.annulus").string());
  const AnnulusField p2 = read_annulus_field((dir / "phi.annulus").string());
  CHECK(p2.lambda == res.phi.lambda);
  CHECK(p2.values == res.phi.values);
}
