#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "epsflow/energy.hpp"
#include "epsflow/field.hpp"
#include "epsflow/snapshot.hpp"

using namespace epsflow;

namespace {

TargetPoint hedgehog(const Vec3& x) {
  const double n = norm3(x);
  TargetPoint p(3);
  if (n < 1e-14) {
    p[2] = 1.0;
    return p;
  }
  for (int a = 0; a < 3; ++a) p[a] = x[a] / n;
  return p;
}

}  // namespace

TEST_CASE("gradient exactness") {
  const Grid g = make_box_grid(Vec3{0, 0, 0}, 1.0, 9);

  // constant
  const Field c = sample_field(g, 3, [](const Vec3&) {
    return TargetPoint{1.0, 2.0, 3.0};
  });
  const FieldGradient gc = gradient(c);
  for (double v : gc.g) CHECK(std::abs(v) < 1e-14);

  // affine: exact at interior nodes
  const Field a = sample_field(g, 3, [](const Vec3& x) {
    return TargetPoint{2 * x[0] - x[1], x[2], x[0] + x[1] + x[2]};
  });
  const FieldGradient ga = gradient(a);
  const double expect[3][3] = {{2, -1, 0}, {0, 0, 1}, {1, 1, 1}};
  for (int kk = 1; kk < 8; ++kk)
    for (int jj = 1; jj < 8; ++jj)
      for (int ii = 1; ii < 8; ++ii) {
        const double* gp = ga.at(g.index(ii, jj, kk));
        for (int al = 0; al < 3; ++al)
          for (int d = 0; d < 3; ++d)
            CHECK(std::abs(gp[al * 3 + d] - expect[al][d]) < 1e-12);
      }
}

TEST_CASE("gradient second-order Taylor bound for sin") {
  const int n = 65;
  const Grid g = make_box_grid(Vec3{0, 0, 0}, M_PI, n);  // h = pi/64
  const Field f = sample_field(g, 1, [](const Vec3& x) {
    TargetPoint p(1);
    p[0] = std::sin(x[0]);
    return p;
  });
  const FieldGradient gf = gradient(f);
  double worst = 0.0;
  for (int kk = 0; kk < n; ++kk)
    for (int jj = 0; jj < n; ++jj)
      for (int ii = 1; ii < n - 1; ++ii) {
        const Vec3 x = g.pos(ii, jj, kk);
        worst = std::max(worst,
                         std::abs(gf.at(g.index(ii, jj, kk))[0] - std::cos(x[0])));
      }
  CHECK(worst <= g.h * g.h / 6.0 * 1.1);
}

TEST_CASE("ball mask volume consistency") {
  const Grid g = make_ball_grid(Vec3{0, 0, 0}, 1.0, 81);  // h = 1/40
  for (const double ratio : {8.0, 16.0, 32.0}) {
    const double r = ratio * g.h;
    const Mask m = ball_mask(g, Vec3{0, 0, 0}, r);
    const double vol = m.volume(g.h);
    const double exact = 4.0 / 3.0 * M_PI * r * r * r;
    CHECK(std::abs(vol - exact) / exact < 2.0 * g.h / r);
  }
  CHECK_THROWS_AS(ball_mask(g, Vec3{0.9, 0, 0}, 0.5), GeometryError);
}

TEST_CASE("energy of constant N-valued field vanishes") {
  const Grid g = make_ball_grid(Vec3{0, 0, 0}, 1.0, 17);
  const ElasticModel iso = ElasticModel::isotropic(3);
  const Potential gl = Potential::ginzburg_landau();
  const Field f = sample_field(g, 3, [](const Vec3&) {
    return TargetPoint{0.0, 0.0, 1.0};
  });
  const auto en = energy(f, 0.1, iso, gl, domain_mask(g));
  CHECK(en.elastic == 0.0);
  CHECK(en.potential == 0.0);
  CHECK(en.total == 0.0);
  CHECK_THROWS_AS(energy(f, -1.0, iso, gl, domain_mask(g)), InputDomainError);
}

TEST_CASE("hedgehog elastic energy approaches 8 pi r") {
  // |grad(x/|x|)|^2 = 2/|x|^2 integrates to 8 pi r over B_r. The grid is
  // odd so the singular cell sits on a node and keeps its finite
  // one-sided-difference value.
  const Grid g = make_ball_grid(Vec3{0, 0, 0}, 1.0, 65);  // h = 1/32
  const ElasticModel iso = ElasticModel::isotropic(3);
  const Potential gl = Potential::ginzburg_landau();
  const Field f = sample_field(g, 3, hedgehog);

  // mask excluding the origin cell, at h = r/32 (spherical oracle value 8 pi r)
  {
    const double r = 32.0 * g.h;
    Mask m = ball_mask(g, Vec3{0, 0, 0}, r);
    Mask ex;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const Vec3 x = g.pos(m.nodes[i]);
      if (std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) <= g.h / 2)
        continue;
      ex.nodes.push_back(m.nodes[i]);
      ex.weights.push_back(m.weights[i]);
    }
    const auto en = energy(f, 0.125, iso, gl, ex);
    CHECK(std::abs(en.elastic - 8.0 * M_PI * r) / (8.0 * M_PI * r) < 0.05);
  }

  // renormalized energy, independent of r, 5% for r/h >= 8
  for (const double r : {8.0 * g.h, 16.0 * g.h, 32.0 * g.h}) {
    const double rn = renormalized_energy(f, 0.125, iso, gl, Vec3{0, 0, 0}, r);
    CHECK(std::abs(rn - 8.0 * M_PI) / (8.0 * M_PI) < 0.05);
  }
  CHECK_THROWS_AS(renormalized_energy(f, 0.125, iso, gl, Vec3{0, 0, 0}, 3.0 * g.h),
                  GeometryError);
}

TEST_CASE("quadrature self-convergence under h-halving") {
  const ElasticModel iso = ElasticModel::isotropic(3);
  const Potential gl = Potential::ginzburg_landau();
  auto smooth = [](const Vec3& x) {
    TargetPoint p(3);
    p[0] = std::sin(x[0] + 0.3 * x[1]);
    p[1] = std::cos(x[2]);
    p[2] = 0.5 + 0.2 * x[0] * x[2];
    return p;
  };
  double totals[3];
  int idx = 0;
  for (const int n : {17, 33, 65}) {
    const Grid g = make_ball_grid(Vec3{0, 0, 0}, 1.0, n);
    const Field f = sample_field(g, 3, smooth);
    totals[idx++] =
        energy(f, 0.5, iso, gl, ball_mask(g, Vec3{0, 0, 0}, 0.875)).total;
  }
  const double d1 = std::abs(totals[1] - totals[0]);
  const double d2 = std::abs(totals[2] - totals[1]);
  CHECK(d2 <= d1);  // 4x slack over the h^2 Richardson estimate of d1/4
}

TEST_CASE("energy additivity over disjoint masks") {
  const Grid g = make_box_grid(Vec3{0, 0, 0}, 1.0, 17);
  const ElasticModel iso = ElasticModel::isotropic(3);
  const Potential gl = Potential::ginzburg_landau();
  std::mt19937_64 eng(83);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f = make_field(g, 3);
  for (double& v : f.values) v = u(eng);

  const Mask whole = box_mask(g);
  Mask lower, upper;
  for (std::size_t m = 0; m < whole.nodes.size(); ++m) {
    int i, j, kk;
    g.coords(whole.nodes[m], &i, &j, &kk);
    Mask& dst = (kk < g.n[2] / 2) ? lower : upper;
    dst.nodes.push_back(whole.nodes[m]);
    dst.weights.push_back(whole.weights[m]);
  }
  const double e1 = energy(f, 0.3, iso, gl, lower).total;
  const double e2 = energy(f, 0.3, iso, gl, upper).total;
  const double e = energy(f, 0.3, iso, gl, whole).total;
  CHECK(std::abs(e1 + e2 - e) <= 1e-13 * std::abs(e));
}

TEST_CASE("potential part vanishes exactly when masked nodes lie on N") {
  const Grid g = make_box_grid(Vec3{0, 0, 0}, 1.0, 9);
  const ElasticModel iso = ElasticModel::isotropic(3);
  const Potential gl = Potential::ginzburg_landau();
  Field f = sample_field(g, 3, hedgehog);  // |u| = 1 except at origin corner
  const auto en = energy(f, 0.5, iso, gl, box_mask(g));
  CHECK(en.potential < 1e-12);
  f.at(g.index(4, 4, 4))[0] = 2.0;  // push one node off N
  const auto en2 = energy(f, 0.5, iso, gl, box_mask(g));
  CHECK(en2.potential > 1e-6);
}

TEST_CASE("distances") {
  const Grid g = make_box_grid(Vec3{0, 0, 0}, 1.0, 9);
  const Mask m = box_mask(g);
  std::mt19937_64 eng(89);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f1 = make_field(g, 3);
  for (double& v : f1.values) v = u(eng);

  CHECK(h1_distance(f1, f1, m) == 0.0);
  CHECK(linf_distance(f1, f1, m) == 0.0);

  Field f2 = f1;
  for (std::size_t idx = 0; idx < g.size(); ++idx) f2.at(idx)[1] += 0.7;
  const DistanceParts parts = distance_parts(f1, f2, m);
  CHECK(parts.linf == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(parts.h1_semi < 1e-12);
  CHECK(parts.l2 == doctest::Approx(0.7).epsilon(1e-12));  // unit volume box

  // triangle inequality across random triples
  for (int rep = 0; rep < 100; ++rep) {
    Field a = make_field(g, 3), b = make_field(g, 3), c = make_field(g, 3);
    for (double& v : a.values) v = u(eng);
    for (double& v : b.values) v = u(eng);
    for (double& v : c.values) v = u(eng);
    CHECK(h1_distance(a, c, m) <= h1_distance(a, b, m) + h1_distance(b, c, m) + 1e-12);
    CHECK(linf_distance(a, c, m) <=
          linf_distance(a, b, m) + linf_distance(b, c, m) + 1e-12);
  }

  Field other = make_field(make_box_grid(Vec3{0, 0, 0}, 2.0, 9), 3);
  CHECK_THROWS_AS(h1_distance(f1, other, m), GridMismatchError);
}

TEST_CASE("snapshot round trip and vtk export") {
  const Grid g = make_ball_grid(Vec3{0.1, -0.2, 0.3}, 0.8, 9);
  std::mt19937_64 eng(97);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f = make_field(g, 5);
  for (double& v : f.values) v = u(eng);
  mark_domain_boundary(f);

  const std::string dir = std::filesystem::temp_directory_path() / "epsflow_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/field.bin";
  write_snapshot(f, path);
  const Field back = read_snapshot(path);
  CHECK(back.k == f.k);
  CHECK(back.grid.n == f.grid.n);
  CHECK(back.grid.h == f.grid.h);
  CHECK(back.grid.origin == f.grid.origin);
  CHECK(back.values == f.values);          // bit-exact
  CHECK(back.dirichlet == f.dirichlet);
  CHECK(back.grid.domain == f.grid.domain);

  write_vtk(f, dir + "/field.vtk");
  std::ifstream is(dir + "/field.vtk");
  std::string line;
  std::getline(is, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  CHECK_THROWS_AS(read_snapshot(dir + "/missing.bin"), Error);
}
