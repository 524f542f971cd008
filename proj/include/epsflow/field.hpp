#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "epsflow/errors.hpp"
#include "epsflow/manifold.hpp"

namespace epsflow {

enum class DomainKind { Box, Ball, HalfBall };

// Uniform node lattice. Ball and half-ball domains are carried on the
// bounding box; the domain kind drives boundary masks and quadrature masks.
struct Grid {
  std::array<int, 3> n{3, 3, 3};  // nodes per axis
  double h = 1.0;
  Vec3 origin{0, 0, 0};
  DomainKind domain = DomainKind::Box;
  Vec3 center{0, 0, 0};
  double radius = 0.0;

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(n[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n[0]) +
           static_cast<std::size_t>(i);
  }
  void coords(std::size_t idx, int* i, int* j, int* k) const {
    *i = static_cast<int>(idx % static_cast<std::size_t>(n[0]));
    *j = static_cast<int>((idx / static_cast<std::size_t>(n[0])) %
                          static_cast<std::size_t>(n[1]));
    *k = static_cast<int>(idx / (static_cast<std::size_t>(n[0]) *
                                 static_cast<std::size_t>(n[1])));
  }
  Vec3 pos(int i, int j, int k) const {
    return Vec3{origin[0] + h * i, origin[1] + h * j, origin[2] + h * k};
  }
  Vec3 pos(std::size_t idx) const {
    int i, j, k;
    coords(idx, &i, &j, &k);
    return pos(i, j, k);
  }
  double extent(int axis) const { return h * (n[static_cast<std::size_t>(axis)] - 1); }
  bool same_layout(const Grid& o) const {
    return n == o.n && h == o.h && origin == o.origin;
  }
};

// Lattice covering [c-R, c+R]^3 with nodes_per_axis nodes per axis.
Grid make_ball_grid(const Vec3& center, double radius, int nodes_per_axis);
// Lattice covering [origin, origin + side]^3.
Grid make_box_grid(const Vec3& origin, double side, int nodes_per_axis);
// Ball intersected with {x3 >= center3}; flat face on the lattice bottom.
Grid make_half_ball_grid(const Vec3& center, double radius, int nodes_per_axis);

struct Field {
  Grid grid;
  int k = 0;
  std::vector<double> values;           // size()*k, node-major
  std::vector<std::uint8_t> dirichlet;  // nodes held fixed by the solver

  double* at(std::size_t idx) { return values.data() + idx * static_cast<std::size_t>(k); }
  const double* at(std::size_t idx) const {
    return values.data() + idx * static_cast<std::size_t>(k);
  }
  TargetPoint point(std::size_t idx) const;
  void set_point(std::size_t idx, const TargetPoint& p);
  bool all_finite() const;
};

Field make_field(const Grid& grid, int k);
Field sample_field(const Grid& grid, int k,
                   const std::function<TargetPoint(const Vec3&)>& fn);

// Marks the Dirichlet nodes implied by the grid's domain kind: box faces,
// the shell |x-c| >= R - h/2 for balls, plus the flat face for half balls.
void mark_domain_boundary(Field& f);

// Node gradient, central in the interior and one-sided at lattice faces.
// Layout: g[(idx*k + alpha)*3 + j] = d_j u^alpha at node idx.
struct FieldGradient {
  std::array<int, 3> n;
  int k = 0;
  std::vector<double> g;
  const double* at(std::size_t idx) const {
    return g.data() + idx * static_cast<std::size_t>(k) * 3;
  }
};
FieldGradient gradient(const Field& f);

// Quadrature mask: node indices with partial-volume weights in [0,1].
struct Mask {
  std::vector<std::uint32_t> nodes;
  std::vector<double> weights;
  Vec3 center{0, 0, 0};
  double radius = 0.0;
  double volume(double h) const;  // sum of weights * h^3
};

// Partial-volume ball mask from 8-point subcell sampling; throws
// GeometryError when the ball (plus half a cell) leaves the lattice.
Mask ball_mask(const Grid& grid, const Vec3& center, double r);
// Ball intersected with {x3 >= plane_z}.
Mask half_ball_mask(const Grid& grid, const Vec3& center, double r, double plane_z);
// All nodes with tensor-product trapezoid weights (box integration).
Mask box_mask(const Grid& grid);
// Nodes of the domain implied by the grid (ball/half-ball/box).
Mask domain_mask(const Grid& grid);

struct DistanceParts {
  double l2 = 0.0;       // L2 norm of the difference over the mask
  double h1_semi = 0.0;  // gradient part
  double linf = 0.0;     // max node norm over the mask
};

DistanceParts distance_parts(const Field& f1, const Field& f2, const Mask& mask);
// sqrt(L2^2 + |grad|^2) of the difference over the mask.
double h1_distance(const Field& f1, const Field& f2, const Mask& mask);
double linf_distance(const Field& f1, const Field& f2, const Mask& mask);

}  // namespace epsflow
