#include "epsflow/field.hpp"

#include <algorithm>
#include <cmath>

#include "epsflow/parallel.hpp"

namespace epsflow {

Grid make_ball_grid(const Vec3& center, double radius, int nodes_per_axis) {
  if (nodes_per_axis < 3) throw InputDomainError("make_ball_grid: need >= 3 nodes per axis");
  if (radius <= 0) throw InputDomainError("make_ball_grid: radius must be positive");
  Grid g;
  g.n = {nodes_per_axis, nodes_per_axis, nodes_per_axis};
  g.h = 2.0 * radius / (nodes_per_axis - 1);
  g.origin = Vec3{center[0] - radius, center[1] - radius, center[2] - radius};
  g.domain = DomainKind::Ball;
  g.center = center;
  g.radius = radius;
  return g;
}

Grid make_box_grid(const Vec3& origin, double side, int nodes_per_axis) {
  if (nodes_per_axis < 3) throw InputDomainError("make_box_grid: need >= 3 nodes per axis");
  if (side <= 0) throw InputDomainError("make_box_grid: side must be positive");
  Grid g;
  g.n = {nodes_per_axis, nodes_per_axis, nodes_per_axis};
  g.h = side / (nodes_per_axis - 1);
  g.origin = origin;
  g.domain = DomainKind::Box;
  g.center = Vec3{origin[0] + side / 2, origin[1] + side / 2, origin[2] + side / 2};
  g.radius = side / 2;
  return g;
}

Grid make_half_ball_grid(const Vec3& center, double radius, int nodes_per_axis) {
  if (nodes_per_axis < 5)
    throw InputDomainError("make_half_ball_grid: need >= 5 nodes per axis");
  if (nodes_per_axis % 2 == 0)
    throw InputDomainError(
        "make_half_ball_grid: node count must be odd so the lattice reaches the pole");
  if (radius <= 0) throw InputDomainError("make_half_ball_grid: radius must be positive");
  Grid g;
  const int nz = (nodes_per_axis - 1) / 2 + 1;
  g.n = {nodes_per_axis, nodes_per_axis, nz};
  g.h = 2.0 * radius / (nodes_per_axis - 1);
  g.origin = Vec3{center[0] - radius, center[1] - radius, center[2]};
  g.domain = DomainKind::HalfBall;
  g.center = center;
  g.radius = radius;
  return g;
}

TargetPoint Field::point(std::size_t idx) const {
  TargetPoint p(k);
  const double* v = at(idx);
  for (int a = 0; a < k; ++a) p[a] = v[a];
  return p;
}

void Field::set_point(std::size_t idx, const TargetPoint& p) {
  double* v = at(idx);
  for (int a = 0; a < k; ++a) v[a] = p[a];
}

bool Field::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

Field make_field(const Grid& grid, int k) {
  Field f;
  f.grid = grid;
  f.k = k;
  f.values.assign(grid.size() * static_cast<std::size_t>(k), 0.0);
  f.dirichlet.assign(grid.size(), 0);
  return f;
}

Field sample_field(const Grid& grid, int k,
                   const std::function<TargetPoint(const Vec3&)>& fn) {
  Field f = make_field(grid, k);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const TargetPoint p = fn(grid.pos(idx));
    f.set_point(idx, p);
  }
  return f;
}

void mark_domain_boundary(Field& f) {
  const Grid& g = f.grid;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    int i, j, k;
    g.coords(idx, &i, &j, &k);
    bool fixed = false;
    switch (g.domain) {
      case DomainKind::Box:
        fixed = i == 0 || j == 0 || k == 0 || i == g.n[0] - 1 || j == g.n[1] - 1 ||
                k == g.n[2] - 1;
        break;
      case DomainKind::Ball: {
        const Vec3 x = g.pos(idx);
        const Vec3 d{x[0] - g.center[0], x[1] - g.center[1], x[2] - g.center[2]};
        fixed = norm3(d) >= g.radius - 0.5 * g.h;
        break;
      }
      case DomainKind::HalfBall: {
        const Vec3 x = g.pos(idx);
        const Vec3 d{x[0] - g.center[0], x[1] - g.center[1], x[2] - g.center[2]};
        fixed = norm3(d) >= g.radius - 0.5 * g.h || k == 0;
        break;
      }
    }
    f.dirichlet[idx] = fixed ? 1 : 0;
  }
}

FieldGradient gradient(const Field& f) {
  const Grid& g = f.grid;
  for (int a = 0; a < 3; ++a)
    if (g.n[static_cast<std::size_t>(a)] < 3)
      throw InputDomainError("gradient: need >= 3 nodes per axis");
  FieldGradient out;
  out.n = g.n;
  out.k = f.k;
  out.g.assign(g.size() * static_cast<std::size_t>(f.k) * 3, 0.0);
  const int k = f.k;
  const double inv2h = 1.0 / (2.0 * g.h);
  const double invh = 1.0 / g.h;
  const std::size_t strides[3] = {1, static_cast<std::size_t>(g.n[0]),
                                  static_cast<std::size_t>(g.n[0]) *
                                      static_cast<std::size_t>(g.n[1])};
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      int c[3];
      g.coords(idx, &c[0], &c[1], &c[2]);
      double* gp = out.g.data() + idx * static_cast<std::size_t>(k) * 3;
      for (int ax = 0; ax < 3; ++ax) {
        const int ni = g.n[static_cast<std::size_t>(ax)];
        const std::size_t s = strides[ax];
        const double* up;
        const double* um;
        double scale;
        if (c[ax] > 0 && c[ax] < ni - 1) {
          up = f.at(idx + s);
          um = f.at(idx - s);
          scale = inv2h;
        } else if (c[ax] == 0) {
          up = f.at(idx + s);
          um = f.at(idx);
          scale = invh;
        } else {
          up = f.at(idx);
          um = f.at(idx - s);
          scale = invh;
        }
        for (int a = 0; a < k; ++a) gp[a * 3 + ax] = scale * (up[a] - um[a]);
      }
    }
  });
  return out;
}

double Mask::volume(double h) const {
  std::vector<double> terms(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) terms[i] = weights[i] * h * h * h;
  return pairwise_sum(terms);
}

namespace {

Mask clipped_ball_mask(const Grid& grid, const Vec3& center, double r, bool half,
                       double plane_z) {
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = grid.origin[static_cast<std::size_t>(ax)];
    const double hi = lo + grid.extent(ax);
    double clo = center[static_cast<std::size_t>(ax)] - r;
    double chi = center[static_cast<std::size_t>(ax)] + r;
    if (half && ax == 2) clo = std::max(clo, plane_z);
    if (clo < lo - 0.5 * grid.h || chi > hi + 0.5 * grid.h)
      throw GeometryError("ball_mask: ball exits the lattice");
  }
  Mask m;
  m.center = center;
  m.radius = r;
  const double r2 = r * r;
  // 8-point subcell sampling of each node cell (octant centers at +-h/4).
  const double q = 0.25 * grid.h;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Vec3 x = grid.pos(idx);
    const Vec3 d{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
    const double dist = norm3(d);
    if (dist > r + grid.h) continue;
    int inside = 0;
    for (int s = 0; s < 8; ++s) {
      const double sx = d[0] + ((s & 1) ? q : -q);
      const double sy = d[1] + ((s & 2) ? q : -q);
      const double sz = d[2] + ((s & 4) ? q : -q);
      if (sx * sx + sy * sy + sz * sz <= r2 &&
          (!half || x[2] + ((s & 4) ? q : -q) >= plane_z))
        ++inside;
    }
    if (inside == 0) continue;
    m.nodes.push_back(static_cast<std::uint32_t>(idx));
    m.weights.push_back(inside / 8.0);
  }
  return m;
}

}  // namespace

Mask ball_mask(const Grid& grid, const Vec3& center, double r) {
  if (r <= 0) throw InputDomainError("ball_mask: radius must be positive");
  return clipped_ball_mask(grid, center, r, false, 0.0);
}

Mask half_ball_mask(const Grid& grid, const Vec3& center, double r, double plane_z) {
  if (r <= 0) throw InputDomainError("half_ball_mask: radius must be positive");
  return clipped_ball_mask(grid, center, r, true, plane_z);
}

Mask box_mask(const Grid& grid) {
  Mask m;
  m.center = grid.center;
  m.radius = grid.radius;
  m.nodes.reserve(grid.size());
  m.weights.reserve(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    int i, j, k;
    grid.coords(idx, &i, &j, &k);
    double w = 1.0;
    if (i == 0 || i == grid.n[0] - 1) w *= 0.5;
    if (j == 0 || j == grid.n[1] - 1) w *= 0.5;
    if (k == 0 || k == grid.n[2] - 1) w *= 0.5;
    m.nodes.push_back(static_cast<std::uint32_t>(idx));
    m.weights.push_back(w);
  }
  return m;
}

Mask domain_mask(const Grid& grid) {
  switch (grid.domain) {
    case DomainKind::Ball:
      return ball_mask(grid, grid.center, grid.radius);
    case DomainKind::HalfBall:
      return half_ball_mask(grid, grid.center, grid.radius, grid.center[2]);
    case DomainKind::Box:
    default:
      return box_mask(grid);
  }
}

DistanceParts distance_parts(const Field& f1, const Field& f2, const Mask& mask) {
  if (!f1.grid.same_layout(f2.grid) || f1.k != f2.k)
    throw GridMismatchError("distance_parts: fields live on different grids");
  Field diff = f1;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= f2.values[i];
  const FieldGradient dg = gradient(diff);
  const double h3 = f1.grid.h * f1.grid.h * f1.grid.h;
  std::vector<double> l2_terms(mask.nodes.size()), h1_terms(mask.nodes.size());
  DistanceParts parts;
  for (std::size_t m = 0; m < mask.nodes.size(); ++m) {
    const std::size_t idx = mask.nodes[m];
    const double* v = diff.at(idx);
    double n2 = 0.0;
    for (int a = 0; a < diff.k; ++a) n2 += v[a] * v[a];
    l2_terms[m] = mask.weights[m] * n2 * h3;
    const double* gp = dg.at(idx);
    double g2 = 0.0;
    for (int a = 0; a < diff.k * 3; ++a) g2 += gp[a] * gp[a];
    h1_terms[m] = mask.weights[m] * g2 * h3;
    parts.linf = std::max(parts.linf, std::sqrt(n2));
  }
  parts.l2 = std::sqrt(pairwise_sum(l2_terms));
  parts.h1_semi = std::sqrt(pairwise_sum(h1_terms));
  return parts;
}

double h1_distance(const Field& f1, const Field& f2, const Mask& mask) {
  const DistanceParts p = distance_parts(f1, f2, mask);
  return std::sqrt(p.l2 * p.l2 + p.h1_semi * p.h1_semi);
}

double linf_distance(const Field& f1, const Field& f2, const Mask& mask) {
  return distance_parts(f1, f2, mask).linf;
}

}  // namespace epsflow
