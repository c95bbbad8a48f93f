#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracxy/solvers.hpp"

namespace fracxy {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); }
double angle_between(const Point& u, const Point& v) { return std::atan2(cross(u, v), u.dot(v)); }

// Signed area of the disk |x| <= r intersected with the triangle (0, a, b).
double origin_wedge_overlap(const Point& a, const Point& b, double r) {
  const double r2 = r * r;
  const double aa = a.squaredNorm(), bb = b.squaredNorm();
  if (aa <= r2 && bb <= r2) return 0.5 * cross(a, b);
  const Point d = b - a;
  const double qa = d.squaredNorm();
  const double qb = a.dot(d);
  const double disc = qb * qb - qa * (aa - r2);
  if (qa == 0.0 || disc <= 0.0) return 0.5 * r2 * angle_between(a, b);
  const double root = std::sqrt(disc);
  const double t1 = (-qb - root) / qa, t2 = (-qb + root) / qa;
  if (t2 <= 0.0 || t1 >= 1.0) return 0.5 * r2 * angle_between(a, b);
  const Point p1 = a + std::max(t1, 0.0) * d;
  const Point p2 = a + std::min(t2, 1.0) * d;
  double out = 0.5 * cross(p1, p2);
  if (aa > r2) out += 0.5 * r2 * angle_between(a, p1);
  if (bb > r2) out += 0.5 * r2 * angle_between(p2, b);
  return out;
}

double distance_to_triangle(const Triangle& tri, const Point& p) {
  const auto& v = tri.vertices;
  const double s0 = cross(v[1] - v[0], p - v[0]);
  const double s1 = cross(v[2] - v[1], p - v[1]);
  const double s2 = cross(v[0] - v[2], p - v[2]);
  if ((s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Point a = v[i], d = v[(i + 1) % 3] - v[i];
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * d - p).norm());
  }
  return best;
}

}  // namespace

double triangle_disk_overlap(const Triangle& tri, const Point& center, double radius) {
  if (!(radius > 0.0)) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < 3; ++i)
    sum += origin_wedge_overlap(tri.vertices[i] - center, tri.vertices[(i + 1) % 3] - center, radius);
  return std::abs(sum);
}

RenormalizedEstimate renormalized_energy_estimate(const InterpolatedField& v, const VorticityMeasure& mu,
                                                  const std::vector<double>& sigmas, BallExclusion rule) {
  const LatticeDomain& dom = *v.domain;
  const double eps = dom.epsilon();
  if (sigmas.empty()) throw Error(Errc::construction, "no radii given");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 2.0 * eps)) throw Error(Errc::construction, "radii must exceed 2 eps");
    if (i > 0 && !(sigmas[i] < sigmas[i - 1])) throw Error(Errc::construction, "radii must be strictly decreasing");
  }
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    const Point& x = mu.atoms[i].position;
    if (!contains(dom.shape(), x) || !(distance_to_boundary(dom.shape(), x) > 0.0))
      throw Error(Errc::construction, "atoms must be interior points");
    for (std::size_t j = 0; j < i; ++j) {
      if ((x - mu.atoms[j].position).norm() <= 2.0 * sigmas.front())
        throw Error(Errc::overlapping_balls, "balls around the atoms overlap at the largest radius");
    }
  }
  const int mass = mu.total_variation();
  const double reach = eps * std::sqrt(2.0);

  RenormalizedEstimate out;
  out.sigmas = sigmas;
  for (double sigma : sigmas) {
    CompensatedSum energy;
    for (int c = 0; c < dom.num_cells(); ++c) {
      if (v.is_jump_cell(c)) continue;
      const auto [tlo, tup] = cell_triangles(dom, c);
      const Point center = dom.cell_center(c);
      for (int half = 0; half < 2; ++half) {
        const Triangle& tri = half == 0 ? tlo : tup;
        const double density = 0.5 * (half == 0 ? v.lower(c) : v.upper(c)).gradient.squaredNorm();
        double area = tri.area();
        for (const Atom& atom : mu.atoms) {
          if ((atom.position - center).norm() > sigma + reach) continue;
          if (rule == BallExclusion::clip) {
            area -= triangle_disk_overlap(tri, atom.position, sigma);
          } else if (distance_to_triangle(tri, atom.position) < sigma) {
            area = 0.0;
            break;
          }
        }
        if (area > 0.0) energy.add(density * area);
      }
    }
    out.values.push_back(energy.value() - mass * kPi * std::abs(std::log(sigma)));
  }
  out.W = out.values.back();
  return out;
}

}  // namespace fracxy
