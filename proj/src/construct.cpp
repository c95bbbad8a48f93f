#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "fracxy/solvers.hpp"

namespace fracxy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); }

// Winding number of a closed polygon around p (crossing rule).
int winding_number(const std::vector<Point>& poly, const Point& p) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    const double side = cross(b - a, p - a);
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && side > 0.0) ++wn;
    } else if (b.y() <= p.y() && side < 0.0) {
      --wn;
    }
  }
  return wn;
}

// A core's branch cut: a polyline from the core running off to a far point.
struct BranchCut {
  Point core;
  std::vector<Point> path;  // path.front() == core, path.back() far outside
};

// Closed polygon whose winding number is 1 exactly on the points swept when
// the standard cut (the +x ray from the core) is rotated onto the path.
std::vector<Point> sweep_polygon(const BranchCut& cut) {
  const Point far = cut.path.back();
  const double radius = (far - cut.core).norm();
  const double beta = polar_angle(far, cut.core);
  std::vector<Point> poly{cut.core, cut.core + Point(radius, 0.0)};
  const int steps = static_cast<int>(std::ceil(beta / kTwoPi * 720.0));
  // arc vertices pushed slightly outwards so chords stay outside the circle
  const double r_out = steps > 0 ? radius / std::cos(0.5 * beta / steps) : radius;
  for (int k = 1; k < steps; ++k) {
    const double a = beta * k / steps;
    poly.push_back(cut.core + r_out * Point(std::cos(a), std::sin(a)));
  }
  for (auto it = cut.path.rbegin(); it != cut.path.rend() - 1; ++it) poly.push_back(*it);
  return poly;
}

bool near(const Point& a, const Point& b, double tol) { return (a - b).norm() <= tol; }

}  // namespace

double polar_angle(const Point& p, const Point& center) {
  const Point d = p - center;
  if (d.x() == 0.0 && d.y() == 0.0) return 0.0;
  double a = std::atan2(d.y(), d.x());
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

ScalarField construct_field(DomainPtr domain, const VortexPrescription& pr) {
  const LatticeDomain& dom = *domain;
  const Shape& shape = dom.shape();
  const double eps = dom.epsilon();
  const double diam = diameter(shape);
  const double tol = 1e-9 * (1.0 + diam);
  if (pr.n < 1) throw Error(Errc::invalid_prescription, "well count n must be at least 1");

  const int nc = static_cast<int>(pr.cores.size());
  for (int k = 0; k < nc; ++k) {
    const Core& c = pr.cores[k];
    if (c.degree != 1 && c.degree != -1)
      throw Error(Errc::invalid_prescription, "core degrees must be +1 or -1 (in units of 1/n)");
    if (!contains(shape, c.position) || distance_to_boundary(shape, c.position) < 2.0 * eps - tol)
      throw Error(Errc::invalid_prescription, "cores must lie at least 2 eps inside the domain");
    for (int l = 0; l < k; ++l) {
      if ((c.position - pr.cores[l].position).norm() < 2.0 * eps - tol)
        throw Error(Errc::invalid_prescription, "cores must be at least 2 eps apart");
    }
  }
  auto core_at = [&](const Point& p) {
    for (int k = 0; k < nc; ++k)
      if (near(p, pr.cores[k].position, tol)) return k;
    return -1;
  };

  const double far_reach = 4.0 * (diam + 1.0);
  auto extend = [&](std::vector<Point>& path, const Point& dir) {
    path.push_back(path.back() + far_reach * dir.normalized());
  };

  std::vector<std::optional<BranchCut>> cuts(nc);
  for (const StringPath& sp : pr.strings) {
    if (sp.points.size() < 2) throw Error(Errc::invalid_prescription, "a string needs at least two points");
    std::vector<Point> pts = sp.points;
    int start = core_at(pts.front());
    int end = core_at(pts.back());
    if (start < 0 && end >= 0) {
      std::reverse(pts.begin(), pts.end());
      std::swap(start, end);
    }
    if (start < 0) throw Error(Errc::invalid_prescription, "a string must start at a core");
    if (end < 0 && std::abs(distance_to_boundary(shape, pts.back())) > tol)
      throw Error(Errc::invalid_prescription, "string endpoint is neither a core nor a boundary point");
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (near(pts[i], pts[i - 1], tol)) throw Error(Errc::invalid_prescription, "string has a zero-length segment");
    }
    const Point dir = pts.back() - pts[pts.size() - 2];
    if (cuts[start]) throw Error(Errc::invalid_prescription, "a core is the endpoint of more than one string");
    if (end >= 0) {
      if (cuts[end]) throw Error(Errc::invalid_prescription, "a core is the endpoint of more than one string");
      // Both cuts continue past the far core; there the jumps must cancel mod 2pi.
      if ((pr.cores[start].degree + pr.cores[end].degree) % pr.n != 0)
        throw Error(Errc::invalid_prescription, "string between these cores would continue to the boundary");
      std::vector<Point> tail{pts.back()};
      extend(tail, dir);
      cuts[end] = BranchCut{pts.back(), tail};
    }
    extend(pts, dir);
    cuts[start] = BranchCut{pts.front(), pts};
  }
  for (int k = 0; k < nc; ++k) {
    if (cuts[k]) continue;
    if (pr.n >= 2) throw Error(Errc::invalid_prescription, "every fractional core needs a string");
    std::vector<Point> path{pr.cores[k].position};
    extend(path, Point(1.0, 0.0));
    cuts[k] = BranchCut{pr.cores[k].position, path};
  }

  std::vector<std::vector<Point>> polygons;
  for (const auto& cut : cuts) polygons.push_back(sweep_polygon(*cut));

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(dom.num_sites());
  for (int s = 0; s < dom.num_sites(); ++s) {
    const Point x = dom.position(s);
    double smooth = 0.0;
    long crossings = 0;
    for (int k = 0; k < nc; ++k) {
      smooth += pr.cores[k].degree * polar_angle(x, pr.cores[k].position);
      crossings += pr.cores[k].degree * winding_number(polygons[k], x);
    }
    phi[s] = (smooth + kTwoPi * static_cast<double>(crossings)) / pr.n;
  }
  return ScalarField(std::move(domain), std::move(phi));
}

void impose_angle_data(ScalarField& phi, const std::vector<char>& mask, const Point& center, int degree, int n,
                       bool match_mod_2pi) {
  const LatticeDomain& dom = phi.lattice();
  const double period = match_mod_2pi ? kTwoPi : kTwoPi / n;
  for (int s = 0; s < dom.num_sites(); ++s) {
    if (!mask[s]) continue;
    const double target = degree * polar_angle(dom.position(s), center) / n;
    phi.values[s] = target + period * std::round((phi.values[s] - target) / period);
  }
}

}  // namespace fracxy
