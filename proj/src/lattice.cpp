#include "fracxy/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fracxy {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::construction: return "construction";
    case Errc::empty_domain: return "empty_domain";
    case Errc::invalid_index: return "invalid_index";
    case Errc::not_neighbors: return "not_neighbors";
    case Errc::invalid_region: return "invalid_region";
    case Errc::unsupported: return "unsupported";
    case Errc::resource: return "resource";
    case Errc::invalid_prescription: return "invalid_prescription";
    case Errc::insufficient_data: return "insufficient_data";
    case Errc::overlapping_balls: return "overlapping_balls";
    case Errc::config: return "config";
  }
  return "unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double min_extent(const Shape& shape) {
  return std::visit(overloaded{
                        [](const Rectangle& r) { return r.size.minCoeff(); },
                        [](const Disk& d) { return 2.0 * d.radius; },
                    },
                    shape);
}

void validate_shape(const Shape& shape) {
  std::visit(overloaded{
                 [](const Rectangle& r) {
                   if (!r.origin.allFinite() || !r.size.allFinite() || !(r.size.minCoeff() > 0.0))
                     throw Error(Errc::construction, "rectangle must have positive finite extents");
                 },
                 [](const Disk& d) {
                   if (!d.center.allFinite() || !std::isfinite(d.radius) || !(d.radius > 0.0))
                     throw Error(Errc::construction, "disk must have a positive finite radius");
                 },
             },
             shape);
}

}  // namespace

bool contains(const Shape& shape, const Point& p, double tol) {
  return std::visit(overloaded{
                        [&](const Rectangle& r) {
                          const Point hi = r.origin + r.size;
                          return p.x() >= r.origin.x() - tol && p.x() <= hi.x() + tol &&
                                 p.y() >= r.origin.y() - tol && p.y() <= hi.y() + tol;
                        },
                        [&](const Disk& d) { return (p - d.center).norm() <= d.radius + tol; },
                    },
                    shape);
}

double distance_to_boundary(const Shape& shape, const Point& p) {
  return std::visit(overloaded{
                        [&](const Rectangle& r) {
                          const Point hi = r.origin + r.size;
                          return std::min({p.x() - r.origin.x(), hi.x() - p.x(),
                                           p.y() - r.origin.y(), hi.y() - p.y()});
                        },
                        [&](const Disk& d) { return d.radius - (p - d.center).norm(); },
                    },
                    shape);
}

double diameter(const Shape& shape) {
  return std::visit(overloaded{
                        [](const Rectangle& r) { return r.size.norm(); },
                        [](const Disk& d) { return 2.0 * d.radius; },
                    },
                    shape);
}

std::pair<Point, Point> bounding_box(const Shape& shape) {
  return std::visit(
      overloaded{
          [](const Rectangle& r) { return std::make_pair(r.origin, Point(r.origin + r.size)); },
          [](const Disk& d) {
            const Point h(d.radius, d.radius);
            return std::make_pair(Point(d.center - h), Point(d.center + h));
          },
      },
      shape);
}

std::string shape_id(const Shape& shape) {
  char buf[160];
  std::visit(overloaded{
                 [&](const Rectangle& r) {
                   std::snprintf(buf, sizeof buf, "rectangle(%g,%g;%g,%g)", r.origin.x(),
                                 r.origin.y(), r.size.x(), r.size.y());
                 },
                 [&](const Disk& d) {
                   std::snprintf(buf, sizeof buf, "disk(%g,%g;%g)", d.center.x(), d.center.y(),
                                 d.radius);
                 },
             },
             shape);
  return buf;
}

double Triangle::area() const {
  const Point u = vertices[1] - vertices[0];
  const Point v = vertices[2] - vertices[0];
  return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

LatticeDomain::LatticeDomain(const Shape& shape, double epsilon) : epsilon_(epsilon), shape_(shape) {
  validate_shape(shape);
  if (!std::isfinite(epsilon) || !(epsilon > 0.0))
    throw Error(Errc::construction, "lattice spacing must be positive");
  if (epsilon >= min_extent(shape))
    throw Error(Errc::empty_domain, "lattice spacing is not smaller than the domain extent");

  const auto [blo, bhi] = bounding_box(shape);
  lo_ = GridIndex(static_cast<int>(std::floor(blo.x() / epsilon)) - 1,
                  static_cast<int>(std::floor(blo.y() / epsilon)) - 1);
  const GridIndex hi(static_cast<int>(std::ceil(bhi.x() / epsilon)) + 1,
                     static_cast<int>(std::ceil(bhi.y() / epsilon)) + 1);
  width_ = hi.x() - lo_.x() + 1;
  height_ = hi.y() - lo_.y() + 1;
  cell_table_.assign(static_cast<std::size_t>(width_) * height_, -1);
  site_table_.assign(static_cast<std::size_t>(width_) * height_, -1);

  // A cell is retained when its closed square lies in the closed shape. For a
  // convex shape it suffices to test the four corners.
  const double tol = 1e-9 * epsilon;
  std::vector<char> site_used(site_table_.size(), 0);
  auto slot = [&](int k1, int k2) {
    return static_cast<std::size_t>(k1 - lo_.x()) * height_ + (k2 - lo_.y());
  };
  for (int k1 = lo_.x(); k1 < hi.x(); ++k1) {
    for (int k2 = lo_.y(); k2 < hi.y(); ++k2) {
      bool inside = true;
      for (int c = 0; c < 4 && inside; ++c) {
        const Point p = epsilon * Point(k1 + (c & 1), k2 + (c >> 1));
        inside = contains(shape, p, tol);
      }
      if (!inside) continue;
      cell_table_[slot(k1, k2)] = static_cast<int>(cells_.size());
      cells_.emplace_back(k1, k2);
      for (int c = 0; c < 4; ++c) site_used[slot(k1 + (c & 1), k2 + (c >> 1))] = 1;
    }
  }
  if (cells_.empty()) throw Error(Errc::empty_domain, "no lattice cell fits inside the shape");

  // slot order is (k1, k2) lexicographic, so this enumeration is too
  for (int k1 = lo_.x(); k1 <= hi.x(); ++k1) {
    for (int k2 = lo_.y(); k2 <= hi.y(); ++k2) {
      if (!site_used[slot(k1, k2)]) continue;
      site_table_[slot(k1, k2)] = static_cast<int>(sites_.size());
      sites_.emplace_back(k1, k2);
    }
  }

  const int ns = num_sites();
  right_bond_.assign(ns, -1);
  up_bond_.assign(ns, -1);
  degree_.assign(ns, 0);
  // Bonds are cell edges; enumerate by the lower/left endpoint.
  for (int s = 0; s < ns; ++s) {
    const GridIndex& k = sites_[s];
    const bool right = cell_at(k) >= 0 || cell_at(GridIndex(k.x(), k.y() - 1)) >= 0;
    const bool up = cell_at(k) >= 0 || cell_at(GridIndex(k.x() - 1, k.y())) >= 0;
    if (right) {
      const int t = site_at(GridIndex(k.x() + 1, k.y()));
      right_bond_[s] = static_cast<int>(bonds_.size());
      bonds_.push_back({s, t, Axis::horizontal});
      ++degree_[s];
      ++degree_[t];
    }
    if (up) {
      const int t = site_at(GridIndex(k.x(), k.y() + 1));
      up_bond_[s] = static_cast<int>(bonds_.size());
      bonds_.push_back({s, t, Axis::vertical});
      ++degree_[s];
      ++degree_[t];
    }
  }

  cell_sites_.resize(cells_.size());
  cell_bonds_.resize(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    const GridIndex& k = cells_[c];
    const int s00 = site_at(k);
    const int s10 = site_at(GridIndex(k.x() + 1, k.y()));
    const int s11 = site_at(GridIndex(k.x() + 1, k.y() + 1));
    const int s01 = site_at(GridIndex(k.x(), k.y() + 1));
    cell_sites_[c] = {s00, s10, s11, s01};
    cell_bonds_[c] = {right_bond_[s00], up_bond_[s10], right_bond_[s01], up_bond_[s00]};
  }

  // A site is on the discrete boundary when one of its four surrounding cells
  // is missing, i.e. it lies on the boundary of the union of cells.
  boundary_.assign(ns, 0);
  for (int s = 0; s < ns; ++s) {
    const GridIndex& k = sites_[s];
    const bool interior = cell_at(k) >= 0 && cell_at(GridIndex(k.x() - 1, k.y())) >= 0 &&
                          cell_at(GridIndex(k.x(), k.y() - 1)) >= 0 &&
                          cell_at(GridIndex(k.x() - 1, k.y() - 1)) >= 0;
    boundary_[s] = interior ? 0 : 1;
  }
}

int LatticeDomain::lookup(const std::vector<int>& table, const GridIndex& k) const {
  const int x = k.x() - lo_.x();
  const int y = k.y() - lo_.y();
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return -1;
  return table[static_cast<std::size_t>(x) * height_ + y];
}

int LatticeDomain::site_at(const GridIndex& k) const { return lookup(site_table_, k); }
int LatticeDomain::cell_at(const GridIndex& k) const { return lookup(cell_table_, k); }

int LatticeDomain::bond_between(int s, int t) const {
  if (s < 0 || t < 0 || s >= num_sites() || t >= num_sites()) return -1;
  const GridIndex d = sites_[t] - sites_[s];
  if (d == GridIndex(1, 0)) return right_bond_[s];
  if (d == GridIndex(0, 1)) return up_bond_[s];
  if (d == GridIndex(-1, 0)) return right_bond_[t];
  if (d == GridIndex(0, -1)) return up_bond_[t];
  return -1;
}

int LatticeDomain::num_boundary_sites() const {
  return static_cast<int>(std::count(boundary_.begin(), boundary_.end(), 1));
}

DomainPtr build_domain(const Shape& shape, double epsilon) {
  return std::make_shared<const LatticeDomain>(shape, epsilon);
}

std::pair<Triangle, Triangle> cell_triangles(const LatticeDomain& domain, int cell) {
  if (cell < 0 || cell >= domain.num_cells())
    throw Error(Errc::invalid_index, "cell index out of range");
  const Point i = domain.position(domain.cell(cell));
  const double e = domain.epsilon();
  const Point e1(e, 0.0), e2(0.0, e);
  Triangle lower{{i, Point(i + e1), Point(i + e1 + e2)}};
  Triangle upper{{i, Point(i + e1 + e2), Point(i + e2)}};
  return {lower, upper};
}

Region region_from_cells(const LatticeDomain& domain, std::vector<char> cell_mask) {
  if (static_cast<int>(cell_mask.size()) != domain.num_cells())
    throw Error(Errc::invalid_region, "cell mask size does not match the domain");
  Region r;
  r.cells = std::move(cell_mask);
  r.bonds.assign(domain.num_bonds(), 0);
  r.sites.assign(domain.num_sites(), 0);
  for (int c = 0; c < domain.num_cells(); ++c) {
    if (!r.cells[c]) continue;
    for (int b : domain.cell_bonds(c)) r.bonds[b] = 1;
    for (int s : domain.cell_sites(c)) r.sites[s] = 1;
  }
  return r;
}

Region whole_region(const LatticeDomain& domain) {
  return region_from_cells(domain, std::vector<char>(domain.num_cells(), 1));
}

Region make_region(const LatticeDomain& domain, const Shape& shape) {
  validate_shape(shape);
  const double tol = 1e-9 * domain.epsilon();
  std::vector<char> mask(domain.num_cells(), 0);
  for (int c = 0; c < domain.num_cells(); ++c) {
    const auto& cs = domain.cell_sites(c);
    bool inside = true;
    for (int s : cs) inside = inside && contains(shape, domain.position(s), tol);
    mask[c] = inside ? 1 : 0;
  }
  return region_from_cells(domain, std::move(mask));
}

}  // namespace fracxy
