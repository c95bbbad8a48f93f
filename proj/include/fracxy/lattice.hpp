#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracxy/error.hpp"

namespace fracxy {

using Point = Eigen::Vector2d;
using GridIndex = Eigen::Vector2i;

// Continuum domains. Both are convex, which the flat-norm solver relies on.
struct Rectangle {
  Point origin = Point::Zero();
  Point size = Point::Ones();
};

struct Disk {
  Point center = Point::Zero();
  double radius = 1.0;
};

using Shape = std::variant<Rectangle, Disk>;

/// Closed-set membership with an absolute tolerance.
bool contains(const Shape& shape, const Point& p, double tol = 0.0);
/// Euclidean distance from p to the boundary curve (p assumed inside).
double distance_to_boundary(const Shape& shape, const Point& p);
double diameter(const Shape& shape);
/// Lower-left and upper-right corners of the axis-aligned bounding box.
std::pair<Point, Point> bounding_box(const Shape& shape);
/// Short stable textual id, e.g. "disk(0,0;1)".
std::string shape_id(const Shape& shape);

enum class Axis : unsigned char { horizontal, vertical };

/// Unordered nearest-neighbour bond stored with the lexicographically smaller
/// site first; for an axis bond that endpoint is also componentwise smaller.
struct Bond {
  int a = -1;
  int b = -1;
  Axis axis = Axis::horizontal;
};

struct Triangle {
  std::array<Point, 3> vertices;

  double area() const;
};

/// The masked lattice: sites, bonds and cells of eps*Z^2 inside a shape.
///
/// Cells are the squares i + eps*Q contained in the closed shape; sites are
/// their corners and bonds their edges, so every bond segment lies inside the
/// union of cells. Indices are integer grid coordinates (k1, k2) standing for
/// the point (k1*eps, k2*eps). All enumerations are lexicographic in (k1, k2).
class LatticeDomain {
 public:
  LatticeDomain(const Shape& shape, double epsilon);

  double epsilon() const { return epsilon_; }
  const Shape& shape() const { return shape_; }

  int num_sites() const { return static_cast<int>(sites_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const std::vector<GridIndex>& sites() const { return sites_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::vector<GridIndex>& cells() const { return cells_; }

  const GridIndex& site(int s) const { return sites_.at(s); }
  const GridIndex& cell(int c) const { return cells_.at(c); }
  const Bond& bond(int b) const { return bonds_.at(b); }

  Point position(int s) const { return epsilon_ * sites_[s].cast<double>(); }
  Point position(const GridIndex& k) const { return epsilon_ * k.cast<double>(); }
  Point cell_center(int c) const {
    return epsilon_ * (cells_[c].cast<double>() + Point(0.5, 0.5));
  }

  /// -1 when the grid point is not a site / cell of the domain.
  int site_at(const GridIndex& k) const;
  int cell_at(const GridIndex& k) const;
  /// Bond index joining two sites, -1 if they are not joined by a domain bond.
  int bond_between(int s, int t) const;
  /// Bond leaving site s towards +e1 (horizontal) or +e2 (vertical), or -1.
  int bond_from(int s, Axis axis) const {
    return axis == Axis::horizontal ? right_bond_[s] : up_bond_[s];
  }

  /// Corner sites counterclockwise from the lower-left: i, i+e1, i+e1+e2, i+e2.
  const std::array<int, 4>& cell_sites(int c) const { return cell_sites_.at(c); }
  /// Edge bonds: bottom, right, top, left.
  const std::array<int, 4>& cell_bonds(int c) const { return cell_bonds_.at(c); }

  bool is_boundary(int s) const { return boundary_[s] != 0; }
  const std::vector<char>& boundary_mask() const { return boundary_; }
  int num_boundary_sites() const;

  /// Number of domain bonds incident to s.
  int degree(int s) const { return degree_[s]; }

 private:
  int lookup(const std::vector<int>& table, const GridIndex& k) const;

  double epsilon_;
  Shape shape_;
  GridIndex lo_;  // lower-left grid index of the lookup window
  int width_ = 0;
  int height_ = 0;
  std::vector<int> site_table_;
  std::vector<int> cell_table_;
  std::vector<GridIndex> sites_;
  std::vector<GridIndex> cells_;
  std::vector<Bond> bonds_;
  std::vector<int> right_bond_;
  std::vector<int> up_bond_;
  std::vector<std::array<int, 4>> cell_sites_;
  std::vector<std::array<int, 4>> cell_bonds_;
  std::vector<char> boundary_;
  std::vector<int> degree_;
};

using DomainPtr = std::shared_ptr<const LatticeDomain>;

DomainPtr build_domain(const Shape& shape, double epsilon);

/// The two triangles T-, T+ of cell c (lower-right and upper-left halves).
std::pair<Triangle, Triangle> cell_triangles(const LatticeDomain& domain, int cell);

/// A subregion D of the domain in the discrete sense D_eps: the cells of the
/// domain contained in a closed shape, with their edges and corners.
struct Region {
  std::vector<char> cells;
  std::vector<char> bonds;
  std::vector<char> sites;

  bool has_cell(int c) const { return cells[c] != 0; }
  bool has_bond(int b) const { return bonds[b] != 0; }
  bool has_site(int s) const { return sites[s] != 0; }
};

Region whole_region(const LatticeDomain& domain);
Region make_region(const LatticeDomain& domain, const Shape& shape);
Region region_from_cells(const LatticeDomain& domain, std::vector<char> cell_mask);

}  // namespace fracxy
