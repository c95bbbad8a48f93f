#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <utility>
#include <vector>

#include "fracxy/lattice.hpp"

namespace fracxy {

/// A real phase per site.
struct ScalarField {
  ScalarField() = default;
  ScalarField(DomainPtr domain, Eigen::VectorXd values);
  /// Zero field on the domain.
  explicit ScalarField(DomainPtr domain);

  const LatticeDomain& lattice() const { return *domain; }
  int size() const { return static_cast<int>(values.size()); }
  double operator[](int s) const { return values[s]; }

  DomainPtr domain;
  Eigen::VectorXd values;
};

/// A unit vector per site, stored column-wise.
struct SpinField {
  SpinField() = default;
  SpinField(DomainPtr domain, Eigen::Matrix2Xd values);

  const LatticeDomain& lattice() const { return *domain; }
  Eigen::Vector2d operator[](int s) const { return values.col(s); }

  DomainPtr domain;
  Eigen::Matrix2Xd values;
};

/// Site-wise (cos m*phi, sin m*phi).
SpinField exp_map(const ScalarField& phi, int multiplier = 1);

enum class InterpolationMode { affine, jump_constant };

/// Affine piece on one triangle: value(x) = anchor + gradient * (x - i), with
/// i the lower-left corner of the owning cell.
struct AffinePiece {
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
  Eigen::Matrix2d gradient = Eigen::Matrix2d::Zero();
};

/// Piecewise affine extension of a spin field to the union of cells. Pieces
/// are stored per cell as [T-, T+]; jump cells (jump_constant mode only) hold
/// a constant piece.
struct InterpolatedField {
  DomainPtr domain;
  InterpolationMode mode = InterpolationMode::affine;
  std::vector<AffinePiece> pieces;  // 2 * num_cells
  std::vector<char> jump_cells;     // empty in affine mode

  const AffinePiece& lower(int cell) const { return pieces[2 * cell]; }
  const AffinePiece& upper(int cell) const { return pieces[2 * cell + 1]; }
  bool is_jump_cell(int cell) const { return !jump_cells.empty() && jump_cells[cell] != 0; }

  /// Value at x; zero outside the union of cells.
  Eigen::Vector2d value(const Point& x) const;
};

InterpolatedField interpolate_affine(const SpinField& w);
/// The jump-aware interpolation of u = e^{i phi}: constant u(i) on each jump
/// cell i + eps*Q, affine elsewhere.
InterpolatedField interpolate_u_hat(const ScalarField& phi, int n);

/// 1/2 int |grad|^2 over the region's cells, skipping jump cells. Exact, the
/// gradient being constant per triangle.
double dirichlet_energy(const InterpolatedField& interp, const Region& region);
double dirichlet_energy(const InterpolatedField& interp);

/// Periodic distance to 2piZ.
double distance_to_2pi_lattice(double t);

/// Jump pairs: bonds with dist(dphi, 2piZ) > pi/n, and the dual structure.
struct StringSet {
  DomainPtr domain;
  int n = 1;
  std::vector<int> jump_bonds;
  /// Dual edge crossing each jump bond (same order as jump_bonds).
  std::vector<std::pair<Point, Point>> dual_segments;
  std::vector<char> jump_cells;
  double length_1norm = 0.0;
};

StringSet jump_pairs(const ScalarField& phi, int n);

struct StringComponent {
  std::vector<Point> endpoints;  // dual vertices of odd degree
  int n_bonds = 0;
};

struct StringSummary {
  double length_1norm = 0.0;
  int n_components = 0;
  std::vector<StringComponent> components;
};

/// Groups the dual segments into connected polylines.
StringSummary extract_strings(const StringSet& strings);

/// Field dump rows: integer grid index, position, phase.
struct FieldRow {
  int ix = 0;
  int iy = 0;
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

void write_field_csv(std::ostream& out, const ScalarField& phi);
std::vector<FieldRow> read_field_csv(std::istream& in);
/// Rebuilds a field on a domain; every domain site must appear in rows.
ScalarField field_from_rows(DomainPtr domain, const std::vector<FieldRow>& rows);

}  // namespace fracxy
