#pragma once

#include <utility>
#include <vector>

#include "fracxy/fields.hpp"

namespace fracxy {

/// The element of 2piZ nearest to t; on ties (up to a relative 1e-12) the
/// smaller one.
double project_P(double t);

/// Signed distance of dpsi(i,j) from 2piZ, oriented: dpsi - P(dpsi) when
/// i <= j componentwise, dpsi + P(-dpsi) otherwise. Exactly antisymmetric.
/// Throws Errc::not_neighbors unless i, j are nearest neighbours.
double elastic_diff(const ScalarField& psi, int i, int j);

/// Canonical-orientation version for a raw difference t = psi(j) - psi(i),
/// i <= j.
inline double elastic_diff_canonical(double t) { return t - project_P(t); }

/// Discrete vorticity of cell c, in {-1, 0, 1}.
int cell_vorticity(const ScalarField& psi, int cell);

/// pi * sum d_k delta_{x_k} with nonzero integer d_k.
struct Atom {
  Point position = Point::Zero();
  int degree = 0;
};

struct VorticityMeasure {
  std::vector<Atom> atoms;
  Shape shape;  // continuum domain, for boundary distances

  int total_variation() const;  // sum |d_k|
  VorticityMeasure negated() const;
};

/// Atoms at the centres of cells with nonzero vorticity.
VorticityMeasure vorticity_measure(const ScalarField& psi);

/// Both sides of the discrete Stokes identity on a region: the sum of
/// elastic differences around its boundary (counterclockwise) and
/// 2*pi times the total vorticity of its cells. The region must be
/// edge-connected and free of holes.
std::pair<double, double> stokes_check(const ScalarField& psi, const Region& region);

/// Minimal connection mass times pi: each unit of |d| is a particle matched
/// either to an opposite particle (Euclidean distance) or to the boundary
/// (distance to the boundary curve). Solved exactly.
double flat_norm(const VorticityMeasure& mu);

/// Lipschitz-dual oracle on a grid x grid lattice over the bounding box: the
/// sup of sum d_k eta(x_k) over grid functions vanishing on the boundary
/// nodes and 1-Lipschitz along a fixed stencil of grid directions. At most 6
/// atoms and grid <= 64.
double flat_norm_lp_oracle(const VorticityMeasure& mu, int grid);

/// flat_norm(mu1 - mu2).
double flat_distance(const VorticityMeasure& mu1, const VorticityMeasure& mu2);

/// Minimum-cost perfect assignment on a square cost matrix (row -> column).
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Maximise c.x subject to A x <= b, x >= 0, with b >= 0 (so x = 0 is
/// feasible). Dense tableau simplex with Bland's rule; throws if unbounded.
double simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                        Eigen::VectorXd* solution = nullptr);

}  // namespace fracxy
