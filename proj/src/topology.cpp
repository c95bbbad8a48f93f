#include "fracxy/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>

namespace fracxy {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double project_P(double t) {
  const double lo = kTwoPi * std::floor(t / kTwoPi);
  const double hi = lo + kTwoPi;
  const double dlo = t - lo;
  const double dhi = hi - t;
  const double tol = 1e-12 * std::max(kTwoPi, std::abs(t));
  if (std::abs(dlo - dhi) <= tol) return lo;
  return dlo < dhi ? lo : hi;
}

double elastic_diff(const ScalarField& psi, int i, int j) {
  const LatticeDomain& dom = psi.lattice();
  if (i < 0 || j < 0 || i >= dom.num_sites() || j >= dom.num_sites())
    throw Error(Errc::invalid_index, "site index out of range");
  const GridIndex d = dom.site(j) - dom.site(i);
  if (d.cwiseAbs().sum() != 1) throw Error(Errc::not_neighbors, "sites are not nearest neighbours");
  if (d.minCoeff() >= 0) return elastic_diff_canonical(psi[j] - psi[i]);
  return -elastic_diff_canonical(psi[i] - psi[j]);
}

namespace {

// Counterclockwise elastic differences along the four edges of a cell:
// bottom, right, top, left.
std::array<double, 4> cell_edge_terms(const ScalarField& psi, const std::array<int, 4>& cs) {
  const double p00 = psi[cs[0]], p10 = psi[cs[1]], p11 = psi[cs[2]], p01 = psi[cs[3]];
  return {elastic_diff_canonical(p10 - p00), elastic_diff_canonical(p11 - p10),
          -elastic_diff_canonical(p11 - p01), -elastic_diff_canonical(p01 - p00)};
}

}  // namespace

int cell_vorticity(const ScalarField& psi, int cell) {
  const LatticeDomain& dom = psi.lattice();
  if (cell < 0 || cell >= dom.num_cells()) throw Error(Errc::invalid_index, "cell index out of range");
  const auto t = cell_edge_terms(psi, dom.cell_sites(cell));
  return static_cast<int>(std::lround((t[0] + t[1] + t[2] + t[3]) / kTwoPi));
}

int VorticityMeasure::total_variation() const {
  int s = 0;
  for (const Atom& a : atoms) s += std::abs(a.degree);
  return s;
}

VorticityMeasure VorticityMeasure::negated() const {
  VorticityMeasure out = *this;
  for (Atom& a : out.atoms) a.degree = -a.degree;
  return out;
}

VorticityMeasure vorticity_measure(const ScalarField& psi) {
  const LatticeDomain& dom = psi.lattice();
  VorticityMeasure mu;
  mu.shape = dom.shape();
  for (int c = 0; c < dom.num_cells(); ++c) {
    const int a = cell_vorticity(psi, c);
    if (a != 0) mu.atoms.push_back({dom.cell_center(c), a});
  }
  return mu;
}

namespace {

void require_simply_connected(const LatticeDomain& dom, const Region& region) {
  std::vector<int> members;
  for (int c = 0; c < dom.num_cells(); ++c)
    if (region.has_cell(c)) members.push_back(c);
  if (members.empty()) throw Error(Errc::invalid_region, "region contains no cells");

  std::vector<char> seen(dom.num_cells(), 0);
  std::deque<int> queue{members.front()};
  seen[members.front()] = 1;
  std::size_t reached = 0;
  const GridIndex steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    ++reached;
    for (const GridIndex& d : steps) {
      const int nb = dom.cell_at(dom.cell(c) + d);
      if (nb >= 0 && region.has_cell(nb) && !seen[nb]) {
        seen[nb] = 1;
        queue.push_back(nb);
      }
    }
  }
  if (reached != members.size()) throw Error(Errc::invalid_region, "region is not connected");

  std::set<int> sites, bonds;
  for (int c : members) {
    for (int s : dom.cell_sites(c)) sites.insert(s);
    for (int b : dom.cell_bonds(c)) bonds.insert(b);
  }
  const long euler = static_cast<long>(sites.size()) - static_cast<long>(bonds.size()) +
                     static_cast<long>(members.size());
  if (euler != 1) throw Error(Errc::invalid_region, "region has holes");
}

}  // namespace

std::pair<double, double> stokes_check(const ScalarField& psi, const Region& region) {
  const LatticeDomain& dom = psi.lattice();
  require_simply_connected(dom, region);
  const GridIndex across[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  double boundary = 0.0;
  long vorticity = 0;
  for (int c = 0; c < dom.num_cells(); ++c) {
    if (!region.has_cell(c)) continue;
    const auto t = cell_edge_terms(psi, dom.cell_sites(c));
    vorticity += std::lround((t[0] + t[1] + t[2] + t[3]) / kTwoPi);
    for (int e = 0; e < 4; ++e) {
      const int nb = dom.cell_at(dom.cell(c) + across[e]);
      if (nb < 0 || !region.has_cell(nb)) boundary += t[e];
    }
  }
  return {boundary, kTwoPi * static_cast<double>(vorticity)};
}

double flat_norm(const VorticityMeasure& mu) {
  std::vector<Point> pos, neg;
  for (const Atom& a : mu.atoms) {
    if (!contains(mu.shape, a.position, 1e-12))
      throw Error(Errc::construction, "atom lies outside the domain");
    for (int k = 0; k < std::abs(a.degree); ++k) (a.degree > 0 ? pos : neg).push_back(a.position);
  }
  if (pos.empty() && neg.empty()) return 0.0;

  // Rows: positives, then one boundary slot per negative. Columns: negatives,
  // then one boundary slot per positive.
  const int np = static_cast<int>(pos.size()), nn = static_cast<int>(neg.size());
  const int m = np + nn;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < np; ++r) {
    for (int c = 0; c < nn; ++c) cost(r, c) = (pos[r] - neg[c]).norm();
    for (int c = nn; c < m; ++c) cost(r, c) = distance_to_boundary(mu.shape, pos[r]);
  }
  for (int r = np; r < m; ++r) {
    for (int c = 0; c < nn; ++c) cost(r, c) = distance_to_boundary(mu.shape, neg[c]);
  }
  const std::vector<int> match = solve_assignment(cost);
  double total = 0.0;
  for (int r = 0; r < m; ++r) total += cost(r, match[r]);
  return std::numbers::pi * total;
}

double flat_distance(const VorticityMeasure& mu1, const VorticityMeasure& mu2) {
  VorticityMeasure diff = mu1;
  for (const Atom& a : mu2.atoms) diff.atoms.push_back({a.position, -a.degree});
  return flat_norm(diff);
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  // Shortest augmenting paths with row/column potentials (1-based arrays).
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(Errc::construction, "assignment cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                        Eigen::VectorXd* solution) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) throw Error(Errc::construction, "simplex dimension mismatch");
  if (m > 0 && b.minCoeff() < 0.0) throw Error(Errc::construction, "simplex needs b >= 0");
  constexpr double tol = 1e-12;

  // Tableau [A I | b] with objective row [-c 0 | 0].
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.topRightCorner(m, 1) = b;
  T.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<int> basis(m);
  std::iota(basis.begin(), basis.end(), n);

  for (int iter = 0; iter < 10000; ++iter) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (T(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) <= tol) continue;
      const double ratio = T(i, n + m) / T(i, enter);
      if (ratio < best - tol || (std::abs(ratio - best) <= tol && leave >= 0 && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw Error(Errc::unsupported, "linear program is unbounded");
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis[leave] = enter;
  }
  if (solution) {
    solution->setZero(n);
    for (int i = 0; i < m; ++i)
      if (basis[i] < n) (*solution)[basis[i]] = T(i, n + m);
  }
  return T(m, n + m);
}

double flat_norm_lp_oracle(const VorticityMeasure& mu, int grid) {
  if (mu.atoms.size() > 6) throw Error(Errc::resource, "LP oracle supports at most 6 atoms");
  if (grid > 64) throw Error(Errc::resource, "LP oracle supports grids up to 64x64");
  if (grid < 2) throw Error(Errc::construction, "LP oracle grid must be at least 2");
  if (mu.atoms.empty()) return 0.0;

  const auto [lo, hi] = bounding_box(mu.shape);
  const Point h = (hi - lo) / grid;
  const int side = grid + 1;
  auto node_pos = [&](int a, int b) { return Point(lo + Point(a * h.x(), b * h.y())); };
  const double tol = 1e-9 * h.minCoeff();
  std::vector<char> inside(side * side, 0), boundary(side * side, 0);
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) inside[a * side + b] = contains(mu.shape, node_pos(a, b), tol);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      if (!inside[a * side + b]) continue;
      bool edge = std::abs(distance_to_boundary(mu.shape, node_pos(a, b))) <= tol;
      for (auto [da, db] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int na = a + da, nb = b + db;
        if (na < 0 || nb < 0 || na >= side || nb >= side || !inside[na * side + nb]) edge = true;
      }
      boundary[a * side + b] = edge;
    }
  }

  // Snap atoms to the nearest interior node, merging coincident ones.
  std::vector<std::pair<int, int>> atoms;  // (node, degree)
  for (const Atom& atom : mu.atoms) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < side * side; ++k) {
      if (!inside[k]) continue;
      const double d = (node_pos(k / side, k % side) - atom.position).norm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    auto it = std::find_if(atoms.begin(), atoms.end(), [&](auto& p) { return p.first == best; });
    if (it == atoms.end())
      atoms.emplace_back(best, atom.degree);
    else
      it->second += atom.degree;
  }
  std::erase_if(atoms, [](auto& p) { return p.second == 0; });
  // atoms snapped onto a boundary node carry eta = 0
  std::erase_if(atoms, [&](auto& p) { return boundary[p.first] != 0; });
  if (atoms.empty()) return 0.0;

  // Lipschitz constraints along all primitive directions with |components| <= 4.
  std::vector<std::pair<int, int>> stencil;
  for (int p = -4; p <= 4; ++p)
    for (int q = -4; q <= 4; ++q)
      if ((p != 0 || q != 0) && std::gcd(std::abs(p), std::abs(q)) == 1) stencil.emplace_back(p, q);

  auto shortest_paths = [&](int source) {
    std::vector<double> dist(side * side, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      auto [d, k] = heap.top();
      heap.pop();
      if (d > dist[k]) continue;
      const int a = k / side, b = k % side;
      for (auto [p, q] : stencil) {
        const int na = a + p, nb = b + q;
        if (na < 0 || nb < 0 || na >= side || nb >= side || !inside[na * side + nb]) continue;
        const double nd = d + Point(p * h.x(), q * h.y()).norm();
        if (nd < dist[na * side + nb]) {
          dist[na * side + nb] = nd;
          heap.emplace(nd, na * side + nb);
        }
      }
    }
    return dist;
  };

  const int m = static_cast<int>(atoms.size());
  Eigen::MatrixXd D(m, m);
  Eigen::VectorXd to_boundary(m);
  for (int i = 0; i < m; ++i) {
    const auto dist = shortest_paths(atoms[i].first);
    for (int j = 0; j < m; ++j) D(i, j) = dist[atoms[j].first];
    double db = std::numeric_limits<double>::infinity();
    for (int k = 0; k < side * side; ++k)
      if (boundary[k]) db = std::min(db, dist[k]);
    to_boundary[i] = db;
  }

  // eta_i = x_i - to_boundary_i with x_i >= 0; the constraints become
  // x_i <= 2 to_boundary_i and x_i - x_j <= D_ij + tb_i - tb_j.
  const int rows = m + m * (m - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, m);
  Eigen::VectorXd rhs(rows), obj(m);
  int r = 0;
  for (int i = 0; i < m; ++i, ++r) {
    A(r, i) = 1.0;
    rhs[r] = 2.0 * to_boundary[i];
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      A(r, i) = 1.0;
      A(r, j) = -1.0;
      rhs[r] = std::max(0.0, D(i, j) + to_boundary[i] - to_boundary[j]);
      ++r;
    }
  }
  double offset = 0.0;
  for (int i = 0; i < m; ++i) {
    obj[i] = atoms[i].second;
    offset += atoms[i].second * to_boundary[i];
  }
  return std::numbers::pi * (simplex_maximize(A, rhs, obj) - offset);
}

}  // namespace fracxy
