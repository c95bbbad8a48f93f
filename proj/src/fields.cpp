#include "fracxy/fields.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace fracxy {

ScalarField::ScalarField(DomainPtr d, Eigen::VectorXd v) : domain(std::move(d)), values(std::move(v)) {
  if (!domain) throw Error(Errc::construction, "scalar field needs a domain");
  if (values.size() != domain->num_sites())
    throw Error(Errc::construction, "scalar field size does not match the site count");
  if (!values.allFinite()) throw Error(Errc::construction, "scalar field has non-finite values");
}

ScalarField::ScalarField(DomainPtr d) : domain(std::move(d)) {
  if (!domain) throw Error(Errc::construction, "scalar field needs a domain");
  values = Eigen::VectorXd::Zero(domain->num_sites());
}

SpinField::SpinField(DomainPtr d, Eigen::Matrix2Xd v) : domain(std::move(d)), values(std::move(v)) {
  if (!domain) throw Error(Errc::construction, "spin field needs a domain");
  if (values.cols() != domain->num_sites())
    throw Error(Errc::construction, "spin field size does not match the site count");
  for (Eigen::Index s = 0; s < values.cols(); ++s) {
    if (std::abs(values.col(s).norm() - 1.0) > 1e-12)
      throw Error(Errc::construction, "spin field values must be unit vectors");
  }
}

SpinField exp_map(const ScalarField& phi, int multiplier) {
  Eigen::Matrix2Xd w(2, phi.size());
  for (int s = 0; s < phi.size(); ++s) {
    const double a = multiplier * phi.values[s];
    w(0, s) = std::cos(a);
    w(1, s) = std::sin(a);
  }
  return SpinField(phi.domain, std::move(w));
}

namespace {

// Gradient columns on T- are dw(i,i+e1)/eps and dw(i+e1,i+e1+e2)/eps; on T+
// they are dw(i+e2,i+e1+e2)/eps and dw(i,i+e2)/eps.
std::pair<AffinePiece, AffinePiece> affine_pieces(const Eigen::Matrix2Xd& w,
                                                  const std::array<int, 4>& cs, double eps) {
  const Eigen::Vector2d w00 = w.col(cs[0]), w10 = w.col(cs[1]), w11 = w.col(cs[2]),
                        w01 = w.col(cs[3]);
  AffinePiece lower, upper;
  lower.anchor = w00;
  lower.gradient.col(0) = (w10 - w00) / eps;
  lower.gradient.col(1) = (w11 - w10) / eps;
  upper.anchor = w00;
  upper.gradient.col(0) = (w11 - w01) / eps;
  upper.gradient.col(1) = (w01 - w00) / eps;
  return {lower, upper};
}

}  // namespace

InterpolatedField interpolate_affine(const SpinField& w) {
  const LatticeDomain& dom = w.lattice();
  InterpolatedField out;
  out.domain = w.domain;
  out.mode = InterpolationMode::affine;
  out.pieces.resize(2 * static_cast<std::size_t>(dom.num_cells()));
  for (int c = 0; c < dom.num_cells(); ++c) {
    auto [lo, up] = affine_pieces(w.values, dom.cell_sites(c), dom.epsilon());
    out.pieces[2 * c] = lo;
    out.pieces[2 * c + 1] = up;
  }
  return out;
}

InterpolatedField interpolate_u_hat(const ScalarField& phi, int n) {
  const SpinField u = exp_map(phi, 1);
  InterpolatedField out = interpolate_affine(u);
  out.mode = InterpolationMode::jump_constant;
  out.jump_cells = jump_pairs(phi, n).jump_cells;
  const LatticeDomain& dom = phi.lattice();
  for (int c = 0; c < dom.num_cells(); ++c) {
    if (!out.jump_cells[c]) continue;
    AffinePiece flat;
    flat.anchor = u.values.col(dom.cell_sites(c)[0]);
    out.pieces[2 * c] = flat;
    out.pieces[2 * c + 1] = flat;
  }
  return out;
}

Eigen::Vector2d InterpolatedField::value(const Point& x) const {
  const double eps = domain->epsilon();
  const GridIndex k(static_cast<int>(std::floor(x.x() / eps)), static_cast<int>(std::floor(x.y() / eps)));
  int c = domain->cell_at(k);
  Point local = x / eps - k.cast<double>();
  if (c < 0) {
    // points on the upper/right edge of the union of cells
    for (const GridIndex& d : {GridIndex(-1, 0), GridIndex(0, -1), GridIndex(-1, -1)}) {
      const GridIndex kk = k + d;
      const int cc = domain->cell_at(kk);
      const Point ll = x / eps - kk.cast<double>();
      if (cc >= 0 && ll.minCoeff() >= -1e-12 && ll.maxCoeff() <= 1.0 + 1e-12) {
        c = cc;
        local = ll;
        break;
      }
    }
    if (c < 0) return Eigen::Vector2d::Zero();
  }
  const AffinePiece& piece = local.y() <= local.x() ? lower(c) : upper(c);
  return piece.anchor + piece.gradient * (local * eps);
}

double dirichlet_energy(const InterpolatedField& interp, const Region& region) {
  const LatticeDomain& dom = *interp.domain;
  const double tri_area = 0.5 * dom.epsilon() * dom.epsilon();
  double sum = 0.0, comp = 0.0;  // Neumaier summation
  auto add = [&](double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  for (int c = 0; c < dom.num_cells(); ++c) {
    if (!region.has_cell(c) || interp.is_jump_cell(c)) continue;
    add(0.5 * tri_area * interp.lower(c).gradient.squaredNorm());
    add(0.5 * tri_area * interp.upper(c).gradient.squaredNorm());
  }
  return sum + comp;
}

double dirichlet_energy(const InterpolatedField& interp) {
  return dirichlet_energy(interp, whole_region(*interp.domain));
}

double distance_to_2pi_lattice(double t) {
  return std::abs(std::remainder(t, 2.0 * std::numbers::pi));
}

StringSet jump_pairs(const ScalarField& phi, int n) {
  if (n < 1) throw Error(Errc::construction, "well count n must be at least 1");
  const LatticeDomain& dom = phi.lattice();
  const double eps = dom.epsilon();
  const double threshold = std::numbers::pi / n;
  StringSet out;
  out.domain = phi.domain;
  out.n = n;
  std::vector<char> is_jump(dom.num_bonds(), 0);
  for (int b = 0; b < dom.num_bonds(); ++b) {
    const Bond& bond = dom.bond(b);
    if (distance_to_2pi_lattice(phi[bond.b] - phi[bond.a]) <= threshold) continue;
    is_jump[b] = 1;
    out.jump_bonds.push_back(b);
    // The dual edge joins the centres of the two cells sharing the bond.
    const Point mid = 0.5 * (dom.position(bond.a) + dom.position(bond.b));
    const Point half = bond.axis == Axis::horizontal ? Point(0.0, 0.5 * eps) : Point(0.5 * eps, 0.0);
    out.dual_segments.emplace_back(mid - half, mid + half);
  }
  out.length_1norm = eps * static_cast<double>(out.jump_bonds.size());
  out.jump_cells.assign(dom.num_cells(), 0);
  for (int c = 0; c < dom.num_cells(); ++c) {
    for (int b : dom.cell_bonds(c)) out.jump_cells[c] |= is_jump[b];
  }
  return out;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  std::vector<int> parent;
};

}  // namespace

StringSummary extract_strings(const StringSet& strings) {
  StringSummary out;
  out.length_1norm = strings.length_1norm;
  if (strings.jump_bonds.empty()) return out;
  const LatticeDomain& dom = *strings.domain;

  // Dual vertices are cell centres, keyed by the cell's lower-left index;
  // they may lie outside the domain for boundary bonds.
  std::map<std::pair<int, int>, int> vertex_id;
  std::vector<GridIndex> vertices;
  auto vertex = [&](const GridIndex& k) {
    auto [it, inserted] = vertex_id.try_emplace({k.x(), k.y()}, static_cast<int>(vertices.size()));
    if (inserted) vertices.push_back(k);
    return it->second;
  };
  std::vector<std::pair<int, int>> edges;
  for (int b : strings.jump_bonds) {
    const Bond& bond = dom.bond(b);
    const GridIndex& k = dom.site(bond.a);
    if (bond.axis == Axis::horizontal)
      edges.emplace_back(vertex(GridIndex(k.x(), k.y() - 1)), vertex(k));
    else
      edges.emplace_back(vertex(GridIndex(k.x() - 1, k.y())), vertex(k));
  }
  DisjointSets sets(static_cast<int>(vertices.size()));
  std::vector<int> degree(vertices.size(), 0);
  for (auto [u, v] : edges) {
    sets.unite(u, v);
    ++degree[u];
    ++degree[v];
  }
  std::map<int, int> component_of_root;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int root = sets.find(edges[e].first);
    auto [it, inserted] = component_of_root.try_emplace(root, static_cast<int>(out.components.size()));
    if (inserted) out.components.emplace_back();
    ++out.components[it->second].n_bonds;
  }
  const double eps = dom.epsilon();
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (degree[v] % 2 == 0) continue;
    const int comp = component_of_root.at(sets.find(static_cast<int>(v)));
    out.components[comp].endpoints.push_back(eps * (vertices[v].cast<double>() + Point(0.5, 0.5)));
  }
  out.n_components = static_cast<int>(out.components.size());
  return out;
}

void write_field_csv(std::ostream& out, const ScalarField& phi) {
  const LatticeDomain& dom = phi.lattice();
  out << "ix,iy,x,y,phi\n";
  out << std::setprecision(17);
  for (int s = 0; s < dom.num_sites(); ++s) {
    const GridIndex& k = dom.site(s);
    const Point p = dom.position(s);
    out << k.x() << ',' << k.y() << ',' << p.x() << ',' << p.y() << ',' << phi[s] << '\n';
  }
}

std::vector<FieldRow> read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ix,iy,x,y,phi", 0) != 0)
    throw Error(Errc::config, "field dump must start with header ix,iy,x,y,phi");
  std::vector<FieldRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    FieldRow r;
    char c1, c2, c3, c4;
    if (!(ss >> r.ix >> c1 >> r.iy >> c2 >> r.x >> c3 >> r.y >> c4 >> r.phi) || c1 != ',' ||
        c2 != ',' || c3 != ',' || c4 != ',')
      throw Error(Errc::config, "malformed field dump row: " + line);
    rows.push_back(r);
  }
  return rows;
}

ScalarField field_from_rows(DomainPtr domain, const std::vector<FieldRow>& rows) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(domain->num_sites(), std::numeric_limits<double>::quiet_NaN());
  for (const FieldRow& r : rows) {
    const int s = domain->site_at(GridIndex(r.ix, r.iy));
    if (s >= 0) v[s] = r.phi;
  }
  if (!v.allFinite()) throw Error(Errc::config, "field dump does not cover every site of the domain");
  return ScalarField(std::move(domain), std::move(v));
}

}  // namespace fracxy
