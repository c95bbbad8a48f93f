#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracxy/checks.hpp"
#include "fracxy/solvers.hpp"

using namespace fracxy;
using std::numbers::pi;

namespace {

const Rectangle kUnit{Point::Zero(), Point(1.0, 1.0)};

ScalarField angle_field(const DomainPtr& dom, const Point& center, double sign = 1.0) {
  ScalarField psi(dom);
  for (int s = 0; s < dom->num_sites(); ++s) psi.values[s] = sign * polar_angle(dom->position(s), center);
  return psi;
}

}  // namespace

TEST_CASE("projection onto 2pi Z") {
  CHECK(project_P(0.0) == 0.0);
  CHECK(project_P(pi) == 0.0);
  CHECK(project_P(-pi) == -2 * pi);
  CHECK(project_P(3.5) == 2 * pi);
  CHECK(project_P(3 * pi) == 2 * pi);
}

TEST_CASE("elastic differences") {
  const DomainPtr dom = build_domain(kUnit, 0.5);
  ScalarField psi(dom);
  const int i = dom->site_at(GridIndex(0, 0));
  const int j = dom->site_at(GridIndex(1, 0));
  psi.values[j] = 0.3;
  CHECK(elastic_diff(psi, i, j) == doctest::Approx(0.3));
  psi.values[j] = 1.5 * pi;
  CHECK(elastic_diff(psi, i, j) == doctest::Approx(-pi / 2));
  CHECK(elastic_diff(psi, j, i) == doctest::Approx(pi / 2));
  try {
    elastic_diff(psi, i, dom->site_at(GridIndex(1, 1)));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_neighbors);
  }
}

TEST_CASE("cell vorticity of an angle field") {
  const DomainPtr dom = build_domain(Rectangle{Point(-1.0, -1.0), Point(2.0, 2.0)}, 0.5);
  const Point center(0.25, 0.25);
  const int c = dom->cell_at(GridIndex(0, 0));
  CHECK(cell_vorticity(angle_field(dom, center), c) == 1);
  CHECK(cell_vorticity(angle_field(dom, center, -1.0), c) == -1);
  CHECK(cell_vorticity(ScalarField(dom), c) == 0);

  const VorticityMeasure mu = vorticity_measure(angle_field(dom, center));
  REQUIRE(mu.atoms.size() == 1);
  CHECK(mu.atoms[0].degree == 1);
  CHECK((mu.atoms[0].position - center).norm() < 1e-15);
  CHECK(mu.total_variation() == 1);
  CHECK(mu.negated().atoms[0].degree == -1);
  CHECK(vorticity_measure(ScalarField(dom)).atoms.empty());
}

TEST_CASE("stokes identity") {
  const DomainPtr dom = build_domain(kUnit, 1.0 / 16);
  const Point center(0.5 + 1.0 / 32, 0.5 + 1.0 / 32);
  const ScalarField psi = angle_field(dom, center);
  const auto [l0, r0] = stokes_check(ScalarField(dom), whole_region(*dom));
  CHECK(l0 == 0.0);
  CHECK(r0 == 0.0);
  const auto [l1, r1] = stokes_check(psi, whole_region(*dom));
  CHECK(l1 == doctest::Approx(2 * pi));
  CHECK(r1 == doctest::Approx(2 * pi));
  const auto [l2, r2] = stokes_check(psi, make_region(*dom, Rectangle{Point::Zero(), Point(0.25, 1.0)}));
  CHECK(std::abs(l2) < 1e-10);
  CHECK(r2 == 0.0);

  std::vector<char> ring(dom->num_cells(), 1);
  ring[dom->cell_at(GridIndex(8, 8))] = 0;
  CHECK_THROWS_AS(stokes_check(psi, region_from_cells(*dom, ring)), Error);
}

TEST_CASE("flat norm examples") {
  VorticityMeasure mu;
  mu.shape = kUnit;
  CHECK(flat_norm(mu) == 0.0);
  CHECK(flat_norm_lp_oracle(mu, 16) == 0.0);

  mu.atoms = {{Point(0.5, 0.5), 1}};
  CHECK(flat_norm(mu) == doctest::Approx(0.5 * pi));
  CHECK(std::abs(flat_norm_lp_oracle(mu, 32) - 0.5 * pi) <= pi * 2.0 * std::sqrt(2.0) / 32);

  mu.atoms = {{Point(0.4, 0.5), 1}, {Point(0.6, 0.5), -1}};
  CHECK(flat_norm(mu) == doctest::Approx(0.2 * pi));
  CHECK(std::abs(flat_norm_lp_oracle(mu, 40) - 0.2 * pi) <= pi * 2.0 * std::sqrt(2.0) / 40);

  // same-sign pair goes to the boundary twice
  mu.atoms = {{Point(0.4, 0.5), 1}, {Point(0.6, 0.5), 1}};
  CHECK(flat_norm(mu) == doctest::Approx(0.8 * pi));

  // degree 2 counts as two particles
  mu.atoms = {{Point(0.3, 0.5), 2}, {Point(0.5, 0.5), -1}};
  CHECK(flat_norm(mu) == doctest::Approx(0.5 * pi));
}

TEST_CASE("flat distance") {
  VorticityMeasure a;
  a.shape = Disk{Point::Zero(), 1.0};
  a.atoms = {{Point(0.1, 0.0), 1}};
  CHECK(flat_distance(a, a) == 0.0);
  VorticityMeasure b = a;
  b.atoms[0].position.x() += 0.01;
  CHECK(flat_distance(a, b) == doctest::Approx(0.01 * pi));

  // lattice vortex against its continuum position
  const double eps = 1.0 / 16;
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, eps);
  const Point target(0.1234, -0.0567);
  ScalarField psi(dom);
  for (int s = 0; s < dom->num_sites(); ++s) psi.values[s] = polar_angle(dom->position(s), target);
  VorticityMeasure exact;
  exact.shape = a.shape;
  exact.atoms = {{target, 1}};
  CHECK(flat_distance(vorticity_measure(psi), exact) <= pi * eps * std::sqrt(2.0) / 2 + 1e-12);
}

TEST_CASE("flat norm errors") {
  VorticityMeasure mu;
  mu.shape = kUnit;
  for (int k = 0; k < 7; ++k) mu.atoms.push_back({Point(0.1 + 0.1 * k, 0.5), 1});
  try {
    flat_norm_lp_oracle(mu, 16);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::resource);
  }
}

TEST_CASE("assignment and simplex") {
  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const std::vector<int> a = solve_assignment(cost);
  double total = 0.0;
  for (int r = 0; r < 3; ++r) total += cost(r, a[r]);
  CHECK(total == doctest::Approx(5.0));

  // max x + y s.t. x + 2y <= 4, 3x + y <= 6
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, 3, 1;
  Eigen::VectorXd x;
  CHECK(simplex_maximize(A, Eigen::Vector2d(4, 6), Eigen::Vector2d(1, 1), &x) == doctest::Approx(2.8));
  CHECK(x[0] == doctest::Approx(1.6));
  CHECK(x[1] == doctest::Approx(1.2));
}

TEST_CASE("randomized invariants at small size") {
  CHECK(check_vorticity_and_stokes(500, 1).passed());
  CHECK(check_tie_rule().passed());
  CHECK(check_comparison_chain(200, 2).passed());
  CHECK(check_interpolation_bound(200, 3).passed());
  CHECK(check_construct_roundtrip(10, 4).passed());
  CHECK(check_flat_norm_oracle(4, 5, 24).passed());
}
