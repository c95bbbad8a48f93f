#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracxy/solvers.hpp"

using namespace fracxy;
using std::numbers::pi;

namespace {

ScalarField angle_field(const DomainPtr& dom, const Point& center) {
  ScalarField psi(dom);
  for (int s = 0; s < dom->num_sites(); ++s) psi.values[s] = polar_angle(dom->position(s), center);
  return psi;
}

// Coordinate descent with golden-section line minimisation per site.
double coordinate_descent(const LatticeDomain& dom, Eigen::VectorXd phi, const PotentialSpec& spec,
                          const std::vector<char>& frozen) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    double moved = 0.0;
    for (int s = 0; s < dom.num_sites(); ++s) {
      if (frozen[s]) continue;
      auto f = [&](double v) {
        Eigen::VectorXd x = phi;
        x[s] = v;
        return energy_value(dom, x, spec);
      };
      double a = phi[s] - 1.0, b = phi[s] + 1.0;
      double c = b - g * (b - a), d = a + g * (b - a);
      while (b - a > 1e-13) {
        if (f(c) < f(d))
          b = d;
        else
          a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
      }
      moved = std::max(moved, std::abs(0.5 * (a + b) - phi[s]));
      phi[s] = 0.5 * (a + b);
    }
    if (moved < 1e-12) break;
  }
  return energy_value(dom, phi, spec);
}

}  // namespace

TEST_CASE("polar angle") {
  CHECK(polar_angle(Point(1, 0), Point::Zero()) == 0.0);
  CHECK(polar_angle(Point(0, 1), Point::Zero()) == doctest::Approx(pi / 2));
  CHECK(polar_angle(Point(0, -1), Point::Zero()) == doctest::Approx(1.5 * pi));
  CHECK(polar_angle(Point(2, 3), Point(2, 3)) == 0.0);
}

TEST_CASE("construct a single full vortex") {
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, 1.0 / 16);
  VortexPrescription pr;
  pr.cores = {{Point(1.0 / 32, 1.0 / 32), 1}};
  const ScalarField phi = construct_field(dom, pr);
  const VorticityMeasure mu = vorticity_measure(phi);
  REQUIRE(mu.atoms.size() == 1);
  CHECK(mu.atoms[0].degree == 1);
  CHECK((mu.atoms[0].position - pr.cores[0].position).norm() < 1e-15);
  CHECK(jump_pairs(phi, 1).jump_bonds.empty());
}

TEST_CASE("construct a half vortex with a string to the boundary") {
  const double eps = 1.0 / 16;
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, eps);
  VortexPrescription pr;
  pr.n = 2;
  const Point core(eps / 2, eps / 2);
  pr.cores = {{core, 1}};
  pr.strings = {{{core, Point(std::sqrt(1.0 - eps * eps / 4), eps / 2)}}};
  const ScalarField phi = construct_field(dom, pr);
  const VorticityMeasure mu = vorticity_measure(ScalarField(dom, 2.0 * phi.values));
  REQUIRE(mu.atoms.size() == 1);
  CHECK(mu.atoms[0].degree == 1);
  const StringSet jumps = jump_pairs(phi, 2);
  CHECK_FALSE(jumps.jump_bonds.empty());
  for (int b : jumps.jump_bonds) {
    const Bond& bond = dom->bond(b);
    CHECK(bond.axis == Axis::vertical);
    CHECK(dom->site(bond.a).y() == 0);
    CHECK(dom->site(bond.a).x() >= 1);
  }
}

TEST_CASE("construct a half-vortex dipole") {
  const double eps = 1.0 / 64;
  const DomainPtr dom = build_domain(Rectangle{Point::Zero(), Point(1.0, 1.0)}, eps);
  VortexPrescription pr;
  pr.n = 2;
  const Point a(0.3 + eps / 2, 0.5 + eps / 2), b(0.7 + eps / 2, 0.5 + eps / 2);
  pr.cores = {{a, 1}, {b, -1}};
  pr.strings = {{{a, b}}};
  const ScalarField phi = construct_field(dom, pr);
  const VorticityMeasure mu = vorticity_measure(ScalarField(dom, 2.0 * phi.values));
  REQUIRE(mu.atoms.size() == 2);
  CHECK(mu.atoms[0].degree + mu.atoms[1].degree == 0);
  const StringSet jumps = jump_pairs(phi, 2);
  CHECK(std::abs(eps * jumps.jump_bonds.size() - 0.4) <= 2 * eps);
  // bonds next to the cores jump by more than the plateau width
  const EnergyBreakdown e = energy_fn_eps(phi, PotentialSpec{2, eps});
  CHECK(e.n_bonds_plateau <= static_cast<int>(jumps.jump_bonds.size()));
  CHECK(e.n_bonds_plateau > 0);
}

TEST_CASE("prescription errors") {
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, 1.0 / 16);
  auto code_of = [&](const VortexPrescription& pr) {
    try {
      construct_field(dom, pr);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::config;  // no error
  };
  VortexPrescription on_boundary;
  on_boundary.cores = {{Point(0.99, 0.0), 1}};
  CHECK(code_of(on_boundary) == Errc::invalid_prescription);

  VortexPrescription crowded;
  crowded.cores = {{Point(0.0, 0.0), 1}, {Point(0.05, 0.0), -1}};
  CHECK(code_of(crowded) == Errc::invalid_prescription);

  VortexPrescription stringless;
  stringless.n = 2;
  stringless.cores = {{Point(0.0, 0.0), 1}};
  CHECK(code_of(stringless) == Errc::invalid_prescription);

  VortexPrescription dangling;
  dangling.n = 2;
  dangling.cores = {{Point(0.0, 0.0), 1}};
  dangling.strings = {{{Point(0.0, 0.0), Point(0.5, 0.0)}}};
  CHECK(code_of(dangling) == Errc::invalid_prescription);
}

TEST_CASE("impose angle data keeps the residue class") {
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, 1.0 / 8);
  ScalarField phi(dom);
  phi.values.setConstant(7.0);
  impose_angle_data(phi, dom->boundary_mask(), Point::Zero(), 1, 2, false);
  for (int s = 0; s < dom->num_sites(); ++s) {
    if (!dom->is_boundary(s)) {
      CHECK(phi[s] == 7.0);
      continue;
    }
    const double target = 0.5 * polar_angle(dom->position(s), Point::Zero());
    const double k = (phi[s] - target) / pi;
    CHECK(std::abs(k - std::round(k)) < 1e-12);
    CHECK(std::abs(phi[s] - 7.0) <= pi / 2 + 1e-12);
  }
}

TEST_CASE("relaxation with constant boundary data") {
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, 1.0 / 8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField phi(dom);
  for (int s = 0; s < dom->num_sites(); ++s) phi.values[s] = dom->is_boundary(s) ? 0.8 : 0.8 + u(rng);
  const RelaxationResult r = relax(phi, PotentialSpec{2, 0.125}, dom->boundary_mask(), RelaxationConfig{});
  CHECK(r.status == RelaxStatus::converged);
  CHECK(r.energy < 1e-10);
  CHECK((r.field.values.array() - 0.8).abs().maxCoeff() < 1e-6);
  for (std::size_t k = 1; k < r.log.size(); ++k) CHECK(r.log[k].energy <= r.log[k - 1].energy);
  CHECK(r.log.front().iter == 0);
}

TEST_CASE("relaxation of a single free site") {
  const DomainPtr dom = build_domain(Rectangle{Point::Zero(), Point(2.0, 2.0)}, 1.0);
  ScalarField phi(dom);
  std::vector<char> frozen(dom->num_sites(), 1);
  const int mid = dom->site_at(GridIndex(1, 1));
  frozen[mid] = 0;
  phi.values[dom->site_at(GridIndex(0, 1))] = 0.0;
  phi.values[dom->site_at(GridIndex(2, 1))] = 0.4;
  phi.values[dom->site_at(GridIndex(1, 0))] = 0.0;
  phi.values[dom->site_at(GridIndex(1, 2))] = 0.4;
  phi.values[mid] = 1.0;
  for (StepRule rule : {StepRule::backtracking, StepRule::fixed}) {
    RelaxationConfig cfg;
    cfg.step_rule = rule;
    cfg.grad_tol = 1e-10;
    const RelaxationResult r = relax(phi, PotentialSpec{1, 0.01}, frozen, cfg);
    CHECK(r.field[mid] == doctest::Approx(0.2).epsilon(1e-6));
  }
}

TEST_CASE("relaxation matches coordinate descent on a micro instance") {
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 2.5}, 1.0);
  int free_sites = 0;
  for (int s = 0; s < dom->num_sites(); ++s) free_sites += !dom->is_boundary(s);
  CHECK(free_sites == 5);
  const ScalarField theta = angle_field(dom, Point(0.5, 0.5));
  const PotentialSpec spec{1, 0.01};
  RelaxationConfig cfg;
  cfg.grad_tol = 1e-10;
  const RelaxationResult r = relax(theta, spec, dom->boundary_mask(), cfg);
  const double oracle = coordinate_descent(*dom, theta.values, spec, dom->boundary_mask());
  CHECK(std::abs(r.energy - oracle) < 1e-6);
}

TEST_CASE("relaxation config validation") {
  const DomainPtr dom = build_domain(Disk{}, 0.25);
  RelaxationConfig cfg;
  cfg.memory = 0;
  CHECK_THROWS_AS(relax(ScalarField(dom), PotentialSpec{}, dom->boundary_mask(), cfg), Error);
  CHECK_THROWS_AS(relax(ScalarField(dom), PotentialSpec{}, {}, RelaxationConfig{}), Error);
  CHECK(to_string(RelaxStatus::stagnated) == "stagnated");
}

TEST_CASE("core energies on a coarse lattice") {
  RelaxationConfig cfg;
  const double sigma = 0.5, eps = 1.0 / 16;
  const double sym = core_energy_sym(sigma, eps, cfg);
  CHECK(sym >= pi * std::log(sigma / eps) - 10.0);
  CHECK(std::abs(core_energy_frac(sigma, eps, 1, 1, cfg) - sym) < 1e-8);
  const double plus = core_energy_frac(sigma, eps, 1, 2, cfg);
  const double minus = core_energy_frac(sigma, eps, -1, 2, cfg);
  CHECK(std::abs(plus - minus) < 1e-8);
  CHECK_THROWS_AS(core_energy_sym(0.2, 0.05, cfg), Error);
  CHECK_THROWS_AS(core_energy_frac(sigma, eps, 2, 2, cfg), Error);
}

TEST_CASE("core energy localizes in sigma") {
  RelaxationConfig cfg;
  const double eps = 1.0 / 64;
  double prev = 1e300;
  for (double sigma : {0.25, 0.5, 1.0}) {
    const double g = core_energy_sym(sigma, eps, cfg) - pi * std::log(sigma / eps);
    CHECK(g <= prev + 0.05);
    prev = g;
  }
}

TEST_CASE("gamma extrapolation") {
  const double g0 = 3.7;
  std::vector<GammaSample> exact, noisy;
  for (double sigma : {0.5, 1.0})
    for (double eps : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      exact.push_back({eps, sigma, pi * std::log(sigma / eps) + g0});
      noisy.push_back({eps, sigma, pi * std::log(sigma / eps) + g0 + 2.0 * eps});
    }
  const GammaExtrapolation a = gamma_extrapolate(exact);
  CHECK(a.gamma == doctest::Approx(g0));
  CHECK(a.error_bar == doctest::Approx(0.0));
  CHECK_FALSE(a.sigma_dependent);
  REQUIRE(a.per_sigma.size() == 2);
  CHECK(a.per_sigma[0].sigma == 0.5);

  const GammaExtrapolation b = gamma_extrapolate(noisy);
  CHECK(std::abs(b.gamma - g0) <= 2.0 / 64 + 1e-12);
  CHECK(b.error_bar == doctest::Approx(2.0 * (1.0 / 32 - 1.0 / 64)));

  std::vector<GammaSample> shifted = exact;
  for (auto& s : shifted)
    if (s.sigma == 1.0) s.value += 0.5;
  CHECK(gamma_extrapolate(shifted).sigma_dependent);

  exact.pop_back();
  try {
    gamma_extrapolate(exact);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_data);
  }
}

TEST_CASE("triangle disk overlap") {
  const Triangle t{{Point(0, 0), Point(1, 0), Point(0, 1)}};
  CHECK(triangle_disk_overlap(t, Point(0.25, 0.25), 1e-3) == doctest::Approx(pi * 1e-6));
  CHECK(triangle_disk_overlap(t, Point(0, 0), 10.0) == doctest::Approx(0.5));
  CHECK(triangle_disk_overlap(t, Point(0, 0), 0.5) == doctest::Approx(pi * 0.25 / 4));
  CHECK(triangle_disk_overlap(t, Point(5, 5), 1.0) == 0.0);
  // half disk on an edge
  const Triangle big{{Point(-10, 0), Point(10, 0), Point(0, 10)}};
  CHECK(triangle_disk_overlap(big, Point(0, 0), 1.0) == doctest::Approx(pi / 2));
}

TEST_CASE("renormalized energy") {
  const double eps = 1.0 / 32;
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 1.0}, eps);
  ScalarField c(dom);
  VorticityMeasure empty;
  empty.shape = dom->shape();
  const RenormalizedEstimate z = renormalized_energy_estimate(interpolate_affine(exp_map(c)), empty, {0.5, 0.25});
  CHECK(z.values == std::vector<double>{0.0, 0.0});
  CHECK(z.W == 0.0);

  const Point x(eps / 2, eps / 2);
  const InterpolatedField v = interpolate_affine(exp_map(angle_field(dom, x)));
  VorticityMeasure mu;
  mu.shape = dom->shape();
  mu.atoms = {{x, 1}};
  const std::vector<double> radii = {0.5, 0.4, 0.3, 0.2};
  const RenormalizedEstimate w = renormalized_energy_estimate(v, mu, radii);
  // radii decrease along the list, so w may only grow
  for (std::size_t k = 1; k < w.values.size(); ++k) CHECK(w.values[k] >= w.values[k - 1] - 0.02);
  CHECK(std::abs(w.values.front() - w.values.back()) < 0.05);
  CHECK(w.W == w.values.back());
  const RenormalizedEstimate coarse = renormalized_energy_estimate(v, mu, radii, BallExclusion::whole_triangle);
  for (std::size_t k = 0; k < radii.size(); ++k) CHECK(coarse.values[k] <= w.values[k]);
  CHECK_THROWS_AS(renormalized_energy_estimate(v, mu, {0.2, 0.3}), Error);
  CHECK_THROWS_AS(renormalized_energy_estimate(v, mu, {0.05}), Error);
  mu.atoms.push_back({Point(0.3, 0.0), -1});
  try {
    renormalized_energy_estimate(v, mu, {0.2});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::overlapping_balls);
  }
}
