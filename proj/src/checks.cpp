#include "fracxy/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fracxy/solvers.hpp"

namespace fracxy {

namespace {

constexpr double kPi = std::numbers::pi;

DomainPtr small_square() { return build_domain(Rectangle{Point::Zero(), Point(1.0, 1.0)}, 1.0 / 8); }

ScalarField random_field(const DomainPtr& dom, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Eigen::VectorXd v(dom->num_sites());
  for (auto& x : v) x = u(rng);
  return ScalarField(dom, std::move(v));
}

bool below(double lhs, double rhs) { return lhs < rhs - 1e-12 * (1.0 + std::abs(rhs)); }

}  // namespace

CheckResult check_vorticity_and_stokes(long fields, std::uint64_t seed) {
  CheckResult out{"vorticity_and_stokes"};
  const DomainPtr dom = small_square();
  const Region whole = whole_region(*dom);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(0.3, 0.7), radius(0.2, 0.45);
  for (long f = 0; f < fields; ++f) {
    const ScalarField psi = random_field(dom, rng, 3.0 * kPi);
    bool bad = false;
    for (int c = 0; c < dom->num_cells(); ++c) {
      const int a = cell_vorticity(psi, c);
      if (a < -1 || a > 1) bad = true;
    }
    const Region sub = make_region(*dom, Disk{Point(center(rng), center(rng)), radius(rng)});
    for (const Region* r : {&whole, &sub}) {
      if (std::none_of(r->cells.begin(), r->cells.end(), [](char c) { return c != 0; })) continue;
      const auto [lhs, rhs] = stokes_check(psi, *r);
      const double err = std::abs(lhs - rhs);
      out.max_error = std::max(out.max_error, err);
      if (err > 1e-10) bad = true;
    }
    ++out.trials;
    out.violations += bad;
  }
  return out;
}

CheckResult check_tie_rule() {
  CheckResult out{"tie_rule"};
  auto expect = [&](bool ok) {
    ++out.trials;
    out.violations += !ok;
  };
  expect(project_P(kPi) == 0.0);
  expect(project_P(-kPi) == -2.0 * kPi);
  expect(project_P(3.0 * kPi) == 2.0 * kPi);

  const DomainPtr dom = build_domain(Rectangle{Point::Zero(), Point(2.0, 2.0)}, 1.0);
  // one bond at exactly pi, then every bond of a cell at an odd multiple of pi
  std::vector<Eigen::VectorXd> fields;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dom->num_sites());
  a[dom->site_at(GridIndex(1, 0))] = kPi;
  fields.push_back(a);
  Eigen::VectorXd b(dom->num_sites());
  for (int s = 0; s < dom->num_sites(); ++s) {
    const GridIndex& k = dom->site(s);
    b[s] = kPi * (k.x() + 2 * k.y());
  }
  fields.push_back(b);
  fields.push_back(-b);
  for (auto& v : fields) {
    const ScalarField psi(dom, v);
    for (int c = 0; c < dom->num_cells(); ++c) {
      const int alpha = cell_vorticity(psi, c);
      expect(alpha >= -1 && alpha <= 1);
    }
    for (const Bond& bond : dom->bonds()) expect(elastic_diff(psi, bond.a, bond.b) == -elastic_diff(psi, bond.b, bond.a));
    const auto [lhs, rhs] = stokes_check(psi, whole_region(*dom));
    expect(std::abs(lhs - rhs) <= 1e-10);
  }
  return out;
}

CheckResult check_comparison_chain(long fields, std::uint64_t seed) {
  CheckResult out{"comparison_chain"};
  const DomainPtr dom = small_square();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wells(1, 4);
  std::uniform_real_distribution<double> level(0.01, 1.0);
  std::bernoulli_distribution stiff(0.5);
  for (long f = 0; f < fields; ++f) {
    const ScalarField phi = random_field(dom, rng, 2.0 * kPi);
    const PotentialSpec spec{wells(rng), level(rng), stiff(rng) ? BaseProfile::stiffened : BaseProfile::one_minus_cos};
    const double fn = energy_fn_eps(phi, spec).total;
    const ScalarField scaled(dom, spec.n * phi.values);
    const double sym = energy_sym(scaled, spec.base);
    const double xy = energy_xy(exp_map(phi, spec.n));
    out.max_error = std::max({out.max_error, sym - fn, xy - sym});
    ++out.trials;
    out.violations += below(fn, sym) || below(sym, xy);
  }
  return out;
}

CheckResult check_interpolation_bound(long fields, std::uint64_t seed) {
  CheckResult out{"interpolation_bound"};
  const DomainPtr dom = small_square();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wells(1, 4);
  for (long f = 0; f < fields; ++f) {
    const ScalarField phi = random_field(dom, rng, 2.0 * kPi);
    const SpinField w = exp_map(phi, wells(rng));
    const double xy = energy_xy(w);
    const double dir = dirichlet_energy(interpolate_affine(w));
    out.max_error = std::max(out.max_error, dir - xy);
    ++out.trials;
    out.violations += below(xy, dir);
  }
  return out;
}

CheckResult check_construct_roundtrip(int prescriptions, std::uint64_t seed) {
  CheckResult out{"construct_roundtrip"};
  const int cells = 32;
  const double eps = 1.0 / cells;
  const DomainPtr dom = build_domain(Rectangle{Point::Zero(), Point(1.0, 1.0)}, eps);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wells(1, 3), count(1, 4), row(3, cells - 4), sign(0, 1);
  for (int p = 0; p < prescriptions; ++p) {
    VortexPrescription pr;
    pr.n = wells(rng);
    std::vector<int> columns;
    for (int c = 3; c <= cells - 4; c += 2) columns.push_back(c);
    std::shuffle(columns.begin(), columns.end(), rng);
    const int k = count(rng);
    long expected_jumps = 0;
    for (int i = 0; i < k; ++i) {
      const int j = row(rng);
      const Point x(eps * (columns[i] + 0.5), eps * (j + 0.5));
      pr.cores.push_back({x, sign(rng) ? 1 : -1});
      if (pr.n >= 2) {
        pr.strings.push_back({{x, Point(x.x(), 1.0)}});
        expected_jumps += cells - j;  // horizontal bonds above the core
      }
    }
    const ScalarField phi = construct_field(dom, pr);
    const VorticityMeasure mu = vorticity_measure(ScalarField(dom, pr.n * phi.values));
    bool ok = mu.atoms.size() == pr.cores.size();
    for (const Core& c : pr.cores) {
      const bool found = std::any_of(mu.atoms.begin(), mu.atoms.end(), [&](const Atom& a) {
        return (a.position - c.position).norm() < 1e-12 && a.degree == c.degree;
      });
      ok = ok && found;
    }
    ok = ok && static_cast<long>(jump_pairs(phi, pr.n).jump_bonds.size()) == expected_jumps;
    ++out.trials;
    out.violations += !ok;
  }
  return out;
}

CheckResult check_flat_norm_oracle(int instances, std::uint64_t seed, int grid) {
  CheckResult out{"flat_norm_oracle"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 4), sign(0, 1);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int t = 0; t < instances; ++t) {
    VorticityMeasure mu;
    if (t % 2 == 0)
      mu.shape = Disk{Point(0.5, 0.5), 0.5};
    else
      mu.shape = Rectangle{Point::Zero(), Point(1.0, 1.0)};
    const int k = count(rng);
    while (static_cast<int>(mu.atoms.size()) < k) {
      const Point x(coord(rng), coord(rng));
      if (!contains(mu.shape, x) || distance_to_boundary(mu.shape, x) < 0.05) continue;
      const bool crowded = std::any_of(mu.atoms.begin(), mu.atoms.end(),
                                       [&](const Atom& a) { return (a.position - x).norm() < 0.05; });
      if (!crowded) mu.atoms.push_back({x, sign(rng) ? 1 : -1});
    }
    const double exact = flat_norm(mu);
    const double lp = flat_norm_lp_oracle(mu, grid);
    const auto [lo, hi] = bounding_box(mu.shape);
    const double h = (hi - lo).norm() / grid;
    const double tol = 0.02 * exact + kPi * mu.total_variation() * h;
    out.max_error = std::max(out.max_error, std::abs(exact - lp) / exact);
    ++out.trials;
    out.violations += std::abs(exact - lp) > tol;
  }
  return out;
}

CheckResult check_relax_monotone(int runs, std::uint64_t seed) {
  CheckResult out{"relax_monotone"};
  const DomainPtr dom = build_domain(Disk{Point::Zero(), 0.5}, 1.0 / 16);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wells(1, 3);
  RelaxationConfig cfg;
  cfg.max_iters = 300;
  for (int r = 0; r < runs; ++r) {
    const PotentialSpec spec{wells(rng), 1.0 / 16, BaseProfile::one_minus_cos};
    const ScalarField phi0 = random_field(dom, rng, kPi);
    const RelaxationResult res = relax(phi0, spec, dom->boundary_mask(), cfg);
    for (std::size_t i = 1; i < res.log.size(); ++i) {
      ++out.trials;
      const double rise = res.log[i].energy - res.log[i - 1].energy;
      out.max_error = std::max(out.max_error, rise);
      out.violations += rise > 0.0;
    }
  }
  return out;
}

}  // namespace fracxy
