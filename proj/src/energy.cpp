#include "fracxy/energy.hpp"

namespace fracxy {

EnergyBreakdown energy_fn_eps(const ScalarField& phi, const PotentialSpec& spec, const Region& region) {
  validate(spec);
  const LatticeDomain& dom = phi.lattice();
  CompensatedSum main;
  int plateau = 0;
  for (int b = 0; b < dom.num_bonds(); ++b) {
    if (!region.has_bond(b)) continue;
    const Bond& bond = dom.bond(b);
    const double t = phi[bond.b] - phi[bond.a];
    if (on_plateau(spec, t))
      ++plateau;
    else
      main.add(eval_fn_eps(spec, t));
  }
  EnergyBreakdown out;
  out.main = main.value();
  out.n_bonds_plateau = plateau;
  out.plateau = spec.epsilon * plateau;
  out.total = out.main + out.plateau;
  return out;
}

EnergyBreakdown energy_fn_eps(const ScalarField& phi, const PotentialSpec& spec) {
  return energy_fn_eps(phi, spec, whole_region(phi.lattice()));
}

double energy_sym(const ScalarField& theta, BaseProfile base, const Region& region) {
  const LatticeDomain& dom = theta.lattice();
  CompensatedSum sum;
  for (int b = 0; b < dom.num_bonds(); ++b) {
    if (!region.has_bond(b)) continue;
    const Bond& bond = dom.bond(b);
    sum.add(eval_base(base, theta[bond.b] - theta[bond.a]));
  }
  return sum.value();
}

double energy_sym(const ScalarField& theta, BaseProfile base) {
  return energy_sym(theta, base, whole_region(theta.lattice()));
}

double energy_xy(const SpinField& w, const Region& region) {
  const LatticeDomain& dom = w.lattice();
  CompensatedSum sum;
  for (int b = 0; b < dom.num_bonds(); ++b) {
    if (!region.has_bond(b)) continue;
    const Bond& bond = dom.bond(b);
    sum.add(0.5 * (w.values.col(bond.b) - w.values.col(bond.a)).squaredNorm());
  }
  return sum.value();
}

double energy_xy(const SpinField& w) { return energy_xy(w, whole_region(w.lattice())); }

double energy_and_gradient(const LatticeDomain& dom, const Eigen::VectorXd& phi, const PotentialSpec& spec,
                           const std::vector<char>& frozen, Eigen::VectorXd& gradient) {
  gradient.setZero(dom.num_sites());
  CompensatedSum sum;
  for (const Bond& bond : dom.bonds()) {
    double slope = 0.0;
    sum.add(eval_fn_eps_slope(spec, phi[bond.b] - phi[bond.a], slope));
    gradient[bond.b] += slope;
    gradient[bond.a] -= slope;
  }
  for (int s = 0; s < dom.num_sites(); ++s) {
    if (frozen[s]) gradient[s] = 0.0;
  }
  return sum.value();
}

double energy_value(const LatticeDomain& dom, const Eigen::VectorXd& phi, const PotentialSpec& spec) {
  CompensatedSum sum;
  for (const Bond& bond : dom.bonds()) sum.add(eval_fn_eps(spec, phi[bond.b] - phi[bond.a]));
  return sum.value();
}

Eigen::VectorXd gradient_fn_eps(const ScalarField& phi, const PotentialSpec& spec,
                                const std::vector<char>& frozen) {
  validate(spec);
  const LatticeDomain& dom = phi.lattice();
  if (static_cast<int>(frozen.size()) != dom.num_sites())
    throw Error(Errc::construction, "frozen mask size does not match the site count");
  Eigen::VectorXd g;
  energy_and_gradient(dom, phi.values, spec, frozen, g);
  return g;
}

}  // namespace fracxy
