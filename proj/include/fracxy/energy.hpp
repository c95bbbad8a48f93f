#pragma once

#include <Eigen/Core>

#include <vector>

#include "fracxy/fields.hpp"
#include "fracxy/potentials.hpp"

namespace fracxy {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Split of F^(n)_eps into bonds in the main/steep part of the potential and
/// bonds resting on the eps plateau of a secondary well.
struct EnergyBreakdown {
  double total = 0.0;
  double main = 0.0;
  double plateau = 0.0;  // eps * n_bonds_plateau
  int n_bonds_plateau = 0;
};

/// Sums run over unordered bonds, i.e. half of the ordered-pair sums.
EnergyBreakdown energy_fn_eps(const ScalarField& phi, const PotentialSpec& spec, const Region& region);
EnergyBreakdown energy_fn_eps(const ScalarField& phi, const PotentialSpec& spec);

double energy_sym(const ScalarField& theta, BaseProfile base, const Region& region);
double energy_sym(const ScalarField& theta, BaseProfile base = BaseProfile::one_minus_cos);

/// 1/2 sum over unordered bonds of |w(j) - w(i)|^2.
double energy_xy(const SpinField& w, const Region& region);
double energy_xy(const SpinField& w);

/// dF/dphi at free sites, zero at frozen ones.
Eigen::VectorXd gradient_fn_eps(const ScalarField& phi, const PotentialSpec& spec,
                                const std::vector<char>& frozen);

/// Energy and gradient in one bond sweep (the relaxation hot loop).
double energy_and_gradient(const LatticeDomain& domain, const Eigen::VectorXd& phi,
                           const PotentialSpec& spec, const std::vector<char>& frozen,
                           Eigen::VectorXd& gradient);
double energy_value(const LatticeDomain& domain, const Eigen::VectorXd& phi, const PotentialSpec& spec);

}  // namespace fracxy
