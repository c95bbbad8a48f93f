#include <algorithm>
#include <cmath>
#include <deque>

#include "fracxy/solvers.hpp"

namespace fracxy {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

double sup_norm(const Eigen::VectorXd& g) { return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff(); }

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Two-loop recursion.
Eigen::VectorXd lbfgs_direction(const std::deque<Pair>& mem, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = -g;
  std::vector<double> alpha(mem.size());
  for (int k = static_cast<int>(mem.size()) - 1; k >= 0; --k) {
    alpha[k] = mem[k].rho * mem[k].s.dot(q);
    q -= alpha[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const Pair& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * mem[k].y.dot(q);
    q += (alpha[k] - beta) * mem[k].s;
  }
  return q;
}

}  // namespace

void validate(const RelaxationConfig& cfg) {
  if (cfg.max_iters < 0) throw Error(Errc::config, "max_iters must be non-negative");
  if (!(cfg.grad_tol > 0.0)) throw Error(Errc::config, "grad_tol must be positive");
  if (cfg.memory < 1) throw Error(Errc::config, "memory must be at least 1");
  if (!(cfg.fixed_step > 0.0)) throw Error(Errc::config, "fixed_step must be positive");
  if (cfg.stall_window < 1 || !(cfg.stall_tol >= 0.0)) throw Error(Errc::config, "invalid stall criterion");
  if (cfg.restarts < 1) throw Error(Errc::config, "restarts must be at least 1");
}

std::string to_string(RelaxStatus status) {
  switch (status) {
    case RelaxStatus::converged: return "converged";
    case RelaxStatus::max_iters: return "max_iters";
    case RelaxStatus::stagnated: return "stagnated";
  }
  return "unknown";
}

RelaxationResult relax(const ScalarField& phi0, const PotentialSpec& spec, const std::vector<char>& frozen,
                       const RelaxationConfig& cfg) {
  validate(spec);
  validate(cfg);
  const LatticeDomain& dom = phi0.lattice();
  if (static_cast<int>(frozen.size()) != dom.num_sites())
    throw Error(Errc::construction, "frozen mask size does not match the site count");

  Eigen::VectorXd x = phi0.values;
  Eigen::VectorXd g;
  double energy = energy_and_gradient(dom, x, spec, frozen, g);
  double gnorm = sup_norm(g);

  RelaxationResult out;
  out.log.push_back({0, energy, gnorm});
  std::deque<Pair> mem;
  const bool backtracking = cfg.step_rule == StepRule::backtracking;
  const double first_step = 0.25 / (spec.n * spec.n);

  Eigen::VectorXd x_new, g_new, p;
  int iter = 0;
  out.status = RelaxStatus::max_iters;
  while (true) {
    if (gnorm <= cfg.grad_tol) {
      out.status = RelaxStatus::converged;
      break;
    }
    if (iter >= cfg.max_iters) break;
    ++iter;

    bool accepted = false;
    double e_new = energy;
    // L-BFGS direction first; one retry along -g with an empty memory.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool use_memory = backtracking && cfg.quasi_newton && !mem.empty() && attempt == 0;
      if (attempt == 1 && !(backtracking && cfg.quasi_newton && !mem.empty())) break;
      p = use_memory ? lbfgs_direction(mem, g) : Eigen::VectorXd(-g);
      double slope = g.dot(p);
      if (use_memory && slope >= 0.0) {
        p = -g;
        slope = -g.squaredNorm();
      }
      double step = !backtracking ? cfg.fixed_step : (use_memory ? 1.0 : first_step);
      for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
        x_new = x + step * p;
        e_new = energy_and_gradient(dom, x_new, spec, frozen, g_new);
        const double bound = backtracking ? energy + kArmijo * step * slope : energy;
        if (e_new <= bound) {
          accepted = true;
          break;
        }
      }
      if (!accepted) mem.clear();
    }
    if (!accepted) {
      out.status = RelaxStatus::stagnated;
      break;
    }

    if (backtracking && cfg.quasi_newton) {
      Pair pr{x_new - x, g_new - g, 0.0};
      const double sy = pr.s.dot(pr.y);
      if (sy > 1e-12 * pr.s.norm() * pr.y.norm()) {
        pr.rho = 1.0 / sy;
        mem.push_back(std::move(pr));
        if (static_cast<int>(mem.size()) > cfg.memory) mem.pop_front();
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    energy = e_new;
    gnorm = sup_norm(g);
    out.log.push_back({iter, energy, gnorm});
    if (iter >= cfg.stall_window) {
      const double before = out.log[iter - cfg.stall_window].energy;
      if (before - energy <= cfg.stall_tol * std::max(1.0, std::abs(energy)) && gnorm > cfg.grad_tol) {
        out.status = RelaxStatus::stagnated;
        break;
      }
    }
  }

  out.field = ScalarField(phi0.domain, std::move(x));
  out.energy = energy;
  out.grad_norm = gnorm;
  return out;
}

std::vector<char> sites_near(const LatticeDomain& domain, const std::vector<Point>& points, double radius) {
  std::vector<char> mask(domain.num_sites(), 0);
  for (int s = 0; s < domain.num_sites(); ++s) {
    const Point x = domain.position(s);
    for (const Point& p : points) {
      if ((x - p).norm() <= radius) {
        mask[s] = 1;
        break;
      }
    }
  }
  return mask;
}

}  // namespace fracxy
