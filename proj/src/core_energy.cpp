#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>

#include "fracxy/solvers.hpp"

namespace fracxy {

namespace {

constexpr double kPi = std::numbers::pi;

void check_core_radii(double sigma, double epsilon) {
  if (!(epsilon > 0.0) || !(sigma > 0.0)) throw Error(Errc::construction, "sigma and eps must be positive");
  if (!(epsilon < 0.25 * sigma)) throw Error(Errc::construction, "core energy needs eps < sigma / 4");
}

// Point where the ray from p (inside the circle |x| = r) along dir leaves it.
Point exit_point(const Point& p, const Point& dir, double r) {
  const double b = p.dot(dir);
  const double c = p.squaredNorm() - r * r;
  return p + (-b + std::sqrt(b * b - c)) * dir;
}

}  // namespace

RelaxationResult core_relax_sym(double sigma, double epsilon, const RelaxationConfig& cfg, BaseProfile base) {
  check_core_radii(sigma, epsilon);
  validate(cfg);
  const DomainPtr dom = build_domain(Disk{Point::Zero(), sigma}, epsilon);
  const PotentialSpec spec{1, std::min(0.5 * eval_base(base, kPi), epsilon), base};
  const std::vector<char>& frozen = dom->boundary_mask();

  std::optional<RelaxationResult> best;
  for (int k = 0; k < cfg.restarts; ++k) {
    std::mt19937_64 rng(cfg.seed + 7919u * static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> offset(-0.5 * epsilon, 0.5 * epsilon);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    Point core(0.5 * epsilon, 0.5 * epsilon);
    if (k == 1) core = Point::Zero();
    if (k >= 2) core = Point(offset(rng), offset(rng));

    VortexPrescription pr;
    pr.cores.push_back({core, 1});
    ScalarField phi = construct_field(dom, pr);
    if (k >= 1) {
      for (int s = 0; s < dom->num_sites(); ++s)
        if (!frozen[s]) phi.values[s] += noise(rng);
    }
    impose_angle_data(phi, frozen, Point::Zero(), 1, 1, true);
    RelaxationResult r = relax(phi, spec, frozen, cfg);
    if (!best || r.energy < best->energy) best = std::move(r);
  }
  return std::move(*best);
}

double core_energy_sym(double sigma, double epsilon, const RelaxationConfig& cfg, BaseProfile base) {
  return core_relax_sym(sigma, epsilon, cfg, base).energy;
}

RelaxationResult core_relax_frac(double sigma, double epsilon, int degree, int n, const RelaxationConfig& cfg,
                                 BaseProfile base) {
  check_core_radii(sigma, epsilon);
  validate(cfg);
  if (degree != 1 && degree != -1) throw Error(Errc::invalid_prescription, "degree must be +1 or -1");
  if (n < 1) throw Error(Errc::invalid_prescription, "n must be at least 1");
  const PotentialSpec spec{n, epsilon, base};
  validate(spec);
  const DomainPtr dom = build_domain(Disk{Point::Zero(), sigma}, epsilon);
  const std::vector<char>& frozen = dom->boundary_mask();

  // d = -1 is set up as the mirror image (y -> -y) of d = +1.
  const Point start(0.5 * epsilon, 0.5 * degree * epsilon);
  std::optional<RelaxationResult> best;
  for (int k = 0; k < cfg.restarts; ++k) {
    const int axis = k % 4;
    const Point dir(axis == 0 ? 1.0 : (axis == 2 ? -1.0 : 0.0), degree * (axis == 1 ? 1.0 : (axis == 3 ? -1.0 : 0.0)));
    // shift by whole cells so the core stays on a cell centre
    const double shift = epsilon * std::floor(0.05 * k * sigma / epsilon);
    Point core = start + shift * dir;
    if (sigma - core.norm() < 2.0 * epsilon) core = start;
    VortexPrescription pr;
    pr.n = n;
    pr.cores.push_back({core, degree});
    if (n >= 2) pr.strings.push_back({{core, exit_point(core, dir, sigma)}});
    ScalarField phi = construct_field(dom, pr);
    impose_angle_data(phi, frozen, Point::Zero(), degree, n, false);
    RelaxationResult r = relax(phi, spec, frozen, cfg);
    if (!best || r.energy < best->energy) best = std::move(r);
    if (n == 1) break;  // no string to place
  }
  return std::move(*best);
}

double core_energy_frac(double sigma, double epsilon, int degree, int n, const RelaxationConfig& cfg,
                        BaseProfile base) {
  return core_relax_frac(sigma, epsilon, degree, n, cfg, base).energy;
}

GammaExtrapolation gamma_extrapolate(const std::vector<GammaSample>& table) {
  std::map<double, std::map<double, double, std::greater<>>> by_sigma;  // sigma -> (eps desc -> value)
  for (const GammaSample& s : table) {
    if (!(s.epsilon > 0.0) || !(s.sigma > 0.0) || !std::isfinite(s.value))
      throw Error(Errc::insufficient_data, "gamma samples need positive eps, sigma and a finite value");
    by_sigma[s.sigma][s.epsilon] = s.value;
  }
  if (by_sigma.empty()) throw Error(Errc::insufficient_data, "empty gamma table");

  GammaExtrapolation out;
  double finest_ratio = 0.0;
  for (const auto& [sigma, series] : by_sigma) {
    if (series.size() < 3) throw Error(Errc::insufficient_data, "need at least 3 eps values per sigma");
    std::vector<double> g;
    double eps_min = 0.0;
    for (const auto& [eps, value] : series) {
      g.push_back(value - kPi * std::log(sigma / eps));
      eps_min = eps;
    }
    GammaPerSigma row{sigma, g.back(), std::abs(g.back() - g[g.size() - 2])};
    out.per_sigma.push_back(row);
    if (sigma / eps_min > finest_ratio) {
      finest_ratio = sigma / eps_min;
      out.gamma = row.gamma;
      out.error_bar = row.error_bar;
    }
  }
  for (std::size_t i = 0; i < out.per_sigma.size(); ++i) {
    for (std::size_t j = i + 1; j < out.per_sigma.size(); ++j) {
      const auto& a = out.per_sigma[i];
      const auto& b = out.per_sigma[j];
      if (std::abs(a.gamma - b.gamma) > 2.0 * std::max(a.error_bar, b.error_bar)) out.sigma_dependent = true;
    }
  }
  return out;
}

}  // namespace fracxy
