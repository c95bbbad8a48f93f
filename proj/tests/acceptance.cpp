// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fracxy/checks.hpp"
#include "fracxy/experiments.hpp"

using namespace fracxy;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome vortex_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = parse_config({{"experiment", "vortex-scaling"}});
  const RunOutput out = run_experiment(cfg);
  const double secs = elapsed(t0);
  const double slope = out.report["fit"]["slope"].get<double>();
  const double rel = std::abs(slope - kPi) / kPi;
  return {rel <= 0.03 && secs < 300.0, fmt("slope %.4f vs pi (rel. error %.4f, limit 0.03), %.1f s (limit 300)", slope,
                                           rel, secs)};
}

// gamma - pi log(sigma/eps) tables for F^sym, shared by criteria 2 and 3
struct CoreTables {
  std::vector<GammaSample> sym;
};

CoreTables& core_tables() {
  static CoreTables tables = [] {
    CoreTables t;
    const RelaxationConfig relax;
    std::vector<GammaSample> rows;
    for (double sigma : {0.5, 1.0})
      for (double eps : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) rows.push_back({eps, sigma, 0.0});
    for (GammaSample& r : rows) r.value = core_energy_sym(r.sigma, r.epsilon, relax);
    t.sym = rows;
    return t;
  }();
  return tables;
}

Outcome core_energy_sigma_independence() {
  const GammaExtrapolation ex = gamma_extrapolate(core_tables().sym);
  const double g_half = ex.per_sigma.at(0).gamma;
  const double g_one = ex.per_sigma.at(1).gamma;
  const double diff = std::abs(g_half - g_one);
  return {diff <= 0.1, fmt("gamma(sigma=0.5) = %.4f, gamma(sigma=1) = %.4f, |diff| %.4f (limit 0.1)", g_half, g_one,
                           diff)};
}

Outcome fractional_core_energy() {
  const double eps = 1.0 / 64, sigma = 1.0;
  const double log_term = kPi * std::log(sigma / eps);
  double sym = 0.0;
  for (const GammaSample& s : core_tables().sym)
    if (s.epsilon == eps && s.sigma == sigma) sym = s.value - log_term;
  const double frac = core_energy_frac(sigma, eps, 1, 2, RelaxationConfig{}) - log_term;
  const double gap = std::abs(frac - sym);
  return {gap <= 0.5, fmt("gamma' = %.4f, gamma = %.4f, gap %.4f (limit 0.5)", frac, sym, gap)};
}

Outcome string_tension() {
  const Rectangle unit{Point::Zero(), Point(1.0, 1.0)};
  bool ok = true;
  std::string detail;
  for (double angle : {0.0, 45.0, 90.0}) {
    const WallMeasurement m = measure_wall(unit, 1.0 / 64, 2, angle);
    const double rel = std::abs(m.tension - m.predicted) / m.predicted;
    ok = ok && rel <= 0.05;
    detail += fmt("%g deg: %.4f vs %.4f; ", angle, m.tension, m.predicted);
  }
  return {ok, detail + "limit 5%"};
}

Outcome critical_dipole_length() {
  const double eps = 1.0 / 16;
  const ExperimentConfig cfg =
      parse_config({{"experiment", "dipole-sweep"},
                    {"potential", {{"n", 2}}},
                    {"grids", {{"epsilon", {eps}}, {"separation", {3.0, 4.0, 5.0, 6.0, 7.0, 8.0}}}}});
  const RunOutput out = run_experiment(cfg);
  const json& sweep = out.report["sweeps"][0];
  std::string energies;
  for (const auto& p : sweep["points"])
    energies += fmt("E(%.2f)=%.4f ", p["separation"].get<double>(), p["energy"].get<double>());
  if (!sweep.value("interior_minimum", false))
    return {false, "no interior minimum (" + sweep["trend"].get<std::string>() + "): " + energies};
  const double d_star = sweep["d_star"].get<double>();
  const double force = sweep["force_balance"].get<double>();
  const double tension = sweep["axis_tension"].get<double>();
  const double dev = sweep["rel_deviation"].get<double>();
  return {dev <= 0.3, energies + fmt("d* = %.3f, 2pi/d* = %.4f vs tension %.4f (rel. %.3f, limit 0.3)", d_star,
                                     force, tension, dev)};
}

Outcome topology_invariants() {
  const CheckResult r = check_vorticity_and_stokes(100000, 1);
  const CheckResult tie = check_tie_rule();
  return {r.passed() && tie.passed() && r.trials == 100000,
          fmt("%ld fields, %ld violations, max Stokes error %.2e; tie rule %ld/%ld", r.trials, r.violations,
              r.max_error, tie.trials - tie.violations, tie.trials)};
}

Outcome comparison_chain() {
  const CheckResult chain = check_comparison_chain(1000, 2);
  const CheckResult interp = check_interpolation_bound(1000, 3);
  return {chain.passed() && interp.passed(),
          fmt("chain: %ld violations / %ld; interpolation bound: %ld violations / %ld", chain.violations, chain.trials,
              interp.violations, interp.trials)};
}

Outcome flat_norm_oracle() {
  const CheckResult r = check_flat_norm_oracle(60, 4, 48);
  return {r.passed(), fmt("%ld instances, %ld outside tolerance, worst relative gap %.4f", r.trials, r.violations,
                          r.max_error)};
}

Outcome renormalized_monotonicity() {
  const double eps = 1.0 / 128;
  const Disk disk{Point::Zero(), 1.0};
  const DomainPtr dom = build_domain(disk, eps);
  auto snap = [&](double x) { return eps * (std::floor(x / eps) + 0.5); };
  const std::vector<double> sigmas = {0.25, 0.2, 0.15, 0.1, 0.05};
  struct Case {
    const char* name;
    std::vector<Atom> atoms;
  };
  const std::vector<Case> cases = {
      {"centered", {{Point(snap(0.0), snap(0.0)), 1}}},
      {"off-center", {{Point(snap(0.3), snap(-0.2)), 1}}},
      {"dipole", {{Point(snap(-0.3), snap(0.0)), 1}, {Point(snap(0.3), snap(0.0)), -1}}},
  };
  bool ok = true;
  double worst_rise = 0.0;
  std::string detail;
  for (const Case& c : cases) {
    ScalarField theta(dom);
    for (int s = 0; s < dom->num_sites(); ++s)
      for (const Atom& a : c.atoms) theta.values[s] += a.degree * polar_angle(dom->position(s), a.position);
    VorticityMeasure mu;
    mu.shape = disk;
    mu.atoms = c.atoms;
    const RenormalizedEstimate w = renormalized_energy_estimate(interpolate_affine(exp_map(theta)), mu, sigmas);
    // radii shrink along the list: a drop in w is an increase with sigma
    for (std::size_t k = 1; k < w.values.size(); ++k) {
      const double drop = w.values[k - 1] - w.values[k];
      worst_rise = std::max(worst_rise, drop);
      ok = ok && drop <= 0.02;
    }
    detail += fmt("%s w: %.4f..%.4f; ", c.name, w.values.front(), w.values.back());
  }
  return {ok, detail + fmt("largest increase with sigma %.4f (slack 0.02)", worst_rise)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"C1 vortex energy scaling", vortex_scaling},
      {"C2 core energy independent of sigma", core_energy_sigma_independence},
      {"C3 fractional core energy", fractional_core_energy},
      {"C4 string tension anisotropy", string_tension},
      {"C5 critical dipole length", critical_dipole_length},
      {"C6 topology invariants", topology_invariants},
      {"C7 energy comparison chain", comparison_chain},
      {"C8 flat norm oracle", flat_norm_oracle},
      {"C9 renormalized energy monotonicity", renormalized_monotonicity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.passed;
    std::printf("%s  %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str(), elapsed(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
