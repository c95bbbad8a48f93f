#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracxy/energy.hpp"
#include "fracxy/topology.hpp"

namespace fracxy {

// ---------------------------------------------------------------------------
// Initial fields

/// A vortex core of fractional degree degree/n (degree is +1 or -1).
struct Core {
  Point position = Point::Zero();
  int degree = 1;
};

/// Polyline from a core to the boundary or to another core.
struct StringPath {
  std::vector<Point> points;
};

struct VortexPrescription {
  int n = 1;
  std::vector<Core> cores;
  std::vector<StringPath> strings;
};

/// Angular coordinate of p - center in [0, 2pi), cut along the positive
/// x-axis; 0 at the center itself.
double polar_angle(const Point& p, const Point& center);

/// phi = sum_k (d_k / n) theta_k + (2pi / n) * (integer crossing count), where
/// theta_k is the angle around core k with its branch cut moved onto the
/// core's string. Jumps of phi across bonds then only occur on strings.
ScalarField construct_field(DomainPtr domain, const VortexPrescription& prescription);

/// Overwrites sites in `mask` with (degree/n) * theta(x - center), shifted by
/// the multiple of 2pi/n (2pi when match_mod_2pi) closest to the current value.
void impose_angle_data(ScalarField& phi, const std::vector<char>& mask, const Point& center,
                       int degree, int n, bool match_mod_2pi);

// ---------------------------------------------------------------------------
// Relaxation

enum class StepRule { fixed, backtracking };

struct RelaxationConfig {
  int max_iters = 20000;
  double grad_tol = 1e-7;  // sup norm over free sites
  StepRule step_rule = StepRule::backtracking;
  bool quasi_newton = true;  // L-BFGS directions
  int memory = 8;
  double fixed_step = 0.1;
  // Stop as stagnated when the energy drops by at most stall_tol * max(1, |E|)
  // over stall_window accepted iterations (kinks of the plateau can keep the
  // gradient norm away from zero at a minimiser).
  int stall_window = 200;
  double stall_tol = 1e-13;
  int restarts = 4;
  std::uint64_t seed = 1;
};

void validate(const RelaxationConfig& cfg);

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

enum class RelaxStatus { converged, max_iters, stagnated };
std::string to_string(RelaxStatus status);

struct RelaxationResult {
  ScalarField field;
  double energy = 0.0;
  double grad_norm = 0.0;
  RelaxStatus status = RelaxStatus::max_iters;
  std::vector<IterationRecord> log;
};

/// Minimises F^(n)_eps over the free sites. Accepted iterates never increase
/// the energy; a line search that cannot descend within 60 halvings, or an
/// energy stall, ends the run with status `stagnated` and the best iterate.
RelaxationResult relax(const ScalarField& phi0, const PotentialSpec& spec, const std::vector<char>& frozen,
                       const RelaxationConfig& cfg);

/// Sites within `radius` of any point (pinning masks).
std::vector<char> sites_near(const LatticeDomain& domain, const std::vector<Point>& points, double radius);

// ---------------------------------------------------------------------------
// Core energies

/// gamma(eps, sigma): min F^sym_eps on B_sigma with theta on the discrete
/// boundary; best of cfg.restarts perturbed initialisations.
double core_energy_sym(double sigma, double epsilon, const RelaxationConfig& cfg,
                       BaseProfile base = BaseProfile::one_minus_cos);

/// gamma'(eps, sigma): min F^(n)_eps on B_sigma with e^{i n phi} = e^{i d theta}
/// on the discrete boundary; restart k runs the string along lattice axis k mod 4
/// from a core moved 0.05 k sigma along it.
double core_energy_frac(double sigma, double epsilon, int degree, int n, const RelaxationConfig& cfg,
                        BaseProfile base = BaseProfile::one_minus_cos);

/// Best restart of the above, with its field and log.
RelaxationResult core_relax_sym(double sigma, double epsilon, const RelaxationConfig& cfg,
                                BaseProfile base = BaseProfile::one_minus_cos);
RelaxationResult core_relax_frac(double sigma, double epsilon, int degree, int n, const RelaxationConfig& cfg,
                                 BaseProfile base = BaseProfile::one_minus_cos);

struct GammaSample {
  double epsilon = 0.0;
  double sigma = 0.0;
  double value = 0.0;
};

struct GammaPerSigma {
  double sigma = 0.0;
  double gamma = 0.0;      // value - pi log(sigma/eps) at the smallest eps
  double error_bar = 0.0;  // |last difference| along the eps sequence
};

struct GammaExtrapolation {
  std::vector<GammaPerSigma> per_sigma;  // ascending sigma
  double gamma = 0.0;                    // from the finest sigma/eps
  double error_bar = 0.0;
  bool sigma_dependent = false;
};

GammaExtrapolation gamma_extrapolate(const std::vector<GammaSample>& table);

// ---------------------------------------------------------------------------
// Renormalized energy

enum class BallExclusion {
  clip,            // integrate each triangle over its part outside the balls
  whole_triangle,  // drop every triangle meeting a ball
};

struct RenormalizedEstimate {
  std::vector<double> sigmas;
  std::vector<double> values;  // w(sigma) per radius
  double W = 0.0;              // value at the smallest radius
};

/// w(sigma) = 1/2 int_{Omega_eps minus balls} |grad v|^2 - M pi |log sigma|,
/// M = total |degree|.
RenormalizedEstimate renormalized_energy_estimate(const InterpolatedField& v, const VorticityMeasure& mu,
                                                  const std::vector<double>& sigmas,
                                                  BallExclusion rule = BallExclusion::clip);

/// Area of the intersection of a triangle with a disk.
double triangle_disk_overlap(const Triangle& tri, const Point& center, double radius);

}  // namespace fracxy
