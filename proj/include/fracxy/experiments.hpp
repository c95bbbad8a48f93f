#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracxy/solvers.hpp"

namespace fracxy {

enum class ExperimentKind { core_energy, vortex_scaling, string_tension, dipole_sweep, invariants, flatnorm_check };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct ParameterGrids {
  std::vector<double> epsilon;
  std::vector<double> sigma;
  std::vector<double> separation;
  std::vector<double> angle;  // degrees
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::core_energy;
  Shape domain = Disk{};
  int n = 1;
  std::optional<double> potential_epsilon;  // unset: the lattice spacing
  BaseProfile base = BaseProfile::one_minus_cos;
  ParameterGrids grids;
  RelaxationConfig relaxation;
  std::string output_dir = "runs/out";
  std::uint64_t seed = 1;
  int workers = 1;
  bool dump_fields = false;
  double tension_tolerance = 0.3;  // dipole force-balance budget
  int samples = 1000;              // random trials (invariants, flatnorm-check)
  std::optional<VortexPrescription> prescription;

  PotentialSpec potential(double lattice_epsilon) const {
    return {n, potential_epsilon.value_or(lattice_epsilon), base};
  }
};

/// Strict parsing: unknown keys, wrong types and inconsistent grids throw
/// Errc::config. Missing grids get per-experiment defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Fully resolved config (every default spelled out).
nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const VorticityMeasure& mu);
nlohmann::json to_json(const StringSummary& s);

/// Everything a run writes besides config.json.
struct RunOutput {
  nlohmann::json report;
  std::string results_csv;
  std::vector<std::pair<std::string, std::string>> extra_csv;  // (file name, content)
  std::vector<std::pair<std::string, std::string>> fields;     // (tag, field csv)
  std::vector<std::pair<std::string, std::string>> logs;       // (tag, log csv)
  bool passed = true;  // false only for failed checks
};

RunOutput run_core_energy(const ExperimentConfig& cfg);
RunOutput run_vortex_scaling(const ExperimentConfig& cfg);
RunOutput run_string_tension(const ExperimentConfig& cfg);
RunOutput run_dipole_sweep(const ExperimentConfig& cfg);
RunOutput run_invariant_suite(const ExperimentConfig& cfg);
RunOutput run_flatnorm_check(const ExperimentConfig& cfg);
RunOutput run_experiment(const ExperimentConfig& cfg);

/// Writes config.json, results.csv, report.json and, when dump_fields is set,
/// fields/<tag>.csv and logs/<tag>.csv under dir.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& cfg, const RunOutput& out);

/// Calls fn(0..count-1) on up to `workers` threads. Results are placed by
/// index; the first exception by index is rethrown.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

// ---------------------------------------------------------------------------
// Measurements shared with the tests

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct WallMeasurement {
  double angle_deg = 0.0;
  int n_bonds = 0;
  double energy = 0.0;
  double length = 0.0;  // Euclidean length of the wall inside the dual region
  double tension = 0.0;
  double predicted = 0.0;  // |cos a| + |sin a|
};

/// Straight wall of jump 2pi/n across a rectangle at angle a; the wall is
/// offset so that it passes through no site. Length is measured inside the
/// rectangle grown by eps/2 on every side (the union of dual cells).
WallMeasurement measure_wall(const Rectangle& rect, double epsilon, int n, double angle_deg,
                             BaseProfile base = BaseProfile::one_minus_cos);

struct DipolePoint {
  double separation = 0.0;  // realised distance between the pinned cores
  double energy = 0.0;
  RelaxStatus status = RelaxStatus::max_iters;
};

struct DipoleSweep {
  std::vector<DipolePoint> points;
  bool interior_minimum = false;
  double d_star = 0.0;
  std::string trend;  // "decreasing", "increasing" or "interior"
};

/// Relaxed energy of a pinned (+1/n, +1/n) pair joined by a straight
/// horizontal string, for one separation.
DipolePoint dipole_energy(const Shape& domain, double epsilon, int n, double separation,
                          const RelaxationConfig& relaxation, BaseProfile base = BaseProfile::one_minus_cos,
                          ScalarField* field = nullptr, std::vector<IterationRecord>* log = nullptr);

/// Locates the interior minimum by a parabola through the lowest grid point
/// and its two neighbours.
DipoleSweep refine_minimum(std::vector<DipolePoint> points);

}  // namespace fracxy
