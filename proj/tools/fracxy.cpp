// fracxy: run experiment configs, the invariant suite, or inspect dumped fields.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "fracxy/experiments.hpp"

namespace fs = std::filesystem;
using namespace fracxy;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;

  void apply(ExperimentConfig& cfg) const {
    if (seed) {
      cfg.seed = *seed;
      cfg.relaxation.seed = *seed;
    }
    if (workers) {
      if (*workers < 1) throw Error(Errc::config, "--workers must be at least 1");
      cfg.workers = *workers;
    }
    if (out) cfg.output_dir = *out;
  }
};

int execute(const ExperimentConfig& cfg) {
  const RunOutput out = run_experiment(cfg);
  write_run(cfg.output_dir, cfg, out);
  std::cout << to_string(cfg.experiment) << ": wrote " << cfg.output_dir << "\n";
  if (out.report.contains("checks")) {
    for (const auto& c : out.report["checks"])
      std::cout << "  " << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " ("
                << c["violations"] << "/" << c["trials"] << " violations)\n";
  }
  return out.passed ? kOk : kCheckFailed;
}

int dump_field(const fs::path& run_dir, const std::string& tag) {
  const fs::path file = run_dir / "fields" / (tag + ".csv");
  std::ifstream in(file);
  if (!in) {
    std::cerr << "error: no field dump " << file << "\n";
    return kConfigError;
  }
  int n = 1;
  std::ifstream cfg_in(run_dir / "config.json");
  if (cfg_in) {
    const auto j = nlohmann::json::parse(cfg_in, nullptr, false);
    if (!j.is_discarded() && j.contains("potential")) n = j["potential"].value("n", 1);
  }
  const auto rows = read_field_csv(in);
  std::cout << "ix,iy,x,y,phi,u_x,u_y,v_x,v_y\n" << std::setprecision(17);
  for (const FieldRow& r : rows) {
    std::cout << r.ix << ',' << r.iy << ',' << r.x << ',' << r.y << ',' << r.phi << ',' << std::cos(r.phi) << ','
              << std::sin(r.phi) << ',' << std::cos(n * r.phi) << ',' << std::sin(n * r.phi) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice XY model with n-fold wells: vortex, string and core-energy experiments"};
  app.require_subcommand(1);
  Overrides ov;
  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--seed", ov.seed, "RNG seed (overrides the config)");
    cmd->add_option("--workers", ov.workers, "worker threads for parameter grids");
    cmd->add_option("--out", ov.out, "output directory (overrides output_dir)");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required();
  add_overrides(run);

  auto* check = app.add_subcommand("check", "run the invariant suite with default settings");
  add_overrides(check);

  std::string run_dir, tag;
  auto* dump = app.add_subcommand("dump-field", "print a dumped field with spin columns u = e^{i phi}, v = u^n");
  dump->add_option("run-dir", run_dir, "run directory")->required();
  dump->add_option("tag", tag, "field tag (file name in fields/ without .csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      ov.apply(cfg);
      return execute(cfg);
    }
    if (*check) {
      ExperimentConfig cfg = parse_config({{"experiment", "invariants"}, {"output_dir", "runs/check"}});
      ov.apply(cfg);
      return execute(cfg);
    }
    if (*dump) return dump_field(run_dir, tag);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    const bool config_like = e.code() == Errc::config || e.code() == Errc::invalid_prescription;
    return config_like ? kConfigError : kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kOk;
}
