#include "fracxy/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/QR>

#include "fracxy/checks.hpp"

namespace fracxy {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::config, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw Error(Errc::config, "unknown key '" + key + "' in " + where);
  }
}

Point point_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(Errc::config, what + " must be a pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

Shape shape_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw Error(Errc::config, "domain needs a type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "disk") {
    reject_unknown(j, {"type", "center", "radius"}, "domain");
    Disk d;
    if (j.contains("center")) d.center = point_from_json(j.at("center"), "domain.center");
    if (j.contains("radius")) d.radius = j.at("radius").get<double>();
    if (!(d.radius > 0.0)) throw Error(Errc::config, "domain.radius must be positive");
    return d;
  }
  if (type == "rectangle") {
    reject_unknown(j, {"type", "origin", "size"}, "domain");
    Rectangle r;
    if (j.contains("origin")) r.origin = point_from_json(j.at("origin"), "domain.origin");
    if (j.contains("size")) r.size = point_from_json(j.at("size"), "domain.size");
    if (!(r.size.minCoeff() > 0.0)) throw Error(Errc::config, "domain.size must be positive");
    return r;
  }
  throw Error(Errc::config, "domain.type must be 'disk' or 'rectangle'");
}

json shape_json(const Shape& shape) {
  if (const auto* d = std::get_if<Disk>(&shape))
    return {{"type", "disk"}, {"center", point_json(d->center)}, {"radius", d->radius}};
  const auto& r = std::get<Rectangle>(shape);
  return {{"type", "rectangle"}, {"origin", point_json(r.origin)}, {"size", point_json(r.size)}};
}

std::vector<double> grid_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) throw Error(Errc::config, "grids." + name + " must be a list");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(Errc::config, "grids." + name + " must hold numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) throw Error(Errc::config, "grids." + name + " must not be empty");
  return out;
}

VortexPrescription prescription_from_json(const json& j, int n) {
  reject_unknown(j, {"cores", "strings"}, "prescription");
  VortexPrescription pr;
  pr.n = n;
  for (const auto& c : j.value("cores", json::array())) {
    reject_unknown(c, {"position", "degree"}, "prescription.cores[]");
    pr.cores.push_back({point_from_json(c.at("position"), "core position"), c.value("degree", 1)});
  }
  for (const auto& s : j.value("strings", json::array())) {
    if (!s.is_array()) throw Error(Errc::config, "a string is a list of points");
    StringPath path;
    for (const auto& p : s) path.points.push_back(point_from_json(p, "string point"));
    pr.strings.push_back(std::move(path));
  }
  if (pr.cores.empty()) throw Error(Errc::config, "prescription needs at least one core");
  return pr;
}

json prescription_json(const VortexPrescription& pr) {
  json cores = json::array(), strings = json::array();
  for (const Core& c : pr.cores) cores.push_back({{"position", point_json(c.position)}, {"degree", c.degree}});
  for (const StringPath& s : pr.strings) {
    json pts = json::array();
    for (const Point& p : s.points) pts.push_back(point_json(p));
    strings.push_back(pts);
  }
  return {{"cores", cores}, {"strings", strings}};
}

Point shape_center(const Shape& shape) {
  const auto [lo, hi] = bounding_box(shape);
  return 0.5 * (lo + hi);
}

double cell_center_coord(double v, double eps) { return eps * (std::floor(v / eps) + 0.5); }

std::string log_csv(const std::vector<IterationRecord>& log) {
  std::ostringstream os;
  os << "iter,energy,grad_norm\n";
  for (const auto& r : log) os << r.iter << ',' << num(r.energy) << ',' << num(r.grad_norm) << '\n';
  return os.str();
}

std::string field_csv(const ScalarField& phi) {
  std::ostringstream os;
  write_field_csv(os, phi);
  return os.str();
}

void keep_field(RunOutput& out, const ExperimentConfig& cfg, const std::string& tag, const ScalarField& phi,
                const std::vector<IterationRecord>* log) {
  if (!cfg.dump_fields) return;
  out.fields.emplace_back(tag, field_csv(phi));
  if (log) out.logs.emplace_back(tag, log_csv(*log));
}

json relaxation_json(const RelaxationConfig& r) {
  return {{"max_iters", r.max_iters},
          {"grad_tol", r.grad_tol},
          {"step_rule", r.step_rule == StepRule::fixed ? "fixed" : "backtracking"},
          {"quasi_newton", r.quasi_newton},
          {"memory", r.memory},
          {"fixed_step", r.fixed_step},
          {"stall_window", r.stall_window},
          {"stall_tol", r.stall_tol},
          {"restarts", r.restarts}};
}

RelaxationConfig relaxation_from_json(const json& j) {
  reject_unknown(j,
                 {"max_iters", "grad_tol", "step_rule", "quasi_newton", "memory", "fixed_step", "stall_window",
                  "stall_tol", "restarts"},
                 "relaxation");
  RelaxationConfig r;
  r.max_iters = j.value("max_iters", r.max_iters);
  r.grad_tol = j.value("grad_tol", r.grad_tol);
  const std::string rule = j.value("step_rule", std::string("backtracking"));
  if (rule == "fixed")
    r.step_rule = StepRule::fixed;
  else if (rule == "backtracking")
    r.step_rule = StepRule::backtracking;
  else
    throw Error(Errc::config, "relaxation.step_rule must be 'fixed' or 'backtracking'");
  r.quasi_newton = j.value("quasi_newton", r.quasi_newton);
  r.memory = j.value("memory", r.memory);
  r.fixed_step = j.value("fixed_step", r.fixed_step);
  r.stall_window = j.value("stall_window", r.stall_window);
  r.stall_tol = j.value("stall_tol", r.stall_tol);
  r.restarts = j.value("restarts", r.restarts);
  validate(r);
  return r;
}

void fill_defaults(ExperimentConfig& cfg, bool has_domain) {
  ParameterGrids& g = cfg.grids;
  switch (cfg.experiment) {
    case ExperimentKind::core_energy:
      if (g.epsilon.empty()) g.epsilon = {1.0 / 16, 1.0 / 32, 1.0 / 64};
      if (g.sigma.empty()) g.sigma = {0.5, 1.0};
      break;
    case ExperimentKind::vortex_scaling:
      if (!has_domain) cfg.domain = Disk{Point::Zero(), 1.0};
      if (g.epsilon.empty()) g.epsilon = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
      break;
    case ExperimentKind::string_tension:
      if (!has_domain) cfg.domain = Rectangle{Point::Zero(), Point(1.0, 1.0)};
      if (g.epsilon.empty()) g.epsilon = {1.0 / 64};
      if (g.angle.empty()) g.angle = {0.0, 30.0, 45.0, 60.0, 90.0};
      break;
    case ExperimentKind::dipole_sweep:
      if (!has_domain) cfg.domain = Rectangle{Point(-6.0, -6.0), Point(12.0, 12.0)};
      if (g.epsilon.empty()) g.epsilon = {1.0 / 32};
      if (g.separation.empty()) g.separation = {3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
      break;
    case ExperimentKind::invariants:
    case ExperimentKind::flatnorm_check:
      break;
  }
}

void check_config(const ExperimentConfig& cfg) {
  auto positive = [](const std::vector<double>& v, const char* name) {
    for (double x : v)
      if (!(x > 0.0)) throw Error(Errc::config, std::string("grids.") + name + " values must be positive");
  };
  positive(cfg.grids.epsilon, "epsilon");
  positive(cfg.grids.sigma, "sigma");
  positive(cfg.grids.separation, "separation");
  if (cfg.n < 1) throw Error(Errc::config, "potential.n must be at least 1");
  if (cfg.potential_epsilon && !(*cfg.potential_epsilon > 0.0 && *cfg.potential_epsilon < eval_base(cfg.base, kPi)))
    throw Error(Errc::config, "potential.epsilon must lie in (0, f(pi))");
  if (cfg.workers < 1) throw Error(Errc::config, "workers must be at least 1");
  if (cfg.samples < 1) throw Error(Errc::config, "samples must be at least 1");
  if (!(cfg.tension_tolerance > 0.0)) throw Error(Errc::config, "tension_tolerance must be positive");
  for (double eps : cfg.grids.epsilon) {
    for (double sigma : cfg.grids.sigma) {
      if (cfg.experiment == ExperimentKind::core_energy && !(eps < 0.25 * sigma))
        throw Error(Errc::config, "every epsilon must be below sigma / 4");
    }
  }
  switch (cfg.experiment) {
    case ExperimentKind::vortex_scaling:
      if (cfg.grids.epsilon.size() < 3) throw Error(Errc::config, "vortex-scaling needs at least 3 epsilon values");
      break;
    case ExperimentKind::string_tension:
      if (cfg.n < 2) throw Error(Errc::config, "string-tension needs n >= 2");
      if (!std::holds_alternative<Rectangle>(cfg.domain))
        throw Error(Errc::config, "string-tension needs a rectangle domain");
      break;
    case ExperimentKind::dipole_sweep:
      // a (+1/n, +1/n) pair can end its string on the partner only for n = 2
      if (cfg.n != 2) throw Error(Errc::config, "dipole-sweep needs n = 2");
      break;
    default:
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::core_energy: return "core-energy";
    case ExperimentKind::vortex_scaling: return "vortex-scaling";
    case ExperimentKind::string_tension: return "string-tension";
    case ExperimentKind::dipole_sweep: return "dipole-sweep";
    case ExperimentKind::invariants: return "invariants";
    case ExperimentKind::flatnorm_check: return "flatnorm-check";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::core_energy, ExperimentKind::vortex_scaling, ExperimentKind::string_tension,
                 ExperimentKind::dipole_sweep, ExperimentKind::invariants, ExperimentKind::flatnorm_check}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::config, "unknown experiment '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  try {
    reject_unknown(j,
                   {"experiment", "domain", "potential", "grids", "relaxation", "output_dir", "seed", "workers",
                    "dump_fields", "tension_tolerance", "samples", "prescription"},
                   "config");
    if (!j.contains("experiment")) throw Error(Errc::config, "config needs an 'experiment'");
    ExperimentConfig cfg;
    cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    const bool has_domain = j.contains("domain");
    if (has_domain) cfg.domain = shape_from_json(j.at("domain"));
    if (j.contains("potential")) {
      const json& p = j.at("potential");
      reject_unknown(p, {"n", "epsilon", "base"}, "potential");
      cfg.n = p.value("n", 1);
      if (p.contains("epsilon") && !p.at("epsilon").is_null()) cfg.potential_epsilon = p.at("epsilon").get<double>();
      if (p.contains("base")) cfg.base = base_profile_from_string(p.at("base").get<std::string>());
    }
    if (j.contains("grids")) {
      const json& g = j.at("grids");
      reject_unknown(g, {"epsilon", "sigma", "separation", "angle"}, "grids");
      if (g.contains("epsilon")) cfg.grids.epsilon = grid_from_json(g.at("epsilon"), "epsilon");
      if (g.contains("sigma")) cfg.grids.sigma = grid_from_json(g.at("sigma"), "sigma");
      if (g.contains("separation")) cfg.grids.separation = grid_from_json(g.at("separation"), "separation");
      if (g.contains("angle")) cfg.grids.angle = grid_from_json(g.at("angle"), "angle");
    }
    if (j.contains("relaxation")) cfg.relaxation = relaxation_from_json(j.at("relaxation"));
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.dump_fields = j.value("dump_fields", cfg.dump_fields);
    cfg.tension_tolerance = j.value("tension_tolerance", cfg.tension_tolerance);
    cfg.samples = j.value("samples", cfg.samples);
    if (j.contains("prescription")) cfg.prescription = prescription_from_json(j.at("prescription"), cfg.n);
    cfg.relaxation.seed = cfg.seed;
    fill_defaults(cfg, has_domain);
    check_config(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    throw Error(Errc::config, e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["domain"] = shape_json(cfg.domain);
  j["potential"] = {{"n", cfg.n},
                    {"epsilon", cfg.potential_epsilon ? json(*cfg.potential_epsilon) : json(nullptr)},
                    {"base", to_string(cfg.base)}};
  j["grids"] = json::object();
  for (const auto& [name, grid] : {std::pair{"epsilon", &cfg.grids.epsilon}, std::pair{"sigma", &cfg.grids.sigma},
                                   std::pair{"separation", &cfg.grids.separation}, std::pair{"angle", &cfg.grids.angle}})
    if (!grid->empty()) j["grids"][name] = *grid;
  j["relaxation"] = relaxation_json(cfg.relaxation);
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["dump_fields"] = cfg.dump_fields;
  j["tension_tolerance"] = cfg.tension_tolerance;
  j["samples"] = cfg.samples;
  if (cfg.prescription) j["prescription"] = prescription_json(*cfg.prescription);
  return j;
}

json to_json(const EnergyBreakdown& e) {
  return {{"total", e.total}, {"main", e.main}, {"plateau", e.plateau}, {"n_bonds_plateau", e.n_bonds_plateau}};
}

json to_json(const VorticityMeasure& mu) {
  json atoms = json::array();
  for (const Atom& a : mu.atoms) atoms.push_back({{"x", a.position.x()}, {"y", a.position.y()}, {"d", a.degree}});
  return {{"atoms", atoms}, {"domain_id", shape_id(mu.shape)}};
}

json to_json(const StringSummary& s) {
  json comps = json::array();
  for (const StringComponent& c : s.components) {
    json ends = json::array();
    for (const Point& p : c.endpoints) ends.push_back(point_json(p));
    comps.push_back({{"endpoints", ends}, {"n_bonds", c.n_bonds}});
  }
  return {{"length_1norm", s.length_1norm}, {"n_components", s.n_components}, {"components", comps}};
}

// ---------------------------------------------------------------------------
// Worker pool

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(std::max(count, 0));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(workers, 1, std::max(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Measurements

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::insufficient_data, "need at least two points to fit");
  Eigen::MatrixXd A(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b[i] = y[i];
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  LinearFit fit{sol[0], sol[1], {}};
  for (std::size_t i = 0; i < x.size(); ++i) fit.residuals.push_back(y[i] - (fit.slope * x[i] + fit.intercept));
  return fit;
}

namespace {

// Wall through p0 with direction (cos a, sin a); phi jumps by 2pi/n across it.
struct Wall {
  Point p0;
  Point dir;
  Point normal;
};

Wall make_wall(const Rectangle& rect, double eps, double angle_deg) {
  const double a = angle_deg * kPi / 180.0;
  Wall w;
  w.dir = Point(std::cos(a), std::sin(a));
  w.normal = Point(-w.dir.y(), w.dir.x());
  const Point center = rect.origin + 0.5 * rect.size;
  // half a cell off the lattice plus a quarter cell along the normal keeps
  // axis-parallel and diagonal walls clear of every site
  w.p0 = Point(cell_center_coord(center.x(), eps), cell_center_coord(center.y(), eps)) + 0.25 * eps * w.normal;
  return w;
}

double clipped_length(const Wall& w, const Point& lo, const Point& hi) {
  double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const double d = w.dir[k];
    if (std::abs(d) < 1e-15) {
      if (w.p0[k] < lo[k] || w.p0[k] > hi[k]) return 0.0;
      continue;
    }
    double a = (lo[k] - w.p0[k]) / d, b = (hi[k] - w.p0[k]) / d;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return std::max(0.0, t1 - t0);
}

ScalarField wall_field(const DomainPtr& dom, const Wall& w, int n) {
  Eigen::VectorXd phi(dom->num_sites());
  for (int s = 0; s < dom->num_sites(); ++s)
    phi[s] = (dom->position(s) - w.p0).dot(w.normal) > 0.0 ? 2.0 * kPi / n : 0.0;
  return ScalarField(dom, std::move(phi));
}

WallMeasurement measure_wall_impl(const Rectangle& rect, double eps, const PotentialSpec& spec, double angle_deg,
                                  ScalarField* field) {
  const DomainPtr dom = build_domain(rect, eps);
  const Wall w = make_wall(rect, eps, angle_deg);
  const ScalarField phi = wall_field(dom, w, spec.n);
  WallMeasurement m;
  m.angle_deg = angle_deg;
  m.energy = energy_fn_eps(phi, spec).total;
  m.n_bonds = static_cast<int>(jump_pairs(phi, spec.n).jump_bonds.size());
  const Point grow(0.5 * eps, 0.5 * eps);
  m.length = clipped_length(w, rect.origin - grow, rect.origin + rect.size + grow);
  m.tension = m.length > 0.0 ? m.energy / m.length : 0.0;
  const double a = angle_deg * kPi / 180.0;
  m.predicted = std::abs(std::cos(a)) + std::abs(std::sin(a));
  if (field) *field = phi;
  return m;
}

}  // namespace

WallMeasurement measure_wall(const Rectangle& rect, double epsilon, int n, double angle_deg, BaseProfile base) {
  return measure_wall_impl(rect, epsilon, PotentialSpec{n, epsilon, base}, angle_deg, nullptr);
}

namespace {

DipolePoint dipole_energy_impl(const Shape& domain, double eps, const PotentialSpec& spec, double separation,
                               const RelaxationConfig& relaxation, ScalarField* field,
                               std::vector<IterationRecord>* log) {
  const DomainPtr dom = build_domain(domain, eps);
  const Point c = shape_center(domain);
  const double y = cell_center_coord(c.y(), eps);
  const Point a(cell_center_coord(c.x() - 0.5 * separation, eps), y);
  const Point b(cell_center_coord(c.x() + 0.5 * separation, eps), y);
  VortexPrescription pr;
  pr.n = spec.n;
  pr.cores = {{a, 1}, {b, 1}};
  pr.strings = {{{a, b}}};
  ScalarField phi = construct_field(dom, pr);
  // far field of the total charge 2/n, matched to the initial field mod 2pi
  impose_angle_data(phi, dom->boundary_mask(), 0.5 * (a + b), 2, spec.n, true);
  std::vector<char> frozen = sites_near(*dom, {a, b}, 2.0 * eps);
  for (int s = 0; s < dom->num_sites(); ++s) frozen[s] |= dom->boundary_mask()[s];
  RelaxationResult r = relax(phi, spec, frozen, relaxation);
  if (field) *field = r.field;
  if (log) *log = r.log;
  return {(b - a).norm(), r.energy, r.status};
}

}  // namespace

DipolePoint dipole_energy(const Shape& domain, double epsilon, int n, double separation,
                          const RelaxationConfig& relaxation, BaseProfile base, ScalarField* field,
                          std::vector<IterationRecord>* log) {
  return dipole_energy_impl(domain, epsilon, PotentialSpec{n, epsilon, base}, separation, relaxation, field, log);
}

DipoleSweep refine_minimum(std::vector<DipolePoint> points) {
  if (points.size() < 3) throw Error(Errc::insufficient_data, "need at least three separations");
  std::sort(points.begin(), points.end(), [](auto& p, auto& q) { return p.separation < q.separation; });
  DipoleSweep out;
  out.points = points;
  std::size_t i = 0;
  for (std::size_t k = 1; k < points.size(); ++k)
    if (points[k].energy < points[i].energy) i = k;
  if (i == 0) {
    out.trend = "increasing";
    return out;
  }
  if (i + 1 == points.size()) {
    out.trend = "decreasing";
    return out;
  }
  const double x0 = points[i - 1].separation, x1 = points[i].separation, x2 = points[i + 1].separation;
  const double y0 = points[i - 1].energy, y1 = points[i].energy, y2 = points[i + 1].energy;
  const double num_ = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  out.interior_minimum = true;
  out.trend = "interior";
  out.d_star = den != 0.0 ? x1 - 0.5 * num_ / den : x1;
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

RunOutput run_core_energy(const ExperimentConfig& cfg) {
  struct Task {
    double eps, sigma;
    bool frac;
  };
  std::vector<Task> tasks;
  for (double sigma : cfg.grids.sigma)
    for (double eps : cfg.grids.epsilon) {
      tasks.push_back({eps, sigma, false});
      if (cfg.n >= 2) tasks.push_back({eps, sigma, true});
    }
  std::vector<RelaxationResult> results(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), cfg.workers, [&](int i) {
    const Task& t = tasks[i];
    results[i] = t.frac ? core_relax_frac(t.sigma, t.eps, 1, cfg.n, cfg.relaxation, cfg.base)
                        : core_relax_sym(t.sigma, t.eps, cfg.relaxation, cfg.base);
  });

  RunOutput out;
  const std::string header = "epsilon,sigma,energy,gamma_minus_log\n";
  std::ostringstream sym_csv, frac_csv;
  sym_csv << header;
  frac_csv << header;
  std::vector<GammaSample> sym_table, frac_table;
  json entries = json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const double e = results[i].energy;
    const double g = e - kPi * std::log(t.sigma / t.eps);
    (t.frac ? frac_csv : sym_csv) << num(t.eps) << ',' << num(t.sigma) << ',' << num(e) << ',' << num(g) << '\n';
    (t.frac ? frac_table : sym_table).push_back({t.eps, t.sigma, e});
    const std::string tag = std::string(t.frac ? "frac" : "sym") + "_s" + std::to_string(i);
    entries.push_back({{"tag", tag},
                       {"kind", t.frac ? "frac" : "sym"},
                       {"epsilon", t.eps},
                       {"sigma", t.sigma},
                       {"energy", e},
                       {"status", to_string(results[i].status)}});
    keep_field(out, cfg, tag, results[i].field, &results[i].log);
  }

  auto extrapolation = [](const std::vector<GammaSample>& table) -> json {
    try {
      const GammaExtrapolation ex = gamma_extrapolate(table);
      json per = json::array();
      for (const auto& p : ex.per_sigma)
        per.push_back({{"sigma", p.sigma}, {"gamma", p.gamma}, {"error_bar", p.error_bar}});
      return {{"gamma", ex.gamma}, {"error_bar", ex.error_bar}, {"sigma_dependent", ex.sigma_dependent},
              {"per_sigma", per}};
    } catch (const Error& e) {
      return {{"error", to_string(e.code())}, {"message", e.what()}};
    }
  };
  out.report["entries"] = entries;
  out.report["gamma_sym"] = extrapolation(sym_table);
  if (cfg.n >= 2) {
    out.report["gamma_frac"] = extrapolation(frac_table);
    const json& a = out.report["gamma_frac"];
    const json& b = out.report["gamma_sym"];
    if (a.contains("gamma") && b.contains("gamma"))
      out.report["gap"] = a["gamma"].get<double>() - b["gamma"].get<double>();
    out.results_csv = frac_csv.str();
    out.extra_csv.emplace_back("sym_reference.csv", sym_csv.str());
    out.report["columns"] = {{"results.csv", "epsilon,sigma,energy,gamma_minus_log (fractional core, degree +1/n)"},
                             {"sym_reference.csv", "epsilon,sigma,energy,gamma_minus_log (F^sym core)"}};
  } else {
    out.results_csv = sym_csv.str();
    out.report["columns"] = {{"results.csv", "epsilon,sigma,energy,gamma_minus_log"}};
  }
  return out;
}

RunOutput run_vortex_scaling(const ExperimentConfig& cfg) {
  const std::vector<double>& eps_list = cfg.grids.epsilon;
  if (eps_list.size() < 3) throw Error(Errc::insufficient_data, "vortex scaling needs at least 3 epsilon values");
  std::vector<RelaxationResult> results(eps_list.size());
  std::vector<VortexPrescription> used(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()), cfg.workers, [&](int i) {
    const double eps = eps_list[i];
    const DomainPtr dom = build_domain(cfg.domain, eps);
    VortexPrescription pr;
    if (cfg.prescription) {
      pr = *cfg.prescription;
    } else {
      const Point c = shape_center(cfg.domain);
      const Point core(cell_center_coord(c.x(), eps), cell_center_coord(c.y(), eps));
      pr.cores.push_back({core, 1});
      if (cfg.n >= 2) {
        const auto [lo, hi] = bounding_box(cfg.domain);
        Point end(hi.x(), core.y());
        if (const auto* d = std::get_if<Disk>(&cfg.domain)) {
          const double dy = core.y() - d->center.y();
          end.x() = d->center.x() + std::sqrt(d->radius * d->radius - dy * dy);
        }
        pr.strings.push_back({{core, end}});
      }
    }
    pr.n = cfg.n;
    used[i] = pr;
    ScalarField phi = construct_field(dom, pr);
    std::vector<char> frozen = dom->boundary_mask();
    if (pr.cores.size() >= 2) {
      std::vector<Point> cores;
      for (const Core& k : pr.cores) cores.push_back(k.position);
      const std::vector<char> pins = sites_near(*dom, cores, 2.0 * eps);
      for (int s = 0; s < dom->num_sites(); ++s) frozen[s] |= pins[s];
    }
    results[i] = relax(phi, cfg.potential(eps), frozen, cfg.relaxation);
  });

  RunOutput out;
  std::vector<double> x, y;
  std::ostringstream csv;
  csv << "epsilon,log_inv_epsilon,energy,status\n";
  json entries = json::array();
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    x.push_back(std::log(1.0 / eps_list[i]));
    y.push_back(results[i].energy);
    csv << num(eps_list[i]) << ',' << num(x.back()) << ',' << num(y.back()) << ',' << to_string(results[i].status)
        << '\n';
    const std::string tag = "scaling_e" + std::to_string(i);
    const ScalarField power(results[i].field.domain, cfg.n * results[i].field.values);
    entries.push_back({{"tag", tag},
                       {"epsilon", eps_list[i]},
                       {"energy", to_json(energy_fn_eps(results[i].field, cfg.potential(eps_list[i])))},
                       {"vorticity", to_json(vorticity_measure(power))},
                       {"strings", to_json(extract_strings(jump_pairs(results[i].field, cfg.n)))},
                       {"status", to_string(results[i].status)},
                       {"iterations", results[i].log.back().iter}});
    keep_field(out, cfg, tag, results[i].field, &results[i].log);
  }
  const LinearFit fit = least_squares(x, y);
  int mass = 0;
  for (const Core& c : used.front().cores) mass += std::abs(c.degree);
  const double expected = kPi * mass;
  out.results_csv = csv.str();
  out.report["entries"] = entries;
  out.report["fit"] = {{"slope", fit.slope},
                       {"intercept", fit.intercept},
                       {"residuals", fit.residuals},
                       {"expected_slope", expected},
                       {"slope_rel_error", std::abs(fit.slope - expected) / expected}};
  out.report["columns"] = {{"results.csv", "epsilon,log_inv_epsilon,energy,status"}};
  return out;
}

RunOutput run_string_tension(const ExperimentConfig& cfg) {
  const auto& rect = std::get<Rectangle>(cfg.domain);
  struct Task {
    double eps, angle;
  };
  std::vector<Task> tasks;
  for (double eps : cfg.grids.epsilon)
    for (double a : cfg.grids.angle) tasks.push_back({eps, a});
  std::vector<WallMeasurement> m(tasks.size());
  std::vector<ScalarField> fields(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), cfg.workers, [&](int i) {
    m[i] = measure_wall_impl(rect, tasks[i].eps, cfg.potential(tasks[i].eps), tasks[i].angle,
                             cfg.dump_fields ? &fields[i] : nullptr);
  });
  RunOutput out;
  std::ostringstream csv;
  csv << "epsilon,angle_deg,n_bonds,energy,length,tension,predicted,rel_error\n";
  json entries = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const double rel = std::abs(m[i].tension - m[i].predicted) / m[i].predicted;
    worst = std::max(worst, rel);
    csv << num(tasks[i].eps) << ',' << num(m[i].angle_deg) << ',' << m[i].n_bonds << ',' << num(m[i].energy) << ','
        << num(m[i].length) << ',' << num(m[i].tension) << ',' << num(m[i].predicted) << ',' << num(rel) << '\n';
    const std::string tag = "wall_e" + std::to_string(i / cfg.grids.angle.size()) + "_a" +
                            std::to_string(i % cfg.grids.angle.size());
    entries.push_back({{"tag", tag},
                       {"epsilon", tasks[i].eps},
                       {"angle_deg", m[i].angle_deg},
                       {"n_bonds", m[i].n_bonds},
                       {"tension", m[i].tension},
                       {"predicted", m[i].predicted},
                       {"rel_error", rel}});
    if (cfg.dump_fields) keep_field(out, cfg, tag, fields[i], nullptr);
  }
  out.results_csv = csv.str();
  out.report["entries"] = entries;
  out.report["max_rel_error"] = worst;
  out.report["columns"] = {{"results.csv", "epsilon,angle_deg,n_bonds,energy,length,tension,predicted,rel_error"}};
  return out;
}

RunOutput run_dipole_sweep(const ExperimentConfig& cfg) {
  struct Task {
    double eps, sep;
  };
  std::vector<Task> tasks;
  for (double eps : cfg.grids.epsilon)
    for (double d : cfg.grids.separation) tasks.push_back({eps, d});
  std::vector<DipolePoint> pts(tasks.size());
  std::vector<ScalarField> fields(tasks.size());
  std::vector<std::vector<IterationRecord>> logs(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), cfg.workers, [&](int i) {
    pts[i] = dipole_energy_impl(cfg.domain, tasks[i].eps, cfg.potential(tasks[i].eps), tasks[i].sep, cfg.relaxation,
                                &fields[i], &logs[i]);
  });

  RunOutput out;
  std::ostringstream csv;
  csv << "epsilon,separation,energy,status\n";
  json sweeps = json::array();
  const std::size_t per = cfg.grids.separation.size();
  for (std::size_t e = 0; e < cfg.grids.epsilon.size(); ++e) {
    const double eps = cfg.grids.epsilon[e];
    std::vector<DipolePoint> row(pts.begin() + e * per, pts.begin() + (e + 1) * per);
    json points = json::array();
    for (std::size_t k = 0; k < per; ++k) {
      const std::size_t i = e * per + k;
      csv << num(eps) << ',' << num(pts[i].separation) << ',' << num(pts[i].energy) << ','
          << to_string(pts[i].status) << '\n';
      const std::string tag = "dipole_e" + std::to_string(e) + "_d" + std::to_string(k);
      points.push_back({{"tag", tag},
                        {"separation", pts[i].separation},
                        {"energy", pts[i].energy},
                        {"status", to_string(pts[i].status)}});
      keep_field(out, cfg, tag, fields[i], &logs[i]);
    }
    const Rectangle probe{Point::Zero(), Point(1.0, 1.0)};
    const double tension = measure_wall_impl(probe, eps, cfg.potential(eps), 0.0, nullptr).tension;
    json sweep = {{"epsilon", eps}, {"points", points}, {"axis_tension", tension}};
    if (row.size() >= 3) {
      const DipoleSweep s = refine_minimum(row);
      sweep["trend"] = s.trend;
      sweep["interior_minimum"] = s.interior_minimum;
      if (s.interior_minimum) {
        const double force = 2.0 * kPi / s.d_star;
        const double dev = std::abs(force - tension) / tension;
        sweep["d_star"] = s.d_star;
        sweep["force_balance"] = force;
        sweep["rel_deviation"] = dev;
        sweep["within_tolerance"] = dev <= cfg.tension_tolerance;
      } else {
        sweep["conclusion"] = "inconclusive";
      }
    } else {
      sweep["conclusion"] = "inconclusive";
      sweep["trend"] = "too few separations";
    }
    sweeps.push_back(sweep);
  }
  out.results_csv = csv.str();
  out.report["sweeps"] = sweeps;
  out.report["columns"] = {{"results.csv", "epsilon,separation,energy,status"}};
  return out;
}

namespace {

RunOutput checks_output(const std::vector<CheckResult>& checks) {
  RunOutput out;
  std::ostringstream csv;
  csv << "check,trials,violations,max_error,passed\n";
  json list = json::array();
  for (const CheckResult& c : checks) {
    csv << c.name << ',' << c.trials << ',' << c.violations << ',' << num(c.max_error) << ','
        << (c.passed() ? "true" : "false") << '\n';
    list.push_back({{"name", c.name},
                    {"trials", c.trials},
                    {"violations", c.violations},
                    {"max_error", c.max_error},
                    {"passed", c.passed()}});
    out.passed = out.passed && c.passed();
  }
  out.results_csv = csv.str();
  out.report["checks"] = list;
  out.report["passed"] = out.passed;
  out.report["columns"] = {{"results.csv", "check,trials,violations,max_error,passed"}};
  return out;
}

}  // namespace

RunOutput run_invariant_suite(const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.seed;
  const int samples = cfg.samples;
  std::vector<std::function<CheckResult()>> jobs = {
      [&] { return check_vorticity_and_stokes(samples, seed); },
      [&] { return check_tie_rule(); },
      [&] { return check_comparison_chain(samples, seed + 1); },
      [&] { return check_interpolation_bound(samples, seed + 2); },
      [&] { return check_construct_roundtrip(50, seed + 3); },
      [&] { return check_flat_norm_oracle(std::max(1, samples / 50), seed + 4, 48); },
      [&] { return check_relax_monotone(5, seed + 5); },
  };
  std::vector<CheckResult> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.workers, [&](int i) { results[i] = jobs[i](); });
  return checks_output(results);
}

RunOutput run_flatnorm_check(const ExperimentConfig& cfg) {
  return checks_output({check_flat_norm_oracle(cfg.samples, cfg.seed, 48)});
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  RunOutput out;
  switch (cfg.experiment) {
    case ExperimentKind::core_energy: out = run_core_energy(cfg); break;
    case ExperimentKind::vortex_scaling: out = run_vortex_scaling(cfg); break;
    case ExperimentKind::string_tension: out = run_string_tension(cfg); break;
    case ExperimentKind::dipole_sweep: out = run_dipole_sweep(cfg); break;
    case ExperimentKind::invariants: out = run_invariant_suite(cfg); break;
    case ExperimentKind::flatnorm_check: out = run_flatnorm_check(cfg); break;
  }
  out.report["experiment"] = to_string(cfg.experiment);
  out.report["config"] = to_json(cfg);
  return out;
}

void write_run(const std::filesystem::path& dir, const ExperimentConfig& cfg, const RunOutput& out) {
  namespace fs = std::filesystem;
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::resource, "cannot write " + p.string());
    f << text;
  };
  fs::create_directories(dir);
  write(dir / "config.json", to_json(cfg).dump(2) + "\n");
  write(dir / "results.csv", out.results_csv);
  write(dir / "report.json", out.report.dump(2) + "\n");
  for (const auto& [name, text] : out.extra_csv) write(dir / name, text);
  if (cfg.dump_fields) {
    fs::create_directories(dir / "fields");
    fs::create_directories(dir / "logs");
    for (const auto& [tag, text] : out.fields) write(dir / "fields" / (tag + ".csv"), text);
    for (const auto& [tag, text] : out.logs) write(dir / "logs" / (tag + ".csv"), text);
  }
}

}  // namespace fracxy
