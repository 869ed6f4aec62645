#include "actopt/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actopt/catalog.hpp"

namespace actopt {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct RawValue {
  std::string text;
  int line = 0;
};

// key = value file with '#' comments; later duplicates override earlier ones.
std::map<std::string, RawValue> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open scenario file '" + path + "'");
  std::map<std::string, RawValue> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected 'key = value', got '" + body + "'");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    kv[key] = RawValue{value, lineno};
  }
  return kv;
}

class Fields {
 public:
  explicit Fields(std::map<std::string, RawValue> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key) {
    const RawValue& rv = at(key);
    return rv.text;
  }

  double get_double(const std::string& key) {
    const RawValue& rv = at(key);
    try {
      size_t pos = 0;
      double v = std::stod(rv.text, &pos);
      if (pos != rv.text.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(rv.line, "field '" + key + "' expects a number, got '" + rv.text + "'");
    }
  }

  int get_int(const std::string& key) {
    const RawValue& rv = at(key);
    try {
      size_t pos = 0;
      int v = std::stoi(rv.text, &pos);
      if (pos != rv.text.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(rv.line, "field '" + key + "' expects an integer, got '" + rv.text + "'");
    }
  }

  std::vector<double> get_double_list(const std::string& key) {
    const RawValue& rv = at(key);
    std::vector<double> out;
    std::stringstream ss(rv.text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError(rv.line, "field '" + key + "' expects numbers, got '" + tok + "'");
      }
    }
    if (out.empty()) throw ConfigError(rv.line, "field '" + key + "' is empty");
    return out;
  }

  int line_of(const std::string& key) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? 0 : it->second.line;
  }

  void mark_known(const std::string& key) { known_.insert(key); }

  void reject_unknown() const {
    for (const auto& [key, rv] : kv_)
      if (!known_.count(key)) throw ConfigError(rv.line, "unknown field '" + key + "'");
  }

 private:
  const RawValue& at(const std::string& key) {
    known_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(0, "missing field '" + key + "'");
    return it->second;
  }

  std::map<std::string, RawValue> kv_;
  std::set<std::string> known_;
};

void require_positive(double v, const char* field, int line) {
  if (!(v > 0.0)) throw ConfigError(line, std::string("field '") + field + "' must be positive");
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario_file(const std::string& path) {
  Fields f(read_key_values(path));
  Scenario sc;

  std::string problem = f.get_string("problem");
  if (problem == "position") sc.problem = ProblemKind::Position;
  else if (problem == "design") sc.problem = ProblemKind::Design;
  else if (problem == "worst_case") sc.problem = ProblemKind::WorstCase;
  else if (problem == "scan") sc.problem = ProblemKind::Scan;
  else
    throw ConfigError(f.line_of("problem"),
                      "field 'problem' must be position|design|worst_case|scan");

  std::string disc = f.get_string("discretization");
  if (disc == "fem1d") {
    sc.is2d = false;
    sc.n_elements = f.get_int("n_elements");
    if (sc.n_elements < 2)
      throw ConfigError(f.line_of("n_elements"), "field 'n_elements' must be >= 2");
    std::string sigma = f.get_string("sigma");
    if (find_diffusion_profile(sigma) != nullptr) {
      sc.sigma_profile = sigma;
    } else {
      try {
        sc.sigma_value = std::stod(sigma);
      } catch (const std::exception&) {
        throw ConfigError(f.line_of("sigma"),
                          "field 'sigma' expects a number or a catalog profile name");
      }
      require_positive(sc.sigma_value, "sigma", f.line_of("sigma"));
    }
  } else if (disc == "spectral2d") {
    sc.is2d = true;
    sc.n_modes = f.get_int("n_modes");
    if (sc.n_modes < 1) throw ConfigError(f.line_of("n_modes"), "field 'n_modes' must be >= 1");
    sc.grid = f.get_int("grid");
    if (sc.grid < 2) throw ConfigError(f.line_of("grid"), "field 'grid' must be >= 2");
    sc.sigma_value = f.get_double("sigma");
    require_positive(sc.sigma_value, "sigma", f.line_of("sigma"));
  } else {
    throw ConfigError(f.line_of("discretization"),
                      "field 'discretization' must be fem1d|spectral2d");
  }

  sc.gamma = f.get_double("gamma");
  require_positive(sc.gamma, "gamma", f.line_of("gamma"));

  sc.initial_condition = f.get_string("initial_condition");
  if (sc.problem == ProblemKind::WorstCase) {
    if (sc.initial_condition != "worst_case")
      throw ConfigError(f.line_of("initial_condition"),
                        "worst_case problems require initial_condition = worst_case");
  } else {
    bool known = sc.is2d ? find_initial_condition_2d(sc.initial_condition) != nullptr
                         : find_initial_condition_1d(sc.initial_condition) != nullptr;
    if (!known)
      throw ConfigError(f.line_of("initial_condition"),
                        "field 'initial_condition': unknown catalog entry '" +
                            sc.initial_condition + "'");
  }

  if (f.has("T")) sc.opt.quad.T = f.get_double("T");
  require_positive(sc.opt.quad.T, "T", f.line_of("T"));
  if (f.has("dt")) sc.opt.quad.dt = f.get_double("dt");
  require_positive(sc.opt.quad.dt, "dt", f.line_of("dt"));
  if (f.has("beta0")) sc.opt.beta0 = f.get_double("beta0");
  require_positive(sc.opt.beta0, "beta0", f.line_of("beta0"));
  if (f.has("beta_shrink")) sc.opt.beta_shrink = f.get_double("beta_shrink");
  if (!(sc.opt.beta_shrink > 0.0 && sc.opt.beta_shrink < 1.0))
    throw ConfigError(f.line_of("beta_shrink"), "field 'beta_shrink' must lie in (0,1)");
  if (f.has("eps")) sc.opt.eps_stop = f.get_double("eps");
  require_positive(sc.opt.eps_stop, "eps", f.line_of("eps"));
  if (f.has("max_iters")) sc.opt.max_iters = f.get_int("max_iters");
  if (sc.opt.max_iters < 1)
    throw ConfigError(f.line_of("max_iters"), "field 'max_iters' must be >= 1");
  if (f.has("reinit_period")) sc.opt.reinit_period = f.get_int("reinit_period");
  if (sc.opt.reinit_period < 1)
    throw ConfigError(f.line_of("reinit_period"), "field 'reinit_period' must be >= 1");
  if (f.has("field_method")) {
    std::string method = f.get_string("field_method");
    if (method == "gramian") sc.opt.field_method = FieldMethod::Gramian;
    else if (method == "trajectory") sc.opt.field_method = FieldMethod::Trajectory;
    else
      throw ConfigError(f.line_of("field_method"),
                        "field 'field_method' must be gramian|trajectory");
  }

  if (sc.problem == ProblemKind::Design || sc.problem == ProblemKind::WorstCase) {
    sc.c = f.get_double("c");
    require_positive(sc.c, "c", f.line_of("c"));
    sc.opt.alpha_schedule = f.get_double_list("alpha_schedule");
    for (size_t i = 0; i < sc.opt.alpha_schedule.size(); ++i) {
      if (sc.opt.alpha_schedule[i] <= 0.0)
        throw ConfigError(f.line_of("alpha_schedule"), "field 'alpha_schedule' must be positive");
      if (i > 0 && sc.opt.alpha_schedule[i] <= sc.opt.alpha_schedule[i - 1])
        throw ConfigError(f.line_of("alpha_schedule"),
                          "field 'alpha_schedule' must be strictly increasing");
    }
    sc.psi0 = f.has("psi0") ? f.get_string("psi0")
                            : (sc.is2d ? "disk:0.5,0.5,0.2" : "interval:0.25,0.75");
  }
  if (sc.problem == ProblemKind::Position) {
    sc.width = f.get_double("width");
    require_positive(sc.width, "width", f.line_of("width"));
    sc.center0 = f.get_double("center0");
    if (sc.center0 - 0.5 * sc.width < 0.0 || sc.center0 + 0.5 * sc.width > 1.0)
      throw ConfigError(f.line_of("center0"), "field 'center0': interval leaves the domain");
  }
  if (sc.problem == ProblemKind::Scan) {
    sc.width = f.get_double("width");
    require_positive(sc.width, "width", f.line_of("width"));
    sc.centers = f.get_double_list("centers");
    for (double ctr : sc.centers)
      if (ctr - 0.5 * sc.width < 0.0 || ctr + 0.5 * sc.width > 1.0)
        throw ConfigError(f.line_of("centers"), "field 'centers': interval leaves the domain");
  }
  if (f.has("output_dir")) sc.output_dir = f.get_string("output_dir");

  f.reject_unknown();
  return sc;
}

SystemMatrices build_system(const Scenario& sc) {
  if (sc.is2d) return assemble_spectral_2d(sc.n_modes, sc.sigma_value, sc.grid);
  if (!sc.sigma_profile.empty()) {
    const CatalogEntry1D* profile = find_diffusion_profile(sc.sigma_profile);
    return assemble_fem_1d(sc.n_elements, profile->fn);
  }
  return assemble_fem_1d(sc.n_elements, sc.sigma_value);
}

Eigen::VectorXd build_initial_condition(const Scenario& sc, const SystemMatrices& sys) {
  if (sc.initial_condition == "worst_case")
    throw std::logic_error("build_initial_condition: worst_case has no fixed f");
  if (sc.is2d) {
    const CatalogEntry2D* e = find_initial_condition_2d(sc.initial_condition);
    return project_initial_condition(e->fn, sys);
  }
  const CatalogEntry1D* e = find_initial_condition_1d(sc.initial_condition);
  return project_initial_condition(e->fn, sys);
}

LevelSetField build_psi0(const Scenario& sc, const SystemMatrices& sys) {
  LevelSetField psi = make_levelset_grid(sys.basis);
  std::string spec = sc.psi0;
  auto bad = [&]() {
    return ConfigError(0, "field 'psi0': cannot parse '" + spec + "'");
  };
  size_t colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        args.push_back(std::stod(trim(tok)));
      } catch (const std::exception&) {
        throw bad();
      }
    }
  }
  if (!psi.is2d) {
    if (kind != "interval" || args.size() != 2 || !(args[0] < args[1])) throw bad();
    for (size_t i = 0; i < psi.x.size(); ++i)
      psi.psi(i) = std::max(args[0] - psi.x[i], psi.x[i] - args[1]);
    return psi;
  }
  if (kind != "disk" || args.size() != 3 || !(args[2] > 0.0)) throw bad();
  const int m = psi.m;
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      double x = (ix + 0.5) / m, y = (iy + 0.5) / m;
      psi.psi(iy * m + ix) = std::hypot(x - args[0], y - args[1]) - args[2];
    }
  return psi;
}

void write_levelset_csv(const LevelSetField& f, const std::string& path) {
  std::ofstream out(path);
  if (!f.is2d) {
    out << "x,psi\n";
    for (int i = 0; i < f.size(); ++i) out << fmt6(f.x[i]) << "," << fmt6(f.psi(i)) << "\n";
    return;
  }
  out << "x,y,psi\n";
  for (int iy = 0; iy < f.m; ++iy)
    for (int ix = 0; ix < f.m; ++ix)
      out << fmt6((ix + 0.5) / f.m) << "," << fmt6((iy + 0.5) / f.m) << ","
          << fmt6(f.psi(iy * f.m + ix)) << "\n";
}

void write_history_csv(const RunRecord& rec, const std::string& path) {
  std::ofstream out(path);
  out << "iter,beta,accepted,total,lq,penalty,size\n";
  for (const IterateRecord& it : rec.iterates)
    out << it.iter << "," << fmt6(it.beta) << "," << (it.accepted ? 1 : 0) << ","
        << fmt6(it.report.total) << "," << fmt6(it.report.lq_part) << ","
        << fmt6(it.report.penalty_part) << "," << fmt6(it.report.size) << "\n";
}

void write_table_md(const RunRecord& rec, const std::string& path) {
  std::ofstream out(path);
  out << "| alpha | J | J_LQ | J_alpha (size) | iterations |\n";
  out << "|---|---|---|---|---|\n";
  for (const AlphaRow& row : rec.per_alpha)
    out << "| " << fmt6(row.alpha) << " | " << fmt6(row.report.total) << " | "
        << fmt6(row.report.lq_part) << " | " << fmt6(row.report.penalty_part) << " ("
        << fmt6(row.report.size) << ") | " << row.iterations << " |\n";
}

void write_trajectory_csv(const ClosedLoopTrajectory& traj, const std::string& path) {
  std::ofstream out(path);
  out << "t,norm2_M,u\n";
  for (size_t k = 0; k < traj.times.size(); ++k)
    out << fmt6(traj.times[k]) << "," << fmt6(traj.norm2_M[k]) << "," << fmt6(traj.controls[k])
        << "\n";
}

namespace {

json report_to_json(const CostReport& rep) {
  return json{{"total", rep.total},
              {"lq", rep.lq_part},
              {"penalty", rep.penalty_part},
              {"size", rep.size},
              {"iterations", rep.iterations}};
}

json shape_to_json(const ActuatorShape& shape) {
  json j;
  if (!shape.is2d) {
    json iv = json::array();
    for (const Interval& i : shape.intervals) iv.push_back({i.a, i.b});
    j["intervals"] = iv;
  } else {
    j["grid"] = shape.grid_m;
    std::string cells;
    cells.reserve(shape.mask.size());
    for (std::uint8_t v : shape.mask) cells.push_back(v ? '1' : '0');
    j["mask"] = cells;
  }
  j["measure"] = measure(shape);
  return j;
}

}  // namespace

void write_run_json(const Scenario& sc, const RunRecord& rec, const std::string& path) {
  json j;
  j["problem"] = sc.problem == ProblemKind::Position    ? "position"
                 : sc.problem == ProblemKind::Design    ? "design"
                 : sc.problem == ProblemKind::WorstCase ? "worst_case"
                                                        : "scan";
  j["initial_condition"] = sc.initial_condition;
  j["gamma"] = sc.gamma;
  j["c"] = sc.c;
  j["final_report"] = report_to_json(rec.final_report);
  j["final_shape"] = shape_to_json(rec.final_shape);
  j["converged"] = rec.converged;
  j["stop_reason"] = rec.stop_reason;
  json rows = json::array();
  for (const AlphaRow& row : rec.per_alpha)
    rows.push_back({{"alpha", row.alpha},
                    {"report", report_to_json(row.report)},
                    {"iterations", row.iterations}});
  j["per_alpha"] = rows;
  json iters = json::array();
  for (const IterateRecord& it : rec.iterates)
    iters.push_back({{"iter", it.iter},
                     {"beta", it.beta},
                     {"accepted", it.accepted},
                     {"report", report_to_json(it.report)}});
  j["iterates"] = iters;
  if (rec.final_f.size() > 0) j["final_f"] = std::vector<double>(
      rec.final_f.data(), rec.final_f.data() + rec.final_f.size());
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

namespace {

std::string resolve_output_dir(const Scenario& sc) {
  const char* env = std::getenv("OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : sc.output_dir;
}

void run_parsed(const Scenario& sc, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SystemMatrices sys = build_system(sc);
  Plant plant(std::move(sys), sc.gamma);

  if (sc.problem == ProblemKind::Scan) {
    Eigen::VectorXd f = build_initial_condition(sc, plant.sys);
    ScanResult scan = position_scan(f, plant, sc.width, sc.centers);
    std::ofstream out(dir + "/centers.csv");
    out << "center,cost\n";
    for (auto& [center, cost] : scan.entries) out << fmt6(center) << "," << fmt6(cost) << "\n";
    out << "argmin," << fmt6(scan.argmin_center) << "\n";
    return;
  }

  RunRecord rec;
  if (sc.problem == ProblemKind::Position) {
    Eigen::VectorXd f = build_initial_condition(sc, plant.sys);
    ActuatorShape shape0 = ActuatorShape::from_intervals(
        {{sc.center0 - 0.5 * sc.width, sc.center0 + 0.5 * sc.width}});
    rec = position_descent(shape0, f, plant, sc.opt);
    // Final geometry snapshot: intervals as CSV rows.
    std::ofstream out(dir + "/final_shape.csv");
    out << "a,b\n";
    for (const Interval& iv : rec.final_shape.intervals)
      out << fmt6(iv.a) << "," << fmt6(iv.b) << "\n";
  } else {
    LevelSetField psi0 = build_psi0(sc, plant.sys);
    write_levelset_csv(psi0, dir + "/initial_psi.csv");
    if (sc.problem == ProblemKind::Design) {
      Eigen::VectorXd f = build_initial_condition(sc, plant.sys);
      rec = continuation(psi0, &f, plant, sc.c, sc.opt);
    } else {
      rec = continuation(psi0, nullptr, plant, sc.c, sc.opt);
    }
    write_levelset_csv(rec.final_psi, dir + "/final_psi.csv");
    write_table_md(rec, dir + "/table.md");
  }
  write_history_csv(rec, dir + "/history.csv");
  write_run_json(sc, rec, dir + "/run.json");
}

}  // namespace

int run_scenario(const std::string& path) {
  Scenario sc;
  try {
    sc = parse_scenario_file(path);
  } catch (const ConfigError& e) {
    std::cerr << path << ":" << e.line << ": " << e.what() << "\n";
    return 2;
  }
  const std::string dir = resolve_output_dir(sc);
  try {
    run_parsed(sc, dir);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    // Partial artifacts: record the failure next to whatever was written.
    std::ofstream out(dir + "/run.json");
    out << json{{"error", e.what()}}.dump(2) << "\n";
    return 3;
  }
  return 0;
}

int validate_scenario(const std::string& path) {
  try {
    parse_scenario_file(path);
  } catch (const ConfigError& e) {
    std::cerr << path << ":" << e.line << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace actopt
