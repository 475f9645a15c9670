#include "insulate/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "insulate/errors.hpp"
#include "json.hpp"

namespace insulate {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Least-squares slope of log(error) against log(N).
double loglog_slope(const std::vector<LevelRecord>& r, std::size_t first) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(r.size() - first);
  for (std::size_t i = first; i < r.size(); ++i) {
    const double x = std::log(double(r[i].N)), y = std::log(r[i].error);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_level_dumps(const std::string& dir, const LevelResult& res, int level) {
  const std::string stem = dir + "/level" + std::to_string(level) + "_";
  write_mesh_file(stem + "mesh.txt", *res.mesh);
  {
    std::ofstream os(stem + "u_cr.csv");
    write_side_csv(os, "u_cr", res.u_cr.dof());
  }
  {
    std::ofstream os(stem + "z_rt.csv");
    write_side_csv(os, "z_rt", res.dual.z.dof());
  }
  {
    std::ofstream os(stem + "u_bar_elements.csv");
    write_element_csv(os, "u_bar", res.dual.iterate.U_bar);
  }
  {
    std::ofstream os(stem + "gap_report.csv");
    write_gap_report(os, res.report);
  }
  {
    std::ofstream os(stem + "iterations.csv");
    write_iteration_log(os, res.dual.report);
  }
  if (!res.mesh->sides_with(BoundaryLabel::Insulated).empty()) {
    try {
      std::ofstream os(stem + "distribution.csv");
      const auto h = distribution(res.u_cr, res.problem.m);
      os << "side,h\n";
      const auto& sides = res.mesh->sides_with(BoundaryLabel::Insulated);
      for (std::size_t i = 0; i < h.size(); ++i) os << sides[i] << "," << num(h[i]) << "\n";
    } catch (const DegenerateTraceError&) {
    }
  }
}

CheckResult check_solver(const std::vector<LevelRecord>& r) {
  CheckResult c{"kkt_and_exact_termination", true, ""};
  for (const LevelRecord& x : r) {
    if (!x.exact_termination || x.iterations > 30 || x.kkt_residual > 1e-9) {
      c.passed = false;
      c.detail += "level " + std::to_string(x.level) + ": iterations " + std::to_string(x.iterations) +
                  " residual " + num(x.kkt_residual) + "; ";
    }
  }
  if (c.passed) c.detail = "all levels";
  return c;
}

CheckResult check_duality(const std::vector<LevelRecord>& r) {
  CheckResult c{"discrete_strong_duality", true, ""};
  double worst = 0.0;
  for (const LevelRecord& x : r) {
    const double d = std::abs(x.discrete_primal - x.discrete_dual) / (1.0 + std::abs(x.discrete_primal));
    worst = std::max(worst, d);
    if (d > 1e-9) c.passed = false;
  }
  c.detail = "max relative gap " + num(worst);
  return c;
}

CheckResult check_range(const std::string& name, double v, double lo, double hi) {
  return {name, v >= lo && v <= hi, num(v) + " in [" + num(lo) + ", " + num(hi) + "]"};
}

}  // namespace

ManufacturedSolution ManufacturedSolution::annulus() {
  ManufacturedSolution s;
  const double l2 = std::log(2.0);
  s.C1 = l2 * std::log(8.0) / 54.0 - std::log(64.0) / (27.0 * M_PI);
  s.C2 = 2.0 * l2 / 3.0;
  s.m = 1.0;
  s.energy = -l2 * l2 * (2.0 + M_PI * l2) / 9.0;
  return s;
}

double ManufacturedSolution::u(Vec2 x) const {
  const double lr = std::log(norm(x));
  return C1 + C2 * lr + 0.5 * lr * lr;
}

Vec2 ManufacturedSolution::z(Vec2 x) const {
  const double r2 = norm2(x);
  return ((C2 + 0.5 * std::log(r2)) / r2) * x;
}

double ManufacturedSolution::f(Vec2 x) const { return -1.0 / norm2(x); }

ExperimentConfig ExperimentConfig::defaults_for(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "annulus_apriori") {
    c.m = 1.0;
    c.first_level = 1;
    c.levels = 5;
    c.f_depth = 2;
  } else if (experiment == "lshape_setup1" || experiment == "lshape_setup2") {
    c.m = 3.0;
    c.levels = 6;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("experiment")) throw InputError("config needs an \"experiment\" key");
  try {
    ExperimentConfig c = defaults_for(j.at("experiment").get<std::string>());
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "experiment") continue;
      else if (k == "mode") c.mode = v.get<std::string>();
      else if (k == "first_level") c.first_level = v.get<int>();
      else if (k == "levels") c.levels = v.get<int>();
      else if (k == "m") c.m = v.get<double>();
      else if (k == "f_depth") c.f_depth = v.get<int>();
      else if (k == "output_dir") c.output_dir = v.get<std::string>();
      else if (k == "check") c.check = v.get<bool>();
      else if (k == "dump_solutions") c.dump_solutions = v.get<bool>();
      else if (k == "solver") {
        for (auto s = v.begin(); s != v.end(); ++s) {
          if (s.key() == "alpha") c.solver.alpha = s->get<double>();
          else if (s.key() == "eps_stop") c.solver.eps_stop = s->get<double>();
          else if (s.key() == "max_iter") c.solver.max_iter = s->get<int>();
          else throw InputError("unknown solver key \"" + s.key() + "\"");
        }
      } else if (k == "afem") {
        for (auto s = v.begin(); s != v.end(); ++s) {
          if (s.key() == "theta_T") c.afem.theta_T = s->get<double>();
          else if (s.key() == "theta_S") c.afem.theta_S = s->get<double>();
          else if (s.key() == "eps_stop") c.afem.eps_stop = s->get<double>();
          else if (s.key() == "max_elements") c.afem.max_elements = s->get<std::size_t>();
          else throw InputError("unknown afem key \"" + s.key() + "\"");
        }
      } else {
        throw InputError("unknown config key \"" + k + "\"");
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("config has a value of the wrong type: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j = {{"experiment", experiment},
            {"mode", mode},
            {"first_level", first_level},
            {"levels", levels},
            {"m", m},
            {"f_depth", f_depth},
            {"output_dir", output_dir},
            {"check", check},
            {"dump_solutions", dump_solutions},
            {"solver", {{"alpha", solver.alpha}, {"eps_stop", solver.eps_stop}, {"max_iter", solver.max_iter}}},
            {"afem",
             {{"theta_T", afem.theta_T},
              {"theta_S", afem.theta_S},
              {"eps_stop", afem.eps_stop},
              {"max_elements", afem.max_elements}}}};
  return j.dump(2);
}

bool ExperimentResult::all_passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

ProblemData experiment_data(const ExperimentConfig& cfg) {
  if (!(cfg.m > 0.0)) throw InputError("m must be positive");
  ProblemData d;
  d.m = cfg.m;
  d.f_depth = cfg.f_depth;
  if (cfg.experiment == "annulus_apriori") {
    const ManufacturedSolution s = ManufacturedSolution::annulus();
    if (std::abs(cfg.m - s.m) > 0.0) throw InputError("the annulus solution is built for m = 1");
    d.f = [s](Vec2 x) { return s.f(x); };
  } else if (cfg.experiment == "lshape_setup1" || cfg.experiment == "lshape_setup2") {
    d.f = [](Vec2) { return 1.0; };
    // Setup 2 boundary values: u_D = 0, g = 0
  } else if (cfg.experiment == "house") {
    throw InputError("the 3D house experiment is not available in this 2D build");
  } else {
    throw InputError("unknown experiment \"" + cfg.experiment + "\"");
  }
  return d;
}

MeshPtr experiment_mesh(const ExperimentConfig& cfg, int level) {
  if (cfg.experiment == "annulus_apriori") return std::make_shared<const Triangulation>(generate_annulus(level));
  if (cfg.experiment == "lshape_setup1")
    return std::make_shared<const Triangulation>(generate_lshape(level, LShapeSetup::AllInsulated));
  if (cfg.experiment == "lshape_setup2")
    return std::make_shared<const Triangulation>(generate_lshape(level, LShapeSetup::MixedBoundary));
  throw InputError("no mesh for experiment \"" + cfg.experiment + "\"");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ProblemData data = experiment_data(cfg);
  if (cfg.mode != "uniform" && cfg.mode != "adaptive") throw InputError("mode must be uniform or adaptive");
  if (cfg.levels < cfg.first_level || cfg.first_level < 0) throw InputError("bad level range");
  const bool annulus = cfg.experiment == "annulus_apriori";
  if (annulus && cfg.mode == "adaptive") throw InputError("the annulus study is uniform only");
  if (!cfg.output_dir.empty()) fs::create_directories(cfg.output_dir);
  const bool dump = cfg.dump_solutions && !cfg.output_dir.empty();

  ExperimentResult out;
  if (cfg.mode == "uniform") {
    const ManufacturedSolution s = ManufacturedSolution::annulus();
    for (int k = cfg.first_level; k <= cfg.levels; ++k) {
      const MeshPtr mesh = experiment_mesh(cfg, k);
      LevelResult res = solve_level(mesh, data, cfg.solver);
      LevelRecord rec = summarize(res, k);
      if (annulus) {
        const AprioriIdentity a = apriori_identity_check(
            res.problem, [&](Vec2 x) { return s.u(x); }, [&](Vec2 x) { return s.z(x); }, res.u_cr, res.dual.z);
        rec.error = a.lhs;
        rec.apriori_rhs = a.rhs;
        rec.apriori_mismatch = a.mismatch;
        rec.apriori_split_mismatch = a.mismatch_split;
      }
      if (dump) write_level_dumps(cfg.output_dir, res, k);
      out.records.push_back(rec);
    }
    fill_eoc(out.records);
  } else {
    AfemConfig a = cfg.afem;
    a.solver = cfg.solver;
    a.max_levels = cfg.levels + 1;
    out.records = afem_run(experiment_mesh(cfg, cfg.first_level), data, a, [&](const LevelResult& r, LevelRecord&) {
      if (dump) write_level_dumps(cfg.output_dir, r, r.mesh->generation());
    });
  }

  const auto& r = out.records;
  out.checks.push_back(check_solver(r));
  out.checks.push_back(check_duality(r));
  if (annulus) {
    double worst = 0.0;
    for (const LevelRecord& x : r)
      if (x.level <= 3) worst = std::max(worst, x.apriori_mismatch);
    out.checks.push_back({"apriori_identity_levels_le_3", worst <= 1e-6, "max mismatch " + num(worst)});
    if (r.size() >= 3) {
      double lo = 0.0, hi = -10.0;
      for (std::size_t i = r.size() - 2; i < r.size(); ++i) {
        lo = std::min(lo, r[i].eoc);
        hi = std::max(hi, r[i].eoc);
      }
      out.checks.push_back({"apriori_rate", lo >= -1.25 && hi <= -0.75,
                            "EOC of the last two steps in [" + num(lo) + ", " + num(hi) + "]"});
    }
    if (!r.empty()) {
      const double E = ManufacturedSolution::annulus().energy;
      const LevelRecord& last = r.back();
      const double ei = std::abs(last.primal_energy - E), ed = std::abs(last.dual_energy - E);
      bool monotone = true;
      if (r.size() >= 3)
        for (std::size_t i = r.size() - 2; i < r.size(); ++i)
          monotone = monotone && std::abs(r[i].primal_energy - E) < std::abs(r[i - 1].primal_energy - E) &&
                     std::abs(r[i].dual_energy - E) < std::abs(r[i - 1].dual_energy - E);
      out.checks.push_back({"annulus_energy", ei <= 1e-2 && ed <= 1e-2 && monotone,
                            "|I-E| " + num(ei) + ", |D-E| " + num(ed) + (monotone ? ", monotone" : ", not monotone")});
    }
  } else if (cfg.experiment == "lshape_setup2" && r.size() >= 3) {
    if (cfg.mode == "uniform") {
      out.checks.push_back(check_range("uniform_gap_rate", loglog_slope(r, r.size() - 3), -0.5, -0.2));
    } else {
      // late levels: the last decade of N
      std::size_t first = r.size() - 1;
      while (first > 0 && double(r[first - 1].N) * 10.0 >= double(r.back().N)) --first;
      if (r.size() - first >= 2)
        out.checks.push_back(check_range("adaptive_gap_rate", loglog_slope(r, first), -1.3, -0.7));
    }
  }
  if (!cfg.output_dir.empty()) {
    emit_plotdata(r, cfg.output_dir + "/convergence.csv");
    write_level_log(r, cfg.output_dir + "/levels.csv");
    json summary = {{"config", json::parse(cfg.to_json_text())}, {"checks", json::array()}};
    for (const CheckResult& c : out.checks)
      summary["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    std::ofstream os(cfg.output_dir + "/summary.json");
    os << summary.dump(2) << "\n";
  }
  return out;
}

void emit_plotdata(const std::vector<LevelRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  os << "level,N,h,error,eoc,eta2_A,eta2_B,estimator,gap,primal_energy,dual_energy,discrete_primal,discrete_dual,"
        "apriori_rhs,apriori_mismatch,iterations\n";
  for (const LevelRecord& r : records)
    os << r.level << "," << r.N << "," << num(r.h) << "," << num(r.error) << "," << num(r.eoc) << ","
       << num(r.eta2_A) << "," << num(r.eta2_B) << "," << num(r.eta2_A + r.eta2_B) << "," << num(r.gap) << ","
       << num(r.primal_energy) << "," << num(r.dual_energy) << "," << num(r.discrete_primal) << ","
       << num(r.discrete_dual) << "," << num(r.apriori_rhs) << "," << num(r.apriori_mismatch) << ","
       << r.iterations << "\n";
}

void write_level_log(const std::vector<LevelRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  os << "k,elements,N,eta2_A,eta2_B,gap,I,D,iterations,marked_elements,marked_sides\n";
  for (const LevelRecord& r : records)
    os << r.level << "," << r.elements << "," << r.N << "," << num(r.eta2_A) << "," << num(r.eta2_B) << ","
       << num(r.gap) << "," << num(r.primal_energy) << "," << num(r.dual_energy) << "," << r.iterations << ","
       << r.marked_elements << "," << r.marked_sides << "\n";
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InputError("no column \"" + name + "\"");
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) return t;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace insulate
