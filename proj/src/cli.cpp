#include "qc/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qc/errors.hpp"
#include "qc/forms.hpp"
#include "qc/inequality.hpp"
#include "qc/linsolve.hpp"
#include "qc/manufactured.hpp"
#include "qc/mesh.hpp"
#include "qc/mesh_io.hpp"
#include "qc/spaces.hpp"

namespace qc {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

Mesh load_mesh(const RunConfig& cfg) {
  if (!cfg.mesh_path.empty()) return read_gmsh(cfg.mesh_path);
  return generate_cube_mesh(cfg.n);
}

json config_json(const RunConfig& cfg) {
  json j{{"command", cfg.command}, {"case", cfg.case_name},   {"k", cfg.k},
         {"tau", cfg.tau},         {"variant", cfg.variant},  {"tol", cfg.tol},
         {"seed", cfg.seed}};
  if (!cfg.mesh_path.empty()) j["mesh"] = cfg.mesh_path;
  if (cfg.n > 0) j["n"] = cfg.n;
  if (!cfg.levels.empty()) j["levels"] = cfg.levels;
  return j;
}

json mesh_json(const Mesh& mesh) {
  return json{{"n_vertices", mesh.n_vertices()}, {"n_tets", mesh.n_tets()},
              {"n_faces", mesh.n_faces()},       {"n_edges", mesh.n_edges()},
              {"n_boundary_faces", mesh.n_boundary_faces()}, {"h", mesh.h}};
}

json solver_json(const SolveReport& r) {
  return json{{"method", r.method},       {"converged", r.converged},
              {"iterations", r.iterations}, {"rel_residual", r.rel_residual},
              {"n_u", r.n_u},             {"n_p", r.n_p},
              {"nnz", r.nnz},             {"seconds", r.seconds}};
}

json report_json(const ErrorReport& r) {
  return json{{"n", r.n},
              {"h", r.h},
              {"dofs_u", r.dofs_u},
              {"dofs_p", r.dofs_p},
              {"e_l2_u", r.e_l2_u},
              {"e_l2_curl", r.e_l2_curl},
              {"e_energy", r.e_energy},
              {"e_h1h_curl", r.e_h1h_curl},
              {"e_grad_p", r.e_grad_p},
              {"e_l2_p", r.e_l2_p},
              {"l3_u", r.l3_u},
              {"l6_curl", r.l6_curl},
              {"h1h_curl_uh", r.h1h_curl_uh},
              {"l32_f", r.l32_f},
              {"lp_approximate", r.lp_approximate}};
}

struct LevelRun {
  ErrorReport err;
  SolveReport solver;
  double f_l2 = 0.0;
};

LevelRun run_level(const Mesh& mesh, int n, const RunConfig& cfg,
                   const std::string& dump_suffix) {
  const ManufacturedCase mc = cfg.case_name == "a" ? case_a() : case_b();
  const FESpace E = build_hcurl_space(mesh, cfg.k + 1);
  const FESpace Q = build_lagrange_space(mesh, cfg.k + 2);
  SchemeParams prm;
  prm.k = cfg.k;
  prm.tau = cfg.tau;
  prm.symmetric = cfg.variant == "sym";

  const SpMat A = assemble_a(E, prm);
  const SpMat B = assemble_b(E, Q);
  const Eigen::VectorXd F = assemble_load(E, mc.f);
  if (cfg.dump_matrices) {
    write_matrix_market(A, out_path(cfg, "A" + dump_suffix + ".mtx"));
    write_matrix_market(B, out_path(cfg, "B" + dump_suffix + ".mtx"));
  }

  SolveOptions opts;
  opts.tol = cfg.tol;
  const SaddleSolution sol = solve_saddle(A, B, F, opts);

  LevelRun run;
  run.err = compute_errors(E, Q, expand_free(E, sol.u), expand_free(Q, sol.p), mc, prm);
  run.err.n = n;
  run.solver = sol.report;
  run.f_l2 = lp_norm(mesh, mc.f, 2.0, 3 * E.degree + 3);
  return run;
}

void run_meshinfo(const RunConfig& cfg) {
  const Mesh mesh = load_mesh(cfg);
  json j = topology_json(mesh);
  j["source"] = cfg.mesh_path.empty() ? json{{"generated_n", cfg.n}} : json{{"file", cfg.mesh_path}};
  write_text(out_path(cfg, "meshinfo.json"), j.dump(2) + "\n");
  std::printf("%s\n", out_path(cfg, "meshinfo.json").c_str());
}

void run_solve(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Mesh mesh = load_mesh(cfg);
  const LevelRun run = run_level(mesh, cfg.n, cfg, "");

  json j;
  j["config"] = config_json(cfg);
  j["mesh"] = mesh_json(mesh);
  j["solver"] = solver_json(run.solver);
  j["errors"] = report_json(run.err);
  j["f_l2"] = run.f_l2;
  j["seconds_total"] = elapsed(t0);
  write_text(out_path(cfg, "solution.json"), j.dump(2) + "\n");
  write_text(out_path(cfg, "errors.csv"), eoc_table_csv({run.err}));
  std::printf("%s\n%s\n", out_path(cfg, "solution.json").c_str(),
              out_path(cfg, "errors.csv").c_str());
}

constexpr const char* kGnuplotTemplate =
    "# Plot template for convergence.csv.  Run: gnuplot convergence.gp\n"
    "set datafile separator ','\n"
    "set key autotitle columnhead outside\n"
    "set logscale xy\n"
    "set xlabel 'h'\n"
    "set ylabel 'error'\n"
    "set terminal pngcairo size 900,600\n"
    "set output 'convergence.png'\n"
    "plot 'convergence.csv' using 'h':'e_l2_u' with linespoints, \\\n"
    "     '' using 'h':'e_l2_curl' with linespoints, \\\n"
    "     '' using 'h':'e_energy' with linespoints, \\\n"
    "     '' using 'h':'e_grad_p' with linespoints\n";

void run_convergence(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  std::vector<ErrorReport> rows;
  json jlevels = json::array();
  for (int n : cfg.levels) {
    try {
      const Mesh mesh = generate_cube_mesh(n);
      const LevelRun run = run_level(mesh, n, cfg, "_n" + std::to_string(n));
      rows.push_back(run.err);
      json jl;
      jl["n"] = n;
      jl["solver"] = solver_json(run.solver);
      jl["errors"] = report_json(run.err);
      jl["f_l2"] = run.f_l2;
      jlevels.push_back(jl);
    } catch (const std::exception& e) {
      std::string csv = eoc_table_csv(rows);
      csv += "# incomplete: level " + std::to_string(n) + " failed: " + e.what() + "\n";
      write_text(out_path(cfg, "convergence.csv"), csv);
      throw std::runtime_error("convergence level " + std::to_string(n) +
                               " failed: " + e.what());
    }
  }

  std::vector<double> hs, e_l2_u, e_l2_curl, e_energy, e_grad_p;
  for (const ErrorReport& r : rows) {
    hs.push_back(r.h);
    e_l2_u.push_back(r.e_l2_u);
    e_l2_curl.push_back(r.e_l2_curl);
    e_energy.push_back(r.e_energy);
    e_grad_p.push_back(r.e_grad_p);
  }
  json j;
  j["config"] = config_json(cfg);
  j["levels"] = jlevels;
  j["orders"] = json{{"l2_u", eoc(hs, e_l2_u)},
                     {"l2_curl", eoc(hs, e_l2_curl)},
                     {"energy", eoc(hs, e_energy)},
                     {"grad_p", eoc(hs, e_grad_p)}};
  j["seconds_total"] = elapsed(t0);

  write_text(out_path(cfg, "convergence.csv"), eoc_table_csv(rows));
  write_text(out_path(cfg, "convergence.json"), j.dump(2) + "\n");
  write_text(out_path(cfg, "convergence.gp"), kGnuplotTemplate);
  std::printf("%s\n%s\n%s\n", out_path(cfg, "convergence.csv").c_str(),
              out_path(cfg, "convergence.json").c_str(),
              out_path(cfg, "convergence.gp").c_str());
}

void run_inequality(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  std::vector<InequalityProbe> sobolev, l3;
  for (int n : cfg.levels) {
    const Mesh mesh = generate_cube_mesh(n);
    InequalityProbe s = sobolev_constant(mesh, cfg.k + 1);
    s.n = n;
    sobolev.push_back(s);
    InequalityProbe p = l3_gradient_orthogonal_probe(mesh, cfg.k, 10, cfg.seed);
    p.n = n;
    l3.push_back(p);
  }
  const double taus[3] = {5.0, 20.0, 80.0};
  double margins[3];
  {
    const Mesh mesh = generate_cube_mesh(1);
    for (int i = 0; i < 3; ++i) margins[i] = coercivity_margin(mesh, cfg.k, taus[i]);
  }

  std::ostringstream csv;
  csv << "inequality,n,constant,method,samples,growth\n";
  auto emit = [&csv](const std::vector<InequalityProbe>& probes) {
    for (size_t i = 0; i < probes.size(); ++i) {
      csv << probes[i].inequality << "," << probes[i].n << "," << num(probes[i].constant)
          << "," << probes[i].method << "," << probes[i].samples << ","
          << (i > 0 ? num(probes[i].constant / probes[i - 1].constant) : "") << "\n";
    }
  };
  emit(sobolev);
  emit(l3);
  for (int i = 0; i < 3; ++i) {
    char name[48];
    std::snprintf(name, sizeof(name), "coercivity_margin_tau%g", taus[i]);
    csv << name << ",1," << num(margins[i]) << ",eigen,0,\n";
  }

  json j;
  j["config"] = config_json(cfg);
  auto probes_json = [](const std::vector<InequalityProbe>& probes) {
    json arr = json::array();
    for (const InequalityProbe& p : probes)
      arr.push_back(json{{"inequality", p.inequality},
                         {"n", p.n},
                         {"constant", p.constant},
                         {"method", p.method},
                         {"samples", p.samples}});
    return arr;
  };
  j["sobolev"] = probes_json(sobolev);
  j["l3_gradient_orthogonal"] = probes_json(l3);
  j["coercivity"] = json{{"n", 1}, {"k", cfg.k}, {"tau", {taus[0], taus[1], taus[2]}},
                         {"margin", {margins[0], margins[1], margins[2]}}};
  j["seconds_total"] = elapsed(t0);

  write_text(out_path(cfg, "inequality.csv"), csv.str());
  write_text(out_path(cfg, "inequality.json"), j.dump(2) + "\n");
  std::printf("%s\n%s\n", out_path(cfg, "inequality.csv").c_str(),
              out_path(cfg, "inequality.json").c_str());
}

}  // namespace

void validate(RunConfig& cfg) {
  if (cfg.command != "meshinfo" && cfg.command != "solve" && cfg.command != "convergence" &&
      cfg.command != "inequality")
    throw ConfigError("unknown command: " + cfg.command);
  if (cfg.case_name != "a" && cfg.case_name != "b")
    throw ConfigError("case must be a or b");
  if (cfg.k != 1 && cfg.k != 2) throw ConfigError("k must be 1 or 2");
  if (cfg.tau < 0) cfg.tau = default_tau(cfg.k);
  if (cfg.tau <= 0) throw ConfigError("tau must be positive");
  if (cfg.variant != "sym" && cfg.variant != "nonsym")
    throw ConfigError("variant must be sym or nonsym");
  if (cfg.tol <= 0) throw ConfigError("tol must be positive");

  if (cfg.command == "convergence" || cfg.command == "inequality") {
    if (!cfg.mesh_path.empty())
      throw ConfigError(cfg.command + " runs use generated meshes; drop --mesh");
    if (cfg.levels.empty()) throw ConfigError(cfg.command + " needs --levels");
    for (size_t i = 0; i < cfg.levels.size(); ++i) {
      if (cfg.levels[i] < 1) throw ConfigError("levels must be positive");
      if (i > 0 && cfg.levels[i] <= cfg.levels[i - 1])
        throw ConfigError("levels must be strictly increasing");
    }
  }
  if (cfg.command == "convergence") {
    if (cfg.levels.size() < 3)
      throw ConfigError("convergence needs at least 3 levels, each double the previous");
    for (size_t i = 1; i < cfg.levels.size(); ++i)
      if (cfg.levels[i] != 2 * cfg.levels[i - 1])
        throw ConfigError("convergence levels must double: got " +
                          std::to_string(cfg.levels[i - 1]) + " then " +
                          std::to_string(cfg.levels[i]));
  }
  if (cfg.command == "inequality") {
    if (cfg.levels.back() > 4) throw ConfigError("inequality levels are limited to n <= 4");
  }
  if (cfg.command == "solve" || cfg.command == "meshinfo") {
    if (cfg.mesh_path.empty() && cfg.n < 1)
      throw ConfigError("provide --n for a generated mesh or --mesh for a Gmsh file");
    if (!cfg.mesh_path.empty() && cfg.n > 0)
      throw ConfigError("use either --n or --mesh, not both");
    if (!cfg.mesh_path.empty() && !std::filesystem::exists(cfg.mesh_path))
      throw ConfigError("mesh not found: " + cfg.mesh_path);
  }
}

void run_command(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  if (cfg.command == "meshinfo")
    run_meshinfo(cfg);
  else if (cfg.command == "solve")
    run_solve(cfg);
  else if (cfg.command == "convergence")
    run_convergence(cfg);
  else
    run_inequality(cfg);
}

}  // namespace qc
