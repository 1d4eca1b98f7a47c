// Command-line laboratory for soliton collisions in one-dimensional NLS
// models with polynomial nonlinearity. Subcommands expose the profile
// solver, linearized-operator diagnostics, the split-step evolver, the
// two-soliton ansatz residual sweep, collision and orbital experiments,
// and the modulation fitter.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nlslab/ansatz.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/io.hpp"
#include "nlslab/small_linalg.hpp"

using namespace nlslab;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  int threads = 4;
  unsigned long seed = 12345;
  json cfg;  // merged configuration

  void load() {
    cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot open config " + config_path);
      cfg = json::parse(is, nullptr, /*allow_exceptions=*/true);
    }
    if (cfg.contains("seed")) seed = cfg["seed"].get<unsigned long>();
    if (cfg.contains("threads")) threads = cfg["threads"].get<int>();
    if (cfg.contains("out")) out_dir = cfg["out"].get<std::string>();
  }
};

std::vector<std::pair<int, double>> nonlinearity_terms(const json& cfg, const std::string& name,
                                                       double a, double b) {
  if (cfg.contains("nonlinearity") && cfg["nonlinearity"].contains("terms")) {
    std::vector<std::pair<int, double>> terms;
    for (const auto& t : cfg["nonlinearity"]["terms"])
      terms.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
    return terms;
  }
  if (name == "cubic") return {{2, 1.0}};
  if (name == "cubic-quintic" || name == "cubic_quintic")
    return {{2, a / 2.0}, {3, b / 3.0}};
  throw ConfigError("unknown nonlinearity '" + name +
                    "' (use cubic, cubic-quintic, or config terms)");
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void emit_manifest(const CommonOpts& opts, const json& effective,
                   const std::vector<std::string>& outputs) {
  RunManifest m;
  m.config_hash = content_hash(effective.dump());
  m.code_version = code_version();
  m.created_utc = now_utc();
  m.seed = opts.seed;
  m.outputs = outputs;
  write_manifest(opts.out_dir, m, effective.dump());
}

Scheme parse_scheme(const std::string& s) {
  if (s == "strang") return Scheme::Strang;
  if (s == "yoshida4") return Scheme::Yoshida4;
  throw ConfigError("scheme must be strang or yoshida4");
}

int run_profile(const CommonOpts& opts, const std::string& nl, double a, double b, double omega,
                double half_length, int n) {
  PolynomialNonlinearity F(nonlinearity_terms(opts.cfg, nl, a, b));
  auto check = check_existence(F, omega);
  SolitonProfile p = solve_profile_full(F, omega, half_length, n);
  auto margin = stability_margin(F, omega);

  std::filesystem::create_directories(opts.out_dir);
  const std::string txt = opts.out_dir + "/profile.txt";
  {
    std::ofstream os(txt);
    for (size_t j = 0; j < p.x().size(); ++j)
      os << format_double(p.x()[j]) << " " << format_double(p.phi()[j]) << "\n";
  }
  json meta = {{"omega", p.omega()},
               {"y0", p.y0()},
               {"a_inf", p.a_inf()},
               {"mass", p.mass()},
               {"dQ_domega", margin.dQ_domega},
               {"existence", check.satisfied}};
  const std::string mj = opts.out_dir + "/profile.json";
  std::ofstream(mj) << meta.dump(2) << "\n";
  std::cout << meta.dump(2) << "\n";

  json eff = opts.cfg;
  eff["command"] = "profile";
  eff["omega"] = omega;
  emit_manifest(opts, eff, {txt, mj});
  return 0;
}

int run_linop_check(const CommonOpts& opts, const std::string& nl, double a, double b,
                    double omega, int n, double length) {
  PolynomialNonlinearity F(nonlinearity_terms(opts.cfg, nl, a, b));
  SolitonProfile p =
      solve_profile_full(F, omega, std::max(25.0 / std::sqrt(omega), 0.35 * length), 4096);
  GridPtr grid = make_grid(n, length);
  LinearizedOperator S(p, F, grid);
  const auto& bf = S.basis_fields();

  auto times_i = [](ComplexField f) {
    for (auto& z : f.v) z *= cplx(0, 1);
    return f;
  };
  const double k1 = norm(S.apply(bf.dphi), 0, 0) / norm(bf.dphi, 0, 0);
  const double k2 = norm(S.apply(times_i(bf.phi)), 0, 0) / norm(bf.phi, 0, 0);
  const double i1 = norm(S.apply(bf.domega) + bf.phi, 0, 0) / norm(bf.phi, 0, 0);
  ComplexField half_ixphi = times_i(bf.xphi);
  for (auto& z : half_ixphi.v) z *= 0.5;
  const double i2 = norm(S.apply(half_ixphi) + times_i(bf.dphi), 0, 0) / norm(bf.dphi, 0, 0);
  const double floor_c = coercivity_floor(S, {bf.dphi, times_i(bf.phi), bf.phi}, 240);
  const double floor_u = coercivity_floor(S, {}, 240);

  json out = {{"kernel_residuals", {k1, k2}},
              {"identity_residuals", {i1, i2}},
              {"coercivity_floor", floor_c},
              {"unconstrained_floor", floor_u},
              {"grid", {{"n", n}, {"L", length}}}};
  std::filesystem::create_directories(opts.out_dir);
  const std::string path = opts.out_dir + "/linop_check.json";
  std::ofstream(path) << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  json eff = opts.cfg;
  eff["command"] = "linop-check";
  emit_manifest(opts, eff, {path});
  return 0;
}

int run_evolve(const CommonOpts& opts, const std::string& nl, double a, double b, double omega,
               int n, double length, double dt, double t_end, const std::string& scheme, double v,
               int stride) {
  PolynomialNonlinearity F(nonlinearity_terms(opts.cfg, nl, a, b));
  SolitonProfile p =
      solve_profile_full(F, omega, std::max(25.0 / std::sqrt(omega), 0.3 * length), 4096);
  GridPtr grid = make_grid(n, length);

  // Initial data: a single boosted soliton, or the odd pair when the
  // config asks for "two_soliton".
  ComplexField u0(grid);
  const bool odd_pair = opts.cfg.value("initial", std::string("soliton")) == "two_soliton";
  if (odd_pair) {
    auto dyn = make_dynamics(p, F, std::max(std::abs(v), 0.05));
    u0 = ApproximateSolution::order0(p, dyn, grid).field(0.0);
  } else {
    SolitonParams sp;
    sp.omega = omega;
    sp.v = v;
    u0 = place([&](double x) { return p.value(x); }, sp, grid);
  }

  std::filesystem::create_directories(opts.out_dir);
  CsvWriter csv(opts.out_dir + "/observers.csv",
                {"t", "H", "Q", "M", "Q_plus", "M_plus", "flux", "oddness_residual"});
  ComplexField u_final = u0;
  Observer obs = [&](int, double t, const ComplexField& u) {
    auto c = conserved(u, F);
    double qp = 0, mp = 0, fl = 0;
    const double odd = oddness_residual(u);
    if (odd <= 1e-8) {
      auto h = half_quantities(u, F);
      qp = h.Q_plus;
      mp = h.M_plus;
      fl = h.boundary_flux;
    }
    csv.row({t, c.H, c.Q, c.M, qp, mp, fl, odd});
    u_final = u;
  };
  EvolutionConfig ecfg;
  ecfg.dt = dt;
  ecfg.t_end = t_end;
  ecfg.scheme = parse_scheme(scheme);
  ecfg.snapshot_stride = stride;
  run(u0, ecfg, F, {obs}, false);

  const std::string snap = opts.out_dir + "/final.csv";
  save_field(snap, u_final, t_end);
  json eff = opts.cfg;
  eff["command"] = "evolve";
  emit_manifest(opts, eff, {opts.out_dir + "/observers.csv", snap});
  std::cout << "{\"observers\": \"" << opts.out_dir << "/observers.csv\"}\n";
  return 0;
}

int run_ansatz_residual(const CommonOpts& opts, const std::string& nl, double a, double b,
                        double omega, int n, double length, std::vector<double> v_list,
                        std::vector<double> t_list, bool with_refine) {
  PolynomialNonlinearity F(nonlinearity_terms(opts.cfg, nl, a, b));
  SolitonProfile p =
      solve_profile_full(F, omega, std::max(30.0 / std::sqrt(omega), 0.35 * length), 4096);
  GridPtr grid = make_grid(n, length);
  LinearizedOperator S(p, F, grid);
  if (v_list.empty()) v_list = {0.05, 0.1, 0.2, 0.3};
  if (t_list.empty()) t_list = {0.0};

  std::filesystem::create_directories(opts.out_dir);
  CsvWriter csv(opts.out_dir + "/residuals.csv",
                {"v", "order", "t", "L2_residual", "H1_residual"});
  std::vector<double> lv, l0, l1, lr;
  for (double v : v_list) {
    auto dyn = make_dynamics(p, F, v);
    auto a0 = ApproximateSolution::order0(p, dyn, grid);
    auto a1 = ApproximateSolution::order1(p, F, dyn, S);
    for (double t : t_list) {
      auto r0 = a0.residual(t, F);
      auto r1 = a1.residual(t, F);
      csv.row({v, 0, t, norm(r0, 0, 0), norm(r0, 1, 0)});
      csv.row({v, 1, t, norm(r1, 0, 0), norm(r1, 1, 0)});
      if (t == 0.0) {
        lv.push_back(std::log(v));
        l0.push_back(std::log(norm(r0, 1, 0)));
        l1.push_back(std::log(norm(r1, 1, 0)));
      }
    }
    if (with_refine) {
      auto ref = refine_numeric(a0, S, F, 0.0);
      csv.row({v, 2, 0.0, -1.0, ref.residual_after});
      lr.push_back(std::log(ref.residual_after));
    }
  }
  json slopes;
  if (lv.size() >= 2) {
    slopes["order0_slope"] = fit_line(lv, l0).slope;
    slopes["order1_slope"] = fit_line(lv, l1).slope;
    if (with_refine && lr.size() == lv.size())
      slopes["refined_slope"] = fit_line(lv, lr).slope;
  }
  const std::string sj = opts.out_dir + "/slopes.json";
  std::ofstream(sj) << slopes.dump(2) << "\n";
  std::cout << slopes.dump(2) << "\n";
  json eff = opts.cfg;
  eff["command"] = "ansatz-residual";
  emit_manifest(opts, eff, {opts.out_dir + "/residuals.csv", sj});
  return 0;
}

CollisionConfig collision_from(const CommonOpts& opts, const std::string& nl, double a, double b,
                               double omega, double v, int order, int n, double length, double dt,
                               const std::string& scheme) {
  CollisionConfig cfg;
  cfg.nonlinearity = nonlinearity_terms(opts.cfg, nl, a, b);
  cfg.omega = omega;
  cfg.v = v;
  cfg.ansatz_order = order;
  cfg.grid_n = n;
  cfg.grid_length = length;
  cfg.dt = dt;
  cfg.scheme = parse_scheme(scheme);
  if (opts.cfg.contains("time")) {
    const auto& t = opts.cfg["time"];
    cfg.t_start = t.value("t_start", 0.0);
    cfg.t_end = t.value("t_end", 0.0);
    cfg.dt = t.value("dt", cfg.dt);
  }
  if (opts.cfg.contains("grid")) {
    cfg.grid_n = opts.cfg["grid"].value("n", cfg.grid_n);
    cfg.grid_length = opts.cfg["grid"].value("length", cfg.grid_length);
  }
  return cfg;
}

void write_collision_outputs(const std::string& dir, const CollisionReport& rep,
                             std::vector<std::string>& outputs) {
  CsvWriter mod(dir + "/modulation.csv", {"t", "p_zeta", "p_v", "p_gamma", "p_omega", "r_L2",
                                          "r_H1", "L", "P1", "P2", "E"});
  for (size_t i = 0; i < rep.modulation_trace.size(); ++i) {
    const auto& st = rep.modulation_trace[i];
    const auto& d = rep.remainder_trace[i];
    mod.row({st.t, st.shifts[0], st.shifts[1], st.shifts[2], st.shifts[3], d.r_L2, d.r_H1, d.L,
             d.P1, d.P2, d.E});
  }
  CsvWriter flux(dir + "/halfline.csv", {"t", "M_plus", "flux"});
  for (const auto& f : rep.flux_trace) flux.row({f.t, f.M_plus, f.flux});
  CsvWriter cen(dir + "/centroid.csv", {"t", "zeta_centroid"});
  for (const auto& c : rep.centroid_trace) cen.row({c.first, c.second});
  outputs.push_back(dir + "/modulation.csv");
  outputs.push_back(dir + "/halfline.csv");
  outputs.push_back(dir + "/centroid.csv");
}

json report_json(const CollisionReport& rep) {
  return json{{"v_in", rep.v_in},
              {"v_out", rep.v_out},
              {"inelasticity", rep.inelasticity},
              {"remainder_H1_final", rep.remainder_H1_final},
              {"prepared_residual_H1", rep.prepared_residual_H1},
              {"mass_drift", rep.mass_drift},
              {"energy_drift", rep.energy_drift},
              {"momentum_drift", rep.momentum_drift},
              {"min_separation", rep.min_separation},
              {"mplus_monotone_defect", rep.mplus_monotone_defect},
              {"flux_match_rel_error", rep.flux_match_rel_error},
              {"max_oddness_residual", rep.max_oddness_residual},
              {"modulation_trace", "modulation.csv"}};
}

int run_collide(const CommonOpts& opts, CollisionConfig cfg) {
  CollisionReport rep = run_collision(cfg);
  std::filesystem::create_directories(opts.out_dir);
  std::vector<std::string> outputs;
  write_collision_outputs(opts.out_dir, rep, outputs);
  json rj = report_json(rep);
  const std::string path = opts.out_dir + "/report.json";
  std::ofstream(path) << rj.dump(2) << "\n";
  outputs.push_back(path);
  std::cout << rj.dump(2) << "\n";
  json eff = opts.cfg;
  eff["command"] = "collide";
  eff["v"] = cfg.v;
  emit_manifest(opts, eff, outputs);
  return 0;
}

int run_sweep(const CommonOpts& opts, CollisionConfig base, std::vector<double> v_list) {
  if (v_list.empty() && opts.cfg.contains("v_list"))
    for (const auto& v : opts.cfg["v_list"]) v_list.push_back(v.get<double>());
  if (v_list.empty()) v_list = {0.1, 0.15, 0.2, 0.3};
  SweepResult sw = sweep(base, v_list, opts.threads, true);

  std::filesystem::create_directories(opts.out_dir);
  CsvWriter csv(opts.out_dir + "/sweep.csv",
                {"v", "inelasticity", "floor", "corrected", "remainder_H1"});
  for (size_t i = 0; i < sw.v_list.size(); ++i)
    csv.row({sw.v_list[i], sw.inelasticity[i], sw.inelasticity_floor[i],
             sw.inelasticity_corrected[i], sw.remainder_H1[i]});
  json rj = {{"inelasticity_slope", sw.inelasticity_slope},
             {"inelasticity_stderr", sw.inelasticity_stderr},
             {"remainder_slope", sw.remainder_slope},
             {"remainder_stderr", sw.remainder_stderr},
             {"n_usable", sw.n_usable},
             {"failures", sw.failures}};
  const std::string path = opts.out_dir + "/sweep.json";
  std::ofstream(path) << rj.dump(2) << "\n";
  std::cout << rj.dump(2) << "\n";
  json eff = opts.cfg;
  eff["command"] = "sweep";
  emit_manifest(opts, eff, {opts.out_dir + "/sweep.csv", path});
  return sw.failures.empty() ? 0 : 2;
}

int run_orbital(const CommonOpts& opts, OrbitalConfig cfg) {
  OrbitalReport rep = orbital_window(cfg);
  std::filesystem::create_directories(opts.out_dir);
  CsvWriter csv(opts.out_dir + "/orbital.csv", {"t", "zeta", "zeta_dot", "r_H1"});
  for (const auto& row : rep.trace) csv.row({row[0], row[1], row[2], row[3]});
  json rj = {{"zeta0", rep.zeta0},
             {"max_remainder_H1", rep.max_remainder_H1},
             {"bound", rep.bound},
             {"min_zeta_dot", rep.min_zeta_dot},
             {"remainder_ok", rep.remainder_ok},
             {"speed_ok", rep.speed_ok}};
  const std::string path = opts.out_dir + "/orbital.json";
  std::ofstream(path) << rj.dump(2) << "\n";
  std::cout << rj.dump(2) << "\n";
  json eff = opts.cfg;
  eff["command"] = "orbital";
  emit_manifest(opts, eff, {opts.out_dir + "/orbital.csv", path});
  return (rep.remainder_ok && rep.speed_ok) ? 0 : 2;
}

int run_fit(const CommonOpts& opts, const std::string& nl, double a, double b, double omega,
            const std::string& input, double zeta, double v, double gamma) {
  PolynomialNonlinearity F(nonlinearity_terms(opts.cfg, nl, a, b));
  double t = 0;
  ComplexField u = load_field(input, &t);
  SolitonProfile p = solve_profile_full(F, omega, 0.35 * u.grid->length(), 4096);
  ModulationModel model{&p, nullptr, t};
  SolitonParams guess;
  guess.omega = omega;
  guess.zeta = zeta;
  guess.v = v;
  guess.gamma = gamma;
  auto st = fit(u, guess, model, 0.35);
  ComplexField r = remainder(u, st, model);
  auto diag = lyapunov(r, st.fitted(), p, F, v);
  json rj = {{"t", t},
             {"p_zeta", st.shifts[0]},
             {"p_v", st.shifts[1]},
             {"p_gamma", st.shifts[2]},
             {"p_omega", st.shifts[3]},
             {"r_H1", st.residual_norm},
             {"L", diag.L},
             {"P1", diag.P1},
             {"P2", diag.P2},
             {"E", diag.E}};
  std::cout << rj.dump(2) << "\n";
  std::filesystem::create_directories(opts.out_dir);
  const std::string path = opts.out_dir + "/fit.json";
  std::ofstream(path) << rj.dump(2) << "\n";
  json eff = opts.cfg;
  eff["command"] = "fit";
  emit_manifest(opts, eff, {path});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlslab: soliton-collision laboratory for 1d NLS with polynomial nonlinearity"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "JSON configuration file");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--threads", opts.threads, "worker threads for sweeps");
  app.add_option("--seed", opts.seed, "seed recorded in the manifest");

  std::string nl = "cubic";
  double a = 2.0, b = 0.1, omega = 1.0;
  app.add_option("--nonlinearity", nl, "cubic | cubic-quintic (PDE term is F'(|u|^2)u)");
  app.add_option("--a", a, "cubic coefficient of cubic-quintic (a|u|^2 u)");
  app.add_option("--b", b, "quintic coefficient of cubic-quintic (b|u|^4 u)");
  app.add_option("--omega", omega, "soliton frequency");

  auto* p_cmd = app.add_subcommand("profile", "solve the ground-state profile");
  double half_length = 25.0;
  int pn = 2048;
  p_cmd->add_option("--half-length", half_length);
  p_cmd->add_option("--n", pn, "sample intervals");

  auto* l_cmd = app.add_subcommand("linop-check", "kernel/identity/coercivity diagnostics");
  int ln = 4096;
  double llen = 80.0;
  l_cmd->add_option("--n", ln);
  l_cmd->add_option("--length", llen);

  auto* e_cmd = app.add_subcommand("evolve", "split-step evolution with observers");
  int en = 2048;
  double elen = 80.0, edt = 1e-3, et_end = 10.0, ev = 0.0;
  int estride = 100;
  std::string escheme = "strang";
  e_cmd->add_option("--n", en);
  e_cmd->add_option("--length", elen);
  e_cmd->add_option("--dt", edt);
  e_cmd->add_option("--t-end", et_end);
  e_cmd->add_option("--v", ev, "boost velocity of the initial soliton");
  e_cmd->add_option("--scheme", escheme, "strang | yoshida4");
  e_cmd->add_option("--stride", estride, "observer stride in steps");

  auto* r_cmd = app.add_subcommand("ansatz-residual", "residual scaling of the two-soliton ansatz");
  int rn = 2048;
  double rlen = 80.0;
  std::vector<double> r_vs, r_ts;
  bool r_refine = false;
  r_cmd->add_option("--n", rn);
  r_cmd->add_option("--length", rlen);
  r_cmd->add_option("--v", r_vs, "speeds (repeatable)");
  r_cmd->add_option("--t", r_ts, "times (repeatable)");
  r_cmd->add_flag("--refine", r_refine, "also run the numeric refinement at t=0");

  auto* c_cmd = app.add_subcommand("collide", "one collision experiment");
  double cv = 0.2, clen = 80.0, cdt = 1e-3;
  int cn = 2048, corder = 1;
  std::string cscheme = "yoshida4";
  c_cmd->add_option("--v", cv);
  c_cmd->add_option("--n", cn);
  c_cmd->add_option("--length", clen);
  c_cmd->add_option("--dt", cdt);
  c_cmd->add_option("--order", corder, "ansatz order of the prepared data");
  c_cmd->add_option("--scheme", cscheme);

  auto* s_cmd = app.add_subcommand("sweep", "collision sweep over speeds");
  std::vector<double> s_vs;
  double slen = 80.0, sdt = 1e-3;
  int sn = 2048, sorder = 1;
  std::string sscheme = "yoshida4";
  s_cmd->add_option("--v", s_vs, "speeds (repeatable)");
  s_cmd->add_option("--n", sn);
  s_cmd->add_option("--length", slen);
  s_cmd->add_option("--dt", sdt);
  s_cmd->add_option("--order", sorder);
  s_cmd->add_option("--scheme", sscheme);

  auto* o_cmd = app.add_subcommand("orbital", "orbital-stability window for receding solitons");
  OrbitalConfig ocfg;
  o_cmd->add_option("--v0", ocfg.v0);
  o_cmd->add_option("--zeta0", ocfg.zeta0);
  o_cmd->add_option("--perturbation", ocfg.perturbation_H1);
  o_cmd->add_option("--window", ocfg.window);
  o_cmd->add_option("--n", ocfg.grid_n);
  o_cmd->add_option("--length", ocfg.grid_length);
  o_cmd->add_option("--dt", ocfg.dt);

  auto* f_cmd = app.add_subcommand("fit", "modulation fit of a stored snapshot");
  std::string f_input;
  double f_zeta = 10.0, f_v = 0.0, f_gamma = 0.0;
  f_cmd->add_option("--input", f_input, "field snapshot csv")->required();
  f_cmd->add_option("--zeta", f_zeta);
  f_cmd->add_option("--v", f_v);
  f_cmd->add_option("--gamma", f_gamma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;  // config/usage error
  }

  try {
    opts.load();
    if (opts.cfg.contains("omega")) omega = opts.cfg["omega"].get<double>();
    if (p_cmd->parsed()) return run_profile(opts, nl, a, b, omega, half_length, pn);
    if (l_cmd->parsed()) return run_linop_check(opts, nl, a, b, omega, ln, llen);
    if (e_cmd->parsed())
      return run_evolve(opts, nl, a, b, omega, en, elen, edt, et_end, escheme, ev, estride);
    if (r_cmd->parsed())
      return run_ansatz_residual(opts, nl, a, b, omega, rn, rlen, r_vs, r_ts, r_refine);
    if (c_cmd->parsed())
      return run_collide(opts,
                         collision_from(opts, nl, a, b, omega, cv, corder, cn, clen, cdt, cscheme));
    if (s_cmd->parsed())
      return run_sweep(
          opts, collision_from(opts, nl, a, b, omega, 0.2, sorder, sn, slen, sdt, sscheme), s_vs);
    if (o_cmd->parsed()) {
      ocfg.nonlinearity = nonlinearity_terms(opts.cfg, nl, a, b);
      ocfg.omega = omega;
      ocfg.seed = opts.seed;
      return run_orbital(opts, ocfg);
    }
    if (f_cmd->parsed()) return run_fit(opts, nl, a, b, omega, f_input, f_zeta, f_v, f_gamma);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream(opts.out_dir + "/error.json") << nlohmann::json{{"error", e.what()}}.dump(2)
                                                << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 3;
}
