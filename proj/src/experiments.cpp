#include "nlslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "nlslab/small_linalg.hpp"

namespace nlslab {

void CollisionConfig::finalize(const InteractionDynamics& dyn) {
  if (post_window <= 0) post_window = 10.0 / v;
  if (t_start == 0.0) {
    const double sw = std::sqrt(omega);
    // Separation requirement: exp(-2 sw d) <= 1e-3 v^2.
    const double d_req = std::log(1e3 / (v * v)) / (2.0 * sw);
    double t_half = 1.0;
    while (dyn.d(t_half) < d_req && t_half < 1e6) t_half *= 1.5;
    // Refine by bisection.
    double lo = 0, hi = t_half;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (dyn.d(mid) < d_req ? lo : hi) = mid;
    }
    t_half = hi;
    const double T = t_half + post_window;
    t_start = -T;
    t_end = T;
  }
  if (snapshot_stride <= 0) snapshot_stride = std::max(1, (int)std::lround(0.2 / dt));
}

ExperimentSetup make_setup(const CollisionConfig& cfg) {
  ExperimentSetup s{PolynomialNonlinearity(cfg.nonlinearity),
                    SolitonProfile{},
                    InteractionDynamics{},
                    nullptr,
                    nullptr,
                    nullptr};
  const double sw = std::sqrt(cfg.omega);
  const double hl = std::max(25.0 / sw, 0.35 * cfg.grid_length);
  s.profile = solve_profile_full(s.F, cfg.omega, hl, 4096);
  s.dyn = make_dynamics(s.profile, s.F, cfg.v);
  s.grid = make_grid(cfg.grid_n, cfg.grid_length);
  s.S = std::make_shared<LinearizedOperator>(s.profile, s.F, s.grid);
  if (cfg.ansatz_order >= 1) {
    s.approx = std::make_shared<ApproximateSolution>(
        ApproximateSolution::order1(s.profile, s.F, s.dyn, *s.S));
  } else {
    s.approx =
        std::make_shared<ApproximateSolution>(ApproximateSolution::order0(s.profile, s.dyn, s.grid));
  }
  return s;
}

ComplexField prepare(const ExperimentSetup& setup, const CollisionConfig& cfg,
                     double* residual_H1) {
  const double d0 = setup.dyn.d(cfg.t_start);
  const double sw = std::sqrt(cfg.omega);
  if (d0 + 12.0 / sw > 0.5 * cfg.grid_length)
    throw WrapAround("initial separation " + std::to_string(d0) +
                     " does not fit the domain");
  ComplexField u0 = setup.approx->field(cfg.t_start);
  if (residual_H1) *residual_H1 = norm(setup.approx->residual(cfg.t_start, setup.F), 1, 0);
  return u0;
}

namespace {

double halfline_centroid(const ComplexField& u) {
  const auto& x = u.grid->x();
  const int j0 = u.grid->zero_index();
  double m = 0, mx = 0;
  for (int j = j0; j < u.n(); ++j) {
    const double a = std::norm(u.v[j]);
    m += a;
    mx += a * x[j];
  }
  return m > 0 ? mx / m : 0.0;
}

// Phase re-acquisition: coarse gamma scan, then Newton.
std::optional<ModulationState> try_fit(const ComplexField& u, const ModulationModel& model,
                                       SolitonParams guess, bool rescan_gamma) {
  if (rescan_gamma) {
    double best = 1e300;
    double best_gamma = guess.gamma;
    for (int k = 0; k < 16; ++k) {
      SolitonParams g = guess;
      g.gamma = guess.gamma + 2.0 * M_PI * k / 16.0;
      const double d = norm(u - model.build(g, u.grid), 1, 0);
      if (d < best) {
        best = d;
        best_gamma = g.gamma;
      }
    }
    guess.gamma = best_gamma;
  }
  try {
    return fit(u, guess, model, 0.35);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

CollisionReport run_collision(const CollisionConfig& cfg_in) {
  CollisionConfig cfg = cfg_in;
  ExperimentSetup setup = make_setup(cfg);
  cfg.finalize(setup.dyn);

  CollisionReport rep;
  ComplexField u0 = prepare(setup, cfg, &rep.prepared_residual_H1);

  const double sw = std::sqrt(cfg.omega);
  const double fit_min_sep = 5.0 / sw;
  ModulationModel model{&setup.profile, setup.approx->order() >= 1 ? setup.approx.get() : nullptr,
                        cfg.t_start};

  ConservedQuantities c0 = conserved(u0, setup.F);
  ConservedQuantities c_last = c0;
  rep.min_separation = 1e300;

  std::optional<ModulationState> last_fit;
  std::vector<FluxSample>& flux = rep.flux_trace;

  Observer track = [&](int, double t, const ComplexField& u) {
    c_last = conserved(u, setup.F);
    const double zc = halfline_centroid(u);
    rep.centroid_trace.push_back({t, zc});
    rep.min_separation = std::min(rep.min_separation, zc);
    rep.max_oddness_residual = std::max(rep.max_oddness_residual, oddness_residual(u));
    HalfLineQuantities h = half_quantities(u, setup.F);
    flux.push_back({t, h.M_plus, h.boundary_flux});

    if (zc >= fit_min_sep) {
      SolitonParams guess;
      bool rescan = true;
      if (last_fit) {
        guess = last_fit->fitted();
        const double dt_snap = t - last_fit->t;
        guess.zeta += guess.v * dt_snap;
        guess.gamma += (cfg.omega + 0.25 * guess.v * guess.v) * dt_snap;
        rescan = false;
      } else {
        guess.omega = cfg.omega;
        guess.zeta = zc;
        guess.v = setup.dyn.d_dot(t);
        guess.gamma = cfg.omega * t;
        guess.f_omega = 0;
      }
      ModulationModel m = model;
      m.t = t;
      auto st = try_fit(u, m, guess, rescan);
      if (!st && !rescan) st = try_fit(u, m, guess, true);
      if (st) {
        st->t = t;
        ModulationModel mm = m;
        ComplexField r = remainder(u, *st, mm);
        rep.remainder_trace.push_back(
            lyapunov(r, st->fitted(), setup.profile, setup.F, setup.dyn.d_dot(t)));
        rep.modulation_trace.push_back(*st);
        last_fit = st;
      }
    } else {
      last_fit.reset();
    }
  };

  EvolutionConfig ecfg;
  ecfg.dt = cfg.dt;
  ecfg.t_begin = cfg.t_start;
  ecfg.t_end = cfg.t_end;
  ecfg.scheme = cfg.scheme;
  ecfg.snapshot_stride = cfg.snapshot_stride;
  Trajectory traj = run(u0, ecfg, setup.F, {track}, /*keep_snapshots=*/false);
  (void)traj;

  rep.mass_drift = std::abs(c_last.Q - c0.Q) / std::max(std::abs(c0.Q), 1e-300);
  rep.energy_drift = std::abs(c_last.H - c0.H) / std::max(std::abs(c0.H), 1e-300);
  rep.momentum_drift = std::abs(c_last.M - c0.M) / std::max(std::abs(c0.Q), 1e-300);

  // v_in / v_out from the fitted centers over the first/last windows.
  auto window_slope = [&](double t_lo, double t_hi) {
    std::vector<double> ts, zs;
    for (const auto& st : rep.modulation_trace) {
      if (st.t >= t_lo && st.t <= t_hi) {
        ts.push_back(st.t);
        zs.push_back(st.fitted().zeta);
      }
    }
    if (ts.size() < 5) throw FitLost("too few fitted centers in the regression window");
    return fit_line(ts, zs).slope;
  };
  rep.v_in = std::abs(window_slope(cfg.t_start, cfg.t_start + cfg.post_window));
  rep.v_out = std::abs(window_slope(cfg.t_end - cfg.post_window, cfg.t_end));
  rep.inelasticity = std::abs(rep.v_out - rep.v_in);

  if (!rep.modulation_trace.empty()) {
    rep.remainder_H1_final = rep.modulation_trace.back().residual_norm;
  } else {
    throw FitLost("no post-collision modulation fit");
  }

  // M+ monotonicity and the boundary-flux identity. For odd solutions
  // d(M+)/dt = |psi_x(t,0)|^2 (integration by parts; twice the stored
  // |psi_x|^2/2 flux quantity).
  double worst_drop = 0, worst_flux = 0, peak_flux = 0;
  for (const auto& f : flux) peak_flux = std::max(peak_flux, 2.0 * f.flux);
  for (size_t i = 1; i < flux.size(); ++i)
    worst_drop = std::max(worst_drop, flux[i - 1].M_plus - flux[i].M_plus);
  for (size_t i = 1; i + 1 < flux.size(); ++i) {
    const double fd = (flux[i + 1].M_plus - flux[i - 1].M_plus) /
                      (flux[i + 1].t - flux[i - 1].t);
    worst_flux = std::max(worst_flux, std::abs(fd - 2.0 * flux[i].flux));
  }
  rep.mplus_monotone_defect = worst_drop;
  rep.flux_match_rel_error = peak_flux > 0 ? worst_flux / peak_flux : 0;

  return rep;
}

SweepResult sweep(const CollisionConfig& base, const std::vector<double>& v_list, int threads,
                  bool calibrate_floor) {
  if (v_list.size() < 3) throw ConfigError("sweep needs >= 3 speeds");
  SweepResult out;
  out.v_list = v_list;
  out.inelasticity.assign(v_list.size(), 0.0);
  out.inelasticity_floor.assign(v_list.size(), 0.0);
  out.inelasticity_corrected.assign(v_list.size(), 0.0);
  out.remainder_H1.assign(v_list.size(), 0.0);
  out.remainder_floor.assign(v_list.size(), 0.0);

  struct Job {
    size_t index;
    bool floor;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < v_list.size(); ++i) {
    jobs.push_back({i, false});
    if (calibrate_floor) jobs.push_back({i, true});
  }

  std::mutex mtx;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job job = jobs[j];
      CollisionConfig cfg = base;
      cfg.v = v_list[job.index];
      cfg.t_start = cfg.t_end = 0;  // re-derive per speed
      if (job.floor) cfg.nonlinearity = {{2, 1.0}};
      try {
        CollisionReport rep = run_collision(cfg);
        std::lock_guard<std::mutex> lock(mtx);
        if (job.floor) {
          out.inelasticity_floor[job.index] = rep.inelasticity;
          out.remainder_floor[job.index] = rep.remainder_H1_final;
        } else {
          out.inelasticity[job.index] = rep.inelasticity;
          out.remainder_H1[job.index] = rep.remainder_H1_final;
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mtx);
        out.failures.push_back("v=" + std::to_string(v_list[job.index]) +
                               (job.floor ? " (floor)" : "") + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::max(1, std::min<int>(threads, (int)jobs.size()));
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (!out.failures.empty()) return out;

  // Quadrature subtraction of the solver floor, then log-log slopes.
  std::vector<double> lx, ly, rx_, ry;
  for (size_t i = 0; i < v_list.size(); ++i) {
    const double m = out.inelasticity[i], f = out.inelasticity_floor[i];
    const double corr2 = m * m - f * f;
    out.inelasticity_corrected[i] = corr2 > 0 ? std::sqrt(corr2) : 0.0;
    if (out.inelasticity_corrected[i] > 0) {
      lx.push_back(std::log(v_list[i]));
      ly.push_back(std::log(out.inelasticity_corrected[i]));
    }
    rx_.push_back(std::log(v_list[i]));
    ry.push_back(std::log(std::max(out.remainder_H1[i], 1e-300)));
  }
  out.n_usable = (int)lx.size();
  if (lx.size() >= 3) {
    auto f = fit_line(lx, ly);
    out.inelasticity_slope = f.slope;
    out.inelasticity_stderr = f.slope_stderr;
  }
  {
    auto f = fit_line(rx_, ry);
    out.remainder_slope = f.slope;
    out.remainder_stderr = f.slope_stderr;
  }
  return out;
}

OrbitalReport orbital_window(const OrbitalConfig& cfg) {
  PolynomialNonlinearity F(cfg.nonlinearity);
  const double sw = std::sqrt(cfg.omega);
  OrbitalReport rep;
  rep.zeta0 = cfg.zeta0 > 0 ? cfg.zeta0 : (16.0 / sw) * std::log(1.0 / cfg.v0);
  const double window = cfg.window > 0 ? cfg.window : 20.0 / cfg.v0;

  SolitonProfile prof = solve_profile_full(F, cfg.omega, 0.35 * cfg.grid_length, 4096);
  GridPtr grid = make_grid(cfg.grid_n, cfg.grid_length);

  // Receding pair: right soliton at +zeta0 moving right.
  SolitonParams sp;
  sp.zeta = rep.zeta0;
  sp.v = cfg.v0;
  sp.gamma = 0;
  sp.omega = cfg.omega;
  ComplexField u0 = sym(place([&](double y) { return prof.value(y); }, sp, grid));

  // Odd perturbation of prescribed H^1 size: antisymmetrized Gaussian
  // noise bump near the right soliton, seeded deterministically.
  {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexField pert(grid);
    for (int j = 0; j < grid->n(); ++j) {
      const double y = grid->x()[j] - rep.zeta0;
      const double env = std::exp(-0.25 * y * y);
      pert.v[j] = cplx(gauss(rng), gauss(rng)) * env;
    }
    // Keep it smooth: damp high wavenumbers.
    auto hat = spectrum(pert);
    for (int j = 0; j < grid->n(); ++j)
      hat[j] *= std::exp(-grid->k2()[j] / (2.0 * 9.0));
    pert = from_spectrum(grid, std::move(hat));
    pert = odd_part(pert);
    const double s = cfg.perturbation_H1 / norm(pert, 1, 0);
    for (auto& z : pert.v) z *= s;
    u0 += pert;
  }

  ModulationModel model{&prof, nullptr, 0.0};
  rep.min_zeta_dot = 1e300;
  std::optional<ModulationState> prev;
  double prev_t = 0;

  Observer track = [&](int, double t, const ComplexField& u) {
    SolitonParams guess = sp;
    bool rescan = true;
    if (prev) {
      guess = prev->fitted();
      guess.zeta += guess.v * (t - prev_t);
      guess.gamma += (cfg.omega + 0.25 * guess.v * guess.v) * (t - prev_t);
      rescan = false;
    }
    auto st = try_fit(u, model, guess, rescan);
    if (!st) throw FitLost("orbital window fit lost at t = " + std::to_string(t));
    const double rh1 = st->residual_norm;
    rep.max_remainder_H1 = std::max(rep.max_remainder_H1, rh1);
    if (prev) {
      const double zdot = (st->fitted().zeta - prev->fitted().zeta) / (t - prev_t);
      rep.min_zeta_dot = std::min(rep.min_zeta_dot, zdot);
      rep.trace.push_back({t, st->fitted().zeta, zdot, rh1});
    }
    prev = st;
    prev_t = t;
  };

  EvolutionConfig ecfg;
  ecfg.dt = cfg.dt;
  ecfg.t_begin = 0;
  ecfg.t_end = window;
  ecfg.scheme = Scheme::Yoshida4;
  ecfg.snapshot_stride = std::max(1, (int)std::lround(0.5 / cfg.dt));
  run(u0, ecfg, F, {track}, /*keep_snapshots=*/false);

  rep.bound = 1e-5 + 10.0 * std::exp(-0.5 * sw * rep.zeta0);
  rep.remainder_ok = rep.max_remainder_H1 <= rep.bound;
  rep.speed_ok = rep.min_zeta_dot >= 0.75 * cfg.v0;
  return rep;
}

}  // namespace nlslab
