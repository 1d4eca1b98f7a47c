#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <optional>

#include "nlslab/experiments.hpp"

using namespace nlslab;

namespace {
CollisionConfig quick_config(double v) {
  CollisionConfig cfg;
  cfg.nonlinearity = {{2, 1.0}};
  cfg.omega = 1.0;
  cfg.v = v;
  cfg.ansatz_order = 1;
  cfg.grid_n = 1024;
  cfg.grid_length = 80.0;
  cfg.dt = 4e-3;
  cfg.scheme = Scheme::Yoshida4;
  return cfg;
}
}  // namespace

TEST_CASE("prepared data: separation, oddness, order comparison") {
  CollisionConfig cfg = quick_config(0.2);
  ExperimentSetup setup = make_setup(cfg);
  cfg.finalize(setup.dyn);

  // Endpoint separation satisfies exp(-2 sqrt(w) d) <= 1e-3 v^2.
  CHECK(setup.dyn.exp_m2sd(cfg.t_start) <= 1e-3 * cfg.v * cfg.v * (1 + 1e-9));

  double res1 = 0;
  ComplexField u0 = prepare(setup, cfg, &res1);
  CHECK(oddness_residual(u0) <= 1e-14);

  CollisionConfig cfg0 = cfg;
  cfg0.ansatz_order = 0;
  ExperimentSetup setup0 = make_setup(cfg0);
  double res0 = 0;
  prepare(setup0, cfg0, &res0);
  std::printf("[prepare] order-0 residual %.3e, order-1 residual %.3e\n", res0, res1);
  // At the prepared separation both orders sit at the evaluation floor;
  // order 1 must not be worse, and is strictly better where the
  // interaction is resolved (covered by the residual-scaling tests).
  CHECK(res1 <= res0 * 1.02 + 1e-12);
}

TEST_CASE("wrap-around domain is rejected in prepare") {
  CollisionConfig cfg = quick_config(0.2);
  cfg.grid_length = 40.0;  // too small for d(t_start) + tails
  cfg.grid_n = 512;
  cfg.ansatz_order = 0;
  ExperimentSetup setup = make_setup(cfg);
  cfg.finalize(setup.dyn);
  CHECK_THROWS_AS(prepare(setup, cfg), WrapAround);
}

TEST_CASE("cubic collision is elastic to solver precision") {
  CollisionConfig cfg = quick_config(0.2);
  CollisionReport rep = run_collision(cfg);
  std::printf("[collide] v_in=%.6f v_out=%.6f inel=%.2e rem=%.2e minsep=%.2f\n", rep.v_in,
              rep.v_out, rep.inelasticity, rep.remainder_H1_final, rep.min_separation);
  std::printf("[collide] drifts Q=%.1e H=%.1e  M+defect=%.1e fluxerr=%.2e odd=%.1e\n",
              rep.mass_drift, rep.energy_drift, rep.mplus_monotone_defect,
              rep.flux_match_rel_error, rep.max_oddness_residual);
  CHECK(rep.v_in == doctest::Approx(0.2).epsilon(0.02));
  CHECK(rep.inelasticity <= 2e-3);  // coarse-step smoke bound
  CHECK(rep.mass_drift <= 1e-10);
  CHECK(rep.energy_drift <= 1e-7);
  CHECK(rep.mplus_monotone_defect <= 1e-8);
  CHECK(rep.flux_match_rel_error <= 1e-3);
  CHECK(rep.max_oddness_residual <= 1e-9);
  // Opposite-phase solitons repel: closest approach is d(0) = ln(sqrt(C)/v).
  CHECK(rep.min_separation == doctest::Approx(3.0).epsilon(0.03));
  CHECK(rep.remainder_H1_final <= 5e-3);
}

TEST_CASE("sweep aggregates runs and fits slopes") {
  CollisionConfig base = quick_config(0.0);
  base.nonlinearity = {{2, 1.0}, {3, 0.1 / 3.0}};  // cubic-quintic a=2 b=0.1
  std::vector<double> vs = {0.2, 0.25, 0.3};
  SweepResult sw = sweep(base, vs, 4, true);
  for (const auto& fail : sw.failures) std::printf("[sweep] FAIL %s\n", fail.c_str());
  CHECK(sw.failures.empty());
  for (size_t i = 0; i < vs.size(); ++i)
    std::printf("[sweep] v=%.2f inel=%.3e floor=%.3e corrected=%.3e remainder=%.3e\n", vs[i],
                sw.inelasticity[i], sw.inelasticity_floor[i], sw.inelasticity_corrected[i],
                sw.remainder_H1[i]);
  std::printf("[sweep] inel slope=%.2f (+-%.2f, n=%d) remainder slope=%.2f (+-%.2f)\n",
              sw.inelasticity_slope, sw.inelasticity_stderr, sw.n_usable, sw.remainder_slope,
              sw.remainder_stderr);
  CHECK(sw.remainder_H1[2] > sw.remainder_H1[0]);  // remainder grows with v

  CHECK_THROWS_AS(sweep(base, {0.1, 0.2}, 2, false), ConfigError);
}

TEST_CASE("modulation rate check along a PDE trajectory") {
  // Evolve order-0 data (its v^2-level flow residual excites the shifts)
  // and check the fitted modulation ODE balances over the approach phase.
  CollisionConfig cfg = quick_config(0.2);
  cfg.ansatz_order = 0;
  ExperimentSetup setup = make_setup(cfg);
  cfg.finalize(setup.dyn);
  ComplexField u0 = prepare(setup, cfg);

  ModulationModel model{&setup.profile, nullptr, cfg.t_start};
  std::vector<ModulationState> states;
  std::optional<ModulationState> prev;
  Observer obs = [&](int, double t, const ComplexField& u) {
    if (setup.dyn.d(t) < 6.0 || t > 0) return;  // approach phase only
    SolitonParams guess;
    guess.omega = cfg.omega;
    guess.zeta = setup.dyn.d(t);
    guess.v = setup.dyn.d_dot(t);
    guess.gamma = cfg.omega * t;
    if (prev) {
      guess = prev->fitted();
      const double dt_snap = t - prev->t;
      guess.zeta += guess.v * dt_snap;
      guess.gamma += (cfg.omega + 0.25 * guess.v * guess.v) * dt_snap;
    }
    ModulationModel m = model;
    m.t = t;
    auto st = fit(u, guess, m, 0.35);
    st.t = t;
    states.push_back(st);
    prev = st;
  };
  EvolutionConfig ecfg;
  ecfg.dt = cfg.dt;
  ecfg.t_begin = cfg.t_start;
  ecfg.t_end = 0.0;
  ecfg.scheme = cfg.scheme;
  ecfg.snapshot_stride = cfg.snapshot_stride;
  run(u0, ecfg, setup.F, {obs}, false);
  REQUIRE(states.size() >= 10);

  auto rep = rate_check(states, setup.dyn, 10.0);
  std::printf("[rate] C1=%.3f C2=%.3f C3=%.3f residuals %.1e %.1e %.1e %.1e\n", rep.C1, rep.C2,
              rep.C3, rep.max_residual[0], rep.max_residual[1], rep.max_residual[2],
              rep.max_residual[3]);
  CHECK(rep.C1 > 0.0);  // attraction constant of the v-equation
  // |p_zeta_dot - p_v| stays within the reported surrogate budget.
  CHECK(rep.max_ratio[1] <= 1.0);
}

TEST_CASE("collision is time-reversible through closest approach") {
  CollisionConfig cfg = quick_config(0.2);
  ExperimentSetup setup = make_setup(cfg);
  cfg.finalize(setup.dyn);
  ComplexField u0 = prepare(setup, cfg);
  EvolutionConfig fwd;
  fwd.dt = cfg.dt;
  fwd.t_begin = cfg.t_start;
  fwd.t_end = cfg.t_end;
  fwd.scheme = cfg.scheme;
  fwd.snapshot_stride = 1 << 30;
  auto t1 = run(u0, fwd, setup.F, {}, true);
  EvolutionConfig bwd = fwd;
  bwd.t_begin = cfg.t_end;
  bwd.t_end = cfg.t_start;
  auto t2 = run(t1.snapshots.back().u, bwd, setup.F, {}, true);
  ComplexField diff = t2.snapshots.back().u - u0;
  const double err = norm(diff, 1, 0);
  std::printf("[reverse] H1 return error %.3e over span %.0f\n", err,
              cfg.t_end - cfg.t_start);
  CHECK(err <= 1e-6);
}

TEST_CASE("orbital window: receding solitons stay coherent") {
  OrbitalConfig cfg;
  cfg.v0 = 0.15;
  cfg.zeta0 = 25.0;
  cfg.window = 40.0;
  cfg.grid_n = 2048;
  cfg.grid_length = 140.0;
  cfg.dt = 4e-3;
  cfg.perturbation_H1 = 1e-6;
  OrbitalReport rep = orbital_window(cfg);
  std::printf("[orbital] zeta0=%.1f max_r=%.3e bound=%.3e min_zdot=%.4f\n", rep.zeta0,
              rep.max_remainder_H1, rep.bound, rep.min_zeta_dot);
  CHECK(rep.speed_ok);
  CHECK(rep.min_zeta_dot >= 0.75 * cfg.v0);
  // Remainder stays below the measured-constant bound.
  CHECK(rep.max_remainder_H1 <= rep.bound);
}
