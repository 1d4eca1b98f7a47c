#include "nlslab/modulation.hpp"

#include <cmath>

#include "nlslab/small_linalg.hpp"

namespace nlslab {

namespace {

ComplexField right_half(const SolitonProfile& prof, const SolitonParams& sp, const GridPtr& grid,
                        int which) {
  // which: 0 = phi, 1 = phi', 2 = domega phi, 3 = (x - zeta) phi.
  ComplexField out(grid);
  const auto& x = grid->x();
  for (int j = 0; j < grid->n(); ++j) {
    const double y = x[j] - sp.zeta;
    double val = 0;
    switch (which) {
      case 0: val = prof.value(y); break;
      case 1: val = prof.slope(y); break;
      case 2: val = prof.domega_value(y); break;
      case 3: val = y * prof.value(y); break;
    }
    out.v[j] = placement_phase(sp, x[j]) * val;
  }
  return out;
}

}  // namespace

ComplexField ModulationModel::build(const SolitonParams& sp, const GridPtr& grid) const {
  ComplexField right = right_half(*profile, sp, grid, 0);
  if (sp.f_omega != 0.0) {
    ComplexField dom = right_half(*profile, sp, grid, 2);
    for (int j = 0; j < grid->n(); ++j) right.v[j] += sp.f_omega * dom.v[j];
  }
  if (approx && approx->order() >= 1) {
    const auto& q = approx->correction_fields();
    const double e2 = approx->dynamics().exp_m2sd(t);
    const double g[3] = {e2, sp.v * e2, sp.v * sp.zeta * e2};
    const ComplexField* qs[3] = {&q.p1, &q.p2, &q.p3};
    for (int m = 0; m < 3; ++m) {
      ComplexField placed = place_field(*qs[m], sp);
      for (int j = 0; j < grid->n(); ++j) right.v[j] += g[m] * placed.v[j];
    }
  }
  return sym(right);
}

std::array<ComplexField, 4> ModulationModel::derivatives(const SolitonParams& sp,
                                                         const GridPtr& grid) const {
  // Differentiate the leading pair only; correction layers contribute at
  // the next order and the Newton loop re-evaluates the full residual.
  const auto& x = grid->x();
  ComplexField dz(grid), dv(grid), dg(grid), df(grid);
  for (int j = 0; j < grid->n(); ++j) {
    const double y = x[j] - sp.zeta;
    const cplx ph = placement_phase(sp, x[j]);
    const double phi = profile->value(y);
    const double dphi = profile->slope(y);
    const double dom = profile->domega_value(y);
    const cplx core(phi + sp.f_omega * dom);
    dz.v[j] = ph * (cplx(-dphi) - cplx(0, 0.25 * sp.v) * core);
    dv.v[j] = ph * cplx(0, 0.5 * (x[j] - 0.5 * sp.zeta)) * core;
    dg.v[j] = ph * cplx(0, 1) * core;
    df.v[j] = ph * dom;
  }
  // d/d zeta of the f-term needs the slope of domega(phi); finite profiles
  // carry it through the companion solves.
  if (sp.f_omega != 0.0) {
    const double h = 1e-5;
    for (int j = 0; j < grid->n(); ++j) {
      const double y = x[j] - sp.zeta;
      const double ds = (profile->domega_value(y + h) - profile->domega_value(y - h)) / (2 * h);
      dz.v[j] -= placement_phase(sp, x[j]) * sp.f_omega * ds;
    }
  }
  return {sym(dz), sym(dv), sym(dg), sym(df)};
}

std::array<ComplexField, 4> ModulationModel::test_fields(const SolitonParams& sp,
                                                         const GridPtr& grid) const {
  // i * (phi_gamma, phi_zeta, phi_omega, phi_v) with
  // phi_gamma = i e^{ia} phi, phi_zeta = e^{ia} phi', phi_omega = e^{ia}
  // domega phi, phi_v = (i/2) e^{ia} (x - zeta) phi.
  ComplexField g0 = right_half(*profile, sp, grid, 0);
  ComplexField g1 = right_half(*profile, sp, grid, 1);
  ComplexField g2 = right_half(*profile, sp, grid, 2);
  ComplexField g3 = right_half(*profile, sp, grid, 3);
  for (auto& z : g0.v) z *= cplx(-1, 0);         // i * i phi = -phi
  for (auto& z : g1.v) z *= cplx(0, 1);          // i phi'
  for (auto& z : g2.v) z *= cplx(0, 1);          // i domega
  for (auto& z : g3.v) z *= cplx(-0.5, 0);       // i * (i/2)(x-zeta) phi
  return {g0, g1, g2, g3};
}

ModulationState fit(const ComplexField& u, const SolitonParams& guess,
                    const ModulationModel& model, double basin) {
  const GridPtr& grid = u.grid;
  ModulationState st;
  st.t = model.t;
  st.base = guess;

  {
    ComplexField r0 = u - model.build(guess, grid);
    const double d0 = norm(r0, 1, 0);
    if (d0 > basin)
      throw NoConvergence("fit seed outside basin: ||u - P(guess)||_H1 = " + std::to_string(d0));
  }

  const double uscale = std::max(norm(u, 0, 0), 1e-30);
  std::array<double, 4> p{0, 0, 0, 0};
  int it = 0;
  for (it = 0; it < 60; ++it) {
    SolitonParams sp = guess;
    sp.zeta += p[0];
    sp.v += p[1];
    sp.gamma += p[2];
    sp.f_omega += p[3];

    ComplexField diff = u - model.build(sp, grid);
    auto T = model.test_fields(sp, grid);
    // Mirror conditions must follow from oddness; antisymmetrize the tests.
    for (auto& f : T) f = sym(f);

    std::array<double, 4> G;
    double gmax = 0;
    for (int i = 0; i < 4; ++i) {
      G[i] = inner(diff, T[i]);
      gmax = std::max(gmax, std::abs(G[i]) / (uscale * std::max(norm(T[i], 0, 0), 1e-30)));
    }
    if (gmax < 1e-12) break;

    auto dP = model.derivatives(sp, grid);
    std::vector<double> J(16), rhs(4);
    for (int i = 0; i < 4; ++i) {
      rhs[i] = G[i];
      for (int m = 0; m < 4; ++m) J[i * 4 + m] = inner(dP[m], T[i]);
    }
    if (!lu_solve(J, rhs, 4)) throw SingularJacobian("modulation Newton Jacobian");
    double step = 0;
    for (int m = 0; m < 4; ++m) {
      p[m] += rhs[m];
      step = std::max(step, std::abs(rhs[m]));
    }
    if (!std::isfinite(step) || step > 10.0)
      throw NoConvergence("modulation Newton diverged");
  }
  if (it >= 60) throw NoConvergence("modulation Newton did not converge in 60 iterations");

  st.shifts = p;
  SolitonParams sp = st.fitted();
  ComplexField diff = u - model.build(sp, grid);
  st.residual_norm = norm(diff, 1, 0);
  auto T = model.test_fields(sp, grid);
  for (int i = 0; i < 4; ++i) {
    ComplexField Ts = sym(T[i]);
    st.orthogonality[i] = std::abs(inner(diff, Ts)) / std::max(uscale, 1e-30);
    // -x condition: reflect the test field.
    ComplexField Tm(grid);
    for (int j = 0; j < grid->n(); ++j) Tm.v[j] = Ts.v[grid->reflect(j)];
    st.orthogonality_minus[i] = std::abs(inner(diff, Tm)) / std::max(uscale, 1e-30);
  }
  st.newton_iterations = it;
  return st;
}

ComplexField remainder(const ComplexField& u, const ModulationState& state,
                       const ModulationModel& model) {
  SolitonParams sp = state.fitted();
  ComplexField r = u - model.build(sp, u.grid);
  const cplx unrot = std::exp(cplx(0, -sp.gamma));
  for (auto& z : r.v) z *= unrot;
  return r;
}

namespace {
// Plateau cutoff of the coercivity argument: 1 below 1/2, 0 above 6/10,
// quintic smoothstep between.
double chi_cut(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 0.6) return 0.0;
  const double t = (s - 0.5) / 0.1;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
}  // namespace

RemainderDiagnostics lyapunov(const ComplexField& r, const SolitonParams& sigma,
                              const SolitonProfile& profile, const PolynomialNonlinearity& F,
                              double d_dot) {
  RemainderDiagnostics d;
  d.chi_zeta = sigma.zeta;
  const GridPtr& grid = r.grid;
  const auto& x = grid->x();
  ComplexField rx = derivative(r, 1);
  const double w = profile.omega();
  double L = 0, P1 = 0, P2 = 0;
  for (int j = 0; j < grid->n(); ++j) {
    const double pr = profile.value(x[j] - sigma.zeta);
    const double pl = profile.value(x[j] + sigma.zeta);
    const double sr = pr * pr, sl = pl * pl;
    const double r2 = std::norm(r.v[j]);
    const cplx conj_r2 = std::conj(r.v[j] * r.v[j]);
    L += std::norm(rx.v[j]) + w * r2;
    L -= (F.eval(sr, 1) + F.eval(sl, 1)) * r2;
    L -= (F.eval(sr, 2) * sr + F.eval(sl, 2) * sl) * r2;
    L -= (F.eval(sr, 2) * sr *
          std::exp(cplx(0, sigma.v * (x[j] - 0.5 * sigma.zeta))) * conj_r2)
             .real();
    L -= (F.eval(sl, 2) * sl *
          std::exp(cplx(0, -sigma.v * (x[j] + 0.5 * sigma.zeta))) * conj_r2)
             .real();
    const double c1 = chi_cut((x[j] + sigma.zeta) / (2.0 * sigma.zeta));
    const double mom = (std::conj(r.v[j]) * rx.v[j]).imag();
    P1 += c1 * mom;
    P2 += (1.0 - c1) * mom;
  }
  const double dx = grid->dx();
  d.L = L * dx;
  d.P1 = P1 * dx;
  d.P2 = P2 * dx;
  d.E = d.L - d_dot * d.P2 + d_dot * d.P1;
  d.r_L2 = norm(r, 0, 0);
  d.r_H1 = norm(r, 1, 0);
  return d;
}

RateCheckReport rate_check(const std::vector<ModulationState>& states,
                           const InteractionDynamics& dyn, double tolerance) {
  if (states.size() < 10) throw InsufficientSamples("rate_check needs >= 10 states");
  const size_t n = states.size();
  const double dt = states[1].t - states[0].t;
  const double sw = std::sqrt(dyn.omega);

  auto pdot = [&](size_t i, int m) {
    return (states[i + 1].shifts[m] - states[i - 1].shifts[m]) / (2 * dt);
  };
  auto weight = [&](size_t i) {
    return states[i].shifts[0] * std::exp(-2.0 * sw * dyn.d(states[i].t));
  };

  RateCheckReport rep;
  // C1 from the v-equation, least squares.
  double num = 0, den = 0;
  for (size_t i = 1; i + 1 < n; ++i) {
    num -= pdot(i, 1) * weight(i);
    den += weight(i) * weight(i);
  }
  rep.C1 = den > 0 ? num / den : 0;

  // C2, C3 from the gamma-equation against (w, d w).
  {
    std::vector<double> A(4, 0.0), b(2, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      const double wgt = weight(i), dwgt = dyn.d(states[i].t) * weight(i);
      const double y = pdot(i, 2) + states[i].shifts[3];
      A[0] += wgt * wgt;
      A[1] += wgt * dwgt;
      A[2] += wgt * dwgt;
      A[3] += dwgt * dwgt;
      b[0] += y * wgt;
      b[1] += y * dwgt;
    }
    if (lu_solve(A, b, 2)) {
      rep.C2 = b[0];
      rep.C3 = b[1];
    }
  }

  for (size_t i = 1; i + 1 < n; ++i) {
    const double wgt = weight(i);
    const double res[4] = {
        std::abs(pdot(i, 1) + rep.C1 * wgt),
        std::abs(pdot(i, 0) - states[i].shifts[1]),
        std::abs(pdot(i, 2) + states[i].shifts[3] - rep.C2 * wgt -
                 rep.C3 * dyn.d(states[i].t) * wgt),
        std::abs(pdot(i, 3))};
    const double rn = states[i].residual_norm;
    const double logf = std::pow(std::log(1.0 / std::max(dyn.v, 1e-6)), 4.0 / 3.0);
    const double Dk = rn * rn + dyn.v * dyn.v * rn * logf + 1e-14;
    for (int m = 0; m < 4; ++m) {
      rep.max_residual[m] = std::max(rep.max_residual[m], res[m]);
      rep.max_ratio[m] = std::max(rep.max_ratio[m], res[m] / (tolerance * Dk));
    }
  }
  for (int m = 0; m < 4; ++m)
    if (rep.max_ratio[m] > 1.0) rep.ok = false;
  return rep;
}

}  // namespace nlslab
