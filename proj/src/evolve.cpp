#include "nlslab/evolve.hpp"

#include <cmath>

namespace nlslab {

void EvolutionConfig::validate(const SpectralGrid& g) const {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
  (void)g;
}

ConservedQuantities conserved(const ComplexField& u, const PolynomialNonlinearity& F) {
  ConservedQuantities c;
  ComplexField ux = derivative(u, 1);
  const double dx = u.dx();
  for (int j = 0; j < u.n(); ++j) {
    const double a2 = std::norm(u.v[j]);
    c.Q += a2;
    c.H += 0.5 * std::norm(ux.v[j]) - 0.5 * F.eval(a2, 0);
    c.M += (std::conj(u.v[j]) * ux.v[j]).imag();
  }
  c.Q *= dx;
  c.H *= dx;
  c.M *= dx;
  return c;
}

HalfLineQuantities half_quantities(const ComplexField& u, const PolynomialNonlinearity& F) {
  if (oddness_residual(u) > 1e-8) throw NotOdd("field is not odd to 1e-8");
  HalfLineQuantities h;
  ComplexField ux = derivative(u, 1);
  const double dx = u.dx();
  const int n = u.n();
  const int j0 = u.grid->zero_index();
  // Trapezoid over x in [0, L/2]; the endpoints carry half weight (u(0) = 0
  // for odd fields and the far edge is below the wrap-around tolerance).
  for (int j = j0; j < n; ++j) {
    const double w = (j == j0) ? 0.5 : 1.0;
    const double a2 = std::norm(u.v[j]);
    h.Q_plus += w * a2;
    h.H_plus += w * (0.5 * std::norm(ux.v[j]) - 0.5 * F.eval(a2, 0));
    h.M_plus += w * (ux.v[j] * std::conj(u.v[j])).imag();
  }
  // Half weight at the periodic image of the far edge (index 0).
  h.Q_plus += 0.5 * std::norm(u.v[0]);
  h.H_plus += 0.5 * (0.5 * std::norm(ux.v[0]) - 0.5 * F.eval(std::norm(u.v[0]), 0));
  h.M_plus += 0.5 * (ux.v[0] * std::conj(u.v[0])).imag();
  h.Q_plus *= dx;
  h.H_plus *= dx;
  h.M_plus *= dx;
  h.boundary_flux = 0.5 * std::norm(ux.v[j0]);
  return h;
}

namespace {
std::vector<cplx> linear_table(const SpectralGrid& g, double dt) {
  std::vector<cplx> t(g.n());
  for (int j = 0; j < g.n(); ++j) t[j] = std::exp(cplx(0, -g.k2()[j] * dt));
  return t;
}
}  // namespace

Evolver::Evolver(GridPtr grid, const PolynomialNonlinearity& F, double dt, Scheme scheme)
    : grid_(std::move(grid)), F_(F), dt_(dt), scheme_(scheme) {
  lin_full_ = linear_table(*grid_, dt_);
  if (scheme_ == Scheme::Yoshida4) {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = -std::cbrt(2.0) * w1;
    lin_w1_ = linear_table(*grid_, w1 * dt_);
    lin_w0_ = linear_table(*grid_, w0 * dt_);
  }
}

void Evolver::strang(ComplexField& u, double dt, const std::vector<cplx>& lin) const {
  const int n = u.n();
  for (int j = 0; j < n; ++j)
    u.v[j] *= std::exp(cplx(0, 0.5 * dt * F_.eval(std::norm(u.v[j]), 1)));
  std::vector<cplx> hat;
  fft::forward(u.v, hat, n);
  for (int j = 0; j < n; ++j) hat[j] *= lin[j];
  fft::inverse(hat, u.v, n);
  for (int j = 0; j < n; ++j)
    u.v[j] *= std::exp(cplx(0, 0.5 * dt * F_.eval(std::norm(u.v[j]), 1)));
}

void Evolver::advance(ComplexField& u) const {
  if (scheme_ == Scheme::Strang) {
    strang(u, dt_, lin_full_);
  } else {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = -std::cbrt(2.0) * w1;
    strang(u, w1 * dt_, lin_w1_);
    strang(u, w0 * dt_, lin_w0_);
    strang(u, w1 * dt_, lin_w1_);
  }
}

ComplexField step(const ComplexField& u, double dt, const PolynomialNonlinearity& F,
                  Scheme scheme) {
  Evolver e(u.grid, F, dt, scheme);
  ComplexField out = u;
  e.advance(out);
  return out;
}

Trajectory run(const ComplexField& u0, const EvolutionConfig& cfg, const PolynomialNonlinearity& F,
               const std::vector<Observer>& observers, bool keep_snapshots) {
  cfg.validate(*u0.grid);
  const double span = cfg.t_end - cfg.t_begin;
  const double sdt = std::copysign(cfg.dt, span);
  const long nsteps = std::lround(std::abs(span) / cfg.dt);
  Evolver ev(u0.grid, F, sdt, cfg.scheme);

  Trajectory traj;
  ComplexField u = u0;
  auto emit = [&](long i, double t) {
    for (const auto& obs : observers) obs(static_cast<int>(i), t, u);
    if (keep_snapshots) traj.snapshots.push_back({t, u});
  };
  emit(0, cfg.t_begin);
  for (long i = 1; i <= nsteps; ++i) {
    ev.advance(u);
    const double t = cfg.t_begin + i * sdt;
    if (i % cfg.snapshot_stride == 0 || i == nsteps) {
      if (!u.all_finite()) {
        traj.t_final = t;
        throw NonFinite("non-finite sample at t = " + std::to_string(t));
      }
      emit(i, t);
    }
  }
  traj.completed = true;
  traj.t_final = cfg.t_begin + nsteps * sdt;
  return traj;
}

}  // namespace nlslab
