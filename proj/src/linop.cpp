#include "nlslab/linop.hpp"

#include <cmath>

#include "nlslab/small_linalg.hpp"

namespace nlslab {

SolitonBasisFields make_basis_fields(const SolitonProfile& p, const GridPtr& grid) {
  SolitonBasisFields f;
  f.phi = ComplexField(grid);
  f.dphi = ComplexField(grid);
  f.domega = ComplexField(grid);
  f.xphi = ComplexField(grid);
  const auto& x = grid->x();
  for (int j = 0; j < grid->n(); ++j) {
    f.phi.v[j] = p.value(x[j]);
    f.dphi.v[j] = p.slope(x[j]);
    f.domega.v[j] = p.domega_value(x[j]);
    f.xphi.v[j] = x[j] * p.value(x[j]);
  }
  return f;
}

LinearizedOperator::LinearizedOperator(const SolitonProfile& p, const PolynomialNonlinearity& F,
                                       GridPtr grid)
    : grid_(std::move(grid)), omega_(p.omega()) {
  const auto& x = grid_->x();
  const int n = grid_->n();
  fprime_.resize(n);
  fsecond_phi2_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double phi = p.value(x[j]);
    const double s = phi * phi;
    fprime_[j] = F.eval(s, 1);
    fsecond_phi2_[j] = F.eval(s, 2) * s;
  }
  fields_ = make_basis_fields(p, grid_);
}

ComplexField LinearizedOperator::apply(const ComplexField& rho) const {
  if (!(*rho.grid == *grid_)) throw GridMismatch("operator and field grids differ");
  ComplexField out = derivative(rho, 2);
  const int n = grid_->n();
  for (int j = 0; j < n; ++j) {
    out.v[j] = -out.v[j] + omega_ * rho.v[j] - fprime_[j] * rho.v[j] -
               fsecond_phi2_[j] * (rho.v[j] + std::conj(rho.v[j]));
  }
  return out;
}

ComplexField LinearizedOperator::kernel_phase() const {
  ComplexField g = fields_.phi;
  for (auto& z : g.v) z *= cplx(0, 1);
  return g;
}

namespace {

ComplexField times_i(const ComplexField& f) {
  ComplexField g = f;
  for (auto& z : g.v) z *= cplx(0, 1);
  return g;
}

// Spectral multiplier (k^2 + shift)^power applied to a field.
ComplexField k2_multiplier(const ComplexField& u, double shift, double power) {
  auto hat = spectrum(u);
  const auto& k2 = u.grid->k2();
  for (int j = 0; j < u.n(); ++j) hat[j] *= std::pow(k2[j] + shift, power);
  return from_spectrum(u.grid, std::move(hat));
}

void orthonormalize(std::vector<ComplexField>& vs) {
  std::vector<ComplexField> out;
  for (auto& v : vs) {
    ComplexField w = v;
    for (const auto& u : out) {
      const double c = inner(w, u);
      for (size_t j = 0; j < w.v.size(); ++j) w.v[j] -= c * u.v[j];
    }
    const double nrm = std::sqrt(inner(w, w));
    if (nrm < 1e-13) continue;
    for (auto& z : w.v) z /= nrm;
    out.push_back(std::move(w));
  }
  vs = std::move(out);
}

void project_against(ComplexField& v, const std::vector<ComplexField>& ortho) {
  for (const auto& u : ortho) {
    const double c = inner(v, u);
    for (size_t j = 0; j < v.v.size(); ++j) v.v[j] -= c * u.v[j];
  }
}

}  // namespace

ProjectionBasis make_projection_basis(const SolitonBasisFields& f, Projector which) {
  ProjectionBasis b;
  if (which == Projector::Pi) {
    b.vectors = {f.dphi, times_i(f.phi), f.domega, times_i(f.xphi)};
  } else {
    b.vectors = {times_i(f.dphi), times_i(f.phi), times_i(f.xphi), times_i(f.domega)};
  }
  std::vector<double> g(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i * 4 + j] = inner(b.vectors[i], b.vectors[j]);
  std::copy(g.begin(), g.end(), b.gram.begin());
  auto ev = sym_eigenvalues(g, 4);
  b.gram_condition = std::abs(ev.back()) / std::max(std::abs(ev.front()), 1e-300);
  return b;
}

ComplexField project(const ProjectionBasis& basis, const ComplexField& f) {
  if (basis.gram_condition > 1e6) throw SingularGram("projection basis nearly dependent");
  std::vector<double> rhs(4);
  for (int i = 0; i < 4; ++i) rhs[i] = inner(f, basis.vectors[i]);
  std::vector<double> g(basis.gram.begin(), basis.gram.end());
  if (!lu_solve(g, rhs, 4)) throw SingularGram("gram solve failed");
  ComplexField out(f.grid);
  for (int i = 0; i < 4; ++i)
    for (size_t j = 0; j < out.v.size(); ++j) out.v[j] += rhs[i] * basis.vectors[i].v[j];
  return out;
}

ComplexField project_out(const ProjectionBasis& basis, const ComplexField& f) {
  return f - project(basis, f);
}

ComplexField remove_kernel(const LinearizedOperator& S, ComplexField f) {
  ComplexField kt = S.kernel_translation();
  ComplexField kp = S.kernel_phase();
  const double c1 = inner(f, kt) / inner(kt, kt);
  const double c2 = inner(f, kp) / inner(kp, kp);
  for (size_t j = 0; j < f.v.size(); ++j) f.v[j] -= c1 * kt.v[j] + c2 * kp.v[j];
  return f;
}

ComplexField invert_projected(const LinearizedOperator& S, const ComplexField& f, double tol,
                              InvertStats* stats) {
  const double fnorm = std::sqrt(inner(f, f));
  ComplexField u(f.grid);
  if (fnorm == 0) return u;

  std::vector<ComplexField> kernel = {S.kernel_translation(), S.kernel_phase()};
  orthonormalize(kernel);
  for (const auto& k : kernel)
    if (std::abs(inner(f, k)) > 1e-8 * fnorm)
      throw NotOrthogonal("rhs has a kernel component of relative size " +
                          std::to_string(std::abs(inner(f, k)) / fnorm));

  const double omega = S.omega();
  auto Mhalf = [&](const ComplexField& g) { return k2_multiplier(g, omega, -0.5); };

  // Symmetric sandwich (K+w)^{-1/2} S (K+w)^{-1/2}: spectrum clusters at 1
  // plus finitely many outliers, so plain MINRES converges in tens of
  // iterations. The (near-)kernel content of the iterate is harmless and
  // is removed from the solution afterwards.
  auto op = [&](const ComplexField& w) { return Mhalf(S.apply(Mhalf(w))); };

  // MINRES on the sandwiched symmetric (indefinite) system, restarted on
  // early Krylov breakdown.
  auto minres = [&](const ComplexField& rhs, const double target) {
    const double b0 = std::sqrt(inner(rhs, rhs));
    ComplexField x(f.grid);
    if (b0 == 0) return std::pair<ComplexField, int>{x, 0};
    ComplexField v_old(f.grid), w_dir(f.grid), w_old(f.grid);
    ComplexField v = rhs;
    double beta = b0;
    for (auto& z : v.v) z /= beta;
    double c = 1, c_old = 1, s = 0, s_old = 0, eta = b0;
    const int maxit = 2000;
    int it = 0;
    for (it = 1; it <= maxit; ++it) {
      ComplexField av = op(v);
      const double alpha = inner(v, av);
      for (size_t j = 0; j < av.v.size(); ++j)
        av.v[j] -= alpha * v.v[j] + beta * v_old.v[j];
      const double beta_new = std::sqrt(inner(av, av));

      const double rho1_bar = c * alpha - c_old * s * beta;
      const double rho1 = std::sqrt(rho1_bar * rho1_bar + beta_new * beta_new);
      const double rho2 = s * alpha + c_old * c * beta;
      const double rho3 = s_old * beta;
      const double c_new = rho1_bar / rho1;
      const double s_new = beta_new / rho1;

      ComplexField w_new(f.grid);
      for (size_t j = 0; j < w_new.v.size(); ++j)
        w_new.v[j] = (v.v[j] - rho2 * w_dir.v[j] - rho3 * w_old.v[j]) / rho1;
      for (size_t j = 0; j < x.v.size(); ++j) x.v[j] += c_new * eta * w_new.v[j];
      eta = -s_new * eta;

      w_old = std::move(w_dir);
      w_dir = std::move(w_new);
      v_old = std::move(v);
      if (beta_new < 1e-300) break;
      v = std::move(av);
      for (auto& z : v.v) z /= beta_new;
      beta = beta_new;
      c_old = c;
      c = c_new;
      s_old = s;
      s = s_new;
      if (std::abs(eta) <= target) break;
    }
    return std::pair<ComplexField, int>{x, it};
  };

  ComplexField b = Mhalf(f);
  const double b_scale = std::sqrt(inner(b, b));
  ComplexField x(f.grid);
  int total_it = 0;
  for (int pass = 0; pass < 4; ++pass) {
    ComplexField rhs = b;
    if (pass > 0) {
      ComplexField ax = op(x);
      rhs = b - ax;
      if (std::sqrt(inner(rhs, rhs)) <= 0.002 * tol * b_scale) break;
    }
    auto [dx, its] = minres(rhs, 0.005 * tol * b_scale);
    x += dx;
    total_it += its;
  }

  u = Mhalf(x);
  project_against(u, kernel);
  ComplexField res = S.apply(u) - f;
  const double rel = std::sqrt(inner(res, res)) / fnorm;
  if (stats) {
    stats->iterations = total_it;
    stats->relative_residual = rel;
  }
  if (rel > tol)
    throw NoConvergence("inversion residual " + std::to_string(rel) + " after " +
                        std::to_string(total_it) + " iterations");
  return u;
}

double rayleigh_h1(const LinearizedOperator& S, const ComplexField& g) {
  const double h1 = norm(g, 1, 0);
  return inner(S.apply(g), g) / (h1 * h1);
}

double coercivity_floor(const LinearizedOperator& S, const std::vector<ComplexField>& constraints,
                        int max_iterations) {
  const GridPtr& grid = S.grid();
  // H^1 sandwich: hat S = (1+K)^{-1/2} S (1+K)^{-1/2}; constraints move the
  // same way so that <g, c> = 0 becomes <h, (1+K)^{-1/2} c> = 0.
  auto Bhalf_inv = [&](const ComplexField& g) { return k2_multiplier(g, 1.0, -0.5); };
  std::vector<ComplexField> cons;
  for (const auto& C : constraints) cons.push_back(Bhalf_inv(C));
  orthonormalize(cons);

  auto op = [&](const ComplexField& w) {
    ComplexField r = Bhalf_inv(S.apply(Bhalf_inv(w)));
    project_against(r, cons);
    return r;
  };

  // Lanczos with full reorthogonalization, deterministic start.
  ComplexField v(grid);
  {
    // Smooth seed orthogonal to nothing in particular.
    const auto& x = grid->x();
    for (int j = 0; j < grid->n(); ++j)
      v.v[j] = cplx(std::exp(-0.1 * x[j] * x[j]) * (1.0 + 0.3 * std::sin(3 * x[j])),
                    std::exp(-0.07 * x[j] * x[j]) * (0.7 + 0.2 * std::cos(2 * x[j])));
  }
  project_against(v, cons);
  double nrm = std::sqrt(inner(v, v));
  for (auto& z : v.v) z /= nrm;

  std::vector<ComplexField> V = {v};
  std::vector<double> alpha, beta;
  double best = 0, prev = 1e300;
  for (int m = 0; m < max_iterations; ++m) {
    ComplexField w = op(V.back());
    const double a = inner(w, V.back());
    alpha.push_back(a);
    for (size_t j = 0; j < w.v.size(); ++j) {
      w.v[j] -= a * V.back().v[j];
      if (V.size() > 1) w.v[j] -= beta.back() * V[V.size() - 2].v[j];
    }
    project_against(w, cons);
    // Full reorthogonalization for numerical stability.
    for (const auto& q : V) {
      const double c = inner(w, q);
      for (size_t j = 0; j < w.v.size(); ++j) w.v[j] -= c * q.v[j];
    }
    const double b = std::sqrt(inner(w, w));
    best = tridiag_smallest_eigenvalue(alpha, beta);
    if (m >= 30 && m % 10 == 0) {
      if (std::abs(best - prev) < 1e-10 * std::max(1.0, std::abs(best))) break;
      prev = best;
    }
    if (b < 1e-12) break;
    beta.push_back(b);
    for (auto& z : w.v) z /= b;
    V.push_back(std::move(w));
  }
  return best;
}

}  // namespace nlslab
