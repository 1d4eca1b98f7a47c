#include "nlslab/field_ops.hpp"

#include <cmath>

namespace nlslab {

ComplexField place(const std::function<double(double)>& f, const SolitonParams& p,
                   const GridPtr& grid) {
  ComplexField out(grid);
  const auto& x = grid->x();
  double peak = 0.0;
  for (int j = 0; j < grid->n(); ++j) {
    const double fv = f(x[j] - p.zeta);
    peak = std::max(peak, std::abs(fv));
    out.v[j] = placement_phase(p, x[j]) * fv;
  }
  const double edge = std::max(std::abs(out.v.front()), std::abs(out.v.back()));
  if (edge > 1e-10 * peak && peak > 0)
    throw WrapAround("placed tail at the domain edge: " + std::to_string(edge / peak));
  return out;
}

ComplexField place_field(const ComplexField& centered, const SolitonParams& p) {
  ComplexField out = spectral_shift(centered, p.zeta);
  const auto& x = out.grid->x();
  for (int j = 0; j < out.n(); ++j) out.v[j] *= placement_phase(p, x[j]);
  return out;
}

ComplexField sym(const ComplexField& f) {
  ComplexField out(f.grid);
  const int n = f.n();
  for (int j = 0; j < n; ++j) out.v[j] = f.v[j] - f.v[f.grid->reflect(j)];
  return out;
}

ComplexField odd_part(const ComplexField& f) {
  ComplexField out(f.grid);
  const int n = f.n();
  for (int j = 0; j < n; ++j) out.v[j] = 0.5 * (f.v[j] - f.v[f.grid->reflect(j)]);
  return out;
}

double oddness_residual(const ComplexField& f) {
  double acc = 0.0, tot = 0.0;
  const int n = f.n();
  for (int j = 0; j < n; ++j) {
    acc += std::norm(f.v[j] + f.v[f.grid->reflect(j)]);
    tot += std::norm(f.v[j]);
  }
  return tot > 0 ? std::sqrt(acc / tot) : 0.0;
}

ComplexField galilean(const ComplexField& u, double v, double t) {
  ComplexField out = spectral_shift(u, v * t);
  const auto& x = out.grid->x();
  for (int j = 0; j < out.n(); ++j)
    out.v[j] *= std::exp(cplx(0, 0.5 * v * x[j] - 0.25 * v * v * t));
  return out;
}

double norm(const ComplexField& u, int sobolev_order, int weight_power) {
  if (sobolev_order < 0 || weight_power < 0) throw ConfigError("norm orders must be >= 0");
  const int n = u.n();
  ComplexField w = u;
  if (weight_power > 0) {
    const auto& x = u.grid->x();
    for (int j = 0; j < n; ++j)
      w.v[j] *= std::pow(1.0 + x[j] * x[j], 0.5 * weight_power);
  }
  if (sobolev_order == 0) {
    double acc = 0.0;
    for (const auto& z : w.v) acc += std::norm(z);
    return std::sqrt(acc * u.dx());
  }
  auto hat = spectrum(w);
  const auto& k2 = u.grid->k2();
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += std::pow(1.0 + k2[j], sobolev_order) * std::norm(hat[j]);
  return std::sqrt(acc * u.dx() / n);
}

double inner(const ComplexField& u, const ComplexField& w) {
  require_same_grid(u, w);
  double acc = 0.0;
  for (size_t j = 0; j < u.v.size(); ++j)
    acc += u.v[j].real() * w.v[j].real() + u.v[j].imag() * w.v[j].imag();
  return acc * u.dx();
}

ComplexField multiply_pointwise(const ComplexField& u, const std::function<cplx(double)>& g) {
  ComplexField out = u;
  const auto& x = u.grid->x();
  for (int j = 0; j < u.n(); ++j) out.v[j] *= g(x[j]);
  return out;
}

}  // namespace nlslab
