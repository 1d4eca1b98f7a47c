#ifndef NLSLAB_FIELD_OPS_HPP
#define NLSLAB_FIELD_OPS_HPP

#include <functional>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Placement parameters of one boosted soliton: center, velocity, phase,
/// frequency, and the frequency-modulation amplitude multiplying the
/// d(phi)/d(omega) term at ansatz order >= 1.
struct SolitonParams {
  double zeta = 0;
  double v = 0;
  double gamma = 0;
  double omega = 1;
  double f_omega = 0;
};

/// Placement phase exp(i [gamma + (v/2)(x - zeta/2)]).
inline cplx placement_phase(const SolitonParams& p, double x) {
  return std::exp(cplx(0, p.gamma + 0.5 * p.v * (x - 0.5 * p.zeta)));
}

/// exp(i(v/2)(x - zeta/2) + i gamma) f(x - zeta) sampled on the grid.
/// `f` must be accurate at arbitrary abscissae (profiles provide this).
/// Throws WrapAround when the placed tail at the domain edge exceeds
/// 1e-10 of the peak.
ComplexField place(const std::function<double(double)>& f, const SolitonParams& p,
                   const GridPtr& grid);

/// Same placement applied to a centered grid field via Fourier shift.
ComplexField place_field(const ComplexField& centered, const SolitonParams& p);

/// Sym(f)(x) = f(x) - f(-x) with periodic index reflection; exactly odd.
ComplexField sym(const ComplexField& f);

/// Odd part f(x)/2 - f(-x)/2.
ComplexField odd_part(const ComplexField& f);

/// Relative oddness defect ||f(x) + f(-x)|| / ||f||.
double oddness_residual(const ComplexField& f);

/// Galilean boost u(t, x - vt) exp(i(vx/2 - v^2 t/4)).
ComplexField galilean(const ComplexField& u, double v, double t);

/// L^2-type norm of (1+x^2)^{l/2} u with H^m Fourier weights (1+k^2)^{m/2}.
double norm(const ComplexField& u, int sobolev_order = 0, int weight_power = 0);

/// <u, w> = Re sum u_j conj(w_j) dx (the real inner product).
double inner(const ComplexField& u, const ComplexField& w);

ComplexField multiply_pointwise(const ComplexField& u, const std::function<cplx(double)>& g);

}  // namespace nlslab

#endif
