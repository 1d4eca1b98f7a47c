#ifndef NLSLAB_ANSATZ_HPP
#define NLSLAB_ANSATZ_HPP

#include <array>
#include <optional>

#include "nlslab/linop.hpp"

namespace nlslab {

struct NumericRefinement;

/// Separation law of the odd two-soliton pair: dd/dt^2 = C exp(-2 sqrt(w) d)
/// with the closed form d(t) = ln[sqrt(C) cosh(sqrt(w) v t) / (w^{1/4} v)] / sqrt(w).
struct InteractionDynamics {
  double C = 0;      // interaction constant, > 0
  double omega = 1;
  double v = 0;      // asymptotic half-speed

  double d(double t) const;
  double d_dot(double t) const;
  double d_ddot(double t) const;
  /// exp(-2 sqrt(omega) d(t)) evaluated overflow-free.
  double exp_m2sd(double t) const;
};

struct SeparationSample {
  double d = 0, d_dot = 0, d_ddot = 0;
};
SeparationSample separation(const InteractionDynamics& dyn, double t);

struct InteractionConstant {
  double value = 0;          // adopted value (route i)
  double route_balance = 0;  // (i): 4 a sqrt(w) / ||phi||^2 * integral
  double route_tail = 0;     // (ii): 8 a^2 w / ||phi||^2
  double integral_identity_residual = 0;  // relative defect of the 2 a sqrt(w) identity
};

/// Computes C both ways and cross-checks to 1e-5 relative
/// (CrossCheckFailed otherwise).
InteractionConstant interaction_constant(const SolitonProfile& p,
                                         const PolynomialNonlinearity& F);

InteractionDynamics make_dynamics(const SolitonProfile& p, const PolynomialNonlinearity& F,
                                  double v);

/// RK4 integration of the separation ODE from (d(0), 0); returns the max
/// absolute deviation from the closed form on [0, t_max].
double separation_ode_deviation(const InteractionDynamics& dyn, double t_max, double dt);

/// Exponent convention for the first-order correction sources. `Displayed`
/// follows the printed composite form (e^{-2 sqrt(w) x} on the F' pieces);
/// `Uniform` uses the tail-expansion rate e^{-sqrt(w) x} on every source.
/// The residual-scaling test selects Uniform.
enum class SourceVariant { Displayed, Uniform };

struct CorrectionFields {
  ComplexField p1;  // real
  ComplexField p2;  // purely imaginary
  ComplexField p3;  // purely imaginary
};

/// Literal first-order correction generators: p1 = -a S^{-1} Pi^perp[...],
/// p2 = -2 sqrt(w) S^{-1}(i p1) + S^{-1} Pi^perp[i x F'(phi^2) e^{..}],
/// p3 = S^{-1} Pi^perp[i F'(phi^2) e^{..}].
CorrectionFields corrections(const SolitonProfile& p, const PolynomialNonlinearity& F,
                             const LinearizedOperator& S,
                             SourceVariant variant = SourceVariant::Displayed);

/// Odd two-soliton approximate solution at order 0 or 1, bound to a grid.
/// Order 0: Sym-placed soliton pair riding the separation law.
/// Order 1 adds the frequency-modulation term f_omega(t) d(phi)/d(omega)
/// and three correction layers with coefficients e2, v e2, v d e2
/// (e2 = exp(-2 sqrt(w) d)), built so every source layer of the flow
/// residual at order v^2 cancels; the residual is then O(v^4) up to logs.
class ApproximateSolution {
 public:
  static ApproximateSolution order0(const SolitonProfile& p, const InteractionDynamics& dyn,
                                    GridPtr grid);
  static ApproximateSolution order1(const SolitonProfile& p, const PolynomialNonlinearity& F,
                                    const InteractionDynamics& dyn, const LinearizedOperator& S,
                                    SourceVariant variant = SourceVariant::Uniform);
  /// Single placed soliton with constant velocity (exact solution; used to
  /// validate the residual machinery).
  static ApproximateSolution single_soliton(const SolitonProfile& p, double v, double zeta0,
                                            double gamma0, GridPtr grid);

  int order() const { return order_; }
  const InteractionDynamics& dynamics() const { return dyn_; }
  const GridPtr& grid() const { return grid_; }
  const SolitonProfile& profile() const { return profile_; }

  /// Right-soliton parameters sigma(t) = (zeta, v, gamma, omega, f_omega).
  SolitonParams params(double t) const;
  /// Parameter time derivatives (zeta_dot, v_dot, gamma_dot, f_omega_dot).
  std::array<double, 4> param_dots(double t) const;

  ComplexField field(double t) const;
  /// Exact-in-parameters time derivative of field(t).
  ComplexField dt_field(double t) const;

  /// Lambda(u) = i u_t + u_xx + F'(|u|^2) u evaluated on the ansatz.
  ComplexField residual(double t, const PolynomialNonlinearity& F) const;

  const CorrectionFields& correction_fields() const { return q_; }

 private:
  int order_ = 0;
  bool two_soliton_ = true;
  SolitonProfile profile_;
  InteractionDynamics dyn_;
  GridPtr grid_;
  // Single-soliton parameters.
  double single_v_ = 0, single_zeta0_ = 0, single_gamma0_ = 0;
  // Order-1 data. Terms beyond the three main layers cancel the time
  // derivatives of the layer coefficients (the second-application route
  // of the inversion, Cor_2-style).
  CorrectionFields q_;
  ComplexField domega_c_;  // centered d(phi)/d(omega) field
  ComplexField qA_, qB_, qC_, qD_, qE_;
  std::vector<ComplexField> term_fields_, term_fields_x_;
  double Pconst_ = 0, Rconst_ = 0, mu_ = 0;

  double f_omega(double t) const;
  double f_omega_dot(double t) const;
  double delta_gamma(double t) const;
  double delta_gamma_dot(double t) const;

  ComplexField assemble(double t, bool time_derivative,
                        const std::array<double, 4>* dot_override) const;
  friend struct NumericRefinement;
  friend NumericRefinement refine_numeric(const ApproximateSolution&, const LinearizedOperator&,
                                          const PolynomialNonlinearity&, double, double);
};

/// Residual of Lambda against the parameter-tangent directions: fits the
/// four parameter-derivative tweaks by least squares (the measured-ODE
/// rebalance) and reports the remaining residual.
struct NumericRefinement {
  double t_center = 0;
  double residual_before = 0;  // H^1 norm of Lambda(base) at t_center
  double residual_after = 0;   // H^1 norm after correction + rebalance
  std::array<double, 4> delta_dots{};  // fitted (zeta, v, gamma, f) derivative tweaks
  ComplexField corrected_field;
  ComplexField corrected_dt;
  ComplexField final_residual;
  GridPtr grid;

  /// Second pass over the already-corrected pair; NoImprovement if the
  /// residual fails to drop further than `factor`.
  double refine_again(const LinearizedOperator& S, const PolynomialNonlinearity& F,
                      const SolitonProfile& prof, const SolitonParams& sigma);
};

/// One numeric refinement step at t_center: extracts the right-frame
/// residual source through a parity-partition window, projects with
/// Pi^perp, inverts, transports back, symmetrizes and subtracts; then
/// re-fits the parameter derivatives. stencil_h sets the finite-difference
/// spacing used for the correction's time derivative.
NumericRefinement refine_numeric(const ApproximateSolution& approx, const LinearizedOperator& S,
                                 const PolynomialNonlinearity& F, double t_center = 0.0,
                                 double stencil_h = 0.0);

/// Convenience wrapper: the ansatz field at time t.
ComplexField build(int order, const SolitonProfile& p, const PolynomialNonlinearity& F,
                   const InteractionDynamics& dyn, const LinearizedOperator& S, GridPtr grid,
                   double t);

}  // namespace nlslab

#endif
