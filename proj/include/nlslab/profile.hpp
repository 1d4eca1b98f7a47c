#ifndef NLSLAB_PROFILE_HPP
#define NLSLAB_PROFILE_HPP

#include <memory>
#include <vector>

#include "nlslab/nonlinearity.hpp"

namespace nlslab {

/// Ground-state profile phi_omega sampled on a symmetric uniform grid,
/// plus an evaluator good at arbitrary x (Hermite between integration
/// knots, exact exponential beyond the resolved tail).
class SolitonProfile {
 public:
  SolitonProfile() = default;

  double omega() const { return omega_; }
  double y0() const { return y0_; }
  double a_inf() const { return a_inf_; }
  double mass() const { return mass_; }
  double half_length() const { return half_length_; }

  /// Uniform samples (n+1 points on [-half_length, half_length]).
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& dphi_domega() const { return dphi_domega_; }

  /// phi(x), phi'(x) anywhere (even extension, exponential tail).
  double value(double x) const;
  double slope(double x) const;
  /// d phi / d omega by the stored central difference (0 outside samples).
  double domega_value(double x) const;

  friend SolitonProfile solve_profile(const PolynomialNonlinearity&, double, double, int);
  friend std::vector<double> d_omega_profile(const PolynomialNonlinearity&, double, double,
                                             SolitonProfile&);

 private:
  double omega_ = 0, y0_ = 0, a_inf_ = 0, mass_ = 0, half_length_ = 0;
  std::vector<double> x_, phi_, dphi_domega_;

  // Integration knots on x >= 0; quintic Hermite evaluation from values,
  // slopes and the analytic curvature omega phi - F'(phi^2) phi.
  std::vector<double> kx_, kphi_, kslope_, kcurv_;
  double tail_x_ = 0, tail_amp_ = 0;  // phi = tail_amp * exp(-sqrt(omega) x) beyond tail_x_

  // Companion profiles at omega +- h for smooth d(phi)/d(omega) evaluation.
  std::shared_ptr<const SolitonProfile> domega_hi_, domega_lo_;
  double domega_h_ = 0;

  double value_halfline(double x) const;
  double slope_halfline(double x) const;
};

/// Integrates phi' = -sqrt(omega phi^2 - F(phi^2)) from the maximum at
/// x = 0 (Taylor-seeded to avoid the degenerate start), switching to the
/// exact exponential tail once the radicand underflows. n is the number
/// of uniform sample intervals (n >= 512, even).
SolitonProfile solve_profile(const PolynomialNonlinearity& F, double omega,
                             double half_length, int n);

/// Central difference (phi_{omega+h} - phi_{omega-h}) / 2h on the sample
/// grid; also stored into `base` for later evaluation.
std::vector<double> d_omega_profile(const PolynomialNonlinearity& F, double omega,
                                    double h_omega, SolitonProfile& base);

/// solve_profile plus the attached omega-derivative samples.
SolitonProfile solve_profile_full(const PolynomialNonlinearity& F, double omega,
                                  double half_length, int n, double h_omega = 0.0);

struct StabilityMargin {
  double dQ_domega = 0;        // (H4) margin; > 0 means orbitally stable
  double richardson_error = 0; // relative disagreement between h and h/2
  bool step_ok = false;        // false when the Richardson check exceeds 1e-3
};

StabilityMargin stability_margin(const PolynomialNonlinearity& F, double omega,
                                 double h_omega = 0.0);

/// Least-squares fit of log phi against -sqrt(omega) x + log a on the
/// window 1e-10 <= phi <= 1e-3 y0. Throws TailUnresolved.
double asymptotic_amplitude(const SolitonProfile& p);

}  // namespace nlslab

#endif
