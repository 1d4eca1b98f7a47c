#ifndef NLSLAB_NONLINEARITY_HPP
#define NLSLAB_NONLINEARITY_HPP

#include <string>
#include <utility>
#include <vector>

#include "nlslab/errors.hpp"

namespace nlslab {

/// F(s) = sum_{j>=2} c_j s^j acting through F'(|u|^2) u in the PDE.
/// F(0) = F'(0) = 0 is structural: powers 0 and 1 are not representable.
class PolynomialNonlinearity {
 public:
  /// terms: (power, coefficient) pairs over s = |u|^2, power >= 2.
  explicit PolynomialNonlinearity(const std::vector<std::pair<int, double>>& terms);

  /// Cubic NLS: i u_t + u_xx + 2|u|^2 u = 0, i.e. F(s) = s^2.
  static PolynomialNonlinearity cubic() { return PolynomialNonlinearity({{2, 1.0}}); }
  /// i u_t + u_xx + a|u|^2 u + b|u|^4 u = 0, i.e. F(s) = a s^2/2 + b s^3/3.
  static PolynomialNonlinearity cubic_quintic(double a, double b) {
    return PolynomialNonlinearity({{2, a / 2.0}, {3, b / 3.0}});
  }

  /// F, F' or F'' at s by Horner evaluation (order = 0, 1, 2).
  double eval(double s, int order = 0) const;
  double operator()(double s) const { return eval(s, 0); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  std::string describe() const;

 private:
  std::vector<double> coeffs_;  // coeffs_[j] multiplies s^j; [0] = [1] = 0
};

struct ExistenceCheck {
  double omega = 0;
  double y0 = 0;          // first positive zero of T_omega
  bool satisfied = false;
  std::string reason;
};

/// T_omega(y) = -omega y^2/2 + F(y^2)/2 and its y-derivative.
double T_omega(const PolynomialNonlinearity& F, double omega, double y);
double dT_omega(const PolynomialNonlinearity& F, double omega, double y);

/// Default search bound for the first zero of T_omega.
double default_ymax(const PolynomialNonlinearity& F, double omega);

/// Locates the smallest positive root y0 of T_omega by a sign-change scan
/// plus bisection, then verifies T'(y0) > 0 and T > 0 on (y0, y_max].
/// Throws NoRoot / DegenerateRoot.
ExistenceCheck check_existence(const PolynomialNonlinearity& F, double omega,
                               double y_max = 0.0);

}  // namespace nlslab

#endif
