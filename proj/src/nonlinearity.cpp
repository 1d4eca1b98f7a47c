#include "nlslab/nonlinearity.hpp"

#include <cmath>
#include <sstream>

namespace nlslab {

PolynomialNonlinearity::PolynomialNonlinearity(const std::vector<std::pair<int, double>>& terms) {
  int deg = 0;
  for (const auto& [p, c] : terms) {
    if (p < 2) throw ConfigError("nonlinearity powers must be >= 2 (F(0) = F'(0) = 0)");
    deg = std::max(deg, p);
  }
  coeffs_.assign(deg + 1, 0.0);
  bool any = false;
  for (const auto& [p, c] : terms) {
    coeffs_[p] += c;
    if (c != 0.0) any = true;
  }
  if (deg < 2 || !any) throw ConfigError("nonlinearity needs at least one nonzero term");
}

double PolynomialNonlinearity::eval(double s, int order) const {
  const int deg = degree();
  double acc = 0.0;
  switch (order) {
    case 0:
      for (int j = deg; j >= 2; --j) acc = acc * s + coeffs_[j];
      return acc * s * s;
    case 1:
      for (int j = deg; j >= 2; --j) acc = acc * s + j * coeffs_[j];
      return acc * s;
    case 2:
      for (int j = deg; j >= 2; --j) acc = acc * s + j * (j - 1) * coeffs_[j];
      return acc;
    default:
      throw ConfigError("eval order must be 0, 1 or 2");
  }
}

std::string PolynomialNonlinearity::describe() const {
  std::ostringstream os;
  os << "F(s) =";
  bool first = true;
  for (int j = 2; j <= degree(); ++j) {
    if (coeffs_[j] == 0.0) continue;
    os << (first ? " " : " + ") << coeffs_[j] << "*s^" << j;
    first = false;
  }
  return os.str();
}

double T_omega(const PolynomialNonlinearity& F, double omega, double y) {
  return -0.5 * omega * y * y + 0.5 * F.eval(y * y, 0);
}

double dT_omega(const PolynomialNonlinearity& F, double omega, double y) {
  return -omega * y + y * F.eval(y * y, 1);
}

double default_ymax(const PolynomialNonlinearity& F, double omega) {
  // Smallest positive coefficient sets the scale of the first crossing;
  // the factor 10 leaves generous slack. Overridable by the caller.
  double scale = 0.0;
  for (double c : F.coeffs())
    if (c > 0.0) scale = (scale == 0.0) ? c : std::min(scale, c);
  if (scale == 0.0) scale = 1.0;
  return 10.0 * std::sqrt(omega / scale);
}

ExistenceCheck check_existence(const PolynomialNonlinearity& F, double omega, double y_max) {
  if (!(omega > 0)) throw ConfigError("omega must be positive");
  if (y_max <= 0) y_max = default_ymax(F, omega);

  ExistenceCheck out;
  out.omega = omega;

  // T < 0 just right of 0; scan for the first sign change on (0, y_max].
  const int n_scan = 10000;
  const double h = y_max / n_scan;
  double lo = 0.0, hi = 0.0;
  for (int i = 1; i <= n_scan; ++i) {
    const double y = i * h;
    if (T_omega(F, omega, y) >= 0.0) {
      lo = (i - 1) * h;
      hi = y;
      break;
    }
  }
  if (hi == 0.0) throw NoRoot("no sign change of T_omega on (0, " + std::to_string(y_max) + "]");

  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (T_omega(F, omega, mid) < 0.0 ? lo : hi) = mid;
  }
  double y0 = 0.5 * (lo + hi);
  // Newton polish to the floating-point root; the profile solve starts at
  // the degenerate maximum and is sensitive to residual in T(y0).
  for (int it = 0; it < 4; ++it) {
    const double slope = dT_omega(F, omega, y0);
    if (std::abs(slope) < 1e-300) break;
    y0 -= T_omega(F, omega, y0) / slope;
  }
  out.y0 = y0;

  const double slope = dT_omega(F, omega, y0);
  if (std::abs(slope) <= 1e-10) throw DegenerateRoot("T'(y0) = " + std::to_string(slope));
  if (slope < 0.0) {
    out.satisfied = false;
    out.reason = "T'(y0) < 0";
    return out;
  }

  for (int i = 1; i <= n_scan; ++i) {
    const double y = y0 + (y_max - y0) * i / n_scan;
    if (T_omega(F, omega, y) <= 0.0) {
      out.satisfied = false;
      out.reason = "T_omega not positive at y = " + std::to_string(y);
      return out;
    }
  }
  out.satisfied = true;
  out.reason = "T(y0)=0, T'(y0)>0, T>0 on (y0, y_max]";
  return out;
}

}  // namespace nlslab
