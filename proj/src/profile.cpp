#include "nlslab/profile.hpp"

#include <algorithm>
#include <cmath>

namespace nlslab {

namespace {

// Radicand of the first-order reduction, G(y) = omega y^2 - F(y^2).
double radicand(const PolynomialNonlinearity& F, double omega, double y) {
  return omega * y * y - F.eval(y * y, 0);
}

struct Rhs {
  const PolynomialNonlinearity& F;
  double omega;
  double floor_tol;  // blowup threshold on negative radicand
  double operator()(double phi) const {
    double g = radicand(F, omega, phi);
    if (g < 0) {
      if (g < -floor_tol) throw ProfileBlowup("radicand negative: " + std::to_string(g));
      g = 0;
    }
    return -std::sqrt(g);
  }
};

// Even Taylor series phi = sum c_m x^{2m} around the maximum, from the
// second-order equation phi'' = omega phi - F'(phi^2) phi. The recurrence
// is triangular: the x^{2m} coefficient of the right side only involves
// c_0..c_m.
std::vector<double> start_series(const PolynomialNonlinearity& F, double omega, double y0,
                                 int terms) {
  std::vector<double> c(terms, 0.0);
  c[0] = y0;
  auto mult = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(terms, 0.0);
    for (int i = 0; i < terms; ++i)
      for (int j = 0; j + i < terms; ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  for (int m = 0; m + 1 < terms; ++m) {
    std::vector<double> s = mult(c, c);  // phi^2
    // F'(s) by Horner over the power series in s.
    std::vector<double> fp(terms, 0.0);
    const auto& coef = F.coeffs();
    const int deg = static_cast<int>(coef.size()) - 1;
    for (int j = deg; j >= 2; --j) {
      fp = mult(fp, s);
      fp[0] += j * coef[j];
    }
    fp = mult(fp, s);
    std::vector<double> rhs = mult(fp, c);  // F'(phi^2) phi
    const double Rm = omega * c[m] - rhs[m];
    c[m + 1] = Rm / ((2.0 * m + 2.0) * (2.0 * m + 1.0));
  }
  return c;
}

double series_value(const std::vector<double>& c, double x) {
  const double x2 = x * x;
  double acc = 0.0;
  for (int m = static_cast<int>(c.size()) - 1; m >= 0; --m) acc = acc * x2 + c[m];
  return acc;
}

double series_slope(const std::vector<double>& c, double x) {
  const double x2 = x * x;
  double acc = 0.0;
  for (int m = static_cast<int>(c.size()) - 1; m >= 1; --m) acc = acc * x2 + 2.0 * m * c[m];
  return acc * x;
}

// Cash-Karp RK45 step for the autonomous scalar ODE phi' = f(phi).
// Returns the 5th-order value and an error estimate.
std::pair<double, double> ck45(const Rhs& f, double phi, double h) {
  const double k1 = f(phi);
  const double k2 = f(phi + h * (k1 / 5));
  const double k3 = f(phi + h * (3 * k1 + 9 * k2) / 40);
  const double k4 = f(phi + h * (3 * k1 / 10 - 9 * k2 / 10 + 6 * k3 / 5));
  const double k5 = f(phi + h * (-11 * k1 / 54 + 5 * k2 / 2 - 70 * k3 / 27 + 35 * k4 / 27));
  const double k6 = f(phi + h * (1631 * k1 / 55296 + 175 * k2 / 512 + 575 * k3 / 13824 +
                                 44275 * k4 / 110592 + 253 * k5 / 4096));
  const double y5 =
      phi + h * (37 * k1 / 378 + 250 * k3 / 621 + 125 * k4 / 594 + 512 * k6 / 1771);
  const double y4 = phi + h * (2825 * k1 / 27648 + 18575 * k3 / 48384 + 13525 * k4 / 55296 +
                               277 * k5 / 14336 + k6 / 4);
  return {y5, std::abs(y5 - y4)};
}

}  // namespace

double SolitonProfile::value_halfline(double x) const {
  if (x >= tail_x_) return tail_amp_ * std::exp(-std::sqrt(omega_) * x);
  auto it = std::upper_bound(kx_.begin(), kx_.end(), x);
  size_t i = (it == kx_.begin()) ? 0 : (it - kx_.begin() - 1);
  if (i + 1 >= kx_.size()) i = kx_.size() - 2;
  const double h = kx_[i + 1] - kx_[i];
  const double t = (x - kx_[i]) / h;
  const double p0 = kphi_[i], p1 = kphi_[i + 1];
  const double m0 = kslope_[i] * h, m1 = kslope_[i + 1] * h;
  const double c0 = kcurv_[i] * h * h, c1 = kcurv_[i + 1] * h * h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  return p0 * (1 - 10 * t3 + 15 * t4 - 6 * t5) + m0 * (t - 6 * t3 + 8 * t4 - 3 * t5) +
         c0 * 0.5 * (t2 - 3 * t3 + 3 * t4 - t5) + p1 * (10 * t3 - 15 * t4 + 6 * t5) +
         m1 * (-4 * t3 + 7 * t4 - 3 * t5) + c1 * 0.5 * (t3 - 2 * t4 + t5);
}

double SolitonProfile::slope_halfline(double x) const {
  const double sw = std::sqrt(omega_);
  if (x >= tail_x_) return -sw * tail_amp_ * std::exp(-sw * x);
  auto it = std::upper_bound(kx_.begin(), kx_.end(), x);
  size_t i = (it == kx_.begin()) ? 0 : (it - kx_.begin() - 1);
  if (i + 1 >= kx_.size()) i = kx_.size() - 2;
  const double h = kx_[i + 1] - kx_[i];
  const double t = (x - kx_[i]) / h;
  const double p0 = kphi_[i], p1 = kphi_[i + 1];
  const double m0 = kslope_[i] * h, m1 = kslope_[i + 1] * h;
  const double c0 = kcurv_[i] * h * h, c1 = kcurv_[i + 1] * h * h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  return (p0 * (-30 * t2 + 60 * t3 - 30 * t4) + m0 * (1 - 18 * t2 + 32 * t3 - 15 * t4) +
          c0 * 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4) +
          p1 * (30 * t2 - 60 * t3 + 30 * t4) + m1 * (-12 * t2 + 28 * t3 - 15 * t4) +
          c1 * 0.5 * (3 * t2 - 8 * t3 + 5 * t4)) /
         h;
}

double SolitonProfile::value(double x) const { return value_halfline(std::abs(x)); }

double SolitonProfile::slope(double x) const {
  const double s = slope_halfline(std::abs(x));
  return x >= 0 ? s : -s;
}

double SolitonProfile::domega_value(double x) const {
  if (domega_hi_ && domega_lo_)
    return (domega_hi_->value(x) - domega_lo_->value(x)) / (2.0 * domega_h_);
  const double ax = std::abs(x);
  if (ax > half_length_ || dphi_domega_.empty()) return 0.0;
  const double h = x_[1] - x_[0];
  const double fi = (ax - x_[0]) / h;
  size_t i = std::min(static_cast<size_t>(std::max(fi, 0.0)), dphi_domega_.size() - 2);
  const double t = fi - i;
  return (1 - t) * dphi_domega_[i] + t * dphi_domega_[i + 1];
}

SolitonProfile solve_profile(const PolynomialNonlinearity& F, double omega, double half_length,
                             int n) {
  if (n < 512) throw ConfigError("profile n must be >= 512");
  if (n % 2 != 0) ++n;
  const double sw = std::sqrt(omega);
  if (half_length < 10.0 / sw) throw ConfigError("half_length must be >= 10/sqrt(omega)");

  auto exist = check_existence(F, omega);
  if (!exist.satisfied) throw ProfileBlowup("existence hypotheses fail: " + exist.reason);
  const double y0 = exist.y0;

  SolitonProfile p;
  p.omega_ = omega;
  p.y0_ = y0;
  p.half_length_ = half_length;

  // The IVP is degenerate at the maximum (phi'(0) = 0 with a square-root
  // right side). Cover [0, x_s] by the even Taylor series and hand over to
  // the first-order reduction where its slope field is Lipschitz.
  Rhs rhs{F, omega, 1e-12 * omega * y0 * y0};
  auto curv = [&](double y) { return omega * y - F.eval(y * y, 1) * y; };
  const auto series = start_series(F, omega, y0, 12);
  const double x_s = 0.35 / sw;

  p.kx_.clear();
  p.kphi_.clear();
  p.kslope_.clear();
  p.kcurv_.clear();
  const int n_seed = 70;
  for (int i = 0; i <= n_seed; ++i) {
    const double xs = x_s * i / n_seed;
    p.kx_.push_back(xs);
    p.kphi_.push_back(series_value(series, xs));
    p.kslope_.push_back(series_slope(series, xs));
    p.kcurv_.push_back(curv(p.kphi_.back()));
  }

  const double x_stop = 2.0 * half_length + 10.0 / sw;
  const double tail_trigger = 1e-24 * omega * y0 * y0;
  const double hmax = 0.01 / sw;
  double x = p.kx_.back(), phi = p.kphi_.back(), h = 1e-3 / sw;
  bool in_tail = false;
  while (x < x_stop) {
    h = std::min(h, hmax);
    if (radicand(F, omega, phi) < tail_trigger || phi < 1e-13 * y0) {
      in_tail = true;
      break;
    }
    auto [phi_new, err] = ck45(rhs, phi, h);
    const double tol = 1e-13 * y0 + 1e-13 * std::abs(phi);
    if (err > tol && h > 1e-12) {
      h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    x += h;
    phi = phi_new;
    p.kx_.push_back(x);
    p.kphi_.push_back(phi);
    p.kslope_.push_back(rhs(phi));
    p.kcurv_.push_back(curv(phi));
    if (err > 0) h *= std::min(5.0, 0.9 * std::pow(tol / err, 0.2));
  }
  if (!in_tail && phi > 1e-10 * y0)
    throw ProfileBlowup("profile did not decay within the integration range");

  p.tail_x_ = x;
  p.tail_amp_ = phi * std::exp(sw * x);

  // Uniform symmetric samples (n+1 points including 0).
  p.x_.resize(n + 1);
  p.phi_.resize(n + 1);
  const double dxs = 2.0 * half_length / n;
  for (int j = 0; j <= n; ++j) {
    p.x_[j] = -half_length + j * dxs;
    p.phi_[j] = p.value(p.x_[j]);
  }

  // Mass by Simpson plus the analytic tail beyond the sampled box.
  double simpson = p.phi_[0] * p.phi_[0] + p.phi_[n] * p.phi_[n];
  for (int j = 1; j < n; ++j) simpson += (j % 2 ? 4.0 : 2.0) * p.phi_[j] * p.phi_[j];
  const double tail_mass = p.tail_amp_ * p.tail_amp_ * std::exp(-2.0 * sw * half_length) / sw;
  p.mass_ = simpson * dxs / 3.0 + tail_mass;

  p.a_inf_ = asymptotic_amplitude(p);
  return p;
}

std::vector<double> d_omega_profile(const PolynomialNonlinearity& F, double omega, double h_omega,
                                    SolitonProfile& base) {
  if (h_omega <= 0) h_omega = 1e-4 * omega;
  const int n = static_cast<int>(base.x().size()) - 1;
  auto hi = std::make_shared<SolitonProfile>(solve_profile(F, omega + h_omega, base.half_length(), n));
  auto lo = std::make_shared<SolitonProfile>(solve_profile(F, omega - h_omega, base.half_length(), n));
  std::vector<double> d(base.x().size());
  for (size_t j = 0; j < d.size(); ++j)
    d[j] = (hi->value(base.x()[j]) - lo->value(base.x()[j])) / (2.0 * h_omega);
  base.dphi_domega_ = d;
  base.domega_hi_ = hi;
  base.domega_lo_ = lo;
  base.domega_h_ = h_omega;
  return d;
}

SolitonProfile solve_profile_full(const PolynomialNonlinearity& F, double omega,
                                  double half_length, int n, double h_omega) {
  SolitonProfile p = solve_profile(F, omega, half_length, n);
  d_omega_profile(F, omega, h_omega, p);
  return p;
}

StabilityMargin stability_margin(const PolynomialNonlinearity& F, double omega, double h_omega) {
  if (h_omega <= 0) h_omega = 1e-4 * omega;
  const double hl = 30.0 / std::sqrt(omega);
  const int n = 2048;
  auto margin_at = [&](double h) {
    auto hi = solve_profile(F, omega + h, hl, n);
    auto lo = solve_profile(F, omega - h, hl, n);
    return (hi.mass() - lo.mass()) / (2.0 * h);
  };
  StabilityMargin out;
  out.dQ_domega = margin_at(h_omega);
  const double refined = margin_at(0.5 * h_omega);
  out.richardson_error =
      std::abs(out.dQ_domega - refined) / std::max(std::abs(refined), 1e-300);
  out.step_ok = out.richardson_error <= 1e-3;
  return out;
}

double asymptotic_amplitude(const SolitonProfile& p) {
  const double sw = std::sqrt(p.omega());
  const double lo_phi = 1e-10, hi_phi = 1e-3 * p.y0();
  const double dxf = 0.01 / sw;
  std::vector<std::pair<double, double>> pts;
  for (double x = 0; x <= 2.0 * p.half_length() + 10.0 / sw; x += dxf) {
    const double v = p.value(x);
    if (v < lo_phi) break;
    if (v <= hi_phi) pts.emplace_back(x, std::log(v));
  }
  if (pts.size() < 8) throw TailUnresolved("amplitude fit window is empty");
  // log phi = log a - sqrt(omega) x: intercept fit with the rate pinned by
  // the linearized equation at infinity.
  double acc = 0.0;
  for (auto& [x, lp] : pts) acc += lp + sw * x;
  const double log_a = acc / pts.size();
  double sum_r = 0.0;
  for (auto& [x, lp] : pts) {
    const double r = lp + sw * x - log_a;
    sum_r += r * r;
  }
  if (std::sqrt(sum_r / pts.size()) > 1e-3)
    throw TailUnresolved("amplitude fit residual too large");
  return std::exp(log_a);
}

}  // namespace nlslab
