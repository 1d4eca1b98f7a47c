#include "nlslab/small_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlslab {

bool lu_solve(std::vector<double> A, std::vector<double>& b, int n) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[best * n + col])) best = r;
    if (std::abs(A[best * n + col]) < 1e-300) return false;
    if (best != col) {
      for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[best * n + c]);
      std::swap(b[col], b[best]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = A[r * n + col] / A[col * n + col];
      A[r * n + col] = 0;
      for (int c = col + 1; c < n; ++c) A[r * n + c] -= m * A[col * n + c];
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r * n + c] * b[c];
    b[r] = acc / A[r * n + r];
  }
  return true;
}

std::vector<double> sym_eigenvalues(std::vector<double> A, int n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A[p * n + q] * A[p * n + q];
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = A[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = 0.5 * (A[q * n + q] - A[p * n + p]) / apq;
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A[k * n + p], akq = A[k * n + q];
          A[k * n + p] = c * akp - s * akq;
          A[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A[p * n + k], aqk = A[q * n + k];
          A[p * n + k] = c * apk - s * aqk;
          A[q * n + k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A[i * n + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {
// Number of eigenvalues of the tridiagonal below x (Sturm count).
int sturm_count(const std::vector<double>& a, const std::vector<double>& b, double x) {
  int count = 0;
  double d = 1.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : b[i - 1] * b[i - 1];
    d = a[i] - x - b2 / (std::abs(d) < 1e-300 ? std::copysign(1e-300, d) : d);
    if (d < 0) ++count;
  }
  return count;
}
}  // namespace

double tridiag_smallest_eigenvalue(const std::vector<double>& alpha,
                                   const std::vector<double>& beta) {
  double lo = alpha[0], hi = alpha[0];
  for (size_t i = 0; i < alpha.size(); ++i) {
    const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) +
                     (i + 1 < alpha.size() ? std::abs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (sturm_count(alpha, beta, mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  if (n > 2) {
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / (n - 2) * n / det);
  }
  return f;
}

}  // namespace nlslab
