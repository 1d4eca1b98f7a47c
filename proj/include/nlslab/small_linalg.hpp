#ifndef NLSLAB_SMALL_LINALG_HPP
#define NLSLAB_SMALL_LINALG_HPP

#include <vector>

namespace nlslab {

/// Partial-pivot LU solve of a dense row-major n-by-n system (small n).
/// Returns false on (numerical) singularity.
bool lu_solve(std::vector<double> A, std::vector<double>& b, int n);

/// Eigenvalues of a small symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> sym_eigenvalues(std::vector<double> A, int n);

/// Smallest eigenvalue of a symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta` (beta[i] couples i and i+1), by
/// bisection on the Sturm sequence.
double tridiag_smallest_eigenvalue(const std::vector<double>& alpha,
                                   const std::vector<double>& beta);

/// Ordinary least squares for y ~ a + b x; returns {a, b, stderr_of_b}.
struct LineFit {
  double intercept = 0, slope = 0, slope_stderr = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlslab

#endif
