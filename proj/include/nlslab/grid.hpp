#ifndef NLSLAB_GRID_HPP
#define NLSLAB_GRID_HPP

#include <complex>
#include <memory>
#include <vector>

#include "nlslab/errors.hpp"

namespace nlslab {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2), n a power of two.
/// x_j = -L/2 + j*dx, wavenumbers in standard FFT order (antisymmetric up
/// to the Nyquist mode, which carries -n/2).
class SpectralGrid {
 public:
  SpectralGrid(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return dx_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& k() const { return k_; }
  const std::vector<double>& k2() const { return k2_; }

  /// Index of x = 0 (n/2).
  int zero_index() const { return n_ / 2; }
  /// Index of -x_j under periodic reflection.
  int reflect(int j) const { return j == 0 ? 0 : n_ - j; }

  bool operator==(const SpectralGrid& o) const {
    return n_ == o.n_ && length_ == o.length_;
  }

 private:
  int n_;
  double length_, dx_;
  std::vector<double> x_, k_, k2_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int n, double length);

/// Complex samples u_j ~ u(x_j) on a shared grid. Value semantics.
struct ComplexField {
  GridPtr grid;
  std::vector<cplx> v;

  ComplexField() = default;
  explicit ComplexField(GridPtr g) : grid(std::move(g)), v(grid->n(), cplx(0)) {}
  ComplexField(GridPtr g, std::vector<cplx> vals) : grid(std::move(g)), v(std::move(vals)) {}

  int n() const { return grid->n(); }
  double dx() const { return grid->dx(); }
  cplx& operator[](int j) { return v[j]; }
  const cplx& operator[](int j) const { return v[j]; }

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx s);
  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

  bool all_finite() const;
};

void require_same_grid(const ComplexField& a, const ComplexField& b);

namespace fft {
/// In-place-capable DFT wrappers (FFTW backend, plan cache, thread safe).
void forward(const std::vector<cplx>& in, std::vector<cplx>& out, int n);
void inverse(const std::vector<cplx>& in, std::vector<cplx>& out, int n);
}  // namespace fft

/// û_k with forward-unnormalized convention; inverse divides by n.
std::vector<cplx> spectrum(const ComplexField& u);
ComplexField from_spectrum(GridPtr grid, std::vector<cplx> hat);

ComplexField derivative(const ComplexField& u, int order = 1);
/// u(x - shift) by Fourier phase shift (band-limited interpolation).
ComplexField spectral_shift(const ComplexField& u, double shift);

}  // namespace nlslab

#endif
