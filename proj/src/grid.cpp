#include "nlslab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace nlslab {

SpectralGrid::SpectralGrid(int n, double length) : n_(n), length_(length) {
  if (n < 256 || (n & (n - 1)) != 0) throw ConfigError("grid n must be a power of two >= 256");
  if (!(length > 0)) throw ConfigError("grid length must be positive");
  dx_ = length_ / n_;
  x_.resize(n_);
  k_.resize(n_);
  k2_.resize(n_);
  const double two_pi_over_L = 2.0 * M_PI / length_;
  for (int j = 0; j < n_; ++j) {
    x_[j] = -0.5 * length_ + j * dx_;
    const int m = (j < n_ / 2) ? j : j - n_;
    k_[j] = two_pi_over_L * m;
    k2_[j] = k_[j] * k_[j];
  }
}

GridPtr make_grid(int n, double length) { return std::make_shared<const SpectralGrid>(n, length); }

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(*this, o);
  for (size_t j = 0; j < v.size(); ++j) v[j] += o.v[j];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(*this, o);
  for (size_t j = 0; j < v.size(); ++j) v[j] -= o.v[j];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (auto& z : v) z *= s;
  return *this;
}

bool ComplexField::all_finite() const {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!a.grid || !b.grid || !(*a.grid == *b.grid)) throw GridMismatch("fields on different grids");
}

namespace fft {

namespace {

struct Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plan creation is not thread safe in FFTW; execution via the new-array
// interface is. Plans are created FFTW_UNALIGNED so any buffer works.
Plans& plans_for(int n) {
  static std::mutex mtx;
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch_in(n), scratch_out(n);
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  Plans p;
  p.fwd = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

}  // namespace

void forward(const std::vector<cplx>& in, std::vector<cplx>& out, int n) {
  out.resize(n);
  auto& p = plans_for(n);
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse(const std::vector<cplx>& in, std::vector<cplx>& out, int n) {
  out.resize(n);
  auto& p = plans_for(n);
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double inv_n = 1.0 / n;
  for (auto& z : out) z *= inv_n;
}

}  // namespace fft

std::vector<cplx> spectrum(const ComplexField& u) {
  std::vector<cplx> hat;
  fft::forward(u.v, hat, u.n());
  return hat;
}

ComplexField from_spectrum(GridPtr grid, std::vector<cplx> hat) {
  ComplexField u(std::move(grid));
  fft::inverse(hat, u.v, u.n());
  return u;
}

ComplexField derivative(const ComplexField& u, int order) {
  auto hat = spectrum(u);
  const auto& k = u.grid->k();
  const int n = u.n();
  if (order == 1) {
    for (int j = 0; j < n; ++j) hat[j] *= cplx(0, k[j]);
    // Nyquist mode of an odd-order derivative must vanish for a real result.
    hat[n / 2] = 0;
  } else if (order == 2) {
    for (int j = 0; j < n; ++j) hat[j] *= -k[j] * k[j];
  } else {
    for (int j = 0; j < n; ++j) hat[j] *= std::pow(cplx(0, k[j]), order);
    if (order % 2 == 1) hat[n / 2] = 0;
  }
  return from_spectrum(u.grid, std::move(hat));
}

ComplexField spectral_shift(const ComplexField& u, double shift) {
  if (shift == 0.0) return u;
  // Exact index rotation when the shift is a whole number of cells.
  const double cells = shift / u.dx();
  const double rounded = std::round(cells);
  const int n = u.n();
  if (std::abs(cells - rounded) < 1e-12 && std::abs(rounded) < n) {
    ComplexField out(u.grid);
    const int s = static_cast<int>(rounded);
    for (int j = 0; j < n; ++j) out.v[j] = u.v[((j - s) % n + n) % n];
    return out;
  }
  auto hat = spectrum(u);
  const auto& k = u.grid->k();
  for (int j = 0; j < n; ++j) hat[j] *= std::exp(cplx(0, -k[j] * shift));
  return from_spectrum(u.grid, std::move(hat));
}

}  // namespace nlslab
