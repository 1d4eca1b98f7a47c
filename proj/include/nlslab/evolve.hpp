#ifndef NLSLAB_EVOLVE_HPP
#define NLSLAB_EVOLVE_HPP

#include <functional>
#include <string>
#include <vector>

#include "nlslab/field_ops.hpp"
#include "nlslab/nonlinearity.hpp"

namespace nlslab {

enum class Scheme { Strang, Yoshida4 };

struct EvolutionConfig {
  double dt = 1e-3;
  double t_begin = 0;
  double t_end = 1;
  int snapshot_stride = 100;
  Scheme scheme = Scheme::Strang;

  /// dt > 0 required (direction comes from t_end - t_begin). The
  /// dt * max(k^2) <= pi phase-wrap guard is advisory only: the linear
  /// substep is evaluated exactly in Fourier space, so only splitting
  /// error constrains dt.
  void validate(const SpectralGrid& g) const;
};

struct ConservedQuantities {
  double H = 0;  // energy
  double Q = 0;  // mass
  double M = 0;  // momentum
};

struct HalfLineQuantities {
  double Q_plus = 0;
  double H_plus = 0;
  double M_plus = 0;
  double boundary_flux = 0;  // |psi_x(t,0)|^2 / 2
};

ConservedQuantities conserved(const ComplexField& u, const PolynomialNonlinearity& F);

/// Integrals over x > 0 plus the boundary flux; requires an odd field
/// (relative defect <= 1e-8, else NotOdd).
HalfLineQuantities half_quantities(const ComplexField& u, const PolynomialNonlinearity& F);

/// One split step of i u_t + u_xx + F'(|u|^2) u = 0. The nonlinear substep
/// is the exact phase rotation; the linear substep is the exact Fourier
/// multiplier.
ComplexField step(const ComplexField& u, double dt, const PolynomialNonlinearity& F,
                  Scheme scheme = Scheme::Strang);

/// Fixed-step evolution engine with cached multiplier tables.
class Evolver {
 public:
  Evolver(GridPtr grid, const PolynomialNonlinearity& F, double dt, Scheme scheme);

  void advance(ComplexField& u) const;  // one macro step of size dt (signed)
  double dt() const { return dt_; }

 private:
  GridPtr grid_;
  PolynomialNonlinearity F_;
  double dt_;
  Scheme scheme_;
  std::vector<cplx> lin_full_, lin_w0_, lin_w1_;  // exp(-i k^2 dt_sub)

  void strang(ComplexField& u, double dt, const std::vector<cplx>& lin) const;
};

struct Snapshot {
  double t;
  ComplexField u;
};

using Observer = std::function<void(int step_index, double t, const ComplexField& u)>;

struct Trajectory {
  std::vector<Snapshot> snapshots;
  bool completed = false;
  double t_final = 0;
};

/// Fixed-step loop from t_begin to t_end (either direction); observers run
/// every snapshot_stride steps and at both endpoints. Throws NonFinite on
/// the first non-finite sample (after recording the partial trajectory in
/// the returned object via the observer hook).
Trajectory run(const ComplexField& u0, const EvolutionConfig& cfg, const PolynomialNonlinearity& F,
               const std::vector<Observer>& observers = {}, bool keep_snapshots = true);

}  // namespace nlslab

#endif
