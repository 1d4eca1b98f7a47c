#ifndef NLSLAB_EXPERIMENTS_HPP
#define NLSLAB_EXPERIMENTS_HPP

#include <optional>

#include "nlslab/evolve.hpp"
#include "nlslab/modulation.hpp"

namespace nlslab {

struct CollisionConfig {
  std::vector<std::pair<int, double>> nonlinearity = {{2, 1.0}};
  double omega = 1.0;
  double v = 0.2;           // incoming half-speed
  int ansatz_order = 1;
  int grid_n = 2048;
  double grid_length = 80.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::Yoshida4;
  int snapshot_stride = 0;  // 0: choose so snapshots land every ~0.2 time units
  double t_start = 0.0;     // 0: automatic (see below)
  double t_end = 0.0;
  double post_window = 0.0;  // outgoing-speed regression window, default 10/v

  /// Auto time span: |t| large enough that exp(-2 sqrt(w) d) <= 1e-3 v^2
  /// at the endpoints and that a full regression window of length 10/v
  /// fits after re-separation.
  void finalize(const InteractionDynamics& dyn);
};

struct FluxSample {
  double t = 0;
  double M_plus = 0;
  double flux = 0;  // |psi_x(t,0)|^2 / 2
};

struct CollisionReport {
  double v_in = 0, v_out = 0;
  double inelasticity = 0;
  double remainder_H1_final = 0;
  double prepared_residual_H1 = 0;
  double energy_drift = 0, mass_drift = 0, momentum_drift = 0;  // relative
  double min_separation = 0;
  double mplus_monotone_defect = 0;  // most negative M+ increment (absolute)
  double flux_match_rel_error = 0;   // dM+/dt vs |psi_x(0)|^2/2, rel. to peak flux
  double max_oddness_residual = 0;
  std::vector<ModulationState> modulation_trace;
  std::vector<RemainderDiagnostics> remainder_trace;  // parallel to the fits
  std::vector<FluxSample> flux_trace;
  std::vector<std::pair<double, double>> centroid_trace;  // (t, half-line centroid)
};

/// Profile, dynamics, operator and ansatz shared by one experiment.
struct ExperimentSetup {
  PolynomialNonlinearity F;
  SolitonProfile profile;
  InteractionDynamics dyn;
  GridPtr grid;
  std::shared_ptr<LinearizedOperator> S;
  std::shared_ptr<ApproximateSolution> approx;
};

ExperimentSetup make_setup(const CollisionConfig& cfg);

/// Prepared two-soliton data: the order-k ansatz at t_start, exactly odd.
/// Reports the flow residual of the data. Throws WrapAround when the
/// domain cannot hold the initial separation.
ComplexField prepare(const ExperimentSetup& setup, const CollisionConfig& cfg,
                     double* residual_H1 = nullptr);

CollisionReport run_collision(const CollisionConfig& cfg);

struct SweepResult {
  std::vector<double> v_list;
  std::vector<double> inelasticity;           // measured
  std::vector<double> inelasticity_floor;     // integrable-cubic calibration
  std::vector<double> inelasticity_corrected; // quadrature-subtracted
  std::vector<double> remainder_H1;
  std::vector<double> remainder_floor;  // cubic-calibration remainders
  double inelasticity_slope = 0, inelasticity_stderr = 0;
  double remainder_slope = 0, remainder_stderr = 0;
  int n_usable = 0;  // corrected points above the floor
  std::vector<std::string> failures;
};

/// Collision per v (parallel), with a cubic run per v calibrating the
/// solver noise floor; log-log regressions of the corrected inelasticity
/// and of the final remainder norm.
SweepResult sweep(const CollisionConfig& base, const std::vector<double>& v_list,
                  int threads = 4, bool calibrate_floor = true);

struct OrbitalConfig {
  std::vector<std::pair<int, double>> nonlinearity = {{2, 1.0}};
  double omega = 1.0;
  double v0 = 0.1;
  double zeta0 = 0.0;        // 0: (16 / sqrt(w)) ln(1/v)
  double perturbation_H1 = 1e-6;
  double window = 0.0;       // 0: 20 / v
  int grid_n = 4096;
  double grid_length = 200.0;
  double dt = 2e-3;
  unsigned long seed = 1234;
};

struct OrbitalReport {
  double zeta0 = 0;
  double max_remainder_H1 = 0;
  double bound = 0;            // 1e-5 + 10 exp(-sqrt(w) zeta0 / 2) style cap
  double min_zeta_dot = 0;
  bool remainder_ok = false;
  bool speed_ok = false;
  std::vector<std::array<double, 4>> trace;  // t, zeta, zeta_dot, ||r||_H1
};

/// Receding solitons plus a small odd perturbation; tracks the modulation
/// fit across a window of length 20/v and checks the orbital-stability
/// bounds in their measured form.
OrbitalReport orbital_window(const OrbitalConfig& cfg);

}  // namespace nlslab

#endif
