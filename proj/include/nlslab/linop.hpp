#ifndef NLSLAB_LINOP_HPP
#define NLSLAB_LINOP_HPP

#include <array>

#include "nlslab/field_ops.hpp"
#include "nlslab/profile.hpp"

namespace nlslab {

/// Centered fields built from one profile, used as test directions and
/// projection bases throughout.
struct SolitonBasisFields {
  ComplexField phi;      // phi(x)
  ComplexField dphi;     // phi'(x)
  ComplexField domega;   // d phi / d omega
  ComplexField xphi;     // x phi(x)
};

SolitonBasisFields make_basis_fields(const SolitonProfile& p, const GridPtr& grid);

/// Real-linear operator from linearizing the flow around e^{i omega t} phi:
///   S(rho) = -rho'' + omega rho - F'(phi^2) rho - F''(phi^2) phi^2 (rho + conj rho).
/// Real and imaginary parts decouple: the conjugation term acts only on
/// the real block.
class LinearizedOperator {
 public:
  LinearizedOperator(const SolitonProfile& p, const PolynomialNonlinearity& F, GridPtr grid);

  ComplexField apply(const ComplexField& rho) const;

  const GridPtr& grid() const { return grid_; }
  double omega() const { return omega_; }
  const SolitonBasisFields& basis_fields() const { return fields_; }

  /// Kernel directions phi' and i phi, unnormalized.
  const ComplexField& kernel_translation() const { return fields_.dphi; }
  ComplexField kernel_phase() const;

 private:
  GridPtr grid_;
  double omega_;
  std::vector<double> fprime_, fsecond_phi2_;  // F'(phi^2), F''(phi^2) phi^2 on the grid
  SolitonBasisFields fields_;
};

enum class Projector { Pi, Pi1 };

/// Orthogonal projection basis of soliton test directions:
///   Pi : {phi', i phi, d_omega phi, i x phi}
///   Pi1: {i phi', i phi, i x phi, i d_omega phi}
struct ProjectionBasis {
  std::array<ComplexField, 4> vectors;
  std::array<double, 16> gram;
  double gram_condition = 0;
};

ProjectionBasis make_projection_basis(const SolitonBasisFields& f, Projector which);

/// Component of f inside the basis span; f - project(...) is orthogonal
/// to every basis vector. Throws SingularGram.
ComplexField project(const ProjectionBasis& basis, const ComplexField& f);

/// f minus its span component.
ComplexField project_out(const ProjectionBasis& basis, const ComplexField& f);

/// f minus its components along the kernel pair {phi', i phi}; used to
/// scrub discretization noise off provably kernel-orthogonal sources.
ComplexField remove_kernel(const LinearizedOperator& S, ComplexField f);

struct InvertStats {
  int iterations = 0;
  double relative_residual = 0;
};

/// Solves S u = f on the orthogonal complement of ker S = span{phi', i phi}.
/// Requires <f, phi'> = <f, i phi> = 0 within 1e-8 ||f|| (NotOrthogonal).
/// Spectrally preconditioned MINRES on the symmetric sandwich
/// (K+omega)^{-1/2} S (K+omega)^{-1/2}; the computed solution is verified:
/// ||S u - f|| <= tol ||f|| or NoConvergence.
ComplexField invert_projected(const LinearizedOperator& S, const ComplexField& f,
                              double tol = 1e-8, InvertStats* stats = nullptr);

/// Rayleigh quotient <S g, g> / ||g||_{H^1}^2.
double rayleigh_h1(const LinearizedOperator& S, const ComplexField& g);

/// Smallest Rayleigh quotient of S in the H^1 metric over the orthogonal
/// complement of `constraints` (projected Lanczos on the H^1 sandwich).
double coercivity_floor(const LinearizedOperator& S, const std::vector<ComplexField>& constraints,
                        int max_iterations = 260);

}  // namespace nlslab

#endif
