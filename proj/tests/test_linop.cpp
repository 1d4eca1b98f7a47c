#include <doctest.h>

#include <cmath>
#include <random>

#include "nlslab/linop.hpp"

using namespace nlslab;

namespace {

struct Fixture {
  PolynomialNonlinearity F = PolynomialNonlinearity::cubic();
  SolitonProfile prof;
  GridPtr grid;
  std::shared_ptr<LinearizedOperator> S;
  Fixture() {
    prof = solve_profile_full(F, 1.0, 30.0, 2048);
    grid = make_grid(1024, 60.0);
    S = std::make_shared<LinearizedOperator>(prof, F, grid);
  }
};

Fixture& fix() {
  static Fixture f;
  return f;
}

ComplexField times_i(ComplexField f) {
  for (auto& z : f.v) z *= cplx(0, 1);
  return f;
}

ComplexField random_smooth(const GridPtr& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ComplexField u(g);
  for (int j = 0; j < u.n(); ++j)
    u.v[j] = cplx(gauss(rng), gauss(rng)) * std::exp(-0.03 * g->x()[j] * g->x()[j]);
  auto hat = spectrum(u);
  for (int j = 0; j < u.n(); ++j) hat[j] *= std::exp(-g->k2()[j] / 6.0);
  return from_spectrum(g, std::move(hat));
}

}  // namespace

TEST_CASE("kernel directions are annihilated") {
  auto& f = fix();
  const auto& bf = f.S->basis_fields();
  const double n_dphi = norm(bf.dphi, 0, 0);
  CHECK(norm(f.S->apply(bf.dphi), 0, 0) / n_dphi <= 1e-7);
  auto iphi = times_i(bf.phi);
  CHECK(norm(f.S->apply(iphi), 0, 0) / norm(bf.phi, 0, 0) <= 1e-7);
}

TEST_CASE("S(domega phi) = -phi and S(i x phi / 2) = -i phi'") {
  auto& f = fix();
  const auto& bf = f.S->basis_fields();
  ComplexField r1 = f.S->apply(bf.domega) + bf.phi;
  CHECK(norm(r1, 0, 0) / norm(bf.phi, 0, 0) <= 1e-5);

  ComplexField half_ixphi = times_i(bf.xphi);
  for (auto& z : half_ixphi.v) z *= 0.5;
  ComplexField r2 = f.S->apply(half_ixphi) + times_i(bf.dphi);
  CHECK(norm(r2, 0, 0) / norm(bf.dphi, 0, 0) <= 1e-5);
}

TEST_CASE("operator is symmetric for the real inner product") {
  auto& f = fix();
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    auto a = random_smooth(f.grid, seed);
    auto b = random_smooth(f.grid, seed + 100);
    const double lhs = inner(f.S->apply(a), b);
    const double rhs = inner(a, f.S->apply(b));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * norm(a, 1, 0) * norm(b, 1, 0));
  }
}

TEST_CASE("real and imaginary blocks decouple") {
  auto& f = fix();
  auto u = random_smooth(f.grid, 42);
  ComplexField re(f.grid), im(f.grid);
  for (int j = 0; j < u.n(); ++j) {
    re.v[j] = u.v[j].real();
    im.v[j] = cplx(0, u.v[j].imag());
  }
  auto Sre = f.S->apply(re);
  auto Sim = f.S->apply(im);
  for (int j = 0; j < u.n(); ++j) {
    CHECK(std::abs(Sre.v[j].imag()) <= 1e-12);
    CHECK(std::abs(Sim.v[j].real()) <= 1e-12);
  }
}

TEST_CASE("projection basics") {
  auto& f = fix();
  auto basis = make_projection_basis(f.S->basis_fields(), Projector::Pi);
  CHECK(basis.gram_condition < 1e6);

  // f already in the span (real coefficients; the inner product is real).
  ComplexField in_span(f.grid);
  for (int j = 0; j < in_span.n(); ++j)
    in_span.v[j] = 0.3 * basis.vectors[0].v[j] + 0.5 * basis.vectors[1].v[j] -
                   1.2 * basis.vectors[2].v[j];
  auto proj = project(basis, in_span);
  CHECK(norm(proj - in_span, 0, 0) <= 1e-10 * norm(in_span, 0, 0));

  // Idempotence and orthogonality of the complement.
  auto g = random_smooth(f.grid, 9);
  auto pg = project(basis, g);
  auto ppg = project(basis, pg);
  CHECK(norm(ppg - pg, 0, 0) <= 1e-10 * norm(pg, 0, 0));
  auto resid = project_out(basis, g);
  for (const auto& b : basis.vectors)
    CHECK(std::abs(inner(resid, b)) <= 1e-10 * norm(g, 0, 0) * norm(b, 0, 0));
}

TEST_CASE("Pi1 basis matches the phase-rotated test set") {
  auto& f = fix();
  auto b1 = make_projection_basis(f.S->basis_fields(), Projector::Pi1);
  CHECK(b1.gram_condition < 1e6);
  auto g = random_smooth(f.grid, 21);
  auto r = project_out(b1, g);
  for (const auto& b : b1.vectors)
    CHECK(std::abs(inner(r, b)) <= 1e-10 * norm(g, 0, 0) * norm(b, 0, 0));
}

TEST_CASE("projected inversion: S(domega phi) = -phi route") {
  auto& f = fix();
  const auto& bf = f.S->basis_fields();
  // rhs = -phi is orthogonal to both kernel directions.
  ComplexField rhs = bf.phi;
  for (auto& z : rhs.v) z = -z;
  InvertStats st;
  ComplexField u = invert_projected(*f.S, rhs, 1e-8, &st);
  CHECK(st.relative_residual <= 1e-8);
  // domega phi is even and real, hence already kernel-orthogonal; the
  // inversion must reproduce it directly.
  ComplexField diff = u - bf.domega;
  CHECK(norm(diff, 0, 0) <= 2e-4 * norm(bf.domega, 0, 0));
}

TEST_CASE("projected inversion: S(ix phi / 2) = -i phi' route") {
  auto& f = fix();
  const auto& bf = f.S->basis_fields();
  ComplexField rhs = times_i(bf.dphi);
  for (auto& z : rhs.v) z = -z;
  ComplexField u = invert_projected(*f.S, rhs);
  // Expected inverse modulo the kernel: i x phi / 2 minus its i phi component.
  ComplexField expect = times_i(bf.xphi);
  for (auto& z : expect.v) z *= 0.5;
  ComplexField iphi = times_i(bf.phi);
  const double c = inner(expect, iphi) / inner(iphi, iphi);
  for (int j = 0; j < expect.n(); ++j) expect.v[j] -= c * iphi.v[j];
  CHECK(norm(u - expect, 0, 0) <= 1e-4 * norm(expect, 0, 0));
}

TEST_CASE("inversion of zero is zero and non-orthogonal input is rejected") {
  auto& f = fix();
  ComplexField zero(f.grid);
  CHECK(norm(invert_projected(*f.S, zero), 0, 0) == 0.0);
  CHECK_THROWS_AS(invert_projected(*f.S, f.S->kernel_translation()), NotOrthogonal);
}

TEST_CASE("inversion is a right inverse on the admissible subspace") {
  auto& f = fix();
  auto basis = make_projection_basis(f.S->basis_fields(), Projector::Pi);
  for (unsigned seed : {11u, 12u, 13u}) {
    auto g = project_out(basis, random_smooth(f.grid, seed));
    InvertStats st;
    ComplexField u = invert_projected(*f.S, g, 1e-8, &st);
    ComplexField res = f.S->apply(u) - g;
    CHECK(norm(res, 0, 0) <= 1e-8 * norm(g, 0, 0));
    // Returned solution lives in the kernel complement.
    CHECK(std::abs(inner(u, f.S->kernel_translation())) <= 1e-8 * norm(u, 0, 0));
  }
}

TEST_CASE("real sources invert to real solutions") {
  auto& f = fix();
  auto basis = make_projection_basis(f.S->basis_fields(), Projector::Pi);
  auto g = random_smooth(f.grid, 31);
  for (auto& z : g.v) z = z.real();
  g = project_out(basis, g);
  // project_out keeps it real (the imaginary basis members pair to zero).
  ComplexField u = invert_projected(*f.S, g);
  double im = 0;
  for (const auto& z : u.v) im = std::max(im, std::abs(z.imag()));
  CHECK(im <= 1e-10);
}

TEST_CASE("coercivity floor: constrained positive, unconstrained negative") {
  auto& f = fix();
  const auto& bf = f.S->basis_fields();
  // Constraint set {phi', i phi, phi}: the translation and phase kernel
  // directions plus the mass-conservation direction that excludes the
  // single negative mode when dQ/domega > 0.
  std::vector<ComplexField> constraints = {bf.dphi, times_i(bf.phi), bf.phi};
  const double floor_c = coercivity_floor(*f.S, constraints, 220);
  CHECK(floor_c > 0.0);

  // The variant set {x phi, i domega phi, phi} is coercive as well.
  std::vector<ComplexField> alt = {bf.xphi, times_i(bf.domega), bf.phi};
  CHECK(coercivity_floor(*f.S, alt, 220) > 0.0);

  const double floor_u = coercivity_floor(*f.S, {}, 220);
  CHECK(floor_u < 0.0);

  // Kernel Rayleigh quotients vanish.
  CHECK(std::abs(rayleigh_h1(*f.S, bf.dphi)) <= 1e-7);
  CHECK(std::abs(rayleigh_h1(*f.S, times_i(bf.phi))) <= 1e-7);
}
