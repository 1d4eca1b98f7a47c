#include <doctest.h>

#include <cmath>

#include "nlslab/nonlinearity.hpp"

using namespace nlslab;

// Independent oracle: naive power-sum evaluation of the differentiated
// polynomial, no Horner.
static double naive_eval(const std::vector<std::pair<int, double>>& terms, double s, int order) {
  double acc = 0;
  for (auto [p, c] : terms) {
    double f = c;
    int pw = p;
    for (int d = 0; d < order; ++d) f *= pw--;
    acc += f * std::pow(s, pw);
  }
  return acc;
}

TEST_CASE("eval matches direct polynomial arithmetic") {
  auto F = PolynomialNonlinearity::cubic();  // F(s) = s^2
  CHECK(F.eval(2.0, 1) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(F.eval(0.0, 0) == 0.0);  // F(0) = 0 structural

  // F'(s) = a s + b s^2 at s = 1 with a = 2, b = 1 -> 3.
  PolynomialNonlinearity G({{2, 1.0}, {3, 1.0 / 3.0}});
  CHECK(G.eval(1.0, 1) == doctest::Approx(3.0).epsilon(1e-14));

  std::vector<std::pair<int, double>> terms = {{2, 0.7}, {3, -0.2}, {5, 0.05}};
  PolynomialNonlinearity H(terms);
  for (double s : {0.0, 0.3, 1.0, 2.5, 9.7})
    for (int ord : {0, 1, 2})
      CHECK(H.eval(s, ord) == doctest::Approx(naive_eval(terms, s, ord)).epsilon(1e-13));
}

TEST_CASE("derivative consistency by centered differences") {
  PolynomialNonlinearity H({{2, 0.4}, {3, 0.1}, {4, -0.02}});
  const double h = 1e-5;
  for (double s : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double fd = (H.eval(s + h, 0) - H.eval(s - h, 0)) / (2 * h);
    CHECK(std::abs(H.eval(s, 1) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("existence check on the cubic") {
  auto F = PolynomialNonlinearity::cubic();
  auto e1 = check_existence(F, 1.0);
  CHECK(e1.satisfied);
  CHECK(e1.y0 == doctest::Approx(1.0).epsilon(1e-12));

  auto e4 = check_existence(F, 4.0);
  CHECK(e4.satisfied);
  CHECK(e4.y0 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("defocusing sign has no root") {
  PolynomialNonlinearity F({{2, -1.0}});
  CHECK_THROWS_AS(check_existence(F, 1.0), NoRoot);
}

TEST_CASE("scaling the nonlinearity moves the root continuously") {
  // T = 0 at y0 = sqrt(omega / lambda) for F = lambda s^2.
  for (double lam : {0.5, 1.0, 2.0, 4.0}) {
    PolynomialNonlinearity F({{2, lam}});
    auto e = check_existence(F, 1.0);
    CHECK(e.satisfied);
    CHECK(e.y0 == doctest::Approx(1.0 / std::sqrt(lam)).epsilon(1e-11));
  }
  // Tiny coefficient perturbations do not flip the verdict.
  PolynomialNonlinearity F({{2, 1.0 + 1e-12}});
  CHECK(check_existence(F, 1.0).satisfied);
}

TEST_CASE("cubic-quintic hypotheses hold for small defocusing quintic") {
  auto F = PolynomialNonlinearity::cubic_quintic(2.0, 0.1);
  auto e = check_existence(F, 1.0);
  CHECK(e.satisfied);
  CHECK(e.y0 < 1.0);  // quintic term deepens the well
}
