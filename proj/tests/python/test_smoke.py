import math

import pytest

import nlslab as nls


@pytest.fixture(scope="module")
def cubic():
    return nls.PolynomialNonlinearity.cubic()


@pytest.fixture(scope="module")
def profile(cubic):
    return nls.solve_profile(cubic, 1.0, 25.0, 1024)


def test_existence_and_profile(cubic, profile):
    chk = nls.check_existence(cubic, 1.0)
    assert chk.satisfied
    assert abs(chk.y0 - 1.0) < 1e-10
    assert abs(profile.mass - 2.0) < 1e-6
    assert abs(profile.a_inf - 2.0) < 1e-3
    assert abs(profile.value(1.3) - 1.0 / math.cosh(1.3)) < 1e-8


def test_stability_margin(cubic):
    dq, rich, ok = nls.stability_margin(cubic, 1.0)
    assert ok
    assert abs(dq - 1.0) < 1e-4


def test_place_norms_and_evolution(cubic, profile):
    grid = nls.make_grid(1024, 80.0)
    params = nls.SolitonParams()
    params.v = 0.2
    u0 = nls.place(profile, params, grid)
    assert abs(u0.norm() - math.sqrt(2.0)) < 1e-9

    c0 = nls.conserved(u0, cubic)
    assert abs(c0.M - 0.5 * 0.2 * c0.Q) < 1e-8

    u1 = nls.evolve(u0, cubic, 1e-3, 0.0, 1.0)
    c1 = nls.conserved(u1, cubic)
    assert abs(c1.Q - c0.Q) / c0.Q < 1e-10
    assert abs(c1.H - c0.H) / abs(c0.H) < 1e-6


def test_separation_law(cubic, profile):
    dyn = nls.make_dynamics(profile, cubic, 0.2)
    C, route_i, route_ii, ident = nls.interaction_constant(profile, cubic)
    assert abs(C - 16.0) < 1e-2
    assert abs(route_i - route_ii) / route_ii < 1e-5
    # closed form solves the separation ODE
    for t in (0.0, 1.5, 20.0):
        lhs = dyn.d_ddot(t)
        rhs = C * math.exp(-2.0 * dyn.d(t))
        assert abs(lhs - rhs) < 1e-10


def test_modulation_fit_zero_shifts(cubic, profile):
    grid = nls.make_grid(1024, 80.0)
    dyn = nls.make_dynamics(profile, cubic, 0.2)
    ansatz = nls.ApproximateSolution.order0(profile, dyn, grid)
    u = ansatz.field(0.0)
    assert nls.oddness_residual(u) < 1e-12

    guess = nls.SolitonParams()
    guess.zeta = dyn.d(0.0)
    guess.v = dyn.d_dot(0.0)
    guess.gamma = 0.0
    st = nls.fit_modulation(u, guess, profile)
    assert max(abs(s) for s in st.shifts) < 1e-9
    assert st.residual_norm < 1e-9
