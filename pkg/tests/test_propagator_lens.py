import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hermite_nls.hermite_core import (
    Basis, SpectralField, lp_norm, make_grid, random_field, sobolev_norm, synthesize,
)
from hermite_nls.propagator_lens import (
    free_propagate, lens_forward, mehler_apply, nls_residual, nlsh_residual,
    propagate_harmonic,
)


def gaussian_free(x, t):
    # closed-form solution of i u_t + u_xx = 0 with u(0) = exp(-x^2/2)
    return (1 + 2j * t) ** -0.5 * np.exp(-x ** 2 / (2 * (1 + 2j * t)))


def test_propagate_harmonic_examples():
    b = Basis(1, 30)
    f = random_field(b, np.random.default_rng(0))
    assert np.array_equal(propagate_harmonic(f, 0.0).coeffs, f.coeffs)
    assert np.abs(propagate_harmonic(f, np.pi).coeffs + f.coeffs).max() < 1e-12
    assert abs(sobolev_norm(propagate_harmonic(f, 0.77), 0) - sobolev_norm(f, 0)) <= 1e-14 * f.norm()


@settings(max_examples=50, deadline=None)
@given(t1=st.floats(-1, 1), t2=st.floats(-1, 1), seed=st.integers(0, 1000))
def test_group_law(t1, t2, seed):
    f = random_field(Basis(3, 6), np.random.default_rng(seed))
    a = propagate_harmonic(f, t1 + t2).coeffs
    b = propagate_harmonic(propagate_harmonic(f, t1), t2).coeffs
    assert np.abs(a - b).max() <= 1e-14 * max(1.0, np.abs(f.coeffs).max())


def test_mehler_single_modes():
    b = Basis(1, 10)
    g = make_grid(b)
    h0 = synthesize(SpectralField.mode(b, 0), g)
    out = mehler_apply(h0, np.pi / 8, g)
    assert np.abs(out - np.exp(-1j * np.pi / 8) * h0).max() <= 1e-6
    h1 = synthesize(SpectralField.mode(b, 1), g)
    assert np.abs(mehler_apply(h1, 0.3, g) - np.exp(-0.9j) * h1).max() <= 1e-6


@pytest.mark.parametrize("t", [0.1, 0.2, 0.3, np.pi / 8, -0.25])
def test_mehler_vs_spectral_lambda15(t):
    b = Basis(1, 112)
    g = make_grid(b)
    f = random_field(b, np.random.default_rng(7))
    ref = synthesize(propagate_harmonic(f, t), g)
    assert np.abs(mehler_apply(synthesize(f, g), t, g) - ref).max() <= 1e-6


def test_mehler_2d_spot_check():
    b = Basis(2, 12)
    g = make_grid(b)
    f = random_field(b, np.random.default_rng(2))
    ref = synthesize(propagate_harmonic(f, 0.2), g)
    assert np.abs(mehler_apply(synthesize(f, g), 0.2, g) - ref).max() <= 1e-6


def test_mehler_linear_and_band():
    b = Basis(1, 20)
    g = make_grid(b)
    rng = np.random.default_rng(5)
    u, v = (synthesize(random_field(b, rng), g) for _ in range(2))
    al, be = 0.3 - 1.1j, 2.0
    lhs = mehler_apply(al * u + be * v, 0.4, g)
    rhs = al * mehler_apply(u, 0.4, g) + be * mehler_apply(v, 0.4, g)
    assert np.abs(lhs - rhs).max() <= 1e-10
    for bad in (0.0, 0.01, np.pi / 4, -np.pi / 4 + 0.01):
        with pytest.raises(ValueError):
            mehler_apply(u, bad, g)


def test_free_propagate_gaussian():
    g = make_grid(Basis(1, 40))
    u0 = np.exp(-g.x ** 2 / 2)
    assert np.array_equal(free_propagate(u0, 0.0, g), u0.astype(complex))
    for t in (-1.0, -0.3, 0.5, 1.0):
        out = free_propagate(u0, t, g)
        assert np.abs(out - gaussian_free(g.x, t)).max() <= 1e-6
        assert abs(lp_norm(out, 2, g) - lp_norm(u0, 2, g)) <= 1e-12


def test_free_propagate_boundary_guard():
    g = make_grid(Basis(1, 4))
    with pytest.raises(ValueError):
        free_propagate(np.exp(-(g.x - g.L) ** 2), 0.1, g)


def _lens_case(seed):
    # data on a small basis sampled on a wider grid, so the rescaled data and
    # the dispersed free solution both stay well inside the window
    bd = Basis(1, 12)
    g = make_grid(Basis(1, 72))
    return random_field(bd, np.random.default_rng(seed)), g


def test_lens_at_zero_is_identity():
    f, g = _lens_case(0)
    u0 = synthesize(f, g)
    out = lens_forward(lambda t: synthesize(propagate_harmonic(f, t), g), 0.0, g, 1)
    assert out.t == 0.0
    assert np.abs(out.values - u0).max() < 1e-12


def test_lens_out_of_range():
    f, g = _lens_case(0)
    with pytest.raises(ValueError):
        lens_forward(lambda t: synthesize(f, g), 1.0, g, 1, t_range=(-0.2, 0.2))


@pytest.mark.parametrize("seed", range(20))
def test_lens_of_harmonic_flow_is_free_flow(seed):
    f, g = _lens_case(seed)
    u0 = synthesize(f, g)
    for s in (0.1, 0.25, 0.5, 1.0):
        lens = lens_forward(lambda t: synthesize(propagate_harmonic(f, t), g), s, g, 1)
        free = free_propagate(u0, s, g)
        assert lp_norm(lens.values - free, 2, g) <= 1e-5
        assert abs(lp_norm(lens.values, 2, g) - f.norm()) <= 1e-6


def test_lens_spectral_input_and_2d():
    bd = Basis(2, 6)
    g = make_grid(Basis(2, 40))
    f = random_field(bd, np.random.default_rng(3))
    free = free_propagate(synthesize(f, g), 0.5, g)
    lens = lens_forward(lambda t: propagate_harmonic(f, t), 0.5, g, 2)
    assert lp_norm(lens.values - free, 2, g) <= 1e-5


def test_lens_cubic_option_is_coarser():
    f, g = _lens_case(1)
    u = lambda t: synthesize(propagate_harmonic(f, t), g)
    free = free_propagate(synthesize(f, g), 0.5, g)
    err = lp_norm(lens_forward(u, 0.5, g, 1, interp="cubic").values - free, 2, g)
    assert 1e-8 < err < 1e-2


def test_nlsh_residual_linear_flow():
    b = Basis(1, 12)  # lambda_max = 5
    g = make_grid(b)
    f = random_field(b, np.random.default_rng(0))
    f = f * (1 / f.norm())
    ts = 0.1 + 1e-3 * np.arange(9)
    u = np.array([synthesize(propagate_harmonic(f, t), g) for t in ts])
    rep = nlsh_residual(u, ts, 0, g, b, nonlinear=False)
    assert rep.residual_l2 <= 1e-6 and rep.dt == pytest.approx(1e-3)
    assert set(rep.to_dict()) >= {"residual_l2", "dt", "grid_params"}
    zero = nlsh_residual(np.zeros_like(u), ts, 1, g, b)
    assert zero.residual_l2 == 0


@pytest.mark.xfail(strict=True, reason="fourth-order differencing error dt^4 lambda^10 / 30 "
                   "exceeds 1e-6 for unit data at lambda_max ~ 10 and dt = 1e-3")
def test_nlsh_residual_linear_flow_lambda10():
    b = Basis(1, 49)
    g = make_grid(b)
    f = random_field(b, np.random.default_rng(0))
    f = f * (1 / f.norm())
    ts = 0.1 + 1e-3 * np.arange(9)
    u = np.array([synthesize(propagate_harmonic(f, t), g) for t in ts])
    assert nlsh_residual(u, ts, 0, g, b, nonlinear=False).residual_l2 <= 1e-6


def test_nls_residual_free_flow():
    b = Basis(1, 12)
    g = make_grid(Basis(1, 60))
    f = random_field(b, np.random.default_rng(4))
    f = f * (1 / f.norm())
    u0 = synthesize(f, g)
    ts = 0.3 + 1e-3 * np.arange(7)
    v = np.array([free_propagate(u0, t, g) for t in ts])
    assert nls_residual(v, ts, 1, g, nonlinear=False).residual_l2 <= 1e-6
    # the nonlinear residual of a linear flow is the size of the cubic term
    assert nls_residual(v, ts, 1, g).residual_l2 > 1e-3
    assert nls_residual(np.zeros_like(v), ts, -1, g).residual_l2 == 0


def test_residual_sample_guard():
    g = make_grid(Basis(1, 4))
    with pytest.raises(ValueError):
        nls_residual(np.zeros((4, g.m)), np.arange(4) * 0.1, 1, g)
