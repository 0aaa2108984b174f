import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartop.errors import GridMismatch, InvalidRange, SchemeGridMismatch, TooFewPoints, UnsupportedOrder
from quartop.numgrid import (
    DiffScheme,
    Grid,
    GridFunction,
    best_scheme,
    cosh,
    decays,
    differentiate,
    exp,
    fd_weights,
    integrate,
    restrict,
    sech,
    sin,
    sqrt,
    tanh,
)


def test_grid_validation():
    with pytest.raises(InvalidRange):
        Grid(1.0, 1.0, 100)
    with pytest.raises(InvalidRange):
        Grid(0.0, np.inf, 100)
    with pytest.raises(TooFewPoints):
        Grid(0.0, 1.0, 8)


def test_grid_spacing():
    g = Grid(-1.0, 1.0, 21)
    assert g.h == pytest.approx(0.1)
    assert g.x[0] == -1.0 and g.x[-1] == 1.0
    p = Grid(0.0, 2 * np.pi, 64, periodic=True)
    assert p.h == pytest.approx(2 * np.pi / 64)
    assert p.x[-1] < 2 * np.pi


def test_fd_weights_textbook():
    assert np.allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1])
    assert np.allclose(fd_weights([-2, -1, 0, 1, 2], 1), np.array([1, -8, 0, 8, -1]) / 12)
    assert np.allclose(fd_weights(np.arange(-3, 4), 4), np.array([-1, 12, -39, 56, -39, 12, -1]) / 6)


def test_jets_match_closed_forms():
    g = Grid(-6.0, 6.0, 241)
    x = g.coordinate(6)
    s = sech(x)
    t = np.tanh(g.x)
    S = 1 / np.cosh(g.x)
    assert np.allclose(s.derivative(1), -S * t, atol=1e-14)
    assert np.allclose(s.derivative(2), S - 2 * S**3, atol=1e-14)
    th = tanh(x)
    assert np.allclose(th.derivative(1), S**2, atol=1e-14)
    e = exp(-1.0 * x * x)
    assert np.allclose(e.derivative(2), (4 * g.x**2 - 2) * np.exp(-g.x**2), atol=1e-14)
    r = sqrt(cosh(x))
    assert np.allclose(r.derivative(1), 0.5 * np.sinh(g.x) / np.sqrt(np.cosh(g.x)), atol=1e-12)


def test_third_derivative_of_tanh():
    g = Grid(-5.0, 5.0, 101)
    th = tanh(g.coordinate(4))
    S2 = 1 / np.cosh(g.x) ** 2
    t = np.tanh(g.x)
    assert np.allclose(th.derivative(3), 4 * S2 * t**2 - 2 * S2**2, atol=1e-13)


def test_analytic_scheme_keeps_jet():
    g = Grid(-5.0, 5.0, 101)
    s = sech(g.coordinate(5))
    d2 = differentiate(s, 2, DiffScheme.ANALYTIC)
    assert d2.order == 3
    assert np.allclose(differentiate(d2, 1, DiffScheme.ANALYTIC).values, s.derivative(3))
    with pytest.raises(UnsupportedOrder):
        differentiate(d2, 4, DiffScheme.ANALYTIC)


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5])
def test_fd4_converges_at_fourth_order(order):
    errs = []
    for n in (401, 801):
        g = Grid(-10.0, 10.0, n)
        s = sech(g.coordinate(order))
        num = differentiate(s.plain(), order, DiffScheme.CENTRAL_FD4).values
        errs.append(np.max(np.abs(num - s.derivative(order))))
    assert errs[0] / errs[1] > 10.0


def test_spectral_derivative_of_sine():
    g = Grid(0.0, 2 * np.pi, 64, periodic=True)
    f = GridFunction(g, np.sin(3 * g.x))
    assert np.allclose(differentiate(f, 1, "periodic_spectral").values, 3 * np.cos(3 * g.x), atol=1e-12)
    assert np.allclose(differentiate(f, 4, "periodic_spectral").values, 81 * np.sin(3 * g.x), atol=1e-9)


def test_scheme_errors():
    g = Grid(-5.0, 5.0, 101)
    f = GridFunction(g, np.exp(-g.x**2))
    with pytest.raises(SchemeGridMismatch):
        differentiate(f, 1, DiffScheme.PERIODIC_SPECTRAL)
    with pytest.raises(UnsupportedOrder):
        differentiate(f, 6, DiffScheme.CENTRAL_FD4)
    with pytest.raises(UnsupportedOrder):
        differentiate(f, -1)


def test_best_scheme():
    g = Grid(-5.0, 5.0, 101)
    s = sech(g.coordinate(3))
    assert best_scheme(s, need=3) is DiffScheme.ANALYTIC
    assert best_scheme(s, need=4) is DiffScheme.CENTRAL_FD4
    p = Grid(0.0, 1.0, 32, periodic=True)
    assert best_scheme(GridFunction(p, np.zeros(32)), need=1) is DiffScheme.PERIODIC_SPECTRAL


def test_grid_mismatch():
    a = GridFunction(Grid(0.0, 1.0, 32), np.zeros(32))
    b = GridFunction(Grid(0.0, 2.0, 32), np.zeros(32))
    with pytest.raises(GridMismatch):
        a + b
    with pytest.raises(GridMismatch):
        GridFunction(Grid(0.0, 1.0, 32), np.zeros(31))
    with pytest.raises(ValueError):
        GridFunction(Grid(0.0, 1.0, 32), np.full(32, np.nan))


def test_quadrature():
    g = Grid(-30.0, 30.0, 3001)
    s = sech(g.coordinate(0))
    assert integrate(s * s) == pytest.approx(2.0, abs=1e-12)
    assert integrate(s**4) == pytest.approx(4.0 / 3.0, abs=1e-12)
    p = Grid(-np.pi, np.pi, 32, periodic=True)
    assert integrate(GridFunction(p, np.cos(p.x) ** 2)) == pytest.approx(np.pi, abs=1e-13)


def test_restrict_and_decay():
    g = Grid(-20.0, 20.0, 401)
    s = sech(g.coordinate(2))
    sub = restrict(s, 100, 301)
    assert sub.grid.n == 201
    assert sub.grid.x[0] == pytest.approx(g.x[100])
    assert np.allclose(sub.derivative(1), s.derivative(1)[100:301])
    assert decays(s)
    assert not decays(tanh(g.coordinate(0)))


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), order=st.integers(1, 5))
def test_differentiation_is_linear(a, b, order):
    g = Grid(-10.0, 10.0, 201)
    x = g.coordinate(0)
    f, h = sech(x), sin(x) * sech(0.5 * x)
    lhs = differentiate(a * f + b * h, order)
    rhs = a * differentiate(f, order) + b * differentiate(h, order)
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-9 * (1 + abs(a) + abs(b)) * max(1.0, np.max(np.abs(rhs.values)))
