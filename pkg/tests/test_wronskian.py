import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from quartop.catalog import example, follyton
from quartop.errors import LinearDependence, WronskianVanishes
from quartop.numgrid import Grid, sech, tanh
from quartop.operator_core import apply_A, identity_residuals
from quartop.wronskian_factor import (
    check_wronskian_positive,
    factor_from_pair,
    factor_from_wronskian,
    factorization,
    ground_state_wronskians,
    hirota_residual,
    hirota_residual_from_pair,
    liouville_pair,
    potentials_from_pair,
    potentials_from_wronskian,
    WronskianSet,
    trusted_window,
    unit_wronskian_defect,
    w23_identity_residual,
    wronskians,
    wronskians_from_closed_form,
)

GRID = Grid(-25.0, 25.0, 1001)


@pytest.fixture(scope="module")
def e1():
    return example(1, GRID)


def test_example1_wronskian_closed_form(e1):
    ws = wronskians(*e1.psi_pair)
    S = 1 / np.cosh(GRID.x)
    assert np.allclose(ws.W.values, S**3, atol=1e-14)
    f, g = factor_from_wronskian(ws)
    assert np.allclose(f.values, -3 * np.tanh(GRID.x), atol=1e-13)
    assert np.allclose(g.values, -2.0, atol=1e-13)


def test_pair_is_annihilated(e1):
    fac = factorization(wronskians(*e1.psi_pair), e1.E0)
    for psi in e1.psi_pair:
        assert apply_A(fac, psi).sup() < 1e-12


def test_identities_and_round_trip(e1):
    ws = wronskians(*e1.psi_pair)
    assert w23_identity_residual(ws).sup() < 1e-12
    fac = factorization(ws, e1.E0)
    assert max(identity_residuals(e1.pp, fac)) < 1e-12
    rt = potentials_from_wronskian(ws, e1.E0)
    assert (rt.u - e1.pp.u).sup() < 1e-12
    assert (rt.v - e1.pp.v).sup() < 1e-12
    assert rt.u_limit_left == pytest.approx(-5.0)
    assert hirota_residual(ws.W, e1.pp, e1.E0).sup() < 1e-10


def test_closed_form_completion_matches_pair():
    e2 = example(2, GRID)
    direct = wronskians(*e2.psi_pair)
    completed = wronskians_from_closed_form(direct.W, direct.W12)
    assert (completed.W23 - direct.W23).sup() < 1e-9 * direct.W23.sup()


def test_linear_dependence():
    s = sech(GRID.coordinate(4))
    with pytest.raises(LinearDependence):
        wronskians(s, 3.0 * s)


def test_sign_checks():
    x = GRID.coordinate(2)
    assert check_wronskian_positive(sech(x))
    assert check_wronskian_positive(-1.0 * sech(x))
    assert not check_wronskian_positive(tanh(x))
    with pytest.raises(WronskianVanishes):
        factor_from_wronskian(WronskianSet(tanh(x), tanh(x), tanh(x)))


def test_liouville_pair_has_unit_wronskian(e1):
    phi = liouville_pair(*e1.psi_pair)
    assert unit_wronskian_defect(*phi) < 1e-12
    # a reversed pair has W < 0 and is swapped back
    phi = liouville_pair(e1.psi_pair[1], e1.psi_pair[0])
    assert unit_wronskian_defect(*phi) < 1e-12


def test_example4_second_solution():
    e4 = example(4, GRID)
    ws = wronskians(*e4.psi_pair)
    assert check_wronskian_positive(ws)
    fac = factorization(ws, e4.E0)
    assert max(apply_A(fac, p).sup() for p in e4.psi_pair) < 1e-12


@settings(max_examples=25, deadline=None)
@given(
    a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(-3, 3), d=st.floats(-3, 3),
    which=st.sampled_from([1, 2, 5]),
)
def test_basis_change_invariance(a, b, c, d, which):
    det = a * d - b * c
    assume(abs(det) > 0.1)
    e = example(which, GRID, 2.0 if which == 5 else None)
    p, m = e.psi_pair
    ref = wronskians(p, m)
    new = wronskians(a * p + b * m, c * p + d * m)
    assert (new.W - det * ref.W).sup() < 1e-10 * abs(det) * ref.W.sup()
    # mixing the pair cancels terms much larger than W, so compare where W
    # is not buried in rounding
    core = trusted_window(ref.W, 1e-12)
    f0, g0 = factor_from_wronskian(ref)
    f1, g1 = factor_from_wronskian(new)
    r0 = potentials_from_wronskian(ref, e.E0)
    r1 = potentials_from_wronskian(new, e.E0)
    for x0, x1 in ((f0, f1), (g0, g1), (r0.u, r1.u), (r0.v, r1.v)):
        assert np.max(np.abs(x1.values - x0.values)[core]) < 1e-8


def test_trusted_window():
    W = sech(GRID.coordinate(0)) ** 2
    mask = trusted_window(W, 1e-6)
    assert mask[GRID.mid] and not mask[0]


def test_numerical_route_follyton():
    # FD derivatives of computed eigenvectors: a coarse diagnostic only
    e = follyton(1.0)
    ws, window, spec = ground_state_wronskians(e.pp)
    assert spec.ground_multiplicity == 2
    assert window.grid == ws.W.grid
    fac = factorization(ws, float(spec.eigenvalues[0]))
    assert max(identity_residuals(window, fac)) < 1e-3


def test_numerical_route_rejects_simple_ground_state():
    with pytest.raises(LinearDependence):
        ground_state_wronskians(example(4).pp)


@pytest.mark.parametrize("n,k", [(1, None), (2, None), (5, 1.0), (5, 2.0), (5, 3.0)])
def test_fd_round_trip_on_sampled_pair(n, k):
    e = example(n, k_param=k)
    p, m = (psi.plain() for psi in e.psi_pair)
    rt = potentials_from_pair(p, m, e.E0, "central_fd4")
    a = int(np.searchsorted(e.grid.x, rt.grid.x_min - 0.5 * e.grid.h))
    b = a + rt.grid.n
    assert rt.grid.n > 200
    assert np.max(np.abs(rt.u.values - e.pp.u.values[a:b])) < 1e-4
    assert np.max(np.abs(rt.v.values - e.pp.v.values[a:b])) < 1e-4


def test_pair_route_agrees_with_wronskian_route(e1):
    rt = potentials_from_pair(*e1.psi_pair, e1.E0, rel=1e-12)
    ref = potentials_from_wronskian(wronskians(*e1.psi_pair), e1.E0)
    a = int(np.searchsorted(GRID.x, rt.grid.x_min - 0.5 * GRID.h))
    assert np.max(np.abs(rt.v.values - ref.v.values[a:a + rt.grid.n])) < 1e-8


def test_pair_helpers_match_closed_forms():
    e = example(2, GRID)
    fac = factor_from_pair(*e.psi_pair, e.E0, rel=1e-10)
    a = int(np.searchsorted(GRID.x, fac.grid.x_min - 0.5 * GRID.h))
    assert np.max(np.abs(fac.f.values - e.factor.f.values[a:a + fac.grid.n])) < 1e-9
    assert fac.kappa == pytest.approx(2.0)
    assert hirota_residual_from_pair(*e.psi_pair, e.pp, e.E0).sup() < 1e-9
    shifted = type(e.pp)(e.pp.u, e.pp.v + 0.1)
    assert hirota_residual_from_pair(*e.psi_pair, shifted, e.E0).sup() > 0.1
