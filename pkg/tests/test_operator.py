import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartop.catalog import example
from quartop.errors import GridMismatch
from quartop.numgrid import Grid, GridFunction, exp, inner, sech
from quartop.operator_core import (
    FactorizationData,
    PotentialPair,
    apply_A,
    apply_A_star,
    assemble_L,
    default_probes,
    factorization_residual,
    identity_residuals,
    orthonormality_defect,
    spectrum,
)

# clamped-clamped beam: cos(b) cosh(b) = 1
BEAM_ROOTS = (4.730040744862704, 7.853204624095838, 10.995607838001671)


def _zero_pair(grid, v=0.0):
    z = GridFunction(grid, np.zeros(grid.n))
    return PotentialPair(z, GridFunction(grid, np.full(grid.n, v)), v_limit_left=v, v_limit_right=v)


def test_clamped_beam_oracle():
    # the zero extension puts the clamp a fraction of h outside the box, so
    # box-bound modes converge at first order; decaying states never feel it
    exact = np.array(BEAM_ROOTS) ** 4
    errs = []
    for n in (401, 801):
        lam = spectrum(_zero_pair(Grid(0.0, 1.0, n)), 3).eigenvalues
        errs.append(np.max(np.abs(lam / exact - 1)))
    assert errs[1] < 5e-3
    assert 1.8 < errs[0] / errs[1] < 2.2


def test_constant_v_shifts_spectrum():
    grid = Grid(0.0, 1.0, 401)
    a = spectrum(_zero_pair(grid), 3).eigenvalues
    b = spectrum(_zero_pair(grid, 7.5), 3).eigenvalues
    # rounding is eps times the matrix norm, about h^-4
    assert np.allclose(b - a, 7.5, atol=1e-4)


def test_positive_u_lowers_energy():
    # <psi, d u d psi> = -int u psi'^2, so u > 0 pushes levels down
    grid = Grid(0.0, 1.0, 401)
    base = spectrum(_zero_pair(grid), 1).eigenvalues[0]
    u = GridFunction(grid, np.full(grid.n, 50.0))
    pp = PotentialPair(u, GridFunction(grid, np.zeros(grid.n)), 50.0, 50.0)
    assert spectrum(pp, 1).eigenvalues[0] < base - 10.0


def test_matrix_is_symmetric_banded():
    sub = Grid(-15.0, 15.0, 301)

    m = assemble_L(example(2, sub).pp)
    dense = m.to_dense()
    assert m.bandwidth == 4
    assert np.array_equal(dense, dense.T)
    x = np.random.default_rng(0).standard_normal(m.size)
    assert np.allclose(m.matvec(x), dense @ x)


def test_spectrum_example2(ex2):
    res = spectrum(ex2.pp, 6)
    lam = res.eigenvalues
    assert res.ground_multiplicity == 2
    assert np.allclose(lam[:2], -64.0, rtol=1e-3)
    # the remaining bound states coincide with those of the removed operator
    assert lam[2] > -64.0 * (1 - 1e-3)
    assert orthonormality_defect(res) < 1e-6


def test_gauge_is_deterministic(ex1):
    a = spectrum(ex1.pp, 2)
    b = spectrum(ex1.pp, 2)
    for p, q in zip(a.eigenfunctions, b.eigenfunctions):
        assert np.array_equal(p.values, q.values)
    mid = ex1.grid.mid
    assert a.eigenfunctions[0].values[mid] > 0


def test_eigenfunctions_span_known_pair(ex1):
    res = spectrum(ex1.pp, 2)
    basis = np.stack([p.values for p in res.eigenfunctions], axis=1)
    for psi in ex1.psi_pair:
        coef, *_ = np.linalg.lstsq(basis, psi.values, rcond=None)
        assert np.max(np.abs(basis @ coef - psi.values)) < 1e-4 * psi.sup()


def test_factorization_on_probes(ex2):
    assert factorization_residual(ex2.pp, ex2.factor) < 1e-8


def test_identity_residuals_catch_wrong_E0(ex1):
    wrong = FactorizationData(ex1.factor.f, ex1.factor.g, ex1.E0 - 1.0)
    r1, r2 = identity_residuals(ex1.pp, wrong)
    assert r1 < 1e-12 and r2 == pytest.approx(1.0, abs=1e-10)


def test_factorization_data_validation(ex1):
    with pytest.raises(ValueError):
        FactorizationData(ex1.factor.f, ex1.factor.g, 1.0)
    other = GridFunction(Grid(0.0, 1.0, 32), np.zeros(32))
    with pytest.raises(GridMismatch):
        FactorizationData(ex1.factor.f, other, -1.0)
    assert FactorizationData.with_kappa(ex1.factor.f, ex1.factor.g, -4.0).kappa == pytest.approx(1.0)


def test_potential_pair_limits(ex1, ex2):
    assert not ex1.pp.decaying
    assert ex2.pp.decaying
    ex1.pp.check_limits()
    assert ex1.pp.continuum_threshold() == 0.0
    with pytest.raises(ValueError):
        PotentialPair(ex2.pp.u, ex2.pp.v, 1.0).check_limits()


@settings(max_examples=20, deadline=None)
@given(c1=st.floats(-8, 8), c2=st.floats(-8, 8), w=st.floats(0.5, 2.0))
def test_A_star_is_adjoint_of_A(ex2, c1, c2, w):
    grid = Grid(-20.0, 20.0, 801)

    fac = example(2, grid).factor
    x = grid.coordinate(8)
    phi = exp(-1.0 * ((x - c1) * (x - c1)) / (w * w))
    psi = sech(x - c2) ** 2
    lhs = inner(apply_A(fac, phi), psi)
    rhs = inner(phi, apply_A_star(fac, psi))
    assert lhs == pytest.approx(rhs, abs=1e-8 * (1 + abs(lhs)))


def test_default_probes_have_jets():
    probes = default_probes(Grid(-10.0, 10.0, 201))
    assert len(probes) == 3 and all(p.order >= 4 for p in probes)
