import numpy as np
import pytest

from quartop.catalog import (
    ALL_ENTRIES,
    by_name,
    chi,
    chi_identity_residuals,
    entry_to_dict,
    example,
    follyton,
)
from quartop.errors import InvalidKappa, MissingK, UnknownExample
from quartop.numgrid import Grid, decays
from quartop.operator_core import apply_A
from quartop.problem import ProblemSpec, build_problem
from quartop.verify import entry_wronskians
from quartop.wronskian_factor import factorization

SMALL = Grid(-40.0, 40.0, 1601)


def test_chi():
    assert chi(0.0) == pytest.approx(1 / (np.sqrt(2) + 1))
    assert chi(0.0) == pytest.approx(0.414214, abs=1e-6)
    assert chi_identity_residuals() < 1e-12


def test_example1_fixture():
    e = example(1, SMALL)
    S = 1 / np.cosh(SMALL.x)
    assert np.allclose(e.pp.u.values, -5 + 12 * S**2)
    assert np.allclose(e.pp.v.values, -6 * S**2)
    assert e.E0 == -4.0
    assert np.allclose(e.psi_pair[0].values, S**2)
    assert np.allclose(e.factor.f.values, -3 * np.tanh(SMALL.x))


@pytest.mark.parametrize("n,k", [(1, None), (2, None), (4, None), (5, 1.0), (5, 2.0), (5, 3.0)])
def test_pairs_are_annihilated(n, k):
    e = example(n, SMALL, k)
    fac = e.factor
    if fac is None:
        fac = factorization(entry_wronskians(e), e.E0)
    for psi in e.psi_pair:
        assert psi.order >= 3
        assert apply_A(fac, psi).sup() < 1e-6


def test_example3_has_no_pair():
    e = example(3, SMALL)
    assert e.psi_pair is None and e.wronskian_closed_form is not None


def test_example4_is_simple():
    e = example(4, SMALL)
    assert not e.degenerate and e.E0 == 0.0
    assert decays(e.psi_pair[0]) and not decays(e.psi_pair[1])


def test_follyton_fixture():
    e = follyton(0.5, SMALL)
    assert e.E0 == pytest.approx(-0.25)
    assert e.expected_Q == pytest.approx(2**14 / 7 * 0.5**7)
    # kappa = 1/2 written with chi(x): u = 4 (sqrt2 chi - chi^2)
    c = chi(SMALL.x)
    assert np.allclose(e.pp.u.values, 4 * (np.sqrt(2) * c - c**2), atol=1e-14)


def test_errors():
    with pytest.raises(UnknownExample):
        example(6)
    with pytest.raises(MissingK):
        example(5)
    with pytest.raises(InvalidKappa):
        follyton(0.0)
    with pytest.raises(UnknownExample):
        by_name("nonsense")


@pytest.mark.parametrize("name,expected", [
    ("1", "example1"),
    ("example2", "example2"),
    ("5:2", "example5(k=2)"),
    ("follyton:0.5", "follyton(kappa=0.5)"),
])
def test_by_name(name, expected):
    assert by_name(name, SMALL).name == expected


def test_entry_to_dict_round_trips_through_problem_spec():
    e = example(2, SMALL)
    spec = ProblemSpec.model_validate(entry_to_dict(e))
    pp = build_problem(spec)
    assert np.array_equal(pp.u.values, e.pp.u.values)
    assert pp.decaying


def test_all_entries_listed():
    assert len(ALL_ENTRIES) == 9
