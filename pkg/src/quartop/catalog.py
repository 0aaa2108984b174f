"""Exactly solvable fixtures with analytic derivatives.

``example(1..5)`` are the sech-type operators with a known ground-state pair
(or, for number 3, a known Wronskian), ``follyton(kappa)`` the reflectionless
family conjugate to d^4.  Every closed form is assembled from jets so its
derivatives are exact to ``JET_ORDER``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidKappa, MissingK, UnknownExample
from .numgrid import Grid, GridFunction, cos, cosh, default_grid, sech, sin, sinh, tanh
from .operator_core import FactorizationData, PotentialPair

JET_ORDER = 10
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    pp: PotentialPair
    E0: float
    kappa: float
    psi_pair: tuple[GridFunction, GridFunction] | None = None
    wronskian_closed_form: tuple[GridFunction, GridFunction] | None = None
    expected_tilde: PotentialPair | None = None
    expected_Q: float | None = None
    expected_Q_tilde: float | None = None
    degenerate: bool = True
    factor: FactorizationData | None = None
    # psi_pair members that are solutions of A psi = 0 but not in L^2
    non_normalizable: tuple[int, ...] = ()

    @property
    def grid(self) -> Grid:
        return self.pp.grid


def _pair(u, v, u_lim=(0.0, 0.0), v_lim=(0.0, 0.0)) -> PotentialPair:
    pp = PotentialPair(u, v, u_lim[0], u_lim[1], v_lim[0], v_lim[1])
    pp.check_limits()
    return pp


def _example1(x):
    S = sech(x)
    pp = _pair(-5.0 + 12.0 * S**2, -6.0 * S**2, (-5.0, -5.0))
    E0 = -4.0
    return CatalogEntry(
        name="example1",
        pp=pp,
        E0=E0,
        kappa=1.0,
        psi_pair=(S**2, sinh(x) * S**2),
        wronskian_closed_form=(S**3, None),
        expected_tilde=_pair(x * 0.0 - 5.0, x * 0.0, (-5.0, -5.0)),
        factor=FactorizationData(-3.0 * tanh(x), x * 0.0 - 2.0, E0, 1.0),
    )


def _example2(x):
    S = sech(x)
    E0 = -64.0
    return CatalogEntry(
        name="example2",
        pp=_pair(16.0 * S**2, 40.0 * S**4 - 88.0 * S**2),
        E0=E0,
        kappa=2.0,
        psi_pair=(cos(2.0 * x) * S**2, sin(2.0 * x) * S**2),
        wronskian_closed_form=(2.0 * S**4, None),
        expected_tilde=_pair(x * 0.0, -40.0 * S**2),
        expected_Q=2.0**10 / 7.0 * 4.0 * 687.0,
        expected_Q_tilde=2.0**10 * 100.0,
        factor=FactorizationData(-4.0 * tanh(x), -8.0 + 2.0 * S**2, E0, 2.0),
    )


def _example3(x):
    S2 = sech(x) ** 2
    E0 = -4.0
    return CatalogEntry(
        name="example3",
        pp=_pair(x * 0.0, 45.0 * S2 * S2 - 40.0 * S2),
        E0=E0,
        kappa=1.0,
        wronskian_closed_form=(S2, 2.0 * S2 - 3.0 * S2 * S2),
        expected_tilde=_pair(-8.0 * S2, 25.0 * S2 * S2 - 16.0 * S2),
        factor=FactorizationData(-2.0 * tanh(x), -2.0 + 3.0 * S2, E0, 1.0),
    )


def _example4(x):
    S = sech(x)
    return CatalogEntry(
        name="example4",
        pp=_pair(-1.0 + 4.0 * S**2, 6.0 * S**2 - 8.0 * S**4, (-1.0, -1.0)),
        E0=0.0,
        kappa=0.0,
        psi_pair=(S, tanh(x)),
        wronskian_closed_form=(S, None),
        expected_tilde=_pair(x * 0.0 - 1.0, x * 0.0, (-1.0, -1.0)),
        degenerate=False,
        factor=FactorizationData(-1.0 * tanh(x), -1.0 * S**2, 0.0, 0.0),
        non_normalizable=(1,),
    )


def _example5(x, k):
    Sk2 = sech(x / k) ** 2
    u = 2.0 * (1.0 + 2.0 / k) * Sk2
    v = -4.0 * (1.0 + 1.0 / k - 1.0 / k**3) * Sk2 + (1.0 - 1.0 / k) * (1.0 + 5.0 / k + 6.0 / k**2) * Sk2 * Sk2
    envelope = sech(x / k) ** k
    return CatalogEntry(
        name=f"example5(k={k:g})",
        pp=_pair(u, v),
        E0=-4.0,
        kappa=1.0,
        # real and imaginary parts of exp(+-ix) sech^k(x/k)
        psi_pair=(cos(x) * envelope, sin(x) * envelope),
        wronskian_closed_form=(envelope * envelope, None),
        factor=None,
    )


def example(n: int, grid: Grid | None = None, k_param: float | None = None) -> CatalogEntry:
    grid = grid or default_grid()
    x = grid.coordinate(JET_ORDER)
    if n == 5:
        if k_param is None:
            raise MissingK("example 5 needs k > 0")
        if not k_param > 0:
            raise MissingK(f"example 5 needs k > 0, got {k_param}")
        return _example5(x, float(k_param))
    builders = {1: _example1, 2: _example2, 3: _example3, 4: _example4}
    if n not in builders:
        raise UnknownExample(f"no example {n}; choose 1..5")
    return builders[n](x)


def follyton_wronskian(kappa: float, grid: Grid) -> GridFunction:
    """W = 1/(sqrt2 + cosh(2 kappa x))."""
    x = grid.coordinate(JET_ORDER)
    return 1.0 / (SQRT2 + cosh(2.0 * kappa * x))


def follyton(kappa: float, grid: Grid | None = None) -> CatalogEntry:
    if not kappa > 0:
        raise InvalidKappa(f"kappa must be positive, got {kappa}")
    grid = grid or default_grid()
    x = grid.coordinate(JET_ORDER)
    W = follyton_wronskian(kappa, grid)
    u = 16.0 * kappa**2 * (SQRT2 * W - W * W)
    v = 16.0 * kappa**4 * (SQRT2 * W - 12.0 * W**2 + 16.0 * SQRT2 * W**3 - 8.0 * W**4)
    g = -2.0 * kappa**2 * (1.0 + SQRT2 * W - 2.0 * W * W)
    f = -2.0 * kappa * sinh(2.0 * kappa * x) * W
    E0 = -4.0 * kappa**4
    zero = x * 0.0
    return CatalogEntry(
        name=f"follyton(kappa={kappa:g})",
        pp=_pair(u, v),
        E0=E0,
        kappa=float(kappa),
        wronskian_closed_form=(W, -1.0 * g * W),
        expected_tilde=_pair(zero, zero),
        expected_Q=2.0**14 / 7.0 * kappa**7,
        factor=FactorizationData(f, g, E0, float(kappa)),
    )


def chi(x):
    """1/(sqrt2 + cosh x)."""
    return 1.0 / (SQRT2 + np.cosh(x))


def chi_identity_residuals(grid: Grid | None = None) -> float:
    """Largest violation of the four polynomial identities obeyed by chi."""
    grid = grid or Grid(-20.0, 20.0, 2001)
    c = 1.0 / (SQRT2 + cosh(grid.coordinate(4)))
    c0, c1, c2, c3, c4 = (c.derivative(k) for k in range(5))
    res = [
        c2 - c0 * (1 - 3 * SQRT2 * c0 + 2 * c0**2),
        c1**2 - c0**2 * (1 - 2 * SQRT2 * c0 + c0**2),
        c3 - c1 * (1 - 6 * SQRT2 * c0 + 6 * c0**2),
        c4 - c0 * (1 - 15 * SQRT2 * c0 + 80 * c0**2 - 60 * SQRT2 * c0**3 + 24 * c0**4),
    ]
    return float(max(np.max(np.abs(r)) for r in res))


ALL_ENTRIES = (
    ("example", 1, None),
    ("example", 2, None),
    ("example", 3, None),
    ("example", 4, None),
    ("example", 5, 1.0),
    ("example", 5, 2.0),
    ("example", 5, 3.0),
    ("follyton", 0.5, None),
    ("follyton", 1.0, None),
)


def by_name(name: str, grid: Grid | None = None) -> CatalogEntry:
    """Resolve ``1``, ``example2``, ``5:2`` / ``example5:2``, ``follyton:0.5``."""
    key = name.strip().lower()
    kind, _, param = key.partition(":")
    try:
        if kind.startswith("follyton"):
            return follyton(float(param) if param else 0.5, grid)
        if kind.startswith("example"):
            kind = kind[len("example"):]
        n = int(kind)
        return example(n, grid, float(param) if param else None)
    except ValueError as exc:
        if isinstance(exc, (MissingK, InvalidKappa)):
            raise
        raise UnknownExample(f"unknown catalog entry {name!r}") from exc


def all_entries(grid: Grid | None = None) -> list[CatalogEntry]:
    out = []
    for kind, a, b in ALL_ENTRIES:
        out.append(example(a, grid, b) if kind == "example" else follyton(a, grid))
    return out


def entry_to_dict(entry: CatalogEntry) -> dict:
    """Problem-spec JSON (sampled form) for an entry."""
    g = entry.grid
    return {
        "name": entry.name,
        "grid": {"x_min": g.x_min, "x_max": g.x_max, "n": g.n, "periodic": g.periodic},
        "u": {"kind": "samples", "values": entry.pp.u.values.tolist(),
              "limits": [entry.pp.u_limit_left, entry.pp.u_limit_right]},
        "v": {"kind": "samples", "values": entry.pp.v.values.tolist(),
              "limits": [entry.pp.v_limit_left, entry.pp.v_limit_right]},
        "E0": entry.E0,
        "kappa": entry.kappa,
    }
