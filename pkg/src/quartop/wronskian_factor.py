"""Wronskians of a ground-state pair and everything that follows from them.

For an orthogonal pair (psi+, psi-) spanning the lowest eigenspace:

    W   = psi+ psi-'   - psi- psi+'
    W12 = psi+' psi-'' - psi+'' psi-'
    W23 = psi+'' psi-''' - psi+''' psi-''

and f = W'/W, g = -W12/W, u = (2 W12 - W'')/W,
v - E0 = (W12/W)^2 + (W12'/W)'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LinearDependence, WronskianVanishes
from .numgrid import DiffScheme, GridFunction, best_scheme, differentiate, restrict, sqrt
from .operator_core import FactorizationData, PotentialPair, spectrum

W_FLOOR = 1e-300


@dataclass(frozen=True)
class WronskianSet:
    W: GridFunction
    W12: GridFunction
    W23: GridFunction

    @property
    def grid(self):
        return self.W.grid

    def scaled(self, c: float) -> WronskianSet:
        return WronskianSet(c * self.W, c * self.W12, c * self.W23)


def wronskians(psi_plus: GridFunction, psi_minus: GridFunction, scheme: DiffScheme | str | None = None) -> WronskianSet:
    scheme = DiffScheme(scheme) if scheme else best_scheme(psi_plus, psi_minus, need=3)
    p = [psi_plus] + [differentiate(psi_plus, k, scheme) for k in (1, 2, 3)]
    m = [psi_minus] + [differentiate(psi_minus, k, scheme) for k in (1, 2, 3)]
    W = p[0] * m[1] - m[0] * p[1]
    scale = max(np.max(np.abs(p[0].values * m[1].values)), np.max(np.abs(m[0].values * p[1].values)))
    if W.sup() <= 1e-12 * scale or scale == 0.0:
        raise LinearDependence("the pair is linearly dependent (W vanishes identically)")
    W12 = p[1] * m[2] - p[2] * m[1]
    W23 = p[2] * m[3] - p[3] * m[2]
    return WronskianSet(W, W12, W23)


def wronskians_from_closed_form(W: GridFunction, W12: GridFunction) -> WronskianSet:
    """Complete (W, W12) to a set when the eigenfunctions themselves are unknown.

    Both ground states solve -psi'' + f psi' + g psi = 0, so psi'' and psi'''
    are combinations of (psi, psi'), which gives W23 = (g f' + g^2 - f g') W.
    """
    f, g = _fg(W, W12, best_scheme(W, W12, need=2))
    scheme = best_scheme(f, g, need=1)
    W23 = (g * differentiate(f, 1, scheme) + g * g - f * differentiate(g, 1, scheme)) * W
    return WronskianSet(W, W12, W23)


def check_wronskian_positive(ws: WronskianSet | GridFunction) -> bool:
    """True iff W stays away from zero and keeps one sign on the grid."""
    W = ws.W if isinstance(ws, WronskianSet) else ws
    vals = W.values
    if np.min(np.abs(vals)) <= W_FLOOR:
        return False
    return bool(np.all(vals > 0) or np.all(vals < 0))


def require_nonvanishing(W: GridFunction) -> None:
    if not check_wronskian_positive(W):
        raise WronskianVanishes("W has a zero or changes sign on the grid")


def _fg(W, W12, scheme):
    return differentiate(W, 1, scheme) / W, -1.0 * W12 / W


def factor_from_wronskian(ws: WronskianSet, scheme: DiffScheme | str | None = None) -> tuple[GridFunction, GridFunction]:
    """f = W'/W and g = -W12/W."""
    require_nonvanishing(ws.W)
    scheme = DiffScheme(scheme) if scheme else best_scheme(ws.W, need=1)
    return _fg(ws.W, ws.W12, scheme)


def factorization(ws: WronskianSet, E0: float, scheme: DiffScheme | str | None = None) -> FactorizationData:
    f, g = factor_from_wronskian(ws, scheme)
    return FactorizationData.with_kappa(f, g, E0)


def potentials_from_wronskian(
    ws: WronskianSet, E0: float, scheme: DiffScheme | str | None = None
) -> PotentialPair:
    """u = (2 W12 - W'')/W and v = E0 + (W12/W)^2 + (W12'/W)', integration constant 0."""
    require_nonvanishing(ws.W)
    W, W12 = ws.W, ws.W12
    scheme = DiffScheme(scheme) if scheme else best_scheme(W, W12, need=2)
    u = (2.0 * W12 - differentiate(W, 2, scheme)) / W
    r = W12 / W
    v = E0 + r * r + differentiate(differentiate(W12, 1, scheme) / W, 1, scheme)
    vals = (u.values, v.values)
    return PotentialPair(u, v, vals[0][0], vals[0][-1], vals[1][0], vals[1][-1])


def _window(W: GridFunction, rel: float) -> tuple[int, int]:
    idx = np.flatnonzero(trusted_window(W, rel))
    return int(idx[0]), int(idx[-1]) + 1


def potentials_from_pair(
    psi_plus: GridFunction,
    psi_minus: GridFunction,
    E0: float,
    scheme: DiffScheme | str | None = None,
    rel: float = 1e-6,
) -> PotentialPair:
    """(u, v) straight from the pair, on the window where |W| > rel * max|W|.

    W', W'', W12' and W12'' are expanded in derivatives of psi up to order 4,
    so sampled data go through one finite-difference pass instead of three.
    """
    scheme = DiffScheme(scheme) if scheme else best_scheme(psi_plus, psi_minus, need=4)
    p = [psi_plus.values] + [differentiate(psi_plus, k, scheme).values for k in (1, 2, 3, 4)]
    m = [psi_minus.values] + [differentiate(psi_minus, k, scheme).values for k in (1, 2, 3, 4)]
    W = p[0] * m[1] - m[0] * p[1]
    if not np.any(W):
        raise LinearDependence("the pair is linearly dependent (W vanishes identically)")
    a, b = _window(GridFunction(psi_plus.grid, W), rel)
    sub = restrict(psi_plus, a, b).grid
    p = [q[a:b] for q in p]
    m = [q[a:b] for q in m]
    W = W[a:b]
    W1 = p[0] * m[2] - m[0] * p[2]
    W12 = p[1] * m[2] - p[2] * m[1]
    W2 = W12 + p[0] * m[3] - m[0] * p[3]
    W12_1 = p[1] * m[3] - p[3] * m[1]
    W12_2 = p[2] * m[3] + p[1] * m[4] - p[4] * m[1] - p[3] * m[2]
    if not check_wronskian_positive(GridFunction(sub, W)):
        raise WronskianVanishes("W changes sign inside the window")
    u = (2.0 * W12 - W2) / W
    v = E0 + (W12 / W) ** 2 + (W12_2 * W - W12_1 * W1) / W**2
    return PotentialPair(GridFunction(sub, u), GridFunction(sub, v), u[0], u[-1], v[0], v[-1])


def factor_from_pair(
    psi_plus: GridFunction,
    psi_minus: GridFunction,
    E0: float,
    scheme: DiffScheme | str | None = None,
    rel: float = 1e-6,
) -> FactorizationData:
    """f = W'/W and g = -W12/W with W' = psi+ psi-'' - psi- psi+'', on the trusted window."""
    scheme = DiffScheme(scheme) if scheme else best_scheme(psi_plus, psi_minus, need=2)
    p = [psi_plus.values] + [differentiate(psi_plus, k, scheme).values for k in (1, 2)]
    m = [psi_minus.values] + [differentiate(psi_minus, k, scheme).values for k in (1, 2)]
    W = p[0] * m[1] - m[0] * p[1]
    if not np.any(W):
        raise LinearDependence("the pair is linearly dependent (W vanishes identically)")
    a, b = _window(GridFunction(psi_plus.grid, W), rel)
    sub = restrict(psi_plus, a, b).grid
    W = W[a:b]
    if not check_wronskian_positive(GridFunction(sub, W)):
        raise WronskianVanishes("W changes sign inside the window")
    W1 = (p[0] * m[2] - m[0] * p[2])[a:b]
    W12 = (p[1] * m[2] - p[2] * m[1])[a:b]
    return FactorizationData.with_kappa(GridFunction(sub, W1 / W), GridFunction(sub, -W12 / W), E0)


def w23_identity_residual(ws: WronskianSet, scheme: DiffScheme | str | None = None) -> GridFunction:
    """W W23 - (W12' W' - W12 W'' + W12^2), pointwise."""
    scheme = DiffScheme(scheme) if scheme else best_scheme(ws.W, ws.W12, need=2)
    W, W12 = ws.W, ws.W12
    return W * ws.W23 - (
        differentiate(W12, 1, scheme) * differentiate(W, 1, scheme)
        - W12 * differentiate(W, 2, scheme)
        + W12 * W12
    )


def hirota_residual(
    W: GridFunction, pp: PotentialPair, E0: float, scheme: DiffScheme | str | None = None
) -> GridFunction:
    """4(v - E0) - (W''/W + u)^2 - 2 (W'''/W + u' + u W'/W)'."""
    require_nonvanishing(W)
    scheme = DiffScheme(scheme) if scheme else best_scheme(W, pp.u, need=4)
    u = pp.u
    a = differentiate(W, 2, scheme) / W + u
    b = differentiate(W, 3, scheme) / W + differentiate(u, 1, scheme) + u * differentiate(W, 1, scheme) / W
    return 4.0 * (pp.v - E0) - a * a - 2.0 * differentiate(b, 1, scheme)


def hirota_residual_from_pair(
    psi_plus: GridFunction,
    psi_minus: GridFunction,
    pp: PotentialPair,
    E0: float,
    scheme: DiffScheme | str | None = None,
    rel: float = 1e-6,
) -> GridFunction:
    """Hirota-type residual with the derivatives of W expanded in those of the pair.

    Lives on the trusted window, like :func:`potentials_from_pair`.
    """
    scheme = DiffScheme(scheme) if scheme else best_scheme(psi_plus, psi_minus, pp.u, need=5)
    p = [psi_plus.values] + [differentiate(psi_plus, k, scheme).values for k in range(1, 6)]
    m = [psi_minus.values] + [differentiate(psi_minus, k, scheme).values for k in range(1, 6)]
    u = [pp.u.values] + [differentiate(pp.u, k, scheme).values for k in (1, 2)]
    W = p[0] * m[1] - m[0] * p[1]
    if not np.any(W):
        raise LinearDependence("the pair is linearly dependent (W vanishes identically)")
    a, b = _window(GridFunction(psi_plus.grid, W), rel)
    sub = restrict(psi_plus, a, b).grid
    p = [q[a:b] for q in p]
    m = [q[a:b] for q in m]
    u0, u1, u2 = (q[a:b] for q in u)
    W = W[a:b]
    if not check_wronskian_positive(GridFunction(sub, W)):
        raise WronskianVanishes("W changes sign inside the window")
    W1 = p[0] * m[2] - m[0] * p[2]
    W2 = p[1] * m[2] - p[2] * m[1] + p[0] * m[3] - m[0] * p[3]
    W3 = 2.0 * (p[1] * m[3] - p[3] * m[1]) + p[0] * m[4] - m[0] * p[4]
    W4 = (2.0 * (p[2] * m[3] - p[3] * m[2]) + 3.0 * (p[1] * m[4] - p[4] * m[1])
          + p[0] * m[5] - m[0] * p[5])
    r1 = W1 / W
    lead = W2 / W + u0
    # d/dx of W'''/W + u' + u W'/W
    tail = W4 / W - W3 * r1 / W + u2 + u1 * r1 + u0 * (W2 / W - r1 * r1)
    return GridFunction(sub, 4.0 * (pp.v.values[a:b] - E0) - lead * lead - 2.0 * tail)


def liouville_pair(
    psi_plus: GridFunction, psi_minus: GridFunction, W: GridFunction | None = None
) -> tuple[GridFunction, GridFunction]:
    """phi = psi / sqrt(W), a pair with unit Wronskian.

    A negative W is made positive by swapping the roles of the two functions.
    """
    if W is None:
        W = wronskians(psi_plus, psi_minus).W
    require_nonvanishing(W)
    if W.values[0] < 0:
        psi_plus, psi_minus, W = psi_minus, psi_plus, -1.0 * W
    root = sqrt(W)
    return psi_plus / root, psi_minus / root


def unit_wronskian_defect(phi_plus: GridFunction, phi_minus: GridFunction, scheme: DiffScheme | str | None = None) -> float:
    scheme = DiffScheme(scheme) if scheme else best_scheme(phi_plus, phi_minus, need=1)
    w = phi_plus * differentiate(phi_minus, 1, scheme) - differentiate(phi_plus, 1, scheme) * phi_minus
    return float(np.max(np.abs(w.values - 1.0)))


def trusted_window(W: GridFunction, rel: float = 1e-8) -> np.ndarray:
    """Mask where |W| is large enough for quotients of sampled data to be meaningful."""
    a = np.abs(W.values)
    return a > rel * a.max()


def ground_state_wronskians(pp: PotentialPair, k: int = 4, rel: float = 1e-6):
    """Wronskians of the computed lowest eigenpair, on the window where they are reliable.

    Returns ``(ws, pp_window, spectrum)``; ``ws`` and ``pp_window`` live on the
    sub-grid where |W| exceeds ``rel`` times its peak.  Derivatives of the
    sampled eigenfunctions use 4th-order finite differences.
    """
    spec = spectrum(pp, k)
    if spec.ground_multiplicity != 2:
        raise LinearDependence(
            f"lowest eigenvalue has multiplicity {spec.ground_multiplicity}, need a degenerate pair"
        )
    p, m = spec.eigenfunctions[0], spec.eigenfunctions[1]
    full = wronskians(p, m, DiffScheme.CENTRAL_FD4)
    idx = np.flatnonzero(trusted_window(full.W, rel))
    a, b = idx[0], idx[-1] + 1
    cut = lambda gf: restrict(gf, a, b)  # noqa: E731
    ws = WronskianSet(cut(full.W), cut(full.W12), cut(full.W23))
    window = PotentialPair(cut(pp.u), cut(pp.v), pp.u_limit_left, pp.u_limit_right, pp.v_limit_left, pp.v_limit_right)
    return ws, window, spec
