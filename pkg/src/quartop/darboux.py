"""Removal and addition of a doubly degenerate eigenvalue."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, IdentityViolation, InvalidKappa
from .numgrid import DiffScheme, Grid, GridFunction, best_scheme, differentiate
from .catalog import follyton_wronskian
from .operator_core import FactorizationData, PotentialPair, identity_residuals, spectrum
from .wronskian_factor import require_nonvanishing

IDENTITY_TOL = 1e-4


def remove_eigenvalue(
    pp: PotentialPair, fac: FactorizationData, scheme: DiffScheme | str | None = None, tol: float = IDENTITY_TOL
) -> PotentialPair:
    """Coefficients of A A* + E0: u + 4f' and v + 2 f g' - f f'' + f'''."""
    if pp.grid != fac.grid:
        raise GridMismatch("potentials and factor live on different grids")
    scheme = DiffScheme(scheme) if scheme else best_scheme(fac.f, fac.g, need=3)
    worst = max(identity_residuals(pp, fac, scheme))
    if worst > tol:
        raise IdentityViolation(f"factorization identities violated by {worst:.3g}")
    f, g = fac.f, fac.g
    f1, f2, f3 = (differentiate(f, k, scheme) for k in (1, 2, 3))
    u_t = pp.u + 4.0 * f1
    v_t = pp.v + 2.0 * f * differentiate(g, 1, scheme) - f * f2 + f3
    # f' and its derivatives vanish at infinity, so the limits carry over
    return PotentialPair(u_t, v_t, pp.u_limit_left, pp.u_limit_right, pp.v_limit_left, pp.v_limit_right)


@dataclass
class IsospectralityReport:
    eigenvalues: np.ndarray
    eigenvalues_tilde: np.ndarray
    E0: float
    threshold: float
    matched: bool
    removed: bool
    margin: float
    required_margin: float
    unmatched: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.matched and self.removed

    @property
    def status(self) -> str:
        if not self.removed:
            return "not removed"
        return "ok" if self.matched else "spectrum mismatch"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "E0": self.E0,
            "continuum_threshold": self.threshold,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "eigenvalues_tilde": [float(x) for x in self.eigenvalues_tilde],
            "matched": self.matched,
            "removed": self.removed,
            "margin": self.margin,
            "required_margin": self.required_margin,
            "unmatched": [float(x) for x in self.unmatched],
        }


def removal_isospectrality_check(
    pp: PotentialPair, pp_tilde: PotentialPair, E0: float, k: int = 8, rel_tol: float = 1e-3
) -> IsospectralityReport:
    """Compare the low spectra of L and of the operator with E0 removed.

    Bound states of the new operator must reappear in the old spectrum, and
    nothing may sit near E0 (closer than half the gap from E0 to the next
    eigenvalue of L).
    """
    if pp.grid != pp_tilde.grid:
        raise GridMismatch("both operators must share a grid")
    lam = spectrum(pp, k + 2).eigenvalues
    lam_t = spectrum(pp_tilde, k).eigenvalues
    scale = max(1.0, abs(E0))
    threshold = min(pp.continuum_threshold(), pp_tilde.continuum_threshold())
    above = lam[np.abs(lam - E0) > 1e-3 * scale]
    gap = float(above[0] - E0) if len(above) else float("inf")
    margin = float(np.min(np.abs(lam_t - E0)))
    removed = margin > 0.5 * abs(gap)
    # states within the tolerance of the threshold are box artefacts, not bound states
    bound = lam_t[lam_t < threshold - rel_tol * scale]
    unmatched = [
        float(b) for b in bound if np.min(np.abs(lam - b)) > rel_tol * max(1.0, abs(b))
    ]
    return IsospectralityReport(
        eigenvalues=lam,
        eigenvalues_tilde=lam_t,
        E0=E0,
        threshold=threshold,
        matched=not unmatched,
        removed=bool(removed),
        margin=margin,
        required_margin=0.5 * abs(gap),
        unmatched=unmatched,
    )


def g_from_f(f: GridFunction, u: GridFunction, scheme: DiffScheme | str | None = None) -> GridFunction:
    """g = (3 f' - f^2 - u) / 2, where ``u`` belongs to the background A A* + E0."""
    if f.grid != u.grid:
        raise GridMismatch("f and u live on different grids")
    scheme = DiffScheme(scheme) if scheme else best_scheme(f, need=1)
    return 0.5 * (3.0 * differentiate(f, 1, scheme) - f * f - u)


def addition_residual(
    W: GridFunction, pp: PotentialPair, kappa: float, scheme: DiffScheme | str | None = None
) -> GridFunction:
    """Residual of the equation satisfied by W = 1 / W_hat when a level -4 kappa^4 is added."""
    require_nonvanishing(W)
    scheme = DiffScheme(scheme) if scheme else best_scheme(W, pp.u, need=4)
    d = [W] + [differentiate(W, k, scheme) for k in (1, 2, 3, 4)]
    u = pp.u
    u1, u2 = differentiate(u, 1, scheme), differentiate(u, 2, scheme)
    r1 = d[1] / W
    lhs = (
        40.0 * r1**4
        - 2.0 * d[4] / W
        + 14.0 * d[3] * d[1] / W**2
        + 13.0 * (d[2] / W) ** 2
        - 64.0 * d[2] * d[1] ** 2 / W**3
        + 2.0 * u2
        + u * u
        - 2.0 * u1 * r1
        + 2.0 * u * (r1 * r1 - 2.0 * differentiate(r1, 1, scheme))
    )
    return lhs - 16.0 * kappa**4 - 4.0 * pp.v


def addition_residual_f(
    f: GridFunction, pp: PotentialPair, kappa: float, scheme: DiffScheme | str | None = None
) -> GridFunction:
    """The same equation written for f = W'/W."""
    scheme = DiffScheme(scheme) if scheme else best_scheme(f, pp.u, need=3)
    f1, f2, f3 = (differentiate(f, k, scheme) for k in (1, 2, 3))
    u = pp.u
    lhs = (
        -2.0 * f3
        + 6.0 * f * f2
        + 7.0 * f1 * f1
        - 8.0 * f1 * f * f
        + f**4
        + 2.0 * u * (f * f - 2.0 * f1)
        - 2.0 * differentiate(u, 1, scheme) * f
        + u * u
        + 2.0 * differentiate(u, 2, scheme)
    )
    return lhs - 4.0 * pp.v - 16.0 * kappa**4


def add_eigenvalue_free(kappa: float, grid: Grid) -> tuple[PotentialPair, FactorizationData]:
    """Add the level -4 kappa^4 (multiplicity 2) to d^4.

    W_hat = sqrt2 + cosh(2 kappa x) solves the u = v = 0 equation; its reciprocal
    is the Wronskian of the new ground states and f = W'/W = -W_hat'/W_hat.
    """
    if not kappa > 0:
        raise InvalidKappa(f"kappa must be positive, got {kappa}")
    W = follyton_wronskian(kappa, grid)
    f = differentiate(W, 1, DiffScheme.ANALYTIC) / W
    zero = 0.0 * W
    g = g_from_f(f, zero, DiffScheme.ANALYTIC)
    E0 = -4.0 * kappa**4
    s = DiffScheme.ANALYTIC
    u = -1.0 * (differentiate(f, 1, s) + f * f + 2.0 * g)
    v = E0 + g * g - differentiate(f * g + differentiate(g, 1, s), 1, s)
    fac = FactorizationData(f, g, E0, float(kappa), origin="addition")
    return PotentialPair(u, v), fac
