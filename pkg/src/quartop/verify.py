"""Invariant suite for catalog entries."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .catalog import CatalogEntry
from .darboux import addition_residual, remove_eigenvalue, removal_isospectrality_check
from .errors import QuartopError
from .conserved_flow import q_functional
from .numgrid import DiffScheme, decays
from .operator_core import apply_A, identity_residuals, spectrum
from .wronskian_factor import (
    check_wronskian_positive,
    factorization,
    hirota_residual,
    liouville_pair,
    potentials_from_pair,
    potentials_from_wronskian,
    unit_wronskian_defect,
    w23_identity_residual,
    wronskians,
    wronskians_from_closed_form,
)

SPECTRAL_REL_TOL = 1e-3
IDENTITY_TOL = 1e-6
W23_TOL = 1e-8
TILDE_TOL = 1e-5
FREE_TILDE_TOL = 1e-6
Q_REL_TOL = 1e-3
LIOUVILLE_TOL = 1e-8
FD_ROUND_TRIP_TOL = 1e-4


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    tol: float | None = None
    detail: str = ""

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        val = "" if self.value is None else f" value={self.value:.3e}"
        tol = "" if self.tol is None else f" tol={self.tol:.1e}"
        extra = f" {self.detail}" if self.detail else ""
        return f"[{mark}] {self.name}{val}{tol}{extra}"


def _le(name, value, tol, detail=""):
    return Check(name, bool(value <= tol), float(value), tol, detail)


def entry_wronskians(entry: CatalogEntry):
    if entry.psi_pair is not None:
        return wronskians(*entry.psi_pair)
    return wronskians_from_closed_form(*entry.wronskian_closed_form)


def fd_round_trip(entry: CatalogEntry) -> float:
    """Round trip from plain samples of the pair, finite differences only."""
    p, m = (psi.plain() for psi in entry.psi_pair)
    rt = potentials_from_pair(p, m, entry.E0, DiffScheme.CENTRAL_FD4)
    grid = entry.grid
    a = int(np.searchsorted(grid.x, rt.grid.x_min - 0.5 * grid.h))
    b = a + rt.grid.n
    return float(max(np.max(np.abs(rt.u.values - entry.pp.u.values[a:b])),
                     np.max(np.abs(rt.v.values - entry.pp.v.values[a:b]))))


def verify_entry(entry: CatalogEntry, k: int = 4) -> list[Check]:
    checks: list[Check] = []
    scale = max(1.0, abs(entry.E0))

    spec = spectrum(entry.pp, k)
    lam = spec.eigenvalues
    want = 2 if entry.degenerate else 1
    err = float(np.max(np.abs(lam[:want] - entry.E0)))
    checks.append(
        Check(
            "spectrum.ground_state",
            err <= SPECTRAL_REL_TOL * scale and spec.ground_multiplicity == want,
            err,
            SPECTRAL_REL_TOL * scale,
            f"eigenvalues={np.array2string(lam, precision=6)} multiplicity={spec.ground_multiplicity}",
        )
    )

    ws = entry_wronskians(entry)
    checks.append(Check("wronskian.sign_constant", check_wronskian_positive(ws)))
    if entry.wronskian_closed_form is not None:
        checks.append(_le("wronskian.closed_form", (ws.W - entry.wronskian_closed_form[0]).sup(), IDENTITY_TOL))
    checks.append(_le("wronskian.w23_identity", w23_identity_residual(ws).sup(), W23_TOL))

    fac = factorization(ws, entry.E0)
    r1, r2 = identity_residuals(entry.pp, fac)
    checks.append(_le("factor.ode_identities", max(r1, r2), IDENTITY_TOL))
    if entry.factor is not None:
        diff = max((fac.f - entry.factor.f).sup(), (fac.g - entry.factor.g).sup())
        checks.append(_le("factor.matches_closed_form", diff, IDENTITY_TOL))
    if entry.psi_pair is not None:
        checks.append(_le("factor.annihilates_pair", max(apply_A(fac, p).sup() for p in entry.psi_pair), IDENTITY_TOL))

    rt = potentials_from_wronskian(ws, entry.E0)
    checks.append(_le("wronskian.round_trip", max((rt.u - entry.pp.u).sup(), (rt.v - entry.pp.v).sup()), IDENTITY_TOL))
    if entry.psi_pair is not None and entry.degenerate:
        checks.append(_le("wronskian.round_trip_fd", fd_round_trip(entry), FD_ROUND_TRIP_TOL))
    checks.append(_le("wronskian.hirota", hirota_residual(ws.W, entry.pp, entry.E0).sup(), IDENTITY_TOL))

    if entry.psi_pair is not None and entry.degenerate:
        phi = liouville_pair(*entry.psi_pair, ws.W)
        checks.append(_le("wronskian.liouville_unit", unit_wronskian_defect(*phi), LIOUVILLE_TOL))

    for i in entry.non_normalizable:
        p = entry.psi_pair[i]
        checks.append(Check(f"pair.non_normalizable[{i}]", not decays(p), detail="second solution of A psi = 0 is not in L2"))

    try:
        tilde = remove_eigenvalue(entry.pp, fac)
    except QuartopError as exc:
        checks.append(Check("removal.apply", False, detail=str(exc)))
        return checks
    if entry.expected_tilde is not None:
        diff = max((tilde.u - entry.expected_tilde.u).sup(), (tilde.v - entry.expected_tilde.v).sup())
        free = entry.expected_tilde.u.sup() + entry.expected_tilde.v.sup() == 0.0
        if free:
            checks.append(_le("removal.free_conjugate", tilde.u.sup() + tilde.v.sup(), FREE_TILDE_TOL))
        else:
            checks.append(_le("removal.closed_form", diff, TILDE_TOL))
        # read backwards: adding the level to the removed operator restores W
        add = addition_residual(ws.W, entry.expected_tilde, fac.kappa).sup()
        checks.append(_le("addition.equation", add, IDENTITY_TOL))
    if entry.degenerate:
        rep = removal_isospectrality_check(entry.pp, tilde, entry.E0)
        checks.append(
            Check(
                "removal.isospectral",
                rep.ok,
                rep.margin,
                rep.required_margin,
                f"status={rep.status} tilde={np.array2string(rep.eigenvalues_tilde[:4], precision=6)}",
            )
        )

    if entry.expected_Q is not None and entry.pp.decaying:
        q = q_functional(entry.pp)
        checks.append(_le("q.value", abs(q / entry.expected_Q - 1.0), Q_REL_TOL, f"Q={q:.10g}"))
    if entry.expected_Q_tilde is not None and entry.expected_tilde is not None:
        qt = q_functional(entry.expected_tilde)
        checks.append(_le("q.tilde_value", abs(qt / entry.expected_Q_tilde - 1.0), Q_REL_TOL, f"Q~={qt:.10g}"))
    return checks


def report_dict(entry: CatalogEntry, checks: list[Check]) -> dict:
    return {
        "entry": entry.name,
        "E0": entry.E0,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
    }
