"""Command-line front end.

    quartop spectrum  --spec P.json --k 4 --out psi.csv
    quartop factorize --example 2 --out fac.json
    quartop remove    --example 3 --out tilde.json
    quartop qval      --example 2
    quartop qval      --delta --kappa 1
    quartop evolve    --initial follyton:0.5 --t-end 0.5 --out run/
    quartop verify    --example all

Exit status: 0 on success, 1 on verification or numerical failure, 2 on bad
input.  Errors are reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import all_entries, by_name, follyton
from .darboux import remove_eigenvalue, removal_isospectrality_check
from .errors import InvalidKappa, InvalidRange, MissingK, QuartopError, TooFewPoints, UnknownExample
from .conserved_flow import (
    delta_q_measured,
    delta_q_normalized,
    delta_q_predicted,
    q_functional,
    run_follyton,
    write_snapshots_csv,
    write_summary_json,
)
from .numgrid import DiffScheme, Grid
from .operator_core import PotentialPair, identity_residuals, orthonormality_defect, spectrum
from .problem import SpecError, build_problem, load_problem
from .verify import entry_wronskians, report_dict, verify_entry
from .wronskian_factor import (
    factor_from_pair,
    factorization,
    ground_state_wronskians,
    hirota_residual,
    hirota_residual_from_pair,
    potentials_from_pair,
    w23_identity_residual,
)

# bad input of any kind maps to exit status 2
INPUT_ERRORS = (SpecError, UnknownExample, MissingK, InvalidKappa, InvalidRange, TooFewPoints)


class UsageError(Exception):
    code = "bad-arguments"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj, path: str | Path | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _floats(arr) -> list[float]:
    return [float(a) for a in np.asarray(arr)]


def _parse_grid(text: str) -> Grid:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--grid wants 'xmin,xmax,n', got {text!r}")
    try:
        return Grid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        if isinstance(exc, QuartopError):
            raise
        raise UsageError(f"--grid wants 'xmin,xmax,n', got {text!r}") from exc


def _problem(args) -> tuple[PotentialPair, float | None, str]:
    """Potential pair, optional E0 and a label from --example or --spec."""
    grid = _parse_grid(args.grid) if getattr(args, "grid", None) else None
    if getattr(args, "example", None):
        entry = by_name(args.example, grid)
        return entry.pp, entry.E0, entry.name
    spec = load_problem(args.spec)
    return build_problem(spec, grid), spec.E0, spec.name or Path(args.spec).stem


def cmd_spectrum(args) -> int:
    pp, _, label = _problem(args)
    res = spectrum(pp, args.k)
    x = pp.grid.x
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [f"psi_{i}" for i in range(len(res.eigenfunctions))])
        cols = [psi.values for psi in res.eigenfunctions]
        for i, xi in enumerate(x):
            w.writerow([f"{xi:.17g}"] + [f"{c[i]:.17g}" for c in cols])
    _dump(
        {
            "problem": label,
            "eigenvalues": _floats(res.eigenvalues),
            "degeneracy_groups": [list(g) for g in res.degeneracy_groups],
            "orthonormality_defect": orthonormality_defect(res),
            "csv": str(args.out),
        },
        None,
    )
    return 0


def cmd_factorize(args) -> int:
    fd = DiffScheme.CENTRAL_FD4
    if args.example:
        entry = by_name(args.example)
        ws = entry_wronskians(entry)
        pp, E0, label, route = entry.pp, entry.E0, entry.name, "closed_form"
        fac = factorization(ws, E0)
        residuals = {"hirota": hirota_residual(ws.W, pp, E0).sup()}
    else:
        pp_full, E0, label = _problem(args)
        ws, pp, spec = ground_state_wronskians(pp_full)
        # a stated E0 wins over the computed one
        E0 = float(spec.eigenvalues[0]) if E0 is None else E0
        route = "numerical"
        pair = spec.eigenfunctions[:2]
        # derivatives of W are expanded in those of the pair: one FD pass each
        fac = factor_from_pair(*pair, E0, fd)
        rt = potentials_from_pair(*pair, E0, fd)
        a = int(np.searchsorted(pp_full.grid.x, rt.grid.x_min - 0.5 * pp_full.grid.h))
        b = a + rt.grid.n
        residuals = {
            "hirota": hirota_residual_from_pair(*pair, pp_full, E0, fd).sup(),
            "round_trip": float(max(
                np.max(np.abs(rt.u.values - pp_full.u.values[a:b])),
                np.max(np.abs(rt.v.values - pp_full.v.values[a:b])),
            )),
        }
    r1, r2 = identity_residuals(pp, fac)
    residuals.update(factor_identity_1=r1, factor_identity_2=r2, w23_identity=w23_identity_residual(ws).sup())
    out = {
        "problem": label,
        "route": route,
        "E0": E0,
        "kappa": fac.kappa,
        "x": _floats(fac.grid.x),
        "f": _floats(fac.f.values),
        "g": _floats(fac.g.values),
        "residuals": residuals,
    }
    _dump(out, args.out)
    return 0


def cmd_remove(args) -> int:
    entry = by_name(args.example)
    fac = factorization(entry_wronskians(entry), entry.E0)
    tilde = remove_eigenvalue(entry.pp, fac)
    out = {
        "problem": entry.name,
        "E0": entry.E0,
        "x": _floats(tilde.grid.x),
        "u_tilde": _floats(tilde.u.values),
        "v_tilde": _floats(tilde.v.values),
    }
    if entry.expected_tilde is not None:
        out["sup_diff_vs_closed_form"] = max(
            (tilde.u - entry.expected_tilde.u).sup(), (tilde.v - entry.expected_tilde.v).sup()
        )
    rep = removal_isospectrality_check(entry.pp, tilde, entry.E0)
    out["isospectrality"] = rep.to_dict()
    _dump(out, args.out)
    return 0 if rep.ok or not entry.degenerate else 1


def cmd_qval(args) -> int:
    if args.delta:
        if args.kappa is None:
            raise UsageError("--delta needs --kappa")
        kappa = args.kappa
        entry = follyton(kappa)
        predicted = delta_q_predicted(kappa)
        measured = delta_q_measured(entry.pp, entry.expected_tilde)
        _dump(
            {
                "kappa": kappa,
                "delta_q_predicted": predicted,
                "delta_q_measured": measured,
                "relative_error": abs(measured / predicted - 1.0),
                "normalized": delta_q_normalized(predicted),
                "normalized_target": -2.0 * (4.0 * kappa**4) ** 1.75,
            },
            None,
        )
        return 0
    if not (args.example or args.spec):
        raise UsageError("qval needs --example, --spec or --delta")
    out = {}
    if args.example:
        entry = by_name(args.example)
        out["problem"] = entry.name
        out["Q"] = q_functional(entry.pp)
        if entry.expected_tilde is not None and entry.expected_tilde.decaying:
            out["Q_tilde"] = q_functional(entry.expected_tilde)
            out["delta_Q"] = out["Q_tilde"] - out["Q"]
    else:
        pp, _, label = _problem(args)
        out["problem"] = label
        out["Q"] = q_functional(pp)
    _dump(out, None)
    return 0


def cmd_evolve(args) -> int:
    kind, _, param = args.initial.partition(":")
    if kind.strip().lower() != "follyton":
        raise UsageError(f"--initial supports follyton:KAPPA, got {args.initial!r}")
    try:
        kappa = float(param) if param else 0.5
    except ValueError as exc:
        raise UsageError(f"bad kappa in {args.initial!r}") from exc
    if args.dt <= 0 or args.t_end < 0:
        raise UsageError("--dt must be positive and --t-end non-negative")
    state, snaps, report = run_follyton(kappa, args.t_end, args.n, args.dt, args.snap)
    report["kappa"] = kappa
    report["n"] = args.n
    report["dt"] = args.dt
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_snapshots_csv(snaps, out / "snapshots.csv")
    write_summary_json(report, out / "summary.json")
    _dump(report, None)
    return 0


def cmd_verify(args) -> int:
    entries = all_entries() if args.example.lower() == "all" else [by_name(args.example)]
    reports = []
    ok = True
    for entry in entries:
        checks = verify_entry(entry)
        passed = all(c.passed for c in checks)
        ok &= passed
        print(f"== {entry.name}: {'PASS' if passed else 'FAIL'}")
        for c in checks:
            print("  " + c.line())
        reports.append(report_dict(entry, checks))
    if args.out:
        _dump({"passed": ok, "entries": reports}, args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quartop", description="Fourth-order operators with degenerate ground states.")
    p.add_argument("--version", action="version", version=f"quartop {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", help="lowest eigenpairs")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec")
    src.add_argument("--example")
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--grid", help="xmin,xmax,n")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("factorize", help="f, g and identity residuals")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec")
    src.add_argument("--example")
    s.add_argument("--grid", help="xmin,xmax,n")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_factorize)

    s = sub.add_parser("remove", help="remove the ground level")
    s.add_argument("--example", required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_remove)

    s = sub.add_parser("qval", help="the conserved functional Q")
    src = s.add_mutually_exclusive_group()
    src.add_argument("--spec")
    src.add_argument("--example")
    s.add_argument("--delta", action="store_true")
    s.add_argument("--kappa", type=float)
    s.set_defaults(func=cmd_qval)

    s = sub.add_parser("evolve", help="run the flow from follyton data")
    s.add_argument("--initial", default="follyton:0.5")
    s.add_argument("--t-end", type=float, default=0.5)
    s.add_argument("--n", type=int, default=512)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--snap", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("verify", help="invariant suite for catalog entries")
    s.add_argument("--example", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return p


def _fail(code: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}, sort_keys=True) + "\n")
    return status


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(exc.code, str(exc), 2)
    except INPUT_ERRORS as exc:
        return _fail(exc.code, str(exc), 2)
    except QuartopError as exc:
        return _fail(exc.code, str(exc), 1)
    except OSError as exc:
        return _fail("io-error", str(exc), 2)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail("numerical-error", str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
