"""The operator L = d^4 + d u d + v: assembly, low spectrum, and the factors A, A*."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from .errors import GridMismatch, SolverFailure
from .numgrid import (
    DiffScheme,
    Grid,
    GridFunction,
    best_scheme,
    differentiate,
    exp,
    fd_weights,
    inner,
)

# Asymptotic constants are checked against the end samples only when asked.
LIMIT_TOL = 1e-8


@dataclass(frozen=True)
class PotentialPair:
    """Coefficients (u, v) of L plus their limits at the ends of the box."""

    u: GridFunction
    v: GridFunction
    u_limit_left: float = 0.0
    u_limit_right: float = 0.0
    v_limit_left: float = 0.0
    v_limit_right: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise GridMismatch("u and v are sampled on different grids")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @property
    def decaying(self) -> bool:
        return max(abs(self.u_limit_left), abs(self.u_limit_right),
                   abs(self.v_limit_left), abs(self.v_limit_right)) == 0.0

    def limit_mismatch(self) -> float:
        """Largest gap between an end sample and its declared limit."""
        return max(
            abs(self.u.values[0] - self.u_limit_left),
            abs(self.u.values[-1] - self.u_limit_right),
            abs(self.v.values[0] - self.v_limit_left),
            abs(self.v.values[-1] - self.v_limit_right),
        )

    def check_limits(self, tol: float = LIMIT_TOL) -> None:
        gap = self.limit_mismatch()
        if gap > tol:
            raise ValueError(f"potentials miss their declared limits by {gap:.3g}")

    def continuum_threshold(self) -> float:
        """Bottom of the essential spectrum implied by the limits.

        At an end where u -> c and v -> d the symbol is k^4 - c k^2 + d.
        """
        edges = []
        for c, d in ((self.u_limit_left, self.v_limit_left), (self.u_limit_right, self.v_limit_right)):
            edges.append(d - c * c / 4.0 if c > 0 else d)
        return min(edges)


@dataclass(frozen=True)
class FactorizationData:
    """A = -d^2 + f d + g with L = A*A + E0.

    ``origin`` records how f was obtained: ``"wronskian"`` for f = W'/W of a
    ground-state pair, ``"addition"`` for the negated log-derivative of the
    diverging solution used when an eigenvalue is added.
    """

    f: GridFunction
    g: GridFunction
    E0: float
    kappa: float = 0.0
    origin: str = "wronskian"

    def __post_init__(self):
        if self.f.grid != self.g.grid:
            raise GridMismatch("f and g are sampled on different grids")
        if self.E0 > 0:
            raise ValueError("E0 must be non-positive")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @classmethod
    def with_kappa(cls, f, g, E0, origin="wronskian"):
        return cls(f, g, E0, kappa=(-E0 / 4.0) ** 0.25 if E0 < 0 else 0.0, origin=origin)


@dataclass(frozen=True)
class SymmetricOperatorMatrix:
    """Banded symmetric matrix acting on the interior samples.

    ``band`` is the upper storage expected by :func:`scipy.linalg.eig_banded`:
    ``band[bw - j, i] = M[i - j, i]``.
    """

    grid: Grid
    band: np.ndarray

    @property
    def bandwidth(self) -> int:
        return self.band.shape[0] - 1

    @property
    def size(self) -> int:
        return self.band.shape[1]

    def to_dense(self) -> np.ndarray:
        n, bw = self.size, self.bandwidth
        m = np.zeros((n, n))
        for j in range(bw + 1):
            d = self.band[bw - j, j:]
            idx = np.arange(n - j)
            m[idx, idx + j] = d
            m[idx + j, idx] = d
        return m

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_dense() @ x


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenfunctions: tuple
    degeneracy_groups: tuple = field(default=())

    def group_of(self, i: int) -> tuple:
        for grp in self.degeneracy_groups:
            if i in grp:
                return grp
        return (i,)

    @property
    def ground_multiplicity(self) -> int:
        return len(self.degeneracy_groups[0]) if self.degeneracy_groups else 0


def cluster_tol(lam: float) -> float:
    """Eigenvalues closer than this count as one degenerate level.

    The discretization splits exact double levels by O(h^4), a few 1e-6
    relative at h = 0.05, while genuine gaps in the catalog are >= 1e-3.
    """
    return 1e-4 * max(1.0, abs(lam))


# 4th-order symmetric stencils
_D4 = fd_weights(np.arange(-3, 4), 4)
_D1 = fd_weights(np.arange(-2, 3), 1)


def assemble_L(pp: PotentialPair) -> SymmetricOperatorMatrix:
    """Discretize L on the interior points with psi = psi' = 0 outside the box.

    d u d is represented as -D^T diag(u) D, D the 5-point first-derivative
    matrix evaluated on every grid node, which keeps the matrix symmetric.
    """
    grid = pp.grid
    if grid.periodic:
        raise GridMismatch("eigenproblems are posed on non-periodic grids")
    n, h = grid.n, grid.h
    m = n - 2
    d4 = sparse.diags([np.full(m - abs(k), _D4[k + 3]) for k in range(-3, 4)], range(-3, 4), shape=(m, m))
    # D maps interior unknowns (zero elsewhere) to derivatives at all n nodes
    rows, cols, vals = [], [], []
    for k, w in zip(range(-2, 3), _D1):
        node = np.arange(n)
        unknown = node + k - 1
        ok = (unknown >= 0) & (unknown < m)
        rows.append(node[ok])
        cols.append(unknown[ok])
        vals.append(np.full(ok.sum(), w))
    D = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, m)) / h
    mat = d4 / h**4 - D.T @ sparse.diags(pp.u.values) @ D + sparse.diags(pp.v.values[1:-1])
    mat = sparse.csr_matrix(mat)
    mat = 0.5 * (mat + mat.T)
    bw = 4
    band = np.zeros((bw + 1, m))
    dia = mat.todia()
    for off, data in zip(dia.offsets, dia.data):
        if 0 <= off <= bw:
            band[bw - off, off:] = data[off:]
    return SymmetricOperatorMatrix(grid, band)


def _midpoint_slope(values: np.ndarray, i: int, h: float) -> float:
    return float((values[i + 1] - values[i - 1]) / (2 * h))


def _fix_gauge(vecs: list[np.ndarray], grid: Grid) -> list[np.ndarray]:
    i, h = grid.mid, grid.h
    if len(vecs) == 2:
        a, b = vecs
        # rotate so the first function is flat at the midpoint
        theta = np.arctan2(-_midpoint_slope(a, i, h), _midpoint_slope(b, i, h))
        c, s = np.cos(theta), np.sin(theta)
        vecs = [c * a + s * b, -s * a + c * b]
    out = []
    for k, vec in enumerate(vecs):
        peak = np.max(np.abs(vec))
        val = vec[i]
        ref = val if abs(val) > 1e-8 * peak else _midpoint_slope(vec, i, h)
        if ref == 0.0:
            ref = vec[np.argmax(np.abs(vec) > 1e-8 * peak)]
        out.append(vec if ref > 0 else -vec)
    if len(out) == 2 and _midpoint_slope(out[1], i, h) < 0:
        out[1] = -out[1]
    return out


def _group(eigenvalues: np.ndarray) -> tuple:
    groups, cur = [], [0]
    for i in range(1, len(eigenvalues)):
        if abs(eigenvalues[i] - eigenvalues[cur[0]]) < cluster_tol(eigenvalues[cur[0]]):
            cur.append(i)
        else:
            groups.append(tuple(cur))
            cur = [i]
    groups.append(tuple(cur))
    return tuple(groups)


def _band_to_sparse(m: SymmetricOperatorMatrix) -> sparse.csc_matrix:
    bw, n = m.bandwidth, m.size
    diags, offs = [], []
    for j in range(bw + 1):
        d = m.band[bw - j, j:]
        diags.append(d)
        offs.append(j)
        if j:
            diags.append(d)
            offs.append(-j)
    return sparse.diags(diags, offs, shape=(n, n), format="csc")


def _clusters(lam: np.ndarray, rel_gap: float = 1e-3) -> list[list[int]]:
    out = [[0]]
    for i in range(1, len(lam)):
        if lam[i] - lam[i - 1] < rel_gap * max(1.0, abs(lam[i])):
            out[-1].append(i)
        else:
            out.append([i])
    return out


def _subspace_vectors(m: SymmetricOperatorMatrix, lam: np.ndarray, tol: float = 1e-11, max_iter: int = 200):
    """Eigenvectors for the eigenvalues ``lam`` by shifted block inverse iteration.

    Each cluster of close eigenvalues gets its own shift just below it; a final
    Rayleigh-Ritz step over all clusters restores mutual orthogonality.
    """
    a = _band_to_sparse(m)
    n = m.size
    eye = sparse.identity(n, format="csc")
    # residuals cannot drop below rounding in a @ q
    floor = 50 * np.finfo(float).eps * abs(a).sum(axis=1).max()
    rng = np.random.default_rng(20240601)
    blocks = []
    for cl in _clusters(lam):
        lo = lam[cl[0]]
        scale = max(1.0, abs(lo))
        lu = splu(a - (lo - 1e-6 * scale) * eye)
        p = min(n, len(cl) + 1)
        x = np.linalg.qr(rng.standard_normal((n, p)))[0]
        for _ in range(max_iter):
            q = np.linalg.qr(lu.solve(x))[0]
            aq = a @ q
            theta, s = np.linalg.eigh(q.T @ aq)
            x = q @ s
            resid = np.linalg.norm(aq @ s - x * theta, axis=0)[: len(cl)]
            if np.all(resid < np.maximum(tol * scale, floor)):
                break
        else:
            raise SolverFailure(f"inverse iteration did not converge (residual {resid.max():.3g})")
        blocks.append(x[:, : len(cl)])
    q = np.linalg.qr(np.hstack(blocks))[0]
    theta, s = np.linalg.eigh(q.T @ (a @ q))
    return q @ s


def lowest_eigenpairs(m: SymmetricOperatorMatrix, k: int) -> SpectrumResult:
    """The k smallest eigenpairs, L2-normalized and phase-fixed."""
    if k < 1:
        raise ValueError("k must be at least 1")
    k = min(k, m.size)
    try:
        lam = linalg.eig_banded(m.band, lower=False, select="i", select_range=(0, k - 1), eigvals_only=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverFailure(str(exc)) from exc
    if len(lam) < k or not np.all(np.isfinite(lam)):
        raise SolverFailure("banded eigensolver returned too few eigenvalues")
    vec = _subspace_vectors(m, lam)
    grid = m.grid
    full = np.zeros((grid.n, k))
    full[1:-1] = vec / np.sqrt(grid.h)
    groups = _group(lam)
    cols = [full[:, j] for j in range(k)]
    for grp in groups:
        fixed = _fix_gauge([cols[j] for j in grp], grid)
        for j, col in zip(grp, fixed):
            cols[j] = col
    funcs = tuple(GridFunction(grid, c) for c in cols)
    return SpectrumResult(np.asarray(lam), funcs, groups)


def spectrum(pp: PotentialPair, k: int) -> SpectrumResult:
    return lowest_eigenpairs(assemble_L(pp), k)


def _check_grid(*fns):
    g = fns[0].grid
    if any(f.grid != g for f in fns[1:]):
        raise GridMismatch("operands live on different grids")


def apply_A(fac: FactorizationData, psi: GridFunction, scheme: DiffScheme | None = None) -> GridFunction:
    """-psi'' + f psi' + g psi."""
    _check_grid(fac.f, psi)
    scheme = scheme or best_scheme(psi, need=2)
    return -differentiate(psi, 2, scheme) + fac.f * differentiate(psi, 1, scheme) + fac.g * psi


def apply_A_star(fac: FactorizationData, psi: GridFunction, scheme: DiffScheme | None = None) -> GridFunction:
    """-psi'' - f psi' + (g - f') psi."""
    _check_grid(fac.f, psi)
    scheme = scheme or best_scheme(psi, fac.f, need=2)
    fp = differentiate(fac.f, 1, scheme)
    return -differentiate(psi, 2, scheme) - fac.f * differentiate(psi, 1, scheme) + (fac.g - fp) * psi


def apply_L(pp: PotentialPair, psi: GridFunction, scheme: DiffScheme | None = None) -> GridFunction:
    _check_grid(pp.u, psi)
    scheme = scheme or best_scheme(psi, pp.u, need=4)
    return (
        differentiate(psi, 4, scheme)
        + differentiate(pp.u * differentiate(psi, 1, scheme), 1, scheme)
        + pp.v * psi
    )


def identity_residuals(pp: PotentialPair, fac: FactorizationData, scheme: DiffScheme | None = None) -> tuple[float, float]:
    """Sup-norms of f' + f^2 + 2g + u and g^2 - (fg + g')' - v + E0."""
    _check_grid(pp.u, fac.f)
    scheme = scheme or best_scheme(fac.f, fac.g, need=2)
    f, g = fac.f, fac.g
    r1 = differentiate(f, 1, scheme) + f * f + 2.0 * g + pp.u
    r2 = g * g - differentiate(f * g + differentiate(g, 1, scheme), 1, scheme) - pp.v + fac.E0
    return r1.sup(), r2.sup()


def default_probes(grid: Grid, order: int = 8) -> list[GridFunction]:
    """Smooth bumps well inside the box, with exact jets."""
    x = grid.coordinate(order)
    centre = 0.5 * (grid.x_min + grid.x_max)
    width = grid.length / 16.0
    probes = []
    for shift in (-0.5, 0.0, 0.7):
        c = centre + shift * width
        bump = exp(-1.0 * ((x - c) * (x - c)) / (width / 4.0) ** 2)
        probes.append(bump)
    return probes


def factorization_residual(
    pp: PotentialPair,
    fac: FactorizationData,
    probes: list[GridFunction] | None = None,
    scheme: DiffScheme | None = None,
) -> float:
    """Max of ||(A*A + E0)phi - L phi|| / ||phi|| over probes and the two ODE identities."""
    probes = default_probes(pp.grid) if probes is None else probes
    worst = max(identity_residuals(pp, fac, scheme))
    for phi in probes:
        s = scheme or best_scheme(phi, pp.u, pp.v, fac.f, fac.g, need=4)
        lhs = apply_A_star(fac, apply_A(fac, phi, s), s) + fac.E0 * phi
        rhs = apply_L(pp, phi, s)
        worst = max(worst, (lhs - rhs).sup() / phi.sup())
    return worst


def orthonormality_defect(spec: SpectrumResult) -> float:
    fns = spec.eigenfunctions
    worst = 0.0
    for i in range(len(fns)):
        for j in range(i, len(fns)):
            target = 1.0 if i == j else 0.0
            worst = max(worst, abs(inner(fns[i], fns[j]) - target))
    return worst
