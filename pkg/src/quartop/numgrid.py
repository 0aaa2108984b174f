"""Uniform grids, sampled functions, differentiation and quadrature.

A :class:`GridFunction` holds samples on a :class:`Grid`.  Closed-form
functions can additionally carry a *jet*: the exact derivatives of orders
``1..order`` at every sample.  Arithmetic and the elementary functions in
this module propagate jets by Leibniz-type recurrences, so a closed form
assembled from ``x``, ``cosh``, products and quotients keeps analytic
derivatives and ``differentiate(..., DiffScheme.ANALYTIC)`` simply reads them
off.  Functions without a jet fall back to finite differences or FFTs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import (
    GridMismatch,
    InvalidRange,
    SchemeGridMismatch,
    TooFewPoints,
    UnsupportedOrder,
)

MIN_POINTS = 16
MAX_FD_ORDER = 5


class DiffScheme(str, enum.Enum):
    CENTRAL_FD4 = "central_fd4"
    PERIODIC_SPECTRAL = "periodic_spectral"
    ANALYTIC = "analytic_passthrough"


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid.

    Non-periodic grids include both end points; periodic grids omit
    ``x_max`` (it coincides with ``x_min``).
    """

    x_min: float
    x_max: float
    n: int
    periodic: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or not self.x_min < self.x_max:
            raise InvalidRange(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise TooFewPoints(f"need at least {MIN_POINTS} points, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "periodic", bool(self.periodic))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def h(self) -> float:
        return self.length / (self.n if self.periodic else self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return _coordinates(self)

    @property
    def mid(self) -> int:
        """Index of the sample closest to the centre of the box."""
        return int(np.argmin(np.abs(self.x - 0.5 * (self.x_min + self.x_max))))

    def coordinate(self, order: int = 8) -> GridFunction:
        """The identity function ``x`` with its jet to ``order``."""
        jet = np.zeros((order + 1, self.n))
        jet[0] = self.x
        if order >= 1:
            jet[1] = 1.0
        return GridFunction(self, jet[0], jet[1:])

    def constant(self, c: float, order: int = 8) -> GridFunction:
        jet = np.zeros((order + 1, self.n))
        jet[0] = c
        return GridFunction(self, jet[0], jet[1:])


@lru_cache(maxsize=32)
def _coordinates(grid: Grid) -> np.ndarray:
    if grid.periodic:
        x = grid.x_min + grid.h * np.arange(grid.n)
    else:
        x = np.linspace(grid.x_min, grid.x_max, grid.n)
    x.setflags(write=False)
    return x


def make_uniform_grid(x_min: float, x_max: float, n: int, periodic: bool = False) -> Grid:
    return Grid(x_min, x_max, n, periodic)


def default_grid() -> Grid:
    """Truncation box used for decaying potentials."""
    return Grid(-40.0, 40.0, 4001, False)


# -- jet recurrences ---------------------------------------------------------
# A jet is an array of shape (m + 1, n); row k holds the k-th derivative.


def _jet_mul(a, b):
    m = min(len(a), len(b)) - 1
    out = np.empty((m + 1, a.shape[1]))
    for k in range(m + 1):
        out[k] = sum(comb(k, j) * a[j] * b[k - j] for j in range(k + 1))
    return out


def _jet_div(a, b):
    m = min(len(a), len(b)) - 1
    out = np.empty((m + 1, a.shape[1]))
    for k in range(m + 1):
        acc = a[k].copy()
        for j in range(1, k + 1):
            acc -= comb(k, j) * b[j] * out[k - j]
        out[k] = acc / b[0]
    return out


def _jet_pow(a, p):
    if float(p).is_integer() and p >= 0:
        p = int(p)
        out = np.zeros_like(a)
        out[0] = 1.0
        base = a
        while p:
            if p & 1:
                out = _jet_mul(out, base)
            p >>= 1
            if p:
                base = _jet_mul(base, base)
        return out
    # a * h' = p * a' * h, differentiated k - 1 times
    m = len(a) - 1
    out = np.empty_like(a)
    out[0] = a[0] ** p
    for k in range(1, m + 1):
        acc = p * sum(comb(k - 1, j) * a[j + 1] * out[k - 1 - j] for j in range(k))
        for j in range(1, k):
            acc = acc - comb(k - 1, j) * a[j] * out[k - j]
        out[k] = acc / a[0]
    return out


def _jet_exp(a):
    out = np.empty_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, len(a)):
        out[k] = sum(comb(k - 1, j) * a[j + 1] * out[k - 1 - j] for j in range(k))
    return out


def _jet_pair(a, s0, c0, sign):
    """Jets of (s, c) with s' = a' c and c' = sign * a' s."""
    s = np.empty_like(a)
    c = np.empty_like(a)
    s[0], c[0] = s0, c0
    for k in range(1, len(a)):
        s[k] = sum(comb(k - 1, j) * a[j + 1] * c[k - 1 - j] for j in range(k))
        c[k] = sign * sum(comb(k - 1, j) * a[j + 1] * s[k - 1 - j] for j in range(k))
    return s, c


class GridFunction:
    """Real samples of a function on a grid, optionally with exact derivatives."""

    __slots__ = ("grid", "_jet")
    __array_priority__ = 100

    def __init__(self, grid: Grid, values, derivatives=None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n,):
            raise GridMismatch(f"expected {grid.n} samples, got shape {values.shape}")
        if derivatives is None or len(derivatives) == 0:
            jet = values[None, :].copy()
        else:
            derivatives = np.asarray(derivatives, dtype=float).reshape(-1, grid.n)
            jet = np.vstack([values[None, :], derivatives])
        if not np.all(np.isfinite(jet[0])):
            raise ValueError("grid function has non-finite samples")
        jet.setflags(write=False)
        self.grid = grid
        self._jet = jet

    @classmethod
    def _from_jet(cls, grid, jet):
        return cls(grid, jet[0], jet[1:])

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> GridFunction:
        return cls(grid, fn(grid.x))

    @property
    def values(self) -> np.ndarray:
        return self._jet[0]

    @property
    def order(self) -> int:
        """Highest derivative order carried analytically (0 if none)."""
        return len(self._jet) - 1

    @property
    def jet(self) -> np.ndarray:
        return self._jet

    def derivative(self, k: int) -> np.ndarray:
        if k > self.order:
            raise UnsupportedOrder(f"analytic derivative of order {k} not available (have {self.order})")
        return self._jet[k]

    def plain(self) -> GridFunction:
        """Copy without the analytic jet."""
        return GridFunction(self.grid, self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __len__(self):
        return self.grid.n

    def __repr__(self):
        return f"GridFunction(n={self.grid.n}, order={self.order})"

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridMismatch("grid functions live on different grids")
            return other._jet
        if np.ndim(other) == 0:
            jet = np.zeros_like(self._jet)
            jet[0] = float(other)
            return jet
        return NotImplemented

    def _binary(self, other, op, swap=False):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        a = self._jet
        if swap:
            a, b = b, a
        return GridFunction._from_jet(self.grid, op(a, b))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a[: min(len(a), len(b))] + b[: min(len(a), len(b))])

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a[: min(len(a), len(b))] - b[: min(len(a), len(b))])

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: a[: min(len(a), len(b))] - b[: min(len(a), len(b))], swap=True)

    def __mul__(self, other):
        if np.ndim(other) == 0 and not isinstance(other, GridFunction):
            return GridFunction._from_jet(self.grid, self._jet * float(other))
        return self._binary(other, _jet_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.ndim(other) == 0 and not isinstance(other, GridFunction):
            return GridFunction._from_jet(self.grid, self._jet / float(other))
        return self._binary(other, _jet_div)

    def __rtruediv__(self, other):
        return self._binary(other, _jet_div, swap=True)

    def __neg__(self):
        return GridFunction._from_jet(self.grid, -self._jet)

    def __pow__(self, p):
        if isinstance(p, GridFunction):
            return NotImplemented
        return GridFunction._from_jet(self.grid, _jet_pow(self._jet, p))


# -- elementary functions with jet propagation ------------------------------


def exp(gf: GridFunction) -> GridFunction:
    return GridFunction._from_jet(gf.grid, _jet_exp(gf.jet))


def sin(gf: GridFunction) -> GridFunction:
    s, _ = _jet_pair(gf.jet, np.sin(gf.values), np.cos(gf.values), -1.0)
    return GridFunction._from_jet(gf.grid, s)


def cos(gf: GridFunction) -> GridFunction:
    _, c = _jet_pair(gf.jet, np.sin(gf.values), np.cos(gf.values), -1.0)
    return GridFunction._from_jet(gf.grid, c)


def sinh(gf: GridFunction) -> GridFunction:
    s, _ = _jet_pair(gf.jet, np.sinh(gf.values), np.cosh(gf.values), 1.0)
    return GridFunction._from_jet(gf.grid, s)


def cosh(gf: GridFunction) -> GridFunction:
    _, c = _jet_pair(gf.jet, np.sinh(gf.values), np.cosh(gf.values), 1.0)
    return GridFunction._from_jet(gf.grid, c)


def sech(gf: GridFunction) -> GridFunction:
    return 1.0 / cosh(gf)


def tanh(gf: GridFunction) -> GridFunction:
    s, c = _jet_pair(gf.jet, np.sinh(gf.values), np.cosh(gf.values), 1.0)
    return GridFunction._from_jet(gf.grid, _jet_div(s, c))


def sqrt(gf: GridFunction) -> GridFunction:
    return gf**0.5


# -- finite differences ------------------------------------------------------


def fd_weights(offsets, order: int) -> np.ndarray:
    """Fornberg's recursion for finite-difference weights at 0."""
    z = np.asarray(offsets, dtype=float)
    n = len(z)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (z[i] * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = z[i] * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def _central_halfwidth(order: int) -> int:
    return (order + 1) // 2 + 1


@lru_cache(maxsize=None)
def _fd4_stencils(order: int):
    """Central weights plus the one-sided boundary rows (left side)."""
    r = _central_halfwidth(order)
    central = fd_weights(np.arange(-r, r + 1), order)
    width = order + 4
    left = [fd_weights(np.arange(width) - i, order) for i in range(r)]
    return r, central, width, left


def _fd4(values: np.ndarray, order: int, h: float, periodic: bool) -> np.ndarray:
    r, central, width, left = _fd4_stencils(order)
    n = len(values)
    out = np.zeros(n)
    if periodic:
        for j, w in enumerate(central):
            out += w * np.roll(values, r - j)
        return out / h**order
    for j, w in enumerate(central):
        out[r : n - r] += w * values[j : n - 2 * r + j]
    for i in range(r):
        out[i] = left[i] @ values[:width]
        # mirrored stencil on the right: derivative of order d picks up (-1)^d
        out[n - 1 - i] = (-1) ** order * (left[i] @ values[::-1][:width])
    return out / h**order


def _spectral(values: np.ndarray, order: int, grid: Grid) -> np.ndarray:
    n = grid.n
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=grid.h)
    mult = (1j * k) ** order
    if order % 2 and n % 2 == 0:
        mult[-1] = 0.0
    return np.fft.irfft(mult * np.fft.rfft(values), n=n)


def differentiate(gf: GridFunction, order: int, scheme: DiffScheme | str = DiffScheme.CENTRAL_FD4) -> GridFunction:
    """Derivative of ``gf`` of the given order.

    The analytic scheme keeps the remaining jet, so chained derivatives stay
    exact; the numerical schemes return plain samples.
    """
    scheme = DiffScheme(scheme)
    if int(order) != order or order < 0:
        raise UnsupportedOrder(f"invalid derivative order {order}")
    if order == 0:
        return gf
    if scheme is DiffScheme.ANALYTIC:
        if order > gf.order:
            raise UnsupportedOrder(f"analytic derivative of order {order} not available (have {gf.order})")
        return GridFunction._from_jet(gf.grid, gf.jet[order:])
    if order > MAX_FD_ORDER:
        raise UnsupportedOrder(f"order {order} exceeds {MAX_FD_ORDER}")
    if scheme is DiffScheme.PERIODIC_SPECTRAL:
        if not gf.grid.periodic:
            raise SchemeGridMismatch("spectral differentiation needs a periodic grid")
        return GridFunction(gf.grid, _spectral(gf.values, order, gf.grid))
    return GridFunction(gf.grid, _fd4(gf.values, order, gf.grid.h, gf.grid.periodic))


def best_scheme(*functions: GridFunction, need: int = 1) -> DiffScheme:
    """Analytic if every function carries ``need`` derivatives, else numeric."""
    if all(f.order >= need for f in functions):
        return DiffScheme.ANALYTIC
    if functions and functions[0].grid.periodic:
        return DiffScheme.PERIODIC_SPECTRAL
    return DiffScheme.CENTRAL_FD4


def integrate(gf: GridFunction) -> float:
    """Composite Simpson on bounded grids, rectangle rule on periodic ones."""
    if gf.grid.periodic:
        return float(gf.grid.h * np.sum(gf.values))
    return float(_sp_integrate.simpson(gf.values, dx=gf.grid.h))


def inner(a: GridFunction, b: GridFunction) -> float:
    if a.grid != b.grid:
        raise GridMismatch("inner product across different grids")
    return integrate(GridFunction(a.grid, a.values * b.values))


def restrict(gf: GridFunction, start: int, stop: int) -> GridFunction:
    """Samples ``start..stop-1`` on the matching sub-grid (jets kept)."""
    grid = gf.grid
    if grid.periodic:
        raise SchemeGridMismatch("cannot restrict a periodic grid")
    x = grid.x
    sub = Grid(x[start], x[stop - 1], stop - start, False)
    return GridFunction(sub, gf.jet[0, start:stop], gf.jet[1:, start:stop])


def decays(gf: GridFunction, tol: float = 1e-8) -> bool:
    """True when both end samples are below ``tol`` relative to the peak."""
    scale = max(gf.sup(), 1e-300)
    return abs(gf.values[0]) <= tol * scale and abs(gf.values[-1]) <= tol * scale
