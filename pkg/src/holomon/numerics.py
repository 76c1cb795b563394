"""Quadrature and linear ODE kernels on the unit parameter interval.

Everything here works on complex ``numpy`` arrays.  Square complex arrays play
the role of matrices; a 1x1 array stands in for a scalar where a matrix is
expected.  Errors are measured entrywise in the max norm throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .errors import NonFiniteSample, StepUnderflow, ToleranceNotMet

DEFAULT_TOL = 1e-10
MAX_PANELS = 2**20
MAX_STEPS = 10**7

__all__ = [
    "DEFAULT_TOL",
    "SampledFunction",
    "quadrature",
    "integrate_ode",
    "ode_transport",
    "max_abs",
]


def max_abs(x) -> float:
    """Chebyshev (entrywise max) norm."""
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


@dataclass(frozen=True)
class SampledFunction:
    """A piecewise-smooth function on ``[0, 1]``.

    ``breakpoints`` split ``[0, 1]`` into smooth pieces.  When ``pieces`` is
    given it holds one callable per piece, each valid on the *closed*
    sub-interval, so one-sided values at breakpoints are available to the
    integrators.  Otherwise ``evaluator`` is used everywhere.
    """

    evaluator: Callable[[float], object]
    breakpoints: tuple[float, ...] = ()
    pieces: tuple[Callable[[float], object], ...] | None = None

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        if any(not 0.0 < b < 1.0 for b in bp) or any(b >= c for b, c in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing inside (0, 1)")
        object.__setattr__(self, "breakpoints", bp)
        if self.pieces is not None:
            pieces = tuple(self.pieces)
            if len(pieces) != len(bp) + 1:
                raise ValueError("need exactly one piece callable per smooth piece")
            object.__setattr__(self, "pieces", pieces)

    @property
    def intervals(self) -> list[tuple[float, float]]:
        edges = (0.0, *self.breakpoints, 1.0)
        return list(zip(edges[:-1], edges[1:]))

    def piece(self, k: int) -> Callable[[float], object]:
        return self.evaluator if self.pieces is None else self.pieces[k]

    def __call__(self, s: float):
        return self.evaluator(s)

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        return _combine(self, other, lambda x, y: x + y)

    def scaled(self, alpha: complex) -> "SampledFunction":
        pieces = None
        if self.pieces is not None:
            pieces = tuple((lambda s, p=p: alpha * np.asarray(p(s))) for p in self.pieces)
        return SampledFunction(lambda s: alpha * np.asarray(self.evaluator(s)), self.breakpoints, pieces)


def _combine(f: SampledFunction, g: SampledFunction, op) -> SampledFunction:
    bp = tuple(sorted(set(f.breakpoints) | set(g.breakpoints)))
    edges = (0.0, *bp, 1.0)

    def owner(h: SampledFunction, a: float, b: float):
        mid = 0.5 * (a + b)
        for k, (lo, hi) in enumerate(h.intervals):
            if lo <= mid <= hi:
                return h.piece(k)
        raise AssertionError("unreachable")

    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        pf, pg = owner(f, a, b), owner(g, a, b)
        pieces.append(lambda s, pf=pf, pg=pg: op(np.asarray(pf(s)), np.asarray(pg(s))))
    return SampledFunction(lambda s: op(np.asarray(f(s)), np.asarray(g(s))), bp, tuple(pieces))


def _checked(fn: Callable[[float], object]) -> Callable[[float], np.ndarray]:
    def wrapped(s):
        v = np.asarray(fn(s), dtype=complex)
        if not np.all(np.isfinite(v)):
            raise NonFiniteSample(float(s))
        return v

    return wrapped


def quadrature(f: SampledFunction, tol: float = DEFAULT_TOL, max_panels: int = MAX_PANELS) -> np.ndarray:
    """Integrate ``f`` over ``[0, 1]`` with adaptive Gauss-Kronrod panels.

    Each smooth piece is integrated separately; the absolute error budget
    ``tol`` is split evenly across pieces.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    intervals = f.intervals
    budget = tol / len(intervals)
    total = 0
    for k, (a, b) in enumerate(intervals):
        res, err, info = quad_vec(
            _checked(f.piece(k)), a, b,
            epsabs=budget, epsrel=0.0, norm="max", limit=max_panels, full_output=True,
        )
        if info.status != 0 or err > budget:
            raise ToleranceNotMet(float(err), budget)
        total = total + res
    return np.asarray(total, dtype=complex)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

# PI controller gains for a fifth-order pair
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 5.0


def _dopri_interval(fun, y, a, b, tol, max_steps):
    if b <= a:
        return y, 0
    eps = np.finfo(float).eps
    s = a
    f0 = fun(s, y)
    scale = tol * max(1.0, max_abs(y))
    d0, d1 = max_abs(y) / scale, max_abs(f0) / scale
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, b - a, 0.1)
    err_prev = 1e-4
    steps = 0
    k = [None] * 7
    k[0] = f0
    while s < b:
        last = s + h >= b
        if last:
            h = b - s
        if h <= 16 * eps * max(1.0, abs(s)):
            raise StepUnderflow(s, h)
        for i in range(1, 7):
            dy = sum(aij * kj for aij, kj in zip(_A[i], k) if aij != 0.0)
            k[i] = fun(s + _C[i] * h, y + h * dy)
        y_new = y + h * sum(bi * ki for bi, ki in zip(_B5, k) if bi != 0.0)
        err = h * sum(ei * ki for ei, ki in zip(_E, k) if ei != 0.0)
        steps += 1
        if steps > max_steps:
            raise ToleranceNotMet(float("inf"), tol)
        scale = tol * max(1.0, max_abs(y), max_abs(y_new))
        errn = max_abs(err) / scale
        if not np.isfinite(errn):
            h *= _FAC_MIN
            continue
        if errn <= 1.0:
            s = b if last else s + h
            y = y_new
            k[0] = k[6]
            if errn == 0.0:
                fac = _FAC_MAX
            else:
                fac = _SAFETY * errn ** (-_ALPHA) * err_prev**_BETA
                fac = min(_FAC_MAX, max(_FAC_MIN, fac))
            err_prev = max(errn, 1e-4)
            h *= fac
        else:
            h *= max(_FAC_MIN, _SAFETY * errn ** (-1 / 5))
    return y, steps


def integrate_ode(
    rhs: Callable[[int, float, np.ndarray], np.ndarray],
    y0,
    intervals: Sequence[tuple[float, float]],
    tol: float = DEFAULT_TOL,
    max_steps: int = MAX_STEPS,
) -> np.ndarray:
    """Solve ``y' = rhs(k, s, y)`` across consecutive intervals.

    ``k`` is the index of the interval currently being integrated, so the
    right-hand side can use one-sided data at breakpoints.  Dormand-Prince
    5(4) with local extrapolation and PI step control; the local error of
    each step is held below ``tol * max(1, |y|)`` in the max norm.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = np.array(y0, dtype=complex)
    used = 0
    for idx, (a, b) in enumerate(intervals):
        y, n = _dopri_interval(lambda s, v, idx=idx: rhs(idx, s, v), y, a, b, tol, max_steps - used)
        used += n
    return y


def ode_transport(A: SampledFunction, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Fundamental solution at ``s = 1`` of ``Y' = -A(s) Y``, ``Y(0) = I``."""
    pieces = [_checked(A.piece(k)) for k in range(len(A.intervals))]
    a0 = np.atleast_2d(pieces[0](A.intervals[0][0]))
    n = a0.shape[0]
    if a0.shape != (n, n):
        raise ValueError("transport needs a square matrix-valued function")

    def rhs(k, s, y):
        return -(np.atleast_2d(pieces[k](s)) @ y)

    return integrate_ode(rhs, np.eye(n, dtype=complex), A.intervals, tol)
