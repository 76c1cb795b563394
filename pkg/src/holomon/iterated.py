"""Iterated integrals, Chen-Parshin tensor series and the monodromy series.

For forms ``rho_1, ..., rho_m`` and a path ``c`` with ``F_i = rho_i(c')``::

    G_1(t) = int_0^t F_1,    G_{i+1}(t) = int_0^t G_i(s) F_{i+1}(s) ds,
    int_c rho_1 ... rho_m = G_m(1)

i.e. the integral of ``F_1(s_1) ... F_m(s_m)`` over ``s_1 <= ... <= s_m``.
All ``G_i`` are integrated together as one triangular linear ODE on a shared
adaptive grid.
"""

from __future__ import annotations

from math import prod
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import NotClosed, RankMismatch, TruncationTooLarge
from .forms import RationalMatrixForm
from .numerics import DEFAULT_TOL, integrate_ode
from .paths import Path
from .transport import EPS_POLE, pullback

COEFFICIENT_CAP = 10**6

__all__ = [
    "TensorSeries",
    "iterated_integral",
    "chen_parshin",
    "monodromy_series",
]


def _pullbacks(forms: Sequence[RationalMatrixForm], path: Path, eps_pole: float):
    # identical form objects share one pullback
    cache: dict[int, object] = {}
    out = []
    for f in forms:
        if id(f) not in cache:
            cache[id(f)] = pullback(f, path, eps_pole)
        out.append(cache[id(f)])
    return out


def iterated_integral(forms: Sequence[RationalMatrixForm], path: Path, tol: float = DEFAULT_TOL,
                      eps_pole: float = EPS_POLE) -> np.ndarray:
    """``int_path rho_1 ... rho_m`` as an ``(r, r)`` array (``(1, 1)`` for scalar forms)."""
    forms = list(forms)
    if not forms:
        raise ValueError("need at least one form")
    r = forms[0].rank
    if any(f.rank != r for f in forms):
        raise RankMismatch("all forms of an iterated integral must share one rank")
    m = len(forms)
    pbs = _pullbacks(forms, path, eps_pole)
    distinct = {id(p): p for p in pbs}

    def rhs(k, s, y):
        vals = {key: np.asarray(p.piece(k)(s), dtype=complex) for key, p in distinct.items()}
        F = [vals[id(p)] for p in pbs]
        dy = np.empty_like(y)
        dy[0] = F[0]
        for i in range(1, m):
            dy[i] = y[i - 1] @ F[i]
        return dy

    y = integrate_ode(rhs, np.zeros((m, r, r), dtype=complex), path.intervals, tol)
    return y[-1]


class TensorSeries:
    """Truncated element of the tensor algebra on ``g`` generators.

    ``levels[n]`` is a dense array of shape ``(g,) * n`` holding the
    coefficients of the degree-``n`` words; words are tuples of 0-based
    generator indices.
    """

    def __init__(self, g: int, levels: Sequence):
        if g < 1:
            raise ValueError("need at least one generator")
        lv = []
        for n, a in enumerate(levels):
            a = np.array(a, dtype=complex)
            if a.shape != (g,) * n:
                raise ValueError(f"degree {n} block must have shape {(g,) * n}, got {a.shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError("coefficients must be finite")
            lv.append(a)
        if not lv:
            raise ValueError("need at least the degree-0 coefficient")
        self.g = g
        self.levels = lv

    @classmethod
    def zeros(cls, g: int, order: int) -> "TensorSeries":
        return cls(g, [np.zeros((g,) * n, dtype=complex) for n in range(order + 1)])

    @classmethod
    def unit(cls, g: int, order: int) -> "TensorSeries":
        s = cls.zeros(g, order)
        s.levels[0][()] = 1.0
        return s

    @classmethod
    def from_dict(cls, g: int, order: int, coeffs: Mapping[tuple[int, ...], complex]) -> "TensorSeries":
        s = cls.zeros(g, order)
        for w, c in coeffs.items():
            w = tuple(w)
            if len(w) > order:
                raise ValueError(f"word {w} exceeds order {order}")
            s.levels[len(w)][w] += c
        return s

    @property
    def order(self) -> int:
        return len(self.levels) - 1

    def degree(self, n: int) -> np.ndarray:
        return self.levels[n]

    def __getitem__(self, word) -> complex:
        word = tuple(word)
        return complex(self.levels[len(word)][word])

    def items(self) -> Iterator[tuple[tuple[int, ...], complex]]:
        for n, a in enumerate(self.levels):
            for w in np.ndindex(a.shape):
                yield tuple(int(i) for i in w), complex(a[w])

    def truncate(self, order: int) -> "TensorSeries":
        return TensorSeries(self.g, self.levels[: order + 1])

    def _check(self, other: "TensorSeries") -> None:
        if other.g != self.g or other.order != self.order:
            raise ValueError("series differ in generator count or order")

    def __add__(self, other: "TensorSeries") -> "TensorSeries":
        self._check(other)
        return TensorSeries(self.g, [a + b for a, b in zip(self.levels, other.levels)])

    def __sub__(self, other: "TensorSeries") -> "TensorSeries":
        self._check(other)
        return TensorSeries(self.g, [a - b for a, b in zip(self.levels, other.levels)])

    def __mul__(self, c: complex) -> "TensorSeries":
        return TensorSeries(self.g, [c * a for a in self.levels])

    __rmul__ = __mul__

    def product(self, other: "TensorSeries") -> "TensorSeries":
        """Concatenation product truncated at the common order."""
        self._check(other)
        out = []
        for n in range(self.order + 1):
            acc = np.zeros((self.g,) * n, dtype=complex)
            for a in range(n + 1):
                acc += np.multiply.outer(self.levels[a], other.levels[n - a])
            out.append(acc)
        return TensorSeries(self.g, out)

    def max_abs_diff(self, other: "TensorSeries") -> float:
        self._check(other)
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.levels, other.levels))

    def to_dict(self) -> dict[str, list[float]]:
        """JSON-friendly map ``"i,j,k" -> [re, im]`` (degree 0 under ``""``)."""
        return {",".join(map(str, w)): [c.real, c.imag] for w, c in self.items()}

    def __repr__(self) -> str:
        return f"TensorSeries(g={self.g}, order={self.order})"


def _scalar_pullbacks(theta: Sequence[RationalMatrixForm], path: Path, eps_pole: float):
    if any(t.rank != 1 for t in theta):
        raise RankMismatch("Chen-Parshin basis forms must be scalar (rank 1)")
    return [pullback(t, path, eps_pole) for t in theta]


def chen_parshin(theta: Sequence[RationalMatrixForm], loop: Path, N: int, tol: float = DEFAULT_TOL,
                 cap: int = COEFFICIENT_CAP, eps_pole: float = EPS_POLE) -> TensorSeries:
    """All iterated integrals of the scalar basis ``theta`` along ``loop`` up to length ``N``.

    The coefficient of the word ``(i_1, ..., i_n)`` is
    ``int_loop theta_{i_1} ... theta_{i_n}``; the degree-0 coefficient is 1.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    if not loop.closed:
        raise NotClosed("Chen-Parshin series need a closed loop")
    g = len(theta)
    if g == 0:
        raise ValueError("need at least one basis form")
    if g**N > cap:
        raise TruncationTooLarge(f"{g}^{N} coefficients exceed the cap {cap}")
    if N == 0:
        return TensorSeries.unit(g, 0)
    pbs = _scalar_pullbacks(theta, loop, eps_pole)
    sizes = [g**n for n in range(1, N + 1)]
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    def rhs(k, s, y):
        v = np.array([complex(np.asarray(p.piece(k)(s)).reshape(())) for p in pbs])
        dy = np.empty_like(y)
        dy[: g] = v
        for n in range(1, N):
            lo, hi = offsets[n - 1], offsets[n]
            dy[offsets[n]: offsets[n + 1]] = np.multiply.outer(y[lo:hi], v).ravel()
        return dy

    y = integrate_ode(rhs, np.zeros(offsets[-1], dtype=complex), loop.intervals, tol)
    levels = [np.ones(())] + [
        y[offsets[n - 1]: offsets[n]].reshape((g,) * n) for n in range(1, N + 1)
    ]
    return TensorSeries(g, levels)


def monodromy_series(form: RationalMatrixForm, loop: Path, N: int, tol: float = DEFAULT_TOL,
                     eps_pole: float = EPS_POLE) -> np.ndarray:
    """Partial sum ``I + sum_{n=1}^N int_loop omega^n`` of the monodromy series."""
    if N < 0:
        raise ValueError("order must be non-negative")
    if not loop.closed:
        raise NotClosed("the monodromy series needs a closed loop")
    r = form.rank
    if N == 0:
        return np.eye(r, dtype=complex)
    pb = pullback(form, loop, eps_pole)

    def rhs(k, s, y):
        F = np.asarray(pb.piece(k)(s), dtype=complex)
        dy = np.empty_like(y)
        dy[0] = F
        dy[1:] = y[:-1] @ F
        return dy

    y = integrate_ode(rhs, np.zeros((N, r, r), dtype=complex), loop.intervals, tol)
    return np.eye(r, dtype=complex) + y.sum(axis=0)


def words(g: int, n: int) -> list[tuple[int, ...]]:
    return [tuple(int(i) for i in w) for w in np.ndindex((g,) * n)]


def coefficient_count(g: int, N: int) -> int:
    return sum(prod((g,) * n) for n in range(N + 1))
