"""Truncated quotients ``T(V) / (relations)`` and their matrix representations.

The tensor algebra ``T(V)`` on generators ``t_0, ..., t_{g-1}`` is truncated
at a finite degree.  Quadratic relations ``sum_ab c_ab t_a t_b`` are given as
``g x g`` coefficient matrices; the degree-``n`` slice of the two-sided ideal
they generate is spanned by ``e_u (x) r (x) e_v`` with ``|u| + |v| = n - 2``.
Words are tuples of 0-based generator indices ordered lexicographically,
which is the row-major order of the dense degree-``n`` arrays.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import CountMismatch, RankMismatch, RelationViolated, TruncationTooLarge
from .forms import RationalMatrixForm
from .iterated import TensorSeries, chen_parshin, iterated_integral
from .numerics import DEFAULT_TOL, max_abs
from .paths import Path
from .transport import EPS_POLE, monodromy

N_MAX = 12
RANK_TOL = 1e-10
HOM_TOL = 1e-8

__all__ = [
    "RelationSet",
    "AlgebraHom",
    "graded_dimension",
    "quotient_basis",
    "project",
    "validate_hom",
    "connection_from_hom",
    "verify_lemma_iterated",
    "chen_parshin_limit",
]


def _rank(m: np.ndarray, tol: float = RANK_TOL) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1.0))) if sv.size else 0


class RelationSet:
    """Quadratic relations on ``g`` generators; an empty list gives the free algebra."""

    def __init__(self, g: int, relations: Sequence = (), n_max: int = N_MAX):
        if g < 1:
            raise ValueError("need at least one generator")
        rels = [np.array(r, dtype=complex) for r in relations]
        for r in rels:
            if r.shape != (g, g):
                raise ValueError(f"relations must be {g}x{g} coefficient matrices")
        if rels and _rank(np.array([r.reshape(-1) for r in rels])) < len(rels):
            raise ValueError("relations must be linearly independent")
        self.g = g
        self.relations = tuple(rels)
        self.n_max = n_max
        self._normal_forms: dict[int, tuple[np.ndarray, list[int]]] = {}

    @classmethod
    def commutator(cls, g: int = 2, a: int = 0, b: int = 1) -> "RelationSet":
        c = np.zeros((g, g))
        c[a, b], c[b, a] = 1.0, -1.0
        return cls(g, [c])

    def _check_degree(self, n: int) -> None:
        if n < 0:
            raise ValueError("degree must be non-negative")
        if n > self.n_max:
            raise TruncationTooLarge(f"degree {n} exceeds the truncation limit {self.n_max}")

    def ideal_slice(self, n: int) -> np.ndarray:
        """``g**n x k`` matrix whose columns span the ideal in degree ``n``."""
        self._check_degree(n)
        g = self.g
        cols = []
        if n >= 2:
            for r in self.relations:
                rv = r.reshape(-1, 1)
                for a in range(n - 1):
                    b = n - 2 - a
                    cols.append(np.kron(np.eye(g**a), np.kron(rv, np.eye(g**b))))
        if not cols:
            return np.zeros((g**n, 0), dtype=complex)
        return np.hstack(cols)

    def normal_form(self, n: int) -> tuple[np.ndarray, list[int]]:
        """Projection onto the lex-first surviving monomials, and their indices.

        Returns ``(P, survivors)`` with ``P @ v`` the unique combination of
        surviving monomials congruent to ``v`` modulo the ideal.  Columns of
        ``P`` at surviving monomials are exact unit vectors, so ``P`` is
        idempotent bit-for-bit on its image.
        """
        if n in self._normal_forms:
            return self._normal_forms[n]
        self._check_degree(n)
        dim = self.g**n
        ideal = self.ideal_slice(n)
        if ideal.shape[1] == 0:
            result = (np.eye(dim, dtype=complex), list(range(dim)))
        else:
            u, sv, _ = np.linalg.svd(ideal, full_matrices=False)
            r = int(np.sum(sv > RANK_TOL * max(sv[0], 1.0)))
            q = u[:, :r]
            basis = [c for c in q.T]
            survivors = []
            for w in range(dim):
                e = np.zeros(dim, dtype=complex)
                e[w] = 1.0
                for b in basis:
                    e = e - np.vdot(b, e) * b
                nrm = np.linalg.norm(e)
                if nrm > 1e-8:
                    basis.append(e / nrm)
                    survivors.append(w)
            es = np.eye(dim, dtype=complex)[:, survivors]
            coords = np.linalg.solve(np.hstack([es, q]), np.eye(dim, dtype=complex))
            P = es @ coords[: len(survivors)]
            P[:, survivors] = np.eye(dim, dtype=complex)[:, survivors]
            result = (P, survivors)
        self._normal_forms[n] = result
        return result


def graded_dimension(rel: RelationSet, n: int) -> int:
    """Dimension of the degree-``n`` piece of the quotient algebra."""
    rel._check_degree(n)
    ideal = rel.ideal_slice(n)
    return rel.g**n - _rank(ideal)


def quotient_basis(rel: RelationSet, n: int) -> list[tuple[int, ...]]:
    """Surviving monomials of degree ``n`` (lex-first greedy choice)."""
    _, survivors = rel.normal_form(n)
    words = list(np.ndindex((rel.g,) * n))
    return [tuple(int(i) for i in words[w]) for w in survivors]


def project(series: TensorSeries, rel: RelationSet) -> TensorSeries:
    """Reduce each degree of ``series`` to its normal form modulo the relations."""
    if series.g != rel.g:
        raise CountMismatch(f"series has {series.g} generators, relations have {rel.g}")
    levels = []
    for n, a in enumerate(series.levels):
        P, _ = rel.normal_form(n)
        levels.append((P @ a.reshape(-1)).reshape(a.shape))
    return TensorSeries(series.g, levels)


class AlgebraHom:
    """Images ``e_i = f(t_i)`` of the generators in ``r x r`` matrices."""

    def __init__(self, images: Sequence, residual: float = 0.0):
        imgs = [np.array(e, dtype=complex) for e in images]
        if not imgs:
            raise ValueError("need at least one image")
        r = imgs[0].shape[0]
        if any(e.shape != (r, r) for e in imgs):
            raise RankMismatch("images must be square matrices of one size")
        self.images = tuple(imgs)
        self.rank = r
        self.residual = residual

    @property
    def g(self) -> int:
        return len(self.images)

    def apply_degree(self, coeffs: np.ndarray) -> np.ndarray:
        """``sum_w c_w e_{w_1} ... e_{w_n}`` for a degree-``n`` coefficient array."""
        E = np.array(self.images)
        a = np.asarray(coeffs, dtype=complex)
        if a.ndim == 0:
            return a * np.eye(self.rank, dtype=complex)
        acc = np.tensordot(a, E, axes=([0], [0]))  # (g,)*(n-1) + (r, r)
        while acc.ndim > 2:
            acc = np.einsum("i...ab,ibc->...ac", acc, E)
        return acc

    def apply(self, series: TensorSeries, degree: int | None = None) -> np.ndarray:
        if series.g != self.g:
            raise CountMismatch(f"series has {series.g} generators, hom has {self.g}")
        if degree is not None:
            return self.apply_degree(series.degree(degree))
        return sum(self.apply_degree(a) for a in series.levels)

    def __repr__(self) -> str:
        return f"AlgebraHom(g={self.g}, rank={self.rank}, residual={self.residual:.3g})"


def relation_residuals(images: Sequence[np.ndarray], rel: RelationSet) -> list[float]:
    out = []
    for c in rel.relations:
        m = sum(c[a, b] * (images[a] @ images[b]) for a in range(rel.g) for b in range(rel.g))
        out.append(float(np.linalg.norm(m)))
    return out


def validate_hom(images: Sequence, rel: RelationSet, tol: float = HOM_TOL) -> AlgebraHom:
    """Check that the images kill every relation (Frobenius norm) and wrap them."""
    if len(images) != rel.g:
        raise CountMismatch(f"got {len(images)} images for {rel.g} generators")
    hom = AlgebraHom(images)
    res = relation_residuals(hom.images, rel)
    for i, r in enumerate(res):
        if r > tol:
            raise RelationViolated(i, r)
    hom.residual = max(res, default=0.0)
    return hom


def left_regular(m: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> m X`` on row-major ``vec(X)``."""
    m = np.asarray(m, dtype=complex)
    return np.kron(m, np.eye(m.shape[0]))


def connection_from_hom(f: AlgebraHom, theta: Sequence[RationalMatrixForm],
                        left_regular_rep: bool = False) -> RationalMatrixForm:
    """The form ``sum_i theta_i e_i``; with ``left_regular_rep`` it acts on ``vec(R)`` by left multiplication."""
    if len(theta) != f.g:
        raise CountMismatch(f"got {len(theta)} basis forms for {f.g} generators")
    if left_regular_rep:
        imgs = [left_regular(e) for e in f.images]
        return RationalMatrixForm.combine(imgs, theta, f.rank**2)
    return RationalMatrixForm.combine(f.images, theta, f.rank)


def verify_lemma_iterated(f: AlgebraHom, theta: Sequence[RationalMatrixForm], loop: Path, n: int,
                          tol: float = DEFAULT_TOL, eps_pole: float = EPS_POLE) -> float:
    """Max-norm gap between ``f(J_n)`` (from the Chen-Parshin series) and
    ``int_loop phi^n`` (from the matrix iterated integral)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n == 0:
        return 0.0
    J = chen_parshin(theta, loop, n, tol, eps_pole=eps_pole)
    lhs = f.apply(J, degree=n)
    phi = connection_from_hom(f, theta)
    rhs = iterated_integral([phi] * n, loop, tol, eps_pole)
    return max_abs(lhs - rhs)


class LimitCheck(NamedTuple):
    partial_sum: np.ndarray
    reference: np.ndarray
    residual: float


def chen_parshin_limit(f: AlgebraHom, theta: Sequence[RationalMatrixForm], loop: Path, N: int,
                       tol: float = DEFAULT_TOL, eps_pole: float = EPS_POLE) -> LimitCheck:
    """Partial sum ``sum_{n<=N} f(J_n)`` against the monodromy acting on ``1_R``.

    The reference is computed independently by transporting the
    left-multiplication connection on ``vec(R)`` and applying it to the unit.
    """
    J = chen_parshin(theta, loop, N, tol, eps_pole=eps_pole)
    partial = f.apply(J)
    big = connection_from_hom(f, theta, left_regular_rep=True)
    mon = monodromy(big, loop, tol, eps_pole)
    reference = (mon @ np.eye(f.rank, dtype=complex).reshape(-1)).reshape(f.rank, f.rank)
    return LimitCheck(partial, reference, max_abs(partial - reference))
