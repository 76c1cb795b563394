"""Lie algebra generated by connection coefficients and reduction checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RankMismatch
from .forms import RationalMatrixForm

TOL_RANK = 1e-9

__all__ = ["LieBasis", "lie_closure", "reduction_check", "span_residual", "bracket"]


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _orthonormal_rows(rows: np.ndarray, tol_rank: float) -> np.ndarray:
    """Orthonormal basis (as rows) of the row space, cutting singular values
    below ``tol_rank`` times the largest."""
    if rows.shape[0] == 0:
        return rows
    _, sv, vh = np.linalg.svd(rows, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return rows[:0]
    r = int(np.sum(sv > tol_rank * sv[0]))
    return vh[:r]


@dataclass(frozen=True)
class LieBasis:
    """Frobenius-orthonormal basis of a matrix Lie algebra of ``n x n`` matrices."""

    n: int
    vectors: np.ndarray  # (dim, n*n), orthonormal rows

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def matrices(self) -> list[np.ndarray]:
        return [v.reshape(self.n, self.n) for v in self.vectors]

    def project(self, m: np.ndarray) -> np.ndarray:
        v = np.asarray(m, dtype=complex).reshape(-1)
        if self.dim == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        coords = self.vectors.conj() @ v
        return (coords @ self.vectors).reshape(self.n, self.n)

    def residual(self, m: np.ndarray) -> float:
        """Frobenius distance from ``m`` to the span."""
        return float(np.linalg.norm(np.asarray(m) - self.project(m)))

    def closure_defect(self) -> float:
        """Largest residual of a bracket of two basis elements."""
        mats = self.matrices
        worst = 0.0
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                worst = max(worst, self.residual(bracket(mats[i], mats[j])))
        return worst


def lie_closure(gens: Sequence[np.ndarray], tol_rank: float = TOL_RANK, n: int | None = None) -> LieBasis:
    """Smallest bracket-closed subspace containing ``gens``.

    Repeats ``span <- span + [span, span]`` with SVD-based rank decisions
    until the dimension stops growing.
    """
    mats = [np.asarray(g, dtype=complex) for g in gens]
    if not mats and n is None:
        raise ValueError("need at least one generator (or the ambient size n)")
    n = mats[0].shape[0] if mats else int(n)
    if any(m.shape != (n, n) for m in mats):
        raise RankMismatch("all generators must be n x n")
    basis = _orthonormal_rows(np.array([m.reshape(-1) for m in mats]).reshape(len(mats), n * n), tol_rank)
    for _ in range(n * n + 1):
        ms = [v.reshape(n, n) for v in basis]
        brackets = [bracket(ms[i], ms[j]).reshape(-1) for i in range(len(ms)) for j in range(i + 1, len(ms))]
        if not brackets:
            break
        new = _orthonormal_rows(np.vstack([basis, np.array(brackets)]), tol_rank)
        if new.shape[0] == basis.shape[0]:
            break
        basis = new
    return LieBasis(n, basis)


def span_residual(form: RationalMatrixForm, basis: LieBasis) -> float:
    """Largest relative distance from a coefficient of ``form`` to the span of ``basis``."""
    if form.rank != basis.n:
        raise RankMismatch(f"form has rank {form.rank}, basis acts on {basis.n}x{basis.n}")
    worst = 0.0
    for m in form.coefficients():
        scale = max(1.0, float(np.linalg.norm(m)))
        worst = max(worst, basis.residual(m) / scale)
    return worst


def reduction_check(form: RationalMatrixForm, basis: LieBasis, tol: float = 1e-8) -> bool:
    """Whether every coefficient matrix of ``form`` lies in the span of ``basis``.

    This is the computable content of the connection preserving the reduction
    to the holonomy group: the connection form takes values in its Lie algebra.
    """
    return span_residual(form, basis) <= tol
