"""Rational matrix-valued 1-forms on the punctured plane."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import RankMismatch

__all__ = ["RationalMatrixForm"]


def _as_matrix(m, n: int | None = None) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise RankMismatch(f"expected a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise RankMismatch(f"expected a {n}x{n} matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


class RationalMatrixForm:
    """``A(z) dz`` with ``A(z) = sum_k R_k / (z - p_k) + sum_j B_j z**j``.

    Parameters
    ----------
    poles : sequence of complex
        Distinct pole locations ``p_k``.
    residues : sequence of (n, n) arrays
        Residue matrices ``R_k``, one per pole.  Scalars are accepted and give
        a rank-1 form.
    polynomial : sequence of (n, n) arrays, optional
        Coefficients ``B_0, B_1, ...`` of the polynomial part.
    rank : int, optional
        Required when there are neither poles nor polynomial terms.

    Instances are immutable.
    """

    def __init__(self, poles: Sequence[complex] = (), residues: Sequence = (),
                 polynomial: Sequence = (), rank: int | None = None):
        poles = [complex(p) for p in poles]
        if len(poles) != len(residues):
            raise ValueError("need one residue per pole")
        if len(set(poles)) != len(poles):
            raise ValueError("poles must be pairwise distinct")
        mats = [_as_matrix(r) for r in residues] + [_as_matrix(b) for b in polynomial]
        if rank is None:
            if not mats:
                raise ValueError("rank is required for a form without terms")
            rank = mats[0].shape[0]
        mats = [_as_matrix(m, rank) for m in mats]
        self._rank = int(rank)
        self._poles = np.array(poles, dtype=complex)
        self._residues = np.array(mats[: len(poles)], dtype=complex).reshape(len(poles), rank, rank)
        self._poly = np.array(mats[len(poles):], dtype=complex).reshape(len(polynomial), rank, rank)
        for arr in (self._poles, self._residues, self._poly):
            arr.setflags(write=False)

    # -- constructors ---------------------------------------------------
    @classmethod
    def scalar(cls, poles: Sequence[complex] = (), residues: Sequence[complex] = (),
               polynomial: Sequence[complex] = ()) -> "RationalMatrixForm":
        return cls(poles, [[[r]] for r in residues], [[[b]] for b in polynomial], rank=1)

    @classmethod
    def zero(cls, rank: int) -> "RationalMatrixForm":
        return cls(rank=rank)

    # -- data -----------------------------------------------------------
    @property
    def rank(self) -> int:
        return self._rank

    @property
    def poles(self) -> np.ndarray:
        return self._poles

    @property
    def residues(self) -> np.ndarray:
        return self._residues

    @property
    def polynomial(self) -> np.ndarray:
        return self._poly

    def coefficients(self) -> list[np.ndarray]:
        """All coefficient matrices (residues, then polynomial coefficients)."""
        return list(self._residues) + list(self._poly)

    @property
    def is_traceless(self) -> bool:
        return all(abs(np.trace(m)) <= 1e-12 * max(1.0, np.abs(m).max()) for m in self.coefficients())

    @property
    def is_zero(self) -> bool:
        return all(not np.any(m) for m in self.coefficients())

    # -- evaluation -----------------------------------------------------
    def __call__(self, z: complex) -> np.ndarray:
        n = self._rank
        out = np.zeros((n, n), dtype=complex)
        if len(self._poles):
            out += np.tensordot(1.0 / (z - self._poles), self._residues, axes=1)
        if len(self._poly):
            out += np.tensordot(z ** np.arange(len(self._poly)), self._poly, axes=1)
        return out

    def trace_form(self) -> "RationalMatrixForm":
        return RationalMatrixForm.scalar(self._poles, [np.trace(r) for r in self._residues],
                                         [np.trace(b) for b in self._poly])

    def determinant(self, z: complex) -> complex:
        return complex(np.linalg.det(self(z)))

    # -- algebra --------------------------------------------------------
    def __add__(self, other: "RationalMatrixForm") -> "RationalMatrixForm":
        if other.rank != self.rank:
            raise RankMismatch(f"cannot add forms of rank {self.rank} and {other.rank}")
        poles = list(self._poles)
        res = [r.copy() for r in self._residues]
        for p, r in zip(other.poles, other.residues):
            if p in poles:
                res[poles.index(p)] = res[poles.index(p)] + r
            else:
                poles.append(p)
                res.append(r)
        m = max(len(self._poly), len(other.polynomial))
        poly = np.zeros((m, self.rank, self.rank), dtype=complex)
        poly[: len(self._poly)] += self._poly
        poly[: len(other.polynomial)] += other.polynomial
        return RationalMatrixForm(poles, res, list(poly), rank=self.rank)

    def __mul__(self, c: complex) -> "RationalMatrixForm":
        return RationalMatrixForm(self._poles, list(c * self._residues), list(c * self._poly), rank=self.rank)

    __rmul__ = __mul__

    def __neg__(self) -> "RationalMatrixForm":
        return self * -1

    def conjugated(self, g) -> "RationalMatrixForm":
        """Constant gauge transform ``g A g^-1``."""
        g = np.asarray(g, dtype=complex)
        gi = np.linalg.inv(g)
        return RationalMatrixForm(self._poles, [g @ r @ gi for r in self._residues],
                                  [g @ b @ gi for b in self._poly], rank=self.rank)

    @staticmethod
    def combine(coeffs: Iterable[np.ndarray], forms: Sequence["RationalMatrixForm"], rank: int) -> "RationalMatrixForm":
        """``sum_i theta_i * e_i`` for scalar forms ``theta_i`` and matrices ``e_i``."""
        total = RationalMatrixForm.zero(rank)
        for e, th in zip(coeffs, forms):
            if th.rank != 1:
                raise RankMismatch("combine expects scalar (rank 1) forms")
            e = _as_matrix(e, rank)
            total = total + RationalMatrixForm(th.poles, [r[0, 0] * e for r in th.residues],
                                               [b[0, 0] * e for b in th.polynomial], rank=rank)
        return total

    def __repr__(self) -> str:
        return (f"RationalMatrixForm(rank={self._rank}, poles={self._poles.tolist()}, "
                f"npoly={len(self._poly)})")
