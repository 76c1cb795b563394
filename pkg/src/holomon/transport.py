"""Parallel transport, monodromy and monodromy representations.

Conventions
-----------
A lift ``e(s)`` of a path is parallel when ``e' + A(s) e = 0`` where
``A(s) = omega(z'(s))``; the transport ``P_gamma`` maps ``e(0)`` to ``e(1)``.
Loops compose left to right (``g1 * g2`` is ``g1`` followed by ``g2``), so the
monodromy of a loop is the transport along the reversed loop,
``Mon(gamma) = P_{gamma^-1}``, and ``Mon(g1 * g2) = Mon(g1) @ Mon(g2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BasePointMismatch, NotClosed, PoleTooClose
from .forms import RationalMatrixForm
from .numerics import DEFAULT_TOL, SampledFunction, max_abs, ode_transport
from .paths import Path

EPS_POLE = 1e-6
BASE_POINT_TOL = 1e-9

__all__ = [
    "EPS_POLE",
    "LoopWord",
    "MonodromyRep",
    "pullback",
    "parallel_transport",
    "monodromy",
    "representation",
    "word_path",
]


def check_pole_distance(form: RationalMatrixForm, path: Path, eps_pole: float = EPS_POLE) -> None:
    for k, p in enumerate(form.poles):
        d, s = path.distance_to(p)
        if d < eps_pole:
            raise PoleTooClose(k, s, d)


def pullback(form: RationalMatrixForm, path: Path, eps_pole: float = EPS_POLE) -> SampledFunction:
    """``s -> A(z(s)) z'(s)`` with the path's segment boundaries as breakpoints."""
    check_pole_distance(form, path, eps_pole)
    pieces = []
    for k in range(len(path)):
        z, dz = path.segment_maps(k)
        pieces.append(lambda s, z=z, dz=dz: form(z(s)) * dz(s))

    def evaluator(s):
        k, _ = path.locate(s)
        return pieces[k](s)

    return SampledFunction(evaluator, path.breakpoints, tuple(pieces))


def parallel_transport(form: RationalMatrixForm, path: Path, tol: float = DEFAULT_TOL,
                       eps_pole: float = EPS_POLE) -> np.ndarray:
    """The transport matrix ``P_path`` from ``path.start`` to ``path.end``."""
    return ode_transport(pullback(form, path, eps_pole), tol)


def monodromy(form: RationalMatrixForm, loop: Path, tol: float = DEFAULT_TOL,
              eps_pole: float = EPS_POLE) -> np.ndarray:
    """``Mon(loop)``: the transport along the reversed loop."""
    if not loop.closed:
        raise NotClosed("monodromy needs a closed loop")
    return parallel_transport(form, loop.reversed(), tol, eps_pole)


@dataclass(frozen=True)
class LoopWord:
    """A word in base loops: ``letters`` is a sequence of ``(index, +1 | -1)``."""

    letters: tuple[tuple[int, int], ...]

    def __post_init__(self):
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        if any(e not in (1, -1) for _, e in letters):
            raise ValueError("exponents must be +1 or -1")
        if any(i < 0 for i, _ in letters):
            raise ValueError("generator indices must be non-negative")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "LoopWord":
        """Parse ``"0 1^-1 2"``-style words (empty string is the identity)."""
        letters = []
        for tok in text.split():
            idx, _, exp = tok.partition("^")
            letters.append((int(idx), int(exp) if exp else 1))
        return cls(tuple(letters))

    def __mul__(self, other: "LoopWord") -> "LoopWord":
        return LoopWord(self.letters + other.letters)

    def inverse(self) -> "LoopWord":
        return LoopWord(tuple((i, -e) for i, e in reversed(self.letters)))

    def reduced(self) -> "LoopWord":
        out: list[tuple[int, int]] = []
        for i, e in self.letters:
            if out and out[-1] == (i, -e):
                out.pop()
            else:
                out.append((i, e))
        return LoopWord(tuple(out))

    def check_range(self, ngens: int) -> None:
        if any(i >= ngens for i, _ in self.letters):
            raise IndexError(f"word uses a generator outside 0..{ngens - 1}")

    def __len__(self) -> int:
        return len(self.letters)


def word_path(base_loops: Sequence[Path], word: LoopWord) -> Path:
    """Concatenate base loops (reversed for exponent -1) in word order."""
    word.check_range(len(base_loops))
    if not word.letters:
        return Path.constant(base_loops[0].start)
    parts = [base_loops[i] if e == 1 else base_loops[i].reversed() for i, e in word.letters]
    out = parts[0]
    for p in parts[1:]:
        out = out.then(p)
    return out


def evaluate_word(generators: Sequence[np.ndarray], word: LoopWord) -> np.ndarray:
    word.check_range(len(generators))
    n = generators[0].shape[0]
    inverses: dict[int, np.ndarray] = {}
    out = np.eye(n, dtype=complex)
    for i, e in word.letters:
        if e == 1:
            out = out @ generators[i]
        else:
            if i not in inverses:
                inverses[i] = np.linalg.inv(generators[i])
            out = out @ inverses[i]
    return out


@dataclass(frozen=True)
class MonodromyRep:
    """Monodromy matrices of a list of base loops.

    ``words`` / ``word_values`` hold any evaluated words; ``residual`` is the
    largest discrepancy between a word's product formula and the direct
    transport around its concatenated loop (``None`` when not checked).
    """

    generators: tuple[np.ndarray, ...]
    base_point: complex | None = None
    words: tuple[LoopWord, ...] = ()
    word_values: tuple[np.ndarray, ...] = ()
    residual: float | None = None
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        gens = tuple(np.array(g, dtype=complex) for g in self.generators)
        if not gens:
            raise ValueError("a representation needs at least one generator")
        n = gens[0].shape
        if any(g.shape != n or n[0] != n[1] for g in gens):
            raise ValueError("generators must be square matrices of one size")
        for g in gens:
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def rank(self) -> int:
        return self.generators[0].shape[0]

    def __len__(self) -> int:
        return len(self.generators)

    def evaluate(self, word: LoopWord) -> np.ndarray:
        return evaluate_word(self.generators, word)

    def conjugated(self, g) -> "MonodromyRep":
        g = np.asarray(g, dtype=complex)
        gi = np.linalg.inv(g)
        return MonodromyRep(tuple(g @ m @ gi for m in self.generators), self.base_point)


def representation(form: RationalMatrixForm, base_loops: Sequence[Path],
                   words: Sequence[LoopWord] = (), tol: float = DEFAULT_TOL,
                   check_paths: bool = False, eps_pole: float = EPS_POLE) -> MonodromyRep:
    """Monodromy of each base loop plus the product formula for each word.

    With ``check_paths=True`` each word is also transported directly along its
    concatenated loop and the largest max-norm discrepancy is reported.
    """
    if not base_loops:
        raise ValueError("need at least one base loop")
    base = base_loops[0].start
    for k, loop in enumerate(base_loops):
        if not loop.closed:
            raise NotClosed(f"base loop {k} is not closed")
        if abs(loop.start - base) > BASE_POINT_TOL:
            raise BasePointMismatch(f"base loop {k} starts at {loop.start}, expected {base}")
    gens = tuple(monodromy(form, loop, tol, eps_pole) for loop in base_loops)
    values = tuple(evaluate_word(gens, w) for w in words)
    residual = None
    if check_paths and words:
        residual = max(
            max_abs(v - monodromy(form, word_path(base_loops, w), tol, eps_pole))
            for w, v in zip(words, values)
        )
    return MonodromyRep(gens, base, tuple(words), values, residual)
