"""Logarithmic SL(2, C) systems, trace coordinates, reality and WKB scans."""

from __future__ import annotations

import csv
import io
import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadGenus, BranchPointOnPath, ExplosionGuard, NotClosed, RankMismatch, WrongGeneratorCount
from .forms import RationalMatrixForm
from .numerics import DEFAULT_TOL, SampledFunction, max_abs, quadrature
from .paths import Path
from .transport import EPS_POLE, MonodromyRep, check_pole_distance, parallel_transport

WORD_CAP = 10**6
BRANCH_POINT_TOL = 1e-12
FINITENESS_TOL = 1e-6
DIVERGENCE_NORM = 1e6
TRACE_CONVENTION = "x=tr(M1 M2), y=tr(M2 M3), z=tr(M1 M3)"
CSV_HEADER = ("t", "re_tr", "im_tr", "re_norm", "im_norm", "rel_change")

__all__ = [
    "LogarithmicSystem",
    "HiggsFamily",
    "residue_target",
    "dimension_formulas",
    "trace_coordinates",
    "reality_check",
    "SqrtDetBranch",
    "wkb_exponent",
    "wkb_scan",
    "finiteness_probe",
]


# ---------------------------------------------------------------------------
# closed formulas
# ---------------------------------------------------------------------------

def residue_target(g: int) -> tuple[Fraction, Fraction]:
    """Residue eigenvalues ``(+g/(2(g+1)), -g/(2(g+1)))`` for genus ``g``."""
    if not isinstance(g, (int, np.integer)) or isinstance(g, bool) or g < 2:
        raise BadGenus(f"genus must be an integer >= 2, got {g!r}")
    mu = Fraction(int(g), 2 * (int(g) + 1))
    return mu, -mu


def dimension_formulas(g: int, d: int, c: int) -> tuple[int, int]:
    """Dimensions of the character variety and of the space of differential systems.

    ``d`` is the dimension of the commutator subgroup ``[G, G]`` and ``c`` is
    ``dim G - d``.  Returns ``(2(g-1)d + 2gc, (g-1)(d+3) + gc)``.
    """
    if g < 2:
        raise BadGenus(f"genus must be >= 2, got {g!r}")
    if d < 0 or c < 0:
        raise ValueError("d and c must be non-negative")
    g, d, c = int(g), int(d), int(c)
    return 2 * (g - 1) * d + 2 * g * c, (g - 1) * (d + 3) + g * c


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------

class LogarithmicSystem:
    """Rank-2 Fuchsian system with 3 or 4 finite poles and traceless residues.

    With ``equivariant=True`` every residue must have eigenvalues
    ``+-g/(2(g+1))`` (within ``1e-9``).
    """

    def __init__(self, form: RationalMatrixForm, genus: int = 2, equivariant: bool = False):
        if form.rank != 2:
            raise RankMismatch("logarithmic SL(2) systems have rank 2")
        if len(form.poles) not in (3, 4):
            raise ValueError("expected 3 or 4 poles")
        if len(form.polynomial) and np.any(form.polynomial):
            raise ValueError("logarithmic systems have no polynomial part")
        if not form.is_traceless:
            raise ValueError("residues must be traceless")
        mu = float(residue_target(genus)[0])
        if equivariant:
            for k, r in enumerate(form.residues):
                ev = np.sort_complex(np.linalg.eigvals(r))
                if max_abs(ev - np.array([-mu, mu])) > 1e-9:
                    raise ValueError(f"residue {k} has eigenvalues {ev}, expected +-{mu}")
        self.form = form
        self.genus = genus
        self.equivariant = equivariant

    @classmethod
    def random(cls, poles: Sequence[complex], genus: int = 2, rng=None, spread: float = 0.5) -> "LogarithmicSystem":
        """Equivariant system whose residues are random SL(2, C) conjugates of ``diag(mu, -mu)``."""
        rng = np.random.default_rng(rng)
        mu = float(residue_target(genus)[0])
        res = []
        for _ in poles:
            g = np.eye(2) + spread * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            g = g / np.sqrt(np.linalg.det(g))
            res.append(g @ np.diag([mu, -mu]) @ np.linalg.inv(g))
        return cls(RationalMatrixForm(poles, res), genus, equivariant=True)


@dataclass(frozen=True)
class HiggsFamily:
    """The family ``base + t * higgs`` for real ``t``."""

    base: RationalMatrixForm
    higgs: RationalMatrixForm

    def __post_init__(self):
        if self.base.rank != self.higgs.rank:
            raise RankMismatch("base connection and Higgs field must share a rank")

    def member(self, t: float) -> RationalMatrixForm:
        return self.base + self.higgs * t

    def det_higgs(self, z: complex) -> complex:
        return self.higgs.determinant(z)


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

class TraceCoordinates(NamedTuple):
    x: complex
    y: complex
    z: complex
    boundary: tuple[complex, complex, complex, complex]
    convention: str = TRACE_CONVENTION


def _generators(rep) -> list[np.ndarray]:
    gens = rep.generators if isinstance(rep, MonodromyRep) else rep
    return [np.asarray(m, dtype=complex) for m in gens]


def trace_coordinates(rep) -> TraceCoordinates:
    """Traces of pairwise products plus ``tr M_i`` and ``tr(M1 M2 M3)``."""
    m = _generators(rep)
    if len(m) != 3:
        raise WrongGeneratorCount(f"trace coordinates need 3 generators, got {len(m)}")
    m1, m2, m3 = m
    tr = lambda a: complex(np.trace(a))
    return TraceCoordinates(
        tr(m1 @ m2), tr(m2 @ m3), tr(m1 @ m3),
        (tr(m1), tr(m2), tr(m3), tr(m1 @ m2 @ m3)),
    )


class RealityResult(NamedTuple):
    real: bool
    max_imag: float
    words_checked: int


def reduced_word_count(k: int, L: int) -> int:
    return sum(2 * k * (2 * k - 1) ** (n - 1) for n in range(1, L + 1))


def reality_check(rep, L: int, tol: float = 1e-9) -> RealityResult:
    """Largest ``|Im tr|`` over all reduced words of length ``1..L``."""
    if L < 1:
        raise ValueError("word length must be >= 1")
    gens = _generators(rep)
    k = len(gens)
    count = reduced_word_count(k, L)
    if count > WORD_CAP:
        raise ExplosionGuard(f"{count} reduced words exceed the cap {WORD_CAP}")
    letters = [(i, e) for i in range(k) for e in (1, -1)]
    mats = {(i, 1): gens[i] for i in range(k)} | {(i, -1): np.linalg.inv(gens[i]) for i in range(k)}
    frontier = [((i, e), mats[(i, e)]) for i, e in letters]
    worst = 0.0
    checked = 0
    for n in range(1, L + 1):
        for _, m in frontier:
            worst = max(worst, abs(np.trace(m).imag))
        checked += len(frontier)
        if n == L:
            break
        frontier = [
            ((i, e), m @ mats[(i, e)])
            for last, m in frontier
            for i, e in letters
            if (i, e) != (last[0], -last[1])
        ]
    return RealityResult(worst <= tol, worst, checked)


# ---------------------------------------------------------------------------
# WKB
# ---------------------------------------------------------------------------

class SqrtDetBranch:
    """Continuous branch of the square root of ``det Psi`` along a path.

    ``convention="eigenvalue"`` (default) takes ``lambda(z) = sqrt(-det Psi(z))``,
    the eigenvalue 1-form of a traceless rank-2 Higgs field, which is the rate
    that governs growth of the transport of ``t * Psi``.  ``"determinant"``
    takes ``sqrt(det Psi(z))`` literally; the two differ by a factor ``+-i``.

    The branch is tracked on a sample grid refined until consecutive samples
    differ by less than a quarter of their modulus, and evaluated elsewhere by
    picking the square root nearest the neighbouring grid sample.
    """

    def __init__(self, higgs: RationalMatrixForm, path: Path, convention: str = "eigenvalue",
                 start_sign: int | None = None, samples_per_segment: int = 256, max_refine: int = 8):
        if convention not in ("eigenvalue", "determinant"):
            raise ValueError("convention must be 'eigenvalue' or 'determinant'")
        self.higgs = higgs
        self.path = path
        self._sign = -1.0 if convention == "eigenvalue" else 1.0
        K = len(path)
        for _ in range(max_refine + 1):
            s = np.unique(np.concatenate([np.linspace(a, b, samples_per_segment + 1) for a, b in path.intervals]))
            lam = self._raw(s)
            aligned = self._align(lam)
            jumps = np.abs(np.diff(aligned))
            scale = np.minimum(np.abs(aligned[1:]), np.abs(aligned[:-1]))
            if np.all(jumps <= 0.25 * scale):
                break
            samples_per_segment *= 2
        else:
            raise BranchPointOnPath("could not resolve a continuous square-root branch along the path")
        if start_sign is None:
            w0 = aligned[0] * path.derivative(0.0)
            start_sign = -1 if w0.real > 0 else 1
        self.start_sign = int(start_sign)
        self.s = s
        self.lam = aligned * start_sign
        self._K = K

    def _det(self, z: complex) -> complex:
        return self.higgs.determinant(z)

    def _raw(self, s: np.ndarray) -> np.ndarray:
        q = np.empty(len(s), dtype=complex)
        for i, si in enumerate(s):
            z = self.path.point(si)
            d = self._det(z)
            if abs(d) < BRANCH_POINT_TOL:
                raise BranchPointOnPath(f"det Psi vanishes on the path near s={si:.6g} (z={z:.6g})")
            q[i] = self._sign * d
        return np.sqrt(q)

    @staticmethod
    def _align(lam: np.ndarray) -> np.ndarray:
        out = lam.copy()
        for i in range(1, len(out)):
            if abs(out[i] - out[i - 1]) > abs(out[i] + out[i - 1]):
                out[i] = -out[i]
        return out

    def lam_at(self, s: float) -> complex:
        i = int(np.clip(np.searchsorted(self.s, s), 0, len(self.s) - 1))
        j = max(i - 1, 0)
        ref = self.lam[i] if abs(self.s[i] - s) <= abs(self.s[j] - s) else self.lam[j]
        root = np.sqrt(self._sign * self._det(self.path.point(s)))
        return root if abs(root - ref) <= abs(root + ref) else -root

    def density(self, s: float, k: int | None = None) -> complex:
        """``sqrt(det Psi)(z'(s))``; ``k`` selects the segment's one-sided derivative."""
        if k is None:
            dz = self.path.derivative(s)
        else:
            dz = self.path.segment_maps(k)[1](s)
        return self.lam_at(s) * dz

    def sampled_density(self) -> np.ndarray:
        return np.array([self.density(s) for s in self.s])

    @property
    def closes_up(self) -> bool:
        """False when the branch comes back with the opposite sign around a closed path."""
        return abs(self.lam[-1] - self.lam[0]) <= abs(self.lam[-1] + self.lam[0])

    def as_sampled_function(self) -> SampledFunction:
        pieces = tuple((lambda s, k=k: self.density(s, k)) for k in range(self._K))
        return SampledFunction(self.density, self.path.breakpoints, pieces)


class WKBExponent(NamedTuple):
    value: complex
    admissible: bool


def wkb_exponent(higgs: RationalMatrixForm, loop: Path, tol: float = DEFAULT_TOL,
                 convention: str = "eigenvalue", flip: bool = False,
                 eps_pole: float = EPS_POLE) -> WKBExponent:
    """``int_loop sqrt(det Psi)`` and whether ``Re sqrt(det Psi)(gamma') < 0`` everywhere.

    The branch starts with non-positive real part at ``s = 0``; ``flip=True``
    uses the opposite branch.
    """
    if not loop.closed:
        raise NotClosed("the WKB exponent is defined for closed loops")
    check_pole_distance(higgs, loop, eps_pole)
    branch = SqrtDetBranch(higgs, loop, convention)
    if flip:
        branch = SqrtDetBranch(higgs, loop, convention, start_sign=-branch.start_sign)
    if not branch.closes_up:
        warnings.warn("square-root branch changes sign around the loop", RuntimeWarning, stacklevel=2)
    value = complex(quadrature(branch.as_sampled_function(), tol))
    admissible = bool(np.all(branch.sampled_density().real < 0))
    return WKBExponent(value, admissible)


class WKBRow(NamedTuple):
    t: float
    trace: complex
    normalized: complex
    rel_change: float


@dataclass(frozen=True)
class WKBScan:
    rows: tuple[WKBRow, ...]
    exponent: complex
    admissible: bool

    @property
    def stabilization(self) -> float:
        """Relative change between the last two normalized values."""
        return self.rows[-1].rel_change if len(self.rows) > 1 else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(["%.17g" % v for v in (r.t, r.trace.real, r.trace.imag,
                                             r.normalized.real, r.normalized.imag, r.rel_change)])
        return buf.getvalue()


def wkb_scan(family: HiggsFamily, loop: Path, t_grid: Sequence[float], tol: float = DEFAULT_TOL,
             convention: str = "eigenvalue", eps_pole: float = EPS_POLE) -> WKBScan:
    """Trace of ``P_loop(base + t*higgs)`` and its WKB normalization for each ``t``.

    The normalized value is ``tr P * exp(t * int sqrt(det Psi))``; ``rel_change``
    is ``|N_i - N_{i-1}| / |N_{i-1}|`` (NaN on the first row).
    """
    ts = [float(t) for t in t_grid]
    if not ts:
        raise ValueError("empty t grid")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t grid must be strictly increasing")
    if family.higgs.is_zero:
        # every member is the base connection; the trace is its own normalization
        exp_value, admissible = 0j, False
    else:
        exp_value, admissible = wkb_exponent(family.higgs, loop, tol, convention, eps_pole=eps_pole)
    if not admissible:
        warnings.warn("loop is not WKB admissible for this Higgs field", RuntimeWarning, stacklevel=2)
    rows = []
    prev = None
    for t in ts:
        P = parallel_transport(family.member(t), loop, tol, eps_pole)
        tr = complex(np.trace(P))
        norm = tr * np.exp(t * exp_value)
        rel = float("nan") if prev is None or prev == 0 else abs(norm - prev) / abs(prev)
        rows.append(WKBRow(t, tr, complex(norm), rel))
        prev = norm
    return WKBScan(tuple(rows), exp_value, admissible)


def parse_t_grid(text: str) -> list[float]:
    """``"1,2,5"`` or ``"start:stop:geometric|linear[:count]"`` (count defaults to 12)."""
    if ":" not in text:
        return [float(v) for v in text.split(",") if v.strip()]
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"bad t grid {text!r}")
    start, stop, kind = float(parts[0]), float(parts[1]), parts[2]
    count = int(parts[3]) if len(parts) == 4 else 12
    if kind == "geometric":
        return list(np.geomspace(start, stop, count))
    if kind == "linear":
        return list(np.linspace(start, stop, count))
    raise ValueError(f"unknown grid kind {kind!r}")


# ---------------------------------------------------------------------------
# finiteness
# ---------------------------------------------------------------------------

class FinitenessResult(NamedTuple):
    finite: bool | None
    order: int | None
    diverged: bool


def finiteness_probe(rep, cap: int = 10_000, tol: float = FINITENESS_TOL,
                     divergence_norm: float = DIVERGENCE_NORM) -> FinitenessResult:
    """Breadth-first closure of the group generated by ``rep``.

    Elements closer than ``tol`` entrywise are identified.  Returns the order
    when the closure stabilizes with at most ``cap`` elements; otherwise
    ``finite=None`` (unknown), with ``diverged`` set once some element has an
    entry larger than ``divergence_norm``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    gens = _generators(rep)
    n = gens[0].shape[0]
    steps = gens + [np.linalg.inv(g) for g in gens]
    elements = [np.eye(n, dtype=complex)]
    stack = np.eye(n, dtype=complex)[None]
    frontier = [elements[0]]
    while frontier:
        new = []
        for m, s in itertools.product(frontier, steps):
            c = m @ s
            if max_abs(c) > divergence_norm:
                return FinitenessResult(None, None, True)
            if np.min(np.max(np.abs(stack - c), axis=(1, 2))) < tol:
                continue
            elements.append(c)
            stack = np.concatenate([stack, c[None]])
            new.append(c)
            if len(elements) > cap:
                return FinitenessResult(None, None, False)
        frontier = new
    return FinitenessResult(True, len(elements), False)
