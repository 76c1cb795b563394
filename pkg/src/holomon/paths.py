"""Piecewise-analytic paths in the complex plane.

A :class:`Path` is an ordered list of segments (line segments, circular arcs,
cubic Bezier curves).  Segment ``k`` of ``K`` occupies the parameter range
``[k/K, (k+1)/K]`` of the global parameter ``s`` in ``[0, 1]``; those
multiples of ``1/K`` are the path's breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

CLOSED_TOL = 1e-12
CONTINUITY_TOL = 1e-12

__all__ = [
    "LineSegment",
    "CircularArc",
    "CubicBezier",
    "Path",
    "reverse_path",
]


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    def point(self, u: float) -> complex:
        return self.start + (self.end - self.start) * u

    def derivative(self, u: float) -> complex:
        return self.end - self.start

    def reversed(self) -> "LineSegment":
        return LineSegment(self.end, self.start)

    def closest(self, p: complex) -> tuple[float, float]:
        """Return ``(distance, u)`` of the point of the segment closest to ``p``."""
        d = self.end - self.start
        if d == 0:
            return abs(p - self.start), 0.0
        u = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        u = min(1.0, max(0.0, u))
        return abs(p - self.point(u)), u


@dataclass(frozen=True)
class CircularArc:
    """``center + radius * exp(i*theta)`` with theta running linearly from ``theta0`` to ``theta1``."""

    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, u: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * u
        return self.center + self.radius * np.exp(1j * th)

    def derivative(self, u: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * u
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)

    def reversed(self) -> "CircularArc":
        return CircularArc(self.center, self.radius, self.theta1, self.theta0)

    def closest(self, p: complex) -> tuple[float, float]:
        span = self.theta1 - self.theta0
        candidates = [0.0, 1.0]
        if span != 0 and p != self.center:
            phi = np.angle(p - self.center)
            # every u in [0, 1] whose angle is congruent to phi
            lo, hi = sorted((self.theta0, self.theta1))
            m0 = np.ceil((lo - phi) / (2 * np.pi))
            m1 = np.floor((hi - phi) / (2 * np.pi))
            for m in np.arange(m0, m1 + 1):
                candidates.append((phi + 2 * np.pi * m - self.theta0) / span)
        best = min(candidates, key=lambda u: abs(p - self.point(u)))
        return abs(p - self.point(best)), float(best)


@dataclass(frozen=True)
class CubicBezier:
    p0: complex
    p1: complex
    p2: complex
    p3: complex

    def point(self, u: float) -> complex:
        v = 1 - u
        return v**3 * self.p0 + 3 * v**2 * u * self.p1 + 3 * v * u**2 * self.p2 + u**3 * self.p3

    def derivative(self, u: float) -> complex:
        v = 1 - u
        return 3 * (v**2 * (self.p1 - self.p0) + 2 * v * u * (self.p2 - self.p1) + u**2 * (self.p3 - self.p2))

    def reversed(self) -> "CubicBezier":
        return CubicBezier(self.p3, self.p2, self.p1, self.p0)

    def closest(self, p: complex) -> tuple[float, float]:
        us = np.linspace(0.0, 1.0, 257)
        d = np.abs(p - self.point(us))
        i = int(np.argmin(d))
        lo, hi = us[max(i - 1, 0)], us[min(i + 1, len(us) - 1)]
        res = minimize_scalar(lambda u: abs(p - self.point(u)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < d[i]:
            return float(res.fun), float(res.x)
        return float(d[i]), float(us[i])


Segment = LineSegment | CircularArc | CubicBezier


class Path:
    """Continuous concatenation of segments, parametrized by ``s`` in ``[0, 1]``."""

    def __init__(self, segments: Sequence[Segment]):
        segments = tuple(segments)
        if not segments:
            raise ValueError("a path needs at least one segment")
        for a, b in zip(segments, segments[1:]):
            gap = abs(a.point(1.0) - b.point(0.0))
            if gap > CONTINUITY_TOL * max(1.0, abs(b.point(0.0))):
                raise ValueError(f"segments do not join (gap {gap:.3g})")
        self._segments = segments

    # -- constructors ---------------------------------------------------
    @classmethod
    def circle(cls, center: complex = 0.0, radius: float = 1.0, start_angle: float = 0.0,
               turns: float = 1.0) -> "Path":
        """Counter-clockwise circle (clockwise for negative ``turns``) as a single arc."""
        return cls([CircularArc(complex(center), float(radius), start_angle,
                                start_angle + 2 * np.pi * turns)])

    @classmethod
    def polyline(cls, points: Sequence[complex]) -> "Path":
        pts = [complex(p) for p in points]
        if len(pts) < 2:
            raise ValueError("a polyline needs at least two points")
        return cls([LineSegment(a, b) for a, b in zip(pts, pts[1:])])

    @classmethod
    def constant(cls, point: complex) -> "Path":
        return cls([LineSegment(complex(point), complex(point))])

    @classmethod
    def keyhole(cls, base: complex, center: complex, radius: float) -> "Path":
        """Loop based at ``base``: straight out to the circle, once around it, straight back."""
        base, center = complex(base), complex(center)
        theta = float(np.angle(base - center))
        entry = center + radius * np.exp(1j * theta)
        return cls([
            LineSegment(base, entry),
            CircularArc(center, radius, theta, theta + 2 * np.pi),
            LineSegment(entry, base),
        ])

    # -- basic data -----------------------------------------------------
    @property
    def segments(self) -> tuple[Segment, ...]:
        return self._segments

    @property
    def start(self) -> complex:
        return complex(self._segments[0].point(0.0))

    @property
    def end(self) -> complex:
        return complex(self._segments[-1].point(1.0))

    @property
    def closed(self) -> bool:
        return abs(self.start - self.end) <= CLOSED_TOL * max(1.0, abs(self.start))

    @property
    def breakpoints(self) -> tuple[float, ...]:
        K = len(self._segments)
        return tuple(k / K for k in range(1, K))

    @property
    def intervals(self) -> list[tuple[float, float]]:
        K = len(self._segments)
        return [(k / K, (k + 1) / K) for k in range(K)]

    def locate(self, s: float) -> tuple[int, float]:
        """Segment index and local parameter for global parameter ``s``."""
        K = len(self._segments)
        k = min(int(s * K), K - 1)
        return k, s * K - k

    def point(self, s: float) -> complex:
        k, u = self.locate(s)
        return complex(self._segments[k].point(u))

    def derivative(self, s: float) -> complex:
        k, u = self.locate(s)
        return complex(len(self._segments) * self._segments[k].derivative(u))

    def segment_maps(self, k: int):
        """``(z(s), z'(s))`` callables for segment ``k``, valid on its closed interval."""
        K = len(self._segments)
        seg = self._segments[k]
        return (lambda s: seg.point(s * K - k)), (lambda s: K * seg.derivative(s * K - k))

    def sample(self, n: int = 65) -> np.ndarray:
        return np.array([self.point(s) for s in np.linspace(0.0, 1.0, n)])

    # -- operations -----------------------------------------------------
    def reversed(self) -> "Path":
        return Path([seg.reversed() for seg in reversed(self._segments)])

    def then(self, other: "Path") -> "Path":
        """This path followed by ``other``."""
        return Path(self._segments + other.segments)

    def distance_to(self, p: complex) -> tuple[float, float]:
        """Minimal distance to ``p`` and the global parameter where it occurs."""
        K = len(self._segments)
        best = (np.inf, 0.0)
        for k, seg in enumerate(self._segments):
            d, u = seg.closest(p)
            if d < best[0]:
                best = (d, (k + u) / K)
        return best

    def __len__(self) -> int:
        return len(self._segments)

    def __eq__(self, other) -> bool:
        return isinstance(other, Path) and self._segments == other._segments

    def __hash__(self) -> int:
        return hash(self._segments)

    def __repr__(self) -> str:
        return f"Path({list(self._segments)!r})"


def reverse_path(path: Path) -> Path:
    """Orientation reversal; an involution."""
    return path.reversed()
