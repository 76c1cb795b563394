"""Numerical monodromy of rational matrix connections on the punctured plane.

Parallel transport and monodromy, Chen iterated integrals and Chen-Parshin
series, WKB trace scans, holonomy Lie algebras and truncated quotient
algebras, each checkable against an independent second computation.
"""

from .algebra import (
    AlgebraHom,
    RelationSet,
    chen_parshin_limit,
    connection_from_hom,
    graded_dimension,
    project,
    quotient_basis,
    validate_hom,
    verify_lemma_iterated,
)
from .forms import RationalMatrixForm
from .holonomy import LieBasis, lie_closure, reduction_check
from .iterated import TensorSeries, chen_parshin, iterated_integral, monodromy_series
from .numerics import DEFAULT_TOL, SampledFunction, ode_transport, quadrature
from .paths import CircularArc, CubicBezier, LineSegment, Path, reverse_path
from .systems import (
    HiggsFamily,
    LogarithmicSystem,
    dimension_formulas,
    finiteness_probe,
    reality_check,
    residue_target,
    trace_coordinates,
    wkb_exponent,
    wkb_scan,
)
from .transport import LoopWord, MonodromyRep, monodromy, parallel_transport, pullback, representation

__version__ = "0.1.0"

__all__ = [
    "AlgebraHom",
    "chen_parshin",
    "chen_parshin_limit",
    "CircularArc",
    "connection_from_hom",
    "CubicBezier",
    "DEFAULT_TOL",
    "dimension_formulas",
    "finiteness_probe",
    "graded_dimension",
    "HiggsFamily",
    "iterated_integral",
    "lie_closure",
    "LieBasis",
    "LineSegment",
    "LogarithmicSystem",
    "LoopWord",
    "monodromy",
    "monodromy_series",
    "MonodromyRep",
    "ode_transport",
    "parallel_transport",
    "Path",
    "project",
    "pullback",
    "quadrature",
    "quotient_basis",
    "RationalMatrixForm",
    "reality_check",
    "reduction_check",
    "RelationSet",
    "representation",
    "residue_target",
    "reverse_path",
    "SampledFunction",
    "TensorSeries",
    "trace_coordinates",
    "validate_hom",
    "verify_lemma_iterated",
    "wkb_exponent",
    "wkb_scan",
]
