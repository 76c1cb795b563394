"""Command line front end.

Usage::

    holomon COMMAND SPEC.json [options]

Results are written as JSON (CSV for ``wkb-scan``) to ``--out`` or stdout.
Exit status is 0 on success, 1 when a computation fails and 2 for bad input.
Errors are reported as ``{"error": {"kind": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

import jsonschema
import numpy as np

from . import __version__
from .algebra import RelationSet, graded_dimension, quotient_basis
from .errors import HolomonError, InputError, ParseError, SchemaError
from .forms import RationalMatrixForm
from .holonomy import lie_closure, reduction_check
from .iterated import chen_parshin
from .numerics import DEFAULT_TOL, max_abs
from .paths import CircularArc, CubicBezier, LineSegment, Path
from .systems import (
    HiggsFamily,
    finiteness_probe,
    parse_t_grid,
    reality_check,
    trace_coordinates,
    wkb_scan,
)
from .transport import LoopWord, evaluate_word, monodromy, representation, word_path

COMMANDS = ("monodromy", "traces", "reality", "wkb-scan", "chen-parshin",
            "lie-closure", "algebra-dims", "finiteness", "selfcheck")


# ---------------------------------------------------------------------------
# spec loading
# ---------------------------------------------------------------------------

@dataclass
class SystemSpec:
    rank: int
    form: RationalMatrixForm
    loops: dict[str, Path]
    words: dict[str, LoopWord] = field(default_factory=dict)
    higgs: RationalMatrixForm | None = None
    theta: list[RationalMatrixForm] | None = None
    algebra: RelationSet | None = None
    generators: list[np.ndarray] | None = None
    genus: int | None = None

    @property
    def loop_names(self) -> list[str]:
        return list(self.loops)


def _schema() -> dict:
    return json.loads(resources.files("holomon").joinpath("spec-schema.json").read_text())


def _c(pair) -> complex:
    return complex(pair[0], pair[1])


def _matrix(rows, field_name: str, rank: int | None = None) -> np.ndarray:
    n = len(rows)
    if any(len(r) != n for r in rows) or (rank is not None and n != rank):
        what = f"square of declared rank {rank}" if rank is not None else "square"
        raise SchemaError(field_name, f"matrix must be {what}")
    return np.array([[_c(x) for x in r] for r in rows], dtype=complex)


def _poles(raw, field_name: str) -> list[complex]:
    pts = [_c(p) for p in raw]
    if len(set(pts)) != len(pts):
        raise SchemaError(field_name, "poles distinct: duplicate pole")
    return pts


def _matrix_form(doc: dict, rank: int, prefix: str) -> RationalMatrixForm:
    poles = _poles(doc.get("poles", []), f"{prefix}poles")
    res = [_matrix(m, f"{prefix}residues[{i}]", rank) for i, m in enumerate(doc.get("residues", []))]
    if len(res) != len(poles):
        raise SchemaError(f"{prefix}residues", "need exactly one residue matrix per pole")
    poly = [_matrix(m, f"{prefix}polynomial[{i}]", rank) for i, m in enumerate(doc.get("polynomial", []))]
    return RationalMatrixForm(poles, res, poly, rank=rank)


def _scalar_form(doc: dict, prefix: str) -> RationalMatrixForm:
    poles = _poles(doc.get("poles", []), f"{prefix}poles")
    res = [_c(r) for r in doc.get("residues", [])]
    if len(res) != len(poles):
        raise SchemaError(f"{prefix}residues", "need exactly one residue per pole")
    return RationalMatrixForm.scalar(poles, res, [_c(b) for b in doc.get("polynomial", [])])


def _loop(doc: dict, name: str) -> Path:
    kind = doc["kind"]
    try:
        if kind == "circle":
            return Path.circle(_c(doc.get("center", [0, 0])), doc["radius"],
                               doc.get("start_angle", 0.0), doc.get("turns", 1.0))
        if kind == "polyline":
            return Path.polyline([_c(p) for p in doc["points"]])
        if kind == "keyhole":
            return Path.keyhole(_c(doc["base"]), _c(doc["center"]), doc["radius"])
        segs = []
        for s in doc["segments"]:
            if s["kind"] == "line":
                segs.append(LineSegment(_c(s["start"]), _c(s["end"])))
            elif s["kind"] == "arc":
                segs.append(CircularArc(_c(s["center"]), s["radius"], s["theta0"], s["theta1"]))
            else:
                segs.append(CubicBezier(*[_c(p) for p in s["points"]]))
        return Path(segs)
    except ValueError as exc:
        raise SchemaError(f"loops.{name}", str(exc)) from None


def parse_spec(doc: Any) -> SystemSpec:
    """Validate a decoded JSON document and build a :class:`SystemSpec`."""
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(where, err.message)
    rank = doc["rank"]
    form = _matrix_form(doc, rank, "")
    loops = {name: _loop(ld, name) for name, ld in doc["loops"].items()}
    names = list(loops)
    words = {}
    for wname, letters in doc.get("words", {}).items():
        for loop_name, _ in letters:
            if loop_name not in loops:
                raise SchemaError(f"words.{wname}", f"undefined loop {loop_name!r}")
        words[wname] = LoopWord(tuple((names.index(ln), e) for ln, e in letters))
    higgs = _matrix_form(doc["higgs"], rank, "higgs.") if "higgs" in doc else None
    theta = [_scalar_form(t, f"theta[{i}].") for i, t in enumerate(doc["theta"])] if "theta" in doc else None
    algebra = None
    if "algebra" in doc:
        g = doc["algebra"]["generators"]
        rels = [_matrix(m, f"algebra.relations[{i}]", g) for i, m in enumerate(doc["algebra"].get("relations", []))]
        try:
            algebra = RelationSet(g, rels)
        except ValueError as exc:
            raise SchemaError("algebra.relations", str(exc)) from None
    gens = None
    if "generators" in doc:
        gens = [_matrix(m, f"generators[{i}]") for i, m in enumerate(doc["generators"])]
        if any(m.shape != gens[0].shape for m in gens):
            raise SchemaError("generators", "all generators must share one size")
    return SystemSpec(rank, form, loops, words, higgs, theta, algebra, gens, doc.get("genus"))


def load_spec(path: str) -> SystemSpec:
    """Read, parse and validate a JSON system description."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return parse_spec(doc)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(m: np.ndarray) -> list:
    return [[encode_complex(x) for x in row] for row in np.asarray(m)]


def decode_matrix(rows) -> np.ndarray:
    return np.array([[complex(x[0], x[1]) for x in r] for r in rows], dtype=complex)


def _select_loops(spec: SystemSpec, names: Sequence[str] | None) -> list[str]:
    if not names:
        return spec.loop_names
    for n in names:
        if n not in spec.loops:
            raise InputError(f"undefined loop {n!r}")
    return list(names)


def _group_generators(spec: SystemSpec, args) -> list[np.ndarray]:
    if spec.generators is not None and not args.loop:
        return spec.generators
    names = _select_loops(spec, args.loop)
    return [monodromy(spec.form, spec.loops[n], args.tol) for n in names]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_monodromy(spec: SystemSpec, args) -> dict:
    names = _select_loops(spec, args.loop)
    mats = {n: monodromy(spec.form, spec.loops[n], args.tol) for n in names}
    out: dict[str, Any] = {"loops": {n: encode_matrix(m) for n, m in mats.items()}}
    if spec.words:
        loops = [spec.loops[n] for n in spec.loop_names]
        gens = [mats[n] if n in mats else monodromy(spec.form, spec.loops[n], args.tol)
                for n in spec.loop_names]
        words = {}
        for wname, w in spec.words.items():
            product = evaluate_word(gens, w)
            direct = monodromy(spec.form, word_path(loops, w), args.tol)
            words[wname] = {"product": encode_matrix(product), "residual": max_abs(product - direct)}
        out["words"] = words
    return out


def cmd_traces(spec: SystemSpec, args) -> dict:
    gens = _group_generators(spec, args)
    tc = trace_coordinates(gens)
    return {
        "x": encode_complex(tc.x), "y": encode_complex(tc.y), "z": encode_complex(tc.z),
        "boundary": [encode_complex(b) for b in tc.boundary],
        "convention": tc.convention,
    }


def cmd_reality(spec: SystemSpec, args) -> dict:
    res = reality_check(_group_generators(spec, args), args.length, args.reality_tol)
    return {"real": res.real, "max_imag": res.max_imag, "words_checked": res.words_checked,
            "length": args.length}


def cmd_wkb_scan(spec: SystemSpec, args) -> str:
    if spec.higgs is None:
        raise InputError("wkb-scan needs a 'higgs' block in the system description")
    names = _select_loops(spec, args.loop)
    grid = parse_t_grid(args.t)
    scan = wkb_scan(HiggsFamily(spec.form, spec.higgs), spec.loops[names[0]], grid, args.tol, args.convention)
    return scan.to_csv()


def cmd_chen_parshin(spec: SystemSpec, args) -> dict:
    if spec.theta is None:
        raise InputError("chen-parshin needs a 'theta' block in the system description")
    names = _select_loops(spec, args.loop)
    J = chen_parshin(spec.theta, spec.loops[names[0]], args.order, args.tol)
    return {"loop": names[0], "order": args.order, "g": J.g, "coefficients": J.to_dict()}


def cmd_lie_closure(spec: SystemSpec, args) -> dict:
    basis = lie_closure(spec.form.coefficients(), n=spec.rank)
    return {
        "dim": basis.dim,
        "basis": [encode_matrix(m) for m in basis.matrices],
        "closure_defect": basis.closure_defect(),
        "reduction_check": reduction_check(spec.form, basis),
    }


def cmd_algebra_dims(spec: SystemSpec, args) -> dict:
    rel = spec.algebra if spec.algebra is not None else RelationSet(len(spec.theta or []) or 2)
    dims = [graded_dimension(rel, n) for n in range(args.order + 1)]
    return {
        "generators": rel.g,
        "relations": len(rel.relations),
        "dims": dims,
        "quotient_basis": {str(n): [list(w) for w in quotient_basis(rel, n)] for n in range(args.order + 1)},
        "basis_order": "lexicographic, greedy",
    }


def cmd_finiteness(spec: SystemSpec, args) -> dict:
    res = finiteness_probe(_group_generators(spec, args), args.cap, args.dedup_tol)
    return {"finite": res.finite, "order": res.order, "diverged": res.diverged, "cap": args.cap}


def cmd_selfcheck(spec: SystemSpec, args) -> dict:
    rng = np.random.default_rng(args.seed)
    names = spec.loop_names
    loops = [spec.loops[n] for n in names]
    k = len(loops)
    words = []
    for _ in range(args.pairs):
        pair = [LoopWord(tuple((int(rng.integers(k)), int(rng.choice([1, -1])))
                               for _ in range(int(rng.integers(1, 4))))) for _ in range(2)]
        words.append(pair)
    flat = [w for pair in words for w in pair] + [a * b for a, b in words]
    rep = representation(spec.form, loops, flat, args.tol)
    n = len(words)
    residuals = [
        max_abs(rep.word_values[2 * n + i] - rep.word_values[2 * i] @ rep.word_values[2 * i + 1])
        for i in range(n)
    ]
    direct = [max_abs(rep.word_values[2 * n + i] - monodromy(spec.form, word_path(loops, a * b), args.tol))
              for i, (a, b) in enumerate(words)]
    return {"seed": args.seed, "pairs": n, "max_product_residual": max(residuals),
            "max_homomorphism_residual": max(direct)}


HANDLERS = {
    "monodromy": cmd_monodromy,
    "traces": cmd_traces,
    "reality": cmd_reality,
    "wkb-scan": cmd_wkb_scan,
    "chen-parshin": cmd_chen_parshin,
    "lie-closure": cmd_lie_closure,
    "algebra-dims": cmd_algebra_dims,
    "finiteness": cmd_finiteness,
    "selfcheck": cmd_selfcheck,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holomon", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"holomon {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="JSON system description")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--order", type=int, default=8, help="truncation order N")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loop", action="append", help="loop name (repeatable)")
    p.add_argument("--length", type=int, default=4, help="max word length for reality")
    p.add_argument("--reality-tol", type=float, default=1e-9)
    p.add_argument("--t", default="1:50:geometric", help="t grid: 'a,b,c' or 'start:stop:geometric|linear[:count]'")
    p.add_argument("--convention", choices=("eigenvalue", "determinant"), default="eigenvalue")
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--dedup-tol", type=float, default=1e-6)
    p.add_argument("--pairs", type=int, default=20)
    return p


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(command: str, spec: SystemSpec, args) -> int:
    """Run one command on a loaded spec; writes the result and returns the exit code."""
    try:
        result = HANDLERS[command](spec, args)
    except HolomonError as exc:
        return _fail(exc, args.out)
    except (ValueError, IndexError) as exc:
        # malformed flag values (t grids, orders, word indices) are input errors
        return _fail(InputError(str(exc)), args.out)
    if isinstance(result, str):
        _emit(result, args.out)
    else:
        result = {"command": command, "tol": args.tol, **result}
        _emit(json.dumps(result, indent=1) + "\n", args.out)
    return 0


def _fail(exc: HolomonError, out: str) -> int:
    code = 2 if isinstance(exc, InputError) else 1
    _emit(json.dumps({"error": {"kind": exc.kind, "message": str(exc)}}) + "\n", out)
    print(f"holomon: {exc.kind}: {exc}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
    except HolomonError as exc:
        return _fail(exc, args.out)
    return run(args.command, spec, args)


if __name__ == "__main__":
    sys.exit(main())
