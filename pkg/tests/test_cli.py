import json
import subprocess
import sys

import numpy as np
import pytest

from holomon.cli import decode_matrix, encode_matrix, load_spec, main, parse_spec
from holomon.errors import ParseError, SchemaError

A_THIRD = {
    "rank": 1,
    "poles": [[0, 0]],
    "residues": [[[[1 / 3, 0]]]],
    "loops": {"g1": {"kind": "circle", "radius": 1.0}},
}

SL2R = {
    "rank": 2,
    "loops": {"g1": {"kind": "circle", "radius": 1.0}},
    "generators": [
        [[[2, 0], [1, 0]], [[1, 0], [1, 0]]],
        [[[1, 0], [0, 0]], [[3, 0], [1, 0]]],
        [[[1, 0], [-2, 0]], [[0, 0], [1, 0]]],
    ],
}

C = [0.21, 0.023]  # psi = diag(c, -c) / z
DIAGONAL_WKB = {
    "rank": 2,
    "loops": {"unit": {"kind": "circle", "radius": 1.0}},
    "higgs": {"poles": [[0, 0]], "residues": [[[C, [0, 0]], [[0, 0], [-C[0], -C[1]]]]]},
}

THREE_POLE = {
    "rank": 2,
    "poles": [[0, 0], [1, 0], [0.5, 1]],
    "residues": [
        [[[0.2, 0], [0.1, 0]], [[0, 0.1], [-0.2, 0]]],
        [[[0, 0], [0.3, 0]], [[0.1, 0], [0, 0]]],
        [[[-0.1, 0], [0, 0]], [[0, 0], [0.1, 0]]],
    ],
    "loops": {
        "a": {"kind": "keyhole", "base": [-0.6, -0.5], "center": [0, 0], "radius": 0.3},
        "b": {"kind": "keyhole", "base": [-0.6, -0.5], "center": [1, 0], "radius": 0.3},
        "c": {"kind": "keyhole", "base": [-0.6, -0.5], "center": [0.5, 1], "radius": 0.3},
    },
    "words": {"ab": [["a", 1], ["b", 1]], "cinv_a": [["c", -1], ["a", 1]]},
    "theta": [{"poles": [[0, 0]], "residues": [[1, 0]]}, {"poles": [[1, 0]], "residues": [[1, 0]]}],
    "algebra": {"generators": 2, "relations": [[[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]]},
}


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def run_cli(tmp_path, *argv, doc=A_THIRD):
    out = tmp_path / "out.txt"
    code = main([argv[0], write(tmp_path, doc), *argv[1:], "--out", str(out)])
    return code, out.read_text()


# -- spec loading -------------------------------------------------------------

def test_load_minimal_spec(tmp_path):
    doc = {
        "rank": 2,
        "poles": [[0, 0]],
        "residues": [[[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]],
        "loops": {"g": {"kind": "circle", "radius": 1.0}},
    }
    spec = load_spec(write(tmp_path, doc))
    assert spec.rank == 2 and spec.loop_names == ["g"]
    assert np.allclose(spec.form.residues[0], np.diag([0.5, -0.5]))


def test_duplicate_poles(tmp_path):
    doc = dict(A_THIRD, poles=[[0, 0], [0, 0]], residues=A_THIRD["residues"] * 2)
    with pytest.raises(SchemaError, match="poles distinct"):
        load_spec(write(tmp_path, doc))


def test_non_square_residue(tmp_path):
    doc = dict(THREE_POLE, residues=[[[[1, 0], [0, 0], [0, 0]], [[0, 0], [1, 0], [0, 0]]]] * 3)
    with pytest.raises(SchemaError, match="square of declared rank"):
        load_spec(write(tmp_path, doc))


def test_parse_error_location(tmp_path):
    with pytest.raises(ParseError) as err:
        load_spec(write(tmp_path, '{"rank": 1,\n  "loops": }'))
    assert err.value.line == 2 and err.value.column > 1


def test_schema_error_names_field(tmp_path):
    with pytest.raises(SchemaError) as err:
        load_spec(write(tmp_path, dict(A_THIRD, rank="two")))
    assert err.value.field == "rank"


def test_undefined_loop_in_word():
    with pytest.raises(SchemaError, match="undefined loop"):
        parse_spec(dict(THREE_POLE, words={"w": [["zz", 1]]}))


def test_shipped_schema_matches_docs():
    from importlib import resources
    from pathlib import Path
    shipped = json.loads(resources.files("holomon").joinpath("spec-schema.json").read_text())
    docs = json.loads((Path(__file__).parents[1] / "docs" / "spec-schema.json").read_text())
    assert shipped == docs


# -- commands -----------------------------------------------------------------

def test_monodromy_abelian(tmp_path):
    code, text = run_cli(tmp_path, "monodromy", "--loop", "g1", "--tol", "1e-10")
    assert code == 0
    m = decode_matrix(json.loads(text)["loops"]["g1"])
    assert abs(m[0, 0] - np.exp(2j * np.pi / 3)) <= 1e-9


def test_monodromy_words(tmp_path):
    code, text = run_cli(tmp_path, "monodromy", doc=THREE_POLE)
    assert code == 0
    out = json.loads(text)
    assert set(out["loops"]) == {"a", "b", "c"}
    assert max(w["residual"] for w in out["words"].values()) <= 1e-7


def test_traces_real(tmp_path):
    code, text = run_cli(tmp_path, "traces", doc=SL2R)
    assert code == 0
    out = json.loads(text)
    assert max(abs(out[k][1]) for k in "xyz") < 1e-9
    assert out["x"][0] == pytest.approx(np.trace(np.array([[2, 1], [1, 1]]) @ np.array([[1, 0], [3, 1]])))


def test_reality_command(tmp_path):
    code, text = run_cli(tmp_path, "reality", "--length", "3", doc=SL2R)
    assert code == 0 and json.loads(text)["real"] is True


def test_traces_wrong_generator_count(tmp_path):
    code, text = run_cli(tmp_path, "traces")
    assert code == 2
    assert json.loads(text)["error"]["kind"] == "WrongGeneratorCount"


def test_wkb_scan_csv(tmp_path):
    code, text = run_cli(tmp_path, "wkb-scan", "--t", "1:50:geometric", doc=DIAGONAL_WKB)
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "t,re_tr,im_tr,re_norm,im_norm,rel_change"
    rel = [float(l.split(",")[-1]) for l in lines[2:]]
    assert len(rel) == 11
    assert all(b < a for a, b in zip(rel, rel[1:]))


def test_chen_parshin_command(tmp_path):
    code, text = run_cli(tmp_path, "chen-parshin", "--loop", "a", "--order", "3", doc=THREE_POLE)
    assert code == 0
    coeffs = json.loads(text)["coefficients"]
    assert len(coeffs) == 1 + 2 + 4 + 8
    # the keyhole around 0 picks up 2 pi i from dz/z and nothing from dz/(z - 1)
    assert coeffs["0"] == pytest.approx([0.0, 2 * np.pi], abs=1e-8)
    assert coeffs["1"] == pytest.approx([0.0, 0.0], abs=1e-8)


def test_lie_closure_command(tmp_path):
    code, text = run_cli(tmp_path, "lie-closure", doc=THREE_POLE)
    out = json.loads(text)
    assert code == 0 and out["dim"] == 3 and out["reduction_check"] is True


def test_algebra_dims_command(tmp_path):
    code, text = run_cli(tmp_path, "algebra-dims", "--order", "4", doc=THREE_POLE)
    assert code == 0 and json.loads(text)["dims"] == [1, 2, 3, 4, 5]


def test_finiteness_command(tmp_path):
    doc = dict(SL2R, generators=[[[[0, 1], [0, 0]], [[0, 0], [0, -1]]]])
    code, text = run_cli(tmp_path, "finiteness", doc=doc)
    assert code == 0 and json.loads(text)["order"] == 4


def test_selfcheck_deterministic(tmp_path):
    a = run_cli(tmp_path, "selfcheck", "--seed", "3", "--pairs", "3", doc=THREE_POLE)
    b = run_cli(tmp_path, "selfcheck", "--seed", "3", "--pairs", "3", doc=THREE_POLE)
    assert a == b and a[0] == 0
    assert json.loads(a[1])["max_homomorphism_residual"] <= 1e-7


# -- contracts ----------------------------------------------------------------

def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(decode_matrix(json.loads(json.dumps(encode_matrix(m)))), m)
    code, text = run_cli(tmp_path, "monodromy", doc=THREE_POLE)
    first = json.loads(text)["loops"]["a"]
    again = encode_matrix(decode_matrix(first))
    assert again == first


ERROR_CORPUS = [
    # (command, doc or raw text, extra args, exit code, error kind)
    ("monodromy", "{not json", [], 2, "ParseError"),
    ("monodromy", dict(A_THIRD, rank=0), [], 2, "SchemaError"),
    ("monodromy", A_THIRD, ["--loop", "nope"], 2, "InputError"),
    ("monodromy", dict(A_THIRD, loops={"p": {"kind": "polyline", "points": [[1, 0], [2, 0]]}}), [], 2, "NotClosed"),
    ("monodromy", dict(A_THIRD, loops={"g": {"kind": "circle", "radius": 1e-12}}), [], 1, "PoleTooClose"),
    ("wkb-scan", A_THIRD, [], 2, "InputError"),
    ("wkb-scan", DIAGONAL_WKB, ["--t", "1:2:cubic"], 2, "InputError"),
    ("chen-parshin", THREE_POLE, ["--order", "25"], 2, "TruncationTooLarge"),
    ("reality", SL2R, ["--length", "14"], 1, "ExplosionGuard"),
]


@pytest.mark.parametrize("command,doc,extra,code,kind", ERROR_CORPUS)
def test_exit_code_contract(tmp_path, command, doc, extra, code, kind):
    got, text = run_cli(tmp_path, command, *extra, doc=doc)
    assert got == code
    assert json.loads(text)["error"]["kind"] == kind


def test_missing_file(tmp_path):
    out = tmp_path / "o.json"
    assert main(["monodromy", str(tmp_path / "absent.json"), "--out", str(out)]) == 2


def test_module_entry_point(tmp_path):
    path = write(tmp_path, A_THIRD)
    proc = subprocess.run([sys.executable, "-m", "holomon", "monodromy", path], capture_output=True, text=True)
    assert proc.returncode == 0
    m = decode_matrix(json.loads(proc.stdout)["loops"]["g1"])
    assert abs(m[0, 0] - np.exp(2j * np.pi / 3)) <= 1e-9
