import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import exact
from conftest import E, F, H, random_sl2
from holomon import Path, RationalMatrixForm, lie_closure, monodromy, reduction_check
from holomon.errors import RankMismatch
from holomon.holonomy import bracket, span_residual


def test_sl2_from_e_and_f():
    L = lie_closure([E, F])
    assert L.dim == 3
    assert L.residual(H) <= 1e-12
    assert L.closure_defect() <= 1e-12


def test_single_diagonalizable_matrix():
    assert lie_closure([np.diag([1.0, 2.0, 5.0])]).dim == 1
    assert lie_closure([np.array([[1.0, 2.0], [2.0, -3.0]])]).dim == 1


def test_zero_generator():
    assert lie_closure([np.zeros((2, 2))]).dim == 0


def test_strictly_upper_triangular_3x3():
    # E12 and E23 generate the Heisenberg algebra
    a = np.zeros((3, 3)); a[0, 1] = 1
    b = np.zeros((3, 3)); b[1, 2] = 1
    assert lie_closure([a, b]).dim == 3


def test_gl2_needs_identity():
    assert lie_closure([E, F, np.eye(2)]).dim == 4


def test_rank_mismatch():
    with pytest.raises(RankMismatch):
        lie_closure([np.eye(2), np.eye(3)])


small_int_matrix = st.lists(st.integers(-2, 2), min_size=9, max_size=9).map(
    lambda v: [v[0:3], v[3:6], v[6:9]]
)


@settings(max_examples=25, deadline=None)
@given(st.lists(small_int_matrix, min_size=1, max_size=3))
def test_closure_dimension_matches_exact_oracle(gens):
    L = lie_closure([np.array(g, dtype=float) for g in gens])
    assert L.dim == exact.lie_closure_dim(gens)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 4), st.integers(1, 3))
def test_idempotent_and_conjugation_invariant(seed, n, k):
    rng = np.random.default_rng(seed)
    gens = [rng.standard_normal((n, n)) for _ in range(k)]
    L = lie_closure(gens)
    assert lie_closure(L.matrices).dim == L.dim
    g = rng.standard_normal((n, n)) + n * np.eye(n)
    gi = np.linalg.inv(g)
    assert lie_closure([g @ m @ gi for m in gens]).dim == L.dim


def test_reduction_check_for_triangular_form():
    N = np.array([[0, 1], [0, 0]], dtype=complex)
    form = RationalMatrixForm([0.0, 1.0], [N, 2j * N])
    L = lie_closure(form.coefficients())
    assert L.dim == 1 and reduction_check(form, L)
    assert not reduction_check(RationalMatrixForm([0.0], [F]), L)
    assert span_residual(RationalMatrixForm([0.0], [F]), L) == pytest.approx(1.0)


def test_reduction_check_rank_mismatch():
    with pytest.raises(RankMismatch):
        span_residual(RationalMatrixForm.zero(3), lie_closure([E]))


def test_triangular_monodromy_shadow():
    # connection valued in strictly upper triangular matrices keeps monodromy unipotent upper triangular
    rng = np.random.default_rng(7)
    res = []
    for _ in range(2):
        m = np.triu(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)), 1)
        res.append(m)
    form = RationalMatrixForm([0.0, 1.0], res)
    for loop in (Path.keyhole(0.5 - 1j, 0.0, 0.3), Path.keyhole(0.5 - 1j, 1.0, 0.3)):
        M = monodromy(form, loop)
        assert np.max(np.abs(np.tril(M, -1))) <= 1e-7
        assert np.allclose(np.diag(M), 1.0, atol=1e-7)


def test_borel_form_monodromy_in_borel(rng):
    # upper triangular (not nilpotent) coefficients: monodromy stays upper triangular
    res = [np.triu(rng.standard_normal((2, 2))) for _ in range(2)]
    form = RationalMatrixForm([0.0, 1.0], res)
    M = monodromy(form, Path.circle(0.5, 1.0))
    assert abs(M[1, 0]) <= 1e-7


def test_bracket_antisymmetry(rng):
    a, b = random_sl2(rng), random_sl2(rng)
    assert np.allclose(bracket(a, b), -bracket(b, a))
