import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import exact
from holomon import (
    AlgebraHom,
    Path,
    RationalMatrixForm,
    RelationSet,
    TensorSeries,
    chen_parshin,
    chen_parshin_limit,
    connection_from_hom,
    graded_dimension,
    monodromy,
    project,
    quotient_basis,
    validate_hom,
    verify_lemma_iterated,
)
from holomon.algebra import left_regular
from holomon.errors import CountMismatch, RelationViolated, TruncationTooLarge
from holomon.numerics import max_abs

THETA = [RationalMatrixForm.scalar([0.0], [1.0]), RationalMatrixForm.scalar([0.5], [1.0])]
LOOP = Path.circle(0.2, 1.0)


# -- graded dimensions --------------------------------------------------------

@pytest.mark.parametrize("g", [1, 2, 3])
def test_free_dimensions(g):
    free = RelationSet(g)
    for n in range(5):
        assert graded_dimension(free, n) == g**n


def test_commutator_dimensions():
    # the commutative polynomial ring in two variables: n + 1 monomials in degree n
    rel = RelationSet.commutator()
    assert [graded_dimension(rel, n) for n in range(7)] == [1, 2, 3, 4, 5, 6, 7]


def test_commutator_dimensions_three_generators():
    rels = []
    for a, b in [(0, 1), (0, 2), (1, 2)]:
        c = np.zeros((3, 3)); c[a, b], c[b, a] = 1, -1
        rels.append(c)
    rel = RelationSet(3, rels)
    # commutative ring in three variables: binomial(n + 2, 2)
    assert [graded_dimension(rel, n) for n in range(5)] == [1, 3, 6, 10, 15]


relation_matrix = st.lists(st.integers(-2, 2), min_size=4, max_size=4).map(
    lambda v: [[v[0], v[1]], [v[2], v[3]]]
).filter(lambda m: any(x for r in m for x in r))


@settings(max_examples=20, deadline=None)
@given(relation_matrix, st.integers(2, 4))
def test_ideal_rank_against_exact_oracle(rel_m, n):
    rel = RelationSet(2, [np.array(rel_m, dtype=float)])
    assert graded_dimension(rel, n) == 2**n - exact.ideal_rank(2, [rel_m], n)


def test_truncation_limit():
    rel = RelationSet(2, n_max=5)
    with pytest.raises(TruncationTooLarge):
        graded_dimension(rel, 6)


def test_quotient_basis_is_lex_first():
    rel = RelationSet.commutator()
    # the ideal is spanned by ba - ab, so ab survives and ba is eliminated
    assert quotient_basis(rel, 2) == [(0, 0), (0, 1), (1, 1)]
    assert len(quotient_basis(rel, 3)) == 4


def test_dependent_relations_rejected():
    c = np.array([[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        RelationSet(2, [c, 2 * c])


# -- projection ---------------------------------------------------------------

def random_series(rng, g, order):
    levels = [rng.standard_normal((g,) * n) + 1j * rng.standard_normal((g,) * n) for n in range(order + 1)]
    return TensorSeries(g, levels)


def test_project_idempotent_and_linear(rng):
    rel = RelationSet.commutator()
    a, b = random_series(rng, 2, 4), random_series(rng, 2, 4)
    pa = project(a, rel)
    assert project(pa, rel).max_abs_diff(pa) == 0.0
    lhs = project(a * 2.5 + b * (1 - 1j), rel)
    rhs = pa * 2.5 + project(b, rel) * (1 - 1j)
    assert lhs.max_abs_diff(rhs) <= 1e-12


def test_project_kills_ideal():
    rel = RelationSet.commutator()
    # t0 t1 t0 - t0 t0 t1 = t0 (t1 t0 - t0 t1) lies in the ideal
    s = TensorSeries.from_dict(2, 3, {(0, 1, 0): 1.0, (0, 0, 1): -1.0})
    assert max(np.max(np.abs(a)) for a in project(s, rel).levels) <= 1e-12


def test_project_commutative_collapses_to_sorted_words():
    rel = RelationSet.commutator()
    s = TensorSeries.from_dict(2, 3, {(1, 0, 1): 1.0})
    p = project(s, rel)
    assert abs(p[(0, 1, 1)] - 1.0) <= 1e-12
    assert abs(p[(1, 0, 1)]) <= 1e-12


def test_project_count_mismatch():
    with pytest.raises(CountMismatch):
        project(TensorSeries.unit(3, 2), RelationSet.commutator())


# -- homomorphisms ------------------------------------------------------------

def test_validate_commuting_images():
    f = validate_hom([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])], RelationSet.commutator())
    assert f.residual == 0.0


def test_validate_rejects_noncommuting():
    E = np.array([[0, 1], [0, 0]]); F = E.T
    with pytest.raises(RelationViolated) as err:
        validate_hom([E, F], RelationSet.commutator())
    assert err.value.index == 0


def test_validate_count_mismatch():
    with pytest.raises(CountMismatch):
        validate_hom([np.eye(2)], RelationSet.commutator())


def test_apply_is_multiplicative(rng):
    # the evaluation map sends concatenation of words to matrix products
    imgs = [rng.standard_normal((2, 2)) for _ in range(2)]
    f = AlgebraHom(imgs)
    a, b = random_series(rng, 2, 3), random_series(rng, 2, 3)
    # compare degree by degree against the truncated product
    ab = a.product(b)
    full = sum(f.apply(a, d) for d in range(4)) @ sum(f.apply(b, d) for d in range(4))
    trunc = sum(f.apply(ab, d) for d in range(4))
    higher = sum(f.apply(a, i) @ f.apply(b, j) for i in range(4) for j in range(4) if i + j > 3)
    assert max_abs(full - trunc - higher) <= 1e-10


def test_left_regular_representation(rng):
    m, x = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    assert np.allclose(left_regular(m) @ x.reshape(-1), (m @ x).reshape(-1))


def test_connection_from_hom():
    imgs = [np.diag([1.0, -1.0]), np.array([[0, 1.0], [0, 0]])]
    phi = connection_from_hom(AlgebraHom(imgs), THETA)
    z = 0.3 + 0.4j
    assert max_abs(phi(z) - (imgs[0] / z + imgs[1] / (z - 0.5))) <= 1e-14


@pytest.mark.parametrize("r", [1, 2, 3])
def test_lemma_cross_check(r):
    rng = np.random.default_rng(r)
    imgs = [0.3 * (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))) for _ in range(2)]
    f = validate_hom(imgs, RelationSet(2))
    for n in range(1, 4):
        assert verify_lemma_iterated(f, THETA, LOOP, n) <= 1e-6


def test_limit_nilpotent_exact():
    rng = np.random.default_rng(3)
    imgs = [np.triu(rng.standard_normal((3, 3)), 1) for _ in range(2)]
    f = validate_hom(imgs, RelationSet(2))
    assert chen_parshin_limit(f, THETA, LOOP, 2).residual <= 1e-9


def test_limit_scalar_tail_bound():
    f = validate_hom([[[0.1]]], RelationSet(1))
    res = chen_parshin_limit(f, THETA[:1], Path.circle(), 8)
    assert res.residual <= (2 * np.pi * 0.1) ** 9 / 362880
    assert abs(res.reference[0, 0] - np.exp(0.2j * np.pi)) <= 1e-9


def test_functoriality_through_quotient():
    # a hom that kills the commutator sees only the projected series
    f = validate_hom([np.diag([0.2, -0.1]), np.diag([0.05j, 0.3])], RelationSet.commutator())
    J = chen_parshin(THETA, LOOP, 4)
    PJ = project(J, RelationSet.commutator())
    for n in range(5):
        assert max_abs(f.apply(J, n) - f.apply(PJ, n)) <= 1e-9


def test_limit_matches_direct_monodromy():
    imgs = [np.array([[0.1, 0.2], [0.0, -0.1]]), np.array([[0.0, 0.0], [0.15j, 0.05]])]
    f = validate_hom(imgs, RelationSet(2))
    res = chen_parshin_limit(f, THETA, LOOP, 10)
    direct = monodromy(connection_from_hom(f, THETA), LOOP)
    assert max_abs(res.reference - direct) <= 1e-8
    assert res.residual <= 1e-6
