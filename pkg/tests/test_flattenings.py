import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from flatrank.errors import BadWedgeDegreeError, OrderExceedsDegreeError, SplitMismatchError
from flatrank.exact import QQ, ExactMatrix, rank
from flatrank.flattenings import (
    MixedRankOneTerm,
    SkewRankOneTerm,
    catalecticant,
    catalecticant_ranks,
    flattening_rank_bound,
    mixed_flattening,
    shuffle_sign,
    skew_flattening,
)
from flatrank.forms import (
    HomogeneousForm,
    SeededSampler,
    WaringExpression,
    dimension_count,
    expand,
    monomial_list,
    partial_derivatives,
    random_form,
    random_waring,
)

from conftest import sympy_rank


def form(nvars, degree, terms):
    return HomogeneousForm.from_terms(nvars, degree, terms, QQ)


def form_params(max_n=3, max_d=5):
    return st.tuples(st.integers(1, max_n), st.integers(1, max_d), st.integers(0, 2**32))


def padded(w, nvars, offset, total):
    """Re-embed the linear forms of ``w`` into ``total`` variables starting at ``offset``."""
    lins = [[0] * offset + list(lin) + [0] * (total - offset - nvars) for _, lin in w.summands]
    return WaringExpression.from_linear_forms(lins, w.degree, [lam for lam, _ in w.summands])


# --- catalecticant ------------------------------------------------------------

def test_catalecticant_examples():
    cat = catalecticant(form(2, 2, {(2, 0): 1}), 1)
    assert cat.matrix.tolist() == [[2, 0], [0, 0]]
    assert cat.row_index == ((1, 0), (0, 1)) and cat.col_index == ((1, 0), (0, 1))
    assert catalecticant(form(2, 3, {(3, 0): 1, (0, 3): 1}), 1).rank == 2
    f = form(2, 2, {(1, 1): 1})
    assert catalecticant(f, 1).matrix.tolist() == [[0, 1], [1, 0]]
    assert flattening_rank_bound(f) == 2
    row = catalecticant(f, 0)
    assert row.matrix.shape == (1, 3) and row.matrix.tolist() == [[0, 1, 0]]
    with pytest.raises(OrderExceedsDegreeError):
        catalecticant(f, 3)


@given(form_params(), st.data())
def test_power_of_linear_form_has_rank_one(params, data):
    n, d, seed = params
    f = expand(random_waring(SeededSampler(seed, 20), n, d, 1), n, d)
    s = data.draw(st.integers(0, d))
    assert catalecticant(f, s).rank == 1
    assert flattening_rank_bound(f) == 1


@given(form_params(max_n=3, max_d=4), st.data())
def test_rows_are_partial_derivatives(params, data):
    n, d, seed = params
    f = random_form(SeededSampler(seed, 9), n, d)
    s = data.draw(st.integers(0, d))
    cat = catalecticant(f, s)
    assert cat.matrix.shape == (dimension_count(n, s), dimension_count(n, d - s))
    for row, g in zip(cat.matrix.tolist(), partial_derivatives(f, s)):
        assert row == [g.coeff(c) for c in monomial_list(n + 1, d - s)]
    assert cat.rank == sympy_rank(cat.matrix.tolist())


def test_truncated_build_is_the_upper_left_block():
    f = random_form(SeededSampler(4), 3, 4)
    full = catalecticant(f, 2).matrix
    part = catalecticant(f, 2, nrows=5, ncols=7).matrix
    assert part == full.submatrix(range(5), range(7))


# --- properties ----------------------------------------------------------------

@given(form_params(max_n=3, max_d=5))
def test_transpose_duality(params):
    n, d, seed = params
    ranks = catalecticant_ranks(random_form(SeededSampler(seed, 5), n, d))
    assert ranks == ranks[::-1]


@given(form_params(max_n=2, max_d=4), st.data())
def test_subadditivity(params, data):
    n, d, seed = params
    s = data.draw(st.integers(0, d))
    f = random_form(SeededSampler(seed, 5).derive(0), n, d)
    g = random_form(SeededSampler(seed, 5).derive(1), n, d)
    assert catalecticant(f + g, s).rank <= catalecticant(f, s).rank + catalecticant(g, s).rank


@given(form_params(max_n=3, max_d=4), st.integers(1, 6), st.data())
def test_rank_one_bound(params, h, data):
    n, d, seed = params
    s = data.draw(st.integers(0, d))
    f = expand(random_waring(SeededSampler(seed, 10), n, d, h), n, d)
    assert catalecticant(f, s).rank <= h


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("n,d,h", [(2, 4, 3), (2, 4, 6), (3, 4, 9), (2, 5, 5), (3, 3, 4), (1, 6, 4)])
def test_generic_saturation(seed, n, d, h):
    f = expand(random_waring(SeededSampler(seed), n, d, h), n, d)
    for s in range(d + 1):
        expect = min(h, dimension_count(n, s), dimension_count(n, d - s))
        assert catalecticant(f, s).rank == expect


@given(st.integers(1, 2), st.integers(1, 2), st.integers(2, 4), st.integers(0, 2**32), st.data())
def test_block_additivity(na, nb, d, seed, data):
    total = na + nb + 2
    ha, hb = data.draw(st.integers(1, 4)), data.draw(st.integers(1, 4))
    sampler = SeededSampler(seed, 30)
    wf = padded(random_waring(sampler.derive(0), na, d, ha), na + 1, 0, total)
    wg = padded(random_waring(sampler.derive(1), nb, d, hb), nb + 1, na + 1, total)
    f, g = expand(wf, total - 1, d), expand(wg, total - 1, d)
    # s = 0 and s = d give a single row or column, so only interior orders add
    for s in range(1, d):
        assert catalecticant(f + g, s).rank == catalecticant(f, s).rank + catalecticant(g, s).rank


# --- mixed flattenings -------------------------------------------------------------

def test_single_factor_reduces_to_catalecticant():
    lin, d, lam = (2, -1, 3), 4, Fraction(5, 2)
    for a in range(d + 1):
        m = mixed_flattening([MixedRankOneTerm.of(lam, (lin, d))], [(a, d - a)])
        f = expand(WaringExpression.from_linear_forms([lin], d, [lam]), 2, d)
        assert m == catalecticant(f, a).matrix
        assert rank(m) == 1


@pytest.mark.parametrize("h", [1, 2, 3, 4, 6])
def test_matrix_case_has_generic_rank(h):
    rng = np.random.default_rng(h)
    terms = [MixedRankOneTerm.of(1, (rng.integers(1, 30, 3).tolist(), 1), (rng.integers(1, 30, 4).tolist(), 1))
             for _ in range(h)]
    m = mixed_flattening(terms, [(1, 0), (0, 1)])
    assert m.shape == (3, 4)
    assert rank(m) == min(h, 3)
    # the sum of outer products u v^T
    expect = sum((sympy.Matrix(t.factors[0][0]) * sympy.Matrix(t.factors[1][0]).T for t in terms), sympy.zeros(3, 4))
    assert m.tolist() == expect.tolist()


def test_disjoint_blocks_add():
    t1 = [MixedRankOneTerm.of(1, ((1, 2, 0, 0), 2), ((1, 0, 0), 1)),
          MixedRankOneTerm.of(1, ((3, -1, 0, 0), 2), ((0, 1, 0), 1))]
    t2 = [MixedRankOneTerm.of(1, ((0, 0, 1, 5), 2), ((0, 0, 1), 1)),
          MixedRankOneTerm.of(2, ((0, 0, 2, 1), 2), ((1, 1, 1), 1))]
    split = [(1, 1), (0, 1)]
    r1, r2 = rank(mixed_flattening(t1, split)), rank(mixed_flattening(t2, split))
    assert rank(mixed_flattening(t1 + t2, split)) == r1 + r2 == 4


def test_mixed_errors():
    t = MixedRankOneTerm.of(1, ((1, 0), 2), ((0, 1), 1))
    with pytest.raises(SplitMismatchError):
        mixed_flattening([t], [(1, 1)])
    with pytest.raises(SplitMismatchError):
        mixed_flattening([t], [(1, 0), (0, 1)])
    with pytest.raises(ValueError):
        MixedRankOneTerm.of(1, ((0, 0), 2))


# --- skew-flattenings ------------------------------------------------------------

def e(i, dim):
    return [int(j == i) for j in range(dim)]


def perm_sign(p):
    return (-1) ** sum(1 for i, j in combinations(range(len(p)), 2) if p[i] > p[j])


@given(st.lists(st.integers(0, 7), min_size=1, max_size=6, unique=True), st.data())
def test_shuffle_sign_is_permutation_parity(elems, data):
    k = data.draw(st.integers(0, len(elems)))
    I, J = sorted(elems[:k]), sorted(elems[k:])
    word = I + J
    assert shuffle_sign(I, J) == perm_sign([sorted(word).index(x) for x in word])


def test_skew_examples():
    t = SkewRankOneTerm.of(e(0, 6), e(1, 6), e(2, 6), e(3, 6))
    m0 = skew_flattening([t], 0)
    assert m0.shape == (1, math.comb(6, 4)) and rank(m0) == 1
    m2 = skew_flattening([t], 2)
    assert m2.shape == (15, 15) and rank(m2) == 6
    z = skew_flattening([], 2, dim=6, degree=4)
    assert z == ExactMatrix.zeros(15, 15)


def test_skew_entries_follow_the_wedge_sign():
    # e1 ^ e0 ^ e2 = -e0 ^ e1 ^ e2, so the middle entry is negative
    t = SkewRankOneTerm.of(e(0, 3), e(1, 3), e(2, 3))
    m = skew_flattening([t], 1)
    assert m.tolist() == [[0, 0, 1], [0, -1, 0], [1, 0, 0]]


def test_skew_errors():
    t = SkewRankOneTerm.of(e(0, 3), e(1, 3))
    with pytest.raises(BadWedgeDegreeError):
        skew_flattening([t], 3)
    with pytest.raises(BadWedgeDegreeError):
        skew_flattening([t, SkewRankOneTerm.of(e(0, 4), e(1, 4))], 1)
    with pytest.raises(BadWedgeDegreeError):
        SkewRankOneTerm.of(e(0, 2), e(1, 2), e(0, 2))
    with pytest.raises(ValueError):
        SkewRankOneTerm.of((1, 2, 3), (2, 4, 6))


@given(st.integers(1, 5), st.integers(0, 2**32), st.data())
def test_skew_rank_one_image_dimension(n, seed, data):
    dim = n + 1
    d = data.draw(st.integers(1, min(4, dim)))
    a = data.draw(st.integers(0, d))
    rng = np.random.default_rng(seed)
    while True:
        vecs = rng.integers(-5, 6, size=(d, dim)).tolist()
        if sympy_rank(vecs) == d:
            break
    assert rank(skew_flattening([SkewRankOneTerm.of(*vecs)], a)) == math.comb(d, a)


def test_skew_plucker_matches_minors():
    vecs = [(1, 2, 0, 3), (0, 1, -1, 2)]
    p = SkewRankOneTerm.of(*vecs).plucker()
    for S in combinations(range(4), 2):
        minor = sympy.Matrix(vecs)[:, list(S)].det()
        assert p.get(S, 0) == minor
