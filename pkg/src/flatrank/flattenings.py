"""Catalecticant matrices, mixed flattenings and skew-flattenings.

Row ``r`` of the order-``s`` catalecticant of ``f`` holds the raw
coefficients of the partial derivative ``d**r f`` (falling-factorial
multipliers included, no division by factorials); columns are the degree
``d - s`` monomials. Both axes follow the graded-lex order of
:func:`flatrank.forms.monomials`.

Skew-flattenings are indexed by strictly increasing index subsets in
lexicographic order. The entry at (I, J) is ``sign(I, J) * p[I | J]`` when
I and J are disjoint, where ``p`` are the Pluecker coordinates of the
d-vector and ``sign(I, J) = (-1) ** #{(i, j) in I x J : i > j}`` is the sign
of the shuffle with ``e_I ^ e_J = sign(I, J) * e_(I|J)``; otherwise it is 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

from .errors import BadWedgeDegreeError, OrderExceedsDegreeError, SplitMismatchError
from .exact import QQ, ExactMatrix, FieldSpec, determinant, rank
from .forms import Exponents, HomogeneousForm, falling, leading_monomials, monomial_list, multinomial


@dataclass(frozen=True)
class Catalecticant:
    form: HomogeneousForm
    order: int
    matrix: ExactMatrix
    row_index: tuple[Exponents, ...]
    col_index: tuple[Exponents, ...]

    @property
    def rank(self) -> int:
        return rank(self.matrix)


def catalecticant(f: HomogeneousForm, s: int, *, nrows: int | None = None, ncols: int | None = None) -> Catalecticant:
    """Order-``s`` catalecticant of ``f``.

    ``nrows``/``ncols`` restrict the build to the leading rows and columns,
    which is how large upper-left blocks are obtained without materialising
    the full matrix.
    """
    if s < 0 or s > f.degree:
        raise OrderExceedsDegreeError(f"order {s} catalecticant of a degree {f.degree} form")
    rows = _leading(f.nvars, s, nrows)
    cols = _leading(f.nvars, f.degree - s, ncols)
    fld = f.field
    zero = fld.coerce(0)
    entries = []
    for r in rows:
        line = []
        for c in cols:
            m = tuple(x + y for x, y in zip(r, c))
            v = f.terms.get(m)
            line.append(zero if v is None else fld.coerce(v * falling(m, r)))
        entries.append(tuple(line))
    mat = ExactMatrix(len(rows), len(cols), tuple(entries), fld)
    return Catalecticant(f, s, mat, tuple(rows), tuple(cols))


def _leading(nvars: int, degree: int, count: int | None) -> list[Exponents]:
    if count is None:
        return list(monomial_list(nvars, degree))
    return leading_monomials(nvars, degree, count)


def catalecticant_ranks(f: HomogeneousForm) -> list[int]:
    """``rank Cat_s(f)`` for s = 0, ..., degree."""
    return [rank(catalecticant(f, s).matrix) for s in range(f.degree + 1)]


def flattening_rank_bound(f: HomogeneousForm) -> int:
    """Largest catalecticant rank of ``f``: a lower bound for its rank and symmetric rank."""
    return max(catalecticant_ranks(f))


# ---------------------------------------------------------------------------
# mixed tensors

@dataclass(frozen=True)
class MixedRankOneTerm:
    """``lam * L_1**d_1 (x) ... (x) L_p**d_p``; ``factors`` holds ``(L_i, d_i)`` pairs."""

    lam: object
    factors: tuple[tuple[tuple, int], ...]

    def __post_init__(self):
        for lin, _ in self.factors:
            if not any(lin):
                raise ValueError("zero linear form in a rank-one term")

    @classmethod
    def of(cls, lam, *factors) -> MixedRankOneTerm:
        return cls(lam, tuple((tuple(lin), int(deg)) for lin, deg in factors))


def mixed_flattening(terms: Sequence[MixedRankOneTerm], split: Sequence[tuple[int, int]],
                     field: FieldSpec = QQ) -> ExactMatrix:
    """The (A, B)-flattening of ``sum(terms)`` for the degree split ``d_i = a_i + b_i``.

    Rows are tuples of per-factor monomials of degrees ``a_i`` and columns
    tuples of degrees ``b_i``; each factor uses graded-lex order and tuples
    are ordered lexicographically. The entry for a single term factorises as
    ``lam * prod_i (d_i!/b_i!) * L_i**alpha_i * multinomial(beta_i) * L_i**beta_i``,
    so with one factor the matrix is the catalecticant of ``lam * L**d``.
    """
    if not terms:
        raise ValueError("mixed_flattening needs at least one term")
    shape = [(len(lin), deg) for lin, deg in terms[0].factors]
    if len(split) != len(shape):
        raise SplitMismatchError(f"{len(split)} split pairs for {len(shape)} factors")
    for t in terms:
        if [(len(lin), deg) for lin, deg in t.factors] != shape:
            raise SplitMismatchError("terms disagree on factor dimensions or degrees")
    for (nv, deg), (a, b) in zip(shape, split):
        if a < 0 or b < 0 or a + b != deg:
            raise SplitMismatchError(f"split ({a}, {b}) does not add up to degree {deg}")

    row_axes = [monomial_list(nv, a) for (nv, _), (a, _) in zip(shape, split)]
    col_axes = [monomial_list(nv, b) for (nv, _), (_, b) in zip(shape, split)]
    # each term is an outer product of a row vector and a column vector
    vecs = []
    for t in terms:
        lam = field.coerce(t.lam)
        rv_parts, cv_parts = [], []
        for (lin, deg), (a, _), rows, cols in zip(t.factors, split, row_axes, col_axes):
            lin = [field.coerce(x) for x in lin]
            scale = math.perm(deg, a)
            rv_parts.append([scale * _power(lin, r) for r in rows])
            cv_parts.append([multinomial(c) * _power(lin, c) for c in cols])
        rv = [lam * math.prod(xs) for xs in product(*rv_parts)]
        cv = [math.prod(xs) for xs in product(*cv_parts)]
        vecs.append((rv, cv))
    nrows = math.prod(len(r) for r in row_axes)
    ncols = math.prod(len(c) for c in col_axes)
    entries = tuple(
        tuple(field.coerce(sum(rv[i] * cv[j] for rv, cv in vecs)) for j in range(ncols))
        for i in range(nrows)
    )
    return ExactMatrix(nrows, ncols, entries, field)


def _power(lin: Sequence, e: Sequence[int]):
    out = 1
    for c, x in zip(lin, e):
        if x:
            out = out * c ** x
    return out


# ---------------------------------------------------------------------------
# skew-symmetric tensors

@dataclass(frozen=True)
class SkewRankOneTerm:
    """The decomposable d-vector ``v_1 ^ ... ^ v_d`` in a space of dimension ``len(v_i)``."""

    vectors: tuple[tuple, ...]
    field: FieldSpec = QQ

    def __post_init__(self):
        if not self.vectors:
            raise BadWedgeDegreeError("a skew term needs at least one vector")
        dim = len(self.vectors[0])
        if any(len(v) != dim for v in self.vectors):
            raise BadWedgeDegreeError("vectors of different lengths")
        if len(self.vectors) > dim:
            raise BadWedgeDegreeError(f"{len(self.vectors)} vectors in dimension {dim}")
        if rank(ExactMatrix.from_rows(self.vectors, self.field)) != len(self.vectors):
            raise ValueError("vectors are linearly dependent")

    @classmethod
    def of(cls, *vectors, field: FieldSpec = QQ) -> SkewRankOneTerm:
        return cls(tuple(tuple(field.coerce(x) for x in v) for v in vectors), field)

    @property
    def degree(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors[0])

    def plucker(self) -> dict[tuple[int, ...], object]:
        """Nonzero Pluecker coordinates keyed by increasing index subsets."""
        m = ExactMatrix.from_rows(self.vectors, self.field)
        out = {}
        for S in combinations(range(self.dim), self.degree):
            v = determinant(m.submatrix(range(self.degree), S))
            if v:
                out[S] = v
        return out


def shuffle_sign(I: Sequence[int], J: Sequence[int]) -> int:
    inv = sum(1 for i in I for j in J if i > j)
    return -1 if inv % 2 else 1


def skew_flattening(terms: Sequence[SkewRankOneTerm], a: int, *, dim: int | None = None,
                    degree: int | None = None, field: FieldSpec = QQ) -> ExactMatrix:
    """Contraction matrix from the a-th to the (d - a)-th exterior power.

    ``dim`` and ``degree`` are read off the terms and only need to be
    passed for an empty sum.
    """
    if terms:
        dim = terms[0].dim if dim is None else dim
        degree = terms[0].degree if degree is None else degree
        field = terms[0].field
        if any(t.dim != dim or t.degree != degree for t in terms):
            raise BadWedgeDegreeError("terms disagree on dimension or degree")
    elif dim is None or degree is None:
        raise BadWedgeDegreeError("dim and degree are required for an empty sum")
    if not 0 <= degree <= dim:
        raise BadWedgeDegreeError(f"degree {degree} in dimension {dim}")
    if not 0 <= a <= degree:
        raise BadWedgeDegreeError(f"contraction degree {a} outside [0, {degree}]")

    coords: dict[tuple[int, ...], object] = {}
    for t in terms:
        for S, v in t.plucker().items():
            coords[S] = coords.get(S, 0) + v
    rows = list(combinations(range(dim), a))
    cols = list(combinations(range(dim), degree - a))
    zero = field.coerce(0)
    entries = []
    for I in rows:
        line = []
        for J in cols:
            if set(I) & set(J):
                line.append(zero)
                continue
            S = tuple(sorted(I + J))
            v = coords.get(S)
            line.append(zero if v is None else field.coerce(shuffle_sign(I, J) * v))
        entries.append(tuple(line))
    return ExactMatrix(len(rows), len(cols), tuple(entries), field)
