"""Homogeneous forms, Waring expressions and seeded sampling.

Monomials are exponent tuples ``(e0, ..., en)``. The fixed monomial order is
graded lexicographic with ``x0 > x1 > ... > xn``; within one degree,
:func:`monomials` lists them from largest to smallest, so ``x0**d`` comes
first and ``xn**d`` last. Every matrix built from forms uses this order on
both axes.

Coefficients are stored raw: the form ``x0**2 + 2*x0*x1 + x1**2`` has
coefficient 2 on ``x0*x1``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DegreeMismatchError,
    FormFormatError,
    IndexOutOfRangeError,
    OrderExceedsDegreeError,
)
from .exact import QQ, FieldSpec

Exponents = tuple[int, ...]


# ---------------------------------------------------------------------------
# monomial combinatorics

def monomials(nvars: int, degree: int) -> Iterator[Exponents]:
    """Exponent vectors of the given degree, in decreasing graded-lex order."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    if nvars == 1:
        yield (degree,)
        return
    for e in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - e):
            yield (e,) + rest


@lru_cache(maxsize=256)
def monomial_list(nvars: int, degree: int) -> tuple[Exponents, ...]:
    return tuple(monomials(nvars, degree))


def leading_monomials(nvars: int, degree: int, count: int) -> list[Exponents]:
    """The first ``count`` monomials of :func:`monomials` without building the rest."""
    return list(islice(monomials(nvars, degree), count))


def grlex_key(e: Sequence[int]) -> tuple:
    """Sort key; larger key means larger monomial."""
    return (sum(e), tuple(e))


def sort_grlex(es) -> list[Exponents]:
    """Sort monomials from largest to smallest."""
    return sorted((tuple(e) for e in es), key=grlex_key, reverse=True)


def dimension_count(n: int, d: int) -> int:
    """Number of degree-``d`` monomials in ``n + 1`` variables."""
    return math.comb(n + d, n)


def multinomial(e: Sequence[int]) -> int:
    out = math.factorial(sum(e))
    for x in e:
        out //= math.factorial(x)
    return out


def falling(m: Sequence[int], r: Sequence[int]) -> int:
    """Scale picked up by ``x**m`` under the derivative ``d**r``: prod m_j! / (m_j - r_j)!."""
    out = 1
    for mj, rj in zip(m, r):
        out *= math.perm(mj, rj)
    return out


# ---------------------------------------------------------------------------
# forms

@dataclass(frozen=True)
class HomogeneousForm:
    """A degree-``degree`` form in ``nvars`` variables with sparse exact coefficients.

    Build through :meth:`from_terms`, which validates exponents, coerces
    coefficients into ``field`` and drops zeros. Treat ``terms`` as read-only.
    """

    nvars: int
    degree: int
    terms: dict
    field: FieldSpec = QQ

    @classmethod
    def from_terms(cls, nvars: int, degree: int, terms: Mapping | Sequence = (), field: FieldSpec = QQ) -> HomogeneousForm:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponents, Fraction] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"exponent {e} does not fit {nvars} variables")
            if sum(e) != degree:
                raise DegreeMismatchError(f"monomial {e} is not of degree {degree}")
            acc[e] = acc.get(e, 0) + Fraction(c)
        out = {e: field.coerce(c) for e, c in acc.items()}
        return cls(nvars, degree, {e: c for e, c in out.items() if c != 0}, field)

    @classmethod
    def zero(cls, nvars: int, degree: int, field: FieldSpec = QQ) -> HomogeneousForm:
        return cls(nvars, degree, {}, field)

    @property
    def n(self) -> int:
        return self.nvars - 1

    def coeff(self, e: Sequence[int]):
        return self.terms.get(tuple(e), self.field.coerce(0))

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Exponents, object]]:
        return [(e, self.terms[e]) for e in sort_grlex(self.terms)]

    def coefficient_vector(self) -> list:
        """Coefficients on every monomial of the degree, in :func:`monomials` order."""
        z = self.field.coerce(0)
        return [self.terms.get(e, z) for e in monomial_list(self.nvars, self.degree)]

    def support_variables(self) -> set[int]:
        return {j for e in self.terms for j, x in enumerate(e) if x}

    def _check_compatible(self, other: HomogeneousForm) -> None:
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise DegreeMismatchError(
                f"forms of shape (nvars={self.nvars}, d={self.degree}) and (nvars={other.nvars}, d={other.degree})")
        if self.field != other.field:
            raise ValueError("forms live over different fields")

    def __add__(self, other: HomogeneousForm) -> HomogeneousForm:
        self._check_compatible(other)
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, 0) + c
        return HomogeneousForm.from_terms(self.nvars, self.degree, merged, self.field)

    def scale(self, c) -> HomogeneousForm:
        c = self.field.coerce(c)
        return HomogeneousForm.from_terms(self.nvars, self.degree, {e: v * c for e, v in self.terms.items()}, self.field)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{j}" + (f"^{x}" if x > 1 else "") for j, x in enumerate(e) if x)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


@dataclass(frozen=True)
class WaringExpression:
    """``sum_i lam_i * L_i**degree`` with each ``L_i`` given by its n+1 coefficients."""

    summands: tuple[tuple[object, tuple], ...]
    degree: int
    field: FieldSpec = QQ

    def __post_init__(self):
        for lam, lin in self.summands:
            if lam == 0:
                raise ValueError("Waring summand with zero weight")
            if not any(lin):
                raise ValueError("Waring summand with the zero linear form")

    @classmethod
    def from_linear_forms(cls, linear: Sequence[Sequence], degree: int, weights: Sequence | None = None,
                          field: FieldSpec = QQ) -> WaringExpression:
        weights = [1] * len(linear) if weights is None else list(weights)
        if len(weights) != len(linear):
            raise ValueError("one weight per linear form")
        return cls(tuple((field.coerce(w), tuple(field.coerce(x) for x in lin)) for w, lin in zip(weights, linear)),
                   degree, field)

    def __len__(self) -> int:
        return len(self.summands)

    def scale(self, c) -> WaringExpression:
        c = self.field.coerce(c)
        return WaringExpression(tuple((self.field.coerce(lam * c), lin) for lam, lin in self.summands), self.degree, self.field)


def expand(w: WaringExpression, n: int, d: int) -> HomogeneousForm:
    """Expand ``sum lam_i L_i**d`` into monomial coefficients over ``w.field``."""
    fld = w.field
    if w.degree != d:
        raise DegreeMismatchError(f"expression of degree {w.degree}, asked for {d}")
    fld.require_units_up_to(d)
    nv = n + 1
    for _, lin in w.summands:
        if len(lin) != nv:
            raise ValueError(f"linear form with {len(lin)} coefficients in {nv} variables")
    # powers[i][j][e] = lin_ij ** e
    powers = []
    for _, lin in w.summands:
        rows = []
        for c in lin:
            col = [1]
            for _ in range(d):
                col.append(col[-1] * c)
            rows.append(col)
        powers.append(rows)
    lams = [lam for lam, _ in w.summands]
    terms = {}
    for m in monomial_list(nv, d):
        support = [(j, x) for j, x in enumerate(m) if x]
        s = 0
        for lam, pw in zip(lams, powers):
            t = lam
            for j, x in support:
                t = t * pw[j][x]
            s += t
        if s:
            terms[m] = multinomial(m) * s
    return HomogeneousForm.from_terms(nv, d, terms, fld)


def multiply_by_variable(f: HomogeneousForm, var_index: int) -> HomogeneousForm:
    """Return ``x_{var_index} * f``."""
    if not 0 <= var_index < f.nvars:
        raise IndexOutOfRangeError(f"variable x{var_index} in {f.nvars} variables")
    terms = {}
    for e, c in f.terms.items():
        e2 = list(e)
        e2[var_index] += 1
        terms[tuple(e2)] = c
    return HomogeneousForm(f.nvars, f.degree + 1, terms, f.field)


def derivative(f: HomogeneousForm, r: Sequence[int]) -> HomogeneousForm:
    """Apply the differential operator with exponent vector ``r``."""
    r = tuple(r)
    order = sum(r)
    if order > f.degree:
        raise OrderExceedsDegreeError(f"order {order} derivative of a degree {f.degree} form")
    terms = {}
    for e, c in f.terms.items():
        if all(x >= y for x, y in zip(e, r)):
            k = falling(e, r)
            if k:
                terms[tuple(x - y for x, y in zip(e, r))] = k * c
    return HomogeneousForm.from_terms(f.nvars, f.degree - order, terms, f.field)


def partial_derivatives(f: HomogeneousForm, order: int) -> list[HomogeneousForm]:
    """All order-``order`` partial derivatives, indexed by :func:`monomials` of that degree."""
    if order < 0 or order > f.degree:
        raise OrderExceedsDegreeError(f"order {order} derivatives of a degree {f.degree} form")
    return [derivative(f, r) for r in monomial_list(f.nvars, order)]


# ---------------------------------------------------------------------------
# sampling

@dataclass(frozen=True)
class SeededSampler:
    """Seed plus coefficient bound; every draw from the same sampler repeats exactly.

    Integer coefficients are drawn uniformly from ``[-coeff_bound, coeff_bound]``
    with numpy's PCG64 generator. Use :meth:`derive` to obtain independent
    streams (one per trial, per sweep point, per retry).
    """

    seed: int
    coeff_bound: int = 100

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit natural number")
        if self.coeff_bound < 1:
            raise ValueError("coeff_bound must be positive")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def derive(self, *keys: int) -> SeededSampler:
        state = np.random.SeedSequence([self.seed, *keys]).generate_state(1, np.uint64)[0]
        return SeededSampler(int(state), self.coeff_bound)

    def integers(self, shape, rng: np.random.Generator | None = None) -> np.ndarray:
        rng = rng if rng is not None else self.generator()
        b = self.coeff_bound
        return rng.integers(-b, b + 1, size=shape, dtype=np.int64)


def random_waring(s: SeededSampler, n: int, d: int, h: int, field: FieldSpec = QQ) -> WaringExpression:
    """``h`` unit-weight powers of random integer linear forms, none of them zero."""
    if h < 1:
        raise ValueError("h must be at least 1")
    rng = s.generator()
    coeffs = s.integers((h, n + 1), rng)
    for i in range(h):
        while not coeffs[i].any():
            coeffs[i] = s.integers(n + 1, rng)
    return WaringExpression.from_linear_forms(coeffs.tolist(), d, field=field)


def random_form(s: SeededSampler, n: int, d: int, field: FieldSpec = QQ) -> HomogeneousForm:
    """A form whose every coefficient is an independent draw."""
    mons = monomial_list(n + 1, d)
    vals = s.integers(len(mons)).tolist()
    return HomogeneousForm.from_terms(n + 1, d, zip(mons, vals), field)


# ---------------------------------------------------------------------------
# form files
#
# {"nvars": 2, "degree": 3, "terms": [{"exponents": [3, 0], "coeff": "1/1"}, ...]}
#
# Terms are listed in decreasing graded-lex order, coefficients are reduced
# "p/q" strings with q >= 1, and the text is json.dumps(record, indent=2)
# followed by one newline.

def form_to_record(f: HomogeneousForm) -> dict:
    return {
        "nvars": f.nvars,
        "degree": f.degree,
        "terms": [{"exponents": list(e), "coeff": f.field.format(c)} for e, c in f.sorted_terms()],
    }


def form_from_record(rec: Mapping, field: FieldSpec = QQ) -> HomogeneousForm:
    try:
        nvars, degree, terms = int(rec["nvars"]), int(rec["degree"]), rec["terms"]
        items = [(t["exponents"], _parse_fraction(t["coeff"])) for t in terms]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormFormatError(f"malformed form record: {exc}") from exc
    return HomogeneousForm.from_terms(nvars, degree, items, field)


def _parse_fraction(text) -> Fraction:
    if not isinstance(text, str) or "." in text or "e" in text.lower():
        raise ValueError(f"coefficient {text!r} is not a 'p/q' string")
    return Fraction(text)


def dumps_form(f: HomogeneousForm) -> str:
    return json.dumps(form_to_record(f), indent=2) + "\n"


def loads_form(text: str, field: FieldSpec = QQ) -> HomogeneousForm:
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormFormatError(str(exc)) from exc
    return form_from_record(rec, field)


def write_form(path, f: HomogeneousForm) -> None:
    Path(path).write_text(dumps_form(f))


def read_form(path, field: FieldSpec = QQ) -> HomogeneousForm:
    return loads_form(Path(path).read_text(), field)

