"""Exact fields, exact dense matrices, rank and determinant.

Two fields are supported: the rationals (``Fraction`` entries) and prime
fields GF(p) (``int`` residues in ``[0, p)``). Rational matrices are
eliminated fraction-free (Bareiss) after every row has been scaled to
integers; prime-field matrices go through the int64 kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime, nextprime, prevprime
from sympy.ntheory.modular import crt

from . import kernels
from .errors import FieldTooSmallError, NonSquareError, SizeExceededError

#: Bareiss is used up to this size in ``determinant_certificate(method="auto")``.
EXACT_DET_THRESHOLD = 12
#: Random certificate primes are drawn from (PRIME_LOW, PRIME_HIGH).
PRIME_LOW, PRIME_HIGH = 2**30, 2**31


@dataclass(frozen=True)
class FieldSpec:
    """The field entries live in: ``FieldSpec.rationals()`` or ``FieldSpec.prime(p)``."""

    kind: str = "QQ"
    p: int = 0

    def __post_init__(self):
        if self.kind == "QQ":
            if self.p != 0:
                raise ValueError("the rational field carries no modulus")
        elif self.kind == "Fp":
            if self.p >= kernels.MAX_MODULUS or not isprime(self.p) or self.p == 2:
                raise ValueError(f"{self.p} is not an odd prime below 2**31")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls("QQ", 0)

    @classmethod
    def prime(cls, p: int, d_max: int = 0) -> FieldSpec:
        """GF(p), refusing primes with ``p <= 2 * d_max``.

        The guard keeps every multinomial and falling-factorial scale met at
        degree ``d_max`` (and at ``d_max + 1`` after multiplying by a
        variable) invertible.
        """
        if p <= 2 * d_max:
            raise FieldTooSmallError(f"p={p} must exceed 2*d_max={2 * d_max}")
        return cls("Fp", int(p))

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``"qq"`` or ``"fp:<p>"``."""
        t = text.strip().lower()
        if t in ("qq", "q", "rationals"):
            return cls.rationals()
        if t.startswith("fp:"):
            return cls.prime(int(t[3:]))
        raise ValueError(f"field must be 'qq' or 'fp:<prime>', got {text!r}")

    @property
    def is_rational(self) -> bool:
        return self.kind == "QQ"

    def __str__(self) -> str:
        return "qq" if self.is_rational else f"fp:{self.p}"

    def coerce(self, x):
        """Map an int, ``Fraction`` or ``"p/q"`` string into this field."""
        q = Fraction(x)
        if self.is_rational:
            return q
        den = q.denominator % self.p
        if den == 0:
            raise FieldTooSmallError(f"denominator {q.denominator} vanishes mod {self.p}")
        return q.numerator * pow(den, -1, self.p) % self.p

    def require_units_up_to(self, m: int) -> None:
        """Raise unless 1, ..., m are all invertible."""
        if not self.is_rational and self.p <= m:
            raise FieldTooSmallError(f"p={self.p} must exceed {m}")

    def format(self, x) -> str:
        """Exact ``"p/q"`` text for a field element."""
        q = Fraction(x)
        return f"{q.numerator}/{q.denominator}"


QQ = FieldSpec.rationals()


@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple[tuple, ...]
    field: FieldSpec = QQ

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not form a {self.rows}x{self.cols} array")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], field: FieldSpec = QQ, *, cols: int | None = None) -> ExactMatrix:
        data = tuple(tuple(field.coerce(x) for x in r) for r in rows)
        ncols = len(data[0]) if data else (cols or 0)
        if cols is not None and data and ncols != cols:
            raise ValueError(f"expected {cols} columns, got {ncols}")
        return cls(len(data), ncols, data, field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: FieldSpec = QQ) -> ExactMatrix:
        z = field.coerce(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)), field)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list]:
        return [list(r) for r in self.entries]

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)), self.field)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> ExactMatrix:
        return ExactMatrix(len(row_idx), len(col_idx),
                           tuple(tuple(self.entries[i][j] for j in col_idx) for i in row_idx), self.field)

    def integer_rows(self) -> tuple[list[list[int]], list[int]]:
        """Rows scaled to integers, with the positive scale used for each row."""
        out, scales = [], []
        for r in self.entries:
            s = reduce(math.lcm, (Fraction(x).denominator for x in r), 1)
            out.append([int(Fraction(x) * s) for x in r])
            scales.append(s)
        return out, scales

    def to_residues(self) -> np.ndarray:
        """int64 residue array; prime fields only."""
        if self.field.is_rational:
            raise TypeError("to_residues needs a prime field")
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)


# ---------------------------------------------------------------------------
# fraction-free elimination on python ints

def bareiss_rank(a: list[list[int]]) -> int:
    a = [list(r) for r in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r, prev = 0, 1
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr, pv = a[r], a[r][c]
        for i in range(r + 1, rows):
            ri = a[i]
            f = ri[c]
            for j in range(c + 1, cols):
                ri[j] = (ri[j] * pv - f * pr[j]) // prev
            ri[c] = 0
        prev = pv
        r += 1
    return r


def bareiss_det(a: list[list[int]]) -> int:
    a = [list(r) for r in a]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk, pv = a[k], a[k][k]
        for i in range(k + 1, n):
            ri = a[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pv - f * pk[j]) // prev
        prev = pv
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# public operations

def rank(m: ExactMatrix) -> int:
    """Exact rank over the matrix's field."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.field.is_rational:
        ints, _ = m.integer_rows()
        return bareiss_rank(ints)
    return kernels.rank_mod_p(m.to_residues(), m.field.p)


def determinant(m: ExactMatrix):
    """Exact determinant as an element of the matrix's field."""
    if m.rows != m.cols:
        raise NonSquareError(f"determinant of a {m.rows}x{m.cols} matrix")
    if m.field.is_rational:
        ints, scales = m.integer_rows()
        return Fraction(bareiss_det(ints), math.prod(scales))
    return kernels.det_mod_p(m.to_residues(), m.field.p)


def upper_left_minor(m: ExactMatrix, k: int) -> ExactMatrix:
    """The leading ``k x k`` block under the matrix's row and column order."""
    if k < 0 or k > min(m.rows, m.cols):
        raise SizeExceededError(f"{k}x{k} block of a {m.rows}x{m.cols} matrix")
    return m.submatrix(range(k), range(k))


class DetProvenance(str, Enum):
    EXACT = "Exact"
    MODULAR_NONZERO = "ModularNonzero"
    MODULAR_ZERO_UNCONFIRMED = "ModularZeroUnconfirmed"
    NOT_COMPUTED = "NotComputed"


@dataclass(frozen=True)
class DeterminantResult:
    """Outcome of :func:`determinant_certificate`.

    ``value`` is the exact determinant when the exact path ran, else None.
    A modular zero is never reported as a certified zero.
    """

    nonzero: bool
    provenance: DetProvenance
    value: object = None
    primes: tuple[int, ...] = ()


def random_prime(rng: np.random.Generator, low: int = PRIME_LOW, high: int = PRIME_HIGH) -> int:
    """A prime in (low, high) found by stepping up from a uniform draw."""
    while True:
        p = nextprime(int(rng.integers(low, high)))
        if p < high:
            return int(p)


def random_primes(k: int, rng: np.random.Generator) -> tuple[int, ...]:
    out: list[int] = []
    while len(out) < k:
        p = random_prime(rng)
        if p not in out:
            out.append(p)
    return tuple(out)


def determinant_certificate(m: ExactMatrix, *, method: str = "auto", n_primes: int = 3,
                            rng: np.random.Generator | None = None, confirm_exact: bool = False,
                            exact_threshold: int = EXACT_DET_THRESHOLD) -> DeterminantResult:
    """Decide whether ``det(m)`` vanishes, recording how the answer was obtained.

    Over a prime field the determinant is computed in that field and is
    exact. Over the rationals ``method`` selects ``"exact"`` (Bareiss),
    ``"modular"`` (residues at ``n_primes`` random primes in (2**30, 2**31))
    or ``"auto"`` (exact up to ``exact_threshold``, modular above). Rows are
    cleared of denominators first, so every prime is admissible and a
    nonzero residue certifies a nonzero determinant. ``confirm_exact`` reruns
    the exact path after a modular evaluation.
    """
    if m.rows != m.cols:
        raise NonSquareError(f"determinant of a {m.rows}x{m.cols} matrix")
    if method not in ("auto", "exact", "modular"):
        raise ValueError(f"unknown method {method!r}")
    if not m.field.is_rational:
        v = determinant(m)
        return DeterminantResult(v != 0, DetProvenance.EXACT, v, (m.field.p,))
    if method == "exact" or (method == "auto" and m.rows <= exact_threshold):
        v = determinant(m)
        return DeterminantResult(v != 0, DetProvenance.EXACT, v)

    rng = rng if rng is not None else np.random.default_rng()
    primes = random_primes(n_primes, rng)
    ints, _ = m.integer_rows()
    arr = np.array(ints, dtype=object).reshape(m.rows, m.cols)
    nonzero = any(kernels.det_mod_p(arr, p) for p in primes)
    if confirm_exact:
        v = determinant(m)
        return DeterminantResult(v != 0, DetProvenance.EXACT, v, primes)
    prov = DetProvenance.MODULAR_NONZERO if nonzero else DetProvenance.MODULAR_ZERO_UNCONFIRMED
    return DeterminantResult(nonzero, prov, None, primes)


def hadamard_bound(ints: list[list[int]]) -> int:
    """An integer upper bound on ``|det|`` of an integer matrix."""
    sq = math.prod(sum(x * x for x in r) for r in ints)
    return math.isqrt(sq) + 1


def determinant_crt(m: ExactMatrix) -> Fraction:
    """Exact rational determinant rebuilt from residues by Chinese remaindering.

    Independent of the Bareiss route: residues come from the prime-field
    kernel at deterministic 31-bit primes until their product exceeds twice
    the Hadamard bound.
    """
    if m.rows != m.cols:
        raise NonSquareError(f"determinant of a {m.rows}x{m.cols} matrix")
    if not m.field.is_rational:
        raise TypeError("determinant_crt needs a rational matrix")
    ints, scales = m.integer_rows()
    bound = 2 * hadamard_bound(ints)
    arr = np.array(ints, dtype=object).reshape(m.rows, m.cols)
    primes, residues, modulus = [], [], 1
    p = PRIME_HIGH
    while modulus <= bound:
        p = int(prevprime(p))
        primes.append(p)
        residues.append(kernels.det_mod_p(arr, p))
        modulus *= p
    r, modulus = crt(primes, residues)
    r = int(r)
    if r > modulus // 2:
        r -= modulus
    return Fraction(r, math.prod(scales))
