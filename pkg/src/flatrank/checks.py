"""Decision procedures built on catalecticants.

* :func:`comon_check` and :func:`comon_sweep` run the ``x0 * F`` test for
  the equality of rank and symmetric rank of a general form of given rank.
* :func:`strassen_witness` certifies additivity of symmetric rank for forms
  in disjoint variables.
* :func:`hankel_matrix` and :func:`alpha_lift` work with binary forms in
  the weighted coordinates ``F = sum_i binom(d, i) Z_i x0**(d-i) x1**i``.
* :func:`osculating_containment` tests, by random evaluation, whether a
  catalecticant determinant vanishes on every ``x0 * F``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .errors import (
    DegreeMismatchError,
    NonSquareCatalecticantError,
    VariablesNotDisjointError,
)
from .exact import (
    QQ,
    DetProvenance,
    ExactMatrix,
    FieldSpec,
    determinant_certificate,
    random_prime,
    rank,
)
from .flattenings import catalecticant
from .forms import (
    HomogeneousForm,
    SeededSampler,
    WaringExpression,
    dimension_count,
    expand,
    falling,
    leading_monomials,
    monomial_list,
    multinomial,
    multiply_by_variable,
    random_form,
    random_waring,
)

#: Modulus used by sweeps unless told otherwise (2**31 - 1).
SWEEP_PRIME = 2147483647
MONOMIAL_ORDER = "grlex"


class Branch(str, Enum):
    USUAL_FLATTENINGS = "UsualFlattenings"
    HOLDS_NEW_METHOD = "HoldsNewMethod"
    EVEN_DEGREE_NA = "EvenDegreeNA"
    GROWTH_CONDITION_NA = "GrowthConditionNA"
    MINOR_TOO_LARGE_NA = "MinorTooLargeNA"
    DETERMINANT_VANISHED_NA = "DeterminantVanishedNA"


@dataclass(frozen=True)
class ComonVerdict:
    n: int
    d: int
    h: int
    branch: Branch
    threshold: int
    k: int | None
    det_provenance: DetProvenance
    seed: int
    field: str = "qq"
    minor: str = "upper-left"
    attempts: int = 0

    @property
    def holds(self) -> bool:
        return self.branch in (Branch.USUAL_FLATTENINGS, Branch.HOLDS_NEW_METHOD)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["branch"] = self.branch.value
        rec["det_provenance"] = self.det_provenance.value
        rec["monomial_order"] = MONOMIAL_ORDER
        return rec


def comon_threshold(n: int, d: int) -> int:
    """Smallest rank not handled by the middle catalecticant: binom(n + floor(d/2), n)."""
    return math.comb(n + d // 2, n)


def comon_check(n: int, d: int, h: int, sampler: SeededSampler, *, field: FieldSpec = QQ,
                retries: int = 0, minor: str = "upper-left", det_method: str = "auto",
                confirm_exact: bool = False, n_primes: int = 3) -> ComonVerdict:
    """Run the decision tree for a general degree-``d`` form in ``n + 1`` variables of rank ``h``.

    Branches, in order: ``h`` below :func:`comon_threshold` means the usual
    flattenings settle it; even ``d`` is not handled; with ``k = (d + 1) // 2``
    the growth condition ``binom(n+k, n) >= 2 binom(n+k-1, n)`` and the size
    condition ``2h - 1 <= binom(n+k, n)`` must hold. Otherwise a random
    ``F = sum_i L_i**d`` is drawn, and the ``(2h-1) x (2h-1)`` leading block
    of the order-``k`` catalecticant of ``x0 * F`` is tested for a nonzero
    determinant. On a vanishing determinant up to ``retries`` fresh draws
    are made. ``minor="random"`` picks random rows and columns instead of
    the leading block.
    """
    if n < 1 or d < 2 or h < 1:
        raise ValueError("need n >= 1, d >= 2, h >= 1")
    if minor not in ("upper-left", "random"):
        raise ValueError(f"unknown minor selection {minor!r}")
    threshold = comon_threshold(n, d)
    base = dict(n=n, d=d, h=h, threshold=threshold, seed=sampler.seed, field=str(field), minor=minor)
    if h < threshold:
        return ComonVerdict(branch=Branch.USUAL_FLATTENINGS, k=None, det_provenance=DetProvenance.NOT_COMPUTED, **base)
    if d % 2 == 0:
        return ComonVerdict(branch=Branch.EVEN_DEGREE_NA, k=None, det_provenance=DetProvenance.NOT_COMPUTED, **base)
    k = (d + 1) // 2
    big, small = math.comb(n + k, n), math.comb(n + k - 1, n)
    if big < 2 * small:
        return ComonVerdict(branch=Branch.GROWTH_CONDITION_NA, k=k, det_provenance=DetProvenance.NOT_COMPUTED, **base)
    size = 2 * h - 1
    if size > big:
        return ComonVerdict(branch=Branch.MINOR_TOO_LARGE_NA, k=k, det_provenance=DetProvenance.NOT_COMPUTED, **base)

    field.require_units_up_to(d + 1)
    for attempt in range(retries + 1):
        draw = sampler.derive(attempt)
        # integer draw; a prime field sees its reduction, so --confirm-exact rechecks the same F
        w = random_waring(draw, n, d, h)
        nonzero, prov = _minor_nonzero(w, n, d, size, draw, field, minor, det_method, confirm_exact, n_primes)
        if nonzero:
            return ComonVerdict(branch=Branch.HOLDS_NEW_METHOD, k=k, det_provenance=prov,
                                attempts=attempt + 1, **base)
    return ComonVerdict(branch=Branch.DETERMINANT_VANISHED_NA, k=k, det_provenance=prov,
                        attempts=retries + 1, **base)


def _minor_nonzero(w, n, d, size, draw, field, minor, det_method, confirm_exact, n_primes):
    sel_rng = draw.derive(2).generator
    if field.is_rational:
        P = comon_minor(w, n, d, size, minor=minor, rng=sel_rng())
        res = determinant_certificate(P, method=det_method, n_primes=n_primes,
                                      rng=draw.derive(1).generator(), confirm_exact=confirm_exact)
        return res.nonzero, res.provenance
    # a residue is only a modular evaluation of the characteristic-zero determinant
    P = comon_minor(reduce_waring(w, field), n, d, size, minor=minor, rng=sel_rng())
    res = determinant_certificate(P)
    if confirm_exact:
        exact = determinant_certificate(comon_minor(w, n, d, size, minor=minor, rng=sel_rng()), method="exact")
        return exact.nonzero, exact.provenance
    return res.nonzero, DetProvenance.MODULAR_NONZERO if res.nonzero else DetProvenance.MODULAR_ZERO_UNCONFIRMED


def reduce_waring(w: WaringExpression, field: FieldSpec) -> WaringExpression:
    """The same expression with weights and coefficients mapped into ``field``."""
    return WaringExpression.from_linear_forms([lin for _, lin in w.summands], w.degree,
                                              [lam for lam, _ in w.summands], field)


def comon_minor(w: WaringExpression, n: int, d: int, size: int, *, minor: str = "upper-left",
                rng: np.random.Generator | None = None) -> ExactMatrix:
    """A ``size x size`` block of the order-``(d+1)//2`` catalecticant of ``x0 * expand(w)``.

    Only the entries of the block are evaluated: the coefficient of ``x**m``
    in ``x0 * F`` is the coefficient of ``x**(m - e0)`` in ``F``, which is
    ``multinomial * sum_i lam_i * L_i**(m - e0)``. Over a prime field the
    power sums run through :func:`flatrank.kernels.power_sums_mod_p`.
    """
    fld = w.field
    nv = n + 1
    k = (d + 1) // 2
    if minor == "upper-left":
        rows = leading_monomials(nv, k, size)
        cols = leading_monomials(nv, d + 1 - k, size)
    else:
        rng = rng if rng is not None else np.random.default_rng()
        all_r, all_c = monomial_list(nv, k), monomial_list(nv, d + 1 - k)
        rows = [all_r[i] for i in sorted(rng.choice(len(all_r), size, replace=False))]
        cols = [all_c[i] for i in sorted(rng.choice(len(all_c), size, replace=False))]

    needed = sorted({_drop_x0(tuple(a + b for a, b in zip(r, c))) for r in rows for c in cols} - {None})
    sums = _power_sums(w, needed)
    fcoef = {m: multinomial(m) * s for m, s in zip(needed, sums)}
    entries = []
    for r in rows:
        line = []
        for c in cols:
            m = tuple(a + b for a, b in zip(r, c))
            mf = _drop_x0(m)
            line.append(0 if mf is None else fcoef[mf] * falling(m, r))
        entries.append(line)
    return ExactMatrix.from_rows(entries, fld, cols=len(cols))


def _drop_x0(m: tuple) -> tuple | None:
    return None if m[0] == 0 else (m[0] - 1,) + m[1:]


def _power_sums(w: WaringExpression, exps: Sequence[tuple]) -> list:
    if not exps:
        return []
    if not w.field.is_rational:
        lin = np.array([lin for _, lin in w.summands], dtype=np.int64)
        lam = np.array([lam for lam, _ in w.summands], dtype=np.int64)
        return kernels.power_sums_mod_p(np.array(exps, dtype=np.int64), lin, w.field.p, lam).tolist()
    out = []
    for e in exps:
        support = [(j, x) for j, x in enumerate(e) if x]
        s = 0
        for lam, lin in w.summands:
            t = lam
            for j, x in support:
                t = t * lin[j] ** x
            s += t
        out.append(s)
    return out


def cat_rank_of_x0_times(w: WaringExpression, n: int, d: int) -> int:
    """Rank of the full order-``(d+1)//2`` catalecticant of ``x0 * F``, built from the generic path.

    An independent recomputation: expands ``F`` monomial by monomial,
    multiplies by ``x0`` and differentiates, sharing no code with
    :func:`comon_minor`.
    """
    G = multiply_by_variable(expand(w, n, d), 0)
    return rank(catalecticant(G, (d + 1) // 2).matrix)


def _sweep_one(args) -> ComonVerdict:
    n, d, sampler, kwargs = args
    return comon_check(n, d, comon_threshold(n, d), sampler, **kwargs)


def iter_comon_sweep(d: int, n_values: Iterable[int], sampler: SeededSampler, *, jobs: int = 1,
                     field: FieldSpec | None = None, **kwargs) -> Iterator[ComonVerdict]:
    """Yield one verdict per ``n`` with ``h = comon_threshold(n, d)``, in the order of ``n_values``.

    Each ``n`` draws from ``sampler.derive(n)`` and that derived seed is what
    the verdict records, so any single point can be replayed with
    :func:`comon_check`. ``jobs > 1`` evaluates points in worker processes.
    """
    if d % 2 == 0:
        raise ValueError("sweeps need an odd degree")
    field = FieldSpec.prime(SWEEP_PRIME) if field is None else field
    kwargs = dict(kwargs, field=field)
    tasks = [(n, d, sampler.derive(n), kwargs) for n in n_values]
    if jobs <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield _sweep_one(t)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_sweep_one, tasks)


def comon_sweep(d: int, n_values: Iterable[int], sampler: SeededSampler, **kwargs) -> list[ComonVerdict]:
    return list(iter_comon_sweep(d, n_values, sampler, **kwargs))


def default_jobs() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Strassen additivity

@dataclass(frozen=True)
class StrassenWitness:
    s: int
    rank_f: int
    rank_g: int
    rank_sum: int
    additivity_certified: bool


def strassen_witness(f: HomogeneousForm, g: HomogeneousForm, s: int,
                     known_rank_f: int, known_rank_g: int) -> StrassenWitness:
    """Catalecticant ranks of ``f``, ``g`` and ``f + g`` at order ``s``.

    When both single ranks equal the supplied symmetric ranks, the symmetric
    rank of ``f + g`` is their sum and ``additivity_certified`` is set;
    otherwise nothing is claimed.
    """
    if (f.nvars, f.degree) != (g.nvars, g.degree):
        raise DegreeMismatchError(f"forms in ({f.nvars} vars, degree {f.degree}) and ({g.nvars} vars, degree {g.degree})")
    shared = f.support_variables() & g.support_variables()
    if shared:
        raise VariablesNotDisjointError(f"both forms involve x{min(shared)}")
    rf = rank(catalecticant(f, s).matrix)
    rg = rank(catalecticant(g, s).matrix)
    rs = rank(catalecticant(f + g, s).matrix)
    certified = rf == known_rank_f and rg == known_rank_g
    return StrassenWitness(s, rf, rg, rs, certified)


# ---------------------------------------------------------------------------
# binary forms and Hankel matrices

@dataclass(frozen=True)
class HankelCoords:
    """Weighted coordinates ``Z`` of a binary form of degree ``d``."""

    d: int
    Z: tuple
    field: FieldSpec = QQ

    def __post_init__(self):
        if len(self.Z) != self.d + 1:
            raise ValueError(f"degree {self.d} needs {self.d + 1} coordinates, got {len(self.Z)}")

    @classmethod
    def of(cls, Z: Sequence, field: FieldSpec = QQ) -> HankelCoords:
        return cls(len(Z) - 1, tuple(field.coerce(z) for z in Z), field)


def to_hankel_coords(f: HomogeneousForm) -> HankelCoords:
    """``Z_i = coeff(x0**(d-i) x1**i) / binom(d, i)``."""
    if f.nvars != 2:
        raise ValueError("Hankel coordinates are defined for binary forms")
    d, fld = f.degree, f.field
    fld.require_units_up_to(d)
    Z = tuple(fld.coerce(Fraction(f.coeff((d - i, i))) / math.comb(d, i)) if fld.is_rational
              else fld.coerce(f.coeff((d - i, i)) * pow(math.comb(d, i), -1, fld.p))
              for i in range(d + 1))
    return HankelCoords(d, Z, fld)


def from_hankel_coords(z: HankelCoords) -> HomogeneousForm:
    d = z.d
    return HomogeneousForm.from_terms(2, d, {(d - i, i): math.comb(d, i) * z.Z[i] for i in range(d + 1)}, z.field)


def hankel_shape(d: int) -> tuple[int, int]:
    """(m+1, m+1) for d = 2m and (m+2, m+1) for d = 2m+1."""
    m = d // 2
    return (m + 1, m + 1) if d % 2 == 0 else (m + 2, m + 1)


def hankel_matrix(z: HankelCoords) -> ExactMatrix:
    """The matrix with entry ``Z[i + j]`` (0-based) of shape :func:`hankel_shape`."""
    rows, cols = hankel_shape(z.d)
    return ExactMatrix(rows, cols, tuple(tuple(z.Z[i + j] for j in range(cols)) for i in range(rows)), z.field)


def alpha_lift(z: HankelCoords) -> HankelCoords:
    """Coordinates of ``x0 * F``: ``Z'_i = (d+1-i)/(d+1) Z_i`` and ``Z'_(d+1) = 0``."""
    d, fld = z.d, z.field
    fld.require_units_up_to(d + 1)
    if fld.is_rational:
        Z = [Fraction(d + 1 - i, d + 1) * z.Z[i] for i in range(d + 1)]
    else:
        inv = pow(d + 1, -1, fld.p)
        Z = [(d + 1 - i) * inv * z.Z[i] for i in range(d + 1)]
    return HankelCoords(d + 1, tuple(fld.coerce(v) for v in Z) + (fld.coerce(0),), fld)


# ---------------------------------------------------------------------------
# osculating containment

class Containment(str, Enum):
    CONTAINED_PROBABILISTICALLY = "ContainedProbabilistically"
    NOT_CONTAINED = "NotContained"


@dataclass(frozen=True)
class OsculatingResult:
    status: Containment
    n: int
    d: int
    s: int
    trials: int
    zero_count: int
    prime: int
    matrix_size: int
    witness_seed: int | None = None

    @property
    def false_zero_bound(self) -> float:
        """Per-trial chance that a nonzero determinant evaluates to 0 mod ``prime``."""
        return self.matrix_size / self.prime

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["status"] = self.status.value
        rec["false_zero_bound"] = self.false_zero_bound
        return rec


def osculating_containment(n: int, d: int, s: int, trials: int, sampler: SeededSampler, *,
                           prime: int | None = None, rank_h: int | None = None) -> OsculatingResult:
    """Test whether ``det Cat_s(x0 * F)`` vanishes for every degree-``d`` form ``F``.

    Trial ``t`` draws ``F`` from ``sampler.derive(t)``: a form with independent
    coefficients, or a sum of ``rank_h`` powers when ``rank_h`` is given. The
    determinant is evaluated modulo a prime larger than ``size * 2**20``. The
    first nonzero value is a certified nonvanishing and stops the run.
    """
    size = dimension_count(n, s)
    if size != dimension_count(n, d + 1 - s):
        raise NonSquareCatalecticantError(
            f"Cat_{s} of a degree {d + 1} form in {n + 1} variables is {size}x{dimension_count(n, d + 1 - s)}")
    if trials < 1:
        raise ValueError("trials must be positive")
    if prime is None:
        prime = random_prime(sampler.derive(2**32).generator())
    fld = FieldSpec.prime(prime, d + 1)
    if prime <= size * 2**20:
        raise ValueError(f"prime {prime} must exceed size * 2**20 = {size * 2**20}")
    zeros = 0
    for t in range(trials):
        draw = sampler.derive(t)
        if rank_h is None:
            F = random_form(draw, n, d, fld)
        else:
            F = expand(random_waring(draw, n, d, rank_h, fld), n, d)
        G = multiply_by_variable(F, 0)
        det = kernels.det_mod_p(catalecticant(G, s).matrix.to_residues(), prime)
        if det:
            return OsculatingResult(Containment.NOT_CONTAINED, n, d, s, t + 1, zeros, prime, size, draw.seed)
        zeros += 1
    return OsculatingResult(Containment.CONTAINED_PROBABILISTICALLY, n, d, s, trials, zeros, prime, size)
