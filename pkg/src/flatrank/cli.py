"""Command-line front end.

Every report carries the seed it ran with; when ``--seed`` is omitted one is
drawn from the OS entropy pool and echoed. Exit status is 0 whenever a result
was computed (including "method does not apply" verdicts) and 2 on usage
errors.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from fractions import Fraction

from .checks import (
    SWEEP_PRIME,
    Branch,
    HankelCoords,
    alpha_lift,
    comon_check,
    default_jobs,
    hankel_matrix,
    iter_comon_sweep,
    osculating_containment,
    strassen_witness,
    to_hankel_coords,
)
from .errors import FlatrankError
from .exact import FieldSpec, rank
from .flattenings import catalecticant, catalecticant_ranks
from .forms import SeededSampler, read_form

VERDICT_TEXT = {
    Branch.USUAL_FLATTENINGS: "holds for the general form of rank h: the middle catalecticant has rank h",
    Branch.HOLDS_NEW_METHOD: "holds for the general form of rank h: the x0*F catalecticant minor is nonzero",
    Branch.EVEN_DEGREE_NA: "method does not apply: even degree",
    Branch.GROWTH_CONDITION_NA: "method does not apply: binom(n+k,n) < 2*binom(n+k-1,n)",
    Branch.MINOR_TOO_LARGE_NA: "method does not apply: 2h-1 exceeds the number of order-k derivatives",
    Branch.DETERMINANT_VANISHED_NA: "method does not apply: the determinant vanishes",
}


def _parse_range(text: str) -> list[int]:
    """``"2..30"`` (inclusive), ``"4"`` or ``"3,5,8"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use A..B or a comma list")


def _parse_coords(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coordinate list {text!r}")


def _parse_field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except (ValueError, FlatrankError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="64-bit seed (drawn and echoed if omitted)")
    common.add_argument("--coeff-bound", type=int, default=100, help="random coefficients lie in [-B, B]")
    common.add_argument("--field", type=_parse_field, default=None, help="qq or fp:<prime>")
    common.add_argument("--retries", type=int, default=0, help="fresh draws after a vanishing determinant")
    common.add_argument("--output", choices=("human", "structured"), default="human")

    p = argparse.ArgumentParser(prog="flatrank", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("comon", parents=[common], help="run the x0*F test at one (n, d, h)")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--confirm-exact", action="store_true", help="recheck modular determinants over QQ")
    c.add_argument("--minor", choices=("upper-left", "random"), default="upper-left")
    c.add_argument("--det-method", choices=("auto", "exact", "modular"), default="auto")

    s = sub.add_parser("sweep", parents=[common], help="run comon with h = binom(n+floor(d/2), n) over a range of n")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n", type=_parse_range, required=True, help="A..B or comma list")
    s.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    s.add_argument("--confirm-exact", action="store_true")

    k = sub.add_parser("catalecticant", parents=[common], help="catalecticant ranks of a form file")
    k.add_argument("--form", required=True)
    k.add_argument("--s", type=int, default=None, help="order (default: every order)")
    k.add_argument("--show-matrix", action="store_true")

    t = sub.add_parser("strassen", parents=[common], help="additivity witness for forms in disjoint variables")
    t.add_argument("--f", required=True)
    t.add_argument("--g", required=True)
    t.add_argument("--s", type=int, required=True)
    t.add_argument("--rank-f", type=int, required=True)
    t.add_argument("--rank-g", type=int, required=True)

    hk = sub.add_parser("hankel", parents=[common], help="Hankel matrix of a binary form")
    src = hk.add_mutually_exclusive_group(required=True)
    src.add_argument("--z", type=_parse_coords, help="comma-separated coordinates Z0,...,Zd")
    src.add_argument("--form", help="binary form file")

    lf = sub.add_parser("lift", parents=[common], help="coordinates of x0*F from those of F")
    lf.add_argument("--z", type=_parse_coords, required=True)

    o = sub.add_parser("osculate", parents=[common], help="does det Cat_s(x0*F) vanish for all F?")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--s", type=int, required=True)
    o.add_argument("--trials", type=int, default=20)
    o.add_argument("--prime", type=int, default=None)
    o.add_argument("--rank-h", type=int, default=None, help="draw F as a sum of this many powers")
    return p


def _emit(args, record: dict, human: list[str]) -> None:
    if args.output == "structured":
        print(json.dumps(record), flush=True)
    else:
        print("\n".join(human), flush=True)


def _fmt(fld: FieldSpec, x) -> str:
    q = Fraction(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _matrix_lines(m) -> list[str]:
    return ["[" + ", ".join(_fmt(m.field, x) for x in row) + "]" for row in m.entries]


def _cmd_comon(args, sampler) -> None:
    fld = args.field or FieldSpec.rationals()
    t0 = time.perf_counter()
    v = comon_check(args.n, args.d, args.h, sampler, field=fld, retries=args.retries, minor=args.minor,
                    det_method=args.det_method, confirm_exact=args.confirm_exact)
    rec = v.to_record() | {"timing": round(time.perf_counter() - t0, 6)}
    _emit(args, rec, [
        f"Lowest rank for which the usual flattenings method does not work = {v.threshold}",
        f"{v.branch.value}: {VERDICT_TEXT[v.branch]}",
        f"n={v.n} d={v.d} h={v.h} k={v.k} field={v.field} det={v.det_provenance.value} seed={v.seed}",
    ])


def _cmd_sweep(args, sampler) -> None:
    fld = args.field or FieldSpec.prime(SWEEP_PRIME)
    jobs = args.jobs or default_jobs()
    t0 = time.perf_counter()
    counts: dict[str, int] = {}
    for v in iter_comon_sweep(args.d, args.n, sampler, jobs=jobs, field=fld, retries=args.retries,
                              confirm_exact=args.confirm_exact):
        counts[v.branch.value] = counts.get(v.branch.value, 0) + 1
        rec = v.to_record() | {"timing": round(time.perf_counter() - t0, 6)}
        _emit(args, rec, [f"n={v.n} d={v.d} h={v.h} threshold={v.threshold} {v.branch.value} "
                          f"det={v.det_provenance.value} seed={v.seed}"])
    if args.output == "human":
        summary = ", ".join(f"{b}: {c}" for b, c in counts.items())
        print(f"sweep d={args.d} seed={sampler.seed} field={fld}: {summary}")


def _cmd_catalecticant(args, sampler) -> None:
    f = read_form(args.form, args.field or FieldSpec.rationals())
    orders = range(f.degree + 1) if args.s is None else [args.s]
    if args.s is None:
        ranks = catalecticant_ranks(f)
    else:
        ranks = [rank(catalecticant(f, args.s).matrix)]
    rec = {"nvars": f.nvars, "degree": f.degree, "orders": list(orders), "ranks": ranks,
           "bound": max(ranks), "seed": sampler.seed}
    human = [f"Cat_{s}: rank {r}" for s, r in zip(orders, ranks)]
    if args.s is None:
        human.append(f"flattening rank bound: {max(ranks)}")
    if args.show_matrix:
        for s in orders:
            human.append(f"Cat_{s} =")
            human.extend("  " + line for line in _matrix_lines(catalecticant(f, s).matrix))
    _emit(args, rec, human)


def _cmd_strassen(args, sampler) -> None:
    fld = args.field or FieldSpec.rationals()
    w = strassen_witness(read_form(args.f, fld), read_form(args.g, fld), args.s, args.rank_f, args.rank_g)
    rec = {"s": w.s, "rank_f": w.rank_f, "rank_g": w.rank_g, "rank_sum": w.rank_sum,
           "additivity_certified": w.additivity_certified, "seed": sampler.seed}
    human = [f"Cat_{w.s} ranks: f={w.rank_f} g={w.rank_g} f+g={w.rank_sum}"]
    human.append(f"certified: srk(f+g) = {args.rank_f + args.rank_g}" if w.additivity_certified
                 else "not certified: a catalecticant rank differs from the supplied rank")
    _emit(args, rec, human)


def _cmd_hankel(args, sampler) -> None:
    fld = args.field or FieldSpec.rationals()
    z = HankelCoords.of(args.z, fld) if args.z is not None else to_hankel_coords(read_form(args.form, fld))
    m = hankel_matrix(z)
    r = rank(m)
    rec = {"d": z.d, "Z": [fld.format(x) for x in z.Z], "matrix": [[fld.format(x) for x in row] for row in m.entries],
           "rank": r, "seed": sampler.seed}
    _emit(args, rec, [f"M_{z.d} ({m.rows}x{m.cols}), rank {r}:"] + _matrix_lines(m))


def _cmd_lift(args, sampler) -> None:
    fld = args.field or FieldSpec.rationals()
    z = HankelCoords.of(args.z, fld)
    lz = alpha_lift(z)
    rec = {"d": lz.d, "Z": [fld.format(x) for x in lz.Z], "seed": sampler.seed}
    _emit(args, rec, ["Z' = [" + ", ".join(_fmt(fld, x) for x in lz.Z) + "]"])


def _cmd_osculate(args, sampler) -> None:
    t0 = time.perf_counter()
    r = osculating_containment(args.n, args.d, args.s, args.trials, sampler, prime=args.prime, rank_h=args.rank_h)
    rec = r.to_record() | {"seed": sampler.seed, "timing": round(time.perf_counter() - t0, 6)}
    human = [f"{r.status.value}: {r.zero_count}/{r.trials} zero determinants of size {r.matrix_size} mod {r.prime}"]
    if r.witness_seed is not None:
        human.append(f"nonzero determinant at trial seed {r.witness_seed}")
    human.append(f"seed={sampler.seed}")
    _emit(args, rec, human)


COMMANDS = {
    "comon": _cmd_comon,
    "sweep": _cmd_sweep,
    "catalecticant": _cmd_catalecticant,
    "strassen": _cmd_strassen,
    "hankel": _cmd_hankel,
    "lift": _cmd_lift,
    "osculate": _cmd_osculate,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    try:
        sampler = SeededSampler(seed, args.coeff_bound)
        COMMANDS[args.command](args, sampler)
    except (FlatrankError, ValueError, OSError) as exc:
        print(f"flatrank {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
