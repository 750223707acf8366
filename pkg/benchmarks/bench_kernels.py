"""Compare the numba and pure-numpy backends of the modular kernels.

    python3 benchmarks/bench_kernels.py [--sizes 20 50 90] [--repeat 5]

Each kernel runs on the same inputs through both backends; results are
checked for equality before timings are reported. Numba compile time is
excluded by a warm-up call.
"""
import argparse
import timeit

import numpy as np

from flatrank import kernels
from flatrank._accel import HAVE_NUMBA
from flatrank.checks import SWEEP_PRIME
from flatrank.forms import monomial_list

P = SWEEP_PRIME


def cases(size: int, rng: np.random.Generator):
    a = rng.integers(0, P, size=(size, size), dtype=np.int64)
    # rank-deficient: rows are combinations of size // 2 random rows
    basis = rng.integers(0, 1000, size=(size // 2, size), dtype=np.int64)
    mix = rng.integers(0, 1000, size=(size, size // 2), dtype=np.int64)
    low = (mix @ basis) % P
    # power sums as in a Comon minor: a cubic-ish sweep point with h summands
    nv = max(2, size // 10)
    exps = np.array(monomial_list(nv, 4), dtype=np.int64)
    lin = rng.integers(-100, 101, size=(size, nv), dtype=np.int64)
    return {
        "det_mod_p": lambda use: kernels.det_mod_p(a, P, use_numba=use),
        "rank_mod_p": lambda use: kernels.rank_mod_p(low, P, use_numba=use),
        "power_sums_mod_p": lambda use: kernels.power_sums_mod_p(exps, lin, P, use_numba=use).tolist(),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 50, 90, 150])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18}{'size':>6}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for size in args.sizes:
        for name, fn in cases(size, rng).items():
            if fn(True) != fn(False):  # also warms up the jit
                raise SystemExit(f"{name} backends disagree at size {size}")
            t_nb = min(timeit.repeat(lambda: fn(True), number=1, repeat=args.repeat))
            t_np = min(timeit.repeat(lambda: fn(False), number=1, repeat=args.repeat))
            print(f"{name:<18}{size:>6}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
