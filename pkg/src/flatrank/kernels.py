"""Prime-field kernels on int64 arrays.

Every routine comes in two flavours: an explicit-loop version compiled with
numba and a vectorised numpy version. ``rank_mod_p``, ``det_mod_p`` and
``power_sums_mod_p`` dispatch to one of them according to
:data:`flatrank._accel.USE_NUMBA`.

Moduli must be primes below 2**31 so that a product of two reduced residues
fits in a signed 64-bit integer.
"""
from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

MAX_MODULUS = 2**31


def _check_modulus(p: int) -> None:
    if not 2 < p < MAX_MODULUS:
        raise ValueError(f"modulus {p} outside (2, 2**31)")


def as_residues(a, p: int) -> np.ndarray:
    """Reduce an integer array-like into a contiguous int64 array of residues mod ``p``."""
    arr = np.asarray(a)
    if arr.dtype.kind in "iu":
        arr = np.mod(arr.astype(np.int64), p)
    else:
        # python ints of any size
        arr = np.frompyfunc(lambda x: int(x) % p, 1, 1)(arr.astype(object)).astype(np.int64)
    return np.ascontiguousarray(arr, dtype=np.int64)


# ---------------------------------------------------------------------------
# loop kernels (numba)

@njit
def _powmod_loop(b, e, p):
    r = 1
    b = b % p
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


@njit
def _rank_loop(a, p):
    a = a.copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        inv = _powmod_loop(a[r, c], p - 2, p)
        for j in range(c, cols):
            a[r, j] = a[r, j] * inv % p
        for i in range(r + 1, rows):
            f = a[i, c]
            if f != 0:
                for j in range(c, cols):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        r += 1
    return r


@njit
def _det_loop(a, p):
    a = a.copy()
    n = a.shape[0]
    det = 1
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != c:
            for j in range(c, n):
                t = a[c, j]
                a[c, j] = a[piv, j]
                a[piv, j] = t
            det = (p - det) % p
        det = det * a[c, c] % p
        inv = _powmod_loop(a[c, c], p - 2, p)
        for i in range(c + 1, n):
            f = a[i, c] * inv % p
            if f != 0:
                for j in range(c, n):
                    a[i, j] = (a[i, j] - f * a[c, j]) % p
    return det


@njit
def _power_sums_loop(exps, lin, w, p):
    m, nv = exps.shape
    h = lin.shape[0]
    dmax = 0
    for i in range(m):
        for j in range(nv):
            if exps[i, j] > dmax:
                dmax = exps[i, j]
    pw = np.empty((h, nv, dmax + 1), dtype=np.int64)
    for i in range(h):
        for j in range(nv):
            pw[i, j, 0] = 1
            b = lin[i, j] % p
            for e in range(1, dmax + 1):
                pw[i, j, e] = pw[i, j, e - 1] * b % p
    out = np.zeros(m, dtype=np.int64)
    for k in range(m):
        s = 0
        for i in range(h):
            t = 1
            for j in range(nv):
                t = t * pw[i, j, exps[k, j]] % p
            s = (s + w[i] * t) % p
        out[k] = s
    return out


# ---------------------------------------------------------------------------
# vectorised kernels (numpy)

def _rank_numpy(a: np.ndarray, p: int) -> int:
    a = a.copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv], c:] = a[[piv, r], c:]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r, c:] = a[r, c:] * inv % p
        f = a[r + 1:, c]
        if f.any():
            a[r + 1:, c:] = (a[r + 1:, c:] - np.outer(f, a[r, c:]) % p) % p
        r += 1
    return r


def _det_numpy(a: np.ndarray, p: int) -> int:
    a = a.copy()
    n = a.shape[0]
    det = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        piv = c + int(nz[0])
        if piv != c:
            a[[c, piv], c:] = a[[piv, c], c:]
            det = (p - det) % p
        pivot = int(a[c, c])
        det = det * pivot % p
        inv = pow(pivot, p - 2, p)
        f = a[c + 1:, c] * inv % p
        if f.any():
            a[c + 1:, c:] = (a[c + 1:, c:] - np.outer(f, a[c, c:]) % p) % p
    return det


def _power_sums_numpy(exps: np.ndarray, lin: np.ndarray, w: np.ndarray, p: int) -> np.ndarray:
    m, nv = exps.shape
    h = lin.shape[0]
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    dmax = int(exps.max()) if exps.size else 0
    pw = np.empty((h, nv, dmax + 1), dtype=np.int64)
    pw[:, :, 0] = 1
    base = lin % p
    for e in range(1, dmax + 1):
        pw[:, :, e] = pw[:, :, e - 1] * base % p
    acc = np.ones((h, m), dtype=np.int64)
    for j in range(nv):
        acc = acc * pw[:, j, exps[:, j]] % p
    acc = acc * w[:, None] % p
    # h * p < 2**63 for every h we meet
    return acc.sum(axis=0) % p


# ---------------------------------------------------------------------------
# dispatch

def rank_mod_p(a, p: int, *, use_numba: bool | None = None) -> int:
    """Rank of an integer matrix over GF(p)."""
    _check_modulus(p)
    arr = as_residues(a, p)
    if arr.ndim != 2 or 0 in arr.shape:
        return 0
    if _pick(use_numba):
        return int(_rank_loop(arr, np.int64(p)))
    return _rank_numpy(arr, p)


def det_mod_p(a, p: int, *, use_numba: bool | None = None) -> int:
    """Determinant of a square integer matrix over GF(p), as a residue in [0, p)."""
    _check_modulus(p)
    arr = as_residues(a, p)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"square matrix required, got shape {arr.shape}")
    if arr.shape[0] == 0:
        return 1
    if _pick(use_numba):
        return int(_det_loop(arr, np.int64(p)))
    return _det_numpy(arr, p)


def power_sums_mod_p(exps, lin, p: int, weights=None, *, use_numba: bool | None = None) -> np.ndarray:
    """For each exponent row ``e`` return ``sum_i w_i prod_j lin[i, j] ** e[j]`` mod ``p``.

    ``exps`` has shape (m, nvars), ``lin`` shape (h, nvars) and ``weights``
    (default all ones) shape (h,).
    """
    _check_modulus(p)
    e = np.ascontiguousarray(exps, dtype=np.int64)
    lv = as_residues(lin, p)
    if e.ndim != 2 or lv.ndim != 2 or (e.shape[0] and e.shape[1] != lv.shape[1]):
        raise ValueError("exponent and linear-form arrays disagree on the number of variables")
    if lv.shape[0] == 0:
        return np.zeros(e.shape[0], dtype=np.int64)
    w = np.ones(lv.shape[0], dtype=np.int64) if weights is None else as_residues(weights, p)
    if _pick(use_numba):
        return _power_sums_loop(e, lv, w, np.int64(p))
    return _power_sums_numpy(e, lv, w, p)


def _pick(use_numba: bool | None) -> bool:
    if use_numba is None:
        return USE_NUMBA
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return use_numba
