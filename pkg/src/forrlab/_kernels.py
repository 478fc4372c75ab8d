"""Batch GF(2) kernels for the Monte-Carlo verifiers.

These duplicate f2linalg semantics (rank, inverse-transpose, half-matrix
products) in tight loops over candidate batches so that million-sample
verification runs stay in seconds.  Tests cross-check them against
f2linalg.  numba is used when importable; the same code runs (slowly) as
plain Python otherwise.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

_ONE = np.uint64(1)


@njit(cache=True)
def _rank_u64(work: np.ndarray, ncols: int) -> int:
    nrows = work.shape[0]
    rk = 0
    for col in range(ncols):
        c = np.uint64(col)
        pivot = -1
        for r in range(rk, nrows):
            if (work[r] >> c) & _ONE:
                pivot = r
                break
        if pivot < 0:
            continue
        tmp = work[rk]
        work[rk] = work[pivot]
        work[pivot] = tmp
        prow = work[rk]
        for r in range(nrows):
            if r != rk and ((work[r] >> c) & _ONE):
                work[r] ^= prow
        rk += 1
        if rk == nrows:
            break
    return rk


@njit(cache=True)
def _parity_u64(v: np.uint64) -> np.uint64:
    v ^= v >> np.uint64(32)
    v ^= v >> np.uint64(16)
    v ^= v >> np.uint64(8)
    v ^= v >> np.uint64(4)
    v ^= v >> np.uint64(2)
    v ^= v >> np.uint64(1)
    return v & _ONE


@njit(cache=True)
def _transpose_u64(rows: np.ndarray, n: int, out: np.ndarray) -> None:
    for j in range(n):
        acc = np.uint64(0)
        for i in range(n):
            acc |= ((rows[i] >> np.uint64(j)) & _ONE) << np.uint64(i)
        out[j] = acc


@njit(cache=True)
def _invert_u64(m: np.ndarray, n: int, out: np.ndarray) -> bool:
    work = np.empty(n, np.uint64)
    for i in range(n):
        work[i] = m[i] | (_ONE << np.uint64(n + i))
    for col in range(n):
        c = np.uint64(col)
        pivot = -1
        for r in range(col, n):
            if (work[r] >> c) & _ONE:
                pivot = r
                break
        if pivot < 0:
            return False
        tmp = work[col]
        work[col] = work[pivot]
        work[pivot] = tmp
        prow = work[col]
        for r in range(n):
            if r != col and ((work[r] >> c) & _ONE):
                work[r] ^= prow
    for i in range(n):
        out[i] = work[i] >> np.uint64(n)
    return True


@njit(cache=True)
def full_row_rank_count(cands: np.ndarray, ncols: int) -> int:
    """How many of the candidate row-batches have full row rank."""
    count = 0
    for i in range(cands.shape[0]):
        work = cands[i].copy()
        if _rank_u64(work, ncols) == cands.shape[1]:
            count += 1
    return count


@njit(cache=True)
def invertible_key_scan(cands: np.ndarray, n: int, keys: np.ndarray) -> int:
    """Pack each invertible candidate into an n*n-bit key; returns the count."""
    count = 0
    for i in range(cands.shape[0]):
        work = cands[i].copy()
        if _rank_u64(work, n) == n:
            key = np.uint64(0)
            for j in range(n):
                key |= cands[i][j] << np.uint64(j * n)
            keys[count] = key
            count += 1
    return count


@njit(cache=True)
def hard_sample_scan(
    cands: np.ndarray,
    avals: np.ndarray,
    x: np.uint64,
    y: np.uint64,
    xd: np.uint64,
    yd: np.uint64,
    n: int,
    needed: int,
) -> tuple[int, int, int, int, int]:
    """Walk candidates; for each invertible A (paired with the next a) count:

    - shifted cross collisions  A2 x == B1 y + B1 a,
    - same-side kernel hits     A2 xd == 0  and  B1 yd == 0,

    where B = (A^T)^{-1}.  Returns (accepted, cross, a2_zero, b1_zero,
    candidates_consumed); stops once ``needed`` samples are accepted.
    """
    h = n // 2
    done = 0
    cross = 0
    a2_zero = 0
    b1_zero = 0
    consumed = 0
    at = np.empty(n, np.uint64)
    binv = np.empty(n, np.uint64)
    for idx in range(cands.shape[0]):
        consumed = idx + 1
        work = cands[idx].copy()
        if _rank_u64(work, n) < n:
            continue
        rows = cands[idx]
        _transpose_u64(rows, n, at)
        _invert_u64(at, n, binv)
        avec = avals[done]

        a2x = np.uint64(0)
        a2xd = np.uint64(0)
        for i in range(h):
            a2x |= _parity_u64(rows[h + i] & x) << np.uint64(i)
            a2xd |= _parity_u64(rows[h + i] & xd) << np.uint64(i)
        b1y = np.uint64(0)
        b1a = np.uint64(0)
        b1yd = np.uint64(0)
        for i in range(h):
            b1y |= _parity_u64(binv[i] & y) << np.uint64(i)
            b1a |= _parity_u64(binv[i] & avec) << np.uint64(i)
            b1yd |= _parity_u64(binv[i] & yd) << np.uint64(i)

        if a2x == (b1y ^ b1a):
            cross += 1
        if a2xd == np.uint64(0):
            a2_zero += 1
        if b1yd == np.uint64(0):
            b1_zero += 1
        done += 1
        if done == needed:
            break
    return done, cross, a2_zero, b1_zero, consumed
