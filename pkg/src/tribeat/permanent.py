"""Exact permanents of complex matrices.

The permanent is the determinant without sign alternation,

    perm(M) = sum_sigma prod_i M[i, sigma(i)],

and governs every multiphoton transition amplitude computed in this package.
Two independent evaluators are provided: a brute-force sum over permutations
(`perm_naive`, the oracle) and Ryser's inclusion-exclusion formula with
Gray-code subset updates (`perm_ryser`, the workhorse).  `perm_batch` is the
same Ryser recursion vectorised over a batch of equally sized matrices.
"""

from itertools import permutations

import numpy as np

NAIVE_MAX_N = 8
RYSER_MAX_N = 30


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent requires a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("permanent requires at least a 1x1 matrix")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def perm_naive(m) -> complex:
    """Brute-force permanent, summing all n! permutation products.

    Guarded to n <= 8; intended as the independent oracle for `perm_ryser`.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise ValueError(f"perm_naive is guarded to n <= {NAIVE_MAX_N}, got n = {n}")
    rows = range(n)
    total = 0j
    for sigma in permutations(range(n)):
        p = 1.0 + 0j
        for i in rows:
            p *= a[i, sigma[i]]
        total += p
    return total


def perm_ryser(m) -> complex:
    """Permanent via Ryser's formula with Gray-code column updates, O(2^n * n).

    Subsets of columns are visited in Gray-code order so each step updates the
    running row sums by a single column; the summation order is fixed, making
    the result deterministic.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n > RYSER_MAX_N:
        raise ValueError(f"perm_ryser is guarded to n <= {RYSER_MAX_N}, got n = {n}")
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    sign = 1 if n % 2 == 0 else -1  # (-1)^n * (-1)^|S| accumulated incrementally
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        j = (gray ^ new_gray).bit_length() - 1
        if new_gray & (1 << j):
            row_sums += a[:, j]
            sign = -sign
        else:
            row_sums -= a[:, j]
            sign = -sign
        gray = new_gray
        total += sign * np.prod(row_sums)
    return complex(total)


def perm_batch(mats) -> np.ndarray:
    """Ryser permanents of a batch of matrices, shape (..., n, n) -> (...).

    Identical recursion to `perm_ryser`, vectorised over the leading axes.
    """
    a = np.asarray(mats, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"perm_batch requires shape (..., n, n), got {a.shape}")
    n = a.shape[-1]
    if n > RYSER_MAX_N:
        raise ValueError(f"perm_batch is guarded to n <= {RYSER_MAX_N}, got n = {n}")
    row_sums = np.zeros(a.shape[:-1], dtype=complex)
    total = np.zeros(a.shape[:-2], dtype=complex)
    gray = 0
    sign = 1 if n % 2 == 0 else -1
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        j = (gray ^ new_gray).bit_length() - 1
        if new_gray & (1 << j):
            row_sums += a[..., :, j]
            sign = -sign
        else:
            row_sums -= a[..., :, j]
            sign = -sign
        gray = new_gray
        total += sign * np.prod(row_sums, axis=-1)
    return total
