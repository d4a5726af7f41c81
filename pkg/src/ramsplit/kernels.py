"""Hot kernels for the matrix-search tier, with selectable backend.

The exhaustive Pirutka search and the rank/minor verdict scans are the
only loops in the package that run millions of iterations, so they are
written once in nopython-compatible style and compiled with numba
``@njit`` by default.  Setting the environment variable
``RAMSPLIT_NO_NUMBA=1`` (before import) selects the plain NumPy/Python
fallback, which executes the identical source uncompiled; numba failing
to import falls back the same way.  ``benchmarks/bench_kernels.py``
times the two backends against each other.

All kernel integers stay below 2**63: callers cap ``ell**(n*d)`` at the
search budget before dispatching, so every intermediate product of two
residues fits comfortably in int64.

Kernel entry points (both backends expose the same callables):

``search_block(n, d, ell, lo, hi, out)``
    Scan candidate matrices whose first cell lies in ``[lo, hi)`` in
    row-major lexicographic order, with sound pruning.  Returns
    ``(found, examined, pruned)`` where ``examined`` counts every
    candidate accounted for (individually tested or skipped inside a
    pruned block) and ``pruned`` counts only the skipped ones.

``pirutka_verdict(cells, n, d, ell, scratch)``
    Full-rank check of every required submatrix, by elimination.

``square_oracle_verdict(cells, n, ell, perms, signs, colbuf)``
    Independent check that all maximal minors of (I | T) are nonzero
    mod ell, with determinants expanded over permutations.

``equivalence_scan(n, ell, perms, signs)``
    Compare the two verdicts over every square matrix with entries in
    {0..ell-1}; returns the lexicographic index of the first
    disagreement, or -1.
"""

from __future__ import annotations

import os
from itertools import permutations as _permutations
from types import SimpleNamespace

import numpy as np

__all__ = [
    "BACKEND",
    "active",
    "pure",
    "permutation_tables",
    "search_block",
    "pirutka_verdict",
    "square_oracle_verdict",
    "equivalence_scan",
]

_FLAG = os.environ.get("RAMSPLIT_NO_NUMBA", "").strip().lower()
_PURE_REQUESTED = _FLAG in {"1", "true", "yes", "on"}


def _build(jit):
    """Instantiate the kernel family under the given decorator."""

    @jit
    def popcount(x):
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @jit
    def full_col_rank(a, m, s, ell):
        # In-place elimination on the top-left m x s block of scratch `a`;
        # True iff every column receives a pivot.
        r = 0
        for c in range(s):
            piv = -1
            for i in range(r, m):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                return False
            if piv != r:
                for j in range(s):
                    tmp = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = tmp
            pv = a[r, c]
            for i in range(r + 1, m):
                f = a[i, c]
                if f != 0:
                    for j in range(s):
                        a[i, j] = (pv * a[i, j] - f * a[r, j]) % ell
            r += 1
        return True

    @jit
    def pirutka_verdict(cells, n, d, ell, scratch):
        for jm in range(1, 1 << d):
            s = popcount(jm)
            isz = n - d + s
            for im in range(1, 1 << n):
                if popcount(im) != isz:
                    continue
                r = 0
                for i in range(n):
                    if im >> i & 1:
                        c = 0
                        for j in range(d):
                            if jm >> j & 1:
                                scratch[r, c] = cells[i * d + j] % ell
                                c += 1
                        r += 1
                if not full_col_rank(scratch, isz, s, ell):
                    return False
        return True

    @jit
    def square_oracle_verdict(cells, n, ell, perms, signs, colbuf):
        nperm = perms.shape[0]
        for cm in range(1, 1 << (2 * n)):
            if popcount(cm) != n:
                continue
            k = 0
            for c in range(2 * n):
                if cm >> c & 1:
                    colbuf[k] = c
                    k += 1
            det = 0
            for p in range(nperm):
                term = signs[p]
                for r in range(n):
                    c = colbuf[perms[p, r]]
                    if c < n:
                        entry = 1 if c == r else 0
                    else:
                        entry = cells[r * n + (c - n)] % ell
                    term *= entry
                    if term == 0:
                        break
                det += term
            if det % ell == 0:
                return False
        return True

    @jit
    def equivalence_scan(n, ell, perms, signs):
        ncells = n * n
        cells = np.zeros(ncells, np.int64)
        scratch = np.empty((n, n), np.int64)
        colbuf = np.empty(n, np.int64)
        idx = 0
        while True:
            a = pirutka_verdict(cells, n, n, ell, scratch)
            b = square_oracle_verdict(cells, n, ell, perms, signs, colbuf)
            if a != b:
                return idx
            p = ncells - 1
            while p >= 0:
                cells[p] += 1
                if cells[p] < ell:
                    break
                cells[p] = 0
                p -= 1
            idx += 1
            if p < 0:
                return -1

    @jit
    def cell_ok(cells, n, d, pos):
        # Column condition from single-column submatrices: at most n-d
        # zero entries per column among the filled rows.
        if cells[pos] != 0:
            return True
        i = pos // d
        j = pos % d
        zeros = 0
        for r in range(i + 1):
            if cells[r * d + j] == 0:
                zeros += 1
        return zeros <= n - d

    @jit
    def row_ok(cells, n, d, ell, row, scratch):
        # Check every submatrix condition that became fully determined
        # when `row` completed: column sets of size >= 2, row sets of the
        # required size contained in the filled prefix and ending at `row`.
        for jm in range(1, 1 << d):
            s = popcount(jm)
            if s < 2:
                continue
            isz = n - d + s
            if isz - 1 > row:
                continue
            for im0 in range(1 << row):
                if popcount(im0) != isz - 1:
                    continue
                im = im0 | (1 << row)
                r = 0
                for i in range(row + 1):
                    if im >> i & 1:
                        c = 0
                        for j in range(d):
                            if jm >> j & 1:
                                scratch[r, c] = cells[i * d + j]
                                c += 1
                        r += 1
                if not full_col_rank(scratch, isz, s, ell):
                    return False
        return True

    @jit
    def search_block(n, d, ell, lo, hi, out):
        ncells = n * d
        cells = np.zeros(ncells, np.int64)
        scratch = np.empty((n, d), np.int64)
        skip = np.empty(ncells + 1, np.int64)
        skip[0] = 1
        for i in range(ncells):
            skip[i + 1] = skip[i] * ell
        examined = 0
        pruned = 0
        found = 0
        pos = 0
        cells[0] = lo
        while True:
            limit = hi if pos == 0 else ell
            if cells[pos] >= limit:
                pos -= 1
                if pos < 0:
                    break
                cells[pos] += 1
                continue
            ok = cell_ok(cells, n, d, pos)
            if ok and pos % d == d - 1:
                ok = row_ok(cells, n, d, ell, pos // d, scratch)
            if not ok:
                block = skip[ncells - pos - 1]
                examined += block
                if pos < ncells - 1:
                    pruned += block
                cells[pos] += 1
                continue
            if pos == ncells - 1:
                examined += 1
                found = 1
                for i in range(ncells):
                    out[i] = cells[i]
                break
            pos += 1
            cells[pos] = 0
        return found, examined, pruned

    return SimpleNamespace(
        popcount=popcount,
        full_col_rank=full_col_rank,
        pirutka_verdict=pirutka_verdict,
        square_oracle_verdict=square_oracle_verdict,
        equivalence_scan=equivalence_scan,
        cell_ok=cell_ok,
        row_ok=row_ok,
        search_block=search_block,
    )


def _identity(fn):
    return fn


pure = _build(_identity)

BACKEND = "numpy"
active = pure
if not _PURE_REQUESTED:
    try:
        from numba import njit

        active = _build(njit(cache=True, nogil=True))
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - environment without numba
        pass


def permutation_tables(n: int):
    """Permutation index/sign tables for determinant expansion of size n."""
    perms = list(_permutations(range(n)))
    signs = []
    for p in perms:
        inv = sum(
            1
            for i in range(n)
            for j in range(i + 1, n)
            if p[i] > p[j]
        )
        signs.append(1 if inv % 2 == 0 else -1)
    return (
        np.array(perms, dtype=np.int64).reshape(len(perms), n),
        np.array(signs, dtype=np.int64),
    )


search_block = active.search_block
pirutka_verdict = active.pirutka_verdict
square_oracle_verdict = active.square_oracle_verdict
equivalence_scan = active.equivalence_scan
