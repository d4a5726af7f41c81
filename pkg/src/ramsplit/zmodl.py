"""Exact linear algebra over the integers and over Z/ell for a prime ell.

Everything here runs on Python integers, so there is no overflow and no
floating point anywhere: ranks, solutions, and minor gcds are exact.
Matrices are desk scale (a handful of rows and columns), so the
implementations favor clarity over asymptotics; ``minor_gcd`` in
particular enumerates minors directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

from .errors import InputError

__all__ = [
    "IntMatrix",
    "PrimeModulus",
    "as_modulus",
    "rank_mod",
    "solve_mod",
    "minor_gcd",
]


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (desk-scale inputs)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A prime number ell >= 2, validated at construction."""

    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise InputError(f"modulus must be an integer, got {self.value!r}")
        if not is_prime(self.value):
            raise InputError(f"modulus {self.value} is not prime")

    def __int__(self) -> int:
        return self.value


ModulusLike = Union[int, PrimeModulus]


def as_modulus(ell: ModulusLike) -> PrimeModulus:
    """Coerce an int to a validated PrimeModulus; pass one through."""
    if isinstance(ell, PrimeModulus):
        return ell
    return PrimeModulus(ell)


@dataclass(frozen=True)
class IntMatrix:
    """An immutable rectangular integer matrix (arbitrary magnitude)."""

    entries: tuple

    def __post_init__(self):
        if not self.entries or not all(isinstance(r, tuple) for r in self.entries):
            raise InputError("matrix entries must be a nonempty tuple of row tuples")
        width = len(self.entries[0])
        if width == 0:
            raise InputError("matrix must have at least one column")
        for row in self.entries:
            if len(row) != width:
                raise InputError("matrix rows must all have the same length")
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise InputError(f"matrix entry {x!r} is not an integer")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def to_lists(self) -> list:
        return [list(row) for row in self.entries]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        """Submatrix with the given 0-based row and column indices."""
        return IntMatrix(
            tuple(tuple(self.entries[i][j] for j in cols) for i in rows)
        )

    def reduced(self, ell: ModulusLike) -> "IntMatrix":
        m = int(as_modulus(ell))
        return IntMatrix(tuple(tuple(x % m for x in row) for row in self.entries))


def _rank_of_rows(rows: list, ell: int) -> int:
    """Rank of a list-of-lists matrix mod ell by exact elimination.

    Pivoting clears below with ``pv*row_i - f*row_pivot``, which multiplies
    row_i by a unit mod ell and so never changes the row space.
    """
    a = [[x % ell for x in row] for row in rows]
    nr, nc = len(a), len(a[0])
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        for i in range(r + 1, nr):
            f = a[i][c]
            if f:
                a[i] = [(pv * a[i][j] - f * a[r][j]) % ell for j in range(nc)]
        r += 1
        if r == nr:
            break
    return r


def rank_mod(m: IntMatrix, ell: ModulusLike) -> int:
    """Rank of ``m`` with entries reduced mod ell, by exact elimination."""
    return _rank_of_rows(m.to_lists(), int(as_modulus(ell)))


def _consistent(a_rows: list, b: list, ell: int) -> bool:
    """Whether A x = b (mod ell) has a solution: rank(A) == rank(A|b)."""
    if not a_rows or not a_rows[0]:
        return all(x % ell == 0 for x in b)
    aug = [row + [bv] for row, bv in zip(a_rows, b)]
    return _rank_of_rows(a_rows, ell) == _rank_of_rows(aug, ell)


def solve_mod(
    a: IntMatrix, b: Sequence[int], ell: ModulusLike
) -> Optional[tuple]:
    """Lexicographically least x in {0..ell-1}^cols with A x = b (mod ell).

    Returns None when the system is insoluble.  The lex tie-break is
    realized coordinate by coordinate: fix the smallest value for x_0 that
    keeps the remaining system consistent, then x_1, and so on.  Any
    partial assignment extends to a solution iff the residual system in
    the remaining unknowns is consistent, so the greedy choice is exact.
    """
    ellv = int(as_modulus(ell))
    if len(b) != a.rows:
        raise InputError(
            f"right-hand side has length {len(b)}, expected {a.rows}"
        )
    rows = a.to_lists()
    rhs = [int(x) % ellv for x in b]
    nc = a.cols
    if not _consistent(rows, rhs, ellv):
        return None
    solution = []
    for _ in range(nc):
        col = [row[0] for row in rows]
        rest = [row[1:] for row in rows]
        for v in range(ellv):
            residual = [(rhs[i] - v * col[i]) % ellv for i in range(len(rhs))]
            if _consistent(rest, residual, ellv):
                solution.append(v)
                rhs = residual
                break
        else:  # pragma: no cover - impossible once overall consistency holds
            raise AssertionError("greedy extension failed on a consistent system")
        rows = rest
    return tuple(solution)


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss elimination)."""
    a = [list(r) for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise InputError("determinant requires a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def minor_gcd(m: IntMatrix) -> int:
    """gcd over Z of all cols x cols minors of ``m`` (0 if all vanish).

    Requires rows >= cols.  A prime ell divides this gcd exactly when the
    matrix drops below full column rank mod ell.
    """
    if m.rows < m.cols:
        raise InputError(
            f"minor_gcd requires rows >= cols, got {m.rows} x {m.cols}"
        )
    g = 0
    all_cols = range(m.cols)
    for rows in combinations(range(m.rows), m.cols):
        sub = [[m.entries[i][j] for j in all_cols] for i in rows]
        g = math.gcd(g, abs(det_int(sub)))
        if g == 1:
            break
    return g
