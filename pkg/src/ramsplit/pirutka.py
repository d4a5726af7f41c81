"""Pirutka matrices: checking, bad primes, exhaustive search, construction.

An n x d integer matrix T (n >= d) is ell-Pirutka when every submatrix
T_{I,J} with nonempty column set J and row set I of size n - d + |J| has
full rank |J| mod ell.  Rows of such a matrix prescribe which divisor
combinations get their ell-th roots adjoined when splitting ramification,
so the package cares about three things: verifying the property exactly,
locating the primes where it fails, and producing matrices that have it.

Checking is exact integer linear algebra (:mod:`ramsplit.zmodl`); the
exhaustive search runs on the compiled kernels of
:mod:`ramsplit.kernels`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from . import kernels
from .errors import BudgetExceededError, InputError
from .zmodl import IntMatrix, ModulusLike, as_modulus, minor_gcd, rank_mod

__all__ = [
    "PirutkaCandidate",
    "CheckReport",
    "BadPrimeSet",
    "SearchResult",
    "ExponentBound",
    "is_pirutka",
    "square_minor_oracle",
    "stacked_identity",
    "bad_primes",
    "exhaustive_search",
    "greedy_construct",
    "bound_exponent",
    "builtin_matrix",
    "builtin_names",
    "DEFAULT_SEARCH_BUDGET",
]

DEFAULT_SEARCH_BUDGET = 10**8


@dataclass(frozen=True)
class PirutkaCandidate:
    """An integer matrix with n >= d >= 1, the shape the definition assumes."""

    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows < self.matrix.cols:
            raise InputError(
                "Pirutka candidates need at least as many rows as columns, "
                f"got {self.matrix.rows} x {self.matrix.cols}"
            )

    @classmethod
    def from_rows(cls, rows) -> "PirutkaCandidate":
        return cls(IntMatrix.from_rows(rows))

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def d(self) -> int:
        return self.matrix.cols


@dataclass(frozen=True)
class CheckReport:
    """Outcome of an ell-Pirutka check.

    When the verdict is negative, ``witness_rows``/``witness_cols`` name
    the first failing (J, I) pair under the (|J|, J, I) ordering, as
    1-based sorted tuples, and ``witness_rank`` is the deficient rank.
    """

    verdict: bool
    witness_rows: Optional[tuple] = None
    witness_cols: Optional[tuple] = None
    witness_rank: Optional[int] = None

    def __post_init__(self):
        has_witness = self.witness_cols is not None
        if self.verdict == has_witness:
            raise InputError("witness must be present exactly when the verdict is false")


@dataclass(frozen=True)
class BadPrimeSet:
    """The exact set of primes at which a candidate fails the check."""

    all_primes: bool
    primes: tuple = ()

    def contains(self, ell: int) -> bool:
        return self.all_primes or ell in self.primes


@dataclass(frozen=True)
class SearchResult:
    """Exhaustive-search outcome with exact enumeration accounting.

    ``examined`` counts every candidate accounted for, whether tested
    individually or covered by a pruned block, so a completed fruitless
    search reports exactly ell**(n*d) and a successful one reports the
    1-based lexicographic index of the matrix found.  ``pruned`` is the
    subset of ``examined`` skipped inside pruned blocks.
    """

    found: Optional[PirutkaCandidate]
    examined: int
    pruned: int


@dataclass(frozen=True)
class ExponentBound:
    """A period-index exponent together with the matrix that realizes it."""

    exponent: int
    matrix_name: str
    rows: int


def _iter_required_pairs(n: int, d: int):
    """Yield (cols, rows) index pairs in the canonical (|J|, J, I) order, 0-based."""
    for jsize in range(1, d + 1):
        isize = n - d + jsize
        for cols in combinations(range(d), jsize):
            for rows in combinations(range(n), isize):
                yield cols, rows


def is_pirutka(candidate: PirutkaCandidate, ell: ModulusLike) -> CheckReport:
    """Check the full-rank condition on every required submatrix.

    Returns the first failing pair as a witness; the iteration order makes
    the witness deterministic and lexicographically least.
    """
    mod = as_modulus(ell)
    m = candidate.matrix
    for cols, rows in _iter_required_pairs(candidate.n, candidate.d):
        sub = m.submatrix(rows, cols)
        rank = rank_mod(sub, mod)
        if rank < len(cols):
            return CheckReport(
                verdict=False,
                witness_rows=tuple(i + 1 for i in rows),
                witness_cols=tuple(j + 1 for j in cols),
                witness_rank=rank,
            )
    return CheckReport(verdict=True)


def square_minor_oracle(candidate: PirutkaCandidate, ell: ModulusLike) -> bool:
    """For square T: are all n x n minors of (I_n | T) nonzero mod ell?

    This is the alternative characterization used by the greedy
    construction; it must agree with :func:`is_pirutka` on square input.
    """
    mod = as_modulus(ell)
    if candidate.n != candidate.d:
        raise InputError(
            f"square_minor_oracle requires a square matrix, got {candidate.n} x {candidate.d}"
        )
    n = candidate.n
    aug = IntMatrix.from_rows(
        [
            [1 if i == j else 0 for j in range(n)] + list(candidate.matrix.entries[i])
            for i in range(n)
        ]
    )
    for cols in combinations(range(2 * n), n):
        sub = aug.submatrix(range(n), cols)
        if rank_mod(sub, mod) < n:
            return False
    return True


def stacked_identity(d: int) -> PirutkaCandidate:
    """The d^2 x d matrix of d vertically stacked d x d identity blocks.

    Removing fewer than d rows always leaves every identity row present,
    so the matrix is ell-Pirutka for every prime ell.
    """
    if d < 1:
        raise InputError("stacked_identity requires d >= 1")
    block = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    return PirutkaCandidate.from_rows(block * d)


def _factor_with_bound(g: int, bound: int) -> list:
    """Prime factors of g > 1 by trial division up to ``bound``.

    Raises when a factor above the bound remains, naming the gcd.
    """
    factors = []
    rest = g
    p = 2
    while p <= bound and p * p <= rest:
        if rest % p == 0:
            factors.append(p)
            while rest % p == 0:
                rest //= p
        p += 1 if p == 2 else 2
    if rest > 1:
        if rest <= bound:
            factors.append(rest)
        else:
            raise BudgetExceededError(
                f"bound exceeded: minor gcd {g} has a prime factor above {bound}"
            )
    return factors


def bad_primes(candidate: PirutkaCandidate, search_bound: int) -> BadPrimeSet:
    """Exactly the primes ell at which :func:`is_pirutka` fails.

    Works through minor gcds: a prime is bad iff it divides the gcd of
    the maximal minors of some required submatrix, with gcd 0 meaning the
    submatrix is rank deficient over the rationals and every prime is
    bad.  ``search_bound`` only limits the trial-division factoring of
    the gcds; it must exceed their largest prime factor.
    """
    if search_bound < 2:
        raise InputError("search_bound must be at least 2")
    m = candidate.matrix
    bad: set = set()
    for cols, rows in _iter_required_pairs(candidate.n, candidate.d):
        g = minor_gcd(m.submatrix(rows, cols))
        if g == 0:
            return BadPrimeSet(all_primes=True)
        if g > 1:
            bad.update(_factor_with_bound(g, search_bound))
    return BadPrimeSet(all_primes=False, primes=tuple(sorted(bad)))


def _partition_first_cell(ell: int, workers: int) -> list:
    """Contiguous first-cell value ranges covering 0..ell-1, in order."""
    k = min(workers, ell)
    bounds = [round(i * ell / k) for i in range(k + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(k) if bounds[i] < bounds[i + 1]]


def exhaustive_search(
    n: int,
    d: int,
    ell: ModulusLike,
    *,
    budget: int = DEFAULT_SEARCH_BUDGET,
    workers: int = 1,
    progress=None,
) -> SearchResult:
    """Lexicographically least ell-Pirutka n x d matrix with entries in {0..ell-1}.

    Entries mod ell suffice because the property only depends on T mod
    ell.  The row-major lexicographic space is partitioned into
    contiguous blocks by first-cell value; blocks may run on concurrent
    threads, and the merge keeps the globally least witness and the exact
    sequential counts, so the result is independent of ``workers``.

    Raises :class:`BudgetExceededError` up front when ell**(n*d) exceeds
    ``budget``; there are no silent partial answers.
    """
    if d < 1 or n < d:
        raise InputError(f"search shape requires n >= d >= 1, got n={n}, d={d}")
    if workers < 1:
        raise InputError("workers must be >= 1")
    ellv = int(as_modulus(ell))
    space = ellv ** (n * d)
    if space > budget:
        raise BudgetExceededError(
            f"search space {ellv}**{n * d} = {space} exceeds budget {budget}"
        )

    blocks = _partition_first_cell(ellv, workers)
    outs = [np.zeros(n * d, np.int64) for _ in blocks]

    def run_block(idx: int):
        lo, hi = blocks[idx]
        return kernels.search_block(n, d, ellv, lo, hi, outs[idx])

    if len(blocks) == 1 or workers == 1:
        results = []
        for i in range(len(blocks)):
            results.append(run_block(i))
            if progress is not None:
                progress(i + 1, len(blocks))
            if results[-1][0]:
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, range(len(blocks))))
        if progress is not None:
            progress(len(blocks), len(blocks))

    examined = 0
    pruned = 0
    for i, (found, ex, pr) in enumerate(results):
        examined += int(ex)
        pruned += int(pr)
        if found:
            rows = [
                [int(outs[i][r * d + c]) for c in range(d)] for r in range(n)
            ]
            return SearchResult(
                found=PirutkaCandidate.from_rows(rows),
                examined=examined,
                pruned=pruned,
            )
    return SearchResult(found=None, examined=examined, pruned=pruned)


def _column_minor_ok(columns: list, newcol: list, filled: int, n: int, ell: int) -> bool:
    """Prefix check for the greedy construction.

    ``columns`` are the accepted columns of T; ``newcol`` is filled up to
    index ``filled`` (inclusive).  Checks every maximal minor of
    (I_n | columns | newcol) that involves ``newcol`` and is already
    determined by the filled rows.  Expanding the identity columns away,
    such a minor is (up to sign) the determinant of the previous columns
    plus ``newcol`` restricted to the rows not covered by the identity
    part, so it is determined once those rows are all <= ``filled``.
    """
    k = len(columns)
    for csize in range(min(k, filled) + 1):
        # rows used by the reduced determinant: csize from the previous
        # columns' side plus the newcol entry rows; the deepest row must
        # be `filled` so each minor is checked exactly once.
        for rows in combinations(range(filled + 1), csize + 1):
            if rows[-1] != filled:
                continue
            for prev in combinations(range(k), csize):
                sub = IntMatrix.from_rows(
                    [[columns[c][r] for c in prev] + [newcol[r]] for r in rows]
                )
                if rank_mod(sub, ell) < csize + 1:
                    return False
    return True


def _greedy_next_column(columns: list, n: int, ell: int):
    """Lexicographically least vector passing all new-minor conditions.

    Depth-first over entries with prefix pruning; yields candidates in
    lexicographic order, so the first full vector accepted is least.
    """
    vec = [0] * n
    pos = 0
    while True:
        if vec[pos] >= ell:
            pos -= 1
            if pos < 0:
                return None
            vec[pos] += 1
            continue
        if not _column_minor_ok(columns, vec, pos, n, ell):
            vec[pos] += 1
            continue
        if pos == n - 1:
            yield list(vec)
            vec[pos] += 1
            continue
        pos += 1
        vec[pos] = 0


def greedy_construct(n: int, ell: ModulusLike) -> Optional[PirutkaCandidate]:
    """Build an n x n ell-Pirutka matrix column by column.

    Each step takes the lexicographically least vector keeping all
    maximal minors of (I_n | t_1 ... t_k) that involve the new column
    nonzero mod ell, backtracking over earlier columns when a step has no
    admissible vector.  Success is guaranteed when ell > C(2n-1, n): at
    step k+1 the vector must avoid at most C(n+k, n-1) hyperplanes, which
    cannot cover all of (Z/ell)^n.  Returns None only when the whole
    space is exhausted, which the bound makes impossible for large ell.
    """
    if n < 1:
        raise InputError("greedy_construct requires n >= 1")
    ellv = int(as_modulus(ell))

    def build(columns: list):
        if len(columns) == n:
            return columns
        for vec in _greedy_next_column(columns, n, ellv):
            result = build(columns + [vec])
            if result is not None:
                return result
        return None

    columns = build([])
    if columns is None:
        return None
    rows = [[columns[c][r] for c in range(n)] for r in range(n)]
    candidate = PirutkaCandidate.from_rows(rows)
    if not square_minor_oracle(candidate, ellv):  # pragma: no cover - defensive
        raise AssertionError("greedy construction produced a non-Pirutka matrix")
    return candidate


_BUILTIN_ROWS = {
    "clever3x3": ((1, 3, 3), (1, 2, 1), (1, 1, 2)),
    "allprimes4x3": ((1, 1, 1), (1, 1, 0), (0, 1, 1), (1, 2, 1)),
}


def builtin_names() -> tuple:
    return tuple(sorted(_BUILTIN_ROWS)) + ("stacked:<d>",)


def builtin_matrix(name: str) -> PirutkaCandidate:
    """Resolve a built-in matrix name: clever3x3, allprimes4x3, stacked:<d>."""
    if name in _BUILTIN_ROWS:
        return PirutkaCandidate.from_rows(_BUILTIN_ROWS[name])
    if name.startswith("stacked:"):
        try:
            d = int(name.split(":", 1)[1])
        except ValueError:
            raise InputError(f"malformed stacked matrix name {name!r}") from None
        return stacked_identity(d)
    raise InputError(f"unknown builtin matrix {name!r}")


def bound_exponent(ell: ModulusLike, d: int) -> ExponentBound:
    """Period-index exponent N+1 from the smallest applicable builtin.

    N is the least row count among the built-in ell-Pirutka matrices with
    d+1 columns that apply to ell: the 3x3 matrix (primes above 3, d=2
    only), the 4x3 matrix (all primes, d=2 only), and the stacked
    identity with (d+1)^2 rows (all primes, any d).  Splitting
    ramification with an N-row matrix costs a degree-ell**N extension,
    and period equals index on the cover, hence the exponent N+1.  This
    is bookkeeping over the built-ins, not new mathematics.
    """
    if d < 1:
        raise InputError("bound_exponent requires d >= 1")
    ellv = int(as_modulus(ell))
    applicable = []
    if d + 1 == 3:
        if ellv > 3:
            applicable.append(("clever3x3", 3))
        applicable.append(("allprimes4x3", 4))
    applicable.append((f"stacked:{d + 1}", (d + 1) ** 2))
    name, rows = min(applicable, key=lambda item: item[1])
    return ExponentBound(exponent=rows + 1, matrix_name=name, rows=rows)


def pirutka_binomial_bound(n: int) -> int:
    """C(2n-1, n), below which the greedy construction may fail."""
    return math.comb(2 * n - 1, n)
