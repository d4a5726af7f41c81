"""Symbolic ramification classes, tame residues, and splitting certificates.

A class ramified along coordinate divisors x_1..x_d is held in the normal
form  alpha_0 + sum (u, x_i) + sum m_{i,j} (x_i, x_j)  with coefficients
mod ell: unit terms keyed by (unit token, coordinate), pair terms keyed by
ordered coordinate pairs i < j, and an opaque unramified remainder.
Units are formal tokens; no field arithmetic happens here.

Residues use the tame-symbol convention
``res(f, g) = (-1)^{v(f)v(g)} f^{v(g)} g^{-v(f)}``  (a convention the
normal form makes mostly invisible, since each term has at most one slot
of positive valuation).  Kummer pullback models adjoining ell-th roots of
chosen coordinates, which multiplies every residue along them by ell and
so kills the ramification there.

A splitting certificate witnesses, for a Pirutka matrix T and a stratum,
the row combination whose product of functions is a local equation for
r * D_{j0} with r = 1 mod ell: coefficients a_i supported on rows I
disjoint from the stratum's auxiliary divisors, with
sum a_i m_{i,j} = delta_{j,j0} mod ell over the incident columns J.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .errors import InputError, NotPirutkaError
from .pirutka import PirutkaCandidate
from .zmodl import IntMatrix, ModulusLike, PrimeModulus, as_modulus, solve_mod

__all__ = [
    "Monomial",
    "SymbolClass",
    "ResidueVector",
    "StratumPoint",
    "SplittingCertificate",
    "VerifyResult",
    "SplitFailure",
    "SplitReport",
    "normal_form",
    "residue_along",
    "kummer_pullback",
    "find_certificate",
    "verify_certificate",
    "universal_split_check",
    "random_symbol_class",
    "symbol_class_to_json",
    "symbol_class_from_json",
    "certificate_to_json",
    "certificate_from_json",
]

TRIVIAL_UNIT = "1"
MINUS_ONE = "-1"


@dataclass(frozen=True)
class Monomial:
    """A unit token times a product of coordinate powers x_1^e1 .. x_d^ed."""

    exponents: Tuple[int, ...]
    unit: str = TRIVIAL_UNIT

    @classmethod
    def coordinate(cls, i: int, d: int) -> "Monomial":
        if not 1 <= i <= d:
            raise InputError(f"coordinate index {i} out of range 1..{d}")
        return cls(tuple(1 if k == i - 1 else 0 for k in range(d)))

    @classmethod
    def of_unit(cls, token: str, d: int) -> "Monomial":
        return cls((0,) * d, unit=token)


class SymbolClass:
    """Formal Z/ell-combination of symbols in normal form."""

    __slots__ = ("ell", "d", "unit_terms", "pair_terms", "unramified")

    def __init__(
        self,
        ell: ModulusLike,
        d: int,
        unit_terms: Optional[Dict[Tuple[str, int], int]] = None,
        pair_terms: Optional[Dict[Tuple[int, int], int]] = None,
        unramified: str = "a0",
    ):
        self.ell = as_modulus(ell)
        if d < 1:
            raise InputError("symbol classes need at least one coordinate")
        self.d = d
        m = int(self.ell)
        units: Dict[Tuple[str, int], int] = {}
        for (token, i), c in (unit_terms or {}).items():
            if not 1 <= i <= d:
                raise InputError(f"coordinate index {i} out of range 1..{d}")
            c %= m
            if c:
                units[(str(token), i)] = c
        pairs: Dict[Tuple[int, int], int] = {}
        for (i, j), c in (pair_terms or {}).items():
            if not (1 <= i <= d and 1 <= j <= d):
                raise InputError(f"pair ({i},{j}) out of range 1..{d}")
            if i >= j:
                raise InputError(f"pair terms must have i < j, got ({i},{j})")
            c %= m
            if c:
                pairs[(i, j)] = c
        self.unit_terms = units
        self.pair_terms = pairs
        self.unramified = unramified

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolClass):
            return NotImplemented
        return (
            int(self.ell) == int(other.ell)
            and self.d == other.d
            and self.unit_terms == other.unit_terms
            and self.pair_terms == other.pair_terms
            and self.unramified == other.unramified
        )

    def __add__(self, other: "SymbolClass") -> "SymbolClass":
        if int(self.ell) != int(other.ell) or self.d != other.d:
            raise InputError("cannot add symbol classes over different (ell, d)")
        units = dict(self.unit_terms)
        for k, c in other.unit_terms.items():
            units[k] = units.get(k, 0) + c
        pairs = dict(self.pair_terms)
        for k, c in other.pair_terms.items():
            pairs[k] = pairs.get(k, 0) + c
        tail = (
            self.unramified
            if self.unramified == other.unramified
            else f"{self.unramified}+{other.unramified}"
        )
        return SymbolClass(self.ell, self.d, units, pairs, tail)

    def is_zero(self) -> bool:
        return not self.unit_terms and not self.pair_terms

    def as_symbols(self) -> List[Tuple[Monomial, Monomial, int]]:
        """Re-express the normal form as raw symbols (for round-trips)."""
        out = []
        for (token, i) in sorted(self.unit_terms):
            out.append(
                (
                    Monomial.of_unit(token, self.d),
                    Monomial.coordinate(i, self.d),
                    self.unit_terms[(token, i)],
                )
            )
        for (i, j) in sorted(self.pair_terms):
            out.append(
                (
                    Monomial.coordinate(i, self.d),
                    Monomial.coordinate(j, self.d),
                    self.pair_terms[(i, j)],
                )
            )
        return out

    def __repr__(self) -> str:
        return (
            f"SymbolClass(ell={int(self.ell)}, d={self.d}, "
            f"units={self.unit_terms}, pairs={self.pair_terms})"
        )


def normal_form(
    symbols: Iterable[Tuple[Monomial, Monomial, int]],
    d: int,
    ell: ModulusLike,
    unramified: str = "a0",
) -> SymbolClass:
    """Expand raw symbols bimultiplicatively into the normal form.

    (u * prod x_i^{e_i}, v * prod x_j^{f_j}) splits into a unit-unit part
    (absorbed into the unramified remainder), unit-coordinate parts, and
    coordinate pairs.  Coordinate-unit parts flip sign to put the unit
    first; diagonal pairs (x_i, x_i) are rewritten as (-1, x_i); pairs
    with i > j flip to i < j with a sign change.
    """
    mod = as_modulus(ell)
    units: Dict[Tuple[str, int], int] = {}
    pairs: Dict[Tuple[int, int], int] = {}

    def add_unit(token: str, i: int, c: int):
        if token == TRIVIAL_UNIT or c == 0:
            return
        units[(token, i)] = units.get((token, i), 0) + c

    def add_pair(i: int, j: int, c: int):
        if c == 0:
            return
        if i == j:
            add_unit(MINUS_ONE, i, c)
        elif i < j:
            pairs[(i, j)] = pairs.get((i, j), 0) + c
        else:
            pairs[(j, i)] = pairs.get((j, i), 0) - c

    for f, g, coeff in symbols:
        if len(f.exponents) != d or len(g.exponents) != d:
            raise InputError("monomial exponent vectors must have length d")
        for j, ge in enumerate(g.exponents, start=1):
            add_unit(f.unit, j, coeff * ge)
        for i, fe in enumerate(f.exponents, start=1):
            add_unit(g.unit, i, -coeff * fe)
        for i, fe in enumerate(f.exponents, start=1):
            if fe == 0:
                continue
            for j, ge in enumerate(g.exponents, start=1):
                if ge:
                    add_pair(i, j, coeff * fe * ge)
    return SymbolClass(mod, d, units, pairs, unramified)


@dataclass(frozen=True)
class ResidueVector:
    """A residue class mod ell-th powers: unit-token and coordinate exponents."""

    units: Dict[str, int] = field(default_factory=dict)
    coords: Dict[int, int] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.units and not self.coords

    def __add__(self, other: "ResidueVector") -> "ResidueVector":
        units = dict(self.units)
        for k, c in other.units.items():
            units[k] = units.get(k, 0) + c
        coords = dict(self.coords)
        for k, c in other.coords.items():
            coords[k] = coords.get(k, 0) + c
        return ResidueVector(units=units, coords=coords)

    def reduced(self, ell: int) -> "ResidueVector":
        return ResidueVector(
            units={k: c % ell for k, c in self.units.items() if c % ell},
            coords={k: c % ell for k, c in self.coords.items() if c % ell},
        )


def residue_along(alpha: SymbolClass, k: int) -> ResidueVector:
    """Tame residue of the class at the valuation of coordinate k.

    Only terms with x_k in a slot contribute: (u, x_k) leaves the class of
    u, (x_k, x_j) leaves x_j^(-1), and (x_i, x_k) leaves x_i.
    """
    if not 1 <= k <= alpha.d:
        raise InputError(f"coordinate index {k} out of range 1..{alpha.d}")
    m = int(alpha.ell)
    units: Dict[str, int] = {}
    coords: Dict[int, int] = {}
    for (token, i), c in alpha.unit_terms.items():
        if i == k:
            units[token] = units.get(token, 0) + c
    for (i, j), c in alpha.pair_terms.items():
        if i == k:
            coords[j] = coords.get(j, 0) - c
        elif j == k:
            coords[i] = coords.get(i, 0) + c
    return ResidueVector(units=units, coords=coords).reduced(m)


def kummer_pullback(
    alpha: SymbolClass, adjoined: Iterable[int], ell: Optional[ModulusLike] = None
) -> SymbolClass:
    """Pull back along the cover adjoining ell-th roots of the chosen
    coordinates.

    Substituting x_i = z_i^ell multiplies each coefficient linearly per
    occupied slot, so any term touching an adjoined coordinate picks up a
    factor of ell and dies mod ell; the rest pass through unchanged.
    """
    s = frozenset(adjoined)
    if not s:
        raise InputError("kummer_pullback requires a nonempty coordinate set")
    for i in s:
        if not 1 <= i <= alpha.d:
            raise InputError(f"coordinate index {i} out of range 1..{alpha.d}")
    if ell is not None and int(as_modulus(ell)) != int(alpha.ell):
        raise InputError("pullback prime does not match the class")
    units = {
        (token, i): c for (token, i), c in alpha.unit_terms.items() if i not in s
    }
    pairs = {
        (i, j): c
        for (i, j), c in alpha.pair_terms.items()
        if i not in s and j not in s
    }
    return SymbolClass(alpha.ell, alpha.d, units, pairs, alpha.unramified)


@dataclass(frozen=True)
class StratumPoint:
    """Incidence data of a point: maximal incident divisor columns J and
    incident auxiliary divisor rows I'."""

    divisors: FrozenSet[int]
    auxiliary: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if not self.divisors:
            raise InputError("a stratum point must be incident to some divisor")
        for i in self.divisors | self.auxiliary:
            if not isinstance(i, int) or i < 1:
                raise InputError("stratum indices must be positive integers")


def _validate_point(point: StratumPoint, n: int, d: int) -> None:
    if max(point.divisors) > d:
        raise InputError(f"divisor indices {sorted(point.divisors)} exceed d={d}")
    if point.auxiliary and max(point.auxiliary) > n:
        raise InputError(f"auxiliary indices {sorted(point.auxiliary)} exceed n={n}")
    if len(point.auxiliary) + len(point.divisors) > d:
        raise InputError(
            "proper intersection violated: |I'| + |J| = "
            f"{len(point.auxiliary)} + {len(point.divisors)} > d = {d}"
        )


@dataclass(frozen=True)
class SplittingCertificate:
    """Witness data (j0, I, a, r, b) for one stratum and pivot column."""

    j0: int
    rows: Tuple[int, ...]
    row_coeffs: Dict[int, int]
    r: int
    col_coeffs: Dict[int, int]


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: Optional[str] = None


def find_certificate(
    candidate: PirutkaCandidate,
    ell: ModulusLike,
    point: StratumPoint,
    j0: int,
) -> SplittingCertificate:
    """Solve for the certificate at a stratum point and pivot column j0.

    Takes the lexicographically least row set I avoiding the auxiliary
    rows, of size n - d + |J| (available because |I'| <= d - |J|), and the
    lexicographically least coefficient vector solving
    sum_{i in I} a_i m_{i,j} = delta_{j,j0} mod ell over j in J.  The
    full-rank property of T_{I,J} guarantees solvability; an insoluble
    system raises :class:`NotPirutkaError` as a defensive check.
    """
    mod = as_modulus(ell)
    n, d = candidate.n, candidate.d
    _validate_point(point, n, d)
    if j0 not in point.divisors:
        raise InputError(f"pivot column {j0} is not in the stratum's divisor set")
    need = n - d + len(point.divisors)
    available = [i for i in range(1, n + 1) if i not in point.auxiliary]
    if len(available) < need:  # pragma: no cover - excluded by the invariant
        raise InputError("not enough rows outside the auxiliary set")
    rows = tuple(available[:need])
    cols = tuple(sorted(point.divisors))
    entries = candidate.matrix.entries
    system = IntMatrix.from_rows(
        [[entries[i - 1][j - 1] for i in rows] for j in cols]
    )
    rhs = [1 if j == j0 else 0 for j in cols]
    solution = solve_mod(system, rhs, mod)
    if solution is None:
        raise NotPirutkaError(rows, cols)
    coeffs = dict(zip(rows, solution))
    r = sum(coeffs[i] * entries[i - 1][j0 - 1] for i in rows)
    col_coeffs = {
        j: sum(coeffs[i] * entries[i - 1][j - 1] for i in rows)
        for j in range(1, d + 1)
        if j != j0
    }
    return SplittingCertificate(
        j0=j0, rows=rows, row_coeffs=coeffs, r=r, col_coeffs=col_coeffs
    )


def verify_certificate(
    cert: SplittingCertificate,
    candidate: PirutkaCandidate,
    ell: ModulusLike,
    point: StratumPoint,
) -> VerifyResult:
    """Re-check every certificate invariant; failures carry a reason code."""
    mod = int(as_modulus(ell))
    n, d = candidate.n, candidate.d
    try:
        _validate_point(point, n, d)
    except InputError:
        return VerifyResult(False, "stratum")
    rows = cert.rows
    if set(rows) & point.auxiliary:
        return VerifyResult(False, "support")
    if len(rows) != n - d + len(point.divisors) or len(set(rows)) != len(rows):
        return VerifyResult(False, "size")
    if any(not 1 <= i <= n for i in rows):
        return VerifyResult(False, "size")
    if cert.j0 not in point.divisors:
        return VerifyResult(False, "j0")
    if set(cert.row_coeffs) != set(rows):
        return VerifyResult(False, "coeff-domain")
    if any(not 0 <= a < mod for a in cert.row_coeffs.values()):
        return VerifyResult(False, "coeff-range")
    if set(cert.col_coeffs) != set(range(1, d + 1)) - {cert.j0}:
        return VerifyResult(False, "b-domain")
    entries = candidate.matrix.entries
    sums = {
        j: sum(cert.row_coeffs[i] * entries[i - 1][j - 1] for i in rows)
        for j in range(1, d + 1)
    }
    if cert.r % mod != 1:
        return VerifyResult(False, "r-congruence")
    if cert.r != sums[cert.j0]:
        return VerifyResult(False, "r-sum")
    for j in point.divisors - {cert.j0}:
        if sums[j] % mod != 0:
            return VerifyResult(False, "column-congruence")
    for j, b in cert.col_coeffs.items():
        if b != sums[j]:
            return VerifyResult(False, "b-mismatch")
    return VerifyResult(True)


@dataclass(frozen=True)
class SplitFailure:
    divisors: Tuple[int, ...]
    j0: int
    auxiliary: Tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class SplitReport:
    ok: bool
    checked: int
    failures: Tuple[SplitFailure, ...]

    @property
    def first_failure(self) -> Optional[SplitFailure]:
        return self.failures[0] if self.failures else None


def universal_split_check(
    candidate: PirutkaCandidate, ell: ModulusLike, d: Optional[int] = None
) -> SplitReport:
    """Attempt a certificate for every stratum shape the matrix may meet.

    Runs over every nonempty column set J, every pivot j0 in J, and every
    auxiliary row set I' of the worst-case size d - |J|, in lexicographic
    order; collects the failures.  A Pirutka matrix passes everything,
    and a failing matrix yields a concrete witness triple.
    """
    mod = as_modulus(ell)
    n, dd = candidate.n, candidate.d
    if d is not None and d != dd:
        raise InputError(f"declared d={d} does not match the matrix width {dd}")
    failures: List[SplitFailure] = []
    checked = 0
    for jsize in range(1, dd + 1):
        for cols in combinations(range(1, dd + 1), jsize):
            for j0 in cols:
                for aux in combinations(range(1, n + 1), dd - jsize):
                    point = StratumPoint(
                        divisors=frozenset(cols), auxiliary=frozenset(aux)
                    )
                    checked += 1
                    try:
                        cert = find_certificate(candidate, mod, point, j0)
                    except NotPirutkaError as exc:
                        failures.append(
                            SplitFailure(
                                divisors=cols, j0=j0, auxiliary=aux, detail=str(exc)
                            )
                        )
                        continue
                    outcome = verify_certificate(cert, candidate, mod, point)
                    if not outcome.ok:  # pragma: no cover - soundness backstop
                        failures.append(
                            SplitFailure(
                                divisors=cols,
                                j0=j0,
                                auxiliary=aux,
                                detail=f"certificate failed verification: {outcome.reason}",
                            )
                        )
    return SplitReport(ok=not failures, checked=checked, failures=tuple(failures))


def random_symbol_class(
    rng: random.Random, d: int, ell: ModulusLike, units: Tuple[str, ...] = ("u1", "u2", "-1")
) -> SymbolClass:
    """Seeded random class for the residue/pullback property drivers."""
    m = int(as_modulus(ell))
    unit_terms = {}
    for token in units:
        for i in range(1, d + 1):
            if rng.random() < 0.4:
                unit_terms[(token, i)] = rng.randrange(m)
    pair_terms = {}
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            if rng.random() < 0.6:
                pair_terms[(i, j)] = rng.randrange(m)
    return SymbolClass(ell, d, unit_terms, pair_terms)


def symbol_class_to_json(alpha: SymbolClass) -> dict:
    return {
        "l": int(alpha.ell),
        "d": alpha.d,
        "units": [
            {"u": token, "i": i, "c": c}
            for (token, i), c in sorted(alpha.unit_terms.items())
        ],
        "pairs": [
            {"i": i, "j": j, "m": c}
            for (i, j), c in sorted(alpha.pair_terms.items())
        ],
    }


def symbol_class_from_json(data) -> SymbolClass:
    try:
        ell = data["l"]
        d = data["d"]
        units = {(u["u"], u["i"]): u["c"] for u in data.get("units", [])}
        pairs = {(p["i"], p["j"]): p["m"] for p in data.get("pairs", [])}
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed symbol class JSON: {exc}") from None
    return SymbolClass(ell, d, units, pairs)


def certificate_to_json(cert: SplittingCertificate) -> dict:
    return {
        "j0": cert.j0,
        "I": list(cert.rows),
        "a": [{"i": i, "c": cert.row_coeffs[i]} for i in sorted(cert.row_coeffs)],
        "r": cert.r,
        "b": [{"j": j, "c": cert.col_coeffs[j]} for j in sorted(cert.col_coeffs)],
    }


def certificate_from_json(data) -> SplittingCertificate:
    try:
        return SplittingCertificate(
            j0=data["j0"],
            rows=tuple(data["I"]),
            row_coeffs={e["i"]: e["c"] for e in data["a"]},
            r=data["r"],
            col_coeffs={e["j"]: e["c"] for e in data["b"]},
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed certificate JSON: {exc}") from None
