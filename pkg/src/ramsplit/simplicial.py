"""Abstract simplicial complexes with star and barycentric subdivision.

Vertices carry structured labels: an ``Original`` wraps an opaque token,
and a ``Barycenter`` wraps the simplex it subdivided, so labels nest
through subdivision rounds and equality is structural.  A complex is the
full family of its simplices (nonempty finite label sets closed under
nonempty subsets); the vertex set is derived, so a vertex that appears in
no simplex simply does not exist.

Subdivision inputs are desk scale: at most ``MAX_VERTICES`` vertices and
dimension at most ``MAX_DIM``, enforced with explicit errors because
barycentric growth is factorial in flag length.  Outputs may be larger.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Optional, Tuple, Union

from .errors import InputError

__all__ = [
    "Original",
    "Barycenter",
    "Label",
    "Simplex",
    "SimplicialComplex",
    "IsoReport",
    "ColoringReport",
    "star_subdivision",
    "barycentric",
    "order_complex",
    "check_natural_iso",
    "color_by_dimension",
    "label_key",
    "label_to_json",
    "label_from_json",
    "complex_to_json",
    "complex_from_json",
    "random_complex",
    "MAX_VERTICES",
    "MAX_DIM",
]

MAX_VERTICES = 32
MAX_DIM = 4


@dataclass(frozen=True)
class Original:
    """A vertex named by an opaque token."""

    name: str


@dataclass(frozen=True)
class Barycenter:
    """The new vertex created by subdividing ``simplex``."""

    simplex: FrozenSet


Label = Union[Original, Barycenter]
Simplex = FrozenSet


def label_key(label: Label):
    """Canonical sort key; Original tokens order before Barycenter labels."""
    if isinstance(label, Original):
        return (0, label.name)
    return (1, tuple(sorted(label_key(m) for m in label.simplex)))


def simplex_key(simplex: Simplex):
    return (len(simplex), tuple(sorted(label_key(v) for v in simplex)))


def _as_simplex(vertices: Iterable[Label]) -> Simplex:
    s = frozenset(vertices)
    if not s:
        raise InputError("simplices must be nonempty")
    for v in s:
        if not isinstance(v, (Original, Barycenter)):
            raise InputError(f"vertex label {v!r} is not Original or Barycenter")
    return s


class SimplicialComplex:
    """A finite abstract simplicial complex, stored as the full family."""

    __slots__ = ("_simplices",)

    def __init__(self, simplices: Iterable[Simplex]):
        family = frozenset(_as_simplex(s) for s in simplices)
        for s in family:
            if len(s) > 1:
                for v in s:
                    if s - {v} not in family:
                        raise InputError(
                            "simplex family is not closed under nonempty subsets"
                        )
        self._simplices = family

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[Label]]) -> "SimplicialComplex":
        family = set()
        for f in facets:
            f = _as_simplex(f)
            members = sorted(f, key=label_key)
            for k in range(1, len(members) + 1):
                for sub in combinations(members, k):
                    family.add(frozenset(sub))
        return cls(family)

    @property
    def simplices(self) -> FrozenSet:
        return self._simplices

    @property
    def vertices(self) -> FrozenSet:
        out = set()
        for s in self._simplices:
            out.update(s)
        return frozenset(out)

    @property
    def dim(self) -> int:
        """Max simplex dimension; -1 for the empty complex."""
        if not self._simplices:
            return -1
        return max(len(s) for s in self._simplices) - 1

    def simplices_of_dim(self, i: int) -> Tuple:
        return tuple(
            sorted((s for s in self._simplices if len(s) == i + 1), key=simplex_key)
        )

    def facets(self) -> Tuple:
        fac = [
            s
            for s in self._simplices
            if not any(s < t for t in self._simplices)
        ]
        return tuple(sorted(fac, key=simplex_key))

    def __contains__(self, simplex) -> bool:
        return frozenset(simplex) in self._simplices

    def __len__(self) -> int:
        return len(self._simplices)

    def __iter__(self):
        return iter(self._simplices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._simplices == other._simplices

    def __hash__(self) -> int:
        return hash(self._simplices)

    def __repr__(self) -> str:
        return f"SimplicialComplex({len(self._simplices)} simplices, dim {self.dim})"


def check_desk_scale(comp: SimplicialComplex) -> None:
    """Reject inputs beyond desk scale before any subdivision work."""
    nv = len(comp.vertices)
    if nv > MAX_VERTICES:
        raise InputError(f"complex has {nv} vertices; desk-scale limit is {MAX_VERTICES}")
    if comp.dim > MAX_DIM:
        raise InputError(f"complex has dimension {comp.dim}; desk-scale limit is {MAX_DIM}")


def _star(family: FrozenSet, center: Simplex) -> FrozenSet:
    e = Barycenter(center)
    members = sorted(center, key=label_key)
    out = {t for t in family if not center <= t}
    for t in family:
        if center <= t:
            for k in range(1, len(members) + 1):
                for removed in combinations(members, k):
                    out.add((t - frozenset(removed)) | {e})
    return frozenset(out)


def star_subdivision(
    comp: SimplicialComplex, center: Optional[Iterable[Label]]
) -> SimplicialComplex:
    """Star subdivision at ``center``: cone the simplices containing it
    over the new barycenter vertex.  An empty (or None) center is the
    identity.  ``center`` must be a simplex of the complex.
    """
    if center is None:
        return comp
    center = frozenset(center)
    if not center:
        return comp
    check_desk_scale(comp)
    if center not in comp:
        raise InputError("subdivision center is not a simplex of the complex")
    return SimplicialComplex(_star(comp.simplices, center))


def barycentric(comp: SimplicialComplex) -> SimplicialComplex:
    """Iterated star subdivision over the original i-simplices, i = dim .. 1.

    Each layer is an antichain, so the iteration order within a layer
    does not matter; a fixed sort keeps the run deterministic anyway.
    """
    if not comp.simplices:
        raise InputError("barycentric subdivision requires a nonempty complex")
    check_desk_scale(comp)
    family = comp.simplices
    for i in range(comp.dim, 0, -1):
        for center in comp.simplices_of_dim(i):
            family = _star(family, center)
    return SimplicialComplex(family)


def order_complex(comp: SimplicialComplex) -> SimplicialComplex:
    """The complex of flags: one vertex per simplex, simplices are the
    chains totally ordered by strict inclusion."""
    if not comp.simplices:
        raise InputError("order complex requires a nonempty complex")
    check_desk_scale(comp)
    simps = sorted(comp.simplices, key=simplex_key)
    supersets = {
        s: [t for t in simps if len(t) > len(s) and s < t] for s in simps
    }
    family = set()

    def extend(chain):
        family.add(frozenset(Barycenter(c) for c in chain))
        for t in supersets[chain[-1]]:
            extend(chain + [t])

    for s in simps:
        extend([s])
    return SimplicialComplex(family)


@dataclass(frozen=True)
class IsoReport:
    """Result of comparing the barycentric subdivision with the order complex."""

    isomorphic: bool
    vertex_map: Dict[Label, Label] = field(default_factory=dict)
    counterexample: Optional[Simplex] = None


def check_natural_iso(comp: SimplicialComplex) -> IsoReport:
    """Verify the canonical vertex map Sd -> Fl is a simplicial isomorphism.

    Surviving original vertices v map to the flag vertex of {v}; each
    barycenter maps to the flag vertex of its simplex.  Returns the
    bijection on success, or the first offending simplex.
    """
    if not comp.simplices:
        raise InputError("check_natural_iso requires a nonempty complex")
    check_desk_scale(comp)
    sd = barycentric(comp)
    fl = order_complex(comp)

    def image(v: Label) -> Label:
        if isinstance(v, Original):
            return Barycenter(frozenset([v]))
        return v

    vmap = {v: image(v) for v in sorted(sd.vertices, key=label_key)}
    if len(set(vmap.values())) != len(vmap) or set(vmap.values()) != set(fl.vertices):
        return IsoReport(isomorphic=False, vertex_map=vmap)
    mapped = {frozenset(vmap[v] for v in s) for s in sd.simplices}
    if mapped != fl.simplices:
        bad = sorted(
            mapped.symmetric_difference(fl.simplices), key=simplex_key
        )[0]
        return IsoReport(isomorphic=False, vertex_map=vmap, counterexample=bad)
    return IsoReport(isomorphic=True, vertex_map=vmap)


@dataclass(frozen=True)
class ColoringReport:
    """Dimension coloring of an order complex's vertices."""

    colors: Dict[Label, int]
    valid: bool


def color_by_dimension(comp: SimplicialComplex) -> ColoringReport:
    """Color each flag vertex by the dimension of its underlying simplex.

    Valid iff no simplex repeats a color, which holds on every order
    complex because flags have strictly increasing cardinality.
    """
    colors: Dict[Label, int] = {}
    for v in sorted(comp.vertices, key=label_key):
        if not isinstance(v, Barycenter):
            raise InputError(
                "color_by_dimension needs flag vertices labeled by simplices"
            )
        colors[v] = len(v.simplex) - 1
    valid = all(
        len({colors[v] for v in s}) == len(s) for s in comp.simplices
    )
    return ColoringReport(colors=colors, valid=valid)


def label_to_json(label: Label):
    """Original -> token string; Barycenter -> sorted nested array."""
    if isinstance(label, Original):
        return label.name
    return [label_to_json(m) for m in sorted(label.simplex, key=label_key)]


def label_from_json(data) -> Label:
    if isinstance(data, str):
        return Original(data)
    if isinstance(data, list) and data:
        return Barycenter(frozenset(label_from_json(m) for m in data))
    raise InputError(f"cannot parse vertex label from {data!r}")


def complex_to_json(comp: SimplicialComplex) -> dict:
    facets = [
        [label_to_json(v) for v in sorted(f, key=label_key)] for f in comp.facets()
    ]
    return {"facets": facets}


def complex_from_json(data) -> SimplicialComplex:
    if not isinstance(data, dict) or "facets" not in data:
        raise InputError('complex JSON must be an object with a "facets" array')
    facets = data["facets"]
    if not isinstance(facets, list):
        raise InputError('"facets" must be an array of vertex arrays')
    return SimplicialComplex.from_facets(
        [frozenset(label_from_json(v) for v in f) for f in facets]
    )


def random_complex(
    rng: random.Random, max_vertices: int = 8, max_dim: int = 3
) -> SimplicialComplex:
    """Small random complex for the randomized property drivers."""
    nv = rng.randint(1, max_vertices)
    verts = [Original(f"v{i}") for i in range(nv)]
    nfacets = rng.randint(1, 5)
    facets = []
    for _ in range(nfacets):
        k = rng.randint(1, min(max_dim + 1, nv))
        facets.append(frozenset(rng.sample(verts, k)))
    return SimplicialComplex.from_facets(facets)
