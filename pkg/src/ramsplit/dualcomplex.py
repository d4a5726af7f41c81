"""Dual complexes of normal-crossings divisors, modeled combinatorially.

A dual complex is a simplicial complex whose vertices stand for divisor
components: a vertex set J is a simplex exactly when the model asserts
the corresponding intersection stratum is nonempty.  Blowing up the
stratum of a simplex is, at this combinatorial level, the star
subdivision at that simplex, with the new barycenter playing the role of
the exceptional divisor; the blowup log records that correspondence.

Running the blowups stratum by stratum, deepest first, turns the complex
into its barycentric subdivision, whose dimension coloring groups the
(transformed) divisors into at most ``ambient_dim`` pairwise-disjoint
classes: a short presentation of the divisor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from .errors import InputError
from .simplicial import (
    Barycenter,
    Label,
    Original,
    Simplex,
    SimplicialComplex,
    check_desk_scale,
    color_by_dimension,
    complex_from_json,
    complex_to_json,
    label_from_json,
    label_key,
    label_to_json,
    order_complex,
    star_subdivision,
)

__all__ = [
    "BlowupStep",
    "DualComplex",
    "Presentation",
    "blowup",
    "stratified_blowup_sequence",
    "reduce_presentation",
    "presentation_is_valid",
    "dual_to_json",
    "dual_from_json",
    "presentation_to_json",
]


@dataclass(frozen=True)
class BlowupStep:
    """One blowup: the center simplex and the exceptional vertex it created."""

    center: Simplex
    exceptional: Label


@dataclass(frozen=True)
class DualComplex:
    """A simplicial complex of divisor incidences inside an ambient dimension."""

    complex: SimplicialComplex
    ambient_dim: int
    exceptional_log: Tuple[BlowupStep, ...] = ()

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise InputError("ambient dimension must be >= 1")
        if self.complex.dim > self.ambient_dim - 1:
            raise InputError(
                f"dual complex of dimension {self.complex.dim} does not fit in "
                f"ambient dimension {self.ambient_dim} (needs dim <= d-1)"
            )

    @classmethod
    def from_facets(cls, facets, ambient_dim: int) -> "DualComplex":
        return cls(SimplicialComplex.from_facets(facets), ambient_dim)

    @property
    def divisors(self) -> Tuple[str, ...]:
        """Tokens of the surviving original divisor vertices, sorted."""
        return tuple(
            sorted(v.name for v in self.complex.vertices if isinstance(v, Original))
        )


@dataclass(frozen=True)
class Presentation:
    """A partition of the divisor vertices into pairwise-disjoint classes."""

    groups: Tuple[Tuple[Label, ...], ...]

    @property
    def length(self) -> int:
        return len(self.groups)


def blowup(dual: DualComplex, center: Optional[Iterable[Label]]) -> DualComplex:
    """Blow up the stratum of ``center``: star-subdivide and log the
    barycenter as the exceptional divisor.  Empty center is the identity."""
    if center is None:
        return dual
    center = frozenset(center)
    if not center:
        return dual
    if center not in dual.complex:
        raise InputError("blowup center is not a simplex of the dual complex")
    subdivided = star_subdivision(dual.complex, center)
    step = BlowupStep(center=center, exceptional=Barycenter(center))
    return DualComplex(
        complex=subdivided,
        ambient_dim=dual.ambient_dim,
        exceptional_log=dual.exceptional_log + (step,),
    )


def stratified_blowup_sequence(dual: DualComplex):
    """Blow up all strata of the starting complex, deepest first.

    Processes the original simplices by decreasing cardinality down to 2
    (vertices are never blown up), so the result's complex equals the
    barycentric subdivision of the input complex.  Returns the new dual
    complex and the ordered trace of steps performed.
    """
    check_desk_scale(dual.complex)
    original = dual.complex
    current = dual
    trace = []
    for i in range(original.dim, 0, -1):
        for center in original.simplices_of_dim(i):
            current = blowup(current, center)
            trace.append(current.exceptional_log[-1])
    return current, tuple(trace)


def presentation_is_valid(pres: Presentation, comp: SimplicialComplex) -> bool:
    """No two members of one class may span an edge of the complex."""
    for group in pres.groups:
        for i, u in enumerate(group):
            for v in group[i + 1:]:
                if frozenset([u, v]) in comp:
                    return False
    return True


def reduce_presentation(
    dual: DualComplex,
    ambient_dim: Optional[int] = None,
    *,
    pad_to_exact: bool = False,
) -> Presentation:
    """Presentation of length <= ambient_dim via blowups and coloring.

    Runs the stratified blowup sequence, identifies the resulting complex
    with the order complex of the original, colors vertices by dimension,
    and groups same-color vertices into classes.  Flags never repeat a
    dimension, so each class is an independent set in the 1-skeleton.

    ``pad_to_exact`` appends isolated dummy divisors (fresh vertices,
    modeling blowups at smooth points) until exactly ambient_dim classes;
    off by default since only the upper bound is substantive.
    """
    d = dual.ambient_dim if ambient_dim is None else ambient_dim
    if d < 1:
        raise InputError("ambient dimension must be >= 1")
    if dual.complex.dim > d - 1:
        raise InputError(
            f"complex dimension {dual.complex.dim} exceeds ambient bound d-1 = {d - 1}"
        )
    result, _ = stratified_blowup_sequence(dual)
    coloring = color_by_dimension(order_complex(dual.complex))
    by_color: dict = {}
    for v in sorted(result.complex.vertices, key=label_key):
        flag_vertex = Barycenter(frozenset([v])) if isinstance(v, Original) else v
        color = coloring.colors[flag_vertex]
        by_color.setdefault(color, []).append(v)
    groups = [tuple(by_color[c]) for c in sorted(by_color)]
    if pad_to_exact:
        pad = 0
        while len(groups) < d:
            groups.append((Original(f"_pad{pad}"),))
            pad += 1
    pres = Presentation(groups=tuple(groups))
    if len(pres.groups) > d:  # pragma: no cover - impossible by construction
        raise AssertionError("presentation exceeds the ambient bound")
    if not presentation_is_valid(pres, result.complex):  # pragma: no cover
        raise AssertionError("presentation classes are not independent")
    return pres


def dual_to_json(dual: DualComplex) -> dict:
    data = complex_to_json(dual.complex)
    data["divisors"] = list(dual.divisors)
    data["ambient_dim"] = dual.ambient_dim
    if dual.exceptional_log:
        data["exceptional_log"] = [
            {
                "center": [label_to_json(v) for v in sorted(s.center, key=label_key)],
                "vertex": label_to_json(s.exceptional),
            }
            for s in dual.exceptional_log
        ]
    return data


def dual_from_json(data) -> DualComplex:
    if not isinstance(data, dict) or "ambient_dim" not in data:
        raise InputError('dual complex JSON must carry "facets" and "ambient_dim"')
    comp = complex_from_json(data)
    if not isinstance(data["ambient_dim"], int):
        raise InputError('"ambient_dim" must be an integer')
    log = []
    for entry in data.get("exceptional_log", []):
        center = frozenset(label_from_json(v) for v in entry["center"])
        log.append(BlowupStep(center=center, exceptional=label_from_json(entry["vertex"])))
    return DualComplex(
        complex=comp, ambient_dim=data["ambient_dim"], exceptional_log=tuple(log)
    )


def presentation_to_json(pres: Presentation) -> dict:
    return {
        "groups": [
            [label_to_json(v) for v in group] for group in pres.groups
        ]
    }
