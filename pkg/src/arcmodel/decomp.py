"""Decompositions of a valuation vector into indecomposable semigroup elements.

The irreducible components of the jet-model special fiber are in bijection
with the ways of writing n as a sum of indecomposable lattice points of the
cone, and the maximal number of parts is the component dimension.  This
module enumerates those decompositions exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import intlinalg
from .errors import NotInCone, ZeroVector
from .lattice import Cone, dual_cone, is_primitive, minimal_face_smooth, pair


def _box_frame(cone: Cone):
    """d independent dual rays, the coordinate frame for bounding boxes."""
    duals = dual_cone(cone).rays
    for subset in itertools.combinations(duals, cone.rank):
        mat = intlinalg.as_int_matrix([list(u) for u in subset])
        if intlinalg.rank(mat) == cone.rank:
            return subset, mat
    raise AssertionError("full-dimensional cone has a full-rank dual frame")


def points_below(cone: Cone, n) -> list:
    """All lattice points y with y and n - y both in the cone, sorted."""
    frame, mat = _box_frame(cone)
    bounds = [pair(u, n) for u in frame]
    if any(bv < 0 for bv in bounds):
        raise NotInCone("%s is outside %s" % (n, cone))
    pts = []
    for coords in itertools.product(*(range(bv + 1) for bv in bounds)):
        sol = intlinalg.solve_exact(mat, coords)
        if sol is None or any(f.denominator != 1 for f in sol):
            continue
        y = tuple(int(f) for f in sol)
        rest = tuple(a - b for a, b in zip(n, y))
        if cone.contains(y) and cone.contains(rest):
            pts.append(y)
    return sorted(pts)


def is_indecomposable(cone: Cone, x) -> bool:
    """No way to write x as a sum of two nonzero cone lattice points."""
    if all(v == 0 for v in x):
        return False
    zero = (0,) * cone.rank
    return all(y in (zero, x) for y in points_below(cone, x))


def indecomposables_below(cone: Cone, n) -> list:
    """Indecomposable x in the cone with n - x still in the cone, sorted.

    Raises:
        NotInCone: when n itself is outside the cone.
    """
    if not cone.contains(n):
        raise NotInCone("%s is outside %s" % (n, cone))
    return [y for y in points_below(cone, n) if is_indecomposable(cone, y)]


@dataclass(frozen=True)
class Decomposition:
    parts: tuple  # non-decreasing

    @property
    def length(self) -> int:
        return len(self.parts)


def enumerate_decompositions(cone: Cone, n) -> list:
    """All multisets of indecomposables summing to n.

    Parts are listed in non-decreasing order inside each decomposition and
    the list is sorted by (length, parts).

    Raises:
        NotInCone: when n is outside the cone.
        ZeroVector: for n = 0 (the zero vector is not a valuation).
    """
    if all(v == 0 for v in n):
        raise ZeroVector("decomposition target must be nonzero")
    indecs = indecomposables_below(cone, n)
    zero = (0,) * cone.rank
    found = []

    def descend(remaining, start, acc):
        if remaining == zero:
            found.append(Decomposition(tuple(acc)))
            return
        for idx in range(start, len(indecs)):
            x = indecs[idx]
            rest = tuple(a - b for a, b in zip(remaining, x))
            if cone.contains(rest):
                acc.append(x)
                descend(rest, idx, acc)
                acc.pop()

    descend(tuple(n), 0, [])
    return sorted(found, key=lambda dec: (dec.length, dec.parts))


@dataclass(frozen=True)
class ComponentStats:
    decompositions: tuple
    component_count: int
    dimension: int
    primitive: bool
    indecomposable: bool
    strongly_essential: object  # True / False / None for "not applicable"


def component_stats(cone: Cone, n) -> ComponentStats:
    """Component count and dimension, plus the strong-essentiality verdict.

    strongly_essential is only decided when the classification's hypotheses
    hold: n primitive and centered in the singular locus (minimal face not
    smooth).  Outside that regime it is None, rendered "not_applicable".
    """
    decs = enumerate_decompositions(cone, n)
    primitive = is_primitive(n)
    indecomposable = any(d.length == 1 for d in decs)
    if minimal_face_smooth(cone, n) or not primitive:
        essential = None
    else:
        essential = indecomposable
    return ComponentStats(
        decompositions=tuple(decs),
        component_count=len(decs),
        dimension=max(d.length for d in decs),
        primitive=primitive,
        indecomposable=indecomposable,
        strongly_essential=essential,
    )
