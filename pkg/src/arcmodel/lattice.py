"""Strongly convex rational cones, dual cones, Hilbert bases.

Lattice points are plain int tuples. Cones in the valuation lattice N and
exponent vectors in the character lattice M share the same representation;
`pair` is the canonical perfect pairing (dot product).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

from . import intlinalg
from .errors import (
    NoUnimodularSubset,
    NotFullDimensional,
    NotInCone,
    NotPointed,
    RankMismatch,
    ZeroVector,
)

LatticePoint = tuple

# --------------------------------------------------------------------------- #
# vector helpers


def pair(m, n) -> int:
    """Pairing <m, n> between character and valuation lattice points."""
    if len(m) != len(n):
        raise RankMismatch(f"cannot pair vectors of ranks {len(m)} and {len(n)}")
    return sum(int(a) * int(b) for a, b in zip(m, n))


def primitive(v) -> tuple:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise ZeroVector("zero vector has no primitive representative")
    return tuple(int(x) // g for x in v)


def is_primitive(v) -> bool:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def _check_rank(vectors):
    ranks = {len(v) for v in vectors}
    if len(ranks) != 1:
        raise RankMismatch(f"mixed vector lengths {sorted(ranks)}")
    return ranks.pop()


def _is_pointed(rays, d) -> bool:
    # a cone is not pointed exactly when some positive circuit of its rays
    # sums to zero; circuits have at most d+1 elements
    for size in range(2, min(len(rays), d + 1) + 1):
        for subset in itertools.combinations(rays, size):
            mat = intlinalg.as_int_matrix(subset).T
            ker = intlinalg.integer_kernel(mat)
            if len(ker) != 1:
                continue
            t = ker[0]
            if all(x != 0 for x in t) and (all(x > 0 for x in t) or all(x < 0 for x in t)):
                return False
    return True


def _cone_member(v, gens, d) -> bool:
    """Is v a nonnegative rational combination of gens? (Caratheodory search)"""
    if all(x == 0 for x in v):
        return True
    for size in range(1, d + 1):
        for subset in itertools.combinations(gens, size):
            mat = intlinalg.as_int_matrix(subset).T
            if intlinalg.rank(mat) != size:
                continue
            sol = intlinalg.solve_exact(mat, v)
            if sol is not None and all(c >= 0 for c in sol):
                return True
    return False


def _dual_ray_candidates(rays, d):
    """Primitive generators of the dual cone of a full-dimensional cone.

    Each extreme ray of the dual vanishes on a rank d-1 subset of the rays,
    so enumerating those subsets finds them all.
    """
    if d == 1:
        return [(1,)] if all(r[0] > 0 for r in rays) else [(-1,)]
    found = set()
    for subset in itertools.combinations(rays, d - 1):
        mat = intlinalg.as_int_matrix(subset)
        ker = intlinalg.integer_kernel(mat)
        if len(ker) != 1:
            continue
        m = primitive(ker[0])
        for cand in (m, tuple(-x for x in m)):
            if all(pair(cand, r) >= 0 for r in rays):
                found.add(cand)
    return sorted(found)


@dataclass(frozen=True)
class Cone:
    """A strongly convex rational polyhedral cone, given by primitive rays.

    Rays are lexicographically sorted extreme ray generators. Use
    `Cone.from_rays` to normalize arbitrary generating sets.
    """

    rays: tuple
    rank: int

    @staticmethod
    def from_rays(vectors) -> "Cone":
        vectors = [tuple(int(x) for x in v) for v in vectors]
        if not vectors:
            raise ZeroVector("a cone needs at least one generator")
        d = _check_rank(vectors)
        prim = []
        for v in vectors:
            if all(x == 0 for x in v):
                raise ZeroVector("zero vector is not a ray generator")
            p = primitive(v)
            if p not in prim:
                prim.append(p)
        if not _is_pointed(prim, d):
            raise NotPointed(f"generators {prim} span a line")
        extreme = [v for v in prim if not _cone_member(v, [w for w in prim if w != v], d)]
        return Cone(rays=tuple(sorted(extreme)), rank=d)

    @cached_property
    def _ineqs(self):
        if not self.full_dimensional:
            raise NotFullDimensional(
                f"cone of dimension {intlinalg.rank(intlinalg.as_int_matrix(self.rays))} in rank {self.rank};"
                " dual-based operations need a full-dimensional cone"
            )
        return tuple(_dual_ray_candidates(self.rays, self.rank))

    @property
    def full_dimensional(self) -> bool:
        return intlinalg.rank(intlinalg.as_int_matrix(self.rays)) == self.rank

    def contains(self, x) -> bool:
        if len(x) != self.rank:
            raise RankMismatch(f"point of rank {len(x)} vs cone of rank {self.rank}")
        return all(pair(u, x) >= 0 for u in self._ineqs)

    def __str__(self):
        return "cone{" + "; ".join(",".join(str(x) for x in r) for r in self.rays) + "}"


def dual_cone(c: Cone) -> Cone:
    """Dual cone {m : <m, r> >= 0 for every ray r of c}.

    Raises NotFullDimensional when c is not full-dimensional (the dual would
    contain a line and is not representable as a strongly convex cone).
    """
    rays = _dual_ray_candidates(c.rays, c.rank) if c.full_dimensional else None
    if rays is None:
        raise NotFullDimensional("dual of a non-full-dimensional cone is not strongly convex")
    return Cone(rays=tuple(sorted(rays)), rank=c.rank)


def hilbert_basis(c: Cone) -> list:
    """Minimal generating set of the semigroup c intersected with the lattice.

    Constructive Gordan: every indecomposable element lies in the zonotope
    spanned by the rays, so enumerating lattice points of the zonotope's
    bounding box that lie in the cone and discarding decomposables is exact.
    """
    ineqs = c._ineqs  # forces the full-dimensionality check
    d = c.rank
    lo = [sum(min(0, r[j]) for r in c.rays) for j in range(d)]
    hi = [sum(max(0, r[j]) for r in c.rays) for j in range(d)]
    candidates = []
    for point in itertools.product(*(range(lo[j], hi[j] + 1) for j in range(d))):
        if any(x != 0 for x in point) and all(pair(u, point) >= 0 for u in ineqs):
            candidates.append(point)

    def in_cone(x):
        return all(pair(u, x) >= 0 for u in ineqs)

    basis = []
    for h in candidates:
        decomposable = False
        for g in candidates:
            if g == h:
                continue
            rest = tuple(a - b for a, b in zip(h, g))
            if any(x != 0 for x in rest) and in_cone(rest):
                decomposable = True
                break
        if not decomposable:
            basis.append(h)
    return sorted(basis)


@dataclass(frozen=True)
class SemigroupBasis:
    """Hilbert-basis generators ordered so the first d form a Z-basis.

    zbasis_indices records which positions of the *input* generator list were
    selected (the lexicographically smallest determinant +-1 subset); after
    the reordering those generators sit at positions 0..d-1.
    """

    generators: tuple
    d: int
    zbasis_indices: tuple = field(default=())

    @property
    def h(self) -> int:
        return len(self.generators)

    def zbasis_matrix(self):
        """Columns are the first d generators."""
        return intlinalg.as_int_matrix([list(col) for col in zip(*self.generators[: self.d])])


def select_z_basis(gens, d: int) -> SemigroupBasis:
    """Reorder gens so the first d form a Z-basis of the character lattice.

    The selected subset is the lexicographically smallest set of indices with
    |det| = 1. Raises NoUnimodularSubset when none exists.
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    if len(set(gens)) != len(gens):
        raise ValueError("generators must be distinct")
    rank = _check_rank(gens)
    if rank != d:
        raise RankMismatch(f"generators of rank {rank}, expected {d}")
    if len(gens) < d:
        raise NoUnimodularSubset(f"only {len(gens)} generators for rank {d}")
    for idx in itertools.combinations(range(len(gens)), d):
        mat = intlinalg.as_int_matrix([[gens[i][j] for i in idx] for j in range(d)])
        if abs(intlinalg.det(mat)) == 1:
            rest = [gens[i] for i in range(len(gens)) if i not in idx]
            ordered = tuple([gens[i] for i in idx] + rest)
            return SemigroupBasis(generators=ordered, d=d, zbasis_indices=tuple(idx))
    raise NoUnimodularSubset(f"no {d}-subset of {gens} has determinant +-1")


def minimal_face_smooth(c: Cone, n) -> bool:
    """Does the minimal face of c containing n have unimodular ray generators?

    True exactly when the face's rays extend to a Z-basis of the lattice,
    i.e. the torus orbit met by n is outside the singular locus.
    """
    if not c.contains(n):
        raise NotInCone(f"{n} is not in {c}")
    active = [u for u in c._ineqs if pair(u, n) == 0]
    face_rays = [r for r in c.rays if all(pair(u, r) == 0 for u in active)]
    if not face_rays:
        return True  # n = 0: the face is the origin, orbit is the big torus
    divisors = intlinalg.elementary_divisors(intlinalg.as_int_matrix(face_rays))
    return len(divisors) == len(face_rays) and all(e == 1 for e in divisors)


def dual_of_generators(gens) -> Cone:
    """The cone cut out by <g, .> >= 0 for a generating set g of the dual.

    Used to recover the primal cone from a semigroup basis.
    """
    mcone = Cone.from_rays(gens)
    return dual_cone(mcone)
