"""Relations among semigroup generators, binomials, and the toric valuation.

The multiplicative relations among the coordinate functions of the toric
variety form the kernel L of the map Z^h -> M sending the standard basis
to the semigroup generators m_1..m_h.  Because the first d generators are
a Z-basis of M, L carries a distinguished basis: for each q > d a unique
vector with entry 1 at position q and 0 at every other position beyond d.
These are exactly the relations the finite jet model consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import intlinalg
from .errors import MNotInSemigroup, NotARelation
from .lattice import Cone, SemigroupBasis, pair
from .poly import SparsePoly, VarId


def _weighted_sum(l, generators, rank: int):
    acc = [0] * rank
    for li, m in zip(l, generators):
        for j in range(rank):
            acc[j] += int(li) * int(m[j])
    return tuple(acc)


@dataclass(frozen=True)
class RelationLattice:
    """Basis of the relation lattice among the generators.

    ``special`` maps each index q in d+1..h (1-based) to the relation with
    entry 1 at q and 0 at other positions > d; ``basis`` lists the same
    vectors in index order, which is a Z-basis of the whole lattice.
    """

    basis: tuple
    special: dict


def relation_lattice(b: SemigroupBasis) -> RelationLattice:
    """Express every non-basis generator over the Z-basis m_1..m_d.

    For q > d solve m_q = sum(c_i m_i, i <= d) exactly; the relation is
    then (-c_1, ..., -c_d, 0, ..., 1 at q, ..., 0).
    """
    mat = b.zbasis_matrix()
    special = {}
    rows = []
    for q in range(b.d + 1, b.h + 1):
        coords = intlinalg.solve_unimodular(mat, b.generators[q - 1])
        l = [-int(c) for c in coords] + [0] * (b.h - b.d)
        l[q - 1] = 1
        l = tuple(l)
        assert _weighted_sum(l, b.generators, b.d) == (0,) * b.d
        special[q] = l
        rows.append(l)
    return RelationLattice(tuple(rows), special)


@dataclass(frozen=True)
class Binomial:
    """Exponent split l = plus - minus with disjoint supports."""

    plus: tuple
    minus: tuple

    def as_poly(self) -> SparsePoly:
        """The binomial Z^plus - Z^minus in the ambient coordinates Z[1..h]."""
        pos = SparsePoly.monomial({VarId.base(i + 1): e for i, e in enumerate(self.plus)})
        neg = SparsePoly.monomial({VarId.base(i + 1): e for i, e in enumerate(self.minus)})
        return pos - neg


def binomial_of(l) -> Binomial:
    """Split an integer vector into its positive and negative parts."""
    plus = tuple(max(int(x), 0) for x in l)
    minus = tuple(max(-int(x), 0) for x in l)
    return Binomial(plus, minus)


def pair_relation(n, l, b: SemigroupBasis) -> int:
    """Value <n, sum of the positive side of l> of a relation l.

    Both sides of a genuine relation give the same lattice point, so the
    pairing is well defined; this is the t-order at which the relation's
    binomial starts interacting with the arc coordinates.

    Raises:
        NotARelation: if l is not in the relation lattice.
    """
    bi = binomial_of(l)
    plus = _weighted_sum(bi.plus, b.generators, b.d)
    minus = _weighted_sum(bi.minus, b.generators, b.d)
    if plus != minus:
        raise NotARelation(
            "sides map to %s and %s; not a relation among the generators" % (plus, minus)
        )
    return pair(n, plus)


def ord_n(terms, n, cone: Cone):
    """Toric valuation of a semigroup-algebra element given by its support.

    Args:
        terms: list of (coefficient, m) pairs with nonzero coefficients,
            each m a lattice point of the dual semigroup.
        n: the valuation vector in the primal cone.
        cone: the primal cone sigma; membership of each m in the dual is
            checked against its rays.

    Returns:
        min over the support of <m, n>, or math.inf for the zero element.

    Raises:
        MNotInSemigroup: if some m lies outside the dual semigroup.
    """
    best = math.inf
    for coeff, m in terms:
        if coeff == 0:
            continue
        if any(pair(m, r) < 0 for r in cone.rays):
            raise MNotInSemigroup("%s is outside the dual semigroup" % (m,))
        best = min(best, pair(m, n))
    return best
