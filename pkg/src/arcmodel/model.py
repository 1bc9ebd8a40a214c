"""Finite polynomial models of a jet fiber over a toric valuation.

Fix a valuation vector n inside the cone.  Truncating every ambient
coordinate at its contact order k_i = <n, m_i> and substituting the
truncated arcs into the distinguished binomial relations produces finitely
many coefficient polynomials; these cut out the finite model of the fiber
through the generic stable point.  The top coefficient at the contact
order of each relation cancels identically, which the builder checks.

The remaining ops simplify the presentation by eliminating variables that
enter linearly with a constant coefficient, and attach component
statistics (count, dimension, essentiality) from the decomposition side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import decomp, groebner
from .errors import LeadingTermMismatch, NotInCone
from .lattice import SemigroupBasis, dual_of_generators, pair
from .poly import SparsePoly, TSeries, VarId, grevlex_key, substitute_series
from .relations import RelationLattice, binomial_of, pair_relation

INFINITE_FACTOR_NOTE = "formal-disk countable product per finite-model theorem"


def jet_orders(b: SemigroupBasis, n) -> tuple:
    """Contact orders k_i = <n, m_i> of the generic arc, one per generator.

    Raises:
        NotInCone: if some order is negative, i.e. n lies outside the cone.
    """
    orders = []
    for m in b.generators:
        k = pair(n, m)
        if k < 0:
            raise NotInCone("valuation %s pairs negatively with %s" % (n, m))
        orders.append(k)
    return tuple(orders)


@dataclass(frozen=True)
class StablePoint:
    """Generic stable point of the jet fiber at a fixed valuation.

    The coordinates Z_{i,s} with s < k_i generate the maximal ideal of the
    local ring at the point; the leading coefficients Z_{i,k_i} of the
    first d (basis) coordinates stay invertible units.
    """

    basis: SemigroupBasis
    valuation: tuple
    orders: tuple

    @property
    def x_vars(self) -> tuple:
        return tuple(
            VarId.model(i + 1, s)
            for i, k in enumerate(self.orders)
            for s in range(k)
        )

    @property
    def unit_product(self) -> SparsePoly:
        pairs = [
            (VarId.free(i + 1, self.orders[i]), 1) for i in range(self.basis.d)
        ]
        return SparsePoly.monomial(pairs, invertible=[v for v, _ in pairs])

    def normalized_arc(self, i: int, truncation: int) -> TSeries:
        """Arc coordinate with the unit coefficient pinned to 1 at order k_i."""
        k = self.orders[i - 1]
        coeffs = [
            SparsePoly.var(VarId.model(i, s)) for s in range(min(k, truncation))
        ]
        if k < truncation:
            coeffs.append(SparsePoly.const(1))
        return TSeries(coeffs, truncation)

    def free_arc(self, i: int, truncation: int) -> TSeries:
        """Arc coordinate of a basis direction with free unit tail."""
        if i > self.basis.d:
            raise ValueError("free tails exist only for the %d basis coordinates" % self.basis.d)
        k = self.orders[i - 1]
        coeffs = [
            SparsePoly.var(VarId.model(i, s)) for s in range(min(k, truncation))
        ]
        coeffs += [
            SparsePoly.var(VarId.free(i, s)) for s in range(k, truncation)
        ]
        return TSeries(coeffs, truncation)


def stable_point(b: SemigroupBasis, n) -> StablePoint:
    return StablePoint(b, tuple(int(x) for x in n), jet_orders(b, n))


@dataclass(frozen=True)
class ModelIdeal:
    point: StablePoint
    variables: tuple
    generators: tuple
    conductors: dict


def model_ideal(b: SemigroupBasis, rl: RelationLattice, n) -> ModelIdeal:
    """Coefficient ideal of the finite model at valuation n.

    For each distinguished relation the truncated arcs are substituted into
    its binomial; the t-coefficients below the contact value <n, plus part>
    generate the ideal, and the coefficient at the contact value itself must
    cancel between the two unit monomials.

    Raises:
        LeadingTermMismatch: if that top coefficient fails to cancel.
        NotInCone: if n pairs negatively with some generator.
    """
    sp = stable_point(b, n)
    gens = []
    conductors = {}
    for q in sorted(rl.special):
        l = rl.special[q]
        c = pair_relation(n, l, b)
        conductors[q] = c
        arcs = {i: sp.normalized_arc(i, c + 1) for i in range(1, b.h + 1)}
        expanded = substitute_series(binomial_of(l).as_poly(), arcs, c + 1)
        if not expanded[c].is_zero():
            raise LeadingTermMismatch(
                "coefficient at contact order %d of relation %d does not cancel"
                % (c, q)
            )
        for j in range(c):
            if expanded[j].terms:
                gens.append(expanded[j])
    return ModelIdeal(sp, sp.x_vars, tuple(gens), conductors)


def simplify_presentation(generators, variables):
    """Eliminate variables entering some generator linearly with a constant.

    Scans from the last variable backwards, substitutes the solved value
    into the rest, and repeats until stuck.  The survivors are made monic
    and sorted by leading term.

    Returns:
        (simplified, eliminated): the reduced generator tuple and the
        variables removed, in elimination order.
    """
    work = [g for g in generators if g.terms]
    remaining = sorted(variables)
    eliminated = []
    progress = True
    while progress:
        progress = False
        for v in sorted(remaining, reverse=True):
            for idx, g in enumerate(work):
                if g.degree_in([v]) != 1:
                    continue
                rest, coeffs = g.decompose_linear([v])
                a = coeffs[v]
                if a.variables():
                    continue
                image = rest * (Fraction(-1) / a.constant_term())
                del work[idx]
                work = [p.substitute({v: image}) for p in work]
                remaining.remove(v)
                eliminated.append(v)
                progress = True
                break
            if progress:
                break
    key = grevlex_key(tuple(remaining))
    out = []
    for p in work:
        if not p.terms:
            continue
        lead = max(p.terms, key=key)
        q = p * (Fraction(1) / p.terms[lead])
        if all(q != r for r in out):
            out.append(q)
    out.sort(key=lambda p: key(max(p.terms, key=key)), reverse=True)
    return tuple(out), tuple(eliminated)


@dataclass(frozen=True)
class ModelReport:
    model: ModelIdeal
    simplified: tuple
    eliminated: tuple
    dimension: int
    stats: decomp.ComponentStats
    infinite_factor_note: str


def model_report(m: ModelIdeal) -> ModelReport:
    """Dimension, component statistics and simplified presentation."""
    gb = groebner.buchberger(m.generators, variables=m.variables)
    dimension = groebner.staircase_dimension(gb)
    cone = dual_of_generators(m.point.basis.generators)
    n = m.point.valuation
    if any(n):
        stats = decomp.component_stats(cone, n)
    else:
        # the zero valuation has exactly the empty decomposition and an
        # empty model: one component of dimension zero, nothing to classify
        stats = decomp.ComponentStats(
            decompositions=(),
            component_count=1,
            dimension=0,
            primitive=False,
            indecomposable=False,
            strongly_essential=None,
        )
    simplified, eliminated = simplify_presentation(m.generators, m.variables)
    return ModelReport(m, simplified, eliminated, dimension, stats, INFINITE_FACTOR_NOTE)
