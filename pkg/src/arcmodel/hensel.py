"""Hensel solver for the determined arc coordinates.

At the generic stable point every non-basis coordinate satisfies its
distinguished binomial relation, which becomes, t-coefficient by
t-coefficient past the contact value, a system of equations linear in the
unknown jets of that coordinate.  Over the residue field the linearization
is lower triangular with a constant unit monomial on the diagonal, so the
reduced system solves by forward substitution; Newton steps against the
triangular part then converge one grade per step in the adic filtration of
the maximal ideal.

Because the arcs are truncated, late equations miss contributions of the
jets that were cut off.  Each Newton step erodes the trustworthy range by
the drop of the coordinate (contact value minus contact order), so results
are exposed through an explicit per-coordinate clean window.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DepthExhausted,
    HypothesisViolation,
    OutOfWindow,
    VerificationFailed,
)
from .lattice import SemigroupBasis
from .model import StablePoint, jet_orders, stable_point
from .poly import (
    AUX,
    SparsePoly,
    TSeries,
    VarId,
    graded_sum_of_products,
    substitute_series,
)
from .relations import RelationLattice, binomial_of, pair_relation


@dataclass(frozen=True)
class HenselSystem:
    """Linear jet equations of the solved coordinates at a stable point.

    equations are keyed (q, s) with s the offset past the contact value of
    coordinate q; the unknown jets are the AUX variables Y[q][s] standing
    for the coefficient of the q-th coordinate at t-index k_q + s.
    """

    point: StablePoint
    equations: dict
    units: dict
    drops: dict
    conductors: dict
    depth: int

    def aux_vars(self, q: int) -> list:
        return [VarId.aux(q, s) for s in range(self.depth)]


def _solved_arc(sp: StablePoint, i: int, truncation: int, depth: int) -> TSeries:
    k = sp.orders[i - 1]
    coeffs = [SparsePoly.var(VarId.model(i, s)) for s in range(min(k, truncation))]
    for s in range(depth):
        if k + s >= truncation:
            break
        coeffs.append(SparsePoly.var(VarId.aux(i, s)))
    return TSeries(coeffs, truncation)


def verify_hypotheses(sys: HenselSystem) -> None:
    """Check the structure the solver relies on.

    Every equation must be linear in the unknown jets of its own coordinate
    and free of the others'; the diagonal coefficient must be the unit
    monomial up to terms vanishing at the point; coefficients above the
    diagonal must vanish at the point; and the constant part of the first
    equation must reduce to minus a single monomial.

    Raises:
        HypothesisViolation: naming the violated clause.
    """
    x = frozenset(sys.point.x_vars)
    for (q, s), eq in sorted(sys.equations.items()):
        own = set(sys.aux_vars(q))
        foreign = {v for v in eq.variables() if v.stream == AUX} - own
        if foreign:
            raise HypothesisViolation(
                "separation",
                "equation (%d, %d) mixes unknowns of another coordinate" % (q, s),
            )
        try:
            rest, coeffs = eq.decompose_linear(own)
        except ValueError:
            raise HypothesisViolation(
                "linearity", "equation (%d, %d) is not linear in its jets" % (q, s)
            )
        diag = coeffs.get(VarId.aux(q, s), SparsePoly.zero())
        if diag.grade_filter(x, 1) != sys.units[q]:
            raise HypothesisViolation(
                "A1",
                "diagonal of equation (%d, %d) is not the unit monomial" % (q, s),
            )
        for r in range(s + 1, sys.depth):
            above = coeffs.get(VarId.aux(q, r))
            if above is not None and not above.grade_filter(x, 1).is_zero():
                raise HypothesisViolation(
                    "A2",
                    "coefficient of a later jet survives at the point in "
                    "equation (%d, %d)" % (q, s),
                )
        if s == 0:
            head = rest.grade_filter(x, 1)
            if len(head.terms) != 1 or next(iter(head.terms.values())) != -1:
                raise HypothesisViolation(
                    "C",
                    "constant part of equation (%d, 0) is not minus a "
                    "monomial" % q,
                )


def build_system(b: SemigroupBasis, rl: RelationLattice, n, depth: int) -> HenselSystem:
    """Expand each distinguished relation on free arcs with unknown jets.

    depth is the number of unknowns (and equations) per solved coordinate;
    jets beyond it are cut to zero, which is what the clean-window
    bookkeeping of lift() accounts for.
    """
    sp = stable_point(b, n)
    equations, units, drops, conductors = {}, {}, {}, {}
    for q in sorted(rl.special):
        l = rl.special[q]
        c = pair_relation(n, l, b)
        conductors[q] = c
        drops[q] = c - sp.orders[q - 1]
        truncation = c + depth
        arcs = {}
        for i, li in enumerate(l, 1):
            if not li:
                continue
            if i <= b.d:
                arcs[i] = sp.free_arc(i, truncation)
            else:
                arcs[i] = _solved_arc(sp, i, truncation, depth)
        expanded = substitute_series(binomial_of(l).as_poly(), arcs, truncation)
        for s in range(depth):
            equations[(q, s)] = expanded[c + s]
        plus = binomial_of(l).plus
        unit_vars = [
            (VarId.free(i, sp.orders[i - 1]), plus[i - 1])
            for i in range(1, b.d + 1)
            if plus[i - 1]
        ]
        units[q] = SparsePoly.monomial(unit_vars, invertible=[v for v, _ in unit_vars])
    sys = HenselSystem(sp, equations, units, drops, conductors, depth)
    verify_hypotheses(sys)
    return sys


def solve_mod_m(sys: HenselSystem) -> dict:
    """Solve the system over the residue field by forward substitution.

    Returns:
        map (q, s) -> jet value, a Laurent polynomial in the free leading
        coefficients with no variable of the maximal ideal.
    """
    x = frozenset(sys.point.x_vars)
    out = {}
    for q in sorted(sys.units):
        u_inv = sys.units[q].unit_reciprocal()
        for s in range(sys.depth):
            rest, coeffs = sys.equations[(q, s)].decompose_linear(sys.aux_vars(q))
            acc = rest.grade_filter(x, 1)
            for r in range(s):
                j0 = coeffs.get(VarId.aux(q, r))
                if j0 is None:
                    continue
                j0 = j0.grade_filter(x, 1)
                if j0.terms:
                    acc = acc + j0 * out[(q, r)]
            out[(q, s)] = -(acc * u_inv)
    return out


@dataclass(frozen=True)
class LiftResult:
    """Jets of the solved coordinates modulo the (order+1)-st adic power.

    series is keyed by (coordinate, t-index) and only contains the jets
    inside the clean window; values keeps everything that was computed,
    keyed by (coordinate, offset).
    """

    system: HenselSystem
    order: int
    values: dict
    series: dict
    window: dict


def lift(sys: HenselSystem, order: int) -> LiftResult:
    """Newton-lift the residue-field solution to the given adic order.

    Each step solves the triangular linearization at the point against the
    current residual, which is exact for these equations (they are linear
    in the unknowns), so every step gains one adic grade.

    Raises:
        DepthExhausted: when truncation erosion leaves no trustworthy jet.
    """
    if order < 0:
        raise ValueError("lift order must be nonnegative")
    window = {}
    for q, drop in sys.drops.items():
        width = sys.depth - order * drop
        if width <= 0:
            raise DepthExhausted(
                "depth %d leaves no clean jet of coordinate %d at order %d"
                % (sys.depth, q, order)
            )
        window[q] = width
    x = frozenset(sys.point.x_vars)
    y = {k: v.grade_filter(x, order + 1) for k, v in solve_mod_m(sys).items()}
    parts = {}
    for key in sys.equations:
        rest, coeffs = sys.equations[key].decompose_linear(sys.aux_vars(key[0]))
        couplings = [
            (r, coeffs[VarId.aux(key[0], r)], coeffs[VarId.aux(key[0], r)].grade_filter(x, 1))
            for r in range(sys.depth)
            if VarId.aux(key[0], r) in coeffs
        ]
        parts[key] = (rest.grade_filter(x, order + 1), couplings)

    def residual_at(key):
        rest, couplings = parts[key]
        return graded_sum_of_products(
            rest, [(cf, y[(key[0], r)]) for r, cf, _ in couplings], x, order + 1
        )

    for _ in range(order):
        z = {}
        for q in sorted(sys.units):
            u_inv = sys.units[q].unit_reciprocal()
            for s in range(sys.depth):
                acc = residual_at((q, s))
                for r, _, j0 in parts[(q, s)][1]:
                    if r < s and j0.terms:
                        acc = acc + j0 * z[(q, r)]
                z[(q, s)] = -(acc * u_inv).grade_filter(x, order + 1)
        y = {k: (y[k] + z[k]).grade_filter(x, order + 1) for k in y}
    for key in sys.equations:
        assert residual_at(key).is_zero(), (
            "lift residual of equation (%d, %d) survives" % key
        )
    series = {}
    for (q, s), val in y.items():
        if s < window[q]:
            series[(q, sys.point.orders[q - 1] + s)] = val
    return LiftResult(sys, order, y, series, window)


def lift_window(
    b: SemigroupBasis, rl: RelationLattice, n, order: int, offsets: int
) -> LiftResult:
    """Lift with automatic depth so the first ``offsets`` jets come out clean.

    The depth padding is order * B + C with B the largest contact order or
    drop and C the largest contact value; the run is repeated three deeper
    and the clean jets compared, so an unstable truncation cannot slip
    through.

    Raises:
        VerificationFailed: if the two runs disagree on a clean jet.
    """
    ks = jet_orders(b, n)
    cs = {q: pair_relation(n, rl.special[q], b) for q in rl.special}
    if cs:
        bound = max(max(ks), max(cs[q] - ks[q - 1] for q in cs))
        depth = offsets + order * bound + max(cs.values())
    else:
        depth = offsets
    first = lift(build_system(b, rl, n, depth), order)
    deeper = lift(build_system(b, rl, n, depth + 3), order)
    for key, val in first.series.items():
        if deeper.series.get(key) != val:
            raise VerificationFailed(
                "lift of jet %s changes when the depth grows" % (key,)
            )
    return deeper


def coordinate_image(lr: LiftResult, i: int, s: int) -> SparsePoly:
    """Jet of ambient coordinate i at t-index s on the lifted arc.

    Below the contact order this is a coordinate of the maximal ideal, on a
    basis direction it is a free coefficient, and on a solved coordinate it
    is the lifted value.

    Raises:
        OutOfWindow: for a solved jet beyond the clean window.
    """
    sp = lr.system.point
    k = sp.orders[i - 1]
    if s < k:
        return SparsePoly.var(VarId.model(i, s))
    if i <= sp.basis.d:
        return SparsePoly.var(VarId.free(i, s))
    if (i, s) not in lr.series:
        raise OutOfWindow(
            "jet %d of coordinate %d is outside the clean window" % (s, i)
        )
    return lr.series[(i, s)]
