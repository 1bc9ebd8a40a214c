"""Weierstrass preparation over a jet local ring, and the model comparison.

Coefficients live in the local ring at the stable point: polynomials in
the maximal-ideal coordinates X with scalars that are Laurent monomial
fractions in the free leading coefficients.  Everything is computed modulo
a power of the maximal ideal (the adic order) and a t-truncation.

Division runs layer by layer in the adic grading: each layer is a
classical power-series division over the residue field, inverting only
the leading coefficient of the divisor, and the exact residual is
recomputed before the next layer.  Preparation divides t^ord by the
series, which yields the distinguished polynomial directly and the unit
as a geometric-series inverse.

comparison_check ties the package together: it lifts the solved
coordinates, prepares every arc coordinate into a distinguished
polynomial, and verifies that the coefficient ideal of the arcs agrees
with the coefficient ideal of their prepared images, with the coordinate
change invertible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    NonMonomialDivision,
    NotRegular,
    TruncationTooSmall,
    VerificationFailed,
)
from .hensel import coordinate_image, lift_window
from .lattice import SemigroupBasis
from .model import stable_point
from .poly import (
    SparsePoly,
    TSeries,
    graded_mul,
    graded_sum_of_products,
    mono_pack,
    nn_mask,
    substitute_series,
    varset_codes,
)
from .relations import RelationLattice, binomial_of, pair_relation


def _filtered(s: TSeries, x, order: int) -> TSeries:
    return s.map_coeffs(lambda p: p.grade_filter(x, order))


def reduced_part(s: TSeries, x) -> TSeries:
    """The series over the residue field: coefficients taken at the point."""
    return s.map_coeffs(lambda p: p.grade_filter(x, 1))


def t_order(f: TSeries, x) -> int:
    """Index of the first coefficient that survives at the point.

    Raises:
        NotRegular: when every coefficient up to the truncation vanishes.
    """
    for i, c in enumerate(reduced_part(f, x).coeffs):
        if c.terms:
            return i
    raise NotRegular("series vanishes at the point up to its truncation")


def divide(g: TSeries, f: TSeries, x, order: int):
    """Weierstrass division g = q*f + r with deg_t(r) < t_order(f at point).

    Works one adic layer at a time: the homogeneous slice of the residual
    is divided by the reduced divisor as ordinary t-series (only the
    leading coefficient is inverted), then the exact residual is formed
    again.  After ``order`` layers the residual vanishes at that adic
    order.

    Raises:
        NonMonomialDivision: if the reduced leading coefficient is not a
            single monomial (its inverse would leave the ring).
        NotRegular: if f vanishes at the point.
    """
    d = t_order(f, x)
    fbar = reduced_part(f, x)
    lead = fbar[d]
    if len(lead.terms) != 1:
        raise NonMonomialDivision(
            "leading coefficient %s is not a monomial" % lead
        )
    lead_inv = lead.unit_reciprocal()
    T = f.truncation
    q = TSeries([], T)
    r = TSeries([], T)
    g0 = _filtered(g, x, order)
    residual = g0
    for _ in range(order):
        h = residual
        ql = [SparsePoly.zero()] * T
        rl = [SparsePoly.zero()] * T
        for s in range(T):
            if s < d:
                rl[s] = h[s]
                continue
            acc = h[s]
            for j in range(s - d):
                if ql[j].terms:
                    acc = acc - ql[j] * fbar[s - j]
            ql[s - d] = acc * lead_inv
        q = q + TSeries(ql, T)
        r = r + TSeries(rl, T)
        residual = g0 - q.mul_graded(f, x, order) - r
    if not residual.is_zero():
        raise VerificationFailed("division residual survives the adic order")
    return _filtered(q, x, order), _filtered(r, x, order)


def _invert_unit(q: TSeries, x, order: int) -> TSeries:
    """Inverse of a series whose constant coefficient is a unit monomial.

    The constant coefficient is inverted first (a geometric series in its
    maximal-ideal part, which dies at the adic order), then the higher
    coefficients follow by the usual reciprocal recursion, so the whole
    inverse costs about one series product.
    """
    head = q[0].grade_filter(x, 1)
    if len(head.terms) != 1:
        raise NonMonomialDivision(
            "unit constant coefficient %s is not a monomial" % head
        )
    head_inv = head.unit_reciprocal()
    nil = graded_mul(q[0], head_inv, x, order) - 1
    series = SparsePoly.const(1)
    power = SparsePoly.const(1)
    while True:
        power = graded_mul(power, -nil, x, order)
        if power.is_zero():
            break
        series = series + power
    u0 = graded_mul(series, head_inv, x, order)
    T = q.truncation
    out = [SparsePoly.zero()] * T
    out[0] = u0
    for s in range(1, T):
        acc = graded_sum_of_products(
            SparsePoly.zero(),
            [(q[j], out[s - j]) for j in range(1, s + 1) if q[j].terms],
            x,
            order,
        )
        if acc.terms:
            out[s] = -graded_mul(acc, u0, x, order)
    return TSeries(out, T)


def prepare(f: TSeries, x, order: int, with_unit: bool = True):
    """Weierstrass preparation f = unit * w with w distinguished.

    w = t^d - r comes from dividing t^d by f; its lower coefficients lie
    in the maximal ideal, and the unit is the inverse of the division
    quotient.  The factorization is re-multiplied as a final check.

    With ``with_unit=False`` the unit is neither inverted nor returned;
    the factorization is still certified, because the division has already
    verified q*f == w exactly and the head of q is checked to be a unit
    monomial.  Callers that only consume the distinguished part (the
    comparison does) skip the most expensive series inversion this way.

    Raises:
        TruncationTooSmall: if the truncation cannot support the adic order.
        VerificationFailed: if the distinguished part or the
            re-multiplication check fails.
    """
    d = t_order(f, x)
    T = f.truncation
    if T < d * (order + 1):
        raise TruncationTooSmall(
            "truncation %d cannot prepare order %d at adic order %d"
            % (T, d, order)
        )
    q, r = divide(TSeries.t_power(d, T), f, x, order)
    w = TSeries.t_power(d, T) - r
    for s in range(d):
        if not w[s].grade_filter(x, 1).is_zero():
            raise VerificationFailed(
                "prepared coefficient at t^%d does not vanish at the point" % s
            )
    if not with_unit:
        head = q[0].grade_filter(x, 1)
        if len(head.terms) != 1:
            raise NonMonomialDivision(
                "unit constant coefficient %s is not a monomial" % head
            )
        return w, None
    unit = _invert_unit(q, x, order)
    if not (unit.mul_graded(w, x, order) - _filtered(f, x, order)).is_zero():
        raise VerificationFailed("re-multiplying the preparation misses f")
    return w, unit


# -- ideal spans modulo a power of the maximal ideal -----------------------


def _monomials_below(x_sorted, order: int):
    out = [mono_pack(())]
    for deg in range(1, order):
        for combo in itertools.combinations_with_replacement(x_sorted, deg):
            counts = {}
            for v in combo:
                counts[v] = counts.get(v, 0) + 1
            out.append(mono_pack(counts.items()))
    return out


def _vectorize(p: SparsePoly, xmask: int):
    # Columns are the x-parts of the monomials, split off by mask; the
    # entries keep whatever free and auxiliary coefficients remain.
    cols: dict = {}
    for m, c in p.terms.items():
        hit = m[0] & xmask
        d = cols.get(hit)
        if d is None:
            d = cols[hit] = {}
        k = (m[0] - hit, m[1])
        nc = d.get(k, 0) + c
        if nc:
            d[k] = nc
        else:
            del d[k]
    inv = p.inv_codes
    return {h: SparsePoly._raw(d, inv) for h, d in cols.items() if d}


def _ideal_rows(gens, x, order: int):
    x = varset_codes(x)
    xmask = nn_mask(x)
    rows = []
    for g in gens:
        for mono in _monomials_below(sorted(x), order):
            shifted = (SparsePoly({mono: 1}) * g).grade_filter(x, order)
            vec = _vectorize(shifted, xmask)
            if vec:
                rows.append(vec)
    return rows


def _eliminate(rows):
    """Fraction-free echelon form; returns the pivots as (column, row)."""
    work = [dict(r) for r in rows if r]
    pivots = []
    while work:
        col = min(min(r) for r in work)
        idx = next(i for i, r in enumerate(work) if col in r)
        pivot = work.pop(idx)
        pivots.append((col, pivot))
        reduced = []
        for r in work:
            if col in r:
                scale = r[col]
                out = {}
                for k in set(r) | set(pivot):
                    val = r.get(k, SparsePoly.zero()) * pivot[col] - pivot.get(
                        k, SparsePoly.zero()
                    ) * scale
                    if val.terms:
                        out[k] = val
                r = out
            if r:
                reduced.append(r)
        work = reduced
    return pivots


def _in_span(vec, pivots) -> bool:
    v = dict(vec)
    for col, row in pivots:
        if col not in v:
            continue
        scale = v[col]
        out = {}
        for k in set(v) | set(row):
            val = v.get(k, SparsePoly.zero()) * row[col] - row.get(
                k, SparsePoly.zero()
            ) * scale
            if val.terms:
                out[k] = val
        v = out
    return not v


def _spans_agree(a_gens, c_gens, x, order: int) -> bool:
    a_rows = _ideal_rows(a_gens, x, order)
    c_rows = _ideal_rows(c_gens, x, order)
    a_pivots = _eliminate(a_rows)
    c_pivots = _eliminate(c_rows)
    return all(_in_span(r, c_pivots) for r in a_rows) and all(
        _in_span(r, a_pivots) for r in c_rows
    )


def _automorphism_invertible(prepared, x, order: int) -> bool:
    """Full rank of the linear parts of the prepared coordinates."""
    if order < 2:
        # below adic order two the linear parts are invisible; nothing to test
        return True
    x = varset_codes(x)
    xmask = nn_mask(x)
    rows = []
    for _, value in sorted(prepared.items()):
        linear = value.homogeneous_part(x, 1)
        rows.append(_vectorize(linear, xmask))
    pivots = _eliminate(rows)
    return len(pivots) == len(x)


# -- the comparison ---------------------------------------------------------


@dataclass(frozen=True)
class ComparisonVerdict:
    passed: bool
    order: int
    valuation: tuple
    detail: str
    prepared: dict | None = None


def comparison_check(
    b: SemigroupBasis, rl: RelationLattice, n, order: int
) -> ComparisonVerdict:
    """Verify the finite model against the prepared arc coordinates.

    Lifts the solved coordinates to adic order ``order``, checks that the
    arcs satisfy their relations past the contact values, prepares every
    coordinate into a distinguished polynomial, and compares the ideal
    generated by the low relation coefficients of the arcs with the one
    generated by the low coefficients of the prepared images.  The linear
    part of the coordinate change must be invertible, and the whole
    computation is repeated at a deeper t-truncation to guard against
    truncation artifacts.
    """
    if order < 1:
        raise ValueError("comparison order must be at least 1")
    sp = stable_point(b, n)
    x = frozenset(sp.x_vars)
    if not rl.special or not x:
        return ComparisonVerdict(
            True,
            order,
            sp.valuation,
            "nothing to compare: no relations or no local coordinates",
            None,
        )
    ks = sp.orders
    cs = {q: pair_relation(n, rl.special[q], b) for q in rl.special}
    T = max(cs.values()) + order * max(ks) + 3
    T = max(T, max(ks) * (order + 1) + 1)
    # The arcs run to index T+4; a solved coordinate's jets start at its
    # contact order, so the window only has to cover the difference.
    offsets = T + 5 - min(ks[q - 1] for q in cs)
    lr = lift_window(b, rl, n, order - 1, offsets)

    def run(truncation):
        arcs = {
            i: TSeries(
                [coordinate_image(lr, i, s) for s in range(truncation)],
                truncation,
            )
            for i in range(1, b.h + 1)
        }
        for i in range(1, b.h + 1):
            if arcs[i][ks[i - 1]].grade_filter(x, 1).is_zero():
                return None, "coordinate %d has no unit at its contact order" % i
        a_gens = []
        for q in sorted(cs):
            expanded = substitute_series(
                binomial_of(rl.special[q]).as_poly(), arcs, truncation, x, order
            )
            for s in range(cs[q], truncation):
                if not expanded[s].is_zero():
                    return None, (
                        "relation %d fails at t^%d past its contact value"
                        % (q, s)
                    )
            a_gens.extend(expanded[s] for s in range(cs[q]))
        prepared = {}
        warcs = {}
        for i in range(1, b.h + 1):
            try:
                w, _ = prepare(_filtered(arcs[i], x, order), x, order, with_unit=False)
            except (NonMonomialDivision, NotRegular, VerificationFailed) as err:
                return None, "preparing coordinate %d: %s" % (i, err)
            if t_order(w, x) != ks[i - 1]:
                return None, "prepared degree of coordinate %d drifted" % i
            warcs[i] = w
            for j in range(ks[i - 1]):
                prepared[(i, j)] = w[j]
        c_gens = []
        for q in sorted(cs):
            expanded = substitute_series(
                binomial_of(rl.special[q]).as_poly(), warcs, truncation, x, order
            )
            c_gens.extend(expanded[s] for s in range(cs[q]))
        if not _spans_agree(a_gens, c_gens, x, order):
            return None, "coefficient ideals of arcs and prepared arcs differ"
        if not _automorphism_invertible(prepared, x, order):
            return None, "coordinate change is not invertible"
        return prepared, None

    prepared, failure = run(T)
    if failure is not None:
        return ComparisonVerdict(False, order, sp.valuation, failure, None)
    deeper, failure = run(T + 5)
    if failure is not None:
        return ComparisonVerdict(
            False, order, sp.valuation, "deeper run: " + failure, None
        )
    if prepared != deeper:
        return ComparisonVerdict(
            False,
            order,
            sp.valuation,
            "prepared coordinates changed with the truncation",
            None,
        )
    return ComparisonVerdict(
        True,
        order,
        sp.valuation,
        "ideals agree and the coordinate change is invertible",
        prepared,
    )
