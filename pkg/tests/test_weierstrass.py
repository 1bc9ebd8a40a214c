import pytest

from arcmodel.errors import (
    NonMonomialDivision,
    NotRegular,
    TruncationTooSmall,
)
from arcmodel.lattice import select_z_basis
from arcmodel.poly import SparsePoly, TSeries, VarId
from arcmodel.relations import relation_lattice
from arcmodel.weierstrass import comparison_check, divide, prepare, t_order


def quadric_basis():
    return select_z_basis(((0, 1), (1, 0), (2, -1)), 2)


def smooth_basis():
    return select_z_basis(((0, 1), (1, 0)), 2)


def X(i, s):
    return SparsePoly.var(VarId.model(i, s))


def F(i, s):
    return SparsePoly.var(VarId.free(i, s))


XSMALL = frozenset([VarId.model(1, 0)])
X0 = X(1, 0)
ONE = SparsePoly.const(1)


def test_t_order():
    f = TSeries([X0, ONE, ONE], 5)
    assert t_order(f, XSMALL) == 1
    with pytest.raises(NotRegular):
        t_order(TSeries([X0, X0 ** 2], 3), XSMALL)


def test_golden_division_by_quadratic():
    g = TSeries.t_power(3, 6)
    f = TSeries([SparsePoly.zero(), X0, ONE], 6)
    q, r = divide(g, f, XSMALL, 3)
    assert q == TSeries([-X0, ONE], 6)
    assert r == TSeries([SparsePoly.zero(), X0 ** 2], 6)


def test_golden_division_by_linear():
    g = TSeries.t_power(2, 5)
    f = TSeries([X0, ONE], 5)
    q, r = divide(g, f, XSMALL, 3)
    assert q == TSeries([-X0, ONE], 5)
    assert r == TSeries([X0 ** 2], 5)


def test_golden_preparation():
    f = TSeries([X0, ONE, ONE], 6)
    w, u = prepare(f, XSMALL, 2)
    assert w == TSeries([X0, ONE], 6)
    assert u[0] == ONE - X0
    assert u[1] == ONE


def test_division_needs_a_regular_divisor():
    with pytest.raises(NotRegular):
        divide(TSeries.t_power(1, 3), TSeries([X0], 3), XSMALL, 2)


def test_division_needs_a_monomial_unit():
    f = TSeries([SparsePoly.zero(), F(1, 1) + F(2, 1)], 4)
    with pytest.raises(NonMonomialDivision):
        divide(TSeries.t_power(1, 4), f, XSMALL, 2)


def test_preparation_truncation_guard():
    with pytest.raises(TruncationTooSmall):
        prepare(TSeries([X0, ONE], 3), XSMALL, 3)


def test_remultiplication_on_assorted_series():
    examples = [
        TSeries([X0, ONE, ONE, ONE], 8),
        TSeries([X0 ** 2, 2 * X0, ONE, SparsePoly.zero(), ONE], 12),
        TSeries([SparsePoly.zero(), X0, ONE + X0, ONE], 9),
    ]
    for f in examples:
        w, u = prepare(f, XSMALL, 2)
        d = t_order(f, XSMALL)
        assert w[d] == ONE
        for s in range(d):
            assert w[s].grade_filter(XSMALL, 1).is_zero()
        for s in range(d + 1, f.truncation):
            assert w[s].is_zero()


def test_prepared_arc_coordinates_match_the_hand_computation():
    b = quadric_basis()
    verdict = comparison_check(b, relation_lattice(b), (1, 1), 2)
    assert verdict.passed
    assert verdict.prepared[(1, 0)] == X(1, 0) * F(1, 1).unit_reciprocal()
    assert verdict.prepared[(2, 0)] == X(2, 0) * F(2, 1).unit_reciprocal()
    leading = F(2, 1) ** 2 * F(1, 1).unit_reciprocal()
    assert verdict.prepared[(3, 0)] == X(3, 0) * leading.unit_reciprocal()


def test_comparison_passes_at_order_one():
    b = quadric_basis()
    verdict = comparison_check(b, relation_lattice(b), (1, 1), 1)
    assert verdict.passed


def test_comparison_passes_at_order_two_deeper_point():
    b = quadric_basis()
    verdict = comparison_check(b, relation_lattice(b), (2, 2), 2)
    assert verdict.passed


def test_comparison_trivial_cases():
    b = quadric_basis()
    zero = comparison_check(b, relation_lattice(b), (0, 0), 2)
    assert zero.passed
    assert "nothing to compare" in zero.detail
    s = smooth_basis()
    smooth = comparison_check(s, relation_lattice(s), (2, 3), 2)
    assert smooth.passed


def test_comparison_rejects_bad_order():
    b = quadric_basis()
    with pytest.raises(ValueError):
        comparison_check(b, relation_lattice(b), (1, 1), 0)
