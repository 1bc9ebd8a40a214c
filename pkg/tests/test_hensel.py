import dataclasses

import pytest

from arcmodel.errors import DepthExhausted, HypothesisViolation, OutOfWindow
from arcmodel.hensel import (
    build_system,
    coordinate_image,
    lift,
    lift_window,
    solve_mod_m,
    verify_hypotheses,
)
from arcmodel.lattice import select_z_basis
from arcmodel.poly import SparsePoly, VarId
from arcmodel.relations import relation_lattice


def quadric_basis():
    return select_z_basis(((0, 1), (1, 0), (2, -1)), 2)


def smooth_basis():
    return select_z_basis(((0, 1), (1, 0)), 2)


def X(i, s):
    return SparsePoly.var(VarId.model(i, s))


def F(i, s):
    return SparsePoly.var(VarId.free(i, s))


INV = F(1, 1).unit_reciprocal()

# jets of the solved coordinate at valuation (1, 1), worked out by hand:
# first the residue-field values, then one Newton correction against the
# triangular linearization
JET_ONE_MOD_M = F(2, 1) ** 2 * INV
JET_TWO_MOD_M = 2 * F(2, 1) * F(2, 2) * INV - F(1, 2) * F(2, 1) ** 2 * INV ** 2
JET_ONE = (
    JET_ONE_MOD_M
    + X(1, 0) * F(1, 2) * F(2, 1) ** 2 * INV ** 3
    - 2 * X(1, 0) * F(2, 1) * F(2, 2) * INV ** 2
    - F(1, 2) * X(3, 0) * INV
    + 2 * X(2, 0) * F(2, 2) * INV
)
JET_TWO = (
    JET_TWO_MOD_M
    - 2 * X(1, 0) * F(1, 2) ** 2 * F(2, 1) ** 2 * INV ** 4
    + 4 * X(1, 0) * F(1, 2) * F(2, 1) * F(2, 2) * INV ** 3
    + X(1, 0) * F(1, 3) * F(2, 1) ** 2 * INV ** 3
    - X(1, 0) * F(2, 2) ** 2 * INV ** 2
    - 2 * X(1, 0) * F(2, 1) * F(2, 3) * INV ** 2
    + F(1, 2) ** 2 * X(3, 0) * INV ** 2
    - 2 * F(1, 2) * X(2, 0) * F(2, 2) * INV ** 2
    - F(1, 3) * X(3, 0) * INV
    + 2 * X(2, 0) * F(2, 3) * INV
)


def test_system_shape():
    b = quadric_basis()
    sys = build_system(b, relation_lattice(b), (1, 1), 3)
    assert sorted(sys.equations) == [(3, 0), (3, 1), (3, 2)]
    assert sys.conductors == {3: 2}
    assert sys.drops == {3: 1}
    assert str(sys.units[3]) == "Z[1][1]"


def test_golden_jets_order_one():
    b = quadric_basis()
    lr = lift_window(b, relation_lattice(b), (1, 1), 1, 2)
    assert lr.series[(3, 1)] == JET_ONE
    assert lr.series[(3, 2)] == JET_TWO


def test_residue_field_solution():
    b = quadric_basis()
    sys = build_system(b, relation_lattice(b), (1, 1), 4)
    values = solve_mod_m(sys)
    assert values[(3, 0)] == JET_ONE_MOD_M
    assert values[(3, 1)] == JET_TWO_MOD_M
    model_vars = frozenset(sys.point.x_vars)
    for val in values.values():
        assert not val.variables() & model_vars


def test_order_zero_lift_is_the_residue_solution():
    b = quadric_basis()
    sys = build_system(b, relation_lattice(b), (1, 1), 4)
    assert lift(sys, 0).values == solve_mod_m(sys)


def test_higher_order_refines_lower():
    b = quadric_basis()
    sys = build_system(b, relation_lattice(b), (1, 1), 8)
    one = lift(sys, 1)
    two = lift(sys, 2)
    x = frozenset(sys.point.x_vars)
    for key in two.values:
        if key[1] < min(one.window[3], two.window[3]):
            assert two.values[key].grade_filter(x, 2) == one.values[key]


def test_leading_jet_is_a_unit_at_the_point():
    b = quadric_basis()
    lr = lift_window(b, relation_lattice(b), (1, 1), 1, 1)
    x = frozenset(lr.system.point.x_vars)
    head = lr.series[(3, 1)].grade_filter(x, 1)
    assert len(head.terms) == 1


def test_lift_is_deterministic():
    b = quadric_basis()
    rl = relation_lattice(b)
    first = lift_window(b, rl, (2, 1), 1, 2)
    second = lift_window(b, rl, (2, 1), 1, 2)
    assert first.series == second.series


def test_smooth_cone_has_nothing_to_solve():
    b = smooth_basis()
    rl = relation_lattice(b)
    sys = build_system(b, rl, (2, 3), 3)
    assert sys.equations == {}
    assert lift(sys, 2).series == {}
    assert lift_window(b, rl, (2, 3), 2, 4).series == {}


def test_depth_exhausted():
    b = quadric_basis()
    sys = build_system(b, relation_lattice(b), (1, 1), 1)
    with pytest.raises(DepthExhausted):
        lift(sys, 1)


def test_coordinate_image_routing():
    b = quadric_basis()
    lr = lift_window(b, relation_lattice(b), (1, 1), 1, 2)
    assert coordinate_image(lr, 1, 0) == X(1, 0)
    assert coordinate_image(lr, 3, 0) == X(3, 0)
    assert coordinate_image(lr, 1, 5) == F(1, 5)
    assert coordinate_image(lr, 2, 1) == F(2, 1)
    assert coordinate_image(lr, 3, 1) == JET_ONE
    with pytest.raises(OutOfWindow):
        coordinate_image(lr, 3, 99)


def _tampered(sys, key, extra):
    bad = dict(sys.equations)
    bad[key] = bad[key] + extra
    return dataclasses.replace(sys, equations=bad)


def test_verifier_names_the_broken_clause():
    b = quadric_basis()
    sys = build_system(b, relation_lattice(b), (1, 1), 3)
    y0 = SparsePoly.var(VarId.aux(3, 0))
    cases = [
        (y0 ** 2, "linearity"),
        (y0, "A1"),
        (SparsePoly.var(VarId.aux(3, 2)), "A2"),
        (SparsePoly.var(VarId.aux(4, 0)), "separation"),
        (SparsePoly.const(1), "C"),
    ]
    for extra, clause in cases:
        with pytest.raises(HypothesisViolation) as err:
            verify_hypotheses(_tampered(sys, (3, 0), extra))
        assert err.value.clause == clause
