import itertools
import random

import pytest

from arcmodel import lattice
from arcmodel.errors import (
    NoUnimodularSubset,
    NotFullDimensional,
    NotInCone,
    NotPointed,
    RankMismatch,
    ZeroVector,
)
from arcmodel.lattice import Cone, dual_cone, hilbert_basis, minimal_face_smooth, pair, select_z_basis


def quadric_cone():
    return Cone.from_rays([(1, 0), (1, 2)])


def cubic_cone():
    return Cone.from_rays([(1, 0), (1, 3)])


def test_pair_examples():
    assert pair((2, -1), (1, 1)) == 1
    assert pair((2, -1), (2, 2)) == 2
    with pytest.raises(RankMismatch):
        pair((1, 0), (1, 0, 0))


def test_cone_normalization():
    c = Cone.from_rays([(2, 4), (1, 0), (2, 0)])
    assert c.rays == ((1, 0), (1, 2))
    with pytest.raises(ZeroVector):
        Cone.from_rays([(0, 0), (1, 0)])
    with pytest.raises(NotPointed):
        Cone.from_rays([(1, 0), (-1, 0)])
    with pytest.raises(NotPointed):
        Cone.from_rays([(1, 0), (-1, 1), (0, -1)])


def test_dual_cone_examples():
    assert dual_cone(quadric_cone()).rays == ((0, 1), (2, -1))
    assert dual_cone(cubic_cone()).rays == ((0, 1), (3, -1))
    quadrant = Cone.from_rays([(1, 0), (0, 1)])
    assert dual_cone(quadrant).rays == ((0, 1), (1, 0))


def test_dual_cone_rejects_lower_dimensional():
    ray = Cone.from_rays([(1, 2)])
    with pytest.raises(NotFullDimensional):
        dual_cone(ray)


def test_dual_cone_involutive():
    rng = random.Random(23)
    seen = 0
    while seen < 40:
        rays = [(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(rng.randint(2, 4))]
        try:
            c = Cone.from_rays(rays)
        except (ZeroVector, NotPointed):
            continue
        if not c.full_dimensional:
            continue
        assert dual_cone(dual_cone(c)) == c
        seen += 1


def test_hilbert_basis_examples():
    assert hilbert_basis(dual_cone(quadric_cone())) == [(0, 1), (1, 0), (2, -1)]
    # brute-force oracle value for the degree-3 cone (hypersurface z1*z3 = z2^3)
    assert hilbert_basis(dual_cone(cubic_cone())) == [(0, 1), (1, 0), (3, -1)]
    quadrant = Cone.from_rays([(1, 0), (0, 1)])
    assert hilbert_basis(quadrant) == [(0, 1), (1, 0)]


def test_hilbert_basis_elements_indecomposable():
    c = dual_cone(quadric_cone())
    basis = hilbert_basis(c)
    # no element is the sum of two nonzero semigroup elements drawn from the basis span
    for h in basis:
        for a in basis:
            rest = tuple(x - y for x, y in zip(h, a))
            if any(rest):
                assert not (c.contains(rest) and rest != h)


def oracle_hilbert(c):
    """Independent enumeration: bound dual-ray pairings by their sum over rays."""
    ineqs = lattice._dual_ray_candidates(c.rays, c.rank)
    bounds = [sum(pair(u, r) for r in c.rays) for u in ineqs]
    pts = []
    lo = [sum(min(0, r[j]) for r in c.rays) for j in range(c.rank)]
    hi = [sum(max(0, r[j]) for r in c.rays) for j in range(c.rank)]
    for p in itertools.product(*(range(lo[j], hi[j] + 1) for j in range(c.rank))):
        if not any(p):
            continue
        prs = [pair(u, p) for u in ineqs]
        if all(x >= 0 for x in prs) and all(x <= b for x, b in zip(prs, bounds)):
            pts.append(p)
    out = []
    for h in pts:
        dec = False
        for a in pts:
            rest = tuple(x - y for x, y in zip(h, a))
            if any(rest) and all(pair(u, rest) >= 0 for u in ineqs):
                dec = True
                break
        if not dec:
            out.append(h)
    return sorted(out)


def test_hilbert_basis_rank3_against_oracle():
    cones = [
        [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        [(1, 0, 0), (0, 1, 0), (1, 1, 2)],
        [(1, 0, 0), (1, 2, 0), (1, 0, 2)],
        [(1, 0, 0), (0, 1, 0), (1, 1, 3)],
    ]
    for rays in cones:
        c = Cone.from_rays(rays)
        assert hilbert_basis(c) == oracle_hilbert(c)


def test_select_z_basis_examples():
    b = select_z_basis([(0, 1), (1, 0), (2, -1)], 2)
    assert b.generators == ((0, 1), (1, 0), (2, -1))
    assert b.zbasis_indices == (0, 1)
    b2 = select_z_basis([(0, 1), (1, 0), (2, -1), (3, -1)], 2)
    assert b2.zbasis_indices == (0, 1)
    with pytest.raises(NoUnimodularSubset):
        select_z_basis([(2, 0), (0, 2), (2, 2)], 2)


def test_select_z_basis_reorders():
    b = select_z_basis([(2, 0), (0, 1), (1, 0)], 2)
    # |det (2,0),(0,1)| = 2, |det (2,0),(1,0)| = 0, |det (0,1),(1,0)| = 1 -> indices (1, 2)
    assert b.zbasis_indices == (1, 2)
    assert b.generators == ((0, 1), (1, 0), (2, 0))


def test_minimal_face_smooth_examples():
    c = quadric_cone()
    assert minimal_face_smooth(c, (1, 1)) is False  # interior: face is the whole singular cone
    assert minimal_face_smooth(c, (1, 0)) is True  # boundary ray extends to a Z-basis
    assert minimal_face_smooth(c, (0, 0)) is True
    quadrant = Cone.from_rays([(1, 0), (0, 1)])
    assert minimal_face_smooth(quadrant, (2, 3)) is True
    with pytest.raises(NotInCone):
        minimal_face_smooth(c, (-1, 0))


def test_contains():
    c = quadric_cone()
    assert c.contains((1, 1))
    assert c.contains((2, 0))
    assert not c.contains((0, 1))
    assert not c.contains((-1, 0))
