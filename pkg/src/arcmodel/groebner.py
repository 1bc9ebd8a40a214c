"""Buchberger Groebner bases over the rationals.

Serves as the independent oracle for ideal membership (with exact cofactor
certificates) and for Krull dimension via the staircase of leading terms.
Monomial order is graded reverse lexicographic over an explicit variable
universe; everything is deterministic for a fixed input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import LaurentInput
from .poly import Mono, SparsePoly, grevlex_key, mono_items, mono_pack


def _mono_div(num: Mono, den: Mono):
    """num / den as a monomial, or None when not divisible."""
    rest = dict(mono_items(num))
    for v, e in mono_items(den):
        have = rest.get(v, 0)
        if have < e:
            return None
        if have == e:
            del rest[v]
        else:
            rest[v] = have - e
    return mono_pack(rest.items())


def _mono_lcm(a: Mono, b: Mono) -> Mono:
    acc = dict(mono_items(a))
    for v, e in mono_items(b):
        acc[v] = max(acc.get(v, 0), e)
    return mono_pack(acc.items())


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return (a[0] + b[0], a[1] + b[1])


def _leading(p: SparsePoly, key):
    m = max(p.terms, key=key)
    return m, p.terms[m]


def _monic(p: SparsePoly, key) -> SparsePoly:
    _, c = _leading(p, key)
    return p * (Fraction(1) / c)


def _reduce_full(p: SparsePoly, gens, key):
    """Full normal form of p against gens, with cofactors.

    Returns (nf, cofactors) satisfying p == nf + sum(cofactors[i] * gens[i])
    and no term of nf divisible by any leading term of gens.
    """
    cof = [SparsePoly.zero() for _ in gens]
    lts = [_leading(g, key) for g in gens]
    nf = SparsePoly.zero()
    work = p
    while work.terms:
        wm = max(work.terms, key=key)
        wc = work.terms[wm]
        for i, (gm, gc) in enumerate(lts):
            q = _mono_div(wm, gm)
            if q is not None:
                mult = SparsePoly({q: Fraction(wc) / gc})
                work = work - mult * gens[i]
                cof[i] = cof[i] + mult
                break
        else:
            t = SparsePoly({wm: wc})
            nf = nf + t
            work = work - t
    return nf, cof


@dataclass(frozen=True)
class GBasis:
    generators: tuple
    variables: tuple


def buchberger(gens, variables=None) -> GBasis:
    """Reduced Groebner basis of the ideal generated by gens.

    Args:
        gens: SparsePoly generators, no negative exponents.
        variables: optional explicit universe (needed e.g. to give the zero
            ideal in k variables its k-dimensional staircase); defaults to
            the variables appearing in gens.

    Raises:
        LaurentInput: if a generator has a negative exponent.
        ValueError: if a generator uses a variable outside the universe.
    """
    polys = []
    seen = set()
    for g in gens:
        for m in g.terms:
            if m[1] and any(e < 0 for _, e in mono_items((0, m[1]))):
                raise LaurentInput(
                    "clear denominators before requesting a Groebner basis"
                )
        if g.terms:
            polys.append(g)
            seen |= g.variables()
    if variables is None:
        universe = tuple(sorted(seen))
    else:
        universe = tuple(sorted(variables))
        if not seen <= set(universe):
            raise ValueError("generator uses a variable outside the declared universe")
    key = grevlex_key(universe)

    G = []
    for p in polys:
        p = _monic(p, key)
        if all(p != q for q in G):
            G.append(p)

    # unordered index pairs still awaiting treatment
    pending = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}

    def lt(i):
        return _leading(G[i], key)[0]

    while pending:
        i, j = min(
            pending, key=lambda ij: (key(_mono_lcm(lt(ij[0]), lt(ij[1]))), ij)
        )
        pending.remove((i, j))
        lcm = _mono_lcm(lt(i), lt(j))
        # product criterion: coprime leading terms reduce to zero
        if lcm == _mono_mul(lt(i), lt(j)):
            continue
        # chain criterion: a third leading term dividing the lcm whose pairs
        # with i and j are both already handled makes this pair redundant
        skip = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            if _mono_div(lcm, lt(k)) is not None:
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik not in pending and pjk not in pending:
                    skip = True
                    break
        if skip:
            continue
        mi, ci = _leading(G[i], key)
        mj, cj = _leading(G[j], key)
        s = SparsePoly({_mono_div(lcm, mi): Fraction(1) / ci}) * G[i] - SparsePoly(
            {_mono_div(lcm, mj): Fraction(1) / cj}
        ) * G[j]
        nf, _ = _reduce_full(s, G, key)
        if nf.terms:
            G.append(_monic(nf, key))
            new = len(G) - 1
            pending |= {(t, new) for t in range(new)}

    # interreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        for i in range(len(G)):
            others = G[:i] + G[i + 1 :]
            if not others:
                continue
            nf, _ = _reduce_full(G[i], others, key)
            if nf != G[i]:
                changed = True
                if nf.terms:
                    G[i] = _monic(nf, key)
                else:
                    del G[i]
                break

    G.sort(key=lambda p: key(_leading(p, key)[0]), reverse=True)
    return GBasis(tuple(G), universe)


def normal_form(p: SparsePoly, g: GBasis):
    """Normal form of p plus cofactors against the basis generators.

    The cofactors certify p == nf + sum(cof[i] * g.generators[i]) exactly.
    """
    extended = sorted(set(g.variables) | p.variables())
    key = grevlex_key(extended)
    return _reduce_full(p, list(g.generators), key)


def member(p: SparsePoly, g: GBasis) -> bool:
    """Ideal membership: the normal form vanishes."""
    nf, _ = normal_form(p, g)
    return not nf.terms


def staircase_dimension(g: GBasis) -> int:
    """Krull dimension of the quotient by the staircase criterion.

    The dimension equals the largest size of a variable subset S meeting no
    leading-term support; -1 for the unit ideal (empty quotient).
    """
    key = grevlex_key(g.variables)
    supports = [
        frozenset(v for v, _ in mono_items(_leading(p, key)[0]))
        for p in g.generators
    ]
    for size in range(len(g.variables), -1, -1):
        for S in itertools.combinations(g.variables, size):
            sset = {v.code for v in S}
            if all(not sup <= sset for sup in supports):
                return size
    return -1
