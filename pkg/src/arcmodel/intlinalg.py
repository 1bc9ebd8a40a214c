"""Exact integer linear algebra on numpy object arrays.

Arrays use dtype=object so entries stay Python ints (arbitrary precision);
nothing here ever touches floating point.
"""

from fractions import Fraction

import numpy as np


def exgcd(a: int, b: int):
    """Extended gcd.

    Returns:
        (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g.
    """
    if a == 0 and b == 0:
        return 0, 0, 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b != 0:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def as_int_matrix(rows) -> np.ndarray:
    """Copy an iterable of int rows into a 2-d object array."""
    mat = np.array([[int(x) for x in row] for row in rows], dtype=object)
    if mat.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return mat


def smith_normal_form(mat: np.ndarray):
    """Diagonalize an integer matrix by unimodular row/column operations.

    Args:
        mat: (n, m) object array of ints.

    Returns:
        (s, d, t): object arrays with s @ mat @ t == d, d diagonal
        (not necessarily with divisibility ordering; diagonal entries are
        the pivots produced by gcd elimination, which is enough for the
        rank/unimodularity questions asked here), det(s), det(t) = +-1.
    """
    a = mat.copy()
    n, m = a.shape
    s = np.eye(n, dtype=object)
    t = np.eye(m, dtype=object)
    k = 0
    while k < min(n, m):
        # find a pivot
        pivot = None
        for i in range(k, n):
            for j in range(k, m):
                if a[i, j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        if i != k:
            a[[k, i]] = a[[i, k]]
            s[[k, i]] = s[[i, k]]
        if j != k:
            a[:, [k, j]] = a[:, [j, k]]
            t[:, [k, j]] = t[:, [j, k]]
        stable = False
        while not stable:
            stable = True
            for i in range(k + 1, n):
                if a[i, k] != 0:
                    if a[i, k] % a[k, k] == 0:
                        f = a[i, k] // a[k, k]
                        a[i] = a[i] - f * a[k]
                        s[i] = s[i] - f * s[k]
                    else:
                        g, x, y = exgcd(a[k, k], a[i, k])
                        p, q = a[k, k] // g, a[i, k] // g
                        rk, ri = a[k].copy(), a[i].copy()
                        a[k], a[i] = x * rk + y * ri, -q * rk + p * ri
                        rk, ri = s[k].copy(), s[i].copy()
                        s[k], s[i] = x * rk + y * ri, -q * rk + p * ri
                        stable = False
            for j in range(k + 1, m):
                if a[k, j] != 0:
                    if a[k, j] % a[k, k] == 0:
                        f = a[k, j] // a[k, k]
                        a[:, j] = a[:, j] - f * a[:, k]
                        t[:, j] = t[:, j] - f * t[:, k]
                    else:
                        g, x, y = exgcd(a[k, k], a[k, j])
                        p, q = a[k, k] // g, a[k, j] // g
                        ck, cj = a[:, k].copy(), a[:, j].copy()
                        a[:, k], a[:, j] = x * ck + y * cj, -q * ck + p * cj
                        ck, cj = t[:, k].copy(), t[:, j].copy()
                        t[:, k], t[:, j] = x * ck + y * cj, -q * ck + p * cj
                        stable = False
        k += 1
    assert np.array_equal(s @ mat @ t, a)
    return s, a, t


def elementary_divisors(mat: np.ndarray) -> list:
    """Nonzero diagonal entries of the Smith-type form, up to sign."""
    _, d, _ = smith_normal_form(mat)
    out = [abs(d[i, i]) for i in range(min(d.shape)) if d[i, i] != 0]
    return out


def integer_kernel(mat: np.ndarray) -> list:
    """Z-basis of the right kernel {x : mat @ x == 0}.

    Returns:
        List of int tuples spanning the kernel lattice (saturated).
    """
    n, m = mat.shape
    _, d, t = smith_normal_form(mat)
    r = sum(1 for i in range(min(n, m)) if d[i, i] != 0)
    basis = []
    for j in range(r, m):
        col = tuple(int(t[i, j]) for i in range(m))
        assert all(int(sum(mat[i, k] * col[k] for k in range(m))) == 0 for i in range(n))
        basis.append(col)
    return basis


def rank(mat: np.ndarray) -> int:
    _, d, _ = smith_normal_form(mat)
    return sum(1 for i in range(min(d.shape)) if d[i, i] != 0)


def det(mat: np.ndarray) -> int:
    """Determinant of a square int matrix by fraction-free elimination."""
    a = mat.copy()
    n, m = a.shape
    assert n == m
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k, k] == 0:
            for i in range(k + 1, n):
                if a[i, k] != 0:
                    a[[k, i]] = a[[i, k]]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) // prev
            a[i, k] = 0
        prev = a[k, k]
    return sign * int(a[n - 1, n - 1])


def solve_exact(mat: np.ndarray, rhs) -> list | None:
    """Solve mat @ x = rhs over the rationals.

    Returns:
        List of Fractions, or None if the system is inconsistent or the
        matrix is singular (square systems only).
    """
    n, m = mat.shape
    aug = [[Fraction(int(mat[i, j])) for j in range(m)] + [Fraction(int(rhs[i]))] for i in range(n)]
    row = 0
    pivots = []
    for col in range(m):
        piv = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    for r in range(row, n):
        if aug[r][m] != 0:
            return None
    if len(pivots) < m:
        return None
    x = [Fraction(0)] * m
    for r, col in enumerate(pivots):
        x[col] = aug[r][m]
    return x


def solve_unimodular(mat: np.ndarray, rhs) -> list:
    """Solve mat @ x = rhs when |det(mat)| = 1; result is integral."""
    sol = solve_exact(mat, rhs)
    assert sol is not None
    out = []
    for v in sol:
        assert v.denominator == 1
        out.append(int(v))
    return out
