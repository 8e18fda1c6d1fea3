"""Small exact linear algebra over the rationals.

Dense matrices are lists of lists of Fraction; vectors are lists of
Fraction.  Everything here is pure and allocation-happy: sizes in this
package stay well below 100, so clarity beats cleverness.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vec = list[Fraction]
Mat = list[list[Fraction]]

F0 = Fraction(0)
F1 = Fraction(1)


def frac_mat(rows: Sequence[Sequence]) -> Mat:
    return [[Fraction(x) for x in row] for row in rows]


def frac_vec(entries: Sequence) -> Vec:
    return [Fraction(x) for x in entries]


def zeros(n: int, m: int) -> Mat:
    return [[F0] * m for _ in range(n)]


def identity(n: int) -> Mat:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = F1
    return out


def mat_mul(a: Mat, b: Mat) -> Mat:
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            s = F0
            for t in range(k):
                if ai[t]:
                    s += ai[t] * b[t][j]
            out[i][j] = s
    return out


def mat_vec(a: Mat, v: Sequence[Fraction]) -> Vec:
    return [sum((row[j] * v[j] for j in range(len(v)) if v[j]), F0) for row in a]


def transpose(a: Mat) -> Mat:
    return [list(col) for col in zip(*a)]


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(u, v) if x and y), F0)


def rref(a: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form; returns (R, pivot column indices)."""
    m = [row[:] for row in a]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def solve(a: Mat, b: Sequence[Fraction]) -> Vec | None:
    """One solution of a x = b, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    aug = [row[:] + [bb] for row, bb in zip(a, b)]
    red, pivots = rref(aug)
    ncols = len(a[0])
    if ncols in pivots:
        return None
    x = [F0] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return x


def nullspace(a: Mat) -> list[Vec]:
    """Basis of the right kernel of a."""
    red, pivots = rref(a)
    ncols = len(a[0]) if a else 0
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F0] * ncols
        v[fc] = F1
        for r, c in enumerate(pivots):
            v[c] = -red[r][fc]
        basis.append(v)
    return basis


def invert(a: Mat) -> Mat:
    n = len(a)
    aug = [row[:] + ident_row for row, ident_row in zip(a, identity(n))]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def signature(gram: Mat) -> tuple[int, int, int]:
    """Inertia (n_plus, n_minus, n_zero) of a symmetric rational matrix.

    Symmetric congruence reduction (Sylvester's law of inertia), exact.
    """
    n = len(gram)
    m = [row[:] for row in gram]
    n_pos = n_neg = 0
    rows = list(range(n))
    while rows:
        piv = next((i for i in rows if m[i][i]), None)
        if piv is None:
            # all remaining diagonal entries vanish; look for an
            # off-diagonal entry and symmetrize, else the block is zero
            pair = None
            for i in rows:
                for j in rows:
                    if i != j and m[i][j]:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                break
            i, j = pair
            # row/col operation m_i += m_j makes the (i,i) entry 2*m[i][j]
            for c in range(n):
                m[i][c] += m[j][c]
            for r in range(n):
                m[r][i] += m[r][j]
            continue
        d = m[piv][piv]
        if d > 0:
            n_pos += 1
        else:
            n_neg += 1
        rows.remove(piv)
        for i in rows:
            if m[i][piv]:
                f = m[i][piv] / d
                for c in range(n):
                    m[i][c] -= f * m[piv][c]
                for r in range(n):
                    m[r][i] -= f * m[r][piv]
    return n_pos, n_neg, n - n_pos - n_neg


def is_negative_definite(gram: Mat) -> bool:
    n_pos, n_neg, n_zero = signature(gram)
    return n_pos == 0 and n_zero == 0 and n_neg == len(gram)


def mat_int_pow(a: list[list[int]], n: int) -> list[list[int]]:
    """Integer matrix power by repeated squaring (n >= 0)."""
    size = len(a)
    result = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    base = [row[:] for row in a]
    while n:
        if n & 1:
            result = [[sum(result[i][k] * base[k][j] for k in range(size))
                       for j in range(size)] for i in range(size)]
        base = [[sum(base[i][k] * base[k][j] for k in range(size))
                 for j in range(size)] for i in range(size)]
        n >>= 1
    return result
