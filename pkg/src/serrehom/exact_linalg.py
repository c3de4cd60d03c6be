"""Exact integer and rational linear algebra.

Matrices are plain nested sequences (rows) of Python ``int`` or
``fractions.Fraction``; every function returns fresh lists of lists and never
mutates its arguments.  Row-vector conventions are used throughout: a matrix
``m`` acts on row vectors ``v`` by ``v @ m``, so lattices are row spans.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Optional, Sequence

from .errors import Cancelled, NotSublattice, RankMismatch

Matrix = list  # list[list[int | Fraction]]


# ----------------------------------------------------------------------------
# small helpers

def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def copy(m: Sequence[Sequence]) -> Matrix:
    return [list(row) for row in m]


def shape(m: Sequence[Sequence], cols: Optional[int] = None) -> tuple[int, int]:
    r = len(m)
    c = len(m[0]) if r else (cols or 0)
    for row in m:
        if len(row) != c:
            raise ValueError("ragged matrix")
    return r, c


def transpose(m: Sequence[Sequence], cols: Optional[int] = None) -> Matrix:
    r, c = shape(m, cols)
    return [[m[i][j] for i in range(r)] for j in range(c)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], inner: Optional[int] = None) -> Matrix:
    """Product ``a @ b``; ``inner`` resolves the shape of empty operands."""
    n = len(b) if b else (inner or 0)
    if a and len(a[0]) != n:
        raise ValueError(f"inner dimensions differ: {len(a[0])} vs {n}")
    bc = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * bc
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(bc):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def vecmat(v: Sequence, m: Sequence[Sequence]) -> list:
    return matmul([list(v)], m, inner=len(v))[0]


def hstack(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if len(a) != len(b):
        raise ValueError("row counts differ")
    return [list(x) + list(y) for x, y in zip(a, b)]


def block_diag(*blocks: Sequence[Sequence]) -> Matrix:
    rows = sum(len(b) for b in blocks)
    cols = sum(len(b[0]) if b else 0 for b in blocks)
    out = zeros(rows, cols)
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[r0 + i][c0 + j] = x
        r0 += len(b)
        c0 += len(b[0]) if b else 0
    return out


def is_integral(m: Sequence[Sequence]) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)


def to_int(m: Sequence[Sequence]) -> Matrix:
    if not is_integral(m):
        raise ValueError("matrix has non-integral entries")
    return [[int(x) for x in row] for row in m]


def common_denominator(m: Sequence[Sequence]) -> int:
    return reduce(math.lcm, (Fraction(x).denominator for row in m for x in row), 1)


def _check(hook):
    if hook is not None and hook() is False:
        raise Cancelled("cancelled by hook")


# ----------------------------------------------------------------------------
# normal forms

def hnf(m: Sequence[Sequence[int]], *, cols: Optional[int] = None, hook: Optional[Callable] = None):
    """Row-style Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u @ m == h``.  Nonzero rows
    of ``h`` come first; pivots are positive and entries above a pivot lie in
    ``[0, pivot)``.
    """
    h = to_int(m)
    r, c = shape(h, cols)
    u = identity(r)
    row = 0
    for col in range(c):
        if row >= r:
            break
        while True:
            _check(hook)
            nz = [i for i in range(row, r) if h[i][col]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(h[i][col]))
            h[row], h[p] = h[p], h[row]
            u[row], u[p] = u[p], u[row]
            piv = h[row][col]
            clean = True
            for i in range(row + 1, r):
                if h[i][col]:
                    q = h[i][col] // piv
                    h[i] = [a - q * b for a, b in zip(h[i], h[row])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[row])]
                    if h[i][col]:
                        clean = False
            if clean:
                break
        if not h[row][col]:
            continue
        if h[row][col] < 0:
            h[row] = [-a for a in h[row]]
            u[row] = [-a for a in u[row]]
        piv = h[row][col]
        for i in range(row):
            q = h[i][col] // piv
            if q:
                h[i] = [a - q * b for a, b in zip(h[i], h[row])]
                u[i] = [a - q * b for a, b in zip(u[i], u[row])]
        row += 1
    return h, u


def snf(m: Sequence[Sequence[int]], *, cols: Optional[int] = None, hook: Optional[Callable] = None):
    """Smith normal form ``u @ m @ v = diag(d_1, ..., d_k)`` with ``d_i | d_{i+1}``.

    Returns ``(factors, u, v)``; ``factors`` has length ``min(rows, cols)``
    with zeros trailing.  Pivots are chosen as the smallest absolute nonzero
    entry of the active block.
    """
    a = to_int(m)
    r, c = shape(a, cols)
    u = identity(r)
    v = identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    n = min(r, c)
    for t in range(n):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            _check(hook)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, a[i][t] // piv)
                    dirty = dirty or bool(a[i][t])
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, a[t][j] // piv)
                    dirty = dirty or bool(a[t][j])
            if dirty:
                # move the smallest leftover of row/column t into the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, r) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, c) if a[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    factors = [a[i][i] for i in range(n)]
    return factors, u, v


def invariant_factors(m: Sequence[Sequence[int]], *, cols: Optional[int] = None) -> list[int]:
    return snf(m, cols=cols)[0]


def torsion_factors(m: Sequence[Sequence[int]], *, cols: Optional[int] = None) -> list[int]:
    """Nontrivial torsion invariants of the cokernel ``Z^cols / rowspan(m)``."""
    return [d for d in invariant_factors(m, cols=cols) if d > 1]


# ----------------------------------------------------------------------------
# generic field elimination (Fraction, or any exact field element type)

def rref(m: Sequence[Sequence], *, cols: Optional[int] = None):
    """Reduced row echelon form over a field.  Returns ``(rows, pivots)``."""
    a = copy(m)
    r, c = shape(a, cols)
    pivots = []
    row = 0
    for col in range(c):
        p = next((i for i in range(row, r) if a[i][col] != 0), None)
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        piv_val = a[row][col]
        inv = Fraction(1, piv_val) if isinstance(piv_val, int) else 1 / piv_val
        a[row] = [x * inv for x in a[row]]
        for i in range(r):
            if i != row and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
        if row == r:
            break
    return a, pivots


def rank(m: Sequence[Sequence], *, cols: Optional[int] = None) -> int:
    if not m:
        return 0
    return len(rref(m, cols=cols)[1])


def nullspace(m: Sequence[Sequence], *, cols: Optional[int] = None) -> Matrix:
    """Basis (as rows) of ``{x : m @ x = 0}`` over the field of the entries."""
    r, c = shape(m, cols)
    if r == 0:
        return identity(c)
    red, piv = rref(m, cols=c)
    free = [j for j in range(c) if j not in piv]
    out = []
    for fcol in free:
        x = [0] * c
        x[fcol] = 1
        for i, pc in enumerate(piv):
            x[pc] = -red[i][fcol]
        out.append(x)
    return out


def left_nullspace(m: Sequence[Sequence], *, cols: Optional[int] = None) -> Matrix:
    """Basis of ``{v : v @ m = 0}``."""
    r, c = shape(m, cols)
    if c == 0:
        return identity(r)
    return nullspace(transpose(m), cols=r)


def solve_left(a: Sequence[Sequence], b: Sequence[Sequence], *, cols: Optional[int] = None):
    """Solve ``x @ a = b`` row by row.  Returns ``None`` when inconsistent.

    When ``a`` has dependent rows a particular solution is returned.
    """
    r, c = shape(a, cols)
    at = transpose(a, c)  # c x r
    out = []
    for row in b:
        aug = [list(at[j]) + [row[j]] for j in range(c)]
        red, piv = rref(aug, cols=r + 1)
        if r in piv:
            return None
        x = [0] * r
        for i, pc in enumerate(piv):
            x[pc] = red[i][r]
        out.append(x)
    return out


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    red, piv = rref(hstack(m, identity(n)), cols=2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red[:n]]


def det(m: Sequence[Sequence]):
    """Determinant; Bareiss for integers, elimination otherwise."""
    n = len(m)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in m for x in row):
        a = copy(m)
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                sw = next((i for i in range(k + 1, n) if a[i][k]), None)
                if sw is None:
                    return 0
                a[k], a[sw] = a[sw], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]
    a = copy(m)
    d = 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return 0 * d
        if p != k:
            a[k], a[p] = a[p], a[k]
            d = -d
        d = d * a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return d


# ----------------------------------------------------------------------------
# lattices

@dataclass(frozen=True)
class ZLattice:
    """Lattice spanned by the rows of ``basis`` inside ``Q^ambient_rank``.

    The basis is canonical: the HNF of the integer matrix obtained by clearing
    denominators, divided back.  Two lattices are equal iff their fields are.
    """
    ambient_rank: int
    basis: tuple

    @classmethod
    def from_generators(cls, gens: Sequence[Sequence], ambient_rank: Optional[int] = None) -> "ZLattice":
        gens = [list(g) for g in gens]
        if ambient_rank is None:
            if not gens:
                raise ValueError("ambient_rank required for an empty generator list")
            ambient_rank = len(gens[0])
        if not gens:
            return cls(ambient_rank, ())
        den = common_denominator(gens)
        ints = [[int(Fraction(x) * den) for x in g] for g in gens]
        h, _ = hnf(ints, cols=ambient_rank)
        rows = []
        for row in h:
            if any(row):
                rows.append(tuple(Fraction(x, den) if den != 1 else x for x in row))
        return cls(ambient_rank, tuple(rows))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_integral(self) -> bool:
        return is_integral(self.basis)

    def __contains__(self, vec) -> bool:
        if all(x == 0 for x in vec):
            return True
        if not self.basis:
            return False
        sol = solve_left(self.basis, [list(vec)], cols=self.ambient_rank)
        return sol is not None and all(x.denominator == 1 for x in sol[0])

    def contains_lattice(self, other: "ZLattice") -> bool:
        return all(v in self for v in other.basis)

    def coordinates(self, vecs: Sequence[Sequence]) -> Matrix:
        """Coordinates of ``vecs`` (which must lie in the rational span) in this basis."""
        sol = solve_left(self.basis, vecs, cols=self.ambient_rank) if vecs else []
        if sol is None:
            raise NotSublattice("vectors outside the rational span")
        return sol

    def __add__(self, other: "ZLattice") -> "ZLattice":
        return ZLattice.from_generators(list(self.basis) + list(other.basis), self.ambient_rank)

    def intersection(self, other: "ZLattice") -> "ZLattice":
        return lattice_intersection(self, other)

    def scale(self, c) -> "ZLattice":
        return ZLattice.from_generators([[c * x for x in row] for row in self.basis], self.ambient_rank)

    def to_json(self) -> dict:
        return {"ambient_rank": self.ambient_rank, "basis": matrix_to_json(self.basis)}


def kernel_saturated(m: Sequence[Sequence], *, rows: Optional[int] = None, cols: Optional[int] = None) -> ZLattice:
    """All integer row vectors ``v`` with ``v @ m == 0`` (a saturated lattice)."""
    r = len(m) if m else (rows or 0)
    if r == 0:
        return ZLattice(0, ())
    c = len(m[0]) if m else (cols or 0)
    if c == 0:
        return ZLattice.from_generators(identity(r), r)
    # scale each column to integers; the kernel is unchanged
    cols_t = transpose(m, c)
    ints = []
    for col in cols_t:
        den = reduce(math.lcm, (Fraction(x).denominator for x in col), 1)
        ints.append([int(Fraction(x) * den) for x in col])
    mint = transpose(ints, r)
    h, u = hnf(mint, cols=c)
    kern = [u[i] for i in range(r) if not any(h[i])]
    return ZLattice.from_generators(kern, r)


def lattice_intersection(a: ZLattice, b: ZLattice) -> ZLattice:
    if a.ambient_rank != b.ambient_rank:
        raise RankMismatch("different ambient spaces")
    n = a.ambient_rank
    if not a.basis or not b.basis:
        return ZLattice(n, ())
    stacked = [list(x) for x in a.basis] + [[-y for y in x] for x in b.basis]
    ker = kernel_saturated(stacked, cols=n)
    ka = [list(row[:a.rank]) for row in ker.basis]
    return ZLattice.from_generators(matmul(ka, a.basis), n) if ka else ZLattice(n, ())


def lattice_index(sub: ZLattice, sup: ZLattice) -> int:
    """``[sup : sub]`` for lattices of equal rank in a common ambient space."""
    if sub.ambient_rank != sup.ambient_rank or sub.rank != sup.rank:
        raise RankMismatch(f"ranks differ: {sub.rank} vs {sup.rank}")
    if sub.rank == 0:
        return 1
    coords = solve_left(sup.basis, sub.basis, cols=sup.ambient_rank)
    if coords is None or not is_integral(coords):
        raise NotSublattice("sub is not contained in sup")
    d = abs(det(to_int(coords)))
    if d == 0:
        raise RankMismatch("sub is not of full rank in sup")
    return d


# ----------------------------------------------------------------------------
# serialization

def matrix_to_json(m: Sequence[Sequence]) -> list:
    return [[str(x) for x in row] for row in m]


def matrix_from_json(data) -> Matrix:
    out = []
    for row in data:
        r = []
        for s in row:
            f = Fraction(s)
            r.append(int(f) if f.denominator == 1 else f)
        out.append(r)
    return out


def dumps_matrix(m: Sequence[Sequence]) -> str:
    return json.dumps(matrix_to_json(m))
