from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from serrehom import exact_linalg as el
from serrehom.errors import NotSublattice, RankMismatch

ints = st.integers(-20, 20)


def matrices(max_r=4, max_c=4):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(ints, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_hnf_small():
    assert el.hnf([[0, 1], [1, 0]])[0] == [[1, 0], [0, 1]]
    assert el.hnf([[2, 4]])[0] == [[2, 4]]


def test_snf_examples():
    assert el.invariant_factors([[2, 0], [0, 3]]) == [1, 6]
    assert el.invariant_factors([[0, 0], [0, 0]]) == [0, 0]
    m = [[2, 4, 4], [-6, 6, 12], [10, -4, -16], [0, 0, 0]]
    f, u, v = el.snf(m)
    assert el.matmul(el.matmul(u, m), v)[:3] == [[f[0], 0, 0], [0, f[1], 0], [0, 0, f[2]]]


@given(matrices())
def test_hnf_transform(m):
    h, u = el.hnf(m)
    assert el.matmul(u, m) == h
    assert abs(el.det(u)) == 1
    pivots = []
    for row in h:
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            assert row[nz[0]] > 0
            pivots.append(nz[0])
    assert pivots == sorted(pivots) and len(set(pivots)) == len(pivots)


@given(matrices())
def test_snf_transform_and_divisibility(m):
    f, u, v = el.snf(m)
    d = el.matmul(el.matmul(u, m), v)
    r, c = len(m), len(m[0])
    for i in range(r):
        for j in range(c):
            assert d[i][j] == (f[i] if i == j else 0)
    nz = [x for x in f if x]
    assert all(x > 0 for x in nz)
    assert all(nz[k + 1] % nz[k] == 0 for k in range(len(nz) - 1))
    assert abs(el.det(u)) == 1 and abs(el.det(v)) == 1


@given(matrices())
def test_kernel_saturated(m):
    k = el.kernel_saturated(m)
    for v in k.basis:
        assert not any(el.vecmat(v, m))
    assert k.rank == len(m) - el.rank(m)
    # saturation: the quotient Z^r / K is torsion free
    if k.basis:
        assert set(el.invariant_factors(list(k.basis))) <= {0, 1}


def test_kernel_examples():
    assert el.kernel_saturated([[2], [-4]]).basis == ((2, 1),)
    assert el.kernel_saturated([[1], [-1]]).basis == ((1, 1),)


def test_lattice_index_and_errors():
    a = el.ZLattice.from_generators([[1, 2], [0, 5]])
    z = el.ZLattice.from_generators(el.identity(2))
    assert el.lattice_index(a, z) == 5
    with pytest.raises(NotSublattice):
        el.lattice_index(z, a)
    with pytest.raises(RankMismatch):
        el.lattice_index(el.ZLattice.from_generators([[1, 0]]), z)


@given(matrices(3, 3), matrices(3, 3))
def test_lattice_canonical_and_intersection(a, b):
    if len(a[0]) != len(b[0]):
        return
    la = el.ZLattice.from_generators(a)
    assert el.ZLattice.from_generators(list(reversed(a))) == la
    lb = el.ZLattice.from_generators(b)
    meet = la.intersection(lb)
    assert la.contains_lattice(meet) and lb.contains_lattice(meet)


def test_rational_lattice_and_solve():
    lat = el.ZLattice.from_generators([[Fraction(1, 2), 0], [0, 3]])
    assert [Fraction(1, 2), 3] in lat and [Fraction(1, 4), 0] not in lat
    assert el.solve_left([[1, 0], [2, 0]], [[0, 1]]) is None
    assert el.inverse([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]


def test_json_roundtrip():
    m = [[Fraction(1, 3), -2], [0, 7]]
    assert el.matrix_from_json(el.matrix_to_json(m)) == m
