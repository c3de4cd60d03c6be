"""Finitely presented left modules over twisted group rings.

A :class:`PresentedModule` is the cokernel of right multiplication by a
``m x n`` twisted matrix ``X``: ``R<G>^m -> R<G>^n -> M -> 0``.  Flattening
expands every ``R<G>`` coordinate into its Z-coordinates so that ranks,
torsion and Hom groups reduce to integer linear algebra.

Concrete modules (a lattice ``Z^k`` modulo a stable sublattice, with integer
matrices for the ring generator and for sigma) are :class:`FlatModel`
instances; :func:`from_flat` turns one into a presentation by mapping one free
generator onto each Z-basis vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

from . import exact_linalg as el
from .errors import NotSection, NotSurjective, RingMismatch, UnsupportedGroup
from .quad_orders import (FieldElement, FracIdeal, ImQuadField, QuadOrder,
                          purely_imaginary_generator)
from .twisted_ring import (C1, ZZ, IntegerRing, TwistedMatrix, TwistedRing,
                           TwistedRingElement, ring_rank)


# ----------------------------------------------------------------------------
# flat (Z-level) models

@dataclass(frozen=True, eq=False)
class FlatModel:
    """``Z^ngens / rowspan(relations)`` with optional ring and sigma actions.

    ``actions`` maps ``"w"`` (the ring generator ``f*omega``) and ``"s"``
    (sigma) to integer matrices acting on row vectors.  ``basis`` records, for
    Hom groups, the embedding of the generators into an ambient coordinate
    space.  ``labels`` optionally names each generator (e.g. a field element).
    """
    ngens: int
    relations: tuple
    ring: Optional[TwistedRing] = None
    actions: dict = field(default_factory=dict)
    basis: Optional[tuple] = None
    labels: Optional[tuple] = None

    @cached_property
    def invariant_factors(self) -> list[int]:
        if not self.relations:
            return []
        return el.invariant_factors(self.relations, cols=self.ngens)

    @cached_property
    def relation_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d)

    @property
    def free_rank(self) -> int:
        return self.ngens - self.relation_rank

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.invariant_factors if d > 1]

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> Optional[int]:
        return self.torsion_order if self.is_finite else None

    @cached_property
    def relation_lattice(self) -> el.ZLattice:
        return el.ZLattice.from_generators(self.relations, self.ngens) if self.relations else el.ZLattice(self.ngens, ())

    def action_of(self, x: TwistedRingElement) -> list:
        """Integer matrix of ``m -> x*m`` (row convention)."""
        ring = self.ring
        if ring is None or x.ring != ring:
            raise RingMismatch("element ring does not match module ring")
        n = self.ngens
        out = el.zeros(n, n)
        for g, r in enumerate(x.coeffs):
            if not r:
                continue
            mg = el.identity(n) if g == 0 else self.actions["s"]
            mr = _scalar_matrix(self, r)
            term = el.matmul(mg, mr, inner=n)
            out = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(out, term)]
        return out

    def descends(self) -> bool:
        """Action matrices preserve the relation lattice, and sigma squares to 1."""
        rel = self.relation_lattice
        for mat in self.actions.values():
            for row in self.relations:
                if el.vecmat(row, mat) not in rel:
                    return False
        if "s" in self.actions:
            s2 = el.matmul(self.actions["s"], self.actions["s"])
            ident = el.identity(self.ngens)
            for i in range(self.ngens):
                diff = [a - b for a, b in zip(s2[i], ident[i])]
                if diff not in rel:
                    return False
        return True

    def to_json(self) -> dict:
        return {"ngens": self.ngens, "relations": el.matrix_to_json(self.relations),
                "free_rank": self.free_rank, "torsion": [str(d) for d in self.torsion]}


def _scalar_matrix(flat: FlatModel, r) -> list:
    """Matrix of multiplication by a coefficient ``r`` of the ring."""
    n = flat.ngens
    coeff_ring = flat.ring.coeff_ring
    if isinstance(coeff_ring, IntegerRing):
        return [[r * x for x in row] for row in el.identity(n)]
    a, b = coeff_ring.coords(r)
    w = flat.actions["w"]
    return [[a * int(i == j) + b * w[i][j] for j in range(n)] for i in range(n)]


# ----------------------------------------------------------------------------
# presented modules

class PresentedModule:
    """Cokernel of ``v -> v @ X`` on row vectors over ``R<G>``."""

    def __init__(self, ring: TwistedRing, presentation: TwistedMatrix, *,
                 generator_labels: Optional[Sequence] = None, name: str = ""):
        if presentation.ring != ring:
            raise RingMismatch("presentation entries live in a different ring")
        self.ring = ring
        self.presentation = presentation
        self.generator_labels = tuple(generator_labels) if generator_labels is not None else None
        self.name = name

    @property
    def ngens(self) -> int:
        return self.presentation.ncols

    @property
    def nrels(self) -> int:
        return self.presentation.nrows

    def __repr__(self):
        return f"PresentedModule({self.name or '?'}, ring={self.ring.tag}, {self.nrels}x{self.ngens})"

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "ngens": self.ngens,
                "relations": self.presentation.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "PresentedModule":
        ring = TwistedRing.from_json(data["ring"])
        rows = [[TwistedRingElement.from_json(ring, x) for x in row] for row in data["relations"]]
        return cls(ring, TwistedMatrix(ring, rows, int(data["ngens"])))


def free_module(ring: TwistedRing, n: int = 1) -> PresentedModule:
    return PresentedModule(ring, TwistedMatrix.zeros(ring, 0, n), name=f"R<G>^{n}")


def zero_module(ring: TwistedRing, n: int = 1) -> PresentedModule:
    return PresentedModule(ring, TwistedMatrix.identity(ring, n), name="0")


def unit_module(ring: TwistedRing) -> PresentedModule:
    """``R`` itself with sigma acting on coefficients: ``R<G> / R<G>(sigma - 1)``."""
    if ring.group.order == 1:
        return free_module(ring, 1)
    rel = TwistedMatrix(ring, [[ring.sigma - ring.one]])
    return PresentedModule(ring, rel, generator_labels=(1,), name="R")


def _zvec(ring: TwistedRing, row: Sequence[TwistedRingElement]) -> list[int]:
    out = []
    for x in row:
        out.extend(x.zcoords())
    return out


def flatten(m: PresentedModule, *, hook: Optional[Callable] = None) -> FlatModel:
    """Z-presentation of the underlying abelian group with ring/sigma action matrices."""
    R = m.ring
    Q = R.zrank
    n = m.ngens
    zb = R.zbasis()
    rels = []
    for row in m.presentation.rows:
        for b in zb:
            rels.append(_zvec(R, [b * x for x in row]))
        if hook is not None:
            el._check(hook)
    actions = {}
    if isinstance(R.coeff_ring, QuadOrder):
        actions["w"] = el.block_diag(*[R.left_mult_matrix(R.scalar(R.coeff_ring.generator))] * n)
    if R.group.order == 2:
        actions["s"] = el.block_diag(*[R.left_mult_matrix(R.sigma)] * n)
    return FlatModel(n * Q, tuple(tuple(r) for r in rels), R, actions)


def from_flat(flat: FlatModel, ring: Optional[TwistedRing] = None, *, name: str = "") -> PresentedModule:
    """Presentation of a concrete module, one free generator per Z-basis vector."""
    R = ring or flat.ring
    k = flat.ngens
    zb = R.zbasis()
    psi = []  # row (i, b) = coords of b * e_i
    for i in range(k):
        e = [int(j == i) for j in range(k)]
        for b in zb:
            psi.append(el.vecmat(e, flat.action_of(_as_ring(flat, R, b))))
    nrows = len(psi)
    stacked = psi + [[-x for x in r] for r in flat.relations]
    ker = el.kernel_saturated(stacked, cols=k) if stacked else el.ZLattice(0, ())
    Q = R.zrank
    rows = []
    for v in ker.basis:
        vv = v[:nrows]
        if not any(vv):
            continue
        rows.append([R.from_zcoords(vv[i * Q:(i + 1) * Q]) for i in range(k)])
    pres = TwistedMatrix(R, rows, k)
    return PresentedModule(R, pres, generator_labels=flat.labels, name=name)


def _as_ring(flat: FlatModel, R: TwistedRing, x: TwistedRingElement) -> TwistedRingElement:
    if flat.ring != R:
        raise RingMismatch("flat model and target ring differ")
    return x


def rank_over_R(m: PresentedModule) -> int:
    """``dim_F (M tensor Q)``."""
    free = flatten(m).free_rank
    k = ring_rank(m.ring.coeff_ring)
    assert free % k == 0
    return free // k


def is_torsion_free_over_R(m: PresentedModule) -> bool:
    # R is a domain of characteristic 0: R-torsion-free iff Z-torsion-free
    return not flatten(m).torsion


def restrict(m: PresentedModule) -> PresentedModule:
    """The underlying R-module, generated by ``g*e_i`` (index ``i*|G| + g``)."""
    R = m.ring
    G = R.group
    Rr = R.restricted()
    n = m.ngens
    rows = []
    for row in m.presentation.rows:
        for h in G.elements:
            hx = [R.group_element(h) * x for x in row]
            coeffs = []
            for x in hx:
                coeffs.extend(x.coeffs)
            rows.append([Rr.scalar(c) for c in coeffs])
    labels = None
    if m.generator_labels is not None:
        labels = tuple((lab, g) for lab in m.generator_labels for g in G.elements)
    return PresentedModule(Rr, TwistedMatrix(Rr, rows, n * G.order), generator_labels=labels,
                           name=f"res({m.name})")


def induce(m: PresentedModule, group) -> PresentedModule:
    """``R<G> (x)_R M`` for a plain R-module ``M`` (trivial-group ring)."""
    if m.ring.group.order != 1:
        raise RingMismatch("induce expects a module over R (trivial group)")
    RG = TwistedRing(m.ring.coeff_ring, group)
    rows = [[RG.scalar(x.coeffs[0]) for x in row] for row in m.presentation.rows]
    return PresentedModule(RG, TwistedMatrix(RG, rows, m.ngens), name=f"ind({m.name})")


# ----------------------------------------------------------------------------
# concrete constructions

def ideal_flat(ring: TwistedRing, ideal: FracIdeal, sign: int = 1) -> FlatModel:
    """A fractional ideal as a module; sigma acts by ``sign * g`` with g the coefficient action.

    Under conjugation the ideal must be conjugation-stable.
    """
    order = ring.coeff_ring
    basis = ideal.basis
    actions = {}
    if isinstance(order, QuadOrder):
        actions["w"] = [ideal.coords(order.generator * b) for b in basis]
    elif not isinstance(order, IntegerRing):
        raise RingMismatch("ideal modules need an order or Z as coefficients")
    if ring.group.order == 2:
        act = (lambda x: x.conjugate()) if ring.group.action == "conj" else (lambda x: x)
        actions["s"] = [ideal.coords(act(b) * sign) for b in basis]
    return FlatModel(2, (), ring, actions, labels=tuple(basis))


def quotient_flat(ring: TwistedRing, big: FracIdeal, small: FracIdeal, sign: int = 1) -> FlatModel:
    top = ideal_flat(ring, big, sign)
    rels = tuple(tuple(big.coords(b)) for b in small.basis)
    return FlatModel(2, rels, ring, top.actions, labels=top.labels)


def ideal_module(ring: TwistedRing, ideal: FracIdeal, sign: int = 1, name: str = "") -> PresentedModule:
    return from_flat(ideal_flat(ring, ideal, sign), ring, name=name or "I")


def maximal_order_module(ring: TwistedRing) -> PresentedModule:
    """``O_F`` as an ``O<G>``-module (``O`` the coefficient order)."""
    o = ring.coeff_ring
    return ideal_module(ring, o.maximal_order().as_ideal(), name="O_F")


def order_module(ring: TwistedRing) -> PresentedModule:
    return ideal_module(ring, ring.coeff_ring.as_ideal(), name="O")


def conductor_quotient_module(ring: TwistedRing) -> PresentedModule:
    """``O_F / O``."""
    o = ring.coeff_ring
    flat = quotient_flat(ring, o.maximal_order().as_ideal(), o.as_ideal())
    return from_flat(flat, ring, name="O_F/O")


# ----------------------------------------------------------------------------
# module maps and subquotient helpers

class ModuleMap:
    """``e_i -> sum_j P[i][j] e_j`` from ``src`` to ``dst``."""

    def __init__(self, src: PresentedModule, dst: PresentedModule, matrix: TwistedMatrix):
        if src.ring != dst.ring or matrix.ring != src.ring:
            raise RingMismatch("module map across different rings")
        if (matrix.nrows, matrix.ncols) != (src.ngens, dst.ngens):
            raise ValueError("map matrix has the wrong shape")
        self.src, self.dst, self.matrix = src, dst, matrix

    @classmethod
    def from_integer_matrix(cls, src, dst, mat) -> "ModuleMap":
        R = src.ring
        rows = [[R.scalar(x) for x in row] for row in mat]
        return cls(src, dst, TwistedMatrix(R, rows, dst.ngens))

    def flat_matrix(self) -> list:
        """Integer matrix between the flattenings."""
        R = self.src.ring
        out = []
        for row in self.matrix.rows:
            for b in R.zbasis():
                out.append(_zvec(R, [b * x for x in row]))
        return out

    def then(self, other: "ModuleMap") -> "ModuleMap":
        """Composite ``other o self``."""
        return ModuleMap(self.src, other.dst, self.matrix @ other.matrix)

    def is_well_defined(self) -> bool:
        fd = flatten(self.dst).relation_lattice
        fm = self.flat_matrix()
        return all(el.vecmat(r, fm) in fd for r in flatten(self.src).relations)


def subquotient_kernel(mat: Sequence[Sequence[int]], src_rank: int, dst: FlatModel) -> el.ZLattice:
    """``{v in Z^src_rank : v @ mat in rowspan(dst.relations)}``."""
    rel = list(dst.relations)
    stacked = [list(r) for r in mat] + [[-x for x in r] for r in rel]
    if not stacked:
        return el.ZLattice.from_generators(el.identity(src_rank), src_rank) if src_rank else el.ZLattice(0, ())
    ker = el.kernel_saturated(stacked, cols=dst.ngens)
    vecs = [v[:src_rank] for v in ker.basis if any(v[:src_rank])]
    return el.ZLattice.from_generators(vecs, src_rank) if vecs else el.ZLattice(src_rank, ())


def is_exact_sequence(i: ModuleMap, p: ModuleMap) -> dict:
    """Checks ``0 -> A -i-> B -p-> C -> 0`` at the level of abelian groups."""
    fa, fb, fc = flatten(i.src), flatten(i.dst), flatten(p.dst)
    mi, mp = i.flat_matrix(), p.flat_matrix()
    ker_i = subquotient_kernel(mi, fa.ngens, fb)
    injective = ker_i == fa.relation_lattice
    im_p = el.ZLattice.from_generators(list(mp) + list(fc.relations), fc.ngens) if fc.ngens else el.ZLattice(0, ())
    surjective = im_p.rank == fc.ngens and (fc.ngens == 0 or el.lattice_index(
        im_p, el.ZLattice.from_generators(el.identity(fc.ngens))) == 1)
    ker_p = subquotient_kernel(mp, fb.ngens, fc)
    im_i = el.ZLattice.from_generators(list(mi) + list(fb.relations), fb.ngens)
    return {"well_defined": i.is_well_defined() and p.is_well_defined(),
            "injective": injective, "surjective": surjective, "middle": ker_p == im_i}


# ----------------------------------------------------------------------------
# Hom groups

def _as_target(n) -> FlatModel:
    return n if isinstance(n, FlatModel) else flatten(n)


def hom_matrix(m: PresentedModule, target: FlatModel) -> list:
    """Integer matrix of ``(y_i) -> (sum_i X[k][i] y_i)_k`` from ``N^n`` to ``N^m``."""
    X = m.presentation
    q = target.ngens
    n, mm = X.ncols, X.nrows
    big = el.zeros(n * q, mm * q)
    for k, row in enumerate(X.rows):
        for i, x in enumerate(row):
            if x.is_zero():
                continue
            a = target.action_of(x)
            for r in range(q):
                for c in range(q):
                    if a[r][c]:
                        big[i * q + r][k * q + c] = a[r][c]
    return big


def hom_module(m: PresentedModule, n, *, hook: Optional[Callable] = None) -> FlatModel:
    """``Hom_{R<G>}(m, n)`` as a subquotient of ``N^ngens(m)``.

    A homomorphism is the tuple of images of the generators of ``m``, each a
    vector in the flat coordinates of ``n``; ``basis`` of the result spans all
    such lifts and ``relations`` express ``Rel_N^ngens(m)`` in that basis.
    """
    target = _as_target(n)
    if target.ring != m.ring:
        raise RingMismatch(f"{m.ring.tag} vs {target.ring.tag if target.ring else None}")
    q, k, mm = target.ngens, m.ngens, m.nrels
    big = hom_matrix(m, target)
    rel_m = FlatModel(mm * q, tuple(tuple(r) for r in el.block_diag(*[list(target.relations)] * mm))
                      if target.relations and mm else ())
    if mm == 0:
        kern = el.ZLattice.from_generators(el.identity(k * q), k * q) if k * q else el.ZLattice(0, ())
    else:
        kern = subquotient_kernel(big, k * q, rel_m)
    rel_n = el.block_diag(*[list(target.relations)] * k) if target.relations and k else []
    rel_n = [r for r in rel_n if any(r)]
    if hook is not None:
        el._check(hook)
    coords = el.to_int(kern.coordinates(rel_n)) if rel_n else []
    return FlatModel(kern.rank, tuple(tuple(r) for r in coords), None, {}, basis=kern.basis)


class AdjunctionPair:
    """Explicit bijection between two Hom groups computed independently.

    ``forward`` and ``backward`` act on hom vectors (tuples of generator
    images in flat coordinates).
    """

    def __init__(self, left: FlatModel, right: FlatModel, forward: Callable, backward: Callable):
        self.left, self.right = left, right
        self.forward, self.backward = forward, backward

    def round_trips(self) -> bool:
        vecs = list(self.left.basis or ())
        return all(list(self.backward(self.forward(v))) == list(v) for v in vecs) and all(
            list(self.forward(self.backward(v))) == list(v) for v in (self.right.basis or ()))

    def is_bijection(self) -> bool:
        """Both kernel lattices and both relation lattices correspond exactly."""
        def span(fm):
            n = len(fm.basis[0]) if fm.basis else 0
            return el.ZLattice.from_generators(fm.basis, n) if fm.basis else None

        def rels(fm):
            if not fm.relations:
                return []
            return el.matmul(fm.relations, fm.basis)

        L, Rr = span(self.left), span(self.right)
        if (L is None) != (Rr is None):
            return False
        if L is None:
            return True
        mapped = el.ZLattice.from_generators([self.forward(v) for v in self.left.basis], Rr.ambient_rank)
        if mapped != Rr:
            return False
        lr = [self.forward(v) for v in rels(self.left)]
        rr = rels(self.right)
        a = el.ZLattice.from_generators(lr, Rr.ambient_rank) if lr else el.ZLattice(Rr.ambient_rank, ())
        b = el.ZLattice.from_generators(rr, Rr.ambient_rank) if rr else el.ZLattice(Rr.ambient_rank, ())
        return a == b

    def verify(self) -> bool:
        return self.round_trips() and self.is_bijection()


def adjunction_restriction(m: PresentedModule, n: PresentedModule) -> AdjunctionPair:
    """``Hom_{R<G>}(R<G> (x) m, n) = Hom_R(m, res n)``; phi <-> phi restricted to ``1 (x) m``.

    With the coordinate conventions of :func:`flatten` and :func:`restrict`
    the bijection is the identity on hom vectors.
    """
    if m.ring.group.order != 1 or m.ring.coeff_ring != n.ring.coeff_ring:
        raise RingMismatch("need an R-module and an R<G>-module over the same R")
    left = hom_module(induce(m, n.ring.group), n)
    right = hom_module(m, restrict(n))
    return AdjunctionPair(left, right, lambda v: list(v), lambda v: list(v))


def coinduce_flat(x: PresentedModule, group) -> FlatModel:
    """``Hom_R(R<G>, x)``: tuples ``(g_tau)`` with ``(r g)_tau = tau(r) g_tau`` and ``(sigma g)_tau = g_{tau sigma}``."""
    if x.ring.group.order != 1:
        raise RingMismatch("coinduction expects an R-module")
    fx = flatten(x)
    q = fx.ngens
    RG = TwistedRing(x.ring.coeff_ring, group)
    G = RG.group
    rels = el.block_diag(*[list(fx.relations)] * G.order) if fx.relations else []
    actions = {}
    if isinstance(RG.coeff_ring, QuadOrder):
        blocks = []
        for tau in G.elements:
            r = G.act(tau, RG.coeff_ring.generator)
            blocks.append(_scalar_matrix(fx, r))
        actions["w"] = el.block_diag(*blocks)
    if G.order == 2:
        s = el.zeros(G.order * q, G.order * q)
        for tau in G.elements:  # new block tau takes old block tau*sigma
            src = G.mul(tau, 1)
            for c in range(q):
                s[src * q + c][tau * q + c] = 1
        actions["s"] = s
    return FlatModel(G.order * q, tuple(tuple(r) for r in rels if any(r)), RG, actions)


def adjunction_coinduction(m: PresentedModule, x: PresentedModule) -> AdjunctionPair:
    """``Hom_R(res m, x) = Hom_{R<G>}(m, CoInd x)`` via ``phi(m)_tau = f(tau m)``.

    Generator ``(i, tau)`` of ``res m`` is ``tau e_i``; component ``tau`` of
    ``phi(e_i)`` is ``f(tau e_i)``, so the bijection is the identity on
    coordinates.
    """
    if x.ring.group.order != 1 or m.ring.coeff_ring != x.ring.coeff_ring:
        raise RingMismatch("need an R<G>-module and an R-module over the same R")
    left = hom_module(restrict(m), x)
    right = hom_module(m, coinduce_flat(x, m.ring.group))
    return AdjunctionPair(left, right, lambda v: list(v), lambda v: list(v))


def tuple_correspondence(f: Sequence[Sequence[int]], module: FlatModel, group) -> list:
    """``g_sigma = sigma f_{sigma^-1}`` on |G|-tuples of elements of ``module``.

    Carries ``(tau f)_sigma = tau f_{tau^-1 sigma}`` to ``(tau g)_sigma = g_{sigma tau}``.
    The same formula is its own inverse.
    """
    out = []
    for s in group.elements:
        v = list(f[group.inv(s)])
        if s != 0:
            v = el.vecmat(v, module.actions["s"])
        out.append(v)
    return out


def tuple_action_f(tau: int, f, module: FlatModel, group) -> list:
    out = []
    for s in group.elements:
        v = list(f[group.mul(group.inv(tau), s)])
        if tau:
            v = el.vecmat(v, module.actions["s"])
        out.append(v)
    return out


def tuple_action_g(tau: int, g, group) -> list:
    return [list(g[group.mul(s, tau)]) for s in group.elements]


# ----------------------------------------------------------------------------
# rational modules over F<G>

def _conj_entry(x, action: str):
    if action == "conj" and isinstance(x, FieldElement):
        return x.conjugate()
    return x


def conj_matrix(m, action: str) -> list:
    return [[_conj_entry(x, action) for x in row] for row in m]


@dataclass(eq=False)
class RationalGModule:
    """``F^dim`` with sigma acting by ``v -> S @ conj(v)`` (column vectors).

    ``field`` is an :class:`ImQuadField`, or ``None`` for Q.
    """
    field: Optional[ImQuadField]
    action: str
    S: list
    order: Optional[QuadOrder] = None

    @property
    def dim(self) -> int:
        return len(self.S)

    def conj(self, v):
        return [_conj_entry(x, self.action) for x in v]

    def sigma(self, v):
        return [sum((a * b for a, b in zip(row, self.conj(v))), self.zero()) for row in self.S]

    def zero(self):
        return FieldElement(self.field, 0) if self.field else Fraction(0)

    def one(self):
        return FieldElement(self.field, 1) if self.field else Fraction(1)

    def identity(self) -> list:
        return [[self.one() if i == j else self.zero() for j in range(self.dim)] for i in range(self.dim)]

    def satisfies_involution_law(self) -> bool:
        prod = el.matmul(self.S, conj_matrix(self.S, self.action), inner=self.dim)
        return all(prod[i][j] == int(i == j) for i in range(self.dim) for j in range(self.dim))

    def is_equivariant(self, phi, target: "RationalGModule") -> bool:
        """``phi @ S_self == S_target @ conj(phi)``."""
        lhs = el.matmul(phi, self.S, inner=self.dim)
        rhs = el.matmul(target.S, conj_matrix(phi, self.action), inner=target.dim)
        return all(a == b for ra, rb in zip(lhs, rhs) for a, b in zip(ra, rb))


def regular_rational_module(field: Optional[ImQuadField], action: str) -> RationalGModule:
    """``F<G>`` on the basis ``(1, sigma)``: ``sigma(a + b sigma) = conj(b) + conj(a) sigma``."""
    one = FieldElement(field, 1) if field else Fraction(1)
    zero = one * 0
    return RationalGModule(field, action, [[zero, one], [one, zero]])


def trivial_rational_module(field, action: str, sign: int = 1) -> RationalGModule:
    """``F`` (sign +1) or its twist ``^sigma F`` (sign -1)."""
    one = FieldElement(field, sign) if field else Fraction(sign)
    return RationalGModule(field, action, [[one]])


def rationalize(m: PresentedModule) -> RationalGModule:
    """``M (x) Q`` as an F-vector space with its semilinear sigma."""
    flat = flatten(m)
    R = m.ring
    order = R.coeff_ring if isinstance(R.coeff_ring, QuadOrder) else None
    field_ = order.field if order else None
    N = flat.ngens
    red, piv = el.rref(flat.relations, cols=N) if flat.relations else ([], [])
    red = red[:len(piv)]
    free_cols = [j for j in range(N) if j not in piv]

    def reduce_vec(v):
        v = list(v)
        for row, pc in zip(red, piv):
            if v[pc]:
                c = v[pc]
                v = [a - c * b for a, b in zip(v, row)]
        return [Fraction(v[j]) for j in free_cols]

    def lift(q):
        v = [Fraction(0)] * N
        for j, x in zip(free_cols, q):
            v[j] = x
        return v

    dq = len(free_cols)
    ident = el.identity(dq)
    S_act = flat.actions.get("s", el.identity(N))
    sig = [reduce_vec(el.vecmat(lift(e), S_act)) for e in ident]  # row convention
    if order is None:
        S = el.transpose(sig) if dq else []
        return RationalGModule(None, R.group.action, [[Fraction(x) for x in row] for row in S])
    W = [reduce_vec(el.vecmat(lift(e), flat.actions["w"])) for e in ident]
    f = order.f

    def omega(v):  # omega = (f*omega)/f
        return [x / f for x in el.vecmat(v, W)]

    basis_q, fbasis = [], []
    for e in ident:
        cand = basis_q + [e]
        if el.rank(cand, cols=dq) > len(basis_q):
            fbasis.append(e)
            basis_q = basis_q + [e, omega(e)]
    assert len(basis_q) == dq

    def fcoords(v):
        c = el.solve_left(basis_q, [v], cols=dq)[0]
        return [FieldElement(field_, c[2 * j], c[2 * j + 1]) for j in range(len(fbasis))]

    cols = [fcoords(el.vecmat(v, sig)) for v in fbasis]
    S = el.transpose(cols) if cols else []
    return RationalGModule(field_, R.group.action, S, order)


def split_surjection(V: RationalGModule, W: RationalGModule, phi, s, group_order: int = 2):
    """Average an F-linear section of an equivariant surjection into an equivariant one.

    Returns ``(1/|G|) * sum_g g s g^-1``.
    """
    if el.rank(phi, cols=V.dim) != W.dim:
        raise NotSurjective("phi is not surjective")
    ps = el.matmul(phi, s, inner=V.dim)
    if any(ps[i][j] != int(i == j) for i in range(W.dim) for j in range(W.dim)):
        raise NotSection("s is not a right inverse of phi")
    if group_order == 1:
        return [list(r) for r in s]
    if group_order != 2:
        raise UnsupportedGroup("only |G| <= 2")
    # sigma_V s sigma_W = S_V conj(s) conj(S_W)
    twisted = el.matmul(el.matmul(V.S, conj_matrix(s, V.action), inner=V.dim),
                        conj_matrix(W.S, W.action), inner=W.dim)
    half = Fraction(1, 2)
    return [[(a + b) * half for a, b in zip(ra, rb)] for ra, rb in zip(s, twisted)]


@dataclass
class C2Decomposition:
    r: int
    r_prime: int
    basis: list          # columns are the decomposition basis
    model: list          # basis^-1 @ S @ conj(basis), diagonal of +-1
    alpha: Optional[FieldElement] = None

    def to_json(self) -> dict:
        def ser(x):
            return x.to_json() if isinstance(x, FieldElement) else str(x)
        return {"r": self.r, "r_prime": self.r_prime,
                "basis": [[ser(x) for x in row] for row in self.basis],
                "alpha": self.alpha.to_json() if self.alpha is not None else None}


def decompose_C2(v: RationalGModule, group_order: int = 2) -> C2Decomposition:
    """Multiplicities of ``F`` and ``^sigma F`` in a rational ``F<C2>``-module.

    Under conjugation every copy of ``^sigma F`` is identified with ``F`` by
    multiplication with a purely imaginary ``alpha`` so ``r' = 0``; under the
    trivial action ``r, r'`` are the +-1 eigenspace dimensions of ``S``.
    """
    if group_order != 2:
        raise UnsupportedGroup("decomposition is implemented for |G| = 2 only")
    n = v.dim
    zero, one = v.zero(), v.one()
    if v.action == "trivial":
        minus = [[x - (one if i == j else zero) for j, x in enumerate(row)] for i, row in enumerate(v.S)]
        plus = [[x + (one if i == j else zero) for j, x in enumerate(row)] for i, row in enumerate(v.S)]
        pos = el.nullspace(minus, cols=n) if n else []
        neg = el.nullspace(plus, cols=n) if n else []
        cols = pos + neg
        alpha = None
        r, rp = len(pos), len(neg)
    else:
        # fixed vectors of the Q-linear map v -> S conj(v) on Q^{2n}
        F = v.field
        basis_vecs = []
        for j in range(n):
            for t in (FieldElement(F, 1), F.omega):
                e = [zero] * n
                e[j] = t
                basis_vecs.append(e)
        rows = []
        for e in basis_vecs:
            img = v.sigma(e)
            rows.append([c for x in img for c in (x.a, x.b)])
        T = el.transpose(rows)
        Tm = [[x - int(i == j) for j, x in enumerate(row)] for i, row in enumerate(T)]
        fixed = el.nullspace(Tm, cols=2 * n)
        cols = [[FieldElement(F, vec[2 * j], vec[2 * j + 1]) for j in range(n)] for vec in fixed]
        assert len(cols) == n
        alpha = purely_imaginary_generator(v.order or F.maximal_order())
        r, rp = n, 0
    cols = [[x if isinstance(x, (FieldElement, Fraction)) else (FieldElement(v.field, x) if v.field else Fraction(x))
             for x in c] for c in cols]
    B = el.transpose(cols) if cols else []
    model = []
    if n:
        model = el.matmul(el.matmul(el.inverse(B), v.S, inner=n), conj_matrix(B, v.action), inner=n)
    return C2Decomposition(r, rp, B, model, alpha)


def conductor_sequence(ring: TwistedRing) -> tuple[ModuleMap, ModuleMap]:
    """``0 -> O -> O_F -> O_F/O -> 0`` as module maps."""
    o = ring.coeff_ring
    of = o.maximal_order().as_ideal()
    a, b, c = order_module(ring), maximal_order_module(ring), conductor_quotient_module(ring)
    inc = [of.coords(x) for x in o.as_ideal().basis]
    return (ModuleMap.from_integer_matrix(a, b, inc),
            ModuleMap.from_integer_matrix(b, c, el.identity(2)))


def norm_sequence(ring: TwistedRing) -> tuple[ModuleMap, ModuleMap]:
    """``0 -> R -> R<G> -> R<G>/R(1+sigma) -> 0`` with ``1 -> 1 + sigma``."""
    nrm = ring.one + ring.sigma
    unit, free = unit_module(ring), free_module(ring)
    quo = PresentedModule(ring, TwistedMatrix(ring, [[nrm]]), name="R<G>/R")
    return (ModuleMap(unit, free, TwistedMatrix(ring, [[nrm]])),
            ModuleMap(free, quo, TwistedMatrix.identity(ring, 1)))


def identity_sequence(m: PresentedModule) -> tuple[ModuleMap, ModuleMap]:
    """``0 -> M -> M -> 0 -> 0``."""
    z = zero_module(m.ring, 1)
    return (ModuleMap(m, m, TwistedMatrix.identity(m.ring, m.ngens)),
            ModuleMap(m, z, TwistedMatrix.zeros(m.ring, m.ngens, 1)))
