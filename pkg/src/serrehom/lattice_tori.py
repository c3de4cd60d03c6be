"""CM elliptic curves as lattices and the kernel realization of ``Hom_{R<G>}(-, E)``.

Model of the Weil restriction: ``T = F^2`` with lattice ``L + c(L)``, where
``c`` is complex conjugation for the conjugation action and the identity for
the trivial action.  Ring elements act diagonally, sigma acts by
``(x, y) -> (c(y), c(x))``.  On Z-coordinates (w.r.t. ``(l1,0), (l2,0),
(0,c l1), (0,c l2)``) every twisted-ring element acts by an integer matrix, so
Hom groups become kernels of integer matrices on real tori.

Vectors of ``F^r`` are flattened to ``Q^{2r}`` as ``(a_1, b_1, ..., a_r, b_r)``
meaning ``a_j + b_j*omega``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import exact_linalg as el
from .errors import (DimensionMismatch, NotExactInput, NotIsogeny, NotLatticeMap,
                     RingMismatch, UnsupportedGroup, ZeroIdeal)
from .gmodules import (FlatModel, ModuleMap, PresentedModule, hom_matrix,
                       is_exact_sequence)
from .quad_orders import (FieldElement, FracIdeal, ImQuadField, QuadOrder,
                          colon_ideal, ideal_index, multiplier_ring)
from .twisted_ring import GaloisGroup, TwistedMatrix, TwistedRing


# ----------------------------------------------------------------------------
# value types

@dataclass(frozen=True, eq=False)
class CMCurve:
    order: QuadOrder
    lattice: FracIdeal
    action: str = "conj"
    group_order: int = 2
    twist: int = 1  # descent sign; +1 for E, -1 for the quadratic twist

    def __post_init__(self):
        GaloisGroup(self.group_order, self.action)
        if self.lattice.field != self.order.field:
            raise RingMismatch("lattice and order live in different fields")
        mr = multiplier_ring(self.lattice)
        if mr.f != self.order.f:
            raise RingMismatch(f"multiplier ring has conductor {mr.f}, expected {self.order.f}")

    @classmethod
    def from_order(cls, order: QuadOrder, action: str = "conj", group_order: int = 2) -> "CMCurve":
        return cls(order, order.as_ideal(), action, group_order)

    @property
    def field(self) -> ImQuadField:
        return self.order.field

    @property
    def group(self) -> GaloisGroup:
        return GaloisGroup(self.group_order, self.action)

    @property
    def ring(self) -> TwistedRing:
        return TwistedRing(self.order, self.group)

    def c(self, x: FieldElement) -> FieldElement:
        return x.conjugate() if self.action == "conj" else x

    def as_torus(self) -> "LatticeTorus":
        return LatticeTorus.from_vectors(self.field, 1, [[b] for b in self.lattice.basis], action=self.action)

    def to_json(self) -> dict:
        return {"d": str(self.field.d), "f": str(self.order.f),
                "lattice": [b.to_json() for b in self.lattice.basis]}


def flatten_vec(v: Sequence[FieldElement]) -> list[Fraction]:
    out = []
    for x in v:
        out.extend(x.coords())
    return out


def unflatten_vec(field: ImQuadField, v: Sequence) -> list[FieldElement]:
    return [FieldElement(field, v[2 * j], v[2 * j + 1]) for j in range(len(v) // 2)]


def _conj_vec(v, action):
    return [x.conjugate() for x in v] if action == "conj" else list(v)


@dataclass(frozen=True, eq=False)
class LatticeTorus:
    """``F^dim / Lambda`` with an optional semilinear descent ``v -> A @ c(v)``."""
    field: ImQuadField
    dim: int
    lattice: el.ZLattice          # in Q^{2 dim}
    descent: Optional[tuple] = None
    action: str = "conj"

    def __post_init__(self):
        if self.lattice.ambient_rank != 2 * self.dim or self.lattice.rank != 2 * self.dim:
            raise DimensionMismatch("lattice must have full rank 2*dim")

    @classmethod
    def from_vectors(cls, field, dim, vectors, descent=None, action="conj") -> "LatticeTorus":
        lat = el.ZLattice.from_generators([flatten_vec(v) for v in vectors], 2 * dim)
        return cls(field, dim, lat, tuple(tuple(r) for r in descent) if descent else None, action)

    def basis_vectors(self) -> list[list[FieldElement]]:
        return [unflatten_vec(self.field, row) for row in self.lattice.basis]

    def apply_descent(self, v: Sequence[FieldElement]) -> list[FieldElement]:
        cv = _conj_vec(v, self.action)
        zero = FieldElement(self.field, 0)
        return [sum((a * b for a, b in zip(row, cv)), zero) for row in self.descent]

    def descent_is_involution(self) -> bool:
        if self.descent is None:
            return True
        for e in el.identity(self.dim):
            for t in (FieldElement(self.field, 1), self.field.omega):
                v = [t * x for x in e]
                if self.apply_descent(self.apply_descent(v)) != v:
                    return False
        return True

    def descent_stabilizes(self) -> bool:
        if self.descent is None:
            return True
        imgs = [flatten_vec(self.apply_descent(v)) for v in self.basis_vectors()]
        return el.ZLattice.from_generators(imgs, 2 * self.dim) == self.lattice

    def __eq__(self, other):
        return (isinstance(other, LatticeTorus) and self.field == other.field
                and self.dim == other.dim and self.lattice == other.lattice)

    def __hash__(self):
        return hash((self.field, self.dim, self.lattice))

    def to_json(self) -> dict:
        return {"d": str(self.field.d), "dim": self.dim,
                "lattice": el.matrix_to_json(self.lattice.basis),
                "descent": None if self.descent is None else
                [[x.to_json() for x in row] for row in self.descent]}


@dataclass(frozen=True)
class FiniteGroupData:
    invariants: tuple = ()
    sigma: Optional[tuple] = None

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariants:
            out *= d
        return out

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariants) <= 1

    def to_json(self) -> dict:
        return {"invariants": [str(d) for d in self.invariants], "order": str(self.order)}


@dataclass
class IsogenyCert:
    source: CMCurve
    target: CMCurve
    matrix: list
    degree: int
    kernel: FiniteGroupData
    j_source: Optional[int] = None
    j_target: Optional[int] = None
    alpha: Optional[FieldElement] = None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        out = {"source": self.source.to_json(), "target": self.target.to_json(),
               "matrix": [[x.to_json() for x in row] for row in self.matrix],
               "degree": str(self.degree), "kernel": self.kernel.to_json()}
        if self.j_source is not None:
            out["j_source"] = str(self.j_source)
        if self.j_target is not None:
            out["j_target"] = str(self.j_target)
        if self.alpha is not None:
            out["alpha"] = self.alpha.to_json()
        out["checks"] = {k: bool(v) for k, v in sorted(self.checks.items())}
        return out


# ----------------------------------------------------------------------------
# kernel groups {v : v @ D integral} / Z^a

@dataclass
class KernelGroup:
    ambient: int
    lattice: el.ZLattice        # identity component, saturated in Z^ambient
    factors: list               # SNF diagonal, zeros trailing
    u: list
    invariants: tuple           # torsion of the component group

    @property
    def real_rank(self) -> int:
        return self.lattice.rank

    @property
    def component_order(self) -> int:
        return FiniteGroupData(self.invariants).order

    def torsion_reps(self) -> list[list[Fraction]]:
        return [[Fraction(x, d) for x in self.u[i]] for i, d in enumerate(self.factors) if d > 1]

    def class_of(self, v: Sequence) -> tuple:
        """Image of ``v`` (with ``v @ D`` integral) in the component group."""
        if not hasattr(self, "_uinv"):
            self._uinv = el.inverse(self.u) if self.u else []
        w = el.vecmat(list(v), self._uinv) if self._uinv else []
        out = []
        for i, d in enumerate(self.factors):
            if d > 1:
                t = Fraction(w[i]) * d
                if t.denominator != 1:
                    raise ValueError("vector is not in the kernel group")
                out.append(int(t) % d)
        return tuple(out)


def kernel_group(d: Sequence[Sequence[int]], a: int, b: int) -> KernelGroup:
    if a == 0:
        return KernelGroup(0, el.ZLattice(0, ()), [], [], ())
    if b == 0:
        return KernelGroup(a, el.ZLattice.from_generators(el.identity(a), a), [0] * a, el.identity(a), ())
    factors, u, _ = el.snf(d, cols=b)
    factors = list(factors) + [0] * (a - len(factors))
    kern = [u[i] for i in range(a) if factors[i] == 0]
    lat = el.ZLattice.from_generators(kern, a) if kern else el.ZLattice(a, ())
    return KernelGroup(a, lat, factors, u, tuple(x for x in factors if x > 1))


# ----------------------------------------------------------------------------
# Res model

@dataclass(frozen=True, eq=False)
class _ResModel:
    curve: CMCurve
    flat: FlatModel                 # the torus lattice as an R<G>-module
    blocks: int                     # 2 (x, y) or 1 (x only)

    def decode(self, v: Sequence, n: int) -> list[list[FieldElement]]:
        """Z-coordinates on ``T^n`` to the Res coordinates ``(x_i, y_i)``."""
        e = self.curve
        l1, l2 = e.lattice.basis
        c1, c2 = e.c(l1), e.c(l2)
        q = 2 * self.blocks
        out = []
        for i in range(n):
            blk = v[i * q:(i + 1) * q]
            out.append(l1 * blk[0] + l2 * blk[1])
            if self.blocks == 2:
                out.append(c1 * blk[2] + c2 * blk[3])
        return out

    def chart(self, vec: Sequence[FieldElement]) -> list[FieldElement]:
        """Apply ``c`` on the y-coordinates; the result varies F-linearly."""
        if self.blocks == 1:
            return list(vec)
        return [x if k % 2 == 0 else self.curve.c(x) for k, x in enumerate(vec)]


def _res_model(e: CMCurve) -> _ResModel:
    ring = e.ring
    L = e.lattice
    gen = e.order.generator
    w_x = [L.coords(gen * b) for b in L.basis]
    if e.group_order == 1:
        return _ResModel(e, FlatModel(2, (), ring, {"w": w_x}), 1)
    # (0, c l_j) * gen = c(c(gen) l_j)
    w_y = [L.coords(e.c(gen) * b) for b in L.basis]
    w = el.block_diag(w_x, w_y)
    s = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    return _ResModel(e, FlatModel(4, (), ring, {"w": w, "s": s}), 2)


def res_torus(e: CMCurve) -> LatticeTorus:
    """``Res E``: lattice ``L + c(L)`` in ``F^2`` with swap-conjugate descent."""
    if e.group_order == 1:
        return e.as_torus()
    if e.group_order != 2:
        raise UnsupportedGroup("only |G| <= 2")
    l1, l2 = e.lattice.basis
    z = FieldElement(e.field, 0)
    o = FieldElement(e.field, 1)
    vecs = [[l1, z], [l2, z], [z, e.c(l1)], [z, e.c(l2)]]
    return LatticeTorus.from_vectors(e.field, 2, vecs, descent=[[z, o], [o, z]], action=e.action)


# ----------------------------------------------------------------------------
# the functor on modules

@dataclass
class HomTorusResult:
    torus: Optional[LatticeTorus]   # None when zero-dimensional
    components: FiniteGroupData
    kernel: KernelGroup
    pivots: tuple                   # Res coordinates kept by the projection
    model: _ResModel

    @property
    def dim(self) -> int:
        return self.torus.dim if self.torus else 0

    def __iter__(self):
        yield self.torus
        yield self.components


def _project(model: _ResModel, vecs_z: Sequence[Sequence], n: int):
    """Project integer kernel vectors on ``T^n`` onto F-independent Res coordinates."""
    F = model.curve.field
    decoded = [model.decode(v, n) for v in vecs_z]
    if not decoded:
        return [], ()
    charts = [model.chart(v) for v in decoded]
    _, piv = el.rref(charts, cols=len(charts[0]))
    return [[v[j] for j in piv] for v in decoded], tuple(piv)


def _descent_on(model: _ResModel, kern: KernelGroup, n: int, pivots, lattice: el.ZLattice):
    """Entrywise sigma restricted to the kernel, as ``A @ c(v)`` when that form exists."""
    if model.blocks != 2 or not kern.lattice.basis:
        return None
    s_all = el.block_diag(*[model.flat.actions["s"]] * n)
    basis = [list(b) for b in kern.lattice.basis]
    images = [el.vecmat(b, s_all) for b in basis]
    if any(img not in kern.lattice for img in images):
        return None
    F = model.curve.field
    proj_b = [flatten_vec([model.decode(b, n)[j] for j in pivots]) for b in basis]
    proj_i = [flatten_vec([model.decode(b, n)[j] for j in pivots]) for b in images]
    r2 = len(proj_b)
    # rational linear map M with proj_b @ M = proj_i
    M = el.matmul(el.inverse(proj_b), proj_i, inner=r2)
    r = r2 // 2
    c_omega = model.curve.c(F.omega)
    cols = []
    for j in range(r):
        e1 = [Fraction(0)] * r2
        e1[2 * j] = Fraction(1)
        ew = [Fraction(0)] * r2
        ew[2 * j + 1] = Fraction(1)
        s1 = unflatten_vec(F, el.vecmat(e1, M))
        sw = unflatten_vec(F, el.vecmat(ew, M))
        if sw != [c_omega * x for x in s1]:
            return None
        cols.append(s1)
    return el.transpose(cols)


def hom_torus(m: PresentedModule, e: CMCurve, *, hook: Optional[Callable] = None) -> HomTorusResult:
    """Lattice model of ``Hom_{R<G>}(m, E)``: identity component and component group."""
    if m.ring != e.ring:
        raise RingMismatch(f"module over {m.ring.tag}, curve over {e.ring.tag}")
    model = _res_model(e)
    q = model.flat.ngens
    n, mm = m.ngens, m.nrels
    big = hom_matrix(m, model.flat)
    if hook is not None:
        el._check(hook)
    kern = kernel_group(big, n * q, mm * q)
    vecs, piv = _project(model, kern.lattice.basis, n)
    r = len(piv)
    torus = None
    if r:
        lat = el.ZLattice.from_generators([flatten_vec(v) for v in vecs], 2 * r)
        desc = _descent_on(model, kern, n, piv, lat)
        torus = LatticeTorus(e.field, r, lat, tuple(tuple(row) for row in desc) if desc else None, e.action)
    return HomTorusResult(torus, FiniteGroupData(kern.invariants), kern, piv, model)


def induced_matrix(f: ModuleMap, e: CMCurve) -> list:
    """Integer matrix of ``Hom(dst, E) -> Hom(src, E)``, ``t -> t @ C`` on Z-coordinates."""
    model = _res_model(e)
    pm = PresentedModule(f.src.ring, f.matrix)
    return hom_matrix(pm, model.flat)


def hom_ideal(i: FracIdeal, e: CMCurve) -> CMCurve:
    """Rank-one shortcut: ``Hom_O(I, E)`` has lattice ``(L : I)``."""
    if not i.basis or i.lattice.rank == 0:
        raise ZeroIdeal("zero ideal")
    lat = colon_ideal(e.lattice, i)
    return CMCurve(multiplier_ring(lat), lat, e.action, e.group_order, e.twist)


def normalized_hom_lattice(res: HomTorusResult, module: PresentedModule) -> el.ZLattice:
    """For a rank-one module with generator labels ``m_k``: the lattice of ``z = x_1 / m_1``."""
    if res.dim != 1 or module.generator_labels is None:
        raise DimensionMismatch("need a one-dimensional result of a labelled module")
    if res.pivots[0] != 0:
        raise DimensionMismatch("first generator does not determine the hom")
    m1 = module.generator_labels[0]
    vecs = [[v[0] / m1] for v in res.torus.basis_vectors()]
    return el.ZLattice.from_generators([flatten_vec(v) for v in vecs], 2)


# ----------------------------------------------------------------------------
# isogenies

def kernel_and_degree(mat: Sequence[Sequence[FieldElement]], src: LatticeTorus,
                      dst: LatticeTorus) -> tuple[FiniteGroupData, int]:
    """Kernel and degree of the torus map ``v -> mat @ v`` (column vectors)."""
    if len(mat) != dst.dim or any(len(r) != src.dim for r in mat):
        raise DimensionMismatch("matrix shape does not match the tori")
    if el.rank(mat, cols=src.dim) != src.dim:
        raise NotIsogeny("map is not injective over F")
    zero = FieldElement(src.field, 0)
    rows = []
    for v in src.basis_vectors():
        img = [sum((a * x for a, x in zip(row, v)), zero) for row in mat]
        rows.append(flatten_vec(img))
    try:
        coords = dst.lattice.coordinates(rows)
    except Exception as exc:  # outside the rational span cannot happen for full-rank dst
        raise NotLatticeMap(str(exc)) from exc
    if not el.is_integral(coords):
        raise NotLatticeMap("image of the source lattice is not contained in the target lattice")
    kg = kernel_group(el.to_int(coords), 2 * src.dim, 2 * dst.dim)
    data = FiniteGroupData(kg.invariants)
    return data, data.order


def maximal_order_isogeny(e: CMCurve, *, certify_j: bool = False, precision_bits: Optional[int] = None,
                          threads: Optional[int] = None) -> IsogenyCert:
    """``E' = Hom(O_F, E) -> E`` induced by ``O -> O_F``; degree equals the conductor."""
    ok = e.order.maximal_order()
    src = hom_ideal(ok.as_ideal(), e)
    one = FieldElement(e.field, 1)
    mat = [[one]]
    kern, deg = kernel_and_degree(mat, src.as_torus(), e.as_torus())
    checks = {
        "degree_is_conductor": deg == e.order.f,
        "kernel_order_is_degree": kern.order == deg,
        "index_is_degree": ideal_index(src.lattice, e.lattice) == deg,
        "target_maximal": src.order.f == 1,
        "kernel_cyclic": kern.is_cyclic,
    }
    cert = IsogenyCert(src, e, mat, deg, kern, checks=checks)
    if certify_j:
        from .class_poly import verify_cm_j
        vs = verify_cm_j(src.lattice, src.order, precision_bits=precision_bits, threads=threads)
        vt = verify_cm_j(e.lattice, e.order, precision_bits=precision_bits, threads=threads)
        cert.j_source, cert.j_target = vs.j_rounded, vt.j_rounded
        checks["H_source"] = vs.passed
        checks["H_target"] = vt.passed
    return cert


# ----------------------------------------------------------------------------
# exactness

@dataclass
class ExactnessReport:
    dims: tuple
    component_orders: tuple
    injective: bool
    composite_zero: bool
    middle_exact: bool
    surjective: bool
    lattice_index: Optional[int] = None
    bookkeeping: Optional[bool] = None

    @property
    def dims_additive(self) -> bool:
        return self.dims[1] == self.dims[0] + self.dims[2]

    @property
    def exact(self) -> bool:
        flags = [self.dims_additive, self.injective, self.composite_zero, self.middle_exact, self.surjective]
        if self.bookkeeping is not None:
            flags.append(self.bookkeeping)
        return all(flags)

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "component_orders": [str(x) for x in self.component_orders],
                "injective": self.injective, "composite_zero": self.composite_zero,
                "middle_exact": self.middle_exact, "surjective": self.surjective,
                "lattice_index": None if self.lattice_index is None else str(self.lattice_index),
                "exact": self.exact}


def _span_rank(vecs, cols) -> int:
    return el.rank(vecs, cols=cols) if vecs else 0


def apply_ses(i: ModuleMap, p: ModuleMap, e: CMCurve) -> ExactnessReport:
    """Apply ``Hom(-, E)`` to ``0 -> M' -i-> M -p-> M'' -> 0`` and test exactness of
    ``0 -> A'' -> A -> A' -> 0``."""
    if i.dst is not p.src and i.dst.presentation != p.src.presentation:
        raise NotExactInput("maps are not composable")
    flags = is_exact_sequence(i, p)
    if not all(flags.values()):
        raise NotExactInput(f"module sequence is not exact: {flags}")
    h1, h, h2 = hom_torus(i.src, e), hom_torus(i.dst, e), hom_torus(p.dst, e)
    k1, k, k2 = h1.kernel, h.kernel, h2.kernel
    c_p = induced_matrix(p, e)      # A'' -> A
    c_i = induced_matrix(i, e)      # A -> A'
    a1, a, a2 = k1.ambient, k.ambient, k2.ambient

    # composite A'' -> A' vanishes on identity component and component reps
    comp = el.matmul(c_p, c_i, inner=a) if a2 and a and a1 else []
    composite_zero = True
    if comp:
        for v in k2.lattice.basis:
            if any(el.vecmat(list(v), comp)):
                composite_zero = False
        for v in k2.torsion_reps():
            if not el.is_integral([el.vecmat(v, comp)]):
                composite_zero = False

    # injectivity of A'' -> A: {v : v @ [B'' | C_p] integral} / Z is trivial
    b2 = hom_matrix(p.dst, h2.model.flat)
    if a2:
        stacked = el.hstack(b2, c_p) if b2 and b2[0] else c_p
        kin = kernel_group(stacked, a2, len(stacked[0]) if stacked and stacked[0] else 0)
        injective = kin.real_rank == 0 and kin.component_order == 1
    else:
        injective = True

    # middle: ker(A -> A') equals image of A''
    b = hom_matrix(i.dst, h.model.flat)
    if a:
        stacked = el.hstack(b, c_i) if b and b[0] else c_i
        kmid = kernel_group(stacked, a, len(stacked[0]) if stacked and stacked[0] else 0)
        middle = kmid.real_rank == k2.real_rank and kmid.component_order == k2.component_order
    else:
        middle = k2.ambient == 0 or (k2.real_rank == 0 and k2.component_order == 1)

    # surjectivity of A -> A'
    img0 = [el.vecmat(list(v), c_i) for v in k.lattice.basis] if a1 else []
    surjective = _span_rank(img0, a1) == k1.real_rank
    index = None
    if surjective and k1.invariants:
        gens = [k1.class_of(el.vecmat(v, c_i)) for v in k.torsion_reps()]
        gens += [k1.class_of(el.vecmat(list(v), c_i)) for v in k.lattice.basis]
        mods = [d for d in k1.invariants]
        rows = [list(g) for g in gens if any(g)]
        rows += [[mods[j] if j == t else 0 for j in range(len(mods))] for t in range(len(mods))]
        surjective = el.lattice_index(el.ZLattice.from_generators(rows, len(mods)),
                                      el.ZLattice.from_generators(el.identity(len(mods)))) == 1
    bookkeeping = None
    if surjective and k1.real_rank and k1.real_rank == k.real_rank and img0:
        sub = el.ZLattice.from_generators(img0, a1)
        index = el.lattice_index(sub, k1.lattice)
        # |A''| = deg(A_0 -> A'_0) * |pi0(A)| / |pi0(A')| when A'' is finite
        bookkeeping = k2.component_order * k1.component_order == index * k.component_order
    return ExactnessReport(
        dims=(h2.dim, h.dim, h1.dim),
        component_orders=(k2.component_order, k.component_order, k1.component_order),
        injective=injective, composite_zero=composite_zero, middle_exact=middle,
        surjective=surjective, lattice_index=index, bookkeeping=bookkeeping)
