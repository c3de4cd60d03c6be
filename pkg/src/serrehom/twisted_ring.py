"""Twisted group rings ``R<G> = sum_g R*g`` with ``g*r = g(r)*g``.

Only the trivial group and the group of order two are constructible; the
nontrivial element acts on coefficients either trivially or by complex
conjugation.  Coefficients come from one of three rings: the integers, an
imaginary quadratic order, or its fraction field.  Mixing rings is an error.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, GroupMismatch, RingMismatch, UnsupportedGroup
from .quad_orders import FieldElement, ImQuadField, QuadOrder

ACTIONS = ("trivial", "conj")


class IntegerRing:
    """The ring Z, with the interface shared by :class:`QuadOrder`."""

    rank = 1
    field = None

    def __contains__(self, x) -> bool:
        return isinstance(x, int) and not isinstance(x, bool)

    def coords(self, x) -> tuple[int]:
        return (x,)

    def from_coords(self, c: Sequence[int]) -> int:
        return int(c[0])

    @property
    def basis(self) -> tuple[int]:
        return (1,)

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("ZZ")

    def __repr__(self):
        return "ZZ"

    def to_json(self) -> dict:
        return {"kind": "ZZ"}


ZZ = IntegerRing()
CoeffRing = object  # IntegerRing | QuadOrder | ImQuadField


def ring_tag(ring) -> str:
    if isinstance(ring, IntegerRing):
        return "ZZ"
    if isinstance(ring, QuadOrder):
        return f"O(d={ring.field.d},f={ring.f})"
    if isinstance(ring, ImQuadField):
        return f"F(d={ring.d})"
    raise RingMismatch(f"unknown coefficient ring {ring!r}")


def ring_to_json(ring) -> dict:
    if isinstance(ring, IntegerRing):
        return {"kind": "ZZ"}
    if isinstance(ring, QuadOrder):
        return {"kind": "order", "d": ring.field.d, "f": ring.f}
    return {"kind": "field", "d": ring.d}


def ring_from_json(data: dict):
    kind = data["kind"]
    if kind == "ZZ":
        return ZZ
    if kind == "order":
        return QuadOrder(ImQuadField(int(data["d"])), int(data["f"]))
    if kind == "field":
        return ImQuadField(int(data["d"]))
    raise RingMismatch(f"unknown ring kind {kind!r}")


def ring_rank(ring) -> int:
    """Z-rank of the coefficient ring (undefined for fields)."""
    if isinstance(ring, IntegerRing):
        return 1
    if isinstance(ring, QuadOrder):
        return 2
    raise RingMismatch("a field has no finite Z-rank")


def ring_contains(ring, x) -> bool:
    if isinstance(ring, IntegerRing):
        return x in ring
    if not isinstance(x, FieldElement):
        return False
    if isinstance(ring, QuadOrder):
        return x.field == ring.field and x in ring
    return x.field == ring


def ring_one(ring):
    return 1 if isinstance(ring, IntegerRing) else FieldElement(_field_of(ring), 1, 0)


def ring_zero(ring):
    return 0 if isinstance(ring, IntegerRing) else FieldElement(_field_of(ring), 0, 0)


def _field_of(ring):
    return ring.field if isinstance(ring, QuadOrder) else ring


def coerce(ring, x):
    """Explicit conversion of an integer literal into ``ring``."""
    if isinstance(x, int) and not isinstance(ring, IntegerRing):
        return FieldElement(_field_of(ring), x, 0)
    if not ring_contains(ring, x):
        raise RingMismatch(f"{x} is not an element of {ring_tag(ring)}")
    return x


@dataclass(frozen=True)
class GaloisGroup:
    """Cyclic group of order 1 or 2 acting on coefficients.

    Elements are the indices ``0 .. order-1`` (``0`` is the identity, ``1`` is
    sigma); multiplication is addition mod ``order``.
    """
    order: int = 2
    action: str = "conj"

    def __post_init__(self):
        if self.order not in (1, 2):
            raise UnsupportedGroup(f"groups of order {self.order} are not constructible")
        if self.action not in ACTIONS:
            raise ValueError(f"action must be one of {ACTIONS}")
        if self.order == 1 and self.action != "trivial":
            object.__setattr__(self, "action", "trivial")

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(range(self.order))

    @property
    def names(self) -> tuple[str, ...]:
        return ("1", "s")[: self.order]

    def mul(self, g: int, h: int) -> int:
        return (g + h) % self.order

    def inv(self, g: int) -> int:
        return (-g) % self.order

    def act(self, g: int, x):
        """``g(x)`` for a coefficient ``x``."""
        if g % self.order == 0 or self.action == "trivial" or not isinstance(x, FieldElement):
            return x
        return x.conjugate()


C1 = GaloisGroup(1, "trivial")


def C2(action: str = "conj") -> GaloisGroup:
    return GaloisGroup(2, action)


@dataclass(frozen=True)
class TwistedRing:
    coeff_ring: object
    group: GaloisGroup

    def __post_init__(self):
        if self.group.action == "conj" and isinstance(self.coeff_ring, IntegerRing):
            # conjugation is trivial on Z; normalise so equal rings compare equal
            object.__setattr__(self, "group", GaloisGroup(self.group.order, "trivial"))

    @property
    def tag(self) -> str:
        return f"{ring_tag(self.coeff_ring)}<C{self.group.order},{self.group.action}>"

    @property
    def zrank(self) -> int:
        """Z-rank of ``R<G>``."""
        return ring_rank(self.coeff_ring) * self.group.order

    def element(self, coeffs: Sequence) -> "TwistedRingElement":
        return TwistedRingElement(self, tuple(coerce(self.coeff_ring, c) for c in coeffs))

    def scalar(self, r) -> "TwistedRingElement":
        return self.element([r] + [0] * (self.group.order - 1))

    def group_element(self, g: int) -> "TwistedRingElement":
        return self.element([int(h == g) for h in self.group.elements])

    @property
    def one(self) -> "TwistedRingElement":
        return self.group_element(0)

    @property
    def zero(self) -> "TwistedRingElement":
        return self.element([0] * self.group.order)

    @property
    def sigma(self) -> "TwistedRingElement":
        if self.group.order < 2:
            raise UnsupportedGroup("the trivial group has no sigma")
        return self.group_element(1)

    def zbasis(self) -> list["TwistedRingElement"]:
        """Z-basis ``b_j * g`` ordered group-major (all of ``R*1``, then ``R*sigma``)."""
        out = []
        for g in self.group.elements:
            for b in self.coeff_ring.basis:
                coeffs = [ring_zero(self.coeff_ring)] * self.group.order
                coeffs[g] = b
                out.append(TwistedRingElement(self, tuple(coeffs)))
        return out

    def from_zcoords(self, c: Sequence[int]) -> "TwistedRingElement":
        k = ring_rank(self.coeff_ring)
        coeffs = [self.coeff_ring.from_coords(c[g * k:(g + 1) * k]) for g in self.group.elements]
        return TwistedRingElement(self, tuple(coeffs))

    def left_mult_matrix(self, x: "TwistedRingElement") -> list:
        """Integer matrix ``A`` with ``zcoords(x*y) = zcoords(y) @ A``."""
        return [list((x * b).zcoords()) for b in self.zbasis()]

    def right_mult_matrix(self, x: "TwistedRingElement") -> list:
        return [list((b * x).zcoords()) for b in self.zbasis()]

    def restricted(self) -> "TwistedRing":
        return TwistedRing(self.coeff_ring, C1)

    def rationalized(self) -> "TwistedRing":
        if isinstance(self.coeff_ring, QuadOrder):
            return TwistedRing(self.coeff_ring.field, self.group)
        return self

    def to_json(self) -> dict:
        return {"coeffs": ring_to_json(self.coeff_ring), "group_order": self.group.order,
                "action": self.group.action}

    @classmethod
    def from_json(cls, data: dict) -> "TwistedRing":
        return cls(ring_from_json(data["coeffs"]), GaloisGroup(int(data["group_order"]), data["action"]))


class TwistedRingElement:
    """``sum_g coeffs[g] * g``."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: TwistedRing, coeffs: tuple):
        if len(coeffs) != ring.group.order:
            raise DimensionMismatch("one coefficient per group element required")
        for c in coeffs:
            if not ring_contains(ring.coeff_ring, c):
                raise RingMismatch(f"coefficient {c!r} not in {ring_tag(ring.coeff_ring)}")
        self.ring = ring
        self.coeffs = coeffs

    def _same(self, other: "TwistedRingElement"):
        if not isinstance(other, TwistedRingElement):
            raise RingMismatch(f"cannot combine with {type(other).__name__}")
        if other.ring.group != self.ring.group:
            raise GroupMismatch("elements over different groups")
        if other.ring.coeff_ring != self.ring.coeff_ring:
            raise RingMismatch("elements over different coefficient rings")

    def __add__(self, other):
        self._same(other)
        return TwistedRingElement(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return TwistedRingElement(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._same(other)
        G = self.ring.group
        out = [ring_zero(self.ring.coeff_ring)] * G.order
        for g, r in enumerate(self.coeffs):
            if not r:
                continue
            for h, s in enumerate(other.coeffs):
                if s:
                    k = G.mul(g, h)
                    out[k] = out[k] + r * G.act(g, s)
        return TwistedRingElement(self.ring, tuple(out))

    def scale(self, r) -> "TwistedRingElement":
        """Left scalar multiplication ``r * self``."""
        return self.ring.scalar(r) * self

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def zcoords(self) -> tuple[int, ...]:
        out = []
        for c in self.coeffs:
            out.extend(self.ring.coeff_ring.coords(c))
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, TwistedRingElement):
            return NotImplemented
        return self.ring == other.ring and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __repr__(self):
        return f"TwistedRingElement({self})"

    def __str__(self):
        parts = []
        for name, c in zip(self.ring.group.names, self.coeffs):
            if not c:
                continue
            cs = str(c)
            parts.append(cs if name == "1" else f"({cs})*{name}")
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        out = {"ring": self.ring.tag}
        for name, c in zip(self.ring.group.names, self.coeffs):
            out[name] = str(c) if isinstance(c, int) else c.to_json()
        return out

    @classmethod
    def from_json(cls, ring: TwistedRing, data: dict) -> "TwistedRingElement":
        coeffs = []
        for name in ring.group.names:
            v = data.get(name, "0")
            if isinstance(v, dict):
                coeffs.append(FieldElement.from_json(_field_of(ring.coeff_ring), v))
            else:
                coeffs.append(coerce(ring.coeff_ring, int(v)))
        return cls(ring, tuple(coeffs))


def tr_mul(x: TwistedRingElement, y: TwistedRingElement) -> TwistedRingElement:
    return x * y


def tr_add(x: TwistedRingElement, y: TwistedRingElement) -> TwistedRingElement:
    return x + y


def tr_neg(x: TwistedRingElement) -> TwistedRingElement:
    return -x


def tr_scalar(r, x: TwistedRingElement) -> TwistedRingElement:
    return x.scale(r)


class TwistedMatrix:
    """Rectangular matrix of twisted-ring elements."""

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring: TwistedRing, rows: Iterable[Iterable[TwistedRingElement]], ncols: int | None = None):
        rows = [list(r) for r in rows]
        self.ring = ring
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else (ncols or 0)
        for r in rows:
            if len(r) != self.ncols:
                raise DimensionMismatch("ragged twisted matrix")
            for x in r:
                if x.ring != ring:
                    raise RingMismatch("entry over a different ring")

    @classmethod
    def identity(cls, ring: TwistedRing, n: int) -> "TwistedMatrix":
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, ring: TwistedRing, r: int, c: int) -> "TwistedMatrix":
        return cls(ring, [[ring.zero] * c for _ in range(r)], c)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (isinstance(other, TwistedMatrix) and self.ring == other.ring
                and (self.nrows, self.ncols) == (other.nrows, other.ncols)
                and all(a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)))

    def __matmul__(self, other: "TwistedMatrix") -> "TwistedMatrix":
        return tr_matrix_mul(self, other)

    def __repr__(self):
        return f"TwistedMatrix({[[str(x) for x in r] for r in self.rows]})"

    def to_json(self) -> list:
        return [[x.to_json() for x in r] for r in self.rows]


def tr_matrix_mul(a: TwistedMatrix, b: TwistedMatrix) -> TwistedMatrix:
    if a.ncols != b.nrows:
        raise DimensionMismatch(f"cannot multiply {a.nrows}x{a.ncols} by {b.nrows}x{b.ncols}")
    if a.ring != b.ring:
        raise RingMismatch("matrices over different rings")
    R = a.ring
    rows = []
    for i in range(a.nrows):
        row = []
        for j in range(b.ncols):
            acc = R.zero
            for k in range(a.ncols):
                acc = acc + a.rows[i][k] * b.rows[k][j]
            row.append(acc)
        rows.append(row)
    return TwistedMatrix(R, rows, b.ncols)
