"""Imaginary quadratic fields, their orders and fractional ideals.

An order of conductor ``f`` in ``F = Q(sqrt d)`` has Z-basis ``(1, f*omega)``
where ``omega`` is ``(1 + sqrt d)/2`` for ``d = 1 mod 4`` and ``sqrt d``
otherwise.  Field elements are pairs of rationals ``a + b*omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from . import exact_linalg as el
from .errors import BadDiscriminant, NotSublattice, ZeroIdeal

Rational = Union[int, Fraction]


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ImQuadField:
    d: int

    def __post_init__(self):
        if self.d >= 0 or not _squarefree(self.d):
            raise BadDiscriminant(f"d={self.d} must be a negative squarefree integer")

    @property
    def d_is_1_mod_4(self) -> bool:
        return self.d % 4 == 1

    @property
    def disc(self) -> int:
        """Fundamental discriminant."""
        return self.d if self.d_is_1_mod_4 else 4 * self.d

    @property
    def omega_trace(self) -> int:
        return 1 if self.d_is_1_mod_4 else 0

    @property
    def omega_norm(self) -> Fraction:
        return Fraction(1 - self.d, 4) if self.d_is_1_mod_4 else Fraction(-self.d)

    @property
    def omega(self) -> "FieldElement":
        return FieldElement(self, 0, 1)

    @property
    def sqrt_d(self) -> "FieldElement":
        return FieldElement(self, -1, 2) if self.d_is_1_mod_4 else FieldElement(self, 0, 1)

    def __call__(self, a: Rational = 0, b: Rational = 0) -> "FieldElement":
        return FieldElement(self, a, b)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1, 0)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0, 0)

    def maximal_order(self) -> "QuadOrder":
        return QuadOrder(self, 1)

    def order(self, f: int) -> "QuadOrder":
        return QuadOrder(self, f)

    def embed(self, x: "FieldElement", ctx=None):
        """Complex value of ``x`` under the embedding with ``Im(sqrt d) > 0``."""
        import mpmath
        ctx = ctx or mpmath.mp
        om = (1 + ctx.sqrt(self.d)) / 2 if self.d_is_1_mod_4 else ctx.sqrt(self.d)
        a, b = x.a, x.b
        return ctx.mpf(a.numerator) / a.denominator + ctx.mpf(b.numerator) / b.denominator * om

    def to_json(self) -> dict:
        return {"d": self.d}


class FieldElement:
    """``a + b*omega`` with exact rational ``a, b``."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: ImQuadField, a: Rational = 0, b: Rational = 0):
        self.field = field
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n = self.field.omega_trace, self.field.omega_norm
        # omega^2 = t*omega - n
        bb = self.b * o.b
        return FieldElement(self.field, self.a * o.a - n * bb, self.a * o.b + self.b * o.a + t * bb)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conjugate()
        return FieldElement(self.field, c.a / nm, c.b / nm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def conjugate(self) -> "FieldElement":
        # conj(omega) = trace(omega) - omega
        return FieldElement(self.field, self.a + self.b * self.field.omega_trace, -self.b)

    def trace(self) -> Fraction:
        return 2 * self.a + self.b * self.field.omega_trace

    def norm(self) -> Fraction:
        t, n = self.field.omega_trace, self.field.omega_norm
        return self.a * self.a + t * self.a * self.b + n * self.b * self.b

    def coords(self) -> tuple[Fraction, Fraction]:
        return (self.a, self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, FieldElement):
            return self.field == other.field and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.field.d, self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"FieldElement(d={self.field.d}, {_frac_str(self.a)}, {_frac_str(self.b)})"

    def __str__(self):
        if not self.b:
            return _frac_str(self.a)
        om = "w"
        tail = om if self.b == 1 else f"-{om}" if self.b == -1 else f"{_frac_str(self.b)}*{om}"
        if not self.a:
            return tail
        return f"{_frac_str(self.a)}{'' if tail.startswith('-') else '+'}{tail}"

    def to_json(self) -> dict:
        return {"a": _frac_str(self.a), "b": _frac_str(self.b)}

    @classmethod
    def from_json(cls, field: ImQuadField, data: dict) -> "FieldElement":
        return cls(field, Fraction(data["a"]), Fraction(data["b"]))


# functional aliases
def conjugate(x: FieldElement) -> FieldElement:
    return x.conjugate()


def norm(x: FieldElement) -> Fraction:
    return x.norm()


def trace(x: FieldElement) -> Fraction:
    return x.trace()


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def inverse(x: FieldElement) -> FieldElement:
    return x.inverse()


@dataclass(frozen=True)
class QuadOrder:
    field: ImQuadField
    f: int = 1

    def __post_init__(self):
        if self.f < 1:
            raise BadDiscriminant("conductor must be positive")

    @classmethod
    def from_discriminant(cls, D: int) -> "QuadOrder":
        """Order of discriminant ``D = f^2 * disc_K``."""
        if D >= 0 or D % 4 not in (0, 1):
            raise BadDiscriminant(f"D={D} is not a negative discriminant (need D = 0, 1 mod 4)")
        # largest f with D/f^2 a fundamental discriminant
        for f in range(math.isqrt(-D), 0, -1):
            if D % (f * f):
                continue
            dk = D // (f * f)
            if dk % 4 == 1 and _squarefree(dk):
                return cls(ImQuadField(dk), f)
            if dk % 4 == 0 and (dk // 4) % 4 in (2, 3) and _squarefree(dk // 4):
                return cls(ImQuadField(dk // 4), f)
        raise BadDiscriminant(f"no order has discriminant {D}")

    @property
    def conductor(self) -> int:
        return self.f

    @property
    def disc(self) -> int:
        return self.f * self.f * self.field.disc

    @property
    def is_maximal(self) -> bool:
        return self.f == 1

    @property
    def basis(self) -> tuple[FieldElement, FieldElement]:
        return (self.field.one(), FieldElement(self.field, 0, self.f))

    @property
    def generator(self) -> FieldElement:
        """``f*omega``; together with 1 it generates the order as a ring."""
        return FieldElement(self.field, 0, self.f)

    def __contains__(self, x: FieldElement) -> bool:
        return x.a.denominator == 1 and x.b.denominator == 1 and x.b.numerator % self.f == 0

    def coords(self, x: FieldElement) -> tuple[int, int]:
        """Integer coordinates of ``x`` in the basis ``(1, f*omega)``."""
        if x not in self:
            raise ValueError(f"{x} is not in the order of conductor {self.f}")
        return (int(x.a), int(x.b) // self.f)

    def from_coords(self, c: Sequence[int]) -> FieldElement:
        return FieldElement(self.field, c[0], c[1] * self.f)

    def mult_matrix(self, x: FieldElement) -> list:
        """Integer matrix of ``y -> x*y`` on basis coordinates (row convention)."""
        return [list(self.coords(x * b)) for b in self.basis]

    def as_ideal(self) -> "FracIdeal":
        return FracIdeal(self.field, self.basis)

    def maximal_order(self) -> "QuadOrder":
        return QuadOrder(self.field, 1)

    def to_json(self) -> dict:
        return {"d": self.field.d, "f": self.f}

    def __repr__(self):
        return f"QuadOrder(d={self.field.d}, f={self.f})"


def purely_imaginary_generator(o: QuadOrder) -> FieldElement:
    """Canonical nonzero ``alpha`` in ``o`` with ``conj(alpha) = -alpha``: ``f*sqrt(d)``."""
    return o.field.sqrt_d * o.f


class FracIdeal:
    """Full-rank Z-lattice in an imaginary quadratic field.

    Stored canonically as the HNF of the coordinate matrix (w.r.t. ``1, omega``),
    so equality is equality of lattices.
    """

    def __init__(self, field: ImQuadField, gens: Iterable[FieldElement]):
        self.field = field
        rows = [list(g.coords()) for g in gens]
        lat = el.ZLattice.from_generators(rows, 2) if rows else el.ZLattice(2, ())
        if lat.rank != 2:
            raise ZeroIdeal("generators do not span a full-rank lattice")
        self._lat = lat

    @classmethod
    def _from_lattice(cls, field, lat: el.ZLattice) -> "FracIdeal":
        obj = object.__new__(cls)
        obj.field = field
        if lat.rank != 2:
            raise ZeroIdeal("not a full-rank lattice")
        obj._lat = lat
        return obj

    @classmethod
    def from_form(cls, order: QuadOrder, a: int, b: int) -> "FracIdeal":
        """Ideal ``a Z + (-b + sqrt D)/2 Z`` attached to the form ``(a, b, c)``."""
        F = order.field
        sqrtD = F.sqrt_d * (order.f * (1 if F.d_is_1_mod_4 else 2))
        return cls(F, [F(a), (sqrtD - b) / 2])

    @property
    def lattice(self) -> el.ZLattice:
        return self._lat

    @cached_property
    def basis(self) -> tuple[FieldElement, FieldElement]:
        return tuple(FieldElement(self.field, r[0], r[1]) for r in self._lat.basis)

    def __contains__(self, x: FieldElement) -> bool:
        return list(x.coords()) in self._lat

    def contains(self, other: "FracIdeal") -> bool:
        return self._lat.contains_lattice(other._lat)

    def __eq__(self, other):
        return isinstance(other, FracIdeal) and self.field == other.field and self._lat == other._lat

    def __hash__(self):
        return hash((self.field.d, self._lat))

    def scale(self, x: FieldElement) -> "FracIdeal":
        if not x:
            raise ZeroIdeal("scaling by zero")
        return FracIdeal(self.field, [x * b for b in self.basis])

    def conjugate(self) -> "FracIdeal":
        return FracIdeal(self.field, [b.conjugate() for b in self.basis])

    def covolume(self) -> Fraction:
        """|det| of the basis in omega-coordinates (relative to the maximal order)."""
        return abs(el.det([list(b.coords()) for b in self.basis]))

    def coords(self, x: FieldElement) -> list[int]:
        c = self._lat.coordinates([list(x.coords())])[0]
        if any(Fraction(t).denominator != 1 for t in c):
            raise NotSublattice(f"{x} not in lattice")
        return [int(t) for t in c]

    def to_json(self) -> list:
        return el.matrix_to_json(self._lat.basis)

    def __repr__(self):
        return f"FracIdeal(d={self.field.d}, basis={[str(b) for b in self.basis]})"


def ideal_mul(l: FracIdeal, m: FracIdeal) -> FracIdeal:
    return FracIdeal(l.field, [x * y for x in l.basis for y in m.basis])


def ideal_sum(l: FracIdeal, m: FracIdeal) -> FracIdeal:
    return FracIdeal(l.field, list(l.basis) + list(m.basis))


def ideal_intersection(l: FracIdeal, m: FracIdeal) -> FracIdeal:
    return FracIdeal._from_lattice(l.field, l.lattice.intersection(m.lattice))


def ideal_index(sub: FracIdeal, sup: FracIdeal) -> int:
    return el.lattice_index(sub.lattice, sup.lattice)


def colon_ideal(l: FracIdeal, m: FracIdeal) -> FracIdeal:
    """``(l : m) = {x in F : x*m in l}``, the intersection of ``mu^-1 l`` over a basis of ``m``."""
    out = None
    for mu in m.basis:
        piece = l.scale(mu.inverse())
        out = piece if out is None else ideal_intersection(out, piece)
    return out


def multiplier_ring(l: FracIdeal) -> QuadOrder:
    """The order ``{x : x*l in l}`` for which ``l`` is proper."""
    ring = colon_ideal(l, l)
    (a0, a1), (b0, b1) = ring.lattice.basis
    # HNF of an order's coordinates is [[1, 0], [0, f]]
    if (a0, a1, b0) != (1, 0, 0):
        raise AssertionError(f"multiplier ring has unexpected basis {ring.lattice.basis}")
    return QuadOrder(l.field, int(b1))


def is_proper(l: FracIdeal, o: QuadOrder) -> bool:
    return multiplier_ring(l) == o
