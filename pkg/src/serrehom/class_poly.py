"""Reduced forms, j-invariants from q-series, Hilbert class polynomials.

Each evaluation runs in its own mpmath context so that concurrent calls never
share a global precision setting.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from mpmath.ctx_mp import MPContext

from .errors import (BadDiscriminant, NotUpperHalfPlane, PrecisionExhausted,
                     PrecisionUnachievable, ZeroIdeal)
from .quad_orders import FieldElement, FracIdeal, ImQuadField, QuadOrder

DEFAULT_PREC_BITS = 512
MAX_ABS_D = 10 ** 6
ROUNDING_THRESHOLD = 1e-10
MAX_RETRIES = 5
MAX_TERMS = 200_000


def default_precision() -> int:
    raw = os.environ.get("SERREHOM_PREC_BITS")
    if raw is None:
        return DEFAULT_PREC_BITS
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(f"SERREHOM_PREC_BITS must be an integer, got {raw!r}") from exc
    if bits < 16:
        raise ValueError("SERREHOM_PREC_BITS must be at least 16")
    return bits


def new_context(bits: int) -> MPContext:
    ctx = MPContext()
    ctx.prec = bits
    return ctx


# ----------------------------------------------------------------------------
# forms

def check_discriminant(D: int, max_abs: int = MAX_ABS_D) -> None:
    if not isinstance(D, int) or D >= 0 or D % 4 not in (0, 1):
        raise BadDiscriminant(f"{D} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")
    if -D > max_abs:
        raise BadDiscriminant(f"|D| = {-D} exceeds the configured limit {max_abs}")


@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(self.a, math.gcd(self.b, self.c))

    @property
    def is_primitive(self) -> bool:
        return self.content == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 or (abs(b) != a and a != c)

    def tau_exact(self) -> tuple[Fraction, Fraction]:
        """``(Re tau, Im tau ** 2)`` of ``tau = (-b + sqrt(D)) / 2a``."""
        return Fraction(-self.b, 2 * self.a), Fraction(-self.disc, 4 * self.a * self.a)

    def tau(self, ctx: MPContext):
        return ctx.mpc(ctx.mpf(-self.b) / (2 * self.a), ctx.sqrt(-self.disc) / (2 * self.a))

    def to_json(self) -> list:
        return [str(self.a), str(self.b), str(self.c)]


def reduced_forms(D: int, *, primitive: bool = True, max_abs: int = MAX_ABS_D) -> list[ReducedForm]:
    """All reduced forms of discriminant ``D`` (primitive ones by default), sorted."""
    check_discriminant(D, max_abs)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = ReducedForm(a, b, c)
            if not f.is_reduced():
                continue
            if primitive and not f.is_primitive:
                continue
            out.append(f)
    return sorted(out)


def class_number(D: int) -> int:
    return len(reduced_forms(D))


# ----------------------------------------------------------------------------
# j-invariant

@dataclass(frozen=True)
class BigComplex:
    value: object
    prec: int

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __complex__(self):
        return complex(self.value)


def _reduce_tau(ctx, tau):
    """Move ``tau`` into the standard fundamental domain numerically."""
    for _ in range(10_000):
        tau = tau - ctx.floor(tau.real + ctx.mpf(0.5))
        if abs(tau) < 1:
            tau = -1 / tau
        else:
            return tau
    raise PrecisionUnachievable("reduction of tau did not terminate")


def q_terms_needed(q_abs: float, bits: int) -> int:
    """Smallest N with ``(N+1)^3 |q|^(N+1) / (1-|q|)^2 < 2^-bits``.

    Bounds the tail of the Lambert series for E4; the pentagonal series for the
    eta product converges faster.
    """
    if q_abs <= 0:
        return 1
    lq = math.log2(q_abs)
    pad = -2 * math.log2(1 - q_abs)
    n = 1
    while 3 * math.log2(n + 1) + (n + 1) * lq + pad > -bits:
        n += 1
        if n > MAX_TERMS:
            raise PrecisionUnachievable(f"q-series needs more than {MAX_TERMS} terms")
    return n


def _j_in_ctx(ctx, tau, bits: int):
    if tau.imag <= 0:
        raise NotUpperHalfPlane("tau must have positive imaginary part")
    tau = _reduce_tau(ctx, tau)
    q = ctx.expjpi(2 * tau)
    qa = float(abs(q))
    n = q_terms_needed(qa, bits)
    # E4 = 1 + 240 sum n^3 q^n / (1 - q^n)
    s = ctx.mpc(0)
    qn = ctx.mpc(1)
    for k in range(1, n + 1):
        qn *= q
        s += k ** 3 * qn / (1 - qn)
    e4 = 1 + 240 * s
    # prod (1 - q^n) by the pentagonal number theorem
    eps = ctx.ldexp(1, -bits)
    p = ctx.mpc(1)
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        t1 = q ** e1
        t2 = t1 * q ** k
        sign = -1 if k % 2 else 1
        p += sign * (t1 + t2)
        if abs(t1) < eps:
            break
        k += 1
    delta = q * p ** 24
    return e4 ** 3 / delta


def j_from_tau(tau, precision: Optional[int] = None) -> BigComplex:
    """``j(tau) = E4^3 / Delta`` with ``Delta = q * prod (1 - q^n)^24``."""
    bits = precision or default_precision()
    ctx = new_context(bits + 64)
    t = ctx.mpc(tau.value if isinstance(tau, BigComplex) else tau)
    if t.imag <= 0:
        raise NotUpperHalfPlane("tau must have positive imaginary part")
    # |j| ~ |q|^-1 needs extra bits for absolute accuracy; reduction keeps Im below max(y, 1/y)
    y = float(t.imag)
    extra = int(2 * math.pi * max(y, 1 / y, 1) / math.log(2)) + 32
    ctx.prec = bits + extra + 64
    t = ctx.mpc(tau.value if isinstance(tau, BigComplex) else tau)
    val = _j_in_ctx(ctx, t, bits + extra)
    return BigComplex(val, bits)


# ----------------------------------------------------------------------------
# lattices to tau

def _im_sign(x: FieldElement) -> int:
    # Im(a + b*omega) = b * Im(omega) with Im(omega) > 0
    return (x.b > 0) - (x.b < 0)


def _re(x: FieldElement) -> Fraction:
    return x.trace() / 2


def _form_of(tau: FieldElement) -> ReducedForm:
    tr, nm = tau.trace(), tau.norm()
    den = math.lcm(tr.denominator, nm.denominator)
    a, b, c = den, -tr * den, nm * den
    g = math.gcd(int(a), math.gcd(int(b), int(c)))
    return ReducedForm(int(a) // g, int(b) // g, int(c) // g)


def reduce_tau_exact(tau: FieldElement) -> FieldElement:
    """Exact reduction into ``-1/2 <= Re < 1/2``, ``|tau| >= 1``, ``Re <= 0`` on the circle."""
    while True:
        shift = math.floor(_re(tau) + Fraction(1, 2))
        tau = tau - shift
        nm = tau.norm()
        if nm < 1 or (nm == 1 and _re(tau) > 0):
            tau = -(1 / tau)
            continue
        return tau


def tau_of_lattice(l: FracIdeal, precision: Optional[int] = None):
    """Homothety representative ``(1, tau)`` of ``l`` with reduced ``tau``.

    Returns ``(BigComplex tau, ReducedForm, exact tau)``.
    """
    if not l.basis or l.lattice.rank < 2:
        raise ZeroIdeal("lattice must be nonzero of rank two")
    w1, w2 = l.basis
    tau = w2 / w1
    if _im_sign(tau) < 0:
        tau = -tau
    tau = reduce_tau_exact(tau)
    form = _form_of(tau)
    bits = precision or default_precision()
    ctx = new_context(bits + 32)
    val = tau.field.embed(tau, ctx)
    return BigComplex(val, bits), form, tau


# ----------------------------------------------------------------------------
# class polynomials

@dataclass(frozen=True)
class ClassPolynomial:
    D: int
    coeffs: tuple      # constant term first, monic
    precision: int
    residue: float

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0 and k != self.degree:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            mag = abs(c)
            body = mono if (mag == 1 and k) else (f"{mag}*{mono}" if mono else str(mag))
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        return {"D": self.D, "coeffs": [str(c) for c in self.coeffs]}


def _log2_j_bound(f: ReducedForm) -> float:
    return math.pi * math.sqrt(-f.disc) / f.a / math.log(2) + 12


def _expand(ctx, roots):
    poly = [ctx.mpc(1)]
    for r in roots:
        nxt = [ctx.mpc(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] += c
            nxt[k] -= r * c
        poly = nxt
    return poly


def _attempt(D, forms, bits, threads):
    def one(f):
        ctx = new_context(bits + 64)
        return f, j_from_tau(f.tau(ctx), bits).value

    if threads and threads > 1 and len(forms) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            pairs = list(ex.map(one, forms))
    else:
        pairs = [one(f) for f in forms]
    pairs.sort(key=lambda p: p[0])
    ctx = new_context(bits + 64)
    poly = _expand(ctx, [ctx.mpc(v) for _, v in pairs])
    coeffs, residue = [], 0.0
    for c in poly:
        n = int(ctx.nint(c.real))
        residue = max(residue, float(abs(c - n)))
        coeffs.append(n)
    return tuple(coeffs), residue


def hilbert_class_poly(D: int, precision: Optional[int] = None, *, max_retries: int = MAX_RETRIES,
                       threshold: float = ROUNDING_THRESHOLD, max_abs: int = MAX_ABS_D,
                       threads: Optional[int] = None) -> ClassPolynomial:
    """Product of ``x - j(tau_Q)`` over reduced primitive forms, rounded to integers.

    Precision starts at the requested value (raised to cover the size of the
    largest coefficient) and doubles until the rounding residue is below
    ``threshold``.
    """
    forms = reduced_forms(D, max_abs=max_abs)
    need = int(sum(_log2_j_bound(f) for f in forms)) + 64
    bits = max(precision or default_precision(), need)
    last = None
    for _ in range(max_retries + 1):
        coeffs, residue = _attempt(D, forms, bits, threads)
        last = residue
        if residue < threshold:
            return ClassPolynomial(D, coeffs, bits, residue)
        bits *= 2
    raise PrecisionExhausted(f"H_{D}: rounding residue {last} after {max_retries} retries")


@dataclass(frozen=True)
class CMVerification:
    D: int
    j: BigComplex
    residue: float
    passed: bool
    j_rounded: Optional[int]
    form: ReducedForm

    def to_json(self) -> dict:
        return {"D": self.D, "residue": f"{self.residue:.3e}", "passed": self.passed,
                "j": None if self.j_rounded is None else str(self.j_rounded),
                "form": self.form.to_json()}


def verify_cm_j(l: FracIdeal, o: QuadOrder, *, precision_bits: Optional[int] = None,
                threshold: float = ROUNDING_THRESHOLD, threads: Optional[int] = None) -> CMVerification:
    """Evaluate ``H_disc(o)`` at ``j(l)``; residue is relative to the coefficient scale."""
    H = hilbert_class_poly(o.disc, precision_bits, threads=threads)
    tau, form, _ = tau_of_lattice(l, H.precision)
    j = j_from_tau(tau, H.precision)
    ctx = new_context(H.precision + 64)
    jv = ctx.mpc(j.value)
    val = ctx.mpc(0)
    scale = ctx.mpf(0)
    for c in reversed(H.coeffs):
        val = val * jv + c
        scale = scale * abs(jv) + abs(c)
    residue = float(abs(val) / scale)
    n = int(ctx.nint(jv.real))
    j_int = n if abs(jv - n) < threshold else None
    return CMVerification(o.disc, j, residue, residue < threshold, j_int, form)
