"""Fast built-in invariant checks used by ``serrehom selftest``."""
from __future__ import annotations

import random

from .class_poly import hilbert_class_poly, j_from_tau, reduced_forms
from .gmodules import (conductor_sequence, decompose_C2, free_module, norm_sequence,
                       regular_rational_module, unit_module)
from .lattice_tori import CMCurve, apply_ses, hom_torus, maximal_order_isogeny, res_torus
from .quad_orders import ImQuadField
from .twisted_ring import C2, TwistedRing


def _ring_axioms() -> bool:
    rng = random.Random(7)
    o = ImQuadField(-1).maximal_order()
    R = TwistedRing(o, C2("conj"))

    def rnd():
        return R.from_zcoords([rng.randint(-5, 5) for _ in range(R.zrank)])

    for _ in range(50):
        a, b, c = rnd(), rnd(), rnd()
        if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c:
            return False
    s, one = R.sigma, R.one
    return ((s + one) * (s - one)).is_zero()


def _functor_unit() -> bool:
    e = CMCurve.from_order(ImQuadField(-1).order(2))
    ok1 = hom_torus(unit_module(e.ring), e).torus.lattice == e.as_torus().lattice
    ok2 = hom_torus(free_module(e.ring), e).torus == res_torus(e)
    return ok1 and ok2


def _max_isogeny() -> bool:
    for d, f in [(-1, 2), (-3, 3)]:
        cert = maximal_order_isogeny(CMCurve.from_order(ImQuadField(d).order(f)))
        if not (cert.ok and cert.degree == f):
            return False
    return True


def _exactness() -> bool:
    e = CMCurve.from_order(ImQuadField(-1).order(2))
    return apply_ses(*conductor_sequence(e.ring), e).exact and apply_ses(*norm_sequence(e.ring), e).exact


def _decomposition() -> bool:
    dec = decompose_C2(regular_rational_module(ImQuadField(-1), "trivial"))
    return (dec.r, dec.r_prime) == (1, 1)


def _class_poly() -> bool:
    if len(reduced_forms(-23)) != 3:
        return False
    if hilbert_class_poly(-15).coeffs != (-121287375, 191025, 1):
        return False
    return abs(j_from_tau(1j, 200).value - 1728) < 1e-30


CHECKS = [
    ("twisted ring axioms", _ring_axioms),
    ("functor on R and R<G>", _functor_unit),
    ("maximal order isogeny", _max_isogeny),
    ("exactness of Hom(-, E)", _exactness),
    ("C2 decomposition", _decomposition),
    ("class polynomials", _class_poly),
]


def run_selftest() -> list[tuple[str, bool]]:
    out = []
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception:  # a crash is a failed check, reported by name
            ok = False
        out.append((name, ok))
    return out
