"""Random generators shared by the tests."""
import random
from fractions import Fraction

from serrehom.class_poly import reduced_forms
from serrehom.gmodules import (PresentedModule, free_module, ideal_module, unit_module)
from serrehom.quad_orders import FieldElement, FracIdeal, ImQuadField
from serrehom.twisted_ring import C2, ZZ, TwistedMatrix, TwistedRing

SMALL_D = [-1, -2, -3, -5, -6, -7, -11, -15, -19, -23]


def random_order(rng, fmax=4):
    return ImQuadField(rng.choice(SMALL_D)).order(rng.randint(1, fmax))


def random_element(rng, R, bound=4):
    return R.from_zcoords([rng.randint(-bound, bound) for _ in range(R.zrank)])


def random_proper_ideal(rng, order):
    """A random proper ideal of ``order`` (primitive form, random rational scale)."""
    forms = reduced_forms(order.disc)
    q = rng.choice(forms)
    lat = FracIdeal.from_form(order, q.a, q.b)
    scale = FieldElement(order.field, Fraction(rng.randint(1, 5), rng.randint(1, 3)))
    return lat.scale(scale)


def random_conj_stable_ideal(rng, order):
    """Random ideal with ``conj(I) = I``: an ambiguous form lattice times a rational."""
    f = order.f
    gen = order.generator
    a = rng.randint(1, 4)
    # lattices aZ + (f*omega + k)Z that happen to be conjugation-stable O-modules
    cands = []
    for k in range(a):
        lat = FracIdeal(order.field, [FieldElement(order.field, a), gen + k])
        if lat.conjugate() == lat and _is_module(lat, order):
            cands.append(lat)
    lat = rng.choice(cands) if cands else order.as_ideal()
    return lat.scale(FieldElement(order.field, Fraction(rng.randint(1, 4), rng.randint(1, 3))))


def _is_module(lat, order):
    return all(order.generator * b in lat for b in lat.basis)


def random_module(rng, R, max_gens=2, max_rels=2, bound=2):
    n = rng.randint(1, max_gens)
    m = rng.randint(0, max_rels)
    rows = [[random_element(rng, R, bound) for _ in range(n)] for _ in range(m)]
    return PresentedModule(R, TwistedMatrix(R, rows, n), name="random")


def twist_module(R):
    """``R<G> / R<G>(1 + sigma)``: R with sigma acting as minus the coefficient action."""
    return PresentedModule(R, TwistedMatrix(R, [[R.one + R.sigma]]), name="twist")


def direct_sum(R, mods):
    rows = []
    n = sum(m.ngens for m in mods)
    off = 0
    for m in mods:
        for row in m.presentation.rows:
            full = [R.zero] * n
            for j, x in enumerate(row):
                full[off + j] = x
            rows.append(full)
        off += m.ngens
    return PresentedModule(R, TwistedMatrix(R, rows, n), name="sum")


def change_generators(rng, m, steps=3):
    """Isomorphic module via random elementary generator changes ``X -> X @ E``."""
    R = m.ring
    n = m.ngens
    X = m.presentation
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        r = random_element(rng, R, 2)
        E = TwistedMatrix.identity(R, n)
        rows = [list(row) for row in E.rows]
        rows[i][j] = r
        X = X @ TwistedMatrix(R, rows, n)
    return PresentedModule(R, X, name="changed")


def random_torsion_free(rng, R, max_rank=3):
    """Sum of free, unit, twist and ideal summands with total R-rank <= max_rank."""
    parts, rank = [], 0
    while True:
        choice = rng.choice(["free", "unit", "twist", "ideal"])
        r = 2 if choice == "free" else 1
        if rank + r > max_rank:
            if parts:
                break
            continue
        if choice == "free":
            parts.append(free_module(R))
        elif choice == "unit":
            parts.append(unit_module(R))
        elif choice == "twist":
            parts.append(twist_module(R))
        else:
            order = R.coeff_ring
            if R.group.action == "conj":
                parts.append(ideal_module(R, random_conj_stable_ideal(rng, order)))
            else:
                parts.append(ideal_module(R, random_proper_ideal(rng, order), sign=rng.choice([1, -1])))
        rank += r
        if rng.random() < 0.4:
            break
    return change_generators(rng, direct_sum(R, parts)), rank
