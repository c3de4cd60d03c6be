import os

import pytest

from serrehom.errors import ParseError
from serrehom.gmodules import flatten, rank_over_R
from serrehom.modfile import parse_element, parse_module
from serrehom.quad_orders import ImQuadField
from serrehom.twisted_ring import C2, ZZ, TwistedRing

MODDIR = os.path.join(os.path.dirname(__file__), "..", "modules")


def test_parse_expression():
    F = ImQuadField(-1)
    R = TwistedRing(F.maximal_order(), C2("conj"))
    x = parse_element(R, "2*s + (1+i)")
    assert x == R.scalar(F(1, 1)) + R.sigma + R.sigma
    assert parse_element(R, "s*i") == R.scalar(-F.omega) * R.sigma
    assert parse_element(R, "-(s - 1)") == R.one - R.sigma


def test_expression_errors():
    F = ImQuadField(-1)
    R = TwistedRing(F.order(2), C2("conj"))
    assert parse_element(R, "2*w") == R.scalar(F.omega * 2)
    with pytest.raises(ParseError):
        parse_element(R, "w")          # omega is not in Z[2i]
    with pytest.raises(ParseError):
        parse_element(R, "x + 1")
    with pytest.raises(ParseError):
        parse_element(R, "2 / s")
    with pytest.raises(ParseError):
        parse_element(TwistedRing(ZZ, C2("trivial")), "w")


def test_parse_module_text():
    text = "ring: order D=-16\ngroup: C2 trivial\ngenerators: 2\nrelations:\n  s - 1, 0\n"
    m = parse_module(text)
    assert m.ngens == 2 and m.nrels == 1
    assert m.ring.group.action == "trivial" and m.ring.coeff_ring.f == 2
    assert rank_over_R(m) == 3


def test_parse_module_defaults_and_mismatch():
    o = ImQuadField(-1).order(2)
    m = parse_module("generators: 1\nrelations:\n", ring=o)
    assert m.ring.group.action == "conj" and m.nrels == 0
    with pytest.raises(ParseError):
        parse_module("ring: order D=-4\ngenerators: 1\n", ring=o)
    with pytest.raises(ParseError):
        parse_module("group: C2 trivial\ngenerators: 1\n", ring=o, group=C2("conj"))
    with pytest.raises(ParseError):
        parse_module("generators: 2\nrelations:\n 1\n", ring=o)
    with pytest.raises(ParseError):
        parse_module("relations:\n 1\n", ring=o)
    with pytest.raises(ParseError):
        parse_module("generators: 1\nbogus line\n", ring=o)
    assert parse_module("ring: ZZ\ngenerators: 1\n").ring.group.action == "trivial"


@pytest.mark.parametrize("name,rank,torsion", [
    ("twist.mod", 1, []), ("unit_plus_regular.mod", 3, []), ("gaussian_quotient.mod", 0, [2, 2]),
])
def test_shipped_module_files(name, rank, torsion):
    with open(os.path.join(MODDIR, name)) as fh:
        text = fh.read()
    o = ImQuadField(-1).maximal_order()
    m = parse_module(text, ring=o, group=C2("conj"))
    assert rank_over_R(m) == rank and flatten(m).torsion == torsion
