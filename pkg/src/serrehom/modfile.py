"""Text format for presented modules.

Grammar (one directive per line, ``#`` starts a comment)::

    ring: ZZ | order D=<disc> | order d=<d> f=<f>
    group: C1 | C2 conj | C2 trivial
    generators: <n>
    relations:
      <expr>, <expr>, ...      # one row per line, n entries each

``ring`` and ``group`` are optional when the caller supplies them.  Entries
are twisted-ring expressions built from integers, ``w`` (omega), ``i``
(``sqrt(-1)``, only for ``d = -1``), ``s`` (sigma), ``+ - *`` and
parentheses, e.g. ``2*s + (1+i)``.  Expressions are evaluated over the field
and must land in the order.
"""
from __future__ import annotations

import ast
import re
from typing import Optional

from .errors import ParseError, RingMismatch
from .quad_orders import ImQuadField, QuadOrder
from .twisted_ring import ZZ, GaloisGroup, TwistedMatrix, TwistedRing, TwistedRingElement
from .gmodules import PresentedModule


def parse_ring_spec(text: str):
    t = text.strip()
    if t in ("ZZ", "Z"):
        return ZZ
    m = re.fullmatch(r"order\s+D\s*=\s*(-?\d+)", t)
    if m:
        try:
            return QuadOrder.from_discriminant(int(m.group(1)))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    m = re.fullmatch(r"order\s+d\s*=\s*(-?\d+)\s+f\s*=\s*(\d+)", t)
    if m:
        try:
            return ImQuadField(int(m.group(1))).order(int(m.group(2)))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"unrecognised ring {text!r}")


def parse_group_spec(text: str) -> GaloisGroup:
    parts = text.split()
    if parts == ["C1"]:
        return GaloisGroup(1, "trivial")
    if len(parts) == 2 and parts[0] == "C2" and parts[1] in ("conj", "trivial"):
        return GaloisGroup(2, parts[1])
    raise ParseError(f"unrecognised group {text!r}")


class _Evaluator:
    def __init__(self, ring: TwistedRing):
        self.ring = ring
        coeff = ring.coeff_ring
        self.field = coeff.field if isinstance(coeff, QuadOrder) else None
        self.work = TwistedRing(self.field, ring.group) if self.field else ring
        names = {}
        if self.field is not None:
            names["w"] = self.work.scalar(self.field.omega)
            if self.field.d == -1:
                names["i"] = self.work.scalar(self.field.omega)
        if ring.group.order == 2:
            names["s"] = self.work.sigma
        self.names = names

    def __call__(self, src: str) -> TwistedRingElement:
        try:
            tree = ast.parse(src.strip(), mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"bad expression {src!r}") from exc
        val = self._eval(tree.body, src)
        try:
            return TwistedRingElement(self.ring, val.coeffs)
        except RingMismatch as exc:
            raise ParseError(f"{src!r} is not in {self.ring.tag}") from exc

    def _eval(self, node, src):
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return self.work.scalar(node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.names:
                raise ParseError(f"unknown symbol {node.id!r} in {src!r}")
            return self.names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self._eval(node.operand, src)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            a, b = self._eval(node.left, src), self._eval(node.right, src)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            return a * b
        raise ParseError(f"unsupported syntax in {src!r}")


def parse_element(ring: TwistedRing, src: str) -> TwistedRingElement:
    return _Evaluator(ring)(src)


def parse_module(text: str, *, ring=None, group: Optional[GaloisGroup] = None) -> PresentedModule:
    """Parse the module format; ``ring``/``group`` fill in or must match the file."""
    file_ring = file_group = None
    ngens = None
    rows: list[str] = []
    in_rel = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        key = key.strip().lower()
        if sep and key in ("ring", "group", "generators", "relations"):
            in_rel = False
            if key == "ring":
                file_ring = parse_ring_spec(val)
            elif key == "group":
                file_group = parse_group_spec(val)
            elif key == "generators":
                try:
                    ngens = int(val)
                except ValueError as exc:
                    raise ParseError(f"line {lineno}: generator count must be an integer") from exc
                if ngens < 0:
                    raise ParseError(f"line {lineno}: negative generator count")
            else:
                in_rel = True
                if val.strip():
                    rows.append(val)
            continue
        if in_rel:
            rows.append(line)
        else:
            raise ParseError(f"line {lineno}: unexpected text {line!r}")
    if ngens is None:
        raise ParseError("missing 'generators:' line")
    coeff = _merge("ring", file_ring, ring)
    grp = _merge("group", file_group, group)
    if coeff is None:
        raise ParseError("no ring given (file or caller)")
    if grp is None:
        grp = GaloisGroup(2, "trivial" if coeff == ZZ else "conj")
    R = TwistedRing(coeff, grp)
    ev = _Evaluator(R)
    mat = []
    for row in rows:
        entries = [e for e in re.split(r"[,;]", row)]
        if len(entries) != ngens:
            raise ParseError(f"relation row {row!r} has {len(entries)} entries, expected {ngens}")
        mat.append([ev(e) for e in entries])
    return PresentedModule(R, TwistedMatrix(R, mat, ngens), name="file")


def _merge(what, from_file, from_caller):
    if from_file is None:
        return from_caller
    if from_caller is None:
        return from_file
    if what == "group":
        same = from_file.order == from_caller.order and (
            from_file.action == from_caller.action or from_file.order == 1)
    else:
        same = from_file == from_caller
    if not same:
        raise ParseError(f"{what} in file ({from_file}) does not match the command line ({from_caller})")
    return from_file
