"""Exact lattice models for Hom functors from modules over twisted group rings into CM elliptic curves."""

__version__ = "0.1.0"

from .errors import SerreHomError  # noqa: E402
from .quad_orders import FieldElement, FracIdeal, ImQuadField, QuadOrder  # noqa: E402
from .twisted_ring import C1, C2, ZZ, GaloisGroup, TwistedMatrix, TwistedRing, TwistedRingElement  # noqa: E402
from .gmodules import FlatModel, PresentedModule, flatten, hom_module, rank_over_R  # noqa: E402
from .lattice_tori import (CMCurve, LatticeTorus, apply_ses, hom_ideal, hom_torus,  # noqa: E402
                           maximal_order_isogeny, res_torus)
from .class_poly import hilbert_class_poly, j_from_tau, reduced_forms  # noqa: E402

__all__ = [
    "SerreHomError", "FieldElement", "FracIdeal", "ImQuadField", "QuadOrder",
    "C1", "C2", "ZZ", "GaloisGroup", "TwistedMatrix", "TwistedRing", "TwistedRingElement",
    "FlatModel", "PresentedModule", "flatten", "hom_module", "rank_over_R",
    "CMCurve", "LatticeTorus", "apply_ses", "hom_ideal", "hom_torus", "maximal_order_isogeny",
    "res_torus", "hilbert_class_poly", "j_from_tau", "reduced_forms",
]
