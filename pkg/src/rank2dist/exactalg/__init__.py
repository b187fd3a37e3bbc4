from .jet import Jet, jet_arith, schwarzian
from .linalg import kernel, rank, rat_linalg, rref, solve
from .mpoly import MPoly, PolyVF, lie_bracket, parse_field, parse_poly
from .mseries import MSeries
from .scalars import FLOAT_PIVOT_TOL, Rat, exact_root, is_zero, rat

__all__ = [
    "Jet",
    "jet_arith",
    "schwarzian",
    "kernel",
    "rank",
    "rat_linalg",
    "rref",
    "solve",
    "MPoly",
    "MSeries",
    "PolyVF",
    "lie_bracket",
    "parse_field",
    "parse_poly",
    "FLOAT_PIVOT_TOL",
    "Rat",
    "exact_root",
    "is_zero",
    "rat",
]
