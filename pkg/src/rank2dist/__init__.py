"""Rank 2 distributions of maximal class: projective invariants of curves,
symplectic curvatures, and the Jacobi-curve pipeline for the model systems."""
from . import classify, exactalg, jacobi, models, projcurve
from .classify import alphas, compatible_normalization, equivalent_tuples, is_exceptional, moduli_report
from .errors import Rank2Error
from .jacobi import curvature_roundtrip, verify_frame_relations
from .models import build_model, cotangent_lift, default_point, growth_vector
from .projcurve import CurveODE, ode_from_curvatures, symplectic_curvatures, wilczynski, wilczynski_forms

__version__ = "0.1.0"

__all__ = [
    "classify",
    "exactalg",
    "jacobi",
    "models",
    "projcurve",
    "alphas",
    "compatible_normalization",
    "equivalent_tuples",
    "is_exceptional",
    "moduli_report",
    "Rank2Error",
    "curvature_roundtrip",
    "verify_frame_relations",
    "build_model",
    "cotangent_lift",
    "default_point",
    "growth_vector",
    "CurveODE",
    "ode_from_curvatures",
    "symplectic_curvatures",
    "wilczynski",
    "wilczynski_forms",
]
