from .curve import (
    ExtractedCurve,
    JacobiJet,
    RoundTrip,
    curvature_roundtrip,
    default_order,
    extract_curve_ode,
    jacobi_curve,
)
from .flow import FlowJet, flow_jet, flow_residual, lifted_frame
from .frame import FrameReport, verify_frame_relations

__all__ = [
    "ExtractedCurve",
    "JacobiJet",
    "RoundTrip",
    "curvature_roundtrip",
    "default_order",
    "extract_curve_ode",
    "jacobi_curve",
    "FlowJet",
    "flow_jet",
    "flow_residual",
    "lifted_frame",
    "FrameReport",
    "verify_frame_relations",
]
