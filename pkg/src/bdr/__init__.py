"""Soliton surfaces of the binormal-direction (B-DR) flow in E^4.

Pipeline: :mod:`surface` (definitions and exact jets) -> :mod:`ptframe`
(parallel transport frames, curvatures) -> :mod:`invariants` (fundamental
forms, K, H, K_N, ...) -> :mod:`classify` (curvature-ellipse classes).
"""
from .classify import PointClass, classify_grid, classify_point, surface_predicates
from .errors import (
    BadDomain,
    BDRError,
    DefinitionError,
    DegenerateInput,
    DegenerateNormalSpace,
    DegeneratePoint,
    DomainError,
    DriftExceeded,
    NotUnitSpeed,
    ParseError,
    UnknownIdentifier,
)
from .invariants import Analysis, InvariantGrid, InvariantReport, analyze, synthetic_report
from .ptframe import CurvatureField, Frame, FrameField, curvatures, initial_frame, propagate_t
from .surface import SurfaceDef, load_surface, loads_surface, make_surface

__version__ = "0.1.0"
