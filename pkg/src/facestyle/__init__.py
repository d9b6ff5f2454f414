"""Numerical toolkit for 3D facial-motion style: metrics, losses, style primitives, synthetic benchmark."""

from .errors import FaceStyleError
from .kernels import BACKEND
from .motion import FaceTemplate, MotionSequence, RegionMask, read_fmot, read_mask, write_fmot

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FaceStyleError",
    "FaceTemplate",
    "MotionSequence",
    "RegionMask",
    "read_fmot",
    "read_mask",
    "write_fmot",
]
