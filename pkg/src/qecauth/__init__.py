"""Keyed quantum-authentication code families analyzed in the binary-symplectic picture."""

__version__ = "0.1.0"

from .symplectic import (  # noqa: F401
    DetectionClass,
    DimensionMismatch,
    PauliOp,
    SymplecticCircuit,
    TagLayout,
    classify,
    conjugate,
    sip,
    weights,
)
