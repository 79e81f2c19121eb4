"""Stabilizer simulation substrate: full tableau and Pauli-frame backends."""

from .circuit import Circuit, Op
from .frame import (
    FrameSample,
    NoiseModel,
    PauliFrame,
    propagate,
    reference_outcomes,
    sample_frame,
    sample_outcomes_frame,
    sample_outcomes_tableau,
)
from .tableau import Pauli, Tableau, apply_clifford, apply_op, measure_pauli

__all__ = [
    "Circuit",
    "FrameSample",
    "NoiseModel",
    "Op",
    "Pauli",
    "PauliFrame",
    "Tableau",
    "apply_clifford",
    "apply_op",
    "measure_pauli",
    "propagate",
    "reference_outcomes",
    "sample_frame",
    "sample_outcomes_frame",
    "sample_outcomes_tableau",
]
