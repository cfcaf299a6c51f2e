"""Information preservation in stabilizer and subsystem codes under random Pauli measurements."""
from __future__ import annotations

from .codes import (
    CodeSpec,
    LatticeGeometry,
    bacon_shor,
    color_triangular,
    five_qubit,
    reed_muller_15,
    steane,
    toric,
    validate,
)
from .monitor import (
    MeasurementPattern,
    ProbabilityVector,
    Verdict,
    commuting_representative,
    erasure_correctable,
    measured_centralizer_basis,
    preservation_verdict,
    sample_pattern,
)
from .pauli import GeneratorSet, PauliOp, commutes, multiply

__version__ = "0.1.0"
