"""Measurement-based teleportation along quantum spin chains.

Dense state-vector tools for Bell-subspace classification of spin-chain
states, ground-state channel construction, chained Bell-measurement
teleportation with fidelity analysis, and the qudit (Weyl) generalisation.
"""

from bellchain.errors import (
    BellChainError,
    DimensionError,
    IntegrityError,
    SolverError,
    ValidationError,
)
from bellchain.qstate import PureState

__all__ = [
    "BellChainError",
    "DimensionError",
    "IntegrityError",
    "PureState",
    "SolverError",
    "ValidationError",
]

__version__ = "0.1.0"
