"""fermiforge: an end-to-end quantum chemistry workflow toolkit.

Backend-agnostic circuits, sparse operator algebra, fermion-to-qubit
mappings, a noisy shot-based statevector simulator, a VQE engine with the
QCC ansatz, measurement grouping and shot estimation, error-mitigation and
bootstrap post-processing, and ONIOM / method-of-increments energy
recombination.  Everything runs on file inputs and a CLI with no external
quantum SDK or mean-field chemistry package.
"""

__version__ = "0.1.0"

from .circuits import SUPPORTED_GATES, Circuit, Gate, stack
from .errors import (ConvergenceError, FermiforgeError, LifecycleError,
                     SimulationError, SymmetryError, UnsupportedGateError,
                     ValidationError)
from .mappings import MappingConfig, exact_ground_energy, fermion_to_qubit_mapping
from .operators import FermionOperator, QubitOperator
from .simulator import (BackendConfig, NoiseModel, backend_info,
                        get_expectation_value, simulate)

__all__ = [
    "__version__",
    "Gate",
    "Circuit",
    "stack",
    "SUPPORTED_GATES",
    "QubitOperator",
    "FermionOperator",
    "MappingConfig",
    "fermion_to_qubit_mapping",
    "exact_ground_energy",
    "BackendConfig",
    "NoiseModel",
    "simulate",
    "get_expectation_value",
    "backend_info",
    "FermiforgeError",
    "ValidationError",
    "UnsupportedGateError",
    "SimulationError",
    "SymmetryError",
    "LifecycleError",
    "ConvergenceError",
]
