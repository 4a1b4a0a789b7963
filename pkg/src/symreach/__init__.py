"""Reachability of single-mode symplectic transformations under quadratic control."""

from .certificate import f_of_matrix, fz_of_triple, min_z_for_f
from .errors import SymreachError
from .euler import EulerTriple, RangeOffsets, compose, decompose, identity_limit_triple
from .normal_form import ControlSystem, NormalForm, example_system, is_unstable, normalize
from .pulse import OptimResult, Pulse, PulseProblem, Status, optimize, propagate
from .sp2 import KX, KY, KZ, OMEGA, StabilityClass, classify, expm

__version__ = "0.1.0"

__all__ = [
    "KX", "KY", "KZ", "OMEGA",
    "ControlSystem", "EulerTriple", "NormalForm", "OptimResult", "Pulse", "PulseProblem",
    "RangeOffsets", "StabilityClass", "Status", "SymreachError",
    "classify", "compose", "decompose", "example_system", "expm", "f_of_matrix", "fz_of_triple",
    "identity_limit_triple", "is_unstable", "min_z_for_f", "normalize", "optimize", "propagate",
]
