"""Recovery of rational function vectors from partially erroneous evaluations."""

from .field import FieldElement, FieldParams
from .keyeq import (
    CandidateSolution,
    DegreeBoundPair,
    KeyEquationSpace,
    ObservationMatrix,
    build_matrix,
    minimal_solution,
    reconstruct_fraction,
    solution_space,
)
from .linalg import FqMatrix, rank, right_kernel_basis
from .plswe import LinearSystem, ObliviousOutcome, PlsweParams, algorithm1, gen_system
from .poly import EvaluationGrid, Polynomial, RationalVector, error_locator, interpolate
from .srfr import DecodingFailure, SrfrParams, decode_srfr

__version__ = "0.1.0"
