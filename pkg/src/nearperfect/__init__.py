"""Randomized additive approximation of Steiner trees on the hypercube for
near-perfect phylogenies, with an exact small-scale oracle and planted
instance generator."""

from .forest import ContractError, LabeledForest, StepKind, TraceStep
from .generator import GenerationError, PlantedInstance, plant
from .instance import (
    ColumnMap, Component, MatrixParseError, PartitionState, TerminalMatrix, load_matrix, normalize,
    parse_matrix, pattern_of,
)
from .oracle import OracleLimitError, VerificationReport, exact_steiner, fact_violations, verify
from .solver import SolverConfig, SolveReport, bound, solve, solve_with_q

__all__ = [
    "ColumnMap", "Component", "ContractError", "GenerationError", "LabeledForest", "MatrixParseError",
    "OracleLimitError", "PartitionState", "PlantedInstance", "SolveReport", "SolverConfig", "StepKind",
    "TerminalMatrix", "TraceStep", "VerificationReport", "bound", "exact_steiner", "fact_violations",
    "load_matrix", "normalize", "parse_matrix", "pattern_of", "plant", "solve", "solve_with_q", "verify",
]
