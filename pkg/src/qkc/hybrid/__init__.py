"""Variational layer: operators, observation, objectives, optimizers and async tasks."""

from .objective import GATHER_STATISTICS, ObjectiveFunction, create_objective, default_translator
from .observe import MeasuredTerm, Observation, circuit_expectation, exact_expectation, observe
from .optimizers import (
    Adam, NelderMead, Optimizer, ResultsBuffer, central_difference, create_optimizer,
    optimizer_names, register_optimizer,
)
from .pauli import FermionOperator, PauliOperator, X, Y, Z, a, adag, jordan_wigner, parse_operator
from .tasks import Handle, optimize, sync, taskInitiate, task_initiate
from .trotter import exp_i_theta, exp_i_theta_instructions, pauli_rotation

__all__ = [
    "GATHER_STATISTICS", "ObjectiveFunction", "create_objective", "default_translator",
    "MeasuredTerm", "Observation", "circuit_expectation", "exact_expectation", "observe",
    "Adam", "NelderMead", "Optimizer", "ResultsBuffer", "central_difference", "create_optimizer",
    "optimizer_names", "register_optimizer", "FermionOperator", "PauliOperator", "X", "Y", "Z",
    "a", "adag", "jordan_wigner", "parse_operator", "Handle", "optimize", "sync", "taskInitiate",
    "task_initiate", "exp_i_theta", "exp_i_theta_instructions", "pauli_rotation",
]
