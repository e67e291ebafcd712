"""Rattling in a lattice reaction-diffusion equation with relay hysteresis.

Submodules
----------
specfun        similarity profiles h, f, g and the scaled F, G, H
quadrature     adaptive Gauss-Kronrod integration
green          discrete Green function of the lattice heat equation
relay          relay operator and model parameters
events         switching events and their file format
solver         exact event-driven solver
stepper        truncated-lattice ODE solver used as a cross-check
bounds         a-priori bounds checked along a run
patterns       switching patterns, counting functions, quasiperiodic sets
counterexample big-integer pattern without asymptotic frequency
analysis       propagation constant a* and fits of simulated runs
cli            command-line entry point
"""
from .errors import (
    AccuracyError,
    BoundaryViolation,
    DomainError,
    InvariantViolation,
    MonotoneTimeError,
    NoProgressError,
    RattlingError,
    StepSizeError,
)
from .events import EventLog, SwitchEvent
from .green import GreenEvaluator
from .relay import ModelParams, RelayState
from .solver import SolverConfig, run_event_driven
from .stepper import run_time_stepper

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BoundaryViolation",
    "DomainError",
    "EventLog",
    "GreenEvaluator",
    "InvariantViolation",
    "ModelParams",
    "MonotoneTimeError",
    "NoProgressError",
    "RattlingError",
    "RelayState",
    "SolverConfig",
    "StepSizeError",
    "SwitchEvent",
    "run_event_driven",
    "run_time_stepper",
]
