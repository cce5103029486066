"""Simulation, analysis and wobble control of a pendulum-driven ball robot."""

from ._backend import BACKEND_NAME, COMPILED_AVAILABLE
from .dynamics import ControlInput
from .model import DEFAULT_PARAMS, RobotParams, derive_inertias, load_params

__all__ = [
    "BACKEND_NAME",
    "COMPILED_AVAILABLE",
    "ControlInput",
    "DEFAULT_PARAMS",
    "RobotParams",
    "derive_inertias",
    "load_params",
]

__version__ = "0.1.0"
