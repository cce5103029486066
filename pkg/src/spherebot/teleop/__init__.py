"""Real-time teleoperation: protocol, session stepping and the service."""

from .protocol import PENDULUM_LIMIT_DEG, SPEED_LIMIT_RAD_S, parse_command
from .session import SessionConfig, SimSession

__all__ = [
    "PENDULUM_LIMIT_DEG",
    "SPEED_LIMIT_RAD_S",
    "SessionConfig",
    "SimSession",
    "parse_command",
]
