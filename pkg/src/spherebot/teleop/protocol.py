"""Wire protocol for the teleoperation service.

JSON messages with a ``type`` field and snake_case keys.  Commands travel
client-to-server; telemetry, acks and errors travel back.  Speeds are
rad/s on the wire; the pendulum command is degrees (the UI converts
exactly once at the widget boundary).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..errors import SpherebotError

SPEED_LIMIT_RAD_S = 20.0
PENDULUM_LIMIT_DEG = 30.0


class SchemaError(SpherebotError):
    """Malformed command message."""


class BoundsError(SpherebotError):
    """Command payload outside the permitted range."""


@dataclass(frozen=True)
class SetSpeed:
    value: float  # rad/s, |value| <= 20
    type: str = field(default="set_speed", init=False)


@dataclass(frozen=True)
class SetPendulum:
    value: float  # degrees, |value| <= 30
    type: str = field(default="set_pendulum", init=False)


@dataclass(frozen=True)
class SetBlend:
    gamma: float
    delta: float
    type: str = field(default="set_blend", init=False)


@dataclass(frozen=True)
class SetWobbleControl:
    enabled: bool
    type: str = field(default="set_wobble_control", init=False)


@dataclass(frozen=True)
class Reset:
    params: dict | None = None
    type: str = field(default="reset", init=False)


@dataclass(frozen=True)
class Pause:
    type: str = field(default="pause", init=False)


@dataclass(frozen=True)
class Resume:
    type: str = field(default="resume", init=False)


COMMAND_TYPES = {
    "set_speed": SetSpeed,
    "set_pendulum": SetPendulum,
    "set_blend": SetBlend,
    "set_wobble_control": SetWobbleControl,
    "reset": Reset,
    "pause": Pause,
    "resume": Resume,
}


def _number(data, key):
    value = data.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaError(f"field {key!r} must be a number")
    return float(value)


def parse_command(data):
    """Validate and build a command from a decoded JSON object.

    Raises :class:`SchemaError` for malformed messages and
    :class:`BoundsError` for out-of-range payloads.
    """
    if not isinstance(data, dict):
        raise SchemaError("command must be a JSON object")
    ctype = data.get("type")
    if ctype not in COMMAND_TYPES:
        raise SchemaError(f"unknown command type {ctype!r}")
    if ctype == "set_speed":
        value = _number(data, "value")
        if abs(value) > SPEED_LIMIT_RAD_S:
            raise BoundsError(
                f"|speed| must not exceed {SPEED_LIMIT_RAD_S} rad/s"
            )
        return SetSpeed(value)
    if ctype == "set_pendulum":
        value = _number(data, "value")
        if abs(value) > PENDULUM_LIMIT_DEG:
            raise BoundsError(
                f"|pendulum| must not exceed {PENDULUM_LIMIT_DEG} degrees"
            )
        return SetPendulum(value)
    if ctype == "set_blend":
        gamma = _number(data, "gamma")
        delta = _number(data, "delta")
        if not (0.0 <= gamma <= 1.0 and 0.0 <= delta <= 1.0):
            raise BoundsError("gamma and delta must lie in [0, 1]")
        return SetBlend(gamma, delta)
    if ctype == "set_wobble_control":
        enabled = data.get("enabled")
        if not isinstance(enabled, bool):
            raise SchemaError("field 'enabled' must be a boolean")
        return SetWobbleControl(enabled)
    if ctype == "reset":
        params = data.get("params")
        if params is not None and not isinstance(params, dict):
            raise SchemaError("field 'params' must be an object")
        return Reset(params)
    return COMMAND_TYPES[ctype]()


def serialize(message) -> dict:
    """Dataclass message to a JSON-ready dict (None fields dropped)."""
    data = asdict(message)
    return {k: v for k, v in data.items() if v is not None}


def telemetry_message(
    t: float,
    state_fields: dict,
    torques: tuple[float, float],
    metrics: dict,
    flags: dict,
) -> dict:
    return {
        "type": "telemetry",
        "t": t,
        "state": state_fields,
        "torques": {"ts": torques[0], "tp": torques[1]},
        "metrics": metrics,
        "flags": flags,
    }


def ack_message(command, applied: dict) -> dict:
    return {"type": "ack", "command": command.type, "applied": applied}


def error_message(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def parse_telemetry(data: dict) -> dict:
    """Validate a telemetry dict (round-trip checking helper)."""
    required = {"type", "t", "state", "torques", "metrics", "flags"}
    if not isinstance(data, dict) or data.get("type") != "telemetry":
        raise SchemaError("not a telemetry message")
    missing = required - set(data)
    if missing:
        raise SchemaError(f"telemetry missing fields: {sorted(missing)}")
    return data
