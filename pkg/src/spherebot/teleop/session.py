"""Simulation session driven in fixed control slices.

One session owns one simulation: the robot state, live setpoints and the
blended controller.  Time advances in fixed slices (default 5 ms); the
latest setpoints take effect at slice boundaries, so a command's latency
is at most one slice once it reaches the session.  Within a slice the
torque law is continuous and the integrator substeps adaptively.

Sessions are agnostic of transport: the server feeds commands in and
pulls telemetry snapshots out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .. import circle, control, simulate
from ..errors import SpherebotError
from ..model import BETA, DPHI, DPSI, THETA, STATE_FIELDS, RobotParams
from ..scenarios import CONTROLLER_PARAMS
from . import protocol
from .protocol import (
    BoundsError,
    Pause,
    Reset,
    Resume,
    SetBlend,
    SetPendulum,
    SetSpeed,
    SetWobbleControl,
)

SLICE_SECONDS = 0.005
BETA_SLEW_RAD_S = math.radians(30.0)


@dataclass
class SessionConfig:
    slice_seconds: float = SLICE_SECONDS
    telemetry_hz: float = 30.0
    real_time_factor: float = 1.0
    rtol: float = 1e-6
    atol: float = 1e-9
    project_velocities: bool = True
    beta_slew_rad_s: float = BETA_SLEW_RAD_S
    gains: control.ControllerGains = field(
        default_factory=control.ControllerGains
    )


class SimSession:
    """State machine for one teleoperated robot simulation."""

    def __init__(
        self,
        session_id: str,
        params: RobotParams | None = None,
        config: SessionConfig | None = None,
    ):
        self.id = session_id
        # The wobble controller needs bounded internal dynamics; the
        # controller-grade parameter set (pendulum COM near the hull) is
        # the sensible interactive default.
        self.params = (params or CONTROLLER_PARAMS).validate()
        self.config = config or SessionConfig()
        self.sim_time = 0.0
        self.paused = False
        self.wobble_enabled = True
        self.gamma = self.config.gains.gamma
        self.delta = self.config.gains.delta
        self.speed_des = 0.0           # commanded psi_dot, rad/s
        self.pendulum_target = 0.0     # commanded beta, rad
        self._pendulum_effective = 0.0  # slew-limited beta_des applied now
        self.slew_active = False
        self.singularity_fallbacks = 0
        self.last_torques = (0.0, 0.0)
        self.fault: str | None = None
        self.state = simulate.steady_circle_state(0.0, 0.0, self.params)
        self._integ = simulate.IntegratorConfig(
            rtol=self.config.rtol, atol=self.config.atol
        )

    # -- commands ---------------------------------------------------------

    def apply_command(self, command) -> dict:
        """Apply a parsed command; returns the ack payload.

        Mutations happen between slices (the caller owns the loop), so the
        setpoint swap is atomic with respect to stepping.
        """
        if isinstance(command, SetSpeed):
            self.speed_des = command.value
            return {"speed_rad_s": self.speed_des}
        if isinstance(command, SetPendulum):
            self.pendulum_target = math.radians(command.value)
            return {"pendulum_deg": command.value}
        if isinstance(command, SetBlend):
            self.gamma, self.delta = command.gamma, command.delta
            return {"gamma": self.gamma, "delta": self.delta}
        if isinstance(command, SetWobbleControl):
            self.wobble_enabled = command.enabled
            return {"enabled": self.wobble_enabled}
        if isinstance(command, Pause):
            self.paused = True
            return {"paused": True}
        if isinstance(command, Resume):
            self.paused = False
            self.fault = None
            return {"paused": False}
        if isinstance(command, Reset):
            if command.params is not None:
                self.params = RobotParams.from_dict(command.params)
            self.reset()
            return {"reset": True, "params": self.params.to_dict()}
        raise BoundsError(f"unsupported command {command!r}")

    def reset(self) -> None:
        """Back to steady straight motion at the commanded speed."""
        self.state = simulate.steady_circle_state(0.0, self.speed_des, self.params)
        self._pendulum_effective = 0.0
        self.pendulum_target = 0.0
        self.sim_time = 0.0
        self.fault = None

    # -- stepping -----------------------------------------------------------

    def _effective_blend(self) -> tuple[float, float]:
        if self.wobble_enabled:
            return self.gamma, self.delta
        return 0.0, 1.0

    def step_slice(self) -> None:
        """Advance one control slice with the latest setpoints."""
        if self.paused or self.fault:
            return
        dt = self.config.slice_seconds
        max_step = self.config.beta_slew_rad_s * dt
        delta_beta = self.pendulum_target - self._pendulum_effective
        self.slew_active = abs(delta_beta) > max_step
        if self.slew_active:
            self._pendulum_effective += math.copysign(max_step, delta_beta)
        else:
            self._pendulum_effective = self.pendulum_target

        gamma, delta = self._effective_blend()
        gains = control.ControllerGains(
            kp_psidot=self.config.gains.kp_psidot,
            kp_beta=self.config.gains.kp_beta,
            kd_beta=self.config.gains.kd_beta,
            kp_thetadot=self.config.gains.kp_thetadot,
            gamma=gamma,
            delta=delta,
        )
        setpoints = control.Setpoints(
            psi_dot_des=self.speed_des, beta_des=self._pendulum_effective
        )
        controller = control.BlendedController(
            setpoints, gains, self.params
        )
        try:
            part = simulate.integrate(
                self.state, controller, dt, self.params, self._integ,
                t0=self.sim_time,
            )
        except SpherebotError as exc:
            self.fault = str(exc)
            self.paused = True
            return
        self.singularity_fallbacks += controller.singularity_fallbacks
        x = part.final_state
        if self.config.project_velocities:
            x = simulate.project_rolling_velocities(x, self.params)
        self.state = x
        self.sim_time = float(part.t[-1])
        self.last_torques = (
            float(part.torques[-1, 0]), float(part.torques[-1, 1])
        )

    # -- telemetry ----------------------------------------------------------

    def telemetry(self) -> dict:
        x = self.state
        psi_dot = float(x[DPSI])
        beta = float(x[BETA])
        rho = circle.radius_of_curvature(beta, psi_dot, self.params)
        metrics = {
            "theta_deg": math.degrees(float(x[THETA])),
            "phi_dot_rad_s": float(x[DPHI]),
            "rho_estimate_m": None if math.isinf(rho) else rho,
        }
        flags = {
            "paused": self.paused,
            "wobble_enabled": self.wobble_enabled,
            "gamma": self.gamma,
            "delta": self.delta,
            "slew_active": self.slew_active,
            "fault": self.fault,
        }
        state_fields = {
            name: float(x[i]) for i, name in enumerate(STATE_FIELDS)
        }
        return protocol.telemetry_message(
            self.sim_time, state_fields, self.last_torques, metrics, flags
        )

    def config_payload(self) -> dict:
        return {
            "session_id": self.id,
            "params": self.params.to_dict(),
            "gains": {
                "kp_psidot": self.config.gains.kp_psidot,
                "kp_beta": self.config.gains.kp_beta,
                "kd_beta": self.config.gains.kd_beta,
                "kp_thetadot": self.config.gains.kp_thetadot,
                "gamma": self.gamma,
                "delta": self.delta,
            },
            "slice_seconds": self.config.slice_seconds,
            "telemetry_hz": self.config.telemetry_hz,
            "real_time_factor": self.config.real_time_factor,
            "limits": {
                "speed_rad_s": protocol.SPEED_LIMIT_RAD_S,
                "pendulum_deg": protocol.PENDULUM_LIMIT_DEG,
            },
        }
