"""Heading and wobble control for the rolling robot.

Two torques are available: the hull-spin torque drives forward speed
through a high-gain proportional loop, and the pendulum torque is a
weighted blend of two components serving different goals.  The wobble
component feedback-linearizes the lean-rate output (cancelling the
nonlinear drift through the exact input gain), while the pendulum
component holds the commanded pendulum angle with a gravity feedforward
plus PD feedback.  Setpoints for turning come from inverting the signed
radius-of-curvature formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, simulate
from .dynamics import AffineDecomposition, ControlInput, kernel_params
from .errors import LinearizationSingularityError, ParameterError
from .model import BETA, DBETA, DPSI, DTHETA, PHI, THETA, RobotParams
from .simulate import IntegratorConfig, Trajectory, concat_trajectories

DEFAULT_BETA_LIMIT = math.radians(30.0)

# Below this input-gain magnitude the linearizing division is meaningless;
# the controller falls back to the pendulum component for the step.
G_THETA_SINGULARITY_FLOOR = 1e-8


@dataclass(frozen=True)
class ControllerGains:
    """Loop gains and the wobble/pendulum blend weights.

    The speed and pendulum gains are deliberately large (they emulate fast
    low-level actuation); the wobble gain stays small because the
    linearization, not the proportional term, cancels the lean dynamics.
    """

    kp_psidot: float = 100.0
    kp_beta: float = 500.0
    kd_beta: float = 50.0
    kp_thetadot: float = 5.0
    gamma: float = 0.9
    delta: float = 0.1

    def validate(self) -> "ControllerGains":
        for name in ("kp_psidot", "kp_beta", "kd_beta", "kp_thetadot"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be nonnegative")
        for name in ("gamma", "delta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1]")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ControllerGains":
        known = {
            "kp_psidot", "kp_beta", "kd_beta", "kp_thetadot", "gamma", "delta",
        }
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown gain keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()}).validate()


@dataclass(frozen=True)
class Setpoints:
    """Commanded forward speed, pendulum angle and lean rate (fixed 0)."""

    psi_dot_des: float = 0.0
    beta_des: float = 0.0
    theta_dot_des: float = 0.0
    beta_limit: float = DEFAULT_BETA_LIMIT

    def validate(self) -> "Setpoints":
        if abs(self.beta_des) > self.beta_limit + 1e-12:
            raise ParameterError(
                f"beta_des {self.beta_des:.4f} rad exceeds the pendulum "
                f"limit {self.beta_limit:.4f} rad"
            )
        return self


@dataclass(frozen=True)
class TorqueLimits:
    """Optional saturation bounds; None disables clamping."""

    ts_max: float | None = None
    tp_max: float | None = None


def speed_torque(x, sp: Setpoints, gains: ControllerGains) -> float:
    """Proportional forward-speed loop on the hull-spin rate."""
    return gains.kp_psidot * (sp.psi_dot_des - float(x[DPSI]))


def wobble_torque(
    x,
    sp: Setpoints,
    gains: ControllerGains,
    dyn: AffineDecomposition,
    singularity_floor: float = G_THETA_SINGULARITY_FLOOR,
) -> float:
    """Feedback-linearizing pendulum torque that shapes the lean rate.

    Cancels the lean-acceleration drift through the exact input gain and
    imposes theta'' = kp_thetadot (theta_dot_des - theta_dot).  Raises
    when the input gain is below the singularity floor; callers fall back
    to the pendulum component for that step.
    """
    g_theta = dyn.theta_ddot_gain
    if abs(g_theta) < singularity_floor:
        raise LinearizationSingularityError(
            f"lean input gain {g_theta:.3e} below floor "
            f"{singularity_floor:.3e}"
        )
    v_theta = gains.kp_thetadot * (sp.theta_dot_des - float(x[DTHETA]))
    return (-dyn.theta_ddot_drift + v_theta) / g_theta


def pendulum_torque(
    x, sp: Setpoints, gains: ControllerGains, params: RobotParams
) -> float:
    """Gravity feedforward plus PD feedback holding the pendulum angle."""
    gravity = params.m_p * params.g * params.r_p * math.sin(
        float(x[BETA]) + float(x[THETA])
    )
    v_beta = gains.kp_beta * (sp.beta_des - float(x[BETA])) + gains.kd_beta * (
        0.0 - float(x[DBETA])
    )
    return gravity + v_beta


def blended_torque(
    gamma: float, delta: float, t_wobble: float, t_pend: float
) -> float:
    """Weighted sum of the wobble and pendulum torque components."""
    return gamma * t_wobble + delta * t_pend


@dataclass(frozen=True)
class BetaForRadius:
    """Pendulum-angle setpoint for a commanded turning radius.

    ``clamped`` flags an infeasible radius; ``min_abs_radius`` then carries
    the tightest achievable turn at the pendulum limit.
    """

    beta: float
    clamped: bool
    min_abs_radius: float


def beta_for_radius(
    rho_des: float,
    psi_dot: float,
    params: RobotParams,
    beta_limit: float = DEFAULT_BETA_LIMIT,
) -> BetaForRadius:
    """Invert the signed radius formula for the pendulum setpoint."""
    if rho_des == 0.0:
        raise ParameterError("desired radius must be nonzero")
    from .circle import radius_of_curvature  # local import avoids a cycle

    inertias = dynamics.derive_inertias(params)
    i_h, i_y = inertias.i_h, inertias.i_y
    b = params.m_p * params.r_p * params.g
    n_coef = (
        i_h + params.total_mass * params.r_h**2
        - params.m_p * params.r_p * params.r_h
    )
    beta = -params.r_h * (n_coef * i_h * psi_dot**2 + (i_h + 2.0 * i_y) * b) / (
        b * i_h * rho_des
    )
    if abs(beta) <= beta_limit:
        return BetaForRadius(beta=beta, clamped=False, min_abs_radius=math.nan)
    clamped = math.copysign(beta_limit, beta)
    min_abs_radius = abs(radius_of_curvature(clamped, psi_dot, params))
    return BetaForRadius(beta=clamped, clamped=True, min_abs_radius=min_abs_radius)


# --- torque sources ----------------------------------------------------------


def make_hold_source(params: RobotParams):
    """Ideal open-loop hold: torques that zero psi'' and beta''.

    This is the steady-circle configuration: pendulum angle and forward
    speed stay exactly constant while the lean and heading evolve freely.
    """
    kp = kernel_params(params)

    def source(t, x) -> ControlInput:
        dyn = dynamics.affine_decomposition(x, params, kp)
        return ControlInput(
            ts=-dyn.psi_ddot_drift / dyn.psi_ddot_gain,
            tp=-dyn.beta_ddot_drift / dyn.beta_ddot_gain,
        )

    return source


class BlendedController:
    """Closed-loop torque source combining all three loops.

    Pure function of (t, state) apart from an event counter for
    linearization-singularity fallbacks.
    """

    def __init__(
        self,
        setpoints: Setpoints,
        gains: ControllerGains,
        params: RobotParams,
        limits: TorqueLimits | None = None,
        singularity_floor: float = G_THETA_SINGULARITY_FLOOR,
    ):
        self.setpoints = setpoints.validate()
        self.gains = gains.validate()
        self.params = params
        self.limits = limits or TorqueLimits()
        self.singularity_floor = singularity_floor
        self.singularity_fallbacks = 0
        self._kp = kernel_params(params)

    def __call__(self, t, x) -> ControlInput:
        sp, gains = self.setpoints, self.gains
        ts = speed_torque(x, sp, gains)
        t_pend = pendulum_torque(x, sp, gains, self.params)
        if gains.gamma != 0.0:
            dyn = dynamics.affine_decomposition(x, self.params, self._kp)
            try:
                t_wob = wobble_torque(x, sp, gains, dyn, self.singularity_floor)
                tp = blended_torque(gains.gamma, gains.delta, t_wob, t_pend)
            except LinearizationSingularityError:
                self.singularity_fallbacks += 1
                tp = t_pend
        else:
            tp = blended_torque(0.0, gains.delta, 0.0, t_pend)
        return ControlInput(ts, tp).clipped(self.limits.ts_max, self.limits.tp_max)


def make_blended_controller(
    setpoints: Setpoints,
    gains: ControllerGains,
    params: RobotParams,
    limits: TorqueLimits | None = None,
    singularity_floor: float = G_THETA_SINGULARITY_FLOOR,
) -> BlendedController:
    return BlendedController(setpoints, gains, params, limits, singularity_floor)


# --- maneuvers ----------------------------------------------------------------


@dataclass(frozen=True)
class ManeuverSegment:
    """One leg of a maneuver: setpoints plus an exit condition.

    Exactly one of ``duration`` (seconds) or ``heading_change`` (radians
    of heading swept since the segment began) must be given.
    """

    psi_dot_des: float
    beta_des: float
    duration: float | None = None
    heading_change: float | None = None

    def validate(self) -> "ManeuverSegment":
        has_duration = self.duration is not None
        has_heading = self.heading_change is not None
        if has_duration == has_heading:
            raise ParameterError(
                "segment needs exactly one of duration or heading_change"
            )
        if has_duration and not self.duration > 0.0:
            raise ParameterError("segment duration must be positive")
        if has_heading and not self.heading_change > 0.0:
            raise ParameterError("heading_change must be positive")
        return self


@dataclass(frozen=True)
class ManeuverPlan:
    """Ordered maneuver segments; canonical turn: straight, arc, straight."""

    segments: tuple[ManeuverSegment, ...]

    def validate(self) -> "ManeuverPlan":
        if not self.segments:
            raise ParameterError("maneuver plan has no segments")
        for seg in self.segments:
            seg.validate()
        return self

    @classmethod
    def from_dicts(cls, items: list[dict]) -> "ManeuverPlan":
        segs = []
        for item in items:
            known = {"psi_dot_des", "beta_des", "duration", "heading_change"}
            unknown = set(item) - known
            if unknown:
                raise ParameterError(f"unknown segment keys: {sorted(unknown)}")
            segs.append(ManeuverSegment(**item))
        return cls(segments=tuple(segs)).validate()


def turn_plan(
    psi_dot_des: float,
    beta_des: float,
    lead_in: float = 5.0,
    arc_heading_change: float = math.pi / 2,
    lead_out: float = 15.0,
) -> ManeuverPlan:
    """Canonical straight -> circular arc -> straight turning maneuver."""
    return ManeuverPlan(
        segments=(
            ManeuverSegment(psi_dot_des, 0.0, duration=lead_in),
            ManeuverSegment(
                psi_dot_des, beta_des, heading_change=arc_heading_change
            ),
            ManeuverSegment(psi_dot_des, 0.0, duration=lead_out),
        )
    ).validate()


# A heading-change exit waits at most this long before giving up.
_HEADING_EXIT_TIMEOUT = 240.0


def run_maneuver(
    plan: ManeuverPlan,
    gains: ControllerGains,
    x0,
    params: RobotParams,
    config: IntegratorConfig | None = None,
    limits: TorqueLimits | None = None,
    label: str = "maneuver",
) -> Trajectory:
    """Drive the blended controller through a maneuver plan.

    Segment boundaries and per-segment setpoints are recorded in the
    trajectory metadata; controller or integrator failures are re-raised
    with the segment index attached.
    """
    plan.validate()
    gains.validate()
    parts: list[Trajectory] = []
    boundaries = []
    x = np.asarray(x0, dtype=float)
    t_start = 0.0
    singularity_fallbacks = 0
    for index, seg in enumerate(plan.segments):
        controller = BlendedController(
            Setpoints(psi_dot_des=seg.psi_dot_des, beta_des=seg.beta_des),
            gains,
            params,
            limits,
        )
        try:
            if seg.duration is not None:
                part = simulate.integrate(
                    x, controller, seg.duration, params, config,
                    label=f"{label}[{index}]", t0=t_start,
                )
            else:
                phi0 = float(x[PHI])
                target = seg.heading_change

                def exit_up(t, y, phi0=phi0, target=target):
                    return (y[PHI] - phi0) - target

                def exit_down(t, y, phi0=phi0, target=target):
                    return (y[PHI] - phi0) + target

                exit_up.terminal = True
                exit_down.terminal = True
                part = simulate.integrate(
                    x, controller, _HEADING_EXIT_TIMEOUT, params, config,
                    label=f"{label}[{index}]", t0=t_start,
                    stop_events=[exit_up, exit_down],
                )
                if "stop_event_time" not in part.metadata:
                    raise ParameterError(
                        f"heading-change exit never fired within "
                        f"{_HEADING_EXIT_TIMEOUT} s"
                    )
        except Exception as exc:
            exc.args = (f"maneuver segment {index}: {exc}",) + exc.args[1:]
            raise
        singularity_fallbacks += controller.singularity_fallbacks
        boundaries.append(
            {
                "index": index,
                "t_start": float(part.t[0]),
                "t_end": float(part.t[-1]),
                "psi_dot_des": seg.psi_dot_des,
                "beta_des": seg.beta_des,
            }
        )
        parts.append(part)
        x = part.final_state
        t_start = float(part.t[-1])
    traj = concat_trajectories(parts, label=label)
    traj.metadata["segments"] = boundaries
    traj.metadata["singularity_fallbacks"] = singularity_fallbacks
    return traj
