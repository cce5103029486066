"""Adaptive time integration, steady-circle setup and trajectory handling.

Runs the constrained dynamics through an embedded Runge-Kutta 5(4) pair
(an implicit Radau fallback is available for stiff closed-loop gains),
records state and applied torques on a dense grid merged with all accepted
solver steps, and monitors rolling-constraint drift rather than projecting
it away.  A velocity-level projection helper exists for long interactive
sessions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import dynamics
from .dynamics import ControlInput, kernel_params
from .errors import DynamicsError, ParameterError, StiffnessError
from .model import (
    BETA, DBETA, DPHI, DPSI, DTHETA, DX, DZ, PHI, PSI, THETA, X, Z,
    STATE_FIELDS, STATE_SIZE, RobotParams, state_vector, validate_state,
)

CSV_HEADER = "t,phi,theta,psi,beta,X,Z,dphi,dtheta,dpsi,dbeta,dX,dZ,Ts,Tp"

_METHODS = {"rk45": "RK45", "radau": "Radau"}


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and stepping policy for one integration run."""

    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float = math.inf
    method: str = "rk45"
    output_hz: float = 200.0
    blowup_limit: float = 1e6
    min_samples_per_wobble_period: float = 50.0

    def validate(self) -> "IntegratorConfig":
        if not 0.0 < self.rtol < 1.0:
            raise ParameterError("rtol must be in (0, 1)")
        if not self.atol > 0.0:
            raise ParameterError("atol must be positive")
        if not self.max_step > 0.0:
            raise ParameterError("max_step must be positive")
        if self.method not in _METHODS:
            raise ParameterError(f"method must be one of {sorted(_METHODS)}")
        if not self.output_hz > 0.0:
            raise ParameterError("output_hz must be positive")
        return self


@dataclass
class Trajectory:
    """Time-ordered samples of state and applied torques.

    ``states`` is (n, 12) in the canonical state order and ``torques`` is
    (n, 2) columns (T_s, T_p).  ``metadata`` carries run diagnostics such
    as early-termination reasons and maneuver segment boundaries.
    """

    t: np.ndarray
    states: np.ndarray
    torques: np.ndarray
    params: RobotParams
    config: IntegratorConfig
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        self.torques = np.asarray(self.torques, dtype=float)
        if self.t.ndim != 1 or self.states.shape != (self.t.size, STATE_SIZE):
            raise ValueError("trajectory arrays have inconsistent shapes")
        if self.torques.shape != (self.t.size, 2):
            raise ValueError("torque array must be (n, 2)")
        if self.t.size and np.any(np.diff(self.t) <= 0.0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return self.t.size

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()

    def column(self, name: str) -> np.ndarray:
        return self.states[:, STATE_FIELDS.index(name)]

    def window(self, t_start: float, t_end: float | None = None) -> "Trajectory":
        """Sub-trajectory with t_start <= t <= t_end (views, not copies)."""
        t_end = self.t[-1] if t_end is None else t_end
        mask = (self.t >= t_start) & (self.t <= t_end)
        return Trajectory(
            t=self.t[mask],
            states=self.states[mask],
            torques=self.torques[mask],
            params=self.params,
            config=self.config,
            label=self.label,
            metadata=dict(self.metadata),
        )

    def to_csv(self, path) -> None:
        """Write the export schema; floats use shortest round-trip form."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for i in range(self.t.size):
                row = [self.t[i], *self.states[i], *self.torques[i]]
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path, params: RobotParams,
                 config: IntegratorConfig | None = None) -> "Trajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 15:
            raise ValueError("trajectory CSV must have 15 columns")
        return cls(
            t=data[:, 0],
            states=data[:, 1:13],
            torques=data[:, 13:15],
            params=params,
            config=config or IntegratorConfig(),
            label=str(path),
        )


def concat_trajectories(parts: list[Trajectory], label: str = "",
                        metadata: dict | None = None) -> Trajectory:
    """Join consecutive runs, dropping duplicated boundary samples."""
    if not parts:
        raise ValueError("nothing to concatenate")
    ts, xs, us = [parts[0].t], [parts[0].states], [parts[0].torques]
    for prev, cur in zip(parts, parts[1:]):
        start = 1 if cur.t.size and math.isclose(cur.t[0], prev.t[-1]) else 0
        ts.append(cur.t[start:])
        xs.append(cur.states[start:])
        us.append(cur.torques[start:])
    return Trajectory(
        t=np.concatenate(ts),
        states=np.concatenate(xs),
        torques=np.concatenate(us),
        params=parts[0].params,
        config=parts[0].config,
        label=label or parts[0].label,
        metadata=metadata if metadata is not None else dict(parts[0].metadata),
    )


def steady_circle_state(beta: float, psi_dot: float,
                        params: RobotParams) -> np.ndarray:
    """Initial condition for steady circular motion.

    Sets the pendulum angle and forward spin rate, zeroes everything else,
    then overwrites the ground velocities so the rolling constraints hold
    exactly.
    """
    if not abs(beta) < math.pi / 2:
        raise ParameterError("pendulum angle must satisfy |beta| < pi/2")
    x = state_vector(beta=beta, dpsi=psi_dot)
    return enforce_rolling_velocities(x, params)


def enforce_rolling_velocities(x, params: RobotParams) -> np.ndarray:
    """Overwrite dX, dZ with the values the rolling constraints dictate."""
    x = validate_state(x).copy()
    rh = params.r_h
    sphi, cphi = math.sin(x[PHI]), math.cos(x[PHI])
    cth = math.cos(x[THETA])
    x[DX] = rh * (x[DTHETA] * sphi - x[DPSI] * cphi * cth)
    x[DZ] = rh * (x[DTHETA] * cphi + x[DPSI] * sphi * cth)
    return x


def project_rolling_velocities(x, params: RobotParams) -> np.ndarray:
    """Least-squares velocity correction onto the constraint manifold.

    Minimally adjusts the generalized velocities so A qd = 0; used by long
    interactive sessions where drift would otherwise accumulate.
    """
    x = validate_state(x).copy()
    a, _ = dynamics.constraint_jacobian(x, params)
    qd = np.array([x[DX], x[DZ], x[DPHI], x[DTHETA], x[DPSI], x[DBETA]])
    residual = a @ qd
    correction = a.T @ np.linalg.solve(a @ a.T, residual)
    qd = qd - correction
    x[DX], x[DZ] = qd[0], qd[1]
    x[DPHI], x[DTHETA], x[DPSI], x[DBETA] = qd[2], qd[3], qd[4], qd[5]
    return x


def zero_torque(t, x) -> ControlInput:
    return ControlInput(0.0, 0.0)


def _effective_output_hz(x0, params, config) -> float:
    """Bump the output rate when the predicted wobble is fast."""
    from .circle import wobble_frequency  # local import to avoid a cycle

    try:
        omega = wobble_frequency(float(x0[DPSI]), params)
    except ParameterError:
        return config.output_hz
    needed = config.min_samples_per_wobble_period * omega / (2.0 * math.pi)
    return max(config.output_hz, needed)


def integrate(
    x0,
    torque_source,
    duration: float,
    params: RobotParams,
    config: IntegratorConfig | None = None,
    label: str = "",
    t0: float = 0.0,
    stop_events: list | None = None,
) -> Trajectory:
    """Integrate the closed- or open-loop dynamics over ``duration`` seconds.

    ``torque_source`` maps (t, state) to a (T_s, T_p) pair and is consulted
    inside every derivative evaluation; ``None`` means zero torque.  Output
    samples cover a uniform grid (at least ``output_hz``, densified to keep
    50 samples per predicted wobble period) merged with every accepted
    solver step.  ``stop_events`` follow scipy's terminal-event protocol;
    exceeding the blow-up bound terminates early with a diagnostic in the
    trajectory metadata.
    """
    config = (config or IntegratorConfig()).validate()
    params.validate()
    x0 = validate_state(x0)
    if not duration > 0.0:
        raise ParameterError("duration must be positive")
    if torque_source is None:
        torque_source = zero_torque
    kp = kernel_params(params)

    def rhs(t, y):
        y = np.ascontiguousarray(y)
        u = torque_source(t, y)
        out = dynamics.state_derivative(y, u, params, kp)
        if not np.all(np.isfinite(out)):
            raise DynamicsError(
                f"non-finite state derivative at t={t:.6f}", state=y.copy()
            )
        return out

    def blowup(t, y):
        return config.blowup_limit - float(np.max(np.abs(y)))

    blowup.terminal = True
    blowup.direction = -1
    events = [blowup] + list(stop_events or [])

    sol = solve_ivp(
        rhs,
        (t0, t0 + duration),
        x0,
        method=_METHODS[config.method],
        rtol=config.rtol,
        atol=config.atol,
        max_step=config.max_step,
        dense_output=True,
        events=events,
    )
    if sol.status == -1:
        raise StiffnessError(f"integration failed: {sol.message}")

    metadata = {"solver_status": int(sol.status), "n_rhs_evals": int(sol.nfev)}
    t_end = float(sol.t[-1])
    if sol.status == 1:
        if sol.t_events[0].size:
            metadata["terminated_early"] = (
                f"state magnitude exceeded blow-up bound "
                f"{config.blowup_limit:.1e} at t={t_end:.6f}"
            )
        for k, te in enumerate(sol.t_events[1:]):
            if te.size:
                metadata["stop_event_index"] = k
                metadata["stop_event_time"] = float(te[0])

    hz = _effective_output_hz(x0, params, config)
    metadata["effective_output_hz"] = hz
    n_grid = max(2, int(math.floor((t_end - t0) * hz)) + 1)
    grid = t0 + np.arange(n_grid) / hz
    t_out = np.union1d(np.clip(grid, t0, t_end), sol.t)
    states = sol.sol(t_out).T.copy()
    torques = np.array(
        [tuple(torque_source(ti, np.ascontiguousarray(xi)))
         for ti, xi in zip(t_out, states)]
    )
    return Trajectory(
        t=t_out,
        states=states,
        torques=torques,
        params=params,
        config=config,
        label=label,
        metadata=metadata,
    )


def integrate_sampled(
    x0,
    controller,
    duration: float,
    params: RobotParams,
    config: IntegratorConfig | None = None,
    control_hz: float = 200.0,
    t0: float = 0.0,
    label: str = "",
    stop_events: list | None = None,
) -> Trajectory:
    """Integrate with a sampled controller (zero-order-hold torques).

    The controller is evaluated once per control slice and its output held
    constant while the continuous dynamics advance through the slice, the
    way a discrete control loop drives the physical robot.  This also
    tames feedback-linearizing laws whose commanded torque grows unbounded
    near the input-gain singular surface: within a slice the torque is
    frozen and finite.

    Samples land on slice boundaries; ``torques[i]`` records the command
    computed at sample ``i`` (applied over the following slice).
    """
    config = (config or IntegratorConfig()).validate()
    params.validate()
    x = validate_state(x0).copy()
    if not duration > 0.0:
        raise ParameterError("duration must be positive")
    if not control_hz > 0.0:
        raise ParameterError("control_hz must be positive")
    kp = kernel_params(params)
    dt = 1.0 / control_hz
    n_slices = max(1, int(round(duration * control_hz)))

    def blowup(t, y):
        return config.blowup_limit - float(np.max(np.abs(y)))

    blowup.terminal = True
    blowup.direction = -1
    events = [blowup] + list(stop_events or [])

    ts = [t0]
    xs = [x.copy()]
    us = [tuple(controller(t0, x))]
    metadata: dict = {"control_hz": control_hz}
    n_evals = 0
    for k in range(n_slices):
        ta = t0 + k * dt
        tb = t0 + duration if k == n_slices - 1 else t0 + (k + 1) * dt
        u = ControlInput(*us[-1])

        def rhs(t, y, u=u):
            y = np.ascontiguousarray(y)
            out = dynamics.state_derivative(y, u, params, kp)
            if not np.all(np.isfinite(out)):
                raise DynamicsError(
                    f"non-finite state derivative at t={t:.6f}", state=y.copy()
                )
            return out

        sol = solve_ivp(
            rhs, (ta, tb), x,
            method=_METHODS[config.method],
            rtol=config.rtol, atol=config.atol, max_step=config.max_step,
            events=events,
        )
        if sol.status == -1:
            raise StiffnessError(f"integration failed: {sol.message}")
        n_evals += int(sol.nfev)
        x = np.ascontiguousarray(sol.y[:, -1])
        ts.append(float(sol.t[-1]))
        xs.append(x.copy())
        us.append(tuple(controller(ts[-1], x)))
        if sol.status == 1:
            if sol.t_events[0].size:
                metadata["terminated_early"] = (
                    f"state magnitude exceeded blow-up bound "
                    f"{config.blowup_limit:.1e} at t={ts[-1]:.6f}"
                )
            for j, te in enumerate(sol.t_events[1:]):
                if te.size:
                    metadata["stop_event_index"] = j
                    metadata["stop_event_time"] = float(te[0])
            break
    metadata["n_rhs_evals"] = n_evals
    return Trajectory(
        t=np.array(ts),
        states=np.array(xs),
        torques=np.array(us),
        params=params,
        config=config,
        label=label,
        metadata=metadata,
    )


def constraint_drift(traj: Trajectory) -> float:
    """Maximum rolling-constraint velocity residual over the run, m/s."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    worst = 0.0
    for x in traj.states:
        res = dynamics.constraint_residuals(np.ascontiguousarray(x), traj.params)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def energy_series(traj: Trajectory) -> np.ndarray:
    """Total mechanical energy K + V at every sample."""
    from .model import derive_inertias, energies

    inertias = derive_inertias(traj.params)
    return np.array(
        [sum(energies(x, traj.params, inertias)) for x in traj.states]
    )
