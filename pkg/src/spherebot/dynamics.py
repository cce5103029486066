"""Constrained equations of motion and their control-affine decomposition.

The equations of motion are assembled numerically at every evaluation:
the generated kernels provide the mass matrix M(q), the velocity-product
bias and the gravity vector from exact machine-derived partials of the
Lagrangian, and the rolling constraints enter through Lagrange
multipliers.  Solving the augmented system

    [M(q), -A(q)^T] [qdd ]   [Q(u) - bias - grad V]
    [A(q),    0   ] [lam ] = [     -Adot qd        ]

yields accelerations that satisfy A qdd + Adot qd = 0 to solver precision.
Generalized coordinate order is q = [X, Z, phi, theta, psi, beta]; the
applied torques act on psi (hull spin, T_s) and beta (pendulum, T_p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .errors import DegenerateConfigurationError
from .model import (
    BETA, DBETA, DPHI, DPSI, DTHETA, DX, DZ, PHI, PSI, THETA, X, Z,
    InertiaSet, RobotParams, derive_inertias, validate_state,
)

# Augmented systems beyond this conditioning estimate are treated as
# degenerate rather than silently regularized: the controller divides by
# an input-matrix entry that such a solve would corrupt.
DEGENERATE_COND_LIMIT = 1e12

# Map qdd (q order) into the acceleration half of the state derivative.
_QDD_TO_STATE = (2, 3, 4, 5, 0, 1)


class ControlInput(NamedTuple):
    """Applied torques: hull-spin torque and pendulum torque, in N*m."""

    ts: float = 0.0
    tp: float = 0.0

    def clipped(self, ts_max: float | None, tp_max: float | None) -> "ControlInput":
        ts, tp = self.ts, self.tp
        if ts_max is not None:
            ts = min(max(ts, -ts_max), ts_max)
        if tp_max is not None:
            tp = min(max(tp, -tp_max), tp_max)
        return ControlInput(ts, tp)


def kernel_params(
    params: RobotParams,
    inertias: InertiaSet | None = None,
    legacy_pendulum_tensor: bool = False,
) -> np.ndarray:
    """Pack the scalar parameter vector consumed by the kernels."""
    if inertias is None:
        inertias = derive_inertias(params, legacy_pendulum_tensor)
    return np.array(
        [
            params.m_h + params.m_y,
            params.m_p,
            params.r_p,
            params.r_h,
            inertias.i_h,
            inertias.i_y,
            inertias.pendulum_tensor_value,
            params.g,
        ]
    )


def _check_cond(cond: float, where: str):
    if not math.isfinite(cond) or cond > DEGENERATE_COND_LIMIT:
        raise DegenerateConfigurationError(
            f"degenerate configuration in {where}: conditioning estimate "
            f"{cond:.3e} exceeds {DEGENERATE_COND_LIMIT:.0e}",
            cond_estimate=cond,
        )


def constraint_jacobian(x, params: RobotParams) -> tuple[np.ndarray, np.ndarray]:
    """Rolling-constraint Jacobian A (2x6 over q) and the Adot*qd term.

    A qd = 0 reproduces the no-slip conditions
    dX = r_h (dtheta sin(phi) - dpsi cos(phi) cos(theta)) and
    dZ = r_h (dtheta cos(phi) + dpsi sin(phi) cos(theta)).
    """
    x = validate_state(x)
    rh = params.r_h
    phi, theta = x[PHI], x[THETA]
    dphi, dtheta, dpsi = x[DPHI], x[DTHETA], x[DPSI]
    sphi, cphi = math.sin(phi), math.cos(phi)
    sth, cth = math.sin(theta), math.cos(theta)
    a = np.zeros((2, 6))
    a[0, 0] = 1.0
    a[0, 3] = -rh * sphi
    a[0, 4] = rh * cphi * cth
    a[1, 1] = 1.0
    a[1, 3] = -rh * cphi
    a[1, 4] = -rh * sphi * cth
    adot_qd = np.array(
        [
            -rh * cphi * dphi * dtheta
            - rh * (sphi * dphi * cth + cphi * sth * dtheta) * dpsi,
            rh * sphi * dphi * dtheta
            - rh * (cphi * dphi * cth - sphi * sth * dtheta) * dpsi,
        ]
    )
    return a, adot_qd


def constraint_residuals(x, params: RobotParams) -> np.ndarray:
    """The two rolling-constraint velocity residuals A qd, in m/s."""
    a, _ = constraint_jacobian(x, params)
    qd = np.array([x[DX], x[DZ], x[DPHI], x[DTHETA], x[DPSI], x[DBETA]])
    return a @ qd


def mass_matrix(x, params: RobotParams, kp: np.ndarray | None = None) -> np.ndarray:
    """Mass matrix M(q) of the kinetic-energy quadratic form (6x6)."""
    x = validate_state(x)
    if kp is None:
        kp = kernel_params(params)
    m = np.empty(36)
    c = np.empty(6)
    g = np.empty(6)
    kernels.eom_terms(x, kp, m, c, g)
    return m.reshape(6, 6)


def generalized_forces(
    x, params: RobotParams, kp: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Velocity-product bias vector and gravity gradient over q."""
    x = validate_state(x)
    if kp is None:
        kp = kernel_params(params)
    m = np.empty(36)
    c = np.empty(6)
    g = np.empty(6)
    kernels.eom_terms(x, kp, m, c, g)
    return c, g


@dataclass(frozen=True)
class EomSolution:
    """Accelerations over q plus the constraint multipliers."""

    qdd: np.ndarray
    lam: np.ndarray
    cond_estimate: float


def assemble_eom(
    x, u: ControlInput, params: RobotParams, kp: np.ndarray | None = None
) -> EomSolution:
    """Solve the multiplier-augmented equations of motion at one state."""
    x = validate_state(x)
    if kp is None:
        kp = kernel_params(params)
    qdd = np.empty(6)
    lam = np.empty(2)
    cond = kernels.solve_eom(x, float(u[0]), float(u[1]), kp, qdd, lam)
    _check_cond(cond, "assemble_eom")
    return EomSolution(qdd=qdd, lam=lam, cond_estimate=cond)


def assemble_eom_beta_held(
    x, ts: float, params: RobotParams, kp: np.ndarray | None = None
) -> EomSolution:
    """Equations of motion with an ideal pendulum hold (dbeta'' = 0).

    The third multiplier is the generalized torque the hold exerts on the
    pendulum coordinate.
    """
    x = validate_state(x)
    if kp is None:
        kp = kernel_params(params)
    qdd = np.empty(6)
    lam = np.empty(3)
    cond = kernels.solve_eom_beta_held(x, float(ts), kp, qdd, lam)
    _check_cond(cond, "assemble_eom_beta_held")
    return EomSolution(qdd=qdd, lam=lam, cond_estimate=cond)


def state_derivative(
    x, u: ControlInput, params: RobotParams, kp: np.ndarray | None = None
) -> np.ndarray:
    """Full 12-state time derivative dx/dt under torques u."""
    x = validate_state(x)
    if kp is None:
        kp = kernel_params(params)
    out = np.empty(12)
    cond = kernels.derivative(x, float(u[0]), float(u[1]), kp, out)
    _check_cond(cond, "state_derivative")
    return out


@dataclass(frozen=True)
class AffineDecomposition:
    """Drift f and input matrix G of dx/dt = f(x) + G(x) u.

    ``f`` has 12 entries in state order; ``g`` is 12x2 with columns for
    T_s and T_p.  Rows 0-5 of ``g`` are zero (kinematic identity rows) and
    the torque routing is sparse: T_s reaches only the heading and spin
    accelerations, T_p only the lean and pendulum accelerations.
    """

    f: np.ndarray
    g: np.ndarray
    cond_estimate: float

    @property
    def theta_ddot_drift(self) -> float:
        return float(self.f[6 + 1])

    @property
    def theta_ddot_gain(self) -> float:
        return float(self.g[6 + 1, 1])

    @property
    def psi_ddot_drift(self) -> float:
        return float(self.f[6 + 2])

    @property
    def psi_ddot_gain(self) -> float:
        return float(self.g[6 + 2, 0])

    @property
    def beta_ddot_drift(self) -> float:
        return float(self.f[6 + 3])

    @property
    def beta_ddot_gain(self) -> float:
        return float(self.g[6 + 3, 1])


def affine_decomposition(
    x, params: RobotParams, kp: np.ndarray | None = None
) -> AffineDecomposition:
    """Exact f/G split of the state derivative.

    Columns of G are obtained from two extra constrained solves sharing
    the drift factorization; the split is exact because the equations of
    motion are affine in the applied torques.
    """
    x = validate_state(x)
    if kp is None:
        kp = kernel_params(params)
    f_qdd = np.empty(6)
    gs_qdd = np.empty(6)
    gp_qdd = np.empty(6)
    cond = kernels.affine_eom(x, kp, f_qdd, gs_qdd, gp_qdd)
    _check_cond(cond, "affine_decomposition")
    f = np.empty(12)
    f[:6] = x[6:]
    f[6:] = f_qdd[list(_QDD_TO_STATE)]
    g = np.zeros((12, 2))
    g[6:, 0] = gs_qdd[list(_QDD_TO_STATE)]
    g[6:, 1] = gp_qdd[list(_QDD_TO_STATE)]
    return AffineDecomposition(f=f, g=g, cond_estimate=cond)
