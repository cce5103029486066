"""Physical parameters, frame kinematics and energies of the rolling robot.

The robot is a spherical hull rolling on a horizontal plane, carrying an
internal yoke platform and a steering pendulum.  Orientation follows a YXZ
Euler sequence: heading ``phi`` about the vertical, lean ``theta`` about
the intermediate x-axis, hull spin ``psi`` about the yoke z-axis; the
pendulum adds ``beta`` about the yoke x-axis.  All angles are radians and
all quantities SI; degrees appear only at CLI/UI boundaries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ParameterError

# State vector layout: [phi, theta, psi, beta, X, Z,
#                       dphi, dtheta, dpsi, dbeta, dX, dZ]
PHI, THETA, PSI, BETA, X, Z = 0, 1, 2, 3, 4, 5
DPHI, DTHETA, DPSI, DBETA, DX, DZ = 6, 7, 8, 9, 10, 11
STATE_SIZE = 12
STATE_FIELDS = (
    "phi", "theta", "psi", "beta", "X", "Z",
    "dphi", "dtheta", "dpsi", "dbeta", "dX", "dZ",
)

_PARAM_KEYS = ("m_h", "m_y", "m_p", "r_h", "r_p", "g")


@dataclass(frozen=True)
class RobotParams:
    """Masses, radii and gravity defining one robot instance.

    Attributes:
        m_h: hull mass [kg]
        m_y: yoke mass [kg]
        m_p: pendulum mass [kg]
        r_h: hull (sphere) radius [m]
        r_p: pendulum COM offset from the sphere centre [m]
        g: gravitational acceleration [m/s^2]
    """

    m_h: float = 2.0
    m_y: float = 1.5
    m_p: float = 3.0
    r_h: float = 0.15
    r_p: float = 0.10
    g: float = 9.81

    def validate(self) -> "RobotParams":
        for name in ("m_h", "m_y", "m_p"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be strictly positive")
        for name in ("r_h", "r_p", "g"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be strictly positive")
        if not self.r_p < self.r_h:
            raise ParameterError(
                "r_p must be smaller than r_h (pendulum swings inside the hull)"
            )
        if not all(math.isfinite(getattr(self, k)) for k in _PARAM_KEYS):
            raise ParameterError("parameters must be finite")
        return self

    @property
    def total_mass(self) -> float:
        return self.m_h + self.m_y + self.m_p

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RobotParams":
        unknown = set(data) - set(_PARAM_KEYS)
        if unknown:
            raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
        missing = set(_PARAM_KEYS) - set(data)
        if missing:
            raise ParameterError(f"missing parameter keys: {sorted(missing)}")
        try:
            values = {k: float(data[k]) for k in _PARAM_KEYS}
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"non-numeric parameter value: {exc}") from exc
        return cls(**values).validate()


DEFAULT_PARAMS = RobotParams()


def load_params(path) -> RobotParams:
    """Read a JSON parameter file; unknown keys are rejected."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError("parameter file must contain a JSON object")
    return RobotParams.from_dict(data)


def save_params(params: RobotParams, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- inertias -------------------------------------------------------------


def hull_inertia(m_h: float, r_h: float) -> float:
    """Thin spherical shell: (2/3) m r^2."""
    return (2.0 / 3.0) * m_h * r_h**2


def yoke_inertia(m_y: float, r_h: float) -> float:
    """Yoke platform scalar: (1/4) m r_h^2."""
    return 0.25 * m_y * r_h**2


def pendulum_inertia(m_p: float, r_p: float) -> float:
    """Pendulum rod about its swing axis: (1/3) m r_p^2."""
    return (1.0 / 3.0) * m_p * r_p**2


@dataclass(frozen=True)
class InertiaSet:
    """Scalar inertias plus the diagonal body tensors.

    ``pendulum_tensor_value`` is the entry used on the pendulum tensor
    diagonal diag(J, 0, J).  It equals ``i_p`` by default; a legacy switch
    substitutes ``i_y`` instead (see :func:`derive_inertias`).
    """

    i_h: float
    i_y: float
    i_p: float
    pendulum_tensor_value: float

    @property
    def hull_tensor(self) -> np.ndarray:
        return np.diag([self.i_h, self.i_h, self.i_h])

    @property
    def yoke_tensor(self) -> np.ndarray:
        return np.diag([self.i_y, 2.0 * self.i_y, self.i_y])

    @property
    def pendulum_tensor(self) -> np.ndarray:
        j = self.pendulum_tensor_value
        return np.diag([j, 0.0, j])


def derive_inertias(
    params: RobotParams, legacy_pendulum_tensor: bool = False
) -> InertiaSet:
    """Scalar and tensor inertias from the robot parameters.

    ``legacy_pendulum_tensor`` places the yoke scalar on the pendulum
    tensor diagonal instead of the pendulum scalar.  The default follows
    the variant consistent with the constant-angle circular-motion model;
    the switch exists only for comparison runs.
    """
    params.validate()
    i_h = hull_inertia(params.m_h, params.r_h)
    i_y = yoke_inertia(params.m_y, params.r_h)
    i_p = pendulum_inertia(params.m_p, params.r_p)
    return InertiaSet(
        i_h=i_h,
        i_y=i_y,
        i_p=i_p,
        pendulum_tensor_value=i_y if legacy_pendulum_tensor else i_p,
    )


# --- state helpers ---------------------------------------------------------


def state_vector(**values) -> np.ndarray:
    """Build a 12-entry state array from named fields; the rest are zero.

    >>> x = state_vector(beta=0.26, dpsi=-1.0)
    """
    unknown = set(values) - set(STATE_FIELDS)
    if unknown:
        raise ValueError(f"unknown state fields: {sorted(unknown)}")
    x = np.zeros(STATE_SIZE)
    for name, value in values.items():
        x[STATE_FIELDS.index(name)] = float(value)
    return x


def validate_state(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.shape != (STATE_SIZE,):
        raise ValueError(f"state must have shape ({STATE_SIZE},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("state entries must be finite")
    return x


# --- kinematics ------------------------------------------------------------


def _rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class FrameRotations:
    """Rotation matrices mapping body-frame vectors into the ground frame."""

    r_gy: np.ndarray
    r_gp: np.ndarray
    r_gh: np.ndarray


def frame_rotations(phi: float, theta: float, psi: float, beta: float) -> FrameRotations:
    """Ground-from-body rotations for the yoke, pendulum and hull frames."""
    ry_phi = _rot_y(phi)
    rx_theta = _rot_x(theta)
    r_gy = ry_phi @ rx_theta
    return FrameRotations(
        r_gy=r_gy,
        r_gp=r_gy @ _rot_x(beta),
        r_gh=r_gy @ _rot_z(psi),
    )


def angular_velocities(x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Body-frame angular velocities (w_yoke, w_pendulum, w_hull)."""
    x = np.asarray(x, dtype=float)
    theta, psi, beta = x[THETA], x[PSI], x[BETA]
    dphi, dtheta, dpsi, dbeta = x[DPHI], x[DTHETA], x[DPSI], x[DBETA]
    bt = beta + theta
    w_y = np.array([dtheta, dphi * math.cos(theta), -dphi * math.sin(theta)])
    w_p = np.array([dbeta + dtheta, dphi * math.cos(bt), -dphi * math.sin(bt)])
    w_h = np.array(
        [
            dtheta * math.cos(psi) + dphi * math.cos(theta) * math.sin(psi),
            dphi * math.cos(psi) * math.cos(theta) - dtheta * math.sin(psi),
            dpsi - dphi * math.sin(theta),
        ]
    )
    return w_y, w_p, w_h


@dataclass(frozen=True)
class ComKinematics:
    """Centre-of-mass positions and velocities in the ground frame."""

    v_hull: np.ndarray
    v_yoke: np.ndarray
    v_pendulum: np.ndarray
    r_pendulum: np.ndarray  # from the ground origin; centre sits at [X, r_h, Z]


def com_kinematics(x, params: RobotParams) -> ComKinematics:
    x = np.asarray(x, dtype=float)
    rot = frame_rotations(x[PHI], x[THETA], x[PSI], x[BETA])
    p_local = np.array([0.0, -params.r_p, 0.0])
    r_rel = rot.r_gp @ p_local
    r_pc = np.array([x[X], params.r_h, x[Z]]) + r_rel

    v_center = np.array([x[DX], 0.0, x[DZ]])
    _, w_p, _ = angular_velocities(x)
    w_p_global = rot.r_gp @ w_p
    v_pc = v_center + np.cross(w_p_global, r_rel)
    return ComKinematics(
        v_hull=v_center.copy(),
        v_yoke=v_center.copy(),
        v_pendulum=v_pc,
        r_pendulum=r_pc,
    )


def energies(
    x, params: RobotParams, inertias: InertiaSet | None = None
) -> tuple[float, float]:
    """Kinetic and potential energy (datum at the sphere centre).

    The kinetic energy sums the three translational and three rotational
    body terms; the potential energy is the pendulum height term (the hull
    and yoke COMs sit at the datum).
    """
    x = np.asarray(x, dtype=float)
    if inertias is None:
        inertias = derive_inertias(params)
    kin = com_kinematics(x, params)
    w_y, w_p, w_h = angular_velocities(x)
    k_trans = 0.5 * (
        params.m_h * float(kin.v_hull @ kin.v_hull)
        + params.m_y * float(kin.v_yoke @ kin.v_yoke)
        + params.m_p * float(kin.v_pendulum @ kin.v_pendulum)
    )
    k_rot = 0.5 * (
        float(w_h @ inertias.hull_tensor @ w_h)
        + float(w_y @ inertias.yoke_tensor @ w_y)
        + float(w_p @ inertias.pendulum_tensor @ w_p)
    )
    height = -params.r_p * math.cos(x[BETA] + x[THETA])
    v_pot = params.m_p * params.g * height
    return k_trans + k_rot, v_pot
