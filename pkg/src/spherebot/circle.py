"""Closed-form circular-motion characteristics and their measurement.

The constant-pendulum-angle analysis of the rolling robot yields closed
forms for the lean-angle (wobble) amplitude and frequency, the mean
heading precession rate and the signed radius of curvature, together with
low- and high-speed limiting forms.  This module implements those
expressions and the procedures that extract the same quantities from
simulated trajectories, so predictions and measurements can be
cross-validated.

Sign conventions: positive pendulum angle produces a negative wobble
amplitude and a negative signed radius; sweeps report magnitudes but data
files keep the sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import (
    InsufficientDataError,
    NotCircularError,
    ParameterDomainError,
)
from .model import BETA, THETA, InertiaSet, RobotParams, derive_inertias
from .simulate import Trajectory

# Boundaries of the dimensionless speed group r_h * psi_dot^2 / g used to
# classify the limiting regimes.
LOW_SPEED_GROUP = 0.01
HIGH_SPEED_GROUP = 50.0

WARMUP_FRACTION = 0.2
MIN_WOBBLE_PERIODS = 5
CIRCLE_RESIDUAL_LIMIT = 0.2


def _coefficients(params: RobotParams, inertias: InertiaSet | None = None):
    """Shared coefficient bundle for the closed forms.

    Returns (stiff_gain a, gravity term b, inertia sum d, i_h, i_y) where
    the lean dynamics reduce to  d*theta'' + (a*psi_dot^2 + b) theta =
    -b*beta,  with a = I_h N/(I_h + 2 I_y), N = I_h + M r_h^2 - m_p r_p r_h
    and b = m_p r_p g.
    """
    if inertias is None:
        inertias = derive_inertias(params)
    i_h, i_y, i_p = inertias.i_h, inertias.i_y, inertias.i_p
    m_tot = params.total_mass
    n_coef = i_h + m_tot * params.r_h**2 - params.m_p * params.r_p * params.r_h
    a_coef = i_h * n_coef / (i_h + 2.0 * i_y)
    b_coef = params.m_p * params.r_p * params.g
    d_coef = (
        i_p + i_h + i_y + params.m_p * params.r_p**2 + m_tot * params.r_h**2
        - 2.0 * params.m_p * params.r_p * params.r_h
    )
    return a_coef, b_coef, d_coef, n_coef, i_h, i_y


def speed_group(psi_dot: float, params: RobotParams) -> float:
    """The dimensionless ratio r_h psi_dot^2 / g classifying the regime."""
    return params.r_h * psi_dot**2 / params.g


def wobble_amplitude(beta: float, psi_dot: float, params: RobotParams) -> float:
    """Signed lean-oscillation amplitude A during steady circular motion."""
    a, b, _, _, _, _ = _coefficients(params)
    return -b * beta / (a * psi_dot**2 + b)


def wobble_amplitude_low_speed(beta: float, params: RobotParams) -> float:
    """Low-speed limit: the lean swings opposite the pendulum angle."""
    return -beta


def wobble_amplitude_high_speed(
    beta: float, psi_dot: float, params: RobotParams
) -> float:
    """High-speed limit: amplitude falls off with the squared speed."""
    a, b, _, _, _, _ = _coefficients(params)
    return -b * beta / (a * psi_dot**2)


def wobble_frequency(psi_dot: float, params: RobotParams) -> float:
    """Lean-oscillation frequency; independent of the pendulum angle."""
    a, b, d, _, _, _ = _coefficients(params)
    if not d > 0.0:
        raise ParameterDomainError(
            "wobble-frequency denominator must be positive; got "
            f"{d:.6g} for these parameters"
        )
    return math.sqrt((a * psi_dot**2 + b) / d)


def wobble_frequency_low_speed(params: RobotParams) -> float:
    _, b, d, _, _, _ = _coefficients(params)
    if not d > 0.0:
        raise ParameterDomainError("inertia sum must be positive")
    return math.sqrt(b / d)


def wobble_frequency_high_speed(psi_dot: float, params: RobotParams) -> float:
    """High-speed limit: frequency grows linearly with forward speed."""
    a, _, d, _, _, _ = _coefficients(params)
    return abs(psi_dot) * math.sqrt(a / d)


def precession_rate(theta: float, psi_dot: float, params: RobotParams) -> float:
    """Heading rate during circular motion at lean angle theta."""
    inertias = derive_inertias(params)
    return inertias.i_h / (inertias.i_h + 2.0 * inertias.i_y) * psi_dot * theta


def radius_of_curvature(beta: float, psi_dot: float, params: RobotParams) -> float:
    """Signed radius of the circle traced by the hull centre.

    A zero pendulum angle means straight-line motion; the unbounded radius
    is reported as ``inf`` rather than an exception so sweeps over beta
    can include zero.
    """
    if beta == 0.0:
        return math.inf
    a, b, _, n_coef, i_h, i_y = _coefficients(params)
    num = (n_coef * i_h * psi_dot**2 + (i_h + 2.0 * i_y) * b)
    return -params.r_h * num / (b * i_h * beta)


def radius_low_speed(beta: float, params: RobotParams) -> float:
    if beta == 0.0:
        return math.inf
    inertias = derive_inertias(params)
    i_h, i_y = inertias.i_h, inertias.i_y
    return -params.r_h * (i_h + 2.0 * i_y) / (i_h * beta)


def radius_high_speed(beta: float, psi_dot: float, params: RobotParams) -> float:
    """High-speed limit: radius grows with the squared forward speed."""
    if beta == 0.0:
        return math.inf
    _, b, _, n_coef, _, _ = _coefficients(params)
    return -n_coef * params.r_h * psi_dot**2 / (b * beta)


def theta_solution(t, amplitude: float, omega: float):
    """Lean-angle solution theta(t) = A (1 - cos(omega t)).

    Starts at zero with zero rate; the mean over a period equals A.
    """
    return amplitude * (1.0 - np.cos(omega * np.asarray(t, dtype=float)))


# --- measurement ------------------------------------------------------------


@dataclass(frozen=True)
class CircleMetrics:
    """Wobble amplitude/frequency, mean precession and signed radius."""

    amplitude: float
    frequency: float
    precession_mean: float
    radius: float
    provenance: str  # "predicted" | "measured"

    def to_json_dict(self) -> dict:
        return {
            "amplitude_rad": self.amplitude,
            "frequency_rad_s": self.frequency,
            "precession_mean_rad_s": self.precession_mean,
            "radius_m": self.radius,
            "provenance": self.provenance,
        }


def predict_circle_metrics(
    beta: float, psi_dot: float, params: RobotParams
) -> CircleMetrics:
    amplitude = wobble_amplitude(beta, psi_dot, params)
    return CircleMetrics(
        amplitude=amplitude,
        frequency=wobble_frequency(psi_dot, params),
        # The lean oscillates about its mean value A.
        precession_mean=precession_rate(amplitude, psi_dot, params),
        radius=radius_of_curvature(beta, psi_dot, params),
        provenance="predicted",
    )


def fit_circle(x, z) -> tuple[float, float, float, float]:
    """Total least-squares circle fit.

    Algebraic (Kasa) fit refined by Gauss-Newton on the orthogonal
    distances.  Returns (cx, cz, radius, rms_residual).
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.size < 3:
        raise InsufficientDataError("circle fit needs at least 3 points")
    a_mat = np.column_stack([2.0 * x, 2.0 * z, np.ones(x.size)])
    rhs = x**2 + z**2
    (cx, cz, c0), *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    r = math.sqrt(max(c0 + cx**2 + cz**2, 0.0))
    for _ in range(30):
        dx = x - cx
        dz = z - cz
        dist = np.hypot(dx, dz)
        if np.any(dist == 0.0):
            break
        ux, uz = dx / dist, dz / dist
        jac = np.column_stack([-ux, -uz, -np.ones(x.size)])
        res = dist - r
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        cx += step[0]
        cz += step[1]
        r += step[2]
        if np.max(np.abs(step)) < 1e-14 * max(r, 1.0):
            break
    dist = np.hypot(x - cx, z - cz)
    rms = float(np.sqrt(np.mean((dist - r) ** 2)))
    return float(cx), float(cz), float(r), rms


def _zero_crossings(t, y) -> np.ndarray:
    """Times where y crosses zero, linearly interpolated."""
    s = np.sign(y)
    idx = np.where((s[:-1] != s[1:]) & (s[:-1] != 0))[0]
    y0, y1 = y[idx], y[idx + 1]
    frac = y0 / (y0 - y1)
    return t[idx] + frac * (t[idx + 1] - t[idx])


def _refined_extrema(t, y) -> tuple[np.ndarray, np.ndarray]:
    """Parabolically refined local maxima and minima values of y(t)."""
    maxima, minima = [], []
    for i in range(1, y.size - 1):
        if y[i] >= y[i - 1] and y[i] >= y[i + 1] and (y[i] > y[i - 1] or y[i] > y[i + 1]):
            store = maxima
        elif y[i] <= y[i - 1] and y[i] <= y[i + 1] and (y[i] < y[i - 1] or y[i] < y[i + 1]):
            store = minima
        else:
            continue
        denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
        if denom != 0.0:
            delta = 0.5 * (y[i - 1] - y[i + 1]) / denom
            value = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta
        else:
            value = y[i]
        store.append(value)
    return np.asarray(maxima), np.asarray(minima)


def analysis_window(traj: Trajectory,
                    warmup_fraction: float = WARMUP_FRACTION) -> Trajectory:
    """Drop the leading transient fraction of a run."""
    t0 = traj.t[0] + warmup_fraction * traj.duration
    return traj.window(t0)


def measure_wobble(traj: Trajectory) -> tuple[float, float]:
    """Signed amplitude and frequency of the lean oscillation.

    Amplitude is half the mean peak-to-peak excursion, signed by the mean
    lean; frequency comes from the mean spacing of zero crossings of the
    de-meaned lean angle.  Raises when fewer than five periods are
    available.
    """
    theta = traj.column("theta")
    t = traj.t
    crossings = _zero_crossings(t, theta - theta.mean())
    if crossings.size < 2 * MIN_WOBBLE_PERIODS:
        raise InsufficientDataError(
            f"need at least {MIN_WOBBLE_PERIODS} wobble periods, found "
            f"{crossings.size / 2:.1f}"
        )
    frequency = math.pi / float(np.mean(np.diff(crossings)))
    maxima, minima = _refined_extrema(t, theta)
    if maxima.size == 0 or minima.size == 0:
        raise InsufficientDataError("no lean-angle extrema in the window")
    amplitude = 0.5 * float(maxima.mean() - minima.mean())
    sign = 1.0 if theta.mean() >= 0.0 else -1.0
    return sign * amplitude, frequency


def measure_precession(traj: Trajectory) -> float:
    """Time-averaged heading rate over the window."""
    if traj.duration <= 0.0:
        raise InsufficientDataError("empty analysis window")
    phi = traj.column("phi")
    return float((phi[-1] - phi[0]) / traj.duration)


def measure_radius(traj: Trajectory) -> float:
    """Signed radius from a circle fit to the ground path.

    The sign follows the pure-rolling identity rho = psi_dot r_h /
    phi_dot: forward speed over the measured precession.  Raises when the
    fit residuals exceed the circularity limit.
    """
    cx, cz, r, rms = fit_circle(traj.column("X"), traj.column("Z"))
    if rms > CIRCLE_RESIDUAL_LIMIT * r:
        raise NotCircularError(
            f"circle-fit rms residual {rms:.4g} exceeds "
            f"{CIRCLE_RESIDUAL_LIMIT:.0%} of fitted radius {r:.4g}"
        )
    precession = measure_precession(traj)
    psi_dot = float(np.mean(traj.column("dpsi")))
    if precession != 0.0:
        sign = math.copysign(1.0, psi_dot * traj.params.r_h / precession)
    else:
        sign = 1.0
    return sign * r


def measure_circle_metrics(
    traj: Trajectory, warmup_fraction: float = WARMUP_FRACTION
) -> CircleMetrics:
    """Extract all steady-circle metrics from a simulated run."""
    win = analysis_window(traj, warmup_fraction)
    if len(win) < 8:
        raise InsufficientDataError("analysis window is nearly empty")
    amplitude, frequency = measure_wobble(win)
    return CircleMetrics(
        amplitude=amplitude,
        frequency=frequency,
        precession_mean=measure_precession(win),
        radius=measure_radius(win),
        provenance="measured",
    )


# --- reduced-model cross-check ----------------------------------------------


def reduced_model_residuals(
    x, qdd, params: RobotParams
) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of the constant-angle reduced model at one state.

    ``qdd`` is the 6-vector of accelerations in q order [X, Z, phi, theta,
    psi, beta].  Returns (residuals, dominant) for the three reduced
    equations, where ``dominant`` is the largest absolute summand of each
    equation, suitable for relative-residual gating.
    """
    inertias = derive_inertias(params)
    i_h, i_y, i_p = inertias.i_h, inertias.i_y, inertias.i_p
    m_p, r_p, r_h, g = params.m_p, params.r_p, params.r_h, params.g
    sm = params.total_mass
    theta, beta = float(x[THETA]), float(x[BETA])
    dphi, dtheta, dpsi = float(x[6]), float(x[7]), float(x[8])
    ddphi, ddtheta, ddpsi = float(qdd[2]), float(qdd[3]), float(qdd[4])
    bt = beta + theta

    terms1 = [
        (
            i_h + i_p / 2.0 + 1.5 * i_y + i_y * math.cos(2 * theta) / 2.0
            - i_p * math.cos(2 * bt) / 2.0
            + m_p * r_p**2 / 2.0 * (1.0 - math.cos(2 * bt))
        ) * ddphi,
        -(
            i_h * math.sin(theta)
            - m_p * r_p * r_h / 2.0 * (math.sin(beta) + math.sin(beta + 2 * theta))
        ) * ddpsi,
        -(
            i_h * math.cos(theta)
            - m_p * r_p * r_h / 2.0 * (math.cos(beta + 2 * theta) - math.cos(beta))
        ) * dpsi * dtheta,
        -(
            i_y * math.sin(2 * theta)
            - i_p * math.sin(2 * bt)
            - m_p * r_p**2 * math.sin(2 * bt)
            + m_p * r_p * r_h * math.sin(bt)
        ) * dphi * dtheta,
    ]
    terms2 = [
        (
            i_p + i_h + i_y + m_p * r_p**2 + sm * r_h**2
            - 2.0 * m_p * r_p * r_h * math.cos(bt)
        ) * ddtheta,
        m_p * r_p * r_h * math.sin(bt) * dtheta**2,
        (
            i_h * math.cos(theta) + sm * r_h**2 * math.cos(theta)
            - m_p * r_p * r_h / 2.0 * (math.cos(beta + 2 * theta) + math.cos(beta))
        ) * dphi * dpsi,
        m_p * r_p * g * math.sin(bt),
        (
            i_y * math.sin(2 * theta) / 2.0
            - i_p * math.sin(2 * bt) / 2.0
            - m_p * r_p**2 * math.sin(2 * bt) / 2.0
            + m_p * r_p * r_h * math.sin(bt)
        ) * dphi**2,
    ]
    cth = math.cos(theta)
    terms3 = [
        (i_h + sm * r_h**2 * cth**2) * ddpsi,
        -sm * r_h**2 / 2.0 * math.sin(2 * theta) * dpsi * dtheta,
        -(
            i_h * cth + sm * r_h**2 * cth
            - 2.0 * m_p * r_p * r_h * math.cos(beta) * cth**2
            + 2.0 * m_p * r_p * r_h * math.sin(beta) * cth * math.sin(theta)
        ) * dphi * dtheta,
        -(
            i_h * math.sin(theta)
            - m_p * r_p * r_h * math.sin(beta) * cth**2
            - m_p * r_p * r_h * math.cos(beta) * cth * math.sin(theta)
        ) * ddphi,
    ]
    residuals = np.array([sum(terms1), sum(terms2), sum(terms3)])
    dominant = np.array(
        [
            max(abs(v) for v in terms1),
            max(abs(v) for v in terms2),
            max(abs(v) for v in terms3),
        ]
    )
    return residuals, dominant


def reduced_model_max_relative_residual(
    traj: Trajectory, sample_stride: int = 25
) -> float:
    """Worst relative reduced-model residual along a pendulum-held run.

    Re-solves the ideally held equations of motion at sampled states and
    checks the resulting accelerations against the reduced equations.
    """
    worst = 0.0
    for x in traj.states[::sample_stride]:
        x = np.ascontiguousarray(x)
        sol = dynamics.assemble_eom_beta_held(x, 0.0, traj.params)
        residuals, dominant = reduced_model_residuals(x, sol.qdd, traj.params)
        dom = np.maximum(dominant, 1e-30)
        worst = max(worst, float(np.max(np.abs(residuals) / dom)))
    return worst
