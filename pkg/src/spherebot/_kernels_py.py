"""Pure-Python fallback for the compiled equation-of-motion kernels.

Mirrors the API of the Cython extension ``spherebot._kernels``: each
function fills caller-provided arrays and returns a cheap conditioning
estimate of the multiplier-augmented system (max/min LU pivot magnitude).
Coordinate order: q = [X, Z, phi, theta, psi, beta]; parameter vector
p = [mhy, mp, rp, rh, Ih, Iy, Jp, g].
"""

import math
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from ._terms_py import mass_bias_grav

COMPILED = False

_BETA_ROW = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0])


def eom_terms(x, p, m_out, c_out, g_out):
    """Mass matrix (row-major 6x6), bias and gravity vectors at state x."""
    mass_bias_grav(
        x[0], x[1], x[3], x[10], x[11], x[6], x[7], x[8], x[9],
        p[0], p[1], p[2], p[4], p[5], p[6], p[7], m_out, c_out, g_out,
    )


def _constraints(x, rh):
    phi, theta = x[0], x[1]
    dphi, dtheta, dpsi = x[6], x[7], x[8]
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


def _solve(x, p, forces, hold_beta):
    """Solve [M, -A^T; A, 0] [qdd; lam] = [Q - c - g; -Adot qd].

    ``forces`` is a (6, nrhs) array of generalized-force columns; returns
    (solutions (6+nc, nrhs), cond_estimate).
    """
    m = np.empty(36)
    c = np.empty(6)
    g = np.empty(6)
    eom_terms(x, p, m, c, g)
    m = m.reshape(6, 6)
    a, adot_qd = _constraints(x, p[3])
    if hold_beta:
        a = np.vstack([a, _BETA_ROW])
        adot_qd = np.append(adot_qd, 0.0)
    nc = a.shape[0]
    n = 6 + nc
    aug = np.zeros((n, n))
    aug[:6, :6] = m
    aug[:6, 6:] = -a.T
    aug[6:, :6] = a
    rhs = np.empty((n, forces.shape[1]))
    rhs[:6] = forces - (c + g)[:, None]
    rhs[6:] = -adot_qd[:, None]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        try:
            lu, piv = lu_factor(aug, check_finite=False)
        except ValueError:
            return np.full_like(rhs, np.nan), math.inf
    diag = np.abs(np.diag(lu))
    if diag.min() == 0.0 or not np.all(np.isfinite(diag)):
        return np.full_like(rhs, np.nan), math.inf
    cond = float(diag.max() / diag.min())
    sol = lu_solve((lu, piv), rhs, check_finite=False)
    return sol, cond


def solve_eom(x, ts, tp, p, qdd_out, lam_out):
    """Constrained accelerations and multipliers for torques (ts, tp)."""
    forces = np.zeros((6, 1))
    forces[4, 0] = ts
    forces[5, 0] = tp
    sol, cond = _solve(x, p, forces, hold_beta=False)
    qdd_out[:] = sol[:6, 0]
    lam_out[:] = sol[6:, 0]
    return cond


def solve_eom_beta_held(x, ts, p, qdd_out, lam_out):
    """Accelerations with an ideal pendulum-angle hold (beta'' = 0)."""
    forces = np.zeros((6, 1))
    forces[4, 0] = ts
    sol, cond = _solve(x, p, forces, hold_beta=True)
    qdd_out[:] = sol[:6, 0]
    lam_out[:] = sol[6:, 0]
    return cond


def affine_eom(x, p, f_out, gs_out, gp_out):
    """Drift accelerations plus per-unit-torque acceleration columns.

    A single factorization serves the three right-hand sides; the result
    is exact because the equations of motion are affine in the torques.
    """
    forces = np.zeros((6, 3))
    forces[4, 1] = 1.0
    forces[5, 2] = 1.0
    sol, cond = _solve(x, p, forces, hold_beta=False)
    f_out[:] = sol[:6, 0]
    gs_out[:] = sol[:6, 1] - sol[:6, 0]
    gp_out[:] = sol[:6, 2] - sol[:6, 0]
    return cond


_QDD_TO_STATE = (2, 3, 4, 5, 0, 1)


def derivative(x, ts, tp, p, out):
    """Full 12-state time derivative; returns the conditioning estimate."""
    forces = np.zeros((6, 1))
    forces[4, 0] = ts
    forces[5, 0] = tp
    sol, cond = _solve(x, p, forces, hold_beta=False)
    out[:6] = x[6:]
    out[6:] = sol[_QDD_TO_STATE, 0]
    return cond
