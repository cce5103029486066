#!/usr/bin/env python3
"""Derive the rolling-robot equations of motion and emit numeric kernels.

Run from the repository root:

    python3 tools/generate_kernels.py

The script builds the system Lagrangian (hull + yoke + pendulum, rolling
without slipping), extracts the mass matrix M(q), the velocity-product
bias vector and the gravity vector, cross-checks them against the reduced
constant-pendulum-angle model, and then writes two generated sources:

    src/spherebot/_terms_py.py   pure-Python scalar kernel
    src/spherebot/_kernels.pyx   Cython kernel (compiled extension)

Both files are committed; regeneration is only needed when the derivation
changes.  Generalized coordinate order everywhere: q = [X, Z, phi, theta,
psi, beta].
"""

import sys
from pathlib import Path

import numpy as np
import sympy as sp
from sympy import Matrix, Rational, cos, sin, symbols

ROOT = Path(__file__).resolve().parent.parent
OUT_PY = ROOT / "src" / "spherebot" / "_terms_py.py"
OUT_PYX = ROOT / "src" / "spherebot" / "_kernels.pyx"

# --- symbols ------------------------------------------------------------

phi, theta, psi, beta = symbols("phi theta psi beta", real=True)
dphi, dtheta, dpsi, dbeta = symbols("dphi dtheta dpsi dbeta", real=True)
dX, dZ = symbols("dX dZ", real=True)
# mhy = m_h + m_y (hull and yoke COMs both sit at the sphere centre)
mhy, mp, rp, rh = symbols("mhy mp rp rh", positive=True)
Ih, Iy, Jp, grav = symbols("Ih Iy Jp grav", positive=True)

Q_SYMS = (symbols("X_", real=True), symbols("Z_", real=True), phi, theta, psi, beta)
QD_SYMS = (dX, dZ, dphi, dtheta, dpsi, dbeta)
PARAM_SYMS = (mhy, mp, rp, rh, Ih, Iy, Jp, grav)


def rot_x(a):
    return Matrix([[1, 0, 0], [0, cos(a), -sin(a)], [0, sin(a), cos(a)]])


def rot_y(a):
    return Matrix([[cos(a), 0, sin(a)], [0, 1, 0], [-sin(a), 0, cos(a)]])


def rot_z(a):
    return Matrix([[cos(a), -sin(a), 0], [sin(a), cos(a), 0], [0, 0, 1]])


def time_derivative(expr):
    """d/dt of an expression in (phi, theta, psi, beta) along the flow."""
    pairs = ((phi, dphi), (theta, dtheta), (psi, dpsi), (beta, dbeta))
    return sum(expr.diff(s) * ds for s, ds in pairs)


def build_lagrangian_pieces():
    """Return (K, V) for the three-body system."""
    # Body angular velocities in their own frames (YXZ Euler sequence).
    w_y = Matrix([dtheta, dphi * cos(theta), -dphi * sin(theta)])
    w_p = Matrix(
        [dbeta + dtheta, dphi * cos(beta + theta), -dphi * sin(beta + theta)]
    )
    w_h = Matrix(
        [
            dtheta * cos(psi) + dphi * cos(theta) * sin(psi),
            dphi * cos(psi) * cos(theta) - dtheta * sin(psi),
            dpsi - dphi * sin(theta),
        ]
    )

    # Pendulum COM relative to the sphere centre, in the global frame.
    r_gp = rot_y(phi) * rot_x(theta) * rot_x(beta)
    p_local = Matrix([0, -rp, 0])
    r_rel = r_gp * p_local
    v_rel = r_rel.applyfunc(time_derivative)

    v_center = Matrix([dX, 0, dZ])
    v_pc = v_center + v_rel

    i_yoke = sp.diag(Iy, 2 * Iy, Iy)
    i_pend = sp.diag(Jp, 0, Jp)

    K = (
        Rational(1, 2) * mhy * (dX**2 + dZ**2)
        + Rational(1, 2) * mp * (v_pc.T * v_pc)[0]
        + Rational(1, 2) * Ih * (w_h.T * w_h)[0]
        + Rational(1, 2) * (w_y.T * i_yoke * w_y)[0]
        + Rational(1, 2) * (w_p.T * i_pend * w_p)[0]
    )
    K = sp.trigsimp(sp.expand(K))

    # Potential energy, datum at the sphere centre; yoke COM sits at the
    # datum so only the pendulum contributes.
    V = mp * grav * r_rel[1]
    return K, V


def extract_terms(K, V):
    """Mass matrix, velocity bias and gravity vector from the Lagrangian."""
    qd = Matrix(QD_SYMS)
    M = sp.hessian(K, qd)
    M = M.applyfunc(lambda e: sp.trigsimp(sp.expand(e)))

    # bias_i = sum_k d(dK/dqd_i)/dq_k * qd_k - dK/dq_i  (the q''-free part of
    # d/dt(dK/dqd) - dK/dq).
    momenta = [sp.diff(K, v) for v in QD_SYMS]
    bias = []
    for i in range(6):
        term = time_derivative(momenta[i]) - sp.diff(K, Q_SYMS[i])
        bias.append(sp.trigsimp(sp.expand(term)))
    gravity = [sp.diff(V, s) for s in Q_SYMS]
    return M, Matrix(bias), Matrix(gravity)


# --- verification helpers ------------------------------------------------


def constraint_matrix():
    """A(q) with A q' = 0 the two rolling constraints, plus Adot*qd."""
    a1 = Matrix([[1, 0, 0, -rh * sin(phi), rh * cos(phi) * cos(theta), 0]])
    a2 = Matrix([[0, 1, 0, -rh * cos(phi), -rh * sin(phi) * cos(theta), 0]])
    A = Matrix.vstack(a1, a2)
    qd = Matrix(QD_SYMS)
    adot_qd = Matrix([time_derivative((A[i, :] * qd)[0]) for i in range(2)])
    # time_derivative of A[i]*qd also differentiates qd terms -> zero since
    # qd symbols are independent; only the q-dependence of A contributes.
    return A, adot_qd


SIGMA_M_SYM = symbols("sigma_m", positive=True)  # m_p + m_y + m_h
IP_SYM = symbols("Ip_", positive=True)


def reduced_model_equations():
    """Transcriptions of the constant-beta circular-motion equations.

    Returns (expr1, expr2, expr3, ddphi, ddtheta, ddpsi); each expr == 0 in
    the reduced model.  Uses sigma_m for the total mass and Ip_ for the
    pendulum inertia scalar.
    """
    ddphi, ddtheta, ddpsi = symbols("ddphi ddtheta ddpsi", real=True)
    sm = SIGMA_M_SYM
    Ip = IP_SYM

    e1 = (
        (
            Ih
            + Ip / 2
            + 3 * Iy / 2
            + Iy * cos(2 * theta) / 2
            - Ip * cos(2 * beta + 2 * theta) / 2
            + mp * rp**2 / 2 * (1 - cos(2 * beta + 2 * theta))
        )
        * ddphi
        - (Ih * sin(theta) - mp * rp * rh / 2 * (sin(beta) + sin(beta + 2 * theta)))
        * ddpsi
        - (Ih * cos(theta) - mp * rp * rh / 2 * (cos(beta + 2 * theta) - cos(beta)))
        * dpsi
        * dtheta
        - (
            Iy * sin(2 * theta)
            - Ip * sin(2 * beta + 2 * theta)
            - mp * rp**2 * sin(2 * beta + 2 * theta)
            + mp * rp * rh * sin(beta + theta)
        )
        * dphi
        * dtheta
    )
    e2 = (
        (Ip + Ih + Iy + mp * rp**2 + sm * rh**2 - 2 * mp * rp * rh * cos(beta + theta))
        * ddtheta
        + mp * rp * rh * sin(beta + theta) * dtheta**2
        + (
            Ih * cos(theta)
            + sm * rh**2 * cos(theta)
            - mp * rp * rh / 2 * (cos(beta + 2 * theta) + cos(beta))
        )
        * dphi
        * dpsi
        + mp * rp * grav * sin(beta + theta)
        + (
            Iy * sin(2 * theta) / 2
            - Ip * sin(2 * beta + 2 * theta) / 2
            - mp * rp**2 * sin(2 * beta + 2 * theta) / 2
            + mp * rp * rh * sin(beta + theta)
        )
        * dphi**2
    )
    e3 = (
        (Ih + sm * rh**2 * cos(theta) ** 2) * ddpsi
        - sm * rh**2 / 2 * sin(2 * theta) * dpsi * dtheta
        - (
            Ih * cos(theta)
            + sm * rh**2 * cos(theta)
            - 2 * mp * rp * rh * cos(beta) * cos(theta) ** 2
            + 2 * mp * rp * rh * sin(beta) * cos(theta) * sin(theta)
        )
        * dphi
        * dtheta
        - (
            Ih * sin(theta)
            - mp * rp * rh * sin(beta) * cos(theta) ** 2
            - mp * rp * rh * cos(beta) * cos(theta) * sin(theta)
        )
        * ddphi
    )
    return e1, e2, e3, ddphi, ddtheta, ddpsi


def verify(M, bias, gravity, K):
    rng = np.random.default_rng(20260811)

    # Structural checks: K must not involve X, Z or psi.
    for s in (Q_SYMS[0], Q_SYMS[1], psi):
        assert sp.simplify(K.diff(s)) == 0, f"K depends on {s}"

    A, adot_qd = constraint_matrix()
    lam_syms = Matrix(symbols("lam1 lam2 lam3", real=True))

    args = list(QD_SYMS) + [phi, theta, beta] + list(PARAM_SYMS)
    f_M = sp.lambdify(args, M, "numpy")
    f_bias = sp.lambdify(args, bias, "numpy")
    f_grav = sp.lambdify(args, gravity, "numpy")
    f_A = sp.lambdify(args, A, "numpy")
    f_adqd = sp.lambdify(args, adot_qd, "numpy")
    f_K = sp.lambdify(args, K, "numpy")

    e1, e2, e3, ddphi_s, ddtheta_s, ddpsi_s = reduced_model_equations()
    red_args = [dphi, dtheta, dpsi, phi, theta, beta, ddphi_s, ddtheta_s, ddpsi_s,
                mp, rp, rh, Ih, Iy, IP_SYM, SIGMA_M_SYM, grav]
    f_red = sp.lambdify(red_args, Matrix([e1, e2, e3]), "numpy")

    max_spd_violation = 0.0
    max_quadform_err = 0.0
    max_reduced_resid = 0.0
    max_sparsity = 0.0

    for _ in range(60):
        p = dict(
            mhy=rng.uniform(0.5, 6.0),
            mp=rng.uniform(0.2, 5.0),
            rp=rng.uniform(0.03, 0.3),
            rh=0.0,
            Ih=rng.uniform(0.005, 0.2),
            Iy=rng.uniform(0.001, 0.05),
            Jp=rng.uniform(0.001, 0.05),
            grav=9.81,
        )
        p["rh"] = p["rp"] + rng.uniform(0.02, 0.4)
        ang = rng.uniform(-1.2, 1.2, size=3)  # phi, theta, beta
        rates = rng.uniform(-3.0, 3.0, size=6)
        vals = list(rates) + list(ang) + [p[k.name] for k in PARAM_SYMS]

        Mn = np.asarray(f_M(*vals), dtype=float)
        cn = np.asarray(f_bias(*vals), dtype=float).ravel()
        gn = np.asarray(f_grav(*vals), dtype=float).ravel()
        An = np.asarray(f_A(*vals), dtype=float)
        adn = np.asarray(f_adqd(*vals), dtype=float).ravel()
        Kn = float(f_K(*vals))

        # Symmetry / positive definiteness / quadratic-form identity.
        max_spd_violation = max(
            max_spd_violation, float(np.max(np.abs(Mn - Mn.T)))
        )
        ev = np.linalg.eigvalsh(0.5 * (Mn + Mn.T))
        assert ev.min() > 0, f"mass matrix not SPD: {ev}"
        qd = np.asarray(rates, dtype=float)
        max_quadform_err = max(
            max_quadform_err, abs(0.5 * qd @ Mn @ qd - Kn) / max(abs(Kn), 1e-12)
        )

        # Reduced model with an exact beta hold: dbeta = 0, ddbeta = 0 via a
        # third constraint row, zero applied torques, rolling-consistent
        # velocities.
        rates_held = rates.copy()
        rates_held[5] = 0.0
        ph, th, be = ang
        rates_held[0] = p["rh"] * (
            rates_held[3] * np.sin(ph) - rates_held[4] * np.cos(ph) * np.cos(th)
        )
        rates_held[1] = p["rh"] * (
            rates_held[3] * np.cos(ph) + rates_held[4] * np.sin(ph) * np.cos(th)
        )
        vals_h = list(rates_held) + list(ang) + [p[k.name] for k in PARAM_SYMS]
        Mh = np.asarray(f_M(*vals_h), dtype=float)
        ch = np.asarray(f_bias(*vals_h), dtype=float).ravel()
        gh = np.asarray(f_grav(*vals_h), dtype=float).ravel()
        Ah = np.asarray(f_A(*vals_h), dtype=float)
        adh = np.asarray(f_adqd(*vals_h), dtype=float).ravel()
        A3 = np.vstack([Ah, [0, 0, 0, 0, 0, 1]])
        ad3 = np.concatenate([adh, [0.0]])
        aug = np.block([[Mh, -A3.T], [A3, np.zeros((3, 3))]])
        rhs = np.concatenate([-ch - gh, -ad3])
        sol = np.linalg.solve(aug, rhs)
        qdd = sol[:6]
        red = np.asarray(
            f_red(
                rates_held[2], rates_held[3], rates_held[4],
                ph, th, be,
                qdd[2], qdd[3], qdd[4],
                p["mp"], p["rp"], p["rh"], p["Ih"], p["Iy"], p["Jp"],
                p["mhy"] + p["mp"], p["grav"],
            ),
            dtype=float,
        ).ravel()
        scale = max(np.abs(qdd).max(), 1.0)
        max_reduced_resid = max(max_reduced_resid, float(np.abs(red).max() / scale))

        # Input-matrix sparsity of the constrained system: T_s must not
        # excite theta'' or beta''; T_p must not excite phi'' or psi''.
        aug2 = np.block([[Mn, -An.T], [An, np.zeros((2, 2))]])
        base = np.linalg.solve(aug2, np.concatenate([-cn - gn, -adn]))
        col_s = np.linalg.solve(
            aug2, np.concatenate([-cn - gn + np.eye(6)[4], -adn])
        ) - base
        col_p = np.linalg.solve(
            aug2, np.concatenate([-cn - gn + np.eye(6)[5], -adn])
        ) - base
        # q order [X, Z, phi, theta, psi, beta]
        max_sparsity = max(
            max_sparsity,
            abs(col_s[3]), abs(col_s[5]), abs(col_p[2]), abs(col_p[4]),
        )

    print(f"  max |M - M^T|            : {max_spd_violation:.3e}")
    print(f"  max |q'Mq'/2 - K| (rel)  : {max_quadform_err:.3e}")
    print(f"  max reduced-model resid  : {max_reduced_resid:.3e}")
    print(f"  max G sparsity leakage   : {max_sparsity:.3e}")
    assert max_spd_violation < 1e-12
    assert max_quadform_err < 1e-9
    assert max_reduced_resid < 1e-8, "derivation disagrees with reduced model"
    assert max_sparsity < 1e-9, "input-matrix sparsity pattern violated"


# --- code emission --------------------------------------------------------

PY_HEADER = '''"""Generated scalar kernel: mass matrix, velocity bias, gravity vector.

Auto-generated by tools/generate_kernels.py -- do not edit by hand.
Coordinate order: q = [X, Z, phi, theta, psi, beta].
"""

from math import cos, sin


def mass_bias_grav(phi, theta, beta, dX, dZ, dphi, dtheta, dpsi, dbeta,
                   mhy, mp, rp, Ih, Iy, Jp, grav, m_out, c_out, g_out):
    """Fill m_out (36, row-major 6x6), c_out (6) and g_out (6) in place."""
'''

PYX_HEADER = '''# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernels for the rolling-robot equations of motion.

The expression block is auto-generated by tools/generate_kernels.py -- do
not edit it by hand.  Coordinate order: q = [X, Z, phi, theta, psi, beta];
state order: [phi, theta, psi, beta, X, Z, dphi, dtheta, dpsi, dbeta, dX, dZ].
"""

from libc.math cimport cos, sin, fabs, pow

COMPILED = True


cdef void _mass_bias_grav(double phi, double theta, double beta,
                          double dX, double dZ, double dphi, double dtheta,
                          double dpsi, double dbeta,
                          double mhy, double mp, double rp,
                          double Ih, double Iy, double Jp, double grav,
                          double* m_out, double* c_out, double* g_out) noexcept nogil:
'''

PYX_BODY = r'''

cdef void _constraints(double phi, double theta, double dphi, double dtheta,
                       double dpsi, double rh, double* a1, double* a2,
                       double* adot_qd) noexcept nogil:
    cdef double sphi = sin(phi)
    cdef double cphi = cos(phi)
    cdef double sth = sin(theta)
    cdef double cth = cos(theta)
    a1[0] = 1.0; a1[1] = 0.0; a1[2] = 0.0
    a1[3] = -rh * sphi
    a1[4] = rh * cphi * cth
    a1[5] = 0.0
    a2[0] = 0.0; a2[1] = 1.0; a2[2] = 0.0
    a2[3] = -rh * cphi
    a2[4] = -rh * sphi * cth
    a2[5] = 0.0
    # (dA/dt) q' from the phi- and theta-dependence of A
    adot_qd[0] = (-rh * cphi * dphi * dtheta
                  - rh * (sphi * dphi * cth + cphi * sth * dtheta) * dpsi)
    adot_qd[1] = (rh * sphi * dphi * dtheta
                  - rh * (cphi * dphi * cth - sphi * sth * dtheta) * dpsi)


cdef double _solve_gepp(double* a, double* b, int n, int nrhs) noexcept nogil:
    """In-place Gaussian elimination with partial pivoting.

    a is n*n row-major, b is n*nrhs row-major; solutions overwrite b.
    Returns max|pivot|/min|pivot| as a cheap conditioning estimate, or a
    huge value when a pivot vanishes.
    """
    cdef int i, j, k, r, piv
    cdef double best, v, f
    cdef double pmax = 0.0
    cdef double pmin = 1e300
    for k in range(n):
        piv = k
        best = fabs(a[k * n + k])
        for r in range(k + 1, n):
            v = fabs(a[r * n + k])
            if v > best:
                best = v
                piv = r
        if piv != k:
            for j in range(n):
                v = a[k * n + j]; a[k * n + j] = a[piv * n + j]; a[piv * n + j] = v
            for j in range(nrhs):
                v = b[k * nrhs + j]; b[k * nrhs + j] = b[piv * nrhs + j]; b[piv * nrhs + j] = v
        if best == 0.0:
            return 1e300
        if best > pmax:
            pmax = best
        if best < pmin:
            pmin = best
        for r in range(k + 1, n):
            f = a[r * n + k] / a[k * n + k]
            if f != 0.0:
                for j in range(k + 1, n):
                    a[r * n + j] -= f * a[k * n + j]
                for j in range(nrhs):
                    b[r * nrhs + j] -= f * b[k * nrhs + j]
    for k in range(n - 1, -1, -1):
        for j in range(nrhs):
            v = b[k * nrhs + j]
            for i in range(k + 1, n):
                v -= a[k * n + i] * b[i * nrhs + j]
            b[k * nrhs + j] = v / a[k * n + k]
    return pmax / pmin


cdef double _assemble_and_solve(double[::1] x, double[::1] p,
                                double* rhs_forces, int nrhs, int hold_beta,
                                double* sol) noexcept nogil:
    """Solve the multiplier-augmented system for one or more force columns.

    rhs_forces is 6*nrhs row-major generalized-force columns Q_j; sol
    receives (6+nc)*nrhs rows [qdd; lambda] per column.
    """
    cdef double m[36]
    cdef double c[6]
    cdef double g[6]
    cdef double a1[6]
    cdef double a2[6]
    cdef double adqd[2]
    cdef double aug[81]
    cdef double rhs[27]
    cdef int nc = 3 if hold_beta else 2
    cdef int n = 6 + nc
    cdef int i, j
    _mass_bias_grav(x[0], x[1], x[3], x[10], x[11], x[6], x[7], x[8], x[9],
                    p[0], p[1], p[2], p[4], p[5], p[6], p[7], m, c, g)
    _constraints(x[0], x[1], x[6], x[7], x[8], p[3], a1, a2, adqd)
    for i in range(n * n):
        aug[i] = 0.0
    for i in range(6):
        for j in range(6):
            aug[i * n + j] = m[i * 6 + j]
        aug[i * n + 6] = -a1[i]
        aug[i * n + 7] = -a2[i]
        aug[6 * n + i] = a1[i]
        aug[7 * n + i] = a2[i]
        if hold_beta:
            aug[8 * n + i] = 1.0 if i == 5 else 0.0
            aug[i * n + 8] = -1.0 if i == 5 else 0.0
    for j in range(nrhs):
        for i in range(6):
            rhs[i * nrhs + j] = rhs_forces[i * nrhs + j] - c[i] - g[i]
        rhs[6 * nrhs + j] = -adqd[0]
        rhs[7 * nrhs + j] = -adqd[1]
        if hold_beta:
            rhs[8 * nrhs + j] = 0.0
    cdef double cond = _solve_gepp(aug, rhs, n, nrhs)
    for i in range(n):
        for j in range(nrhs):
            sol[i * nrhs + j] = rhs[i * nrhs + j]
    return cond


def eom_terms(double[::1] x, double[::1] p, double[::1] m_out,
              double[::1] c_out, double[::1] g_out):
    """Mass matrix (row-major 6x6), bias and gravity vectors at state x."""
    _mass_bias_grav(x[0], x[1], x[3], x[10], x[11], x[6], x[7], x[8], x[9],
                    p[0], p[1], p[2], p[4], p[5], p[6], p[7],
                    &m_out[0], &c_out[0], &g_out[0])


def solve_eom(double[::1] x, double ts, double tp, double[::1] p,
              double[::1] qdd_out, double[::1] lam_out):
    """Constrained accelerations and multipliers for torques (ts, tp)."""
    cdef double forces[6]
    cdef double sol[8]
    cdef int i
    for i in range(6):
        forces[i] = 0.0
    forces[4] = ts
    forces[5] = tp
    cdef double cond = _assemble_and_solve(x, p, forces, 1, 0, sol)
    for i in range(6):
        qdd_out[i] = sol[i]
    lam_out[0] = sol[6]
    lam_out[1] = sol[7]
    return cond


def solve_eom_beta_held(double[::1] x, double ts, double[::1] p,
                        double[::1] qdd_out, double[::1] lam_out):
    """Accelerations with an ideal pendulum-angle hold (beta'' = 0)."""
    cdef double forces[6]
    cdef double sol[9]
    cdef int i
    for i in range(6):
        forces[i] = 0.0
    forces[4] = ts
    cdef double cond = _assemble_and_solve(x, p, forces, 1, 1, sol)
    for i in range(6):
        qdd_out[i] = sol[i]
    lam_out[0] = sol[6]
    lam_out[1] = sol[7]
    lam_out[2] = sol[8]
    return cond


def affine_eom(double[::1] x, double[::1] p, double[::1] f_out,
               double[::1] gs_out, double[::1] gp_out):
    """Drift accelerations plus per-unit-torque acceleration columns.

    One factorization serves the three right-hand sides; exact because the
    equations of motion are affine in the applied torques.
    """
    cdef double forces[18]
    cdef double sol[24]
    cdef int i
    for i in range(18):
        forces[i] = 0.0
    forces[4 * 3 + 1] = 1.0   # unit T_s column
    forces[5 * 3 + 2] = 1.0   # unit T_p column
    cdef double cond = _assemble_and_solve(x, p, forces, 3, 0, sol)
    for i in range(6):
        f_out[i] = sol[i * 3 + 0]
        gs_out[i] = sol[i * 3 + 1] - sol[i * 3 + 0]
        gp_out[i] = sol[i * 3 + 2] - sol[i * 3 + 0]
    return cond


def derivative(double[::1] x, double ts, double tp, double[::1] p,
               double[::1] out):
    """Full 12-state time derivative; returns the conditioning estimate."""
    cdef double forces[6]
    cdef double sol[8]
    cdef int i
    for i in range(6):
        forces[i] = 0.0
    forces[4] = ts
    forces[5] = tp
    cdef double cond = _assemble_and_solve(x, p, forces, 1, 0, sol)
    for i in range(6):
        out[i] = x[6 + i]
    # qdd order [X'', Z'', phi'', theta'', psi'', beta''] -> state order
    out[6] = sol[2]
    out[7] = sol[3]
    out[8] = sol[4]
    out[9] = sol[5]
    out[10] = sol[0]
    out[11] = sol[1]
    return cond
'''


def emit_code(M, bias, gravity):
    # Symmetric mass matrix: emit the upper triangle, mirror the rest.
    exprs = []
    targets = []
    for i in range(6):
        for j in range(i, 6):
            exprs.append(M[i, j])
            targets.append(("m", i * 6 + j, i, j))
    for i in range(6):
        exprs.append(bias[i])
        targets.append(("c", i, None, None))
    for i in range(6):
        exprs.append(gravity[i])
        targets.append(("g", i, None, None))

    repl, reduced = sp.cse(exprs, optimizations="basic", order="canonical")

    def py_lines():
        lines = []
        for lhs, rhs in repl:
            lines.append(f"    {lhs} = {sp.pycode(rhs)}")
        for (kind, idx, i, j), expr in zip(targets, reduced):
            code = sp.pycode(expr)
            if kind == "m":
                lines.append(f"    m_out[{idx}] = {code}")
                if i != j:
                    lines.append(f"    m_out[{j * 6 + i}] = m_out[{idx}]")
            elif kind == "c":
                lines.append(f"    c_out[{idx}] = {code}")
            else:
                lines.append(f"    g_out[{idx}] = {code}")
        return "\n".join(lines).replace("math.", "")

    def pyx_lines():
        lines = []
        for lhs, rhs in repl:
            lines.append(f"    cdef double {lhs} = {sp.ccode(rhs)}")
        for (kind, idx, i, j), expr in zip(targets, reduced):
            code = sp.ccode(expr)
            if kind == "m":
                lines.append(f"    m_out[{idx}] = {code}")
                if i != j:
                    lines.append(f"    m_out[{j * 6 + i}] = m_out[{idx}]")
            elif kind == "c":
                lines.append(f"    c_out[{idx}] = {code}")
            else:
                lines.append(f"    g_out[{idx}] = {code}")
        return "\n".join(lines)

    OUT_PY.parent.mkdir(parents=True, exist_ok=True)
    OUT_PY.write_text(PY_HEADER + py_lines() + "\n")
    OUT_PYX.write_text(PYX_HEADER + pyx_lines() + "\n" + PYX_BODY)
    print(f"  wrote {OUT_PY.relative_to(ROOT)}")
    print(f"  wrote {OUT_PYX.relative_to(ROOT)}")


def main():
    print("deriving Lagrangian terms ...")
    K, V = build_lagrangian_pieces()
    M, bias, gravity = extract_terms(K, V)
    print("verifying against the reduced constant-angle model ...")
    verify(M, bias, gravity, K)
    print("emitting kernels ...")
    emit_code(M, bias, gravity)
    print("done")


if __name__ == "__main__":
    sys.exit(main())
