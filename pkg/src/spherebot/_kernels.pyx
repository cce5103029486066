# cython: boundscheck=False, wraparound=False, cdivision=True
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
    cdef double x0 = mhy + mp
    cdef double x1 = mp*rp
    cdef double x2 = beta + theta
    cdef double x3 = sin(x2)
    cdef double x4 = cos(phi)
    cdef double x5 = x3*x4
    cdef double x6 = sin(phi)
    cdef double x7 = cos(x2)
    cdef double x8 = x1*x7
    cdef double x9 = -x6*x8
    cdef double x10 = x3*x6
    cdef double x11 = -x4*x8
    cdef double x12 = sin(beta)
    cdef double x13 = pow(x12, 2)
    cdef double x14 = sin(theta)
    cdef double x15 = pow(x14, 2)
    cdef double x16 = mp*pow(rp, 2)
    cdef double x17 = 2*x7
    cdef double x18 = x12*x14*x17
    cdef double x19 = Jp + x16
    cdef double x20 = pow(dbeta, 2)
    cdef double x21 = pow(dphi, 2)
    cdef double x22 = pow(dtheta, 2)
    cdef double x23 = dbeta*dphi
    cdef double x24 = x17*x4
    cdef double x25 = 2*dbeta*dtheta
    cdef double x26 = dphi*dtheta
    cdef double x27 = x17*x6
    cdef double x28 = cos(theta)
    cdef double x29 = Ih*x28
    cdef double x30 = dpsi*x29
    cdef double x31 = Iy*sin(2*theta)
    cdef double x32 = sin(2*x2)
    cdef double x33 = Jp*x32
    cdef double x34 = x16*x32
    cdef double x35 = (1.0/2.0)*dphi
    cdef double x36 = grav*x1*(x12*x28 + x14*cos(beta))
    m_out[0] = x0
    m_out[1] = 0
    m_out[6] = m_out[1]
    m_out[2] = -x1*x5
    m_out[12] = m_out[2]
    m_out[3] = x9
    m_out[18] = m_out[3]
    m_out[4] = 0
    m_out[24] = m_out[4]
    m_out[5] = x9
    m_out[30] = m_out[5]
    m_out[7] = x0
    m_out[8] = x1*x10
    m_out[13] = m_out[8]
    m_out[9] = x11
    m_out[19] = m_out[9]
    m_out[10] = 0
    m_out[25] = m_out[10]
    m_out[11] = x11
    m_out[31] = m_out[11]
    m_out[14] = Ih - Iy*x15 + 2*Iy + Jp*x13 + Jp*x15 + Jp*x18 + x13*x16 + x15*x16 + x16*x18
    m_out[15] = 0
    m_out[20] = m_out[15]
    m_out[16] = -Ih*x14
    m_out[26] = m_out[16]
    m_out[17] = 0
    m_out[32] = m_out[17]
    m_out[21] = Ih + Iy + x19
    m_out[22] = 0
    m_out[27] = m_out[22]
    m_out[23] = x19
    m_out[33] = m_out[23]
    m_out[28] = Ih
    m_out[29] = 0
    m_out[34] = m_out[29]
    m_out[35] = x19
    c_out[0] = x1*(x10*x20 + x10*x21 + x10*x22 + x10*x25 - x23*x24 - x24*x26)
    c_out[1] = x1*(x20*x5 + x21*x5 + x22*x5 + x23*x27 + x25*x5 + x26*x27)
    c_out[2] = -dtheta*x30 + x23*x33 + x23*x34 - x26*x31 + x26*x33 + x26*x34
    c_out[3] = dphi*(x30 + x31*x35 - x33*x35 - x34*x35)
    c_out[4] = -x26*x29
    c_out[5] = -1.0/2.0*x19*x21*x32
    g_out[0] = 0
    g_out[1] = 0
    g_out[2] = 0
    g_out[3] = x36
    g_out[4] = 0
    g_out[5] = x36


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
