"""Generated scalar kernel: mass matrix, velocity bias, gravity vector.

Auto-generated by tools/generate_kernels.py -- do not edit by hand.
Coordinate order: q = [X, Z, phi, theta, psi, beta].
"""

from math import cos, sin


def mass_bias_grav(phi, theta, beta, dX, dZ, dphi, dtheta, dpsi, dbeta,
                   mhy, mp, rp, Ih, Iy, Jp, grav, m_out, c_out, g_out):
    """Fill m_out (36, row-major 6x6), c_out (6) and g_out (6) in place."""
    x0 = mhy + mp
    x1 = mp*rp
    x2 = beta + theta
    x3 = sin(x2)
    x4 = cos(phi)
    x5 = x3*x4
    x6 = sin(phi)
    x7 = cos(x2)
    x8 = x1*x7
    x9 = -x6*x8
    x10 = x3*x6
    x11 = -x4*x8
    x12 = sin(beta)
    x13 = x12**2
    x14 = sin(theta)
    x15 = x14**2
    x16 = mp*rp**2
    x17 = 2*x7
    x18 = x12*x14*x17
    x19 = Jp + x16
    x20 = dbeta**2
    x21 = dphi**2
    x22 = dtheta**2
    x23 = dbeta*dphi
    x24 = x17*x4
    x25 = 2*dbeta*dtheta
    x26 = dphi*dtheta
    x27 = x17*x6
    x28 = cos(theta)
    x29 = Ih*x28
    x30 = dpsi*x29
    x31 = Iy*sin(2*theta)
    x32 = sin(2*x2)
    x33 = Jp*x32
    x34 = x16*x32
    x35 = (1/2)*dphi
    x36 = grav*x1*(x12*x28 + x14*cos(beta))
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
    c_out[5] = -1/2*x19*x21*x32
    g_out[0] = 0
    g_out[1] = 0
    g_out[2] = 0
    g_out[3] = x36
    g_out[4] = 0
    g_out[5] = x36
