# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-loop rollout kernel.

Line-for-line port of ``_pyloop``; see that module for the packed argument
layout and status codes. Expression ordering matches the pure-Python
implementation exactly so both backends give bit-identical trajectories
(the build disables FP contraction for that reason).
"""

from libc.math cimport sin, cos, atan, isfinite, M_PI

BACKEND_NAME = "compiled"

cdef double _PI = M_PI
cdef double _PI_2 = M_PI / 2.0


cdef struct Phys:
    double mt, mal, i0l, ia, zx, za, zb, g, L, malg

cdef struct Gains:
    double kpx, kvx, kpa, kva, kpb, kvb, eps, ki, isat

cdef struct Lims:
    double tmax, taumax, fmax, tl


cdef inline void _acc(double xd, double al, double ald, double be, double bed,
                      double u1, double u2, double u3, Phys* p,
                      double* xdd, double* aldd, double* bedd) noexcept nogil:
    cdef double sa = sin(al)
    cdef double ca = cos(al)
    cdef double tau1 = u3 + u1 * cos(be)
    cdef double tau2 = u1 * p.L * sin(be - al)
    cdef double r1 = tau1 + p.mal * ald * ald * ca - p.zx * xd
    cdef double r2 = tau2 - p.mal * p.g * ca - p.za * ald
    cdef double m12 = -p.mal * sa
    cdef double det = p.mt * p.i0l - m12 * m12
    xdd[0] = (p.i0l * r1 - m12 * r2) / det
    aldd[0] = (p.mt * r2 - m12 * r1) / det
    bedd[0] = (u2 - p.zb * bed) / p.ia


cdef inline void _step(double* y, double x_a, double alpha_a, double dt,
                       Phys* p, Gains* g, double gamma, int mode, Lims* lm,
                       double* rec) noexcept nogil:
    """y = (x, xd, al, ald, be, bed, integ), advanced in place.
    rec (9 doubles): u1, u2, u3, u1u, u2u, u3u, ft, thd, bd."""
    cdef double x = y[0], xd = y[1], al = y[2], ald = y[3]
    cdef double be = y[4], bed = y[5], integ = y[6]
    cdef double err_x, u_ff, err_a, ft, z, thd, bd, un, sth, q
    cdef double u1u, u2u, u3u, u1, u2, u3
    cdef double h2, xd2, ald2, bed2, xd3, ald3, bed3, xd4, ald4, bed4
    cdef double k1x, k1a, k1b, k2x, k2a, k2b, k3x, k3a, k3b, k4x, k4a, k4b

    err_x = x_a - x
    u_ff = g.kpx * err_x - g.kvx * xd
    err_a = alpha_a - al
    ft = g.kpa * err_a - g.kva * ald + p.malg * cos(al)
    if g.ki > 0.0:
        integ = integ + err_a * dt
        if integ > g.isat:
            integ = g.isat
        elif integ < -g.isat:
            integ = -g.isat
        ft = ft + g.ki * integ
    z = gamma * atan(g.eps * ft)
    if z > _PI_2:
        thd = _PI_2
    elif z < -_PI_2:
        thd = -_PI_2
    else:
        thd = z
    bd = al + thd
    if mode == 0:
        if ft == 0.0:
            un = 1.0 / (gamma * g.eps)
        else:
            un = ft / sin(thd)
    else:
        sth = sin(be - al)
        q = ft / sth
        if q > lm.tl:
            un = lm.tl
        elif q > 0.0:
            un = q
        else:
            un = 0.0
    u1u = un / p.L
    u2u = g.kpb * (bd - be) - g.kvb * bed
    u3u = u_ff - u1u * cos(be)

    u1 = lm.tmax if u1u > lm.tmax else (u1u if u1u > 0.0 else 0.0)
    u2 = lm.taumax if u2u > lm.taumax else (-lm.taumax if u2u < -lm.taumax else u2u)
    u3 = lm.fmax if u3u > lm.fmax else (-lm.fmax if u3u < -lm.fmax else u3u)

    h2 = 0.5 * dt
    _acc(xd, al, ald, be, bed, u1, u2, u3, p, &k1x, &k1a, &k1b)
    xd2 = xd + h2 * k1x
    ald2 = ald + h2 * k1a
    bed2 = bed + h2 * k1b
    _acc(xd2, al + h2 * ald, ald2, be + h2 * bed, bed2, u1, u2, u3, p,
         &k2x, &k2a, &k2b)
    xd3 = xd + h2 * k2x
    ald3 = ald + h2 * k2a
    bed3 = bed + h2 * k2b
    _acc(xd3, al + h2 * ald2, ald3, be + h2 * bed2, bed3, u1, u2, u3, p,
         &k3x, &k3a, &k3b)
    xd4 = xd + dt * k3x
    ald4 = ald + dt * k3a
    bed4 = bed + dt * k3b
    _acc(xd4, al + dt * ald3, ald4, be + dt * bed3, bed4, u1, u2, u3, p,
         &k4x, &k4a, &k4b)

    y[0] = x + dt * (xd + 2.0 * (xd2 + xd3) + xd4) / 6.0
    y[1] = xd + dt * (k1x + 2.0 * (k2x + k3x) + k4x) / 6.0
    y[2] = al + dt * (ald + 2.0 * (ald2 + ald3) + ald4) / 6.0
    y[3] = ald + dt * (k1a + 2.0 * (k2a + k3a) + k4a) / 6.0
    y[4] = be + dt * (bed + 2.0 * (bed2 + bed3) + bed4) / 6.0
    y[5] = bed + dt * (k1b + 2.0 * (k2b + k3b) + k4b) / 6.0
    y[6] = integ

    rec[0] = u1
    rec[1] = u2
    rec[2] = u3
    rec[3] = u1u
    rec[4] = u2u
    rec[5] = u3u
    rec[6] = ft
    rec[7] = thd
    rec[8] = bd


cdef inline Phys _phys(tuple t):
    cdef Phys p
    p.mt = t[0]
    p.mal = t[1]
    p.i0l = t[2]
    p.ia = t[3]
    p.zx = t[4]
    p.za = t[5]
    p.zb = t[6]
    p.g = t[7]
    p.L = t[8]
    p.malg = t[9]
    return p

cdef inline Gains _gains(tuple t):
    cdef Gains g
    g.kpx = t[0]
    g.kvx = t[1]
    g.kpa = t[2]
    g.kva = t[3]
    g.kpb = t[4]
    g.kvb = t[5]
    g.eps = t[6]
    g.ki = t[7]
    g.isat = t[8]
    return g

cdef inline Lims _lims(tuple t):
    cdef Lims lm
    lm.tmax = t[0]
    lm.taumax = t[1]
    lm.fmax = t[2]
    lm.tl = t[3]
    return lm


cdef inline tuple _y7(double* y):
    return (y[0], y[1], y[2], y[3], y[4], y[5], y[6])


def run_segment(y, double x_a, double alpha_a, Py_ssize_t n_steps, double dt,
                phys, gains, double gamma, int mode, lims,
                out, Py_ssize_t rec_stride, Py_ssize_t rec_phase,
                bint record_final, bint stop_outside_chart):
    cdef Phys p = _phys(phys)
    cdef Gains g = _gains(gains)
    cdef Lims lm = _lims(lims)
    cdef double[7] yv
    cdef double[7] ysave
    cdef double[9] rec
    cdef double[:, ::1] ov
    cdef bint have_out = out is not None
    cdef Py_ssize_t k, j, n_rec = 0
    cdef int status = 0
    for j in range(7):
        yv[j] = y[j]
    if have_out:
        ov = out

    for k in range(n_steps):
        for j in range(7):
            ysave[j] = yv[j]
        _step(yv, x_a, alpha_a, dt, &p, &g, gamma, mode, &lm, rec)
        if (rec_phase + k) % rec_stride == 0:
            if have_out:
                for j in range(6):
                    ov[n_rec, j] = ysave[j]
                for j in range(9):
                    ov[n_rec, 6 + j] = rec[j]
            n_rec += 1
            if stop_outside_chart and (ysave[2] < 0.0 or ysave[2] > _PI):
                return (_y7(ysave), 3, n_rec)
        if not isfinite(yv[0] + yv[1] + yv[2] + yv[3] + yv[4] + yv[5]):
            return (_y7(yv), 1, n_rec)
    if record_final and (rec_phase + n_steps) % rec_stride == 0:
        for j in range(7):
            ysave[j] = yv[j]
        _step(ysave, x_a, alpha_a, 0.0, &p, &g, gamma, mode, &lm, rec)
        if have_out:
            for j in range(6):
                ov[n_rec, j] = yv[j]
            for j in range(9):
                ov[n_rec, 6 + j] = rec[j]
        n_rec += 1
        if stop_outside_chart and (yv[2] < 0.0 or yv[2] > _PI):
            status = 3
    return (_y7(yv), status, n_rec)


def check_segment(y, double x_a, double alpha_a, Py_ssize_t n_steps, double dt,
                  phys, gains, double gamma, int mode, lims,
                  double u1_hi, double u2_hi, double u3_hi,
                  double alpha_lo, double alpha_hi, bint check_alpha):
    cdef Phys p = _phys(phys)
    cdef Gains g = _gains(gains)
    cdef Lims lm = _lims(lims)
    cdef double[7] yv
    cdef double[7] ynext
    cdef double[9] rec
    cdef Py_ssize_t k, j
    cdef bint stepping
    for j in range(7):
        yv[j] = y[j]

    for k in range(n_steps + 1):
        stepping = k < n_steps
        for j in range(7):
            ynext[j] = yv[j]
        _step(ynext, x_a, alpha_a, dt if stepping else 0.0,
              &p, &g, gamma, mode, &lm, rec)
        if not isfinite(rec[3] + rec[4] + rec[5]):
            return 1
        if rec[3] < 0.0 or rec[3] > u1_hi:
            return 1
        if rec[4] > u2_hi or rec[4] < -u2_hi:
            return 1
        if rec[5] > u3_hi or rec[5] < -u3_hi:
            return 1
        if check_alpha and (yv[2] < alpha_lo or yv[2] > alpha_hi):
            return 1
        if not stepping:
            break
        for j in range(7):
            yv[j] = ynext[j]
        if not isfinite(yv[0] + yv[1] + yv[2] + yv[3] + yv[4] + yv[5]):
            return 1
    return 0


def run_plant(y6, double u1, double u2, double u3, Py_ssize_t n_steps,
              double dt, phys, out, Py_ssize_t rec_stride):
    cdef Phys p = _phys(phys)
    cdef double x, xd, al, ald, be, bed
    cdef double h2, xd2, ald2, bed2, xd3, ald3, bed3, xd4, ald4, bed4
    cdef double k1x, k1a, k1b, k2x, k2a, k2b, k3x, k3a, k3b, k4x, k4a, k4b
    cdef double[:, ::1] ov
    cdef bint have_out = out is not None
    cdef Py_ssize_t k, n_rec = 0
    x, xd, al, ald, be, bed = y6
    if have_out:
        ov = out
    h2 = 0.5 * dt

    for k in range(n_steps + 1):
        if k % rec_stride == 0:
            if have_out:
                ov[n_rec, 0] = x
                ov[n_rec, 1] = xd
                ov[n_rec, 2] = al
                ov[n_rec, 3] = ald
                ov[n_rec, 4] = be
                ov[n_rec, 5] = bed
            n_rec += 1
        if k == n_steps:
            break
        _acc(xd, al, ald, be, bed, u1, u2, u3, &p, &k1x, &k1a, &k1b)
        xd2 = xd + h2 * k1x
        ald2 = ald + h2 * k1a
        bed2 = bed + h2 * k1b
        _acc(xd2, al + h2 * ald, ald2, be + h2 * bed, bed2, u1, u2, u3, &p,
             &k2x, &k2a, &k2b)
        xd3 = xd + h2 * k2x
        ald3 = ald + h2 * k2a
        bed3 = bed + h2 * k2b
        _acc(xd3, al + h2 * ald2, ald3, be + h2 * bed2, bed3, u1, u2, u3, &p,
             &k3x, &k3a, &k3b)
        xd4 = xd + dt * k3x
        ald4 = ald + dt * k3a
        bed4 = bed + dt * k3b
        _acc(xd4, al + dt * ald3, ald4, be + dt * bed3, bed4, u1, u2, u3, &p,
             &k4x, &k4a, &k4b)
        x = x + dt * (xd + 2.0 * (xd2 + xd3) + xd4) / 6.0
        xd = xd + dt * (k1x + 2.0 * (k2x + k3x) + k4x) / 6.0
        al = al + dt * (ald + 2.0 * (ald2 + ald3) + ald4) / 6.0
        ald = ald + dt * (k1a + 2.0 * (k2a + k3a) + k4a) / 6.0
        be = be + dt * (bed + 2.0 * (bed2 + bed3) + bed4) / 6.0
        bed = bed + dt * (k1b + 2.0 * (k2b + k3b) + k4b) / 6.0
        if not isfinite(x + xd + al + ald + be + bed):
            return ((x, xd, al, ald, be, bed), 1, n_rec)
    return ((x, xd, al, ald, be, bed), 0, n_rec)
