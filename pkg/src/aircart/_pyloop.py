"""Pure-Python closed-loop rollout kernel (fallback backend).

Mirrors ``_fastloop.pyx`` operation-for-operation: both evaluate the cascade
controller once per step (zero-order hold) and advance the plant with one
classical RK4 step, using the same expression ordering, so the two backends
produce bit-identical trajectories on the same libm. Where C libm returns
NaN for trig of non-finite arguments, Python's math module raises; those
exceptions are translated into the blow-up status after the current row has
been handled, matching the compiled kernel's observable behavior.

Packed argument layout (shared ABI, see ``_core``):

    phys  = (mt, mal, i0l, ia, zx, za, zb, g, L, malg)
    gains = (kpx, kvx, kpa, kva, kpb, kvb, eps, ki, isat)
    lims  = (tmax, taumax, fmax, tl)          # tl = tmax * L
    y     = (x, xd, al, ald, be, bed, integ)  # integ: clamped error integral

Status codes: 0 completed, 1 non-finite blow-up, 3 stopped at the model
chart boundary (alpha outside [0, pi], checked at record points only).
"""

import math

BACKEND_NAME = "python"

_PI = math.pi
_PI_2 = math.pi / 2.0


def _control(x, xd, al, ald, be, bed, integ, x_a, alpha_a, dt,
             phys, gains, gamma, mode, lims):
    """Cascade controller evaluation. Returns
    (integ, u1, u2, u3, u1u, u2u, u3u, ft, thd, bd)."""
    mt, mal, i0l, ia, zx, za, zb, g, L, malg = phys
    kpx, kvx, kpa, kva, kpb, kvb, eps, ki, isat = gains
    tmax, taumax, fmax, tl = lims

    err_x = x_a - x
    u_ff = kpx * err_x - kvx * xd
    err_a = alpha_a - al
    ft = kpa * err_a - kva * ald + malg * math.cos(al)
    if ki > 0.0:
        integ = integ + err_a * dt
        if integ > isat:
            integ = isat
        elif integ < -isat:
            integ = -isat
        ft = ft + ki * integ
    z = gamma * math.atan(eps * ft)
    if z > _PI_2:
        thd = _PI_2
    elif z < -_PI_2:
        thd = -_PI_2
    else:
        thd = z
    bd = al + thd
    if mode == 0:
        if ft == 0.0:
            un = 1.0 / (gamma * eps)
        else:
            un = ft / math.sin(thd)
    else:
        sth = math.sin(be - al)
        if sth != 0.0:
            q = ft / sth
        elif ft == 0.0:
            q = math.nan
        else:
            q = math.copysign(math.inf, ft) * math.copysign(1.0, sth)
        if q > tl:
            un = tl
        elif q > 0.0:
            un = q
        else:
            un = 0.0
    u1u = un / L
    u2u = kpb * (bd - be) - kvb * bed
    u3u = u_ff - u1u * math.cos(be)

    u1 = tmax if u1u > tmax else (u1u if u1u > 0.0 else 0.0)
    u2 = taumax if u2u > taumax else (-taumax if u2u < -taumax else u2u)
    u3 = fmax if u3u > fmax else (-fmax if u3u < -fmax else u3u)
    return integ, u1, u2, u3, u1u, u2u, u3u, ft, thd, bd


def _rk4(x, xd, al, ald, be, bed, u1, u2, u3, dt, phys):
    """One RK4 step with held inputs. May raise ValueError/OverflowError
    when intermediate stages go non-finite (C libm would yield NaN)."""
    mt, mal, i0l, ia, zx, za, zb, g, L, malg = phys
    h2 = 0.5 * dt

    def acc(xd_, al_, ald_, be_, bed_):
        sa = math.sin(al_)
        ca = math.cos(al_)
        tau1 = u3 + u1 * math.cos(be_)
        tau2 = u1 * L * math.sin(be_ - al_)
        r1 = tau1 + mal * ald_ * ald_ * ca - zx * xd_
        r2 = tau2 - mal * g * ca - za * ald_
        m12 = -mal * sa
        det = mt * i0l - m12 * m12
        xdd = (i0l * r1 - m12 * r2) / det
        aldd = (mt * r2 - m12 * r1) / det
        bedd = (u2 - zb * bed_) / ia
        return xdd, aldd, bedd

    k1x, k1a, k1b = acc(xd, al, ald, be, bed)
    xd2 = xd + h2 * k1x
    ald2 = ald + h2 * k1a
    bed2 = bed + h2 * k1b
    k2x, k2a, k2b = acc(xd2, al + h2 * ald, ald2, be + h2 * bed, bed2)
    xd3 = xd + h2 * k2x
    ald3 = ald + h2 * k2a
    bed3 = bed + h2 * k2b
    k3x, k3a, k3b = acc(xd3, al + h2 * ald2, ald3, be + h2 * bed2, bed3)
    xd4 = xd + dt * k3x
    ald4 = ald + dt * k3a
    bed4 = bed + dt * k3b
    k4x, k4a, k4b = acc(xd4, al + dt * ald3, ald4, be + dt * bed3, bed4)

    return (x + dt * (xd + 2.0 * (xd2 + xd3) + xd4) / 6.0,
            xd + dt * (k1x + 2.0 * (k2x + k3x) + k4x) / 6.0,
            al + dt * (ald + 2.0 * (ald2 + ald3) + ald4) / 6.0,
            ald + dt * (k1a + 2.0 * (k2a + k3a) + k4a) / 6.0,
            be + dt * (bed + 2.0 * (bed2 + bed3) + bed4) / 6.0,
            bed + dt * (k1b + 2.0 * (k2b + k3b) + k4b) / 6.0)


def _record(out, n_rec, x, xd, al, ald, be, bed, ctl):
    row = out[n_rec]
    row[0] = x
    row[1] = xd
    row[2] = al
    row[3] = ald
    row[4] = be
    row[5] = bed
    for j in range(9):
        row[6 + j] = ctl[1 + j]


def run_segment(y, x_a, alpha_a, n_steps, dt, phys, gains, gamma, mode, lims,
                out, rec_stride, rec_phase, record_final, stop_outside_chart):
    x, xd, al, ald, be, bed, integ = y
    n_rec = 0
    for k in range(n_steps):
        ctl = _control(x, xd, al, ald, be, bed, integ, x_a, alpha_a, dt,
                       phys, gains, gamma, mode, lims)
        integ = ctl[0]
        if (rec_phase + k) % rec_stride == 0:
            if out is not None:
                _record(out, n_rec, x, xd, al, ald, be, bed, ctl)
            n_rec += 1
            if stop_outside_chart and (al < 0.0 or al > _PI):
                return (x, xd, al, ald, be, bed, integ), 3, n_rec
        try:
            x, xd, al, ald, be, bed = _rk4(x, xd, al, ald, be, bed,
                                           ctl[1], ctl[2], ctl[3], dt, phys)
        except (ValueError, OverflowError):
            return (x, xd, al, ald, be, bed, integ), 1, n_rec
        if not math.isfinite(x + xd + al + ald + be + bed):
            return (x, xd, al, ald, be, bed, integ), 1, n_rec
    if record_final and (rec_phase + n_steps) % rec_stride == 0:
        # dt=0 leaves the integral untouched; the recorded control is the one
        # that would be applied from this state
        ctl = _control(x, xd, al, ald, be, bed, integ, x_a, alpha_a, 0.0,
                       phys, gains, gamma, mode, lims)
        if out is not None:
            _record(out, n_rec, x, xd, al, ald, be, bed, ctl)
        n_rec += 1
        if stop_outside_chart and (al < 0.0 or al > _PI):
            return (x, xd, al, ald, be, bed, integ), 3, n_rec
    return (x, xd, al, ald, be, bed, integ), 0, n_rec


def check_segment(y, x_a, alpha_a, n_steps, dt, phys, gains, gamma, mode, lims,
                  u1_hi, u2_hi, u3_hi, alpha_lo, alpha_hi, check_alpha):
    """Feasibility probe: simulate holding the given reference and verify the
    raw commanded inputs (and optionally alpha) stay inside the shrunk
    bounds at every sample. Returns 0 if feasible, 1 otherwise."""
    x, xd, al, ald, be, bed, integ = y
    for k in range(n_steps + 1):
        stepping = k < n_steps
        ctl = _control(x, xd, al, ald, be, bed, integ, x_a, alpha_a,
                       dt if stepping else 0.0, phys, gains, gamma, mode, lims)
        integ = ctl[0]
        u1u, u2u, u3u = ctl[4], ctl[5], ctl[6]
        if not math.isfinite(u1u + u2u + u3u):
            return 1
        if u1u < 0.0 or u1u > u1_hi:
            return 1
        if u2u > u2_hi or u2u < -u2_hi:
            return 1
        if u3u > u3_hi or u3u < -u3_hi:
            return 1
        if check_alpha and (al < alpha_lo or al > alpha_hi):
            return 1
        if not stepping:
            break
        try:
            x, xd, al, ald, be, bed = _rk4(x, xd, al, ald, be, bed,
                                           ctl[1], ctl[2], ctl[3], dt, phys)
        except (ValueError, OverflowError):
            return 1
        if not math.isfinite(x + xd + al + ald + be + bed):
            return 1
    return 0


def run_plant(y6, u1, u2, u3, n_steps, dt, phys, out, rec_stride):
    """Open-loop rollout with fixed inputs; records bare states.

    Used by the model-structure tests (energy accounting, order checks).
    """
    x, xd, al, ald, be, bed = y6
    n_rec = 0
    for k in range(n_steps + 1):
        if k % rec_stride == 0:
            if out is not None:
                row = out[n_rec]
                row[0] = x
                row[1] = xd
                row[2] = al
                row[3] = ald
                row[4] = be
                row[5] = bed
            n_rec += 1
        if k == n_steps:
            break
        try:
            x, xd, al, ald, be, bed = _rk4(x, xd, al, ald, be, bed,
                                           u1, u2, u3, dt, phys)
        except (ValueError, OverflowError):
            return (x, xd, al, ald, be, bed), 1, n_rec
        if not math.isfinite(x + xd + al + ald + be + bed):
            return (x, xd, al, ald, be, bed), 1, n_rec
    return (x, xd, al, ald, be, bed), 0, n_rec
