"""Compiled inner loops for the switched-regime simulators.

Everything here is numba-jitted and deliberately free of Python objects:
regime schedules arrive as plain arrays, per-regime parameters as a
(2, k) float array.  The ODE stepper is an adaptive Cash-Karp 4(5) pair;
steps are clamped so that regime jumps and sample instants are hit exactly.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Cash-Karp tableau
_A2 = 1.0 / 5.0
_A3 = (3.0 / 40.0, 9.0 / 40.0)
_A4 = (3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0)
_A5 = (-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0)
_A6 = (
    1631.0 / 55296.0,
    175.0 / 512.0,
    575.0 / 13824.0,
    44275.0 / 110592.0,
    253.0 / 4096.0,
)
_B5 = (37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0)
_B4 = (
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
)

FUN_RESIDENT_FACE = 0
FUN_PDMP_FULL = 1
FUN_INVADER_LOG = 2


@njit(cache=True)
def _monod(a, b, r):
    return a * r / (b + r)


@njit(cache=True)
def _deriv(fun_id, y, p, dy):
    if fun_id == FUN_RESIDENT_FACE:
        # y = (x, int_gu, int_gv); resident biomass x on the face Sigma = R0
        a_res, b_res, delta, r0, au, bu, av, bv = (
            p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7],
        )
        r = r0 - y[0]
        if r < 0.0:
            r = 0.0
        dy[0] = y[0] * (_monod(a_res, b_res, r) - delta)
        dy[1] = _monod(au, bu, r) - delta
        dy[2] = _monod(av, bv, r) - delta
    elif fun_id == FUN_PDMP_FULL:
        # y = (R, U, V)
        delta, r0, au, bu, av, bv = p[0], p[1], p[2], p[3], p[4], p[5]
        r = y[0] if y[0] > 0.0 else 0.0
        u = y[1] if y[1] > 0.0 else 0.0
        v = y[2] if y[2] > 0.0 else 0.0
        cu = _monod(au, bu, r)
        cv = _monod(av, bv, r)
        dy[0] = delta * (r0 - r) - u * cu - v * cv
        dy[1] = u * (cu - delta)
        dy[2] = v * (cv - delta)
    else:
        # y = (R, W_resident, log W_invader)
        delta, r0, ares, bres, ainv, binv = p[0], p[1], p[2], p[3], p[4], p[5]
        r = y[0] if y[0] > 0.0 else 0.0
        w = y[1] if y[1] > 0.0 else 0.0
        winv = np.exp(y[2])
        cres = _monod(ares, bres, r)
        cinv = _monod(ainv, binv, r)
        dy[0] = delta * (r0 - r) - w * cres - winv * cinv
        dy[1] = w * (cres - delta)
        dy[2] = cinv - delta


@njit(cache=True)
def _step(fun_id, y, h, p, K, work, ynew, yerr):
    """One Cash-Karp step of size h; K[0] holds the derivative at y."""
    n = y.shape[0]
    for i in range(n):
        work[i] = y[i] + h * _A2 * K[0, i]
    _deriv(fun_id, work, p, K[1])
    for i in range(n):
        work[i] = y[i] + h * (_A3[0] * K[0, i] + _A3[1] * K[1, i])
    _deriv(fun_id, work, p, K[2])
    for i in range(n):
        work[i] = y[i] + h * (_A4[0] * K[0, i] + _A4[1] * K[1, i] + _A4[2] * K[2, i])
    _deriv(fun_id, work, p, K[3])
    for i in range(n):
        work[i] = y[i] + h * (
            _A5[0] * K[0, i] + _A5[1] * K[1, i] + _A5[2] * K[2, i] + _A5[3] * K[3, i]
        )
    _deriv(fun_id, work, p, K[4])
    for i in range(n):
        work[i] = y[i] + h * (
            _A6[0] * K[0, i]
            + _A6[1] * K[1, i]
            + _A6[2] * K[2, i]
            + _A6[3] * K[3, i]
            + _A6[4] * K[4, i]
        )
    _deriv(fun_id, work, p, K[5])
    for i in range(n):
        y5 = y[i] + h * (
            _B5[0] * K[0, i] + _B5[2] * K[2, i] + _B5[3] * K[3, i] + _B5[5] * K[5, i]
        )
        y4 = y[i] + h * (
            _B4[0] * K[0, i]
            + _B4[2] * K[2, i]
            + _B4[3] * K[3, i]
            + _B4[4] * K[4, i]
            + _B4[5] * K[5, i]
        )
        ynew[i] = y5
        yerr[i] = y5 - y4


@njit(cache=True)
def run_switched(fun_id, y0, regimes, taus, params2, sample_times, rtol, atol):
    """Integrate a switched ODE across regime segments.

    regimes[i] in {0, 1} selects params2[regimes[i]] for segment i of
    duration taus[i].  Steps land exactly on segment ends and on
    sample_times (ascending, within [0, sum(taus)]).

    Returns (samples, y_final, ok): samples[m, n] holds the state at each
    sample instant; ok is False on a step-size collapse.
    """
    n = y0.shape[0]
    m = sample_times.shape[0]
    samples = np.empty((m, n))
    y = y0.copy()
    K = np.empty((6, n))
    work = np.empty(n)
    ynew = np.empty(n)
    yerr = np.empty(n)

    t = 0.0
    idx = 0
    total = 0.0
    for i in range(taus.shape[0]):
        total += taus[i]
    # record any samples at t = 0
    while idx < m and sample_times[idx] <= t:
        for i in range(n):
            samples[idx, i] = y[i]
        idx += 1

    h = 0.0
    for seg in range(taus.shape[0]):
        t_end = t + taus[seg]
        p = params2[regimes[seg]]
        if h <= 0.0:
            h = taus[seg] * 0.1 + 1e-12
        while t < t_end - 1e-13 * (1.0 + abs(t_end)):
            target = t_end
            if idx < m and sample_times[idx] < target:
                target = sample_times[idx]
            if h > target - t:
                h = target - t
            _deriv(fun_id, y, p, K[0])
            accepted = False
            while not accepted:
                _step(fun_id, y, h, p, K, work, ynew, yerr)
                err = 0.0
                bad = False
                for i in range(n):
                    if not np.isfinite(ynew[i]):
                        bad = True
                        break
                    sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
                    e = abs(yerr[i]) / sc
                    if e > err:
                        err = e
                if not bad and err <= 1.0:
                    t += h
                    for i in range(n):
                        y[i] = ynew[i]
                    fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                    h = h * fac
                    accepted = True
                else:
                    if bad:
                        h *= 0.2
                    else:
                        h = h * max(0.2, 0.9 * err ** -0.2)
                    if h < 1e-14 * (1.0 + abs(t)):
                        return samples, y, False
            while idx < m and sample_times[idx] <= t + 1e-12 * (1.0 + abs(t)):
                for i in range(n):
                    samples[idx, i] = y[i]
                idx += 1
        t = t_end

    while idx < m:
        for i in range(n):
            samples[idx, i] = y[i]
        idx += 1
    return samples, y, True


@njit(cache=True)
def face_resource_exact(r_init, regimes, taus, deltas, r0s):
    """Segment-start resource levels for the species-free resource flow.

    Between jumps R relaxes exponentially toward the active vessel's input,
    so the flow is evaluated in closed form; returns the R value at the start
    of each segment plus the terminal value.
    """
    nseg = taus.shape[0]
    r_starts = np.empty(nseg + 1)
    r = r_init
    for i in range(nseg):
        r_starts[i] = r
        j = regimes[i]
        r = r0s[j] + (r - r0s[j]) * np.exp(-deltas[j] * taus[i])
    r_starts[nseg] = r
    return r_starts


@njit(cache=True)
def _growth_integral(a, b, delta, rin, r, tau):
    """Closed form of int_0^tau [ f(R(t)) - delta ] dt along the exact flow."""
    p = b + rin
    q = r - rin
    e = np.exp(-delta * tau)
    g = (delta * tau + np.log((p + q * e) / (p + q))) / (p * delta)
    return a * tau - a * b * g - delta * tau


@njit(cache=True)
def face_growth_at_times(
    r_starts, regimes, taus, deltas, r0s, a_w, b_w, checkpoints
):
    """Accumulated invader growth integral, reported at checkpoint times.

    a_w/b_w are per-regime Monod parameters of the species whose growth is
    averaged.  checkpoints must be ascending within the total duration.
    """
    m = checkpoints.shape[0]
    out = np.empty(m)
    acc = 0.0
    t = 0.0
    idx = 0
    while idx < m and checkpoints[idx] <= 0.0:
        out[idx] = acc
        idx += 1
    for i in range(regimes.shape[0]):
        j = regimes[i]
        tau = taus[i]
        r = r_starts[i]
        while idx < m and checkpoints[idx] <= t + tau:
            part = checkpoints[idx] - t
            out[idx] = acc + _growth_integral(
                a_w[j], b_w[j], deltas[j], r0s[j], r, part
            )
            idx += 1
        acc += _growth_integral(a_w[j], b_w[j], deltas[j], r0s[j], r, tau)
        t += tau
    while idx < m:
        out[idx] = acc
        idx += 1
    return out
