"""Compiled inner loops for the two-sensor vehicle.

Every public integration path (single trajectory, recorded trajectory,
batched lanes) goes through the same inlined step functions below, so a
given (state, design, weights, config) produces bit-identical numbers no
matter which entry point ran it.  No fastmath: the x-axis mirror symmetry
of the model must survive floating point exactly.
"""
import math

import numpy as np
from numba import njit

OK = 0
DIVERGED = 1


@njit(cache=True, inline="always", error_model="numpy")
def sense(x, y, a, l1x, l1y, l2x, l2y, floor):
    c = math.cos(a)
    s = math.sin(a)
    p1x = x + (c * l1x - s * l1y)
    p1y = y + (s * l1x + c * l1y)
    p2x = x + (c * l2x - s * l2y)
    p2y = y + (s * l2x + c * l2y)
    d1 = math.sqrt(p1x * p1x + p1y * p1y)
    d2 = math.sqrt(p2x * p2x + p2y * p2y)
    if d1 < floor:
        d1 = floor
    if d2 < floor:
        d2 = floor
    return c, s, 1.0 / (d1 * d1), 1.0 / (d2 * d2)


@njit(cache=True, inline="always", error_model="numpy")
def motor(w1, s1, w2, s2, vmax, wmax):
    """Linear and angular speed; caps are only applied when finite."""
    a1 = w1 * s1
    a2 = w2 * s2
    v = 0.5 * (a1 + a2)
    om = a1 - a2
    if v > vmax:
        v = vmax
    elif v < -vmax:
        v = -vmax
    if om > wmax:
        om = wmax
    elif om < -wmax:
        om = -wmax
    return v, om


@njit(cache=True, inline="always", error_model="numpy")
def rates(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor):
    c, s, s1, s2 = sense(x, y, a, l1x, l1y, l2x, l2y, floor)
    a1 = w1 * s1
    a2 = w2 * s2
    v = 0.5 * (a1 + a2)
    return v * c, v * s, a1 - a2


@njit(cache=True, inline="always", error_model="numpy")
def rk4_step(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor, dt):
    h = 0.5 * dt
    k1x, k1y, k1a = rates(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor)
    k2x, k2y, k2a = rates(x + h * k1x, y + h * k1y, a + h * k1a,
                          l1x, l1y, l2x, l2y, w1, w2, floor)
    k3x, k3y, k3a = rates(x + h * k2x, y + h * k2y, a + h * k2a,
                          l1x, l1y, l2x, l2y, w1, w2, floor)
    k4x, k4y, k4a = rates(x + dt * k3x, y + dt * k3y, a + dt * k3a,
                          l1x, l1y, l2x, l2y, w1, w2, floor)
    d6 = dt / 6.0
    x = x + d6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y = y + d6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    a = a + d6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    return x, y, a


@njit(cache=True, inline="always", error_model="numpy")
def euler_sat_step(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor, dt, vmax, wmax):
    c, s, s1, s2 = sense(x, y, a, l1x, l1y, l2x, l2y, floor)
    v, om = motor(w1, s1, w2, s2, vmax, wmax)
    return x + dt * (v * c), y + dt * (v * s), a + dt * om


@njit(cache=True, inline="always", error_model="numpy")
def step(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor, dt, saturated, vmax, wmax):
    if saturated:
        return euler_sat_step(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor, dt,
                              vmax, wmax)
    return rk4_step(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor, dt)


@njit(cache=True, error_model="numpy")
def run_lanes(x0, y0, a0, l1x, l1y, l2x, l2y, w1, w2, dt, steps, radius, floor,
              early, saturated, vmax, wmax):
    """Integrate many independent trajectories of one design in lockstep.

    Lanes differ in initial state and weights.  A lane leaves the active
    set when it diverges or, with ``early``, once it has come within
    ``radius`` of the origin.  Returns final x, y, alpha, min distance,
    steps taken and a status code per lane.
    """
    n = x0.shape[0]
    x = x0.copy()
    y = y0.copy()
    a = a0.copy()
    md = np.empty(n)
    taken = np.full(n, steps, dtype=np.int64)
    status = np.zeros(n, dtype=np.int8)
    active = np.empty(n, dtype=np.int64)
    na = 0
    for i in range(n):
        md[i] = math.sqrt(x[i] * x[i] + y[i] * y[i])
        if early and md[i] <= radius:
            taken[i] = 0
        else:
            active[na] = i
            na += 1

    for k in range(steps):
        if na == 0:
            break
        j = 0
        for ii in range(na):
            i = active[ii]
            xi, yi, ai = step(x[i], y[i], a[i], l1x, l1y, l2x, l2y, w1[i], w2[i],
                              floor, dt, saturated, vmax, wmax)
            x[i] = xi
            y[i] = yi
            a[i] = ai
            if not (math.isfinite(xi) and math.isfinite(yi) and math.isfinite(ai)):
                status[i] = DIVERGED
                taken[i] = k + 1
                continue
            d = math.sqrt(xi * xi + yi * yi)
            if d < md[i]:
                md[i] = d
            if early and md[i] <= radius:
                taken[i] = k + 1
                continue
            active[j] = i
            j += 1
        na = j
    return x, y, a, md, taken, status


@njit(cache=True, error_model="numpy")
def run_recorded(x, y, a, t0, l1x, l1y, l2x, l2y, w1, w2, dt, steps, radius,
                 floor, early, saturated, vmax, wmax, every):
    """Single trajectory with samples (t, x, y, alpha, s1, s2, v).

    Rows are taken at step 0, every ``every``-th step and at the last
    step taken.
    """
    inf = math.inf
    cap_v = vmax if saturated else inf
    cap_w = wmax if saturated else inf
    rows = np.empty((steps // every + 2, 7))
    nrow = 0

    c, s, s1, s2 = sense(x, y, a, l1x, l1y, l2x, l2y, floor)
    v, om = motor(w1, s1, w2, s2, cap_v, cap_w)
    rows[0, 0] = t0
    rows[0, 1] = x
    rows[0, 2] = y
    rows[0, 3] = a
    rows[0, 4] = s1
    rows[0, 5] = s2
    rows[0, 6] = v
    nrow = 1

    md = math.sqrt(x * x + y * y)
    status = OK
    taken = 0
    if not (early and md <= radius):
        for k in range(steps):
            x, y, a = step(x, y, a, l1x, l1y, l2x, l2y, w1, w2, floor, dt,
                           saturated, vmax, wmax)
            taken = k + 1
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(a)):
                status = DIVERGED
                break
            d = math.sqrt(x * x + y * y)
            if d < md:
                md = d
            stop = early and md <= radius
            if taken % every == 0 or stop or taken == steps:
                c, s, s1, s2 = sense(x, y, a, l1x, l1y, l2x, l2y, floor)
                v, om = motor(w1, s1, w2, s2, cap_v, cap_w)
                rows[nrow, 0] = t0 + taken * dt
                rows[nrow, 1] = x
                rows[nrow, 2] = y
                rows[nrow, 3] = a
                rows[nrow, 4] = s1
                rows[nrow, 5] = s2
                rows[nrow, 6] = v
                nrow += 1
            if stop:
                break
    return x, y, a, md, taken, status, rows[:nrow].copy()
