"""Compiled event loop for sweep points.

This is a straight transcription of the per-event pipeline in
:mod:`hbtsim.experiment` (emission, delivery, adaptive update, threshold,
delay, coincidence) operating on pre-drawn random arrays.  The two paths
must stay operation-for-operation identical; the test suite runs both on
the same streams and requires identical counts.

``nogil=True`` lets sweep points run on a thread pool; each call owns its
arrays and detector state exclusively.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def run_point_events(
    n_tot,            # pairs to emit
    n_f,              # emissions per phase block
    tof,              # (2, 2) flight times [source, detector]
    f_s0,             # (n_tot,) frequency of the source-0 messenger
    f_s1,             # (n_tot,) frequency of the source-1 messenger
    phases,           # (n_blocks, 2) phase offsets per block
    targets,          # (n_tot, 2) routed detector per messenger
    gamma,            # detector memory parameter
    regs_init,        # (2, k, 2) initial registers per detector
    thresholds,       # (2, cap) pre-drawn threshold uniforms per detector
    delay_enabled,    # draw click timestamps
    t_max,            # delay scale
    h,                # delay exponent
    delay_draws,      # (2, cap) pre-drawn uniforms mapped to (0, 1]
    windowed,         # coincidence compares click timestamps
    window,           # timestamp window
    broadcast,        # messages reach both detectors' registers
):
    """Run one sweep point; returns (count0, count1, coincidences)."""
    k = regs_init.shape[1]
    weights = np.zeros((2, k))
    weights[0, 0] = 1.0
    weights[1, 0] = 1.0
    regs = regs_init.copy()
    used_r = np.zeros(2, np.int64)
    used_d = np.zeros(2, np.int64)
    counts = np.zeros(2, np.int64)
    n_coincidence = 0

    for i in range(n_tot):
        block = i // n_f
        clicks0 = 0
        clicks1 = 0
        # at most two clicks per detector per event
        t0a = 0.0
        t0b = 0.0
        t1a = 0.0
        t1b = 0.0
        for m in range(2):
            target = targets[i, m]
            f = f_s0[i] if m == 0 else f_s1[i]
            delta = phases[block, m]
            if broadcast:
                other = 1 - target
                t_other = tof[m, other]
                psi = TWO_PI * ((f * t_other) % 1.0) + delta
                regs[other, m, 0] = math.cos(psi)
                regs[other, m, 1] = math.sin(psi)
            t = tof[m, target]
            psi = TWO_PI * ((f * t) % 1.0) + delta
            # input stage
            for j in range(k):
                weights[target, j] *= gamma
            weights[target, m] += 1.0 - gamma
            regs[target, m, 0] = math.cos(psi)
            regs[target, m, 1] = math.sin(psi)
            # transformation stage
            tx = 0.0
            ty = 0.0
            for j in range(k):
                tx += weights[target, j] * regs[target, j, 0]
                ty += weights[target, j] * regs[target, j, 1]
            magnitude_sq = tx * tx + ty * ty
            # output stage
            r = thresholds[target, used_r[target]]
            used_r[target] += 1
            if magnitude_sq > r:
                counts[target] += 1
                ts = t
                if delay_enabled:
                    rd = delay_draws[target, used_d[target]]
                    used_d[target] += 1
                    ts = t - t_max * (1.0 - magnitude_sq) ** h * math.log(rd)
                if target == 0:
                    if clicks0 == 0:
                        t0a = ts
                    else:
                        t0b = ts
                    clicks0 += 1
                else:
                    if clicks1 == 0:
                        t1a = ts
                    else:
                        t1b = ts
                    clicks1 += 1
        if clicks0 > 0 and clicks1 > 0:
            if not windowed:
                n_coincidence += 1
            else:
                hit = abs(t0a - t1a) <= window
                if not hit and clicks1 > 1:
                    hit = abs(t0a - t1b) <= window
                if not hit and clicks0 > 1:
                    hit = abs(t0b - t1a) <= window
                if not hit and clicks0 > 1 and clicks1 > 1:
                    hit = abs(t0b - t1b) <= window
                if hit:
                    n_coincidence += 1
    return counts[0], counts[1], n_coincidence
