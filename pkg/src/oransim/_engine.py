"""Compiled inner loop: a run of xApp ticks, each with its scheduling windows.

Composes the same kernels the object-level API uses, so the per-tick steps
match ``orchestrator.run_xapp_interval`` exactly; it only avoids rebuilding
Python objects 100 times per second of simulated time.
"""

import numpy as np
from numba import njit

from .coloring import color_kernel, count_colors
from .conflict import conflict_matrix
from .radio import rx_power_w, strongest_ru, walk
from .scheduler import (pf_scores, realize_rates_kernel, schedule_window_kernel, update_state_kernel,
                        window_conflicts)


@njit(cache=True)
def jfi_kernel(x):
    n = x.shape[0]
    if n == 0:
        return 1.0
    s = 0.0
    s2 = 0.0
    for v in x:
        s += v
        s2 += v * v
    if s2 == 0.0:
        return 1.0
    return s * s / (n * s2)


@njit(cache=True)
def run_ticks(ru_xy, ru_tx, ru_exp, intercept, d0, noise_w, shadow,
              ue_xy, velocity, demand, priority,
              ema, served, satisfied, active, interval_sat,
              angles, uniforms, width, height, dt,
              prb_bw, palette, tolerance, alpha, eps,
              strategy_code, time_sharing, windows, sat_fraction,
              out_success, out_jfi, out_share, out_assigned, out_colors,
              trace_prb, trace_rate, trace_start):
    """Advance ``angles.shape[0]`` xApp ticks in place.

    Returns (conflicting co-channel pairs seen, trace rows filled, windows executed).
    """
    n = ue_xy.shape[0]
    ticks = angles.shape[0]
    target = (1.0 - tolerance) * demand
    gamma = 2.0 ** (target / prb_bw) - 1.0
    violations = 0
    traced = trace_start
    done = 0
    tick_sat = np.zeros(n, dtype=np.int64)
    for t in range(ticks):
        rx = rx_power_w(ue_xy, ru_xy, ru_tx, ru_exp, intercept, d0, shadow)
        serving = strongest_ru(rx)
        adj = conflict_matrix(rx, serving, gamma, noise_w)
        colors = color_kernel(strategy_code, adj, palette, uniforms[t])
        ref_rate = np.empty(n)
        for u in range(n):
            ref_rate[u] = prb_bw * np.log2(1.0 + rx[u, serving[u]] / noise_w)
        tick_sat[:] = 0
        prb = colors
        rates = realize_rates_kernel(prb, rx, serving, noise_w, prb_bw, palette)
        # with every UE colored, PF admits exactly the coloring in each window
        shared = time_sharing and np.any(colors < 0)
        for w in range(windows):
            if shared:
                scores = pf_scores(priority, ref_rate, ema, eps)
                prb = schedule_window_kernel(colors, adj, scores, palette)
                rates = realize_rates_kernel(prb, rx, serving, noise_w, prb_bw, palette)
            violations += window_conflicts(prb, adj)
            update_state_kernel(ema, served, satisfied, active, prb, rates, target, alpha)
            done += 1
            for u in range(n):
                if rates[u] >= target[u]:
                    tick_sat[u] += 1
                    interval_sat[u] += 1
            if traced < trace_prb.shape[0]:
                trace_prb[traced, :n] = prb
                trace_rate[traced, :n] = rates
                traced += 1
        if n == 0:
            out_success[t] = 1.0
            out_assigned[t] = 1.0
        else:
            ok = 0
            for u in range(n):
                if tick_sat[u] >= sat_fraction * windows:
                    ok += 1
            out_success[t] = ok / n
            out_assigned[t] = np.sum(colors >= 0) / n
        shares = satisfied / np.maximum(active, 1)
        out_jfi[t] = jfi_kernel(shares)
        # plain left-to-right sum, matching the object-level path bit for bit
        total = 0.0
        for v in shares:
            total += v
        out_share[t] = total / n if n > 0 else 1.0
        out_colors[t] = count_colors(colors, palette)
        walk(ue_xy, velocity, angles[t], dt, width, height)
    return violations, traced, done
