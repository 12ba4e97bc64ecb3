"""Reproducible convergence verdicts for partial-sum sequences.

A sequence of partial sums is judged on a doubling schedule of checkpoints
ending at its last index: "convergent" when each of the last three doublings
adds at most ``rtol`` relative to the running value, "divergent" when the
last doubling adds more than ``grow`` relative (or the sums overflow), and
"inconclusive" otherwise.
"""

from __future__ import annotations

import math

import numpy as np

CONVERGENT = "convergent"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"

RTOL = 1e-6
GROW = 0.10


def doubling_schedule(n_max: int, start: int = 1) -> list[int]:
    """Checkpoints n_max, n_max//2, n_max//4, ... down to ``start``, ascending."""
    pts = []
    n = int(n_max)
    while n >= start and n >= 1:
        pts.append(n)
        n //= 2
    return pts[::-1]


def classify_checkpoints(values, rtol: float = RTOL, grow: float = GROW) -> str:
    """Verdict from partial sums already sampled at successive doublings."""
    vals = [float(v) for v in values]
    if not vals:
        return INCONCLUSIVE
    if not all(math.isfinite(v) for v in vals):
        return DIVERGENT
    if len(vals) >= 2:
        prev, last = vals[-2], vals[-1]
        if abs(last - prev) > grow * abs(prev) and abs(last) > 0:
            return DIVERGENT
    if len(vals) >= 4:
        tail = vals[-4:]
        if all(abs(b - a) <= rtol * abs(b) for a, b in zip(tail[:-1], tail[1:])):
            return CONVERGENT
    return INCONCLUSIVE


def classify_partial_sums(sums, rtol: float = RTOL, grow: float = GROW, start: int = 1):
    """Classify ``sums[n]`` (n = 0..N) on the doubling schedule ending at N.

    Returns ``(verdict, checkpoints, values)``.
    """
    sums = np.asarray(sums, dtype=float)
    n_max = len(sums) - 1
    pts = doubling_schedule(n_max, start=start)
    vals = [sums[p] for p in pts]
    return classify_checkpoints(vals, rtol, grow), pts, vals
