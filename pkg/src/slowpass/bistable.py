"""Bistable cubic slow passage: equilibria, delayed switching, landing.

The cubic map drifts its control parameter through the fold at t = 2/3
where the upper stable equilibrium collides with the unstable one and
disappears. A trajectory started on the upper branch switches to the lower
branch only after the fold, with a delay that scales like eps**(2/3).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    MapKind,
    RecordPolicy,
    SlowPassageParams,
    StopRule,
    Trajectory,
    simulate,
)
from .theory import LOG2_OVER_6

__all__ = [
    "FOLD_TIME",
    "ConvergenceUnknown",
    "CubicEquilibria",
    "DelayResult",
    "cubic_equilibria",
    "unstable_threshold",
    "bistable_delay",
    "bistable_landing",
]

FOLD_TIME = 2.0 / 3.0  # control value where the upper branch vanishes


class ConvergenceUnknown(RuntimeWarning):
    """Trajectory ended at the switch itself; landing not assessable."""


def _cubic(y: float) -> float:
    return y - y * y * y / 3.0


@dataclass(frozen=True)
class CubicEquilibria:
    """Real roots of y - y**3/3 = p, labeled by stability interval.

    upper (y > 1) and lower (y < -1) are stable; unstable lies in (-1, 1).
    Absent roots are None: all three exist for |p| < 2/3, only one beyond.
    """

    p: float
    upper: float | None
    unstable: float | None
    lower: float | None

    @property
    def roots(self) -> tuple[float, ...]:
        return tuple(r for r in (self.upper, self.unstable, self.lower) if r is not None)


def _solve_piece(p: float, lo: float, hi: float) -> float:
    # brentq on one monotone piece, then a Newton polish; residual < 1e-12
    from scipy.optimize import brentq

    y = float(brentq(lambda v: _cubic(v) - p, lo, hi, xtol=1e-14, rtol=8.9e-16))
    for _ in range(2):
        d = 1.0 - y * y
        if abs(d) < 1e-8:
            break
        y -= (_cubic(y) - p) / d
    return y


def cubic_equilibria(p: float) -> CubicEquilibria:
    """All real equilibria of the cubic at control value p.

    The cubic is monotone on (-inf, -1], [-1, 1], and [1, inf) with
    critical values -2/3 and 2/3, so each piece is bracketed and solved
    independently.
    """
    if not math.isfinite(p):
        raise ValueError(f"p must be finite, got {p}")
    crit_hi = _cubic(1.0)
    crit_lo = _cubic(-1.0)
    upper = unstable = lower = None
    # p within rounding of a critical value: the adjacent pair of roots is
    # degenerate, and the double root sits at the critical point exactly.
    # Solving instead would inherit a sqrt(ulp) position error from the
    # unrepresentable 2/3.
    snap = 4.0 * 2.0 ** -52
    if abs(p - crit_hi) <= snap:
        lo = -2.0
        while _cubic(lo) < p:
            lo *= 2.0
        return CubicEquilibria(p=p, upper=1.0, unstable=1.0,
                               lower=_solve_piece(p, lo, -1.0))
    if abs(p - crit_lo) <= snap:
        hi = 2.0
        while _cubic(hi) > p:
            hi *= 2.0
        return CubicEquilibria(p=p, upper=_solve_piece(p, 1.0, hi),
                               unstable=-1.0, lower=-1.0)
    if p <= crit_hi:
        hi = 2.0
        while _cubic(hi) > p:
            hi *= 2.0
        upper = _solve_piece(p, 1.0, hi)
    if crit_lo <= p <= crit_hi:
        unstable = _solve_piece(p, -1.0, 1.0)
    if p >= crit_lo:
        lo = -2.0
        while _cubic(lo) < p:
            lo *= 2.0
        lower = _solve_piece(p, lo, -1.0)
    return CubicEquilibria(p=p, upper=upper, unstable=unstable, lower=lower)


def unstable_threshold(t: float) -> float | None:
    """Switch-detection level at control value t.

    The unstable equilibrium for |t| <= 2/3 in closed trigonometric form
    (an independent route from the bracketed solver), the fold height 1
    once the upper branch has vanished, and None below t = -2/3 where no
    lower attractor exists yet.
    """
    if t < -FOLD_TIME:
        return None
    if t >= FOLD_TIME:
        return 1.0
    a = min(1.0, max(-1.0, -1.5 * t))
    return 2.0 * math.cos(math.acos(a) / 3.0 - 2.0 * math.pi / 3.0)


def _threshold_array(t: np.ndarray) -> np.ndarray:
    out = np.full_like(t, np.nan)
    mid = (t >= -FOLD_TIME) & (t < FOLD_TIME)
    a = np.clip(-1.5 * t[mid], -1.0, 1.0)
    out[mid] = 2.0 * np.cos(np.arccos(a) / 3.0 - 2.0 * np.pi / 3.0)
    out[t >= FOLD_TIME] = 1.0
    return out


@dataclass(frozen=True)
class DelayResult:
    """Switching summary of one bistable run.

    delta_T is measured against the fold value 2/3 exactly; both t_switch
    and delta_T are None when the trajectory never switched within its cap.
    """

    epsilon: float
    dt: float
    switched: bool
    m_switch: int | None
    t_switch: float | None
    delta_T: float | None


def _first_switch_index(traj: Trajectory) -> int | None:
    below = traj.x < _threshold_array(traj.t)
    hits = np.nonzero(below)[0]
    return int(hits[0]) if len(hits) else None


def bistable_delay(
    epsilon: float,
    dt: float,
    t0: float = -1.0,
    *,
    step_cap: int = 10_000_000,
    t_max: float | None = None,
) -> DelayResult:
    """Run the cubic sweep from the upper branch and time the switch.

    The trajectory starts at the upper equilibrium plus epsilon (the offset
    is epsilon itself here, with no separate scale knob) and is declared
    switched at the first sample below the unstable equilibrium, or below
    the fold height 1 once t has passed 2/3.
    """
    params = SlowPassageParams(epsilon=epsilon, dt=dt, t0=t0, alpha=1.0)
    if params.ratio > LOG2_OVER_6 * (1.0 + 1e-12):
        warnings.warn(
            f"step ratio {params.ratio:.6g} above the branch-tracking regime "
            f"({LOG2_OVER_6:.6g}); delay results are exploratory",
            RuntimeWarning,
            stacklevel=2,
        )
    if t_max is None:
        t_max = FOLD_TIME + max(0.5, 10.0 * epsilon ** (2.0 / 3.0))
    needed = int(math.ceil((t_max - t0) / dt)) + 2
    stop = StopRule(step_cap=min(step_cap, needed), t_max=t_max)
    traj = simulate(
        params,
        kind=MapKind.CUBIC,
        stop=stop,
        record=RecordPolicy(max_points=max(needed + 2, 4)),
    )
    idx = _first_switch_index(traj)
    if idx is None:
        return DelayResult(
            epsilon=epsilon, dt=dt, switched=False, m_switch=None,
            t_switch=None, delta_T=None,
        )
    m_switch = int(traj.m[idx])
    t_switch = float(params.t0 + m_switch * params.dt)
    return DelayResult(
        epsilon=epsilon,
        dt=dt,
        switched=True,
        m_switch=m_switch,
        t_switch=t_switch,
        delta_T=t_switch - FOLD_TIME,
    )


def bistable_landing(traj: Trajectory) -> float:
    """Terminal state of a switched cubic trajectory.

    After the switch the orbit falls to the lower equilibrium; the caller
    can compare against cubic_equilibria(final t).lower, which it should
    approach within a corner-scale band of width ~10*eps**(1/3). A
    trajectory that never switched is a usage error; one that stopped on
    the very sample that switched is returned as-is with a
    ConvergenceUnknown warning, since no post-switch motion was recorded.
    """
    if traj.kind != MapKind.CUBIC:
        raise ValueError("landing applies to cubic trajectories")
    idx = _first_switch_index(traj)
    if idx is None:
        raise ValueError("trajectory never switched; no landing to report")
    if idx == len(traj.x) - 1:
        warnings.warn(
            "trajectory ends exactly at the switch; landing unassessed",
            ConvergenceUnknown,
            stacklevel=2,
        )
    return float(traj.x[-1])
