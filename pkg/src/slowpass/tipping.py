"""Tipping detection and classification for the quadratic fold map.

An orbit has tipped at the first step whose state falls below the repelling
branch, using the threshold -sqrt(max(-t, 0)): left of the fold that is the
unstable equilibrium, at and past the fold it is zero. Everything here keys
off that single definition.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import _kernels
from .dynamics import SlowPassageParams, Trajectory

__all__ = [
    "SolutionClass",
    "TippingReport",
    "TippingDetector",
    "tipping_threshold",
    "detect_tipping",
    "first_tipping",
    "classify",
    "tips_at_first_step",
    "tips_at_third_step",
    "max_dt_for_negative_tipping",
]


class SolutionClass(str, enum.Enum):
    """Qualitative escape type of a tipped orbit.

    DELAYED: crosses the threshold past the fold (t* > 0) without ever
    dipping below the attracting branch beforehand.
    DELAYED_OSCILLATORY: crosses past the fold after one or more dips below
    the attracting branch.
    EARLY: crosses left of the fold (t* < 0).
    BORDERLINE: crosses exactly at t* = 0.
    """

    DELAYED = "delayed"
    DELAYED_OSCILLATORY = "delayed_oscillatory"
    EARLY = "early"
    BORDERLINE = "borderline"


@dataclass(frozen=True)
class TippingReport:
    """Outcome of scanning one orbit for tipping.

    crossings_before counts indices before the verdict whose state sits
    strictly below the stable branch sqrt(max(-t, 0)). When found is False,
    stop says whether the scan exhausted its step cap or fell below the
    divergence floor; m_star, t_star and x_star are None.
    """

    epsilon: float
    dt: float
    t0: float
    alpha: float
    found: bool
    m_star: int | None
    t_star: float | None
    x_star: float | None
    crossings_before: int
    stop: str | None = None


def tipping_threshold(t: float) -> float:
    """Tipping boundary -sqrt(max(-t, 0)) at slow time t."""
    return -math.sqrt(max(-t, 0.0))


class TippingDetector:
    """Streaming tipping scan: feed samples in step order, read the verdict.

    Reference implementation of the same logic the compiled sweep kernel
    uses; kept independent so the two can be cross-checked.
    """

    def __init__(self) -> None:
        self.tipped = False
        self.m_star: int | None = None
        self.t_star: float | None = None
        self.x_star: float | None = None
        self.crossings = 0
        self._last_m = -1

    def observe(self, m: int, t: float, x: float) -> bool:
        """Consume one sample; returns True once tipping has been seen.

        Samples must arrive in strictly increasing index order.
        """
        if m <= self._last_m:
            raise ValueError(f"samples out of order: got m={m} after m={self._last_m}")
        self._last_m = m
        if self.tipped:
            return True
        if t < 0.0:
            root = math.sqrt(-t)
            if x < -root:
                self._record(m, t, x)
            elif x < root:
                self.crossings += 1
        elif x < 0.0:
            self._record(m, t, x)
        return self.tipped

    def _record(self, m: int, t: float, x: float) -> None:
        self.tipped = True
        self.m_star = m
        self.t_star = t
        self.x_star = x


def detect_tipping(source, params: SlowPassageParams | None = None) -> TippingReport:
    """Scan a trajectory or a raw (m, t, x) stream for the first crossing.

    A Trajectory source must have stride-1 storage: on a coarser grid the
    first crossing (and any dip counted toward the oscillatory class) could
    fall between samples. Raw streams must be in increasing index order;
    params, when given, fills in the report's parameter columns.
    """
    stop = None
    if isinstance(source, Trajectory):
        if source.stride != 1:
            raise ValueError(
                f"tipping detection needs stride-1 samples, got stride {source.stride}"
            )
        params = source.params
        p = params
        samples = ((int(m), p.t0 + int(m) * p.dt, float(x))
                   for m, x in zip(source.m, source.x))
        stop = source.stop_reason.value
    else:
        samples = source
    det = TippingDetector()
    for m, t, x in samples:
        if det.observe(m, t, x):
            break
    return TippingReport(
        epsilon=params.epsilon if params else math.nan,
        dt=params.dt if params else math.nan,
        t0=params.t0 if params else math.nan,
        alpha=params.alpha if params else math.nan,
        found=det.tipped, m_star=det.m_star, t_star=det.t_star,
        x_star=det.x_star, crossings_before=det.crossings,
        stop=None if det.tipped else (stop or "stream_end"),
    )


def first_tipping(
    params: SlowPassageParams,
    *,
    step_cap: int = 10_000_000,
    x_floor: float = -1.0e6,
) -> TippingReport:
    """Fast path: run the fused kernel until tipping or the step cap."""
    code, m, x, crossings = _kernels.first_tipping_quadratic(
        params.epsilon, params.dt, params.t0, params.alpha, step_cap, x_floor
    )
    if code == _kernels.TIP_FOUND:
        return TippingReport(
            epsilon=params.epsilon, dt=params.dt, t0=params.t0, alpha=params.alpha,
            found=True, m_star=int(m), t_star=params.t0 + int(m) * params.dt,
            x_star=float(x), crossings_before=int(crossings),
        )
    stop = "step_cap" if code == _kernels.TIP_CAP else "below_floor"
    return TippingReport(
        epsilon=params.epsilon, dt=params.dt, t0=params.t0, alpha=params.alpha,
        found=False, m_star=None, t_star=None, x_star=None,
        crossings_before=int(crossings), stop=stop,
    )


def classify(report: TippingReport) -> SolutionClass:
    """Map a positive tipping report onto its solution class."""
    if not report.found:
        raise ValueError("cannot classify: the orbit never tipped")
    if report.t_star < 0.0:
        return SolutionClass.EARLY
    if report.t_star == 0.0:
        return SolutionClass.BORDERLINE
    if report.crossings_before > 0:
        return SolutionClass.DELAYED_OSCILLATORY
    return SolutionClass.DELAYED


def tips_at_first_step(params: SlowPassageParams) -> bool:
    """True when the very first Euler step already crosses the threshold.

    Holds whenever dt > 1/alpha, independently of epsilon: the first update
    moves the state by -ratio * (x0**2 + t0) = -(dt/eps) * (2*alpha*eps*
    sqrt(-t0) + alpha**2 * eps**2), which swings past -sqrt(-t1) once dt
    exceeds 1/alpha.
    """
    return params.dt > 1.0 / params.alpha


def tips_at_third_step(params: SlowPassageParams, coeff: float, exponent: float) -> bool:
    """Hypotheses under which step families dt = coeff * eps**exponent tip at step 3.

    For small enough epsilon along such a family, tipping lands on exactly
    the third step when the exponent sits in (0, 1/2) and the initial
    offset is steep enough relative to the ramp start: alpha > 1/(-4*t0).
    The family coefficient does not enter the hypotheses beyond positivity.
    """
    if not (coeff > 0.0):
        raise ValueError(f"coeff must be > 0, got {coeff}")
    return 0.0 < exponent < 0.5 and params.alpha > 1.0 / (-4.0 * params.t0)


def max_dt_for_negative_tipping(m: int, t0: float = -1.0) -> float:
    """Largest step size compatible with tipping at step m while t < 0.

    Tipping at step m with t_m still left of the fold needs t0 + m*dt < 0,
    so dt < -t0/m. Returns that bound.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    if t0 >= 0.0:
        raise ValueError("t0 must be < 0")
    return -t0 / m
