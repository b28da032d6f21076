"""Analytic constants and numerical verification of the delay bounds.

The quadratic slow passage admits explicit constants controlling three
regimes of the orbit: an outer window where the state tracks the stable
branch at distance of order eps/|t|, a corner layer of width eps**(2/3)
around the fold, and the escape beyond it. This module computes those
constants from the problem parameters and checks the predicted bounds
against simulated trajectories.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import MapKind, SlowPassageParams, Trajectory

__all__ = [
    "LOG2_OVER_6",
    "TheoryConstants",
    "Window",
    "EnvelopeCheck",
    "CornerReport",
    "constants",
    "outer_envelope",
    "corner_analysis",
    "integrating_factor_integral",
]

# canonical admissible step ratio for a ramp starting at t0 = -1
LOG2_OVER_6 = math.log(2.0) / 6.0


@dataclass(frozen=True)
class TheoryConstants:
    """Constants of the delay bounds for one parameter set.

    ratio_bound: largest admissible dt/epsilon for the bounds to apply.
    envelope_bound: explicit upper constant of the outer envelope.
    corner_onset: the corner layer starts at t = -corner_onset * eps**(2/3).
    fold_step: last grid step with t <= 0.
    corner_step: last grid step before the corner layer, or None when the
    ramp starts inside it.
    """

    ratio_bound: float
    envelope_bound: float
    corner_onset: float
    fold_step: int
    corner_step: int | None


class Window(str, enum.Enum):
    OUTER = "outer"
    CORNER = "corner"


@dataclass(frozen=True)
class EnvelopeCheck:
    """Realized envelope extremes over one trajectory window.

    The envelope ratio is r(m) = (x(m) - sqrt(-t_m)) * |t_m| / epsilon.
    passed requires min r > 0 (the lower constant is existential, so only
    positivity is asserted) and max r <= bound. offsets_bounded reports the
    companion sandwich 0 <= x - sqrt(-t) <= sqrt(-t) at every sample.
    """

    window: Window
    first_step: int
    last_step: int
    realized_lo: float
    realized_hi: float
    bound: float
    offsets_bounded: bool
    passed: bool


@dataclass(frozen=True)
class CornerReport:
    """Corner-layer summary of a tipped trajectory.

    All values are in corner coordinates. exit_time_scaled is the slow time
    of the last nonnegative state, s at that step; tip_time_scaled is the
    same quantity one step later, where the state has crossed zero (the
    scaling reported in fixed-ratio tipping tables). entry_height_scaled is
    the state upon entering the layer, x(corner_entry_step) * eps**(-1/3).
    y_lo and y_hi bound the scaled state over the layer, for order-one
    verification.
    """

    corner_entry_step: int
    last_nonnegative_step: int
    exit_time_scaled: float
    tip_time_scaled: float
    entry_height_scaled: float
    step_scaled: float
    y_lo: float
    y_hi: float


def constants(params: SlowPassageParams) -> TheoryConstants:
    """Compute the analytic constants for one parameter set.

    fold_step and corner_step come from closed-form floor arithmetic on the
    time grid with an exactness fixup (no iteration), so grid points landing
    exactly on a window edge are classified correctly.
    """
    root = math.sqrt(-params.t0)
    ratio_bound = min(root / 2.0, 1.0 / (3.0 * root), LOG2_OVER_6)
    envelope_bound = params.alpha * abs(params.t0) + 0.25
    corner_onset = envelope_bound ** (2.0 / 3.0)
    fold_step = _last_step_at_or_below(params, 0.0)
    corner_edge = -corner_onset * params.epsilon ** (2.0 / 3.0)
    corner_step = None
    if params.t0 <= corner_edge:
        corner_step = _last_step_at_or_below(params, corner_edge)
    return TheoryConstants(
        ratio_bound=ratio_bound,
        envelope_bound=envelope_bound,
        corner_onset=corner_onset,
        fold_step=fold_step,
        corner_step=corner_step,
    )


def _last_step_at_or_below(params: SlowPassageParams, level: float) -> int:
    # sup{m >= 0 : t0 + m*dt <= level}; floor() can be off by one at exact
    # grid hits, so nudge both ways.
    m = int(math.floor((level - params.t0) / params.dt))
    m = max(m, 0)
    while params.t0 + (m + 1) * params.dt <= level:
        m += 1
    while m > 0 and params.t0 + m * params.dt > level:
        m -= 1
    return m


def outer_envelope(traj: Trajectory, consts: TheoryConstants | None = None) -> EnvelopeCheck:
    """Check the outer-window envelope on a simulated trajectory.

    Evaluates r(m) over every stored sample with t0 <= t_m <= the corner
    edge and reports the realized extremes. The trajectory must be
    quadratic, satisfy ratio < ratio_bound, and contain samples in the
    window (stride-1 runs always do).
    """
    if traj.kind != MapKind.QUADRATIC:
        raise ValueError("envelope bounds apply to the quadratic map only")
    p = traj.params
    consts = consts or constants(p)
    if p.ratio > consts.ratio_bound * (1.0 + 1e-12):
        raise ValueError(
            f"step ratio {p.ratio:.6g} outside admissible bound {consts.ratio_bound:.6g}"
        )
    if consts.corner_step is None:
        raise ValueError("ramp starts inside the corner layer; outer window is empty")
    mask = traj.m <= consts.corner_step
    if not mask.any():
        raise ValueError("no stored samples in the outer window")
    if traj.m[-1] < consts.corner_step:
        raise ValueError(
            f"trajectory ends at step {int(traj.m[-1])}, before the corner "
            f"edge at step {consts.corner_step}; outer window not covered"
        )
    m = traj.m[mask]
    x = traj.x[mask]
    t = p.t0 + m * p.dt
    root = np.sqrt(-t)
    z = x - root
    r = z * (-t) / p.epsilon
    offsets_bounded = bool((z >= 0.0).all() and (z <= root).all())
    realized_lo = float(r.min())
    realized_hi = float(r.max())
    return EnvelopeCheck(
        window=Window.OUTER,
        first_step=int(m[0]),
        last_step=int(m[-1]),
        realized_lo=realized_lo,
        realized_hi=realized_hi,
        bound=consts.envelope_bound,
        offsets_bounded=offsets_bounded,
        passed=(realized_lo > 0.0) and (realized_hi <= consts.envelope_bound),
    )


def corner_analysis(traj: Trajectory, consts: TheoryConstants | None = None) -> CornerReport:
    """Summarize the corner layer of a tipped quadratic trajectory.

    Locates the last step whose state is still nonnegative (a state landing
    exactly on zero counts) and reports the scaled exit quantities. Needs
    stride-1 storage through that step.
    """
    if traj.kind != MapKind.QUADRATIC:
        raise ValueError("corner analysis applies to the quadratic map only")
    if traj.stride != 1:
        raise ValueError("corner analysis needs stride-1 samples")
    p = traj.params
    consts = consts or constants(p)
    if p.ratio > consts.ratio_bound * (1.0 + 1e-12):
        raise ValueError(
            f"step ratio {p.ratio:.6g} outside admissible bound {consts.ratio_bound:.6g}"
        )
    if consts.corner_step is None:
        raise ValueError("ramp starts inside the corner layer")
    m1 = consts.corner_step
    two_thirds = p.epsilon ** (2.0 / 3.0)
    third = p.epsilon ** (1.0 / 3.0)
    # corner step-size constraint; entry level comes from the actual grid
    entry_level = -(p.t0 + m1 * p.dt) / two_thirds
    ds = p.dt / two_thirds
    ds_bound = (entry_level + math.sqrt(entry_level)) / (2.0 * consts.envelope_bound)
    if not (ds < ds_bound):
        raise ValueError(
            f"corner step {ds:.6g} exceeds admissible {ds_bound:.6g}; reduce dt"
        )
    idx1 = np.searchsorted(traj.m, m1)
    if idx1 >= len(traj.m) or traj.m[idx1] != m1:
        raise ValueError("trajectory does not cover the corner entry step")
    negative = np.nonzero(traj.x < 0.0)[0]
    if len(negative) == 0:
        raise ValueError("state never crossed zero; raise the step cap")
    first_neg = int(negative[0])
    if first_neg <= idx1:
        raise ValueError("state crossed zero before the corner layer; bounds violated")
    m2 = int(traj.m[first_neg - 1])
    window = traj.x[idx1:first_neg]
    return CornerReport(
        corner_entry_step=m1,
        last_nonnegative_step=m2,
        exit_time_scaled=(p.t0 + m2 * p.dt) / two_thirds,
        tip_time_scaled=(p.t0 + (m2 + 1) * p.dt) / two_thirds,
        entry_height_scaled=float(traj.x[idx1]) / third,
        step_scaled=ds,
        y_lo=float(window.min()) / third,
        y_hi=float(window.max()) / third,
    )


def integrating_factor_integral(
    y: float,
    epsilon: float,
    y0: float,
    xi0: float,
    c: float,
    p: float,
    q: float,
    *,
    rel_tol: float = 1e-10,
    panels: int | None = None,
) -> float:
    """Evaluate the integrating-factor integral

        xi(y) = exp(c*|y|**(p+1)/eps) * [ eps*xi0*exp(-c*|y0|**(p+1)/eps)
                + integral_{y0}^{y} |u|**(q-1) * exp(-c*|u|**(p+1)/eps) du ]

    for y0 <= y <= -eps**(1/(p+1)). The exponential prefactor is folded into
    the integrand as exp(c*(|y|**(p+1) - |u|**(p+1))/eps), whose exponent is
    nonpositive on the whole domain, so no intermediate value can overflow
    even when c*|y0|**(p+1)/eps is in the hundreds.

    By default the integral uses adaptive quadrature at relative tolerance
    rel_tol; passing panels switches to composite fixed-order Gauss-Legendre
    with that many panels (doubling panels is the cheap resolution check).
    """
    if not (epsilon > 0.0):
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if not (y0 < 0.0):
        raise ValueError(f"y0 must be < 0, got {y0}")
    if not (xi0 > 0.0 and c > 0.0 and p > 0.0 and q > 0.0):
        raise ValueError("xi0, c, p, q must all be > 0")
    upper = -epsilon ** (1.0 / (p + 1.0))
    if not (y0 <= y <= upper):
        raise ValueError(f"y={y} outside window [{y0}, {upper}]")

    scale = c / epsilon
    ay = abs(y) ** (p + 1.0)

    def integrand(u):
        return np.abs(u) ** (q - 1.0) * np.exp(scale * (ay - np.abs(u) ** (p + 1.0)))

    head = epsilon * xi0 * math.exp(scale * (ay - abs(y0) ** (p + 1.0)))
    if y == y0:
        return head
    if panels is None:
        from scipy.integrate import quad

        tail, _ = quad(integrand, y0, y, epsabs=0.0, epsrel=rel_tol, limit=200)
    else:
        if panels < 1:
            raise ValueError("panels must be >= 1")
        nodes, weights = np.polynomial.legendre.leggauss(16)
        edges = np.linspace(y0, y, panels + 1)
        half = np.diff(edges) / 2.0
        mids = (edges[:-1] + edges[1:]) / 2.0
        pts = mids[:, None] + half[:, None] * nodes[None, :]
        tail = float(np.sum(half[:, None] * weights[None, :] * integrand(pts)))
    return head + tail
