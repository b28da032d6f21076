"""Parameter-plane experiments over (epsilon, dt).

Four instruments: full grid sweeps with per-cell tipping classification,
extraction of the negative-tipping regions with a fixed index m, bisection
tracing of a region's top and bottom boundary curves in dt, and the
fixed-ratio / fixed-power tipping-time scaling experiments.

Boundary tracing never assumes where a band lives. Bands with consecutive
odd indices stack downward in dt, so the tracer anchors on the lowest-index
band (whose top edge is pinned at dt = -t0/m) and walks down: the search
window for the index-m band opens just below the bottom edge of the index
m-2 band. That keeps each bisection bracket verified by actual membership
probes and avoids latching onto the detached spurious bands that live far
below the principal stack.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._kernels import TIP_FOUND, first_tipping_quadratic, warmup
from .dynamics import MapKind, SlowPassageParams, StopRule
from .theory import constants
from .tipping import SolutionClass, TippingReport, classify, first_tipping

__all__ = [
    "Spacing",
    "GridBase",
    "GridSpec",
    "CellResult",
    "RegionMap",
    "RegionSign",
    "BandSide",
    "BoundaryCurve",
    "BracketingError",
    "OutOfBudgetError",
    "ScalingPoint",
    "sweep_grid",
    "extract_region",
    "trace_boundary",
    "scaling_experiment",
    "scaling_experiment_powerlaw",
    "projected_steps",
]


class Spacing(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


class RegionSign(str, enum.Enum):
    """Tipping-sign selector for region extraction."""

    NEGATIVE_TIPPING = "negative_tipping"


class BandSide(str, enum.Enum):
    """Which boundary of a region band: TOP is the larger-dt edge."""

    TOP = "top"
    BOTTOM = "bottom"


@dataclass(frozen=True)
class GridBase:
    """Shared cell parameters of a sweep: ramp start, offset, and map kind."""

    t0: float = -1.0
    alpha: float = 1.0
    kind: MapKind = MapKind.QUADRATIC


def _validate_axis(values: tuple[float, ...], name: str) -> None:
    # an empty axis is legal and sweeps to an empty map
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d sequence")
    if not (np.isfinite(arr).all() and (arr > 0.0).all()):
        raise ValueError(f"{name} must be finite and strictly positive")
    if len(arr) > 1 and not (np.diff(arr) > 0.0).all():
        raise ValueError(f"{name} must be strictly increasing")


@dataclass(frozen=True)
class GridSpec:
    """Axis values and shared parameters for one parameter-plane sweep."""

    eps_values: tuple[float, ...]
    dt_values: tuple[float, ...]
    base: GridBase = field(default_factory=GridBase)
    spacing: Spacing = Spacing.LOG

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps_values", tuple(float(v) for v in self.eps_values))
        object.__setattr__(self, "dt_values", tuple(float(v) for v in self.dt_values))
        _validate_axis(self.eps_values, "eps_values")
        _validate_axis(self.dt_values, "dt_values")

    @classmethod
    def log(
        cls,
        eps_range: tuple[float, float] = (1e-4, 0.5),
        dt_range: tuple[float, float] = (1e-4, 0.5),
        shape: tuple[int, int] = (512, 512),
        base: GridBase | None = None,
    ) -> "GridSpec":
        """Log-spaced grid; the range lower ends are open (excluded)."""
        n_eps, n_dt = shape
        eps = np.geomspace(eps_range[0], eps_range[1], n_eps + 1)[1:]
        dt = np.geomspace(dt_range[0], dt_range[1], n_dt + 1)[1:]
        return cls(tuple(eps), tuple(dt), base or GridBase(), Spacing.LOG)

    @classmethod
    def linear(
        cls,
        eps_range: tuple[float, float],
        dt_range: tuple[float, float],
        shape: tuple[int, int],
        base: GridBase | None = None,
    ) -> "GridSpec":
        n_eps, n_dt = shape
        eps = np.linspace(eps_range[0], eps_range[1], n_eps)
        dt = np.linspace(dt_range[0], dt_range[1], n_dt)
        return cls(tuple(eps), tuple(dt), base or GridBase(), Spacing.LINEAR)


@dataclass(frozen=True)
class CellResult:
    epsilon: float
    dt: float
    report: TippingReport
    category: SolutionClass | None


@dataclass(frozen=True)
class RegionMap:
    """One CellResult per grid cell, indexable by the (epsilon, dt) pair."""

    spec: GridSpec
    cells: tuple[CellResult, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_by_key", {(c.epsilon, c.dt): c for c in self.cells}
        )

    def at(self, epsilon: float, dt: float) -> CellResult:
        return self._by_key[(epsilon, dt)]

    def __len__(self) -> int:
        return len(self.cells)


def _classify_cell(epsilon: float, dt: float, base: GridBase, stop: StopRule) -> CellResult:
    params = SlowPassageParams(epsilon=epsilon, dt=dt, t0=base.t0, alpha=base.alpha)
    report = first_tipping(params, step_cap=stop.step_cap, x_floor=stop.x_floor)
    category = classify(report) if report.found else None
    return CellResult(epsilon=epsilon, dt=dt, report=report, category=category)


def sweep_grid(
    spec: GridSpec, stop: StopRule | None = None, *, threads: int | None = None
) -> RegionMap:
    """Classify every grid cell; deterministic and evaluation-order free.

    Cells are independent tipping runs, distributed over a thread pool (the
    iteration kernel releases the GIL). Results are keyed by grid index, so
    the returned cell order never depends on completion order. A cell that
    exhausts its step cap records found=False rather than raising.
    """
    if spec.base.kind != MapKind.QUADRATIC:
        raise ValueError("grid sweeps support the quadratic map only")
    stop = stop or StopRule()
    warmup()
    jobs = [
        (i, j, eps, dt)
        for i, eps in enumerate(spec.eps_values)
        for j, dt in enumerate(spec.dt_values)
    ]
    def run_cell(job: tuple[int, int, float, float]) -> tuple[tuple[int, int], CellResult]:
        i, j, eps, dt = job
        return (i, j), _classify_cell(eps, dt, spec.base, stop)

    results: dict[tuple[int, int], CellResult] = {}
    n_workers = threads or min(32, os.cpu_count() or 1)
    if n_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for key, cell in pool.map(run_cell, jobs):
                results[key] = cell
    else:
        for key, cell in map(run_cell, jobs):
            results[key] = cell
    ordered = tuple(results[key] for key in sorted(results))
    return RegionMap(spec=spec, cells=ordered)


def extract_region(
    rmap: RegionMap, m: int, sign: RegionSign = RegionSign.NEGATIVE_TIPPING
) -> tuple[CellResult, ...]:
    """Cells that tipped at index m with negative tipping time."""
    if sign != RegionSign.NEGATIVE_TIPPING:
        raise ValueError(f"unsupported region sign {sign!r}")
    return tuple(
        c
        for c in rmap.cells
        if c.report.found and c.report.m_star == m and c.report.t_star < 0.0
    )


# ---------------------------------------------------------------------------
# boundary tracing


class BracketingError(RuntimeError):
    """No verified membership bracket could be established."""


_PROBE_STEP_CAP = 2_000_000  # bounds the cost of probes below the band stack


def _omega_member(
    m: int, epsilon: float, dt: float, t0: float, alpha: float, cap: int
) -> bool:
    code, m_star, _x, _cr = first_tipping_quadratic(
        epsilon, dt, t0, alpha, cap, -1e6
    )
    return code == TIP_FOUND and m_star == m and (t0 + m_star * dt) < 0.0


class _Band(NamedTuple):
    # each edge bracket is (inner, outer): inner is a member dt
    bottom: tuple[float, float]
    top: tuple[float, float]


@lru_cache(maxsize=4096)
def _principal_band(
    m: int,
    epsilon: float,
    t0: float,
    alpha: float,
    cap: int,
    scan_points: int,
    max_extends: int,
) -> _Band | None:
    """Locate the index-m band of the principal stack at one epsilon.

    Scans a descending log grid of dt values for the topmost run of cells
    belonging to the band. For m <= 3 the window hangs from the exact lemma
    ceiling dt = -t0/m; for larger m it hangs from the bottom edge of the
    index m-2 band (found recursively). A run touching the window bottom
    extends the window downward; a window with no member at all is rescanned
    once at four times the density before the band is declared absent.
    """
    if m in (2, 3):
        ceiling = (-t0 / m) * (1.0 + 1e-9)
        hi, lo = ceiling, ceiling / 64.0
        top_outer_fallback = ceiling
    else:
        parent = _principal_band(m - 2, epsilon, t0, alpha, cap, scan_points, max_extends)
        if parent is None:
            return None
        parent_bottom_inner = parent.bottom[0]
        hi = parent_bottom_inner * 0.9999
        lo = parent_bottom_inner / 4.0
        top_outer_fallback = parent_bottom_inner

    n = scan_points
    extends = 0
    densified = False
    while True:
        dts = np.geomspace(hi, lo, n)  # descending
        flags = [_omega_member(m, epsilon, float(dt), t0, alpha, cap) for dt in dts]
        first = next((i for i, f in enumerate(flags) if f), None)
        if first is None:
            if densified:
                return None
            densified = True
            n *= 4
            continue
        after = next((i for i in range(first + 1, len(flags)) if not flags[i]), None)
        if after is None:
            # run touches the window bottom; the band continues below
            if extends >= max_extends:
                return None
            extends += 1
            lo /= 4.0
            continue
        if first == 0:
            top = (float(dts[0]), top_outer_fallback)
        else:
            top = (float(dts[first]), float(dts[first - 1]))
        bottom = (float(dts[after - 1]), float(dts[after]))
        return _Band(bottom=bottom, top=top)


def _bisect_edge(
    m: int,
    epsilon: float,
    inner: float,
    outer: float,
    t0: float,
    alpha: float,
    cap: int,
    tol: float,
) -> float:
    """Shrink a (member, non-member) dt bracket geometrically; midpoint out."""
    while abs(outer - inner) > tol * min(inner, outer):
        mid = math.sqrt(inner * outer)
        if _omega_member(m, epsilon, mid, t0, alpha, cap):
            inner = mid
        else:
            outer = mid
    return 0.5 * (inner + outer)


def _bracket_from_hint(
    m: int,
    epsilon: float,
    side: BandSide,
    dt_bracket: tuple[float, float],
    t0: float,
    alpha: float,
    cap: int,
) -> tuple[float, float] | None:
    """Verify or refine a user-supplied dt bracket into (inner, outer)."""
    lo, hi = sorted(dt_bracket)
    if not (0.0 < lo < hi):
        raise ValueError(f"invalid dt bracket {dt_bracket}")
    for n in (5, 17):  # one 4x scan refinement before giving up
        dts = np.geomspace(hi, lo, n)
        flags = [_omega_member(m, epsilon, float(dt), t0, alpha, cap) for dt in dts]
        if side == BandSide.TOP:
            for i in range(1, n):  # topmost non-member -> member transition
                if flags[i] and not flags[i - 1]:
                    return (float(dts[i]), float(dts[i - 1]))
        else:
            for i in range(n - 1, 0, -1):  # bottommost member -> non-member
                if flags[i - 1] and not flags[i]:
                    return (float(dts[i - 1]), float(dts[i]))
    return None


@dataclass(frozen=True)
class BoundaryCurve:
    """Resolved points of one boundary, plus the eps values that failed."""

    m: int
    side: BandSide
    points: tuple[tuple[float, float], ...]  # (epsilon, dt), sorted by epsilon
    misses: tuple[float, ...] = ()


def trace_boundary(
    m: int,
    side: BandSide | str,
    eps_values,
    *,
    t0: float = -1.0,
    alpha: float = 1.0,
    dt_bracket: tuple[float, float] | None = None,
    tol: float = 1e-6,
    probe_step_cap: int = _PROBE_STEP_CAP,
    scan_points: int = 384,
    max_extends: int = 3,
) -> BoundaryCurve:
    """Trace one edge of the index-m negative-tipping band over eps_values.

    Per epsilon, a verified (member, non-member) bracket in dt is bisected
    geometrically until its relative width falls below tol; the returned
    point is the bracket midpoint. Without an explicit dt_bracket the
    bracket comes from the principal-stack band search. An epsilon whose
    bracket cannot be established is recorded in misses and omitted; if
    every epsilon misses, that is a bracketing error.
    """
    side = BandSide(side)
    if m < 2:
        raise ValueError(f"band index must be >= 2, got {m}")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    eps_sorted = sorted(float(e) for e in eps_values)
    if not eps_sorted:
        raise ValueError("eps_values must be non-empty")
    warmup()
    points: list[tuple[float, float]] = []
    misses: list[float] = []
    for eps in eps_sorted:
        if dt_bracket is not None:
            bracket = _bracket_from_hint(
                m, eps, side, dt_bracket, t0, alpha, probe_step_cap
            )
        else:
            band = _principal_band(
                m, eps, t0, alpha, probe_step_cap, scan_points, max_extends
            )
            bracket = None
            if band is not None:
                bracket = band.top if side == BandSide.TOP else band.bottom
        if bracket is None:
            misses.append(eps)
            continue
        inner, outer = bracket
        dt_edge = _bisect_edge(m, eps, inner, outer, t0, alpha, probe_step_cap, tol)
        points.append((eps, dt_edge))
    if not points:
        raise BracketingError(
            f"no membership bracket found for band m={m} ({side.value}) "
            f"at any of {len(eps_sorted)} epsilon values"
        )
    return BoundaryCurve(m=m, side=side, points=tuple(points), misses=tuple(misses))


# ---------------------------------------------------------------------------
# scaling experiments


class ScalingPoint(NamedTuple):
    epsilon: float
    t_star: float


class OutOfBudgetError(RuntimeError):
    """Every requested cell exceeds the step budget."""


def projected_steps(dt: float, t0: float = -1.0) -> float:
    """A priori step-count estimate: ramp length over step size.

    The tipping time is positive and O(eps**(2/3)) in the fixed-ratio
    regime, so (-t0)/dt is a tight lower bound and a fine budget proxy.
    """
    return -t0 / dt


def scaling_experiment(
    ratio: float,
    eps_values,
    t0: float = -1.0,
    alpha: float = 1.0,
    *,
    step_cap: int = 50_000_000,
) -> list[ScalingPoint]:
    """Tipping time per epsilon at fixed dt/epsilon ratio.

    Warns (and continues) when the ratio lies outside the proven-bounds
    regime. A cell that fails to tip within the cap is excluded from the
    result with a warning, so downstream fits see tipped cells only.
    """
    if not (ratio > 0.0 and math.isfinite(ratio)):
        raise ValueError(f"ratio must be positive and finite, got {ratio}")
    eps_list = [float(e) for e in eps_values]
    if not eps_list:
        raise ValueError("eps_values must be non-empty")
    probe = SlowPassageParams(epsilon=eps_list[0], dt=ratio * eps_list[0], t0=t0, alpha=alpha)
    bound = constants(probe).ratio_bound
    if ratio > bound * (1.0 + 1e-12):
        warnings.warn(
            f"step ratio {ratio:.6g} is outside the proven regime (< {bound:.6g}); "
            "results are exploratory",
            RuntimeWarning,
            stacklevel=2,
        )
    warmup()
    out: list[ScalingPoint] = []
    for eps in eps_list:
        params = SlowPassageParams(epsilon=eps, dt=ratio * eps, t0=t0, alpha=alpha)
        report = first_tipping(params, step_cap=step_cap)
        if not report.found:
            warnings.warn(
                f"epsilon={eps:.6g} did not tip within {step_cap} steps; excluded",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        out.append(ScalingPoint(epsilon=eps, t_star=report.t_star))
    return out


def scaling_experiment_powerlaw(
    coeff: float,
    b_exp: float,
    eps_values,
    t0: float = -1.0,
    alpha: float = 1.0,
    *,
    budget: float = 2e10,
    step_cap: int | None = None,
) -> list[ScalingPoint]:
    """Tipping time per epsilon with dt = coeff * epsilon**b_exp.

    Cells whose projected step count exceeds budget are skipped with a
    warning naming the projection; they are expensive, not wrong. If every
    cell is out of budget the call raises instead of returning silence.
    """
    if not (coeff > 0.0 and math.isfinite(coeff)):
        raise ValueError(f"coeff must be positive and finite, got {coeff}")
    if not math.isfinite(b_exp):
        raise ValueError(f"b_exp must be finite, got {b_exp}")
    eps_list = [float(e) for e in eps_values]
    if not eps_list:
        raise ValueError("eps_values must be non-empty")
    for eps in eps_list:
        dt = coeff * eps ** b_exp
        if not (dt < 0.5):
            raise ValueError(
                f"dt = {dt:.6g} at epsilon={eps:.6g} is too large for the ramp; "
                "reduce coeff or b_exp"
            )
    skipped = [
        (eps, projected_steps(coeff * eps ** b_exp, t0))
        for eps in eps_list
        if projected_steps(coeff * eps ** b_exp, t0) > budget
    ]
    if len(skipped) == len(eps_list):
        raise OutOfBudgetError(
            "every cell exceeds the step budget "
            f"({budget:.3g}): " + ", ".join(
                f"epsilon={e:.3g} needs ~{s:.3g} steps" for e, s in skipped
            )
        )
    for eps, steps in skipped:
        warnings.warn(
            f"epsilon={eps:.6g} projected at ~{steps:.3g} steps, over the "
            f"{budget:.3g} budget; skipped",
            RuntimeWarning,
            stacklevel=2,
        )
    skip_set = {e for e, _ in skipped}
    warmup()
    out: list[ScalingPoint] = []
    for eps in eps_list:
        if eps in skip_set:
            continue
        params = SlowPassageParams(epsilon=eps, dt=coeff * eps ** b_exp, t0=t0, alpha=alpha)
        cap = step_cap if step_cap is not None else int(min(budget, 2**62))
        report = first_tipping(params, step_cap=cap)
        if not report.found:
            warnings.warn(
                f"epsilon={eps:.6g} did not tip within {cap} steps; excluded",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        out.append(ScalingPoint(epsilon=eps, t_star=report.t_star))
    return out
