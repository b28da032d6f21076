"""Forward-Euler maps for slow passage through a saddle-node fold.

The central object is the one-dimensional explicit Euler discretization of

    eps * dx/dt = -(x**2 + t)        (quadratic, fold at t = 0)
    eps * dy/dt = y - y**3/3 - t     (cubic, bistable with folds at |t| = 2/3)

with the slow time advancing on the fixed grid t_m = t0 + m*dt. Per step,

    x_{m+1} = -(dt/eps) * x_m**2 + x_m - (dt/eps) * t_m

so the only parameter entering the update is the ratio dt/eps alongside the
grid itself. Simulations run in float64 and recompute t_m from the integer
step index, never by accumulating t += dt.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "MapKind",
    "StopReason",
    "SlowPassageParams",
    "StopRule",
    "RecordPolicy",
    "Trajectory",
    "CornerCoordinates",
    "step_quadratic",
    "step_cubic",
    "time_of",
    "stable_branch",
    "unstable_branch",
    "cubic_upper_root",
    "to_corner",
    "simulate",
]


class MapKind(str, enum.Enum):
    """Which right-hand side drives the Euler map."""

    QUADRATIC = "quadratic"
    CUBIC = "cubic"


class StopReason(str, enum.Enum):
    """Why a simulation ended.

    STEP_CAP: the configured step budget ran out.
    BELOW_FLOOR: the state fell below the divergence floor or left float64.
    PREDICATE: a user-configured cutoff (currently the t_max rule) fired.
    """

    STEP_CAP = "step_cap"
    BELOW_FLOOR = "below_floor"
    PREDICATE = "predicate"


_STOP_FROM_CODE = {
    _kernels.STOP_STEP_CAP: StopReason.STEP_CAP,
    _kernels.STOP_BELOW_FLOOR: StopReason.BELOW_FLOOR,
    _kernels.STOP_PREDICATE: StopReason.PREDICATE,
}


@dataclass(frozen=True)
class SlowPassageParams:
    """Problem parameters for one slow passage.

    Parameters
    ----------
    epsilon : float
        Timescale separation, > 0.
    dt : float
        Slow-time step of the Euler grid, > 0.
    t0 : float
        Initial slow time, < 0 (the ramp starts left of the fold).
    alpha : float
        Offset coefficient of the initial condition above the attracting
        branch: x(0) = sqrt(-t0) + alpha * epsilon.
    """

    epsilon: float
    dt: float
    t0: float = -1.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"epsilon must be finite and > 0, got {self.epsilon}")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")
        if not (math.isfinite(self.t0) and self.t0 < 0.0):
            raise ValueError(f"t0 must be finite and < 0, got {self.t0}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha}")

    @property
    def ratio(self) -> float:
        """dt / epsilon, the effective gain of the Euler map."""
        return self.dt / self.epsilon

    def initial_state(self, kind: MapKind = MapKind.QUADRATIC) -> float:
        """Starting value alpha*epsilon above the attracting branch at t0."""
        if kind == MapKind.QUADRATIC:
            return math.sqrt(-self.t0) + self.alpha * self.epsilon
        return cubic_upper_root(self.t0) + self.alpha * self.epsilon


@dataclass(frozen=True)
class StopRule:
    """When to end a simulation.

    step_cap bounds the number of Euler steps. x_floor is the divergence
    floor; any non-finite state also trips it. t_max, when set, stops the
    run at the first grid time >= t_max.
    """

    step_cap: int = 10_000_000
    x_floor: float = -1.0e6
    t_max: float | None = None

    def __post_init__(self) -> None:
        if self.step_cap < 0:
            raise ValueError("step_cap must be >= 0")
        if not math.isfinite(self.x_floor):
            raise ValueError("x_floor must be finite")
        if self.t_max is not None and not math.isfinite(self.t_max):
            raise ValueError("t_max must be finite when set")


@dataclass(frozen=True)
class RecordPolicy:
    """Storage policy: at most max_points uniformly strided samples.

    The stride starts at 1 and doubles (dropping every other stored sample)
    whenever the buffer would overflow, so long runs keep a uniform coarse
    grid instead of failing. The final state is always appended.
    """

    max_points: int = 1_000_000

    def __post_init__(self) -> None:
        if self.max_points < 2:
            raise ValueError("max_points must be >= 2")


@dataclass
class Trajectory:
    """Sampled orbit of one simulation.

    m holds integer step indices (uniformly strided, plus the final step),
    x the states. Slow times are recomputed on demand from the step grid.
    """

    kind: MapKind
    params: SlowPassageParams
    m: np.ndarray
    x: np.ndarray
    stride: int
    stop_reason: StopReason

    @property
    def t(self) -> np.ndarray:
        return self.params.t0 + self.m * self.params.dt

    def __len__(self) -> int:
        return len(self.m)

    @property
    def final_m(self) -> int:
        return int(self.m[-1])

    @property
    def final_t(self) -> float:
        return self.params.t0 + self.final_m * self.params.dt

    @property
    def final_x(self) -> float:
        return float(self.x[-1])


def _check_step_args(x: float, t: float, ratio: float) -> None:
    if not (math.isfinite(x) and math.isfinite(t)):
        raise ValueError(f"state and time must be finite, got x={x}, t={t}")
    if not (math.isfinite(ratio) and ratio > 0.0):
        raise ValueError(f"ratio must be finite and > 0, got {ratio}")


def step_quadratic(x: float, t: float, ratio: float) -> float:
    """One Euler step of the fold map at slow time t."""
    _check_step_args(x, t, ratio)
    return -ratio * (x * x) + x - ratio * t


def step_cubic(x: float, t: float, ratio: float) -> float:
    """One Euler step of the bistable cubic map at slow time t."""
    _check_step_args(x, t, ratio)
    return ratio * (x - (x * x * x) / 3.0) + x - ratio * t


def time_of(m: int, params: SlowPassageParams) -> float:
    """Slow time of step m on the fixed grid."""
    if m < 0:
        raise ValueError(f"step index must be >= 0, got {m}")
    return params.t0 + m * params.dt


def stable_branch(t):
    """Stable equilibrium sqrt(max(-t, 0)) of the quadratic flow.

    Clamped to zero past the fold, where the frozen system has no
    equilibria. Accepts scalars or arrays.
    """
    t = np.asarray(t, dtype=float)
    out = np.sqrt(np.maximum(-t, 0.0))
    return out if out.ndim else float(out)


def unstable_branch(t):
    """Unstable equilibrium -sqrt(max(-t, 0)); clamped to zero past the fold."""
    t = np.asarray(t, dtype=float)
    out = -np.sqrt(np.maximum(-t, 0.0))
    return out if out.ndim else float(out)


def cubic_upper_root(t: float) -> float:
    # Largest real root of y - y**3/3 = t, by Newton from above the fold.
    # For t < -2/3 it is the only root; used for cubic initial conditions.
    y = max(2.0, abs(3.0 * t) ** (1.0 / 3.0) + 1.0)
    for _ in range(80):
        f = y - y * y * y / 3.0 - t
        df = 1.0 - y * y
        step = f / df
        y -= step
        if abs(step) <= 1e-15 * max(1.0, abs(y)):
            break
    return y


@dataclass(frozen=True)
class CornerCoordinates:
    """State, time and step rescaled to the corner layer around the fold.

    y = x * eps**(-1/3), s = t * eps**(-2/3), ds = dt * eps**(-2/3); orbits
    passing the fold are O(1) in these variables.
    """

    y: float
    s: float
    ds: float


def to_corner(x: float, t: float, dt: float, epsilon: float) -> CornerCoordinates:
    """Rescale (x, t, dt) into corner variables; epsilon must be positive."""
    if not (epsilon > 0.0):
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    third = epsilon ** (1.0 / 3.0)
    two_thirds = third * third
    return CornerCoordinates(y=x / third, s=t / two_thirds, ds=dt / two_thirds)


def simulate(
    params: SlowPassageParams,
    *,
    kind: MapKind = MapKind.QUADRATIC,
    stop: StopRule | None = None,
    record: RecordPolicy | None = None,
    x0: float | None = None,
) -> Trajectory:
    """Run the Euler map and return the sampled orbit.

    Parameters
    ----------
    params : SlowPassageParams
        Problem parameters; the initial state defaults to
        params.initial_state(kind) unless x0 overrides it.
    kind : MapKind
        Quadratic fold map or cubic bistable map.
    stop : StopRule
        Step cap, divergence floor and optional t cutoff.
    record : RecordPolicy
        Maximum number of stored samples.

    Returns
    -------
    Trajectory
        Strided samples including step 0 and the final state, with the
        reason the run ended.
    """
    stop = stop or StopRule()
    record = record or RecordPolicy()
    start = params.initial_state(kind) if x0 is None else float(x0)

    m_buf = np.empty(record.max_points + 1, dtype=np.int64)
    x_buf = np.empty(record.max_points + 1, dtype=np.float64)
    t_max = math.nan if stop.t_max is None else stop.t_max
    kind_code = _kernels.KIND_QUADRATIC if kind == MapKind.QUADRATIC else _kernels.KIND_CUBIC

    count, stride, final_m, final_x, code = _kernels.iterate_map(
        kind_code, params.epsilon, params.dt, params.t0, start,
        stop.step_cap, stop.x_floor, t_max, m_buf, x_buf, record.max_points,
    )
    if count == 0 or m_buf[count - 1] != final_m:
        m_buf[count] = final_m
        x_buf[count] = final_x
        count += 1
    return Trajectory(
        kind=kind,
        params=params,
        m=m_buf[:count].copy(),
        x=x_buf[:count].copy(),
        stride=int(stride),
        stop_reason=_STOP_FROM_CODE[int(code)],
    )
