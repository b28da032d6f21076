"""Hot loops shared by the simulation and sweep layers.

Compiled with numba when available; the pure-Python definitions are the
reference semantics and run unchanged if numba is missing. Keep the step
expressions byte-identical to the scalar helpers in dynamics.py so that
compiled and interpreted orbits agree bitwise.
"""

import math

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


# map kinds
KIND_QUADRATIC = 0
KIND_CUBIC = 1

# stop codes
STOP_STEP_CAP = 0
STOP_BELOW_FLOOR = 1
STOP_PREDICATE = 2

# tip scan codes
TIP_FOUND = 0
TIP_CAP = 1
TIP_FLOOR = 2


@njit(cache=True, nogil=True)
def iterate_map(kind, epsilon, dt, t0, x0, step_cap, x_floor, t_max,
                m_buf, x_buf, max_points):
    """Run the forward-Euler map, storing strided samples in place.

    t_max is NaN when no time cutoff applies. Buffers must hold at least
    max_points + 1 entries; the trailing slot is reserved so the caller can
    append the final state. When the buffers fill, every other sample is
    dropped and the stride doubles, so storage stays uniform in m.

    Returns (count, stride, final_m, final_x, stop_code).
    """
    ratio = dt / epsilon
    x = x0
    m = 0
    count = 0
    stride = 1
    stop = STOP_STEP_CAP
    while True:
        t = t0 + m * dt
        if m % stride == 0:
            if count == max_points:
                half = 0
                for k in range(0, count, 2):
                    m_buf[half] = m_buf[k]
                    x_buf[half] = x_buf[k]
                    half += 1
                count = half
                stride *= 2
            if m % stride == 0:
                m_buf[count] = m
                x_buf[count] = x
                count += 1
        if not math.isfinite(x) or x < x_floor:
            stop = STOP_BELOW_FLOOR
            break
        if t_max == t_max and t >= t_max:
            stop = STOP_PREDICATE
            break
        if m >= step_cap:
            stop = STOP_STEP_CAP
            break
        if kind == KIND_QUADRATIC:
            x = -ratio * (x * x) + x - ratio * t
        else:
            x = ratio * (x - (x * x * x) / 3.0) + x - ratio * t
        m += 1
    return count, stride, m, x, stop


@njit(cache=True, nogil=True)
def first_tipping_quadratic(epsilon, dt, t0, alpha, step_cap, x_floor):
    """Scan the quadratic orbit for the first sample below -sqrt(max(-t, 0)).

    Also counts the indices before that verdict whose state sits strictly
    below the stable branch sqrt(max(-t, 0)), which distinguishes
    oscillatory from clean delayed escapes.

    Returns (code, m, x, crossings): code 0 means tipped at step m, 1 means
    the step cap ran out, 2 means the state left [x_floor, inf) or became
    non-finite before any verdict.
    """
    ratio = dt / epsilon
    x = math.sqrt(-t0) + alpha * epsilon
    m = 0
    crossings = 0
    while m <= step_cap:
        t = t0 + m * dt
        if t < 0.0:
            root = math.sqrt(-t)
            if x < -root:
                return TIP_FOUND, m, x, crossings
            if x < root:
                crossings += 1
        else:
            if x < 0.0:
                return TIP_FOUND, m, x, crossings
        if not math.isfinite(x) or x < x_floor:
            return TIP_FLOOR, m, x, crossings
        x = -ratio * (x * x) + x - ratio * t
        m += 1
    return TIP_CAP, step_cap, x, crossings


def warmup():
    """Trigger JIT compilation so timing-sensitive callers pay it up front."""
    if not HAVE_NUMBA:
        return
    import numpy as np

    mb = np.empty(4, dtype=np.int64)
    xb = np.empty(4, dtype=np.float64)
    iterate_map(KIND_QUADRATIC, 1.0, 0.1, -1.0, 2.0, 2, -1e6, math.nan, mb, xb, 3)
    iterate_map(KIND_CUBIC, 1.0, 0.1, -1.0, 2.0, 2, -1e6, math.nan, mb, xb, 3)
    first_tipping_quadratic(1.0, 0.1, -1.0, 1.0, 2, -1e6)
