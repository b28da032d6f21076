"""Least-squares fits for the scaling experiments.

Two fit shapes appear downstream: plain power laws y = C * x**b on log-log
axes, and the band-exponent law b(m) = 1 - 1/(p*m + q), which becomes a
straight line in m under the substitution u = 1/(1-b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FitError", "PowerLawFit", "ExponentLawFit", "fit_power_law", "fit_exponent_law"]


class FitError(ValueError):
    """Raised when the data admit no well-posed fit."""


@dataclass(frozen=True)
class PowerLawFit:
    """y ~ C * x**b, with the log-log coefficient of determination."""

    C: float
    b: float
    r2: float
    n: int


@dataclass(frozen=True)
class ExponentLawFit:
    """b(m) ~ 1 - 1/(p*m + q); residual is the root-mean-square misfit of
    u = 1/(1-b)."""

    p: float
    q: float
    residual: float
    n: int


def _split_pairs(points, names: str) -> tuple[np.ndarray, np.ndarray]:
    pts = list(points)
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected a sequence of {names} pairs")
    # canonical order so the fit is a function of the point set, not of
    # the presentation order of floating-point partial sums
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    arr = arr[order]
    return arr[:, 0], arr[:, 1]


def fit_power_law(points) -> PowerLawFit:
    """Ordinary least squares on (ln x, ln y) over (x, y) pairs.

    Needs at least two points, all coordinates strictly positive, and at
    least two distinct x.
    """
    x, y = _split_pairs(points, "(x, y)")
    if len(x) < 2:
        raise FitError(f"need at least 2 points, got {len(x)}")
    if not ((x > 0.0).all() and np.isfinite(x).all()):
        raise ValueError("x must be finite and strictly positive")
    if not ((y > 0.0).all() and np.isfinite(y).all()):
        raise ValueError("y must be finite and strictly positive")
    lx = np.log(x)
    ly = np.log(y)
    if np.ptp(lx) == 0.0:
        raise FitError("all x identical; exponent is indeterminate")
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    centered = ly - ly.mean()
    ss_tot = float(centered @ centered)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(C=math.exp(intercept), b=float(slope), r2=r2, n=len(x))


def fit_exponent_law(pairs) -> ExponentLawFit:
    """Fit b(m) = 1 - 1/(p*m + q) to measured band exponents.

    The substitution u = 1/(1-b) linearizes the model to u = p*m + q, which
    seeds an ordinary least-squares line in m. The seed is then refined by
    nonlinear least squares on b itself, which weights every band equally
    instead of amplifying the u-errors of exponents close to 1 (a band with
    b=0.95 has u=20, and a 0.005 error in b moves u by 2; the same error at
    b=0.67 moves u by 0.05). The reported residual is the RMS misfit in
    u-space either way.
    """
    m, b = _split_pairs(pairs, "(m, b)")
    if len(m) < 2:
        raise FitError(f"need at least 2 pairs, got {len(m)}")
    if not (np.isfinite(m).all() and np.isfinite(b).all()):
        raise ValueError("m and b must be finite")
    if ((b <= 0.0) | (b >= 1.0)).any():
        raise FitError("band exponents must lie strictly inside (0, 1)")
    u = 1.0 / (1.0 - b)
    if np.ptp(m) == 0.0:
        raise FitError("all m identical; law is indeterminate")
    A = np.column_stack([m, np.ones_like(m)])
    (p0, q0), *_ = np.linalg.lstsq(A, u, rcond=None)

    def resid_b(params):
        return (1.0 - 1.0 / (params[0] * m + params[1])) - b

    p_fit, q_fit = float(p0), float(q0)
    try:
        from scipy.optimize import least_squares

        sol = least_squares(resid_b, x0=[p_fit, q_fit], method="lm")
        if sol.success and np.all(np.abs(sol.x[0] * m + sol.x[1]) > 1e-12):
            p_fit, q_fit = float(sol.x[0]), float(sol.x[1])
    except Exception:
        pass  # seed already valid; refinement is best-effort
    u_resid = (p_fit * m + q_fit) - u
    residual = float(np.sqrt(np.mean(u_resid ** 2)))
    return ExponentLawFit(p=p_fit, q=q_fit, residual=residual, n=len(m))
