"""Command-line front end.

Every subcommand resolves its configuration from defaults, an optional
flat key = value config file, and flags (flags win), writes the resolved
values to run-manifest.txt in the output directory, and emits CSV
artifacts plus optional SVG plots. Exit codes: 0 success, 1 usage or
configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import enum
import sys
import time
from pathlib import Path

from . import __version__
from .bistable import bistable_delay
from .csvio import read_csv, read_manifest, write_csv, write_manifest
from .dynamics import (
    MapKind,
    RecordPolicy,
    SlowPassageParams,
    StopRule,
    simulate,
)
from .fitting import FitError, fit_exponent_law, fit_power_law
from .sweep import (
    BandSide,
    BracketingError,
    GridBase,
    GridSpec,
    OutOfBudgetError,
    scaling_experiment,
    scaling_experiment_powerlaw,
    sweep_grid,
    trace_boundary,
)
from .theory import LOG2_OVER_6, corner_analysis, integrating_factor_integral, outer_envelope
from .tipping import detect_tipping, classify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

TIPPING_HEADER = [
    "epsilon", "dt", "alpha", "t0", "found", "m_star", "t_star", "x_star",
    "crossings_before", "class",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the artifact contract wants 1
    def error(self, message):
        raise UsageError(message)


def _parse_number(s: str) -> float:
    txt = s.strip().replace(" ", "")
    if txt in {"ln2/6", "ln(2)/6", "log2/6", "log(2)/6"}:
        return LOG2_OVER_6
    try:
        return float(txt)
    except ValueError:
        raise UsageError(f"not a number: {s!r}") from None


def _parse_number_list(s: str) -> list[float]:
    vals = [_parse_number(part) for part in s.split(",") if part.strip()]
    if not vals:
        raise UsageError(f"empty list: {s!r}")
    return vals


def _parse_int_list(s: str) -> list[int]:
    try:
        vals = [int(part) for part in s.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"not an integer list: {s!r}") from None
    if not vals:
        raise UsageError(f"empty list: {s!r}")
    return vals


def _parse_range(s: str) -> tuple[float, float]:
    parts = s.split(":")
    if len(parts) != 2:
        raise UsageError(f"expected a:b, got {s!r}")
    lo, hi = _parse_number(parts[0]), _parse_number(parts[1])
    if not (0.0 < lo < hi):
        raise UsageError(f"need 0 < a < b in range, got {s!r}")
    return lo, hi


def _parse_grid(s: str) -> tuple[int, int]:
    parts = s.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"expected WxH, got {s!r}")
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"expected WxH integers, got {s!r}") from None
    if w < 1 or h < 1:
        raise UsageError(f"grid dimensions must be >= 1, got {s!r}")
    return w, h


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in {"true", "1", "yes"}:
        return True
    if low in {"false", "0", "no"}:
        return False
    raise UsageError(f"not a boolean: {s!r}")


def _parse_threads(s: str):
    if s.strip().lower() == "auto":
        return None
    try:
        n = int(s)
    except ValueError:
        raise UsageError(f"threads must be an integer or 'auto', got {s!r}") from None
    if n < 1:
        raise UsageError(f"threads must be >= 1, got {n}")
    return n


def _parse_sides(s: str) -> list[BandSide]:
    low = s.strip().lower()
    if low == "both":
        return [BandSide.BOTTOM, BandSide.TOP]
    out = []
    for part in low.split(","):
        part = part.strip()
        if part not in ("top", "bottom"):
            raise UsageError(f"side must be top, bottom, or both; got {part!r}")
        out.append(BandSide(part))
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    if v is None:
        return "auto"
    return str(v)


def _fmt_entry(key: str, v) -> str:
    # keep manifest values in the same shapes the flags accept
    if key in ("eps_range", "dt_range"):
        return f"{format(v[0], '.17g')}:{format(v[1], '.17g')}"
    if key == "grid":
        return f"{v[0]}x{v[1]}"
    return _fmt(v)


# per-command config-file key parsers; flags override these values
_CONFIG_PARSERS: dict[str, dict] = {
    "simulate": {
        "epsilon": _parse_number, "dt": _parse_number, "ratio": _parse_number,
        "t0": _parse_number,
        "alpha": _parse_number, "kind": str, "step_cap": int, "x_floor": _parse_number,
        "t_max": _parse_number, "max_points": int,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "sweep": {
        "eps_range": _parse_range, "dt_range": _parse_range, "grid": _parse_grid,
        "t0": _parse_number, "alpha": _parse_number, "step_cap": int,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "regions": {
        "eps_range": _parse_range, "dt_range": _parse_range, "grid": _parse_grid,
        "t0": _parse_number, "alpha": _parse_number, "step_cap": int,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "boundaries": {
        "m": _parse_int_list, "sides": _parse_sides, "eps": _parse_number_list,
        "eps_range": _parse_range, "eps_points": int, "t0": _parse_number,
        "alpha": _parse_number, "tol": _parse_number,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "scaling": {
        "ratio": _parse_number, "coeff": _parse_number, "exponent": _parse_number,
        "eps": _parse_number_list, "eps_range": _parse_range, "eps_points": int,
        "t0": _parse_number, "alpha": _parse_number, "budget": _parse_number,
        "step_cap": int,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "fit": {
        "input": str, "law": str, "label": str,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "bistable": {
        "eps": _parse_number_list, "ratio": _parse_number, "t0": _parse_number,
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
    "verify": {
        "out": str, "plot": _parse_bool, "threads": _parse_threads,
    },
}


def _resolve_config(cmd: str, args: argparse.Namespace) -> dict:
    parsers = _CONFIG_PARSERS[cmd]
    cfg: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        raw = read_manifest(config_path)
        for key, val in raw.items():
            if key == "command":
                if val != cmd:
                    raise UsageError(
                        f"config file is for command {val!r}, not {cmd!r}"
                    )
                continue
            if key not in parsers:
                raise UsageError(f"unknown config key {key!r} for {cmd}")
            if val == "":
                continue
            try:
                cfg[key] = parsers[key](val)
            except UsageError:
                raise
            except (ValueError, TypeError) as exc:
                raise UsageError(f"bad config value for {key!r}: {exc}") from None
    for key in parsers:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            cfg[key] = flag_val
    return cfg


def _write_run_manifest(out_dir: Path, cmd: str, cfg: dict, started: float) -> None:
    entries = {"command": cmd}
    for key, val in cfg.items():
        entries[key] = _fmt_entry(key, val)
    meta = {
        "tool": f"slowpass {__version__}",
        "walltime_s": f"{time.monotonic() - started:.3f}",
    }
    write_manifest(out_dir / "run-manifest.txt", entries, meta)


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg.get("out", "slowpass-out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _eps_grid(cfg: dict, default: list[float] | None = None) -> list[float]:
    if "eps" in cfg and "eps_range" in cfg:
        raise UsageError("give either eps or eps_range, not both")
    if "eps" in cfg:
        return list(cfg["eps"])
    if "eps_range" in cfg:
        import numpy as np

        n = int(cfg.setdefault("eps_points", 8))
        if n < 1:
            raise UsageError("eps_points must be >= 1")
        lo, hi = cfg["eps_range"]
        return [float(v) for v in np.geomspace(hi, lo, n)]
    if default is not None:
        return default
    raise UsageError("missing eps or eps_range")


def _tipping_row(report, category) -> list:
    return [
        report.epsilon, report.dt, report.alpha, report.t0, report.found,
        report.m_star, report.t_star, report.x_star, report.crossings_before,
        category,
    ]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(cfg: dict, out: Path) -> int:
    if "epsilon" not in cfg:
        raise UsageError("simulate needs --epsilon")
    if "dt" in cfg and "ratio" in cfg:
        raise UsageError("--dt and --ratio are mutually exclusive")
    if "dt" in cfg:
        dt = cfg["dt"]
    elif "ratio" in cfg:
        dt = cfg.pop("ratio") * cfg["epsilon"]
        cfg["dt"] = dt  # manifest carries the resolved step
    else:
        raise UsageError("simulate needs --dt or --ratio")
    kind = MapKind(cfg.setdefault("kind", "quadratic"))
    params = SlowPassageParams(
        epsilon=cfg["epsilon"], dt=dt,
        t0=cfg.setdefault("t0", -1.0), alpha=cfg.setdefault("alpha", 1.0),
    )
    stop = StopRule(
        step_cap=cfg.setdefault("step_cap", 10_000_000),
        x_floor=cfg.setdefault("x_floor", -1e6),
        t_max=cfg.get("t_max"),
    )
    record = RecordPolicy(max_points=cfg.setdefault("max_points", 1_000_000))
    traj = simulate(params, kind=kind, stop=stop, record=record)
    write_csv(
        out / "trajectory.csv", ["m", "t", "x"],
        zip(traj.m.tolist(), traj.t.tolist(), traj.x.tolist()),
    )
    report = None
    if kind == MapKind.QUADRATIC:
        report = detect_tipping(traj)
        category = classify(report) if report.found else None
        write_csv(out / "tipping.csv", TIPPING_HEADER, [_tipping_row(report, category)])
        if report.found:
            scaled = report.t_star / params.epsilon ** (2.0 / 3.0)
            print(
                f"tipped at m={report.m_star}, t={report.t_star:.8g} "
                f"(t/eps^(2/3) = {scaled:.6g}), class {category.value}"
            )
        else:
            print(f"no tipping within cap; stop reason {traj.stop_reason.value}")
    else:
        print(f"cubic run of {len(traj)} samples; stop reason {traj.stop_reason.value}")
    if cfg.get("plot", True):
        from .plots import save_figure, trajectory_figure

        save_figure(trajectory_figure(traj, report), out / "trajectory.svg")
    return EXIT_OK


def _grid_spec_from(cfg: dict) -> GridSpec:
    eps_range = cfg.setdefault("eps_range", (1e-4, 0.5))
    dt_range = cfg.setdefault("dt_range", (1e-4, 0.5))
    shape = cfg.setdefault("grid", (512, 512))
    base = GridBase(t0=cfg.setdefault("t0", -1.0), alpha=cfg.setdefault("alpha", 1.0))
    return GridSpec.log(eps_range, dt_range, shape, base)


def _cmd_sweep(cfg: dict, out: Path) -> int:
    spec = _grid_spec_from(cfg)
    stop = StopRule(step_cap=cfg.setdefault("step_cap", 10_000_000))
    rmap = sweep_grid(spec, stop, threads=cfg.get("threads"))
    write_csv(
        out / "sweep.csv", TIPPING_HEADER,
        (_tipping_row(c.report, c.category) for c in rmap.cells),
    )
    print(f"swept {len(rmap)} cells")
    return EXIT_OK


def _cmd_regions(cfg: dict, out: Path) -> int:
    spec = _grid_spec_from(cfg)
    stop = StopRule(step_cap=cfg.setdefault("step_cap", 10_000_000))
    rmap = sweep_grid(spec, stop, threads=cfg.get("threads"))
    write_csv(
        out / "regions.csv", ["epsilon", "dt", "m_star", "t_star", "class"],
        (
            [c.epsilon, c.dt, c.report.m_star, c.report.t_star, c.category]
            for c in rmap.cells
        ),
    )
    if cfg.get("plot", True):
        from .plots import region_figure, save_figure

        save_figure(region_figure(rmap), out / "regions.svg")
    print(f"mapped {len(rmap)} cells")
    return EXIT_OK


def _cmd_boundaries(cfg: dict, out: Path) -> int:
    ms = cfg.setdefault("m", [3])
    sides = cfg.setdefault("sides", [BandSide.BOTTOM, BandSide.TOP])
    eps_values = _eps_grid(cfg)
    tol = cfg.setdefault("tol", 1e-6)
    t0 = cfg.setdefault("t0", -1.0)
    alpha = cfg.setdefault("alpha", 1.0)
    curves = []
    fits = {}
    fit_rows = []
    for m in ms:
        for side in sides:
            curve = trace_boundary(
                m, side, eps_values, t0=t0, alpha=alpha, tol=tol
            )
            curves.append(curve)
            for miss in curve.misses:
                print(
                    f"note: no m={m} {side.value} bracket at epsilon={miss:.6g}",
                    file=sys.stderr,
                )
            if len(curve.points) >= 2:
                fit = fit_power_law(curve.points)
                fits[(m, side)] = fit
                fit_rows.append(
                    [f"boundary_m{m}_{side.value}", fit.C, fit.b, fit.r2, fit.n]
                )
    rows = []
    for curve in curves:
        for eps, dt in curve.points:
            rows.append([curve.m, curve.side, eps, dt])
    write_csv(out / "boundaries.csv", ["m", "side", "epsilon", "dt"], rows)
    if fit_rows:
        write_csv(
            out / "boundary_fits.csv", ["label", "C", "b", "r2", "n"], fit_rows
        )
    if cfg.get("plot", True):
        from .plots import boundary_figure, save_figure

        save_figure(boundary_figure(curves, fits), out / "boundaries.svg")
    for row in fit_rows:
        print(f"{row[0]}: dt = {row[1]:.6g} * eps^{row[2]:.6g} (r2={row[3]:.6f})")
    return EXIT_OK


def _cmd_scaling(cfg: dict, out: Path) -> int:
    has_ratio = "ratio" in cfg
    has_power = "coeff" in cfg or "exponent" in cfg
    if has_ratio and has_power:
        raise UsageError("--ratio and --coeff/--exponent are mutually exclusive")
    if not has_ratio and not has_power:
        raise UsageError("scaling needs --ratio, or --coeff with --exponent")
    eps_values = _eps_grid(cfg)
    t0 = cfg.setdefault("t0", -1.0)
    alpha = cfg.setdefault("alpha", 1.0)
    if has_ratio:
        ratio = cfg["ratio"]
        points = scaling_experiment(
            ratio, eps_values, t0, alpha,
            step_cap=cfg.setdefault("step_cap", 50_000_000),
        )

        def dt_of(e: float) -> float:
            return ratio * e
    else:
        if "coeff" not in cfg or "exponent" not in cfg:
            raise UsageError("power-law scaling needs both --coeff and --exponent")
        coeff, b_exp = cfg["coeff"], cfg["exponent"]
        kwargs = {"budget": cfg.setdefault("budget", 2e10)}
        if "step_cap" in cfg:
            kwargs["step_cap"] = cfg["step_cap"]
        points = scaling_experiment_powerlaw(
            coeff, b_exp, eps_values, t0, alpha, **kwargs
        )

        def dt_of(e: float) -> float:
            return coeff * e ** b_exp
    write_csv(
        out / "scaling.csv",
        ["epsilon", "dt", "t_star", "t_star_scaled"],
        (
            [eps, dt_of(eps), ts, ts / eps ** (2.0 / 3.0)]
            for eps, ts in points
        ),
    )
    fit = None
    if len(points) >= 2:
        fit = fit_power_law(points)
        write_csv(
            out / "scaling_fit.csv", ["label", "C", "b", "r2", "n"],
            [["scaling", fit.C, fit.b, fit.r2, fit.n]],
        )
        print(f"t_star = {fit.C:.6g} * eps^{fit.b:.6g} (r2={fit.r2:.6f})")
    for eps, ts in points:
        print(f"epsilon={eps:.6g}: t_star={ts:.8g}, scaled={ts / eps ** (2.0 / 3.0):.6g}")
    if cfg.get("plot", True):
        from .plots import save_figure, scaling_figure

        save_figure(scaling_figure(points, fit), out / "scaling.svg")
    return EXIT_OK


def _load_points(path: str) -> list[tuple[float, float]]:
    header, rows = read_csv(path)
    points = []
    candidates = [header] + rows
    for row in candidates:
        if len(row) < 2:
            continue
        try:
            points.append((float(row[0]), float(row[1])))
        except ValueError:
            continue  # header or label row
    if not points:
        raise UsageError(f"no numeric (x, y) rows in {path}")
    return points


def _cmd_fit(cfg: dict, out: Path) -> int:
    if "input" not in cfg:
        raise UsageError("fit needs --input CSV")
    law = cfg.setdefault("law", "power")
    points = _load_points(cfg["input"])
    if law == "power":
        fit = fit_power_law(points)
        label = cfg.setdefault("label", "fit")
        write_csv(
            out / "fit.csv", ["label", "C", "b", "r2", "n"],
            [[label, fit.C, fit.b, fit.r2, fit.n]],
        )
        print(f"{label}: y = {fit.C:.6g} * x^{fit.b:.6g} (r2={fit.r2:.6f}, n={fit.n})")
    elif law == "exponent":
        fit = fit_exponent_law(points)
        write_csv(
            out / "exponent_fit.csv", ["p", "q", "residual"],
            [[fit.p, fit.q, fit.residual]],
        )
        print(f"b(m) = 1 - 1/({fit.p:.6g} m + {fit.q:.6g}) (residual={fit.residual:.3g})")
    else:
        raise UsageError(f"unknown law {law!r}; expected power or exponent")
    return EXIT_OK


def _cmd_bistable(cfg: dict, out: Path) -> int:
    eps_values = cfg.setdefault("eps", [0.01, 0.01 * 2.0 ** 1.5, 0.01 * 4.0 ** 1.5])
    ratio = cfg.setdefault("ratio", LOG2_OVER_6)
    t0 = cfg.setdefault("t0", -1.0)
    results = [bistable_delay(eps, ratio * eps, t0) for eps in eps_values]
    write_csv(
        out / "delay.csv", ["epsilon", "dt", "t_switch", "delta_T"],
        ([r.epsilon, r.dt, r.t_switch, r.delta_T] for r in results),
    )
    for r in results:
        if r.switched:
            print(f"epsilon={r.epsilon:.6g}: switched at t={r.t_switch:.8g}, delay={r.delta_T:.8g}")
        else:
            print(f"epsilon={r.epsilon:.6g}: no switch within cap", file=sys.stderr)
    fit = None
    pts = [(r.epsilon, r.delta_T) for r in results if r.switched and r.delta_T > 0.0]
    if len(pts) >= 2:
        fit = fit_power_law(pts)
        write_csv(
            out / "delay_fit.csv", ["label", "C", "b", "r2", "n"],
            [["bistable_delay", fit.C, fit.b, fit.r2, fit.n]],
        )
        print(f"delta_T = {fit.C:.6g} * eps^{fit.b:.6g} (r2={fit.r2:.6f})")
    if cfg.get("plot", True):
        from .plots import delay_figure, save_figure

        save_figure(delay_figure(results, fit), out / "delay.svg")
    return EXIT_OK


def _cmd_verify(cfg: dict, out: Path) -> int:
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, passed: bool, detail: str) -> None:
        checks.append((name, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")

    # outer envelope over the canonical parameter suite
    for eps in (1e-2, 1e-3):
        for ratio in (LOG2_OVER_6 / 2.0, LOG2_OVER_6 * 0.9):
            params = SlowPassageParams(epsilon=eps, dt=ratio * eps)
            traj = simulate(
                params,
                stop=StopRule(t_max=0.0),
                record=RecordPolicy(max_points=100_000),
            )
            check = outer_envelope(traj)
            record(
                f"envelope eps={eps:g} ratio={ratio:.6g}",
                check.passed and check.offsets_bounded,
                f"r in [{check.realized_lo:.6g}, {check.realized_hi:.6g}], "
                f"bound {check.bound:g}",
            )

    # corner constant stability at the canonical ratio
    scaled = []
    for eps in (1e-2, 1e-3, 1e-4):
        params = SlowPassageParams(epsilon=eps, dt=LOG2_OVER_6 * eps)
        traj = simulate(params, record=RecordPolicy(max_points=200_000))
        corner = corner_analysis(traj)
        scaled.append(corner.tip_time_scaled)
    spread = (max(scaled) - min(scaled)) / min(scaled)
    record(
        "corner constant",
        spread < 0.05 and all(1.01 <= v <= 1.03 for v in scaled),
        f"scaled tip times {['%.5f' % v for v in scaled]}, spread {spread:.3%}",
    )

    # integrating-factor integral boundedness
    import numpy as np

    ratios = []
    for eps in (1e-2, 1e-3, 1e-4):
        ys = np.linspace(-0.9, -eps ** (2.0 / 3.0), 64)
        vals = [
            integrating_factor_integral(float(y), epsilon=eps, y0=-0.9, xi0=2.0,
                                        c=4.0, p=0.5, q=0.5)
            for y in ys
        ]
        ratios.extend(v * abs(y) / eps for v, y in zip(vals, ys))
    lo, hi = min(ratios), max(ratios)
    record(
        "integral scale",
        bool(lo > 0.0 and hi / lo < 20.0),
        f"xi*|y|/eps in [{lo:.6g}, {hi:.6g}] across eps grid",
    )

    write_csv(
        out / "verification.csv", ["check", "passed", "detail"],
        ([name, passed, detail] for name, passed, detail in checks),
    )
    return EXIT_OK if all(p for _, p, _ in checks) else EXIT_NUMERICAL


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "regions": _cmd_regions,
    "boundaries": _cmd_boundaries,
    "scaling": _cmd_scaling,
    "fit": _cmd_fit,
    "bistable": _cmd_bistable,
    "verify": _cmd_verify,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="slowpass", description="Slow-passage tipping experiments")
    parser.add_argument("--version", action="version", version=f"slowpass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--config", type=str, default=None, help="key = value config file")
        p.add_argument("--plot", dest="plot", action="store_true", default=None)
        p.add_argument("--no-plot", dest="plot", action="store_false", default=None)
        p.add_argument("--threads", type=_parse_threads, default=None)

    p = sub.add_parser("simulate", help="one trajectory with tipping report")
    p.add_argument("--epsilon", type=_parse_number)
    p.add_argument("--dt", type=_parse_number)
    p.add_argument("--ratio", type=_parse_number, help="dt/epsilon (accepts ln2/6)")
    p.add_argument("--t0", type=_parse_number)
    p.add_argument("--alpha", type=_parse_number)
    p.add_argument("--kind", choices=["quadratic", "cubic"])
    p.add_argument("--step-cap", dest="step_cap", type=int)
    p.add_argument("--x-floor", dest="x_floor", type=_parse_number)
    p.add_argument("--t-max", dest="t_max", type=_parse_number)
    p.add_argument("--max-points", dest="max_points", type=int)
    common(p)

    for name, help_text in (
        ("sweep", "full tipping report over an (epsilon, dt) grid"),
        ("regions", "region map over an (epsilon, dt) grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--eps-range", dest="eps_range", type=_parse_range)
        p.add_argument("--dt-range", dest="dt_range", type=_parse_range)
        p.add_argument("--grid", type=_parse_grid, help="WxH cells")
        p.add_argument("--t0", type=_parse_number)
        p.add_argument("--alpha", type=_parse_number)
        p.add_argument("--step-cap", dest="step_cap", type=int)
        common(p)

    p = sub.add_parser("boundaries", help="trace region boundary curves")
    p.add_argument("--m", type=_parse_int_list, help="band indices, e.g. 3,5")
    p.add_argument("--sides", type=_parse_sides, help="top, bottom, or both")
    p.add_argument("--eps", type=_parse_number_list)
    p.add_argument("--eps-range", dest="eps_range", type=_parse_range)
    p.add_argument("--eps-points", dest="eps_points", type=int)
    p.add_argument("--t0", type=_parse_number)
    p.add_argument("--alpha", type=_parse_number)
    p.add_argument("--tol", type=_parse_number)
    common(p)

    p = sub.add_parser("scaling", help="tipping-time scaling experiments")
    p.add_argument("--ratio", type=_parse_number, help="fixed dt/epsilon (accepts ln2/6)")
    p.add_argument("--coeff", type=_parse_number, help="dt = coeff * eps^exponent")
    p.add_argument("--exponent", type=_parse_number)
    p.add_argument("--eps", type=_parse_number_list)
    p.add_argument("--eps-range", dest="eps_range", type=_parse_range)
    p.add_argument("--eps-points", dest="eps_points", type=int)
    p.add_argument("--t0", type=_parse_number)
    p.add_argument("--alpha", type=_parse_number)
    p.add_argument("--budget", type=_parse_number)
    p.add_argument("--step-cap", dest="step_cap", type=int)
    common(p)

    p = sub.add_parser("fit", help="fit a points CSV")
    p.add_argument("--input", type=str)
    p.add_argument("--law", choices=["power", "exponent"])
    p.add_argument("--label", type=str)
    common(p)

    p = sub.add_parser("bistable", help="cubic switching-delay experiment")
    p.add_argument("--eps", type=_parse_number_list)
    p.add_argument("--ratio", type=_parse_number)
    p.add_argument("--t0", type=_parse_number)
    common(p)

    p = sub.add_parser("verify", help="run the analytic-bound checks")
    common(p)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    started = time.monotonic()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args.command, args)
        out = _out_dir(cfg)
        cfg["out"] = str(out)
        cfg.setdefault("plot", True)
        code = _COMMANDS[args.command](cfg, out)
        _write_run_manifest(out, args.command, cfg, started)
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketingError, OutOfBudgetError, FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
