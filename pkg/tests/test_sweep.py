"""Parameter-plane sweeps, band-edge tracing, and scaling experiments."""

import warnings

import numpy as np
import pytest

from slowpass import (
    LOG2_OVER_6,
    BracketingError,
    GridBase,
    GridSpec,
    OutOfBudgetError,
    SlowPassageParams,
    SolutionClass,
    first_tipping,
    extract_region,
    max_dt_for_negative_tipping,
    projected_steps,
    scaling_experiment,
    scaling_experiment_powerlaw,
    sweep_grid,
    trace_boundary,
)


def in_band(m, eps, dt):
    rep = first_tipping(SlowPassageParams(epsilon=eps, dt=dt), step_cap=2_000_000)
    return rep.found and rep.m_star == m and rep.t_star < 0.0


# ---------------------------------------------------------------------------
# grid plumbing


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(eps_values=(0.1, 0.1), dt_values=(0.01,))
    with pytest.raises(ValueError):
        GridSpec(eps_values=(0.2, 0.1), dt_values=(0.01,))
    with pytest.raises(ValueError):
        GridSpec(eps_values=(-0.1, 0.2), dt_values=(0.01,))
    with pytest.raises(ValueError):
        GridSpec(eps_values=(0.1,), dt_values=(float("nan"),))


def test_grid_spec_log_constructor_half_open():
    spec = GridSpec.log((1e-4, 0.5), (1e-4, 0.5), (8, 8))
    assert len(spec.eps_values) == 8
    assert spec.eps_values[0] > 1e-4  # lower edge excluded
    assert spec.eps_values[-1] == pytest.approx(0.5, rel=1e-12)
    assert all(b > a for a, b in zip(spec.eps_values, spec.eps_values[1:]))


def test_empty_grid_sweeps_to_empty_map():
    spec = GridSpec(eps_values=(), dt_values=())
    assert len(sweep_grid(spec).cells) == 0


def test_sweep_reference_cells():
    spec = GridSpec(
        eps_values=(0.01, 0.1),
        dt_values=(0.01 * LOG2_OVER_6, 0.9),
        base=GridBase(),
    )
    rmap = sweep_grid(spec)
    assert len(rmap.cells) == 4
    huge = rmap.at(0.1, 0.9)
    assert huge.report.m_star == 1
    assert huge.category is SolutionClass.EARLY
    gentle = rmap.at(0.01, 0.01 * LOG2_OVER_6)
    assert gentle.category is SolutionClass.DELAYED
    assert gentle.report.t_star > 0.0


def test_sweep_threads_do_not_change_results():
    spec = GridSpec.log((1e-3, 0.1), (1e-3, 0.3), (6, 6))
    one = sweep_grid(spec, threads=1)
    many = sweep_grid(spec, threads=8)
    assert len(one.cells) == len(many.cells)
    for a, b in zip(one.cells, many.cells):
        assert (a.epsilon, a.dt) == (b.epsilon, b.dt)
        assert a.report.m_star == b.report.m_star
        assert a.report.t_star == b.report.t_star
        assert a.category == b.category


def test_region_extraction():
    spec = GridSpec.log((5e-3, 0.05), (5e-3, 0.32), (8, 10))
    rmap = sweep_grid(spec)
    omega3 = extract_region(rmap, 3)
    assert omega3
    bound = max_dt_for_negative_tipping(3)
    for cell in omega3:
        assert cell.report.m_star == 3
        assert cell.report.t_star < 0.0
        assert cell.dt < bound
    assert extract_region(rmap, 2) == ()
    assert extract_region(rmap, 99991) == ()


def test_region_membership_is_constant_within_band():
    # every extracted cell re-probes to the same index: the map and the
    # membership predicate cannot disagree
    spec = GridSpec.log((5e-3, 0.05), (5e-3, 0.32), (5, 8))
    rmap = sweep_grid(spec)
    for cell in extract_region(rmap, 3):
        assert in_band(3, cell.epsilon, cell.dt)


# ---------------------------------------------------------------------------
# band-edge tracing


def test_trace_bottom_edge_reference_point():
    curve = trace_boundary(3, "bottom", [1e-3])
    assert curve.misses == ()
    (eps, dt), = curve.points
    assert eps == 1e-3
    assert dt == pytest.approx(0.0072831233, rel=1e-5)


def test_trace_top_edge_approaches_ceiling():
    curve = trace_boundary(3, "top", [1e-3, 1e-2])
    ceiling = max_dt_for_negative_tipping(3)
    for eps, dt in curve.points:
        assert dt < ceiling
        assert dt == pytest.approx(ceiling, rel=1e-4)


def test_trace_edges_ordered():
    eps = [1e-3, 1e-2]
    bottom = trace_boundary(3, "bottom", eps)
    top = trace_boundary(3, "top", eps)
    for (e1, lo), (e2, hi) in zip(bottom.points, top.points):
        assert e1 == e2
        assert lo < hi


def test_trace_points_sorted_by_epsilon():
    curve = trace_boundary(3, "bottom", [1e-2, 1e-3, 3e-3])
    es = [e for e, _ in curve.points]
    assert es == sorted(es)


def test_trace_reprobe_straddles_membership():
    curve = trace_boundary(3, "bottom", [1e-3], tol=1e-6)
    (eps, dt), = curve.points
    assert in_band(3, eps, dt * (1.0 + 5e-6))
    assert not in_band(3, eps, dt * (1.0 - 5e-6))


def test_trace_coarse_tolerance_brackets_fine_answer():
    fine = trace_boundary(3, "bottom", [1e-3], tol=1e-6)
    coarse = trace_boundary(3, "bottom", [1e-3], tol=0.1)
    dt_fine = fine.points[0][1]
    dt_coarse = coarse.points[0][1]
    assert abs(dt_coarse - dt_fine) / dt_fine < 0.1


def test_trace_records_misses_where_band_vanishes():
    # the index-3 band pinches out by eps=0.3; the tracer reports the gap
    # instead of inventing a point
    curve = trace_boundary(3, "bottom", [0.3, 1e-2])
    assert curve.misses == (0.3,)
    assert len(curve.points) == 1
    assert curve.points[0][0] == 1e-2


def test_trace_raises_when_nothing_brackets():
    with pytest.raises(BracketingError):
        trace_boundary(2, "bottom", [1e-2])


def test_trace_rejects_unknown_side():
    with pytest.raises(ValueError):
        trace_boundary(3, "middle", [1e-2])


# ---------------------------------------------------------------------------
# scaling experiments


def test_scaling_fixed_ratio_reference_values():
    pts = scaling_experiment(LOG2_OVER_6, [1e-2, 1e-5])
    scaled = {p.epsilon: p.t_star / p.epsilon ** (2.0 / 3.0) for p in pts}
    assert scaled[1e-2] == pytest.approx(1.0300, abs=0.005)
    assert scaled[1e-5] == pytest.approx(1.0204, abs=0.005)


def test_scaling_single_epsilon():
    pts = scaling_experiment(LOG2_OVER_6, [1e-2])
    assert len(pts) == 1
    assert pts[0].epsilon == 1e-2


def test_scaling_warns_outside_tracking_regime_but_runs():
    with pytest.warns(RuntimeWarning):
        pts = scaling_experiment(0.3, [1e-2])
    assert len(pts) == 1
    assert pts[0].t_star > 0.0


def test_scaling_excludes_capped_cells():
    with pytest.warns(RuntimeWarning):
        pts = scaling_experiment(LOG2_OVER_6, [1e-2, 1e-1], step_cap=200)
    assert [p.epsilon for p in pts] == [1e-1]


def test_scaling_powerlaw_reference_values():
    pts = scaling_experiment_powerlaw(LOG2_OVER_6, 1.5, [1e-3])
    assert pts[0].t_star / 1e-3 ** (2.0 / 3.0) == pytest.approx(1.0192, abs=0.005)
    pts2 = scaling_experiment_powerlaw(LOG2_OVER_6, 2.0, [1e-2])
    assert pts2[0].t_star / 1e-2 ** (2.0 / 3.0) == pytest.approx(1.0190, abs=0.005)


def test_scaling_powerlaw_budget_skip():
    assert projected_steps(LOG2_OVER_6 * (1e-5) ** 2.5) == pytest.approx(2.74e13, rel=0.01)
    with pytest.warns(RuntimeWarning, match="budget"):
        pts = scaling_experiment_powerlaw(
            LOG2_OVER_6, 2.5, [1e-2, 1e-5], budget=2e10
        )
    assert [p.epsilon for p in pts] == [1e-2]


def test_scaling_powerlaw_all_out_of_budget():
    with pytest.raises(OutOfBudgetError):
        scaling_experiment_powerlaw(LOG2_OVER_6, 2.5, [1e-4, 1e-5], budget=2e10)


def test_scaling_powerlaw_step_size_sanity():
    with pytest.raises(ValueError):
        scaling_experiment_powerlaw(1.0, 0.1, [0.5])  # dt would exceed 0.5
