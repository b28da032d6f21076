"""Tipping detection, classification, and the closed-form predicates."""

import math

import numpy as np
import pytest

from slowpass import (
    LOG2_OVER_6,
    RecordPolicy,
    SlowPassageParams,
    SolutionClass,
    StopRule,
    TippingReport,
    classify,
    detect_tipping,
    first_tipping,
    max_dt_for_negative_tipping,
    simulate,
    stable_branch,
    time_of,
    tipping_threshold,
    tips_at_first_step,
    tips_at_third_step,
    unstable_branch,
)


def test_threshold_is_clamped_unstable_branch():
    assert tipping_threshold(-1.0) == -1.0
    assert tipping_threshold(0.0) == 0.0
    assert tipping_threshold(0.7) == 0.0
    assert tipping_threshold(-0.25) == -0.5


# ---------------------------------------------------------------------------
# detection


def test_detect_from_plain_stream():
    rep = detect_tipping([(0, -1.0, 2.0), (1, -0.45, 0.3), (2, 0.1, -0.2)])
    assert rep.found
    assert rep.m_star == 2
    assert rep.t_star == 0.1
    assert rep.x_star == -0.2
    # the middle sample dips under the attracting branch without tipping
    assert rep.crossings_before == 1


def test_detect_hand_checked_first_step():
    p = SlowPassageParams(epsilon=0.1, dt=2.0)
    rep = first_tipping(p)
    assert rep.found and rep.m_star == 1
    assert rep.x_star == pytest.approx(-3.1, abs=1e-12)


def test_detect_nothing_before_cap():
    rep = detect_tipping([(0, -1.0, 2.0), (1, -0.5, 1.0), (2, 0.0, 0.5)])
    assert not rep.found
    assert rep.m_star is None and rep.t_star is None


def test_detect_rejects_out_of_order_stream():
    with pytest.raises(ValueError):
        detect_tipping([(0, -1.0, 2.0), (2, -0.5, 1.0), (1, -0.7, 1.5)])


def test_exact_threshold_equality_does_not_trigger():
    # strict inequality: landing exactly on the boundary is not a tip
    rep = detect_tipping([(0, -1.0, 2.0), (1, -0.25, -0.5), (2, -0.2, -0.5)])
    assert rep.found
    assert rep.m_star == 2  # -0.5 < -sqrt(0.2) but -0.5 == -sqrt(0.25)


def test_trajectory_and_kernel_agree():
    # two independent routes to the same report
    p = SlowPassageParams(epsilon=0.01, dt=0.01 * LOG2_OVER_6)
    traj = simulate(
        p, stop=StopRule(step_cap=10**6), record=RecordPolicy(max_points=2 * 10**6)
    )
    slow = detect_tipping(traj)
    fast = first_tipping(p)
    assert slow.found and fast.found
    assert slow.m_star == fast.m_star
    assert slow.t_star == fast.t_star
    assert slow.x_star == fast.x_star
    assert slow.crossings_before == fast.crossings_before


def test_report_minimality_rescan():
    p = SlowPassageParams(epsilon=0.05, dt=0.05 * LOG2_OVER_6)
    traj = simulate(
        p, stop=StopRule(step_cap=10**6), record=RecordPolicy(max_points=2 * 10**6)
    )
    rep = detect_tipping(traj)
    assert rep.found
    mask = traj.m < rep.m_star
    thresholds = -stable_branch(-traj.t[mask])  # -sqrt(max(-t,0)) elementwise
    assert np.all(traj.x[mask] >= thresholds)


def test_frozen_canonical_report():
    # reference values from a stride-1 run of this package
    rep = first_tipping(SlowPassageParams(epsilon=0.01, dt=0.01 * LOG2_OVER_6))
    assert rep.m_star == 907
    assert rep.t_star / 0.01 ** (2.0 / 3.0) == pytest.approx(1.0299811047511411, rel=1e-12)
    assert rep.crossings_before == 0


# ---------------------------------------------------------------------------
# classification


def test_classify_delayed_canonical():
    rep = first_tipping(SlowPassageParams(epsilon=0.01, dt=0.01 * LOG2_OVER_6))
    assert classify(rep) is SolutionClass.DELAYED
    assert rep.t_star == pytest.approx(1.03 * 0.01 ** (2.0 / 3.0), rel=0.01)


def test_classify_early_first_step():
    rep = first_tipping(SlowPassageParams(epsilon=0.1, dt=0.9))
    assert rep.m_star == 1
    assert rep.t_star < 0.0
    assert classify(rep) is SolutionClass.EARLY


def test_classify_early_third_step():
    eps = 1e-4
    rep = first_tipping(SlowPassageParams(epsilon=eps, dt=eps ** 0.3))
    assert rep.m_star == 3
    assert classify(rep) is SolutionClass.EARLY


def test_classify_table():
    def rep(t_star, crossings):
        return TippingReport(
            epsilon=0.01, dt=0.001, t0=-1.0, alpha=1.0, found=True,
            m_star=10, t_star=t_star, x_star=-1.0, crossings_before=crossings,
        )

    assert classify(rep(0.5, 0)) is SolutionClass.DELAYED
    assert classify(rep(0.5, 3)) is SolutionClass.DELAYED_OSCILLATORY
    assert classify(rep(-0.5, 0)) is SolutionClass.EARLY
    assert classify(rep(-0.5, 7)) is SolutionClass.EARLY
    assert classify(rep(0.0, 2)) is SolutionClass.BORDERLINE


def test_classify_requires_found():
    rep = TippingReport(
        epsilon=0.01, dt=0.001, t0=-1.0, alpha=1.0, found=False,
        m_star=None, t_star=None, x_star=None, crossings_before=0,
    )
    with pytest.raises(ValueError):
        classify(rep)


# ---------------------------------------------------------------------------
# closed-form predicates


def test_first_step_predicate():
    assert tips_at_first_step(SlowPassageParams(epsilon=0.5, dt=2.0, alpha=1.0))
    assert not tips_at_first_step(SlowPassageParams(epsilon=0.5, dt=0.5, alpha=1.0))
    assert tips_at_first_step(SlowPassageParams(epsilon=0.5, dt=0.3, alpha=4.0))


def test_first_step_predicate_matches_simulation():
    for eps in (0.1, 0.01, 0.001):
        for alpha in (0.5, 1.0, 2.0):
            p = SlowPassageParams(epsilon=eps, dt=1.01 / alpha, alpha=alpha)
            assert tips_at_first_step(p)
            rep = first_tipping(p)
            assert rep.m_star == 1
            assert rep.x_star < tipping_threshold(time_of(1, p))


def test_third_step_predicate():
    p = SlowPassageParams(epsilon=0.01, dt=0.01 ** 0.3, alpha=1.0)
    assert tips_at_third_step(p, 1.0, 0.3)
    weak = SlowPassageParams(epsilon=0.01, dt=0.01 ** 0.3, alpha=0.2)
    assert not tips_at_third_step(weak, 1.0, 0.3)
    assert not tips_at_third_step(p, 1.0, 0.6)


def test_third_step_alternation_pattern():
    # the predicted +,-,tip pattern around the attracting branch, checked on
    # a descending grid once it first holds
    held = False
    for eps in (1e-2, 1e-3, 1e-4, 1e-5):
        p = SlowPassageParams(epsilon=eps, dt=eps ** 0.3)
        traj = simulate(p, stop=StopRule(step_cap=5), record=RecordPolicy(max_points=10))
        x1, x2, x3 = traj.x[1], traj.x[2], traj.x[3]
        t1, t2, t3 = traj.t[1], traj.t[2], traj.t[3]
        ok = (
            0.0 < x1 < math.sqrt(-t1)
            and x2 > math.sqrt(-t2)
            and x3 < -math.sqrt(-t3)
        )
        if held:
            assert ok, f"pattern broke at eps={eps}"
        elif ok:
            held = True
        if ok:
            rep = first_tipping(p)
            assert rep.m_star == 3
    assert held


def test_max_dt_for_negative_tipping():
    assert max_dt_for_negative_tipping(3) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert max_dt_for_negative_tipping(1) == 1.0
    assert max_dt_for_negative_tipping(5, t0=-2.0) == pytest.approx(0.4, rel=1e-15)
