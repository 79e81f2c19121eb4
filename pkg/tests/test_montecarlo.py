import math

import numpy as np
import pytest

from sneakernet.codemodel import FailureFit, per_cycle_failure
from sneakernet.errors import DomainError, FitError
from sneakernet.surface import TrialStats, build_patch, crossing_point, estimate_failure, run_cycle_trial, wilson_interval
from sneakernet.surface.fitting import fit_failure_model, fit_points


def test_zero_noise_never_fails():
    assert estimate_failure(3, 0.0, 1000).failures == 0
    rng = np.random.default_rng(0)
    patch = build_patch(3)
    for _ in range(5):
        out = run_cycle_trial(patch, 0.0, rng)
        assert not out.failed and not out.events.any()


def test_envelope_errors():
    with pytest.raises(DomainError):
        estimate_failure(3, 0.01, 0)
    with pytest.raises(DomainError):
        estimate_failure(3, 1.0, 10)
    with pytest.raises(DomainError):
        estimate_failure(1, 0.01, 10)


def test_seed_determinism_and_parallel_independence():
    a = estimate_failure(3, 0.01, 40_000, seed=7, workers=1)
    b = estimate_failure(3, 0.01, 40_000, seed=7, workers=3)
    c = estimate_failure(3, 0.01, 40_000, seed=8)
    assert a == b
    assert a != c


def test_wilson_interval_contains_estimate():
    for f, n in [(0, 10), (3, 10), (10, 10), (50, 1000)]:
        lo, hi = wilson_interval(f, n)
        assert lo <= f / n <= hi
    assert wilson_interval(0, 100)[0] == 0.0
    s = TrialStats(3, 1e-4, 1000, 0)
    assert s.upper_bound_only and s.as_row()["p_l"] is None and s.upper > 0
    with pytest.raises(ValueError):
        TrialStats(3, 0.1, 5, 6)


def test_frame_path_agrees_with_sparse_sampler():
    # the explicit per-shot frame simulation and the batched sampler estimate the same rate
    rng = np.random.default_rng(1)
    patch = build_patch(3)
    p, n = 0.01, 1500
    slow = sum(run_cycle_trial(patch, p, rng).failed for _ in range(n))
    fast = estimate_failure(3, p, 50_000, seed=1)
    se = math.sqrt(fast.p_l * (1 - fast.p_l) / n)
    assert abs(slow / n - fast.p_l) < 4 * se


def test_corrected_residual_has_trivial_syndrome():
    rng = np.random.default_rng(2)
    patch = build_patch(3)
    for _ in range(200):
        out = run_cycle_trial(patch, 0.01, rng)
        total = out.residual ^ out.correction
        assert not ((patch.hz.astype(int) @ total.x) % 2).any()
        assert not ((patch.hx.astype(int) @ total.z) % 2).any()


def test_failure_rate_ordering_below_and_above_threshold():
    lo3, lo5 = (estimate_failure(d, 0.002, 60_000, seed=3) for d in (3, 5))
    hi3, hi5 = (estimate_failure(d, 0.012, 20_000, seed=3) for d in (3, 5))
    assert lo5.p_l < lo3.p_l
    assert hi5.p_l > hi3.p_l


def test_crossing_point_interpolation():
    ps = [0.001, 0.01]
    low = [TrialStats(3, p, 10_000, f) for p, f in zip(ps, [100, 1000])]
    high = [TrialStats(5, p, 10_000, f) for p, f in zip(ps, [10, 10_000])]
    x = crossing_point(low, high)
    # log ratio goes from log(0.1) to log(10): crossing at the geometric midpoint
    assert x == pytest.approx(math.sqrt(0.001 * 0.01))
    flat = [TrialStats(5, p, 10_000, f) for p, f in zip(ps, [1, 10])]
    assert crossing_point(low, flat) is None


def test_synthetic_fit_round_trip():
    truth = FailureFit(0.3, 70.0)
    d, p = np.meshgrid([3, 5, 7], [1e-3, 2e-3, 4e-3])
    d, p = d.ravel(), p.ravel()
    pl = [per_cycle_failure(pi, di, truth) for pi, di in zip(p, d)]
    res = fit_points(d, p, pl)
    assert res.alpha == pytest.approx(0.3, rel=0.01)
    assert res.beta == pytest.approx(70.0, rel=0.01)
    assert res.rms < 1e-9


def test_noisy_synthetic_fit_within_25_percent():
    rng = np.random.default_rng(10)
    truth = FailureFit(0.3, 70.0)
    d, p = np.meshgrid([3, 5, 7], np.geomspace(5e-4, 5e-3, 6))
    d, p = d.ravel(), p.ravel()
    for _ in range(20):
        pl = [per_cycle_failure(pi, di, truth) * (1 + 0.1 * rng.standard_normal()) for pi, di in zip(p, d)]
        res = fit_points(d, p, pl)
        assert res.alpha == pytest.approx(0.3, rel=0.25)
        assert res.beta == pytest.approx(70.0, rel=0.25)


def test_fit_needs_two_distances_and_two_rates():
    with pytest.raises(FitError):
        fit_failure_model([TrialStats(3, 1e-3, 100, 1), TrialStats(3, 2e-3, 100, 2)])
    with pytest.raises(FitError):
        fit_failure_model([TrialStats(3, 1e-3, 100, 1), TrialStats(5, 2e-3, 100, 0)])
    res = fit_failure_model([TrialStats(3, 1e-3, 100, 1), TrialStats(5, 2e-3, 100, 2),
                             TrialStats(3, 2e-3, 100, 4), TrialStats(5, 1e-3, 100, 1),
                             TrialStats(7, 9e-3, 100, 50)], valid_p_max=2e-3)
    assert res.points == 4 and res.fit.valid_p_max == 2e-3


def test_d3_rate_near_closed_form_at_low_p():
    stats = estimate_failure(3, 1e-3, 100_000, seed=0, workers=4)
    model = per_cycle_failure(1e-3, 3)  # 0.3 * (0.07)^2 = 1.47e-3
    assert model / 3 <= stats.p_l <= 3 * model
