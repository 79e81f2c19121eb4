import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sneakernet.catalog import default_catalog
from sneakernet.codemodel import (
    DAY,
    YEAR,
    FailureFit,
    LinkTarget,
    PlatformSpec,
    cycle_time,
    distance_for_qubits,
    memory_time,
    memory_time_approx,
    memory_time_grid,
    per_cycle_failure,
    qubit_count,
    select_distance,
)
from sneakernet.errors import DomainError, InfeasibleError

mp.mp.dps = 50
NV = PlatformSpec("NV- (optical)", 6.6e-4, 3.5e-6, 1e-3)


def oracle_pl(p, d, alpha=0.3, beta=70):
    return mp.mpf(alpha) * (mp.mpf(beta) * mp.mpf(p)) ** (mp.mpf(d + 1) / 2)


def oracle_tm(p, d, t, p_link):
    pl = oracle_pl(p, d)
    return mp.log(1 - mp.mpf(p_link)) * 6 * mp.mpf(t) * d / mp.log(1 - pl)


def test_per_cycle_failure_examples():
    assert per_cycle_failure(1e-3, 33) == pytest.approx(float(oracle_pl(1e-3, 33)), rel=1e-12)
    assert per_cycle_failure(1e-3, 33) == pytest.approx(7.0e-21, rel=0.01)
    assert per_cycle_failure(1 / 70, 9) == pytest.approx(0.3)
    assert per_cycle_failure(0.0, 5) == 0.0
    assert per_cycle_failure(0.2, 3) == 1.0  # clamped


@pytest.mark.parametrize("d,t,days", [(33, 3.5e-6, 115), (31, 3.5e-6, 7.5)])
def test_memory_time_examples(d, t, days):
    tm = memory_time(1e-3, d, t, 1e-10)
    assert tm == pytest.approx(float(oracle_tm(1e-3, d, t, 1e-10)), rel=1e-9)
    assert tm / DAY == pytest.approx(days, rel=0.02)


def test_memory_time_single_cycle_budget():
    d, t, p = 5, 1e-6, 2e-3
    pl = per_cycle_failure(p, d)
    assert memory_time(p, d, t, pl) == pytest.approx(cycle_time(d, t))


def test_memory_time_unbounded_when_no_failures():
    assert memory_time(0.0, 3, 1e-6, 1e-10) == math.inf
    with pytest.raises(DomainError):
        memory_time(1e-3, 3, 1e-6, 0.0)


@pytest.mark.parametrize("d", range(1, 40))
def test_qubit_count_odd_square_and_inverse(d):
    n = qubit_count(d)
    root = math.isqrt(n)
    assert root * root == n and root % 2 == 1
    assert distance_for_qubits(n) == d
    assert qubit_count(d + 1) > n
    assert distance_for_qubits(n + 1) is None


@given(st.floats(1e-6, 1e-2), st.floats(1e-6, 1e-2), st.integers(2, 60))
def test_failure_monotone_in_p_and_d(p1, p2, d):
    lo, hi = sorted((p1, p2))
    assert per_cycle_failure(lo, d) <= per_cycle_failure(hi, d)
    if 70 * hi < 1:
        pl = per_cycle_failure(hi, d)
        if pl > 1e-300:
            assert per_cycle_failure(hi, d + 1) < pl


@settings(max_examples=200)
@given(st.floats(1e-6, 5e-3), st.integers(2, 40), st.floats(1e-9, 1e-3), st.floats(1e-12, 1e-4))
def test_exact_form_bounds_approximation(p, d, t, p_link):
    n = qubit_count(d)
    exact = memory_time(p, d, t, p_link)
    approx = memory_time_approx(p, n, t, p_link)
    pl = per_cycle_failure(p, d)
    if pl < 1e-3 and math.isfinite(exact):
        assert approx == pytest.approx(exact, rel=0.01)
    # -log(1-x)/x grows with x, so the exact form is the larger one whenever P_L <= P_link
    if 0 < pl <= p_link:
        assert exact >= approx * (1 - 1e-12)


EXPECTED = {
    "NV- (optical)": (33, 4225),
    "trapped ions": (11, 441),
    "transmons": (13, 625),
    "quantum dots": (36, 5041),
    "NV-": (29, 3249),
    "silicon": (36, 5041),
}


@pytest.mark.parametrize("platform", default_catalog(), ids=lambda p: p.name)
def test_select_distance_table_and_minimality(platform):
    target = LinkTarget()
    m = select_distance(platform, target)
    assert (m.distance, m.qubit_count) == EXPECTED[platform.name]
    assert m.memory_time >= target.storage_time
    prev = memory_time(platform.error_rate, m.distance - 1, platform.gate_time, target.link_infidelity)
    assert prev < target.storage_time
    # independent scan-upward oracle in high precision
    d = 2
    while oracle_tm(platform.error_rate, d, platform.gate_time, 1e-10) < 40 * DAY:
        d += 1
    assert d == m.distance


def test_select_distance_errors():
    with pytest.raises(DomainError):
        select_distance(PlatformSpec("hot", 1e-3, 1e-6, 0.02))
    with pytest.raises(InfeasibleError):
        select_distance(NV, d_max=20)
    with pytest.raises(DomainError):
        PlatformSpec("bad", -1, 1e-6, 1e-3)


def test_fit_reliability_flag():
    fit = FailureFit()
    assert fit.reliable(1e-3) and not fit.reliable(0.008)
    assert fit.valid_p_max == pytest.approx(0.5 / 70)


def test_grid_examples():
    grid = memory_time_grid([4225], [1e-10], 3.5e-6, 1e-3)
    assert grid.seconds.shape == (1, 1)
    assert grid.seconds[0, 0] == pytest.approx(memory_time(1e-3, 33, 3.5e-6, 1e-10))
    assert grid.seconds[0, 0] == pytest.approx(9.9e6, rel=0.01)

    zero = memory_time_grid([25, 81], [1e-10, 1e-8], 1e-6, 0.0)
    assert np.isinf(zero.seconds).all() and zero.contour == []

    mixed = memory_time_grid([25, 30, 81], [1e-10], 1e-6, 1e-3)
    assert mixed.skipped == [30] and mixed.qubit_counts == [25, 81]
    snapped = memory_time_grid([25, 30, 81], [1e-10], 1e-6, 1e-3, snap=True)
    assert snapped.skipped == [] and snapped.qubit_counts == [25, 81]

    with pytest.raises(DomainError):
        memory_time_grid([81, 25], [1e-10], 1e-6, 1e-3)
    with pytest.raises(DomainError):
        memory_time_grid([], [1e-10], 1e-6, 1e-3)


def test_grid_contour_brackets_one_year():
    ns = [qubit_count(d) for d in range(3, 60, 2)]
    pls = [1e-12, 1e-10, 1e-8]
    grid = memory_time_grid(ns, pls, 3.5e-6, 1e-3)
    assert len(grid.contour) == len(pls)
    for n, pl in grid.contour:
        j = pls.index(pl)
        col = grid.seconds[:, j]
        i = int(np.searchsorted(ns, n))
        assert col[i - 1] < YEAR <= col[i]
    # looser link budgets need fewer qubits for a year
    contour_n = [n for n, _ in grid.contour]
    assert contour_n == sorted(contour_n, reverse=True)
