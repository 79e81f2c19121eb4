import numpy as np
import pytest
from scipy import stats

from sneakernet.stabsim import (
    Circuit,
    NoiseModel,
    Pauli,
    Tableau,
    apply_clifford,
    measure_pauli,
    sample_frame,
    sample_outcomes_frame,
    sample_outcomes_tableau,
)
from sneakernet.stabsim.circuit import Op
from sneakernet.stabsim.frame import _XBIT, _ZBIT, _random_paulis


def test_h_then_measure_x_is_deterministic(rng):
    tab = Tableau(1)
    apply_clifford(tab, Op("H", (0,), 0))
    assert all(tab.measure_x(0, rng) == 1 for _ in range(5))


def test_bell_pair_zz_and_xx(rng):
    tab = Tableau(2)
    tab.h(0)
    tab.cx(0, 1)
    assert tab.expectation(Pauli.from_str("ZZ")) == 1
    assert tab.expectation(Pauli.from_str("XX")) == 1
    assert tab.expectation(Pauli.from_str("YY")) == -1
    out, _ = measure_pauli(tab, Pauli.from_str("ZZ"), rng)
    assert out == 1


def test_measure_z_on_plus_is_uniform():
    rng = np.random.default_rng(7)
    ones = 0
    for _ in range(10_000):
        tab = Tableau(1)
        tab.h(0)
        ones += tab.measure_z(0, rng) == 1
    chi2 = stats.chisquare([ones, 10_000 - ones])
    assert chi2.pvalue > 1e-3


def test_repeated_measurement_is_idempotent(rng):
    for _ in range(20):
        tab = Tableau(1)
        first = tab.measure_x(0, rng)
        assert tab.measure_x(0, rng) == first


def test_alternating_anticommuting_measurements_are_uniform():
    rng = np.random.default_rng(3)
    tab = Tableau(1)
    seq = np.array([tab.measure_x(0, rng) if i % 2 else tab.measure_z(0, rng) for i in range(4000)])
    plus = int((seq == 1).sum())
    assert stats.binomtest(plus, len(seq), 0.5).pvalue > 1e-3
    # consecutive outcomes are uncorrelated
    agree = int((seq[1:] == seq[:-1]).sum())
    assert stats.binomtest(agree, len(seq) - 1, 0.5).pvalue > 1e-3


def test_signed_measurement(rng):
    tab = Tableau(1)
    assert tab.expectation(Pauli.from_str("-Z")) == -1
    assert tab.measure(Pauli.from_str("-Z"), rng) == -1


def test_unsupported_gate_rejected():
    with pytest.raises(ValueError):
        Op("T", (0,), 0)
    tab = Tableau(1)
    with pytest.raises(ValueError):
        apply_clifford(tab, Op("MZ", (0,), 0))
    with pytest.raises(ValueError):
        apply_clifford(tab, Op("H", (3,), 0))


def _random_clifford_circuit(n, depth, rng, measure=True):
    c = Circuit(n)
    step = 0
    for q in range(n):
        c.append("RX" if rng.random() < 0.5 else "RZ", [q], step)
    step += 1
    for _ in range(depth):
        free = list(rng.permutation(n))
        while free:
            q = free.pop()
            if free and rng.random() < 0.5:
                c.append(str(rng.choice(["CX", "CZ"])), [q, free.pop()], step)
            else:
                c.append(str(rng.choice(["H", "S", "S_DAG", "X", "Y", "Z", "I"])), [q], step)
        step += 1
        if measure and rng.random() < 0.3:
            q = int(rng.integers(n))
            c.append(str(rng.choice(["MZ", "MX"])), [q], step)
            step += 1
    for q in range(n):
        c.append("MZ", [q], step)
    return c


def test_rank_invariant_under_random_circuits(rng):
    from sneakernet.stabsim import apply_op

    for _ in range(20):
        c = _random_clifford_circuit(5, 8, rng)
        tab = Tableau(5)
        for op in c:
            apply_op(tab, op, rng)
            tab.check_invariants()


def test_circuit_validation_and_text_round_trip(rng):
    c = _random_clifford_circuit(4, 6, rng)
    c.validate()
    again = Circuit.from_text(c.to_text())
    assert again.ops == c.ops and again.n_qubits == c.n_qubits
    bad = Circuit(2)
    bad.append("H", [0], 0)
    bad.append("CX", [0, 1], 0)
    with pytest.raises(ValueError):
        bad.validate()
    with pytest.raises(ValueError, match="line 2"):
        Circuit.from_text("qubits 1\n0 FOO 0\n")


def test_zero_noise_frame_is_empty(rng):
    c = _random_clifford_circuit(6, 10, rng)
    s = sample_frame(c, NoiseModel(0.0), rng, shots=50)
    assert not s.measurement_flips.any()
    assert s.final.is_identity()


def test_forced_single_qubit_error_uniform():
    rng = np.random.default_rng(11)
    (xb, zb), _ = _random_paulis(rng, 1.0, (30_000, 1), False)
    code = xb.astype(int) + 2 * zb.astype(int)
    counts = np.bincount(code.ravel(), minlength=4)
    assert counts[0] == 0
    assert stats.chisquare(counts[1:]).pvalue > 1e-3


def test_two_qubit_depolarizing_law():
    # each of the 15 non-identity Paulis appears with frequency p/15 within 3 sigma
    rng = np.random.default_rng(5)
    n, p = 1_000_000, 0.3
    first, second = _random_paulis(rng, p, (n, 1), True)
    code = (first[0].astype(int) + 2 * first[1]) * 4 + (second[0].astype(int) + 2 * second[1])
    counts = np.bincount(code.ravel(), minlength=16)
    expected = n * p / 15
    sigma = np.sqrt(n * (p / 15) * (1 - p / 15))
    assert np.all(np.abs(counts[1:] - expected) < 3.5 * sigma)
    assert abs(counts[0] - n * (1 - p)) < 4 * np.sqrt(n * p * (1 - p))
    assert _XBIT.tolist() == [False, True, True, False] and _ZBIT.tolist() == [False, False, True, True]


def test_frame_propagation_through_cx():
    c = Circuit(2)
    c.append("CX", [0, 1], 0)
    c.append("MZ", [1], 1)
    c.append("MX", [0], 1)
    from sneakernet.stabsim import propagate

    fx = np.array([[True, False], [False, False]])
    fz = np.array([[False, False], [False, True]])
    flips = propagate(c, fx, fz)
    # X on control spreads to target; Z on target spreads to control
    assert flips.tolist() == [[True, False], [False, True]]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_frame_matches_tableau_distribution(seed):
    rng = np.random.default_rng(seed)
    c = _random_clifford_circuit(6, 6, rng)
    noise = NoiseModel(0.05)
    shots = 3000
    frame = sample_outcomes_frame(c, noise, np.random.default_rng(seed + 100), shots)
    tab_rng = np.random.default_rng(seed + 200)
    tab = np.array([sample_outcomes_tableau(c, noise, tab_rng) for _ in range(shots)])
    # compare per-measurement marginals and pairwise parities
    m = c.n_measurements
    for i in range(m):
        a, b = int(frame[:, i].sum()), int(tab[:, i].sum())
        table = [[a, shots - a], [b, shots - b]]
        if min(a + b, 2 * shots - a - b) > 0:
            assert stats.chi2_contingency(table).pvalue > 1e-4
    for i in range(m - 1):
        a = int((frame[:, i] ^ frame[:, i + 1]).sum())
        b = int((tab[:, i] ^ tab[:, i + 1]).sum())
        table = [[a, shots - a], [b, shots - b]]
        if min(a + b, 2 * shots - a - b) > 0:
            assert stats.chi2_contingency(table).pvalue > 1e-4


def test_frame_sampling_is_seed_deterministic(rng):
    c = _random_clifford_circuit(6, 10, rng)
    a = sample_frame(c, NoiseModel(0.02), np.random.default_rng(9), shots=100).measurement_flips
    b = sample_frame(c, NoiseModel(0.02), np.random.default_rng(9), shots=100).measurement_flips
    assert np.array_equal(a, b)
