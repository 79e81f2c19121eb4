"""Pauli-frame propagation: the fast path for noisy Clifford sampling.

Frames record the Pauli error accumulated relative to a noiseless
reference run. They propagate through Clifford gates by the symplectic
update rules, so a measurement outcome flips exactly when the frame
anticommutes with the measured observable. Everything is batched over
shots: frame arrays have shape ``(shots, n_qubits)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import MEASUREMENTS, RESETS, TWO_QUBIT_GATES, Circuit, Op
from .tableau import Tableau, apply_op

# Pauli codes: 0=I, 1=X, 2=Y, 3=Z
_XBIT = np.array([0, 1, 1, 0], dtype=bool)
_ZBIT = np.array([0, 0, 1, 1], dtype=bool)


@dataclass(frozen=True)
class NoiseModel:
    """Uniform depolarizing noise of strength ``p`` after every noisy operation.

    Measurements are disturbed before they act and everything else after.
    ``idle_noise`` switches the ``I`` (idle) locations on or off.
    """

    p: float = 0.0
    idle_noise: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise strength must lie in [0, 1], got {self.p}")

    def is_location(self, op: Op) -> bool:
        if not op.noisy or self.p == 0.0:
            return False
        return op.name != "I" or self.idle_noise


@dataclass
class PauliFrame:
    """X and Z error masks; composition is bitwise XOR."""

    x: np.ndarray
    z: np.ndarray

    @classmethod
    def identity(cls, n: int, shots: int | None = None) -> "PauliFrame":
        shape = (n,) if shots is None else (shots, n)
        return cls(np.zeros(shape, dtype=bool), np.zeros(shape, dtype=bool))

    def __xor__(self, other: "PauliFrame") -> "PauliFrame":
        return PauliFrame(self.x ^ other.x, self.z ^ other.z)

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())


@dataclass
class FrameSample:
    measurement_flips: np.ndarray
    final: PauliFrame
    trajectory: list[PauliFrame] = field(default_factory=list)


def _random_paulis(rng: np.random.Generator, p: float, shape: tuple[int, int], two_qubit: bool):
    """Draw depolarizing errors; returns x/z bit arrays of shape ``shape`` (+2 qubits if two_qubit)."""
    hit = rng.random(shape) < p
    if two_qubit:
        code = rng.integers(1, 16, size=shape) * hit
        a, b = code // 4, code % 4
        return (_XBIT[a], _ZBIT[a]), (_XBIT[b], _ZBIT[b])
    code = rng.integers(1, 4, size=shape) * hit
    return (_XBIT[code], _ZBIT[code]), None


def _group(ops: list[Op]) -> dict[str, list[Op]]:
    groups: dict[str, list[Op]] = {}
    for op in ops:
        groups.setdefault(op.name, []).append(op)
    return groups


def propagate(
    circuit: Circuit,
    fx: np.ndarray,
    fz: np.ndarray,
    rng: np.random.Generator | None = None,
    noise: NoiseModel | None = None,
    randomize_gauge: bool = False,
    inject: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] | None = None,
    trajectory: list[PauliFrame] | None = None,
) -> np.ndarray:
    """Push frames ``fx``/``fz`` (modified in place) through ``circuit``.

    ``inject`` maps an op index to ``(rows, qubits, xbits, zbits)`` to XOR
    into the frames at that op's noise location. Returns the measurement
    flip record, shape ``(shots, n_measurements)``.
    """
    shots = fx.shape[0]
    meas = np.zeros((shots, circuit.n_measurements), dtype=bool)
    op_index = {id(op): i for i, op in enumerate(circuit.ops)}
    meas_index: dict[int, int] = {}
    for op in circuit.ops:
        if op.name in MEASUREMENTS:
            meas_index[id(op)] = len(meas_index)

    def disturb(ops: list[Op]) -> None:
        noisy = [op for op in ops if noise is not None and noise.is_location(op)]
        if noisy:
            qs = np.array([op.qubits for op in noisy])
            two = qs.shape[1] == 2
            first, second = _random_paulis(rng, noise.p, (shots, len(noisy)), two)
            fx[:, qs[:, 0]] ^= first[0]
            fz[:, qs[:, 0]] ^= first[1]
            if two:
                fx[:, qs[:, 1]] ^= second[0]
                fz[:, qs[:, 1]] ^= second[1]
        if inject:
            for op in ops:
                item = inject.get(op_index[id(op)])
                if item is not None:
                    rows, cols, xb, zb = item
                    fx[rows, cols] ^= xb
                    fz[rows, cols] ^= zb

    for step_ops in circuit.by_step():
        for name, ops in _group(step_ops).items():
            cols0 = np.array([op.qubits[0] for op in ops])
            if name in MEASUREMENTS:
                disturb(ops)
                flips = fx[:, cols0] if name == "MZ" else fz[:, cols0]
                for k, op in enumerate(ops):
                    meas[:, meas_index[id(op)]] = flips[:, k]
                if randomize_gauge:
                    gauge = rng.random((shots, len(ops))) < 0.5
                    if name == "MZ":
                        fz[:, cols0] ^= gauge
                    else:
                        fx[:, cols0] ^= gauge
                continue
            if name in RESETS:
                fx[:, cols0] = False
                fz[:, cols0] = False
                if randomize_gauge:
                    gauge = rng.random((shots, len(ops))) < 0.5
                    if name == "RZ":
                        fz[:, cols0] = gauge
                    else:
                        fx[:, cols0] = gauge
            elif name in TWO_QUBIT_GATES:
                cols1 = np.array([op.qubits[1] for op in ops])
                if name == "CX":
                    fx[:, cols1] ^= fx[:, cols0]
                    fz[:, cols0] ^= fz[:, cols1]
                else:
                    fz[:, cols0] ^= fx[:, cols1]
                    fz[:, cols1] ^= fx[:, cols0]
            elif name == "H":
                tmp = fx[:, cols0].copy()
                fx[:, cols0] = fz[:, cols0]
                fz[:, cols0] = tmp
            elif name in ("S", "S_DAG"):
                fz[:, cols0] ^= fx[:, cols0]
            # I, X, Y, Z leave frames unchanged.
            disturb(ops)
        if trajectory is not None:
            trajectory.append(PauliFrame(fx.copy(), fz.copy()))
    return meas


def sample_frame(
    circuit: Circuit,
    noise: NoiseModel,
    rng: np.random.Generator,
    shots: int = 1,
    record_trajectory: bool = False,
    randomize_gauge: bool = False,
) -> FrameSample:
    """Sample noisy Pauli frames for ``shots`` independent runs of ``circuit``."""
    fx = np.zeros((shots, circuit.n_qubits), dtype=bool)
    fz = np.zeros((shots, circuit.n_qubits), dtype=bool)
    if randomize_gauge:
        # |0> is invariant under Z, so a random Z frame is pure gauge.
        fz[:] = rng.random(fz.shape) < 0.5
    traj: list[PauliFrame] | None = [] if record_trajectory else None
    meas = propagate(circuit, fx, fz, rng, noise, randomize_gauge, trajectory=traj)
    return FrameSample(meas, PauliFrame(fx, fz), traj or [])


def reference_outcomes(circuit: Circuit, rng: np.random.Generator) -> np.ndarray:
    """One noiseless tableau run; measurement bits (1 means outcome -1)."""
    tab = Tableau(circuit.n_qubits)
    bits = []
    for op in circuit.ops:
        out = apply_op(tab, op, rng)
        if out is not None:
            bits.append(out < 0)
    return np.array(bits, dtype=bool)


def sample_outcomes_frame(circuit: Circuit, noise: NoiseModel, rng: np.random.Generator, shots: int) -> np.ndarray:
    """Noisy measurement records via reference run plus gauge-randomized frames."""
    ref = reference_outcomes(circuit, rng)
    sample = sample_frame(circuit, noise, rng, shots, randomize_gauge=True)
    return sample.measurement_flips ^ ref


def sample_outcomes_tableau(circuit: Circuit, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """One noisy run on the full tableau, inserting the same error channel explicitly."""
    tab = Tableau(circuit.n_qubits)
    bits = []

    def kick(op: Op) -> None:
        if not noise.is_location(op) or rng.random() >= noise.p:
            return
        if op.name in TWO_QUBIT_GATES:
            code = int(rng.integers(1, 16))
            codes = (code // 4, code % 4)
        else:
            codes = (int(rng.integers(1, 4)),)
        for q, c in zip(op.qubits, codes):
            if c == 1:
                tab.x_gate(q)
            elif c == 2:
                tab.y_gate(q)
            elif c == 3:
                tab.z_gate(q)

    for op in circuit.ops:
        if op.name in MEASUREMENTS:
            kick(op)
            bits.append(apply_op(tab, op, rng) < 0)
        else:
            apply_op(tab, op, rng)
            kick(op)
    return np.array(bits, dtype=bool)
