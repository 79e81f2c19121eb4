"""Syndrome-extraction circuits for a planar-code patch.

Each round takes six time steps: ancilla init, four CNOT steps visiting the
north, west, east and south neighbours, then ancilla measurement. X-check
ancillas are initialised in ``|+>`` and act as CNOT controls; Z-check
ancillas start in ``|0>`` and act as targets. Qubits with nothing to do in
a step receive an explicit idle so that every site sees six operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..stabsim.circuit import Circuit
from .patch import SCHEDULE, CodePatch

STEPS_PER_ROUND = 6


@dataclass
class SyndromeCircuit:
    """A memory experiment: ``rounds`` noisy rounds and one ideal closing round.

    Qubits ``0..n_data-1`` are data qubits in patch order, followed by the
    X-check ancillas and then the Z-check ancillas. Check index ``k`` runs
    over X checks first, then Z checks.
    """

    patch: CodePatch
    circuit: Circuit
    rounds: int
    meas_index: np.ndarray  # (rounds + 1, n_checks) -> measurement record column

    @property
    def n_data(self) -> int:
        return len(self.patch.data)

    @property
    def n_x(self) -> int:
        return len(self.patch.x_checks)

    @property
    def n_checks(self) -> int:
        return len(self.patch.x_checks) + len(self.patch.z_checks)

    @property
    def n_detectors(self) -> int:
        return self.meas_index.size

    def detector_index(self, round_: int, check: int) -> int:
        return round_ * self.n_checks + check

    def detector_basis(self) -> np.ndarray:
        """Boolean mask over detectors: True for X-check detectors."""
        per_round = np.arange(self.n_checks) < self.n_x
        return np.tile(per_round, self.meas_index.shape[0])

    def detectors(self, flips: np.ndarray) -> np.ndarray:
        """Detection events from measurement flips, shape (shots, n_detectors)."""
        m = flips[:, self.meas_index]  # (shots, rounds+1, n_checks)
        det = m.copy()
        det[:, 1:] ^= m[:, :-1]
        return det.reshape(flips.shape[0], -1)

    def observables(self, fx: np.ndarray, fz: np.ndarray) -> np.ndarray:
        """Logical flips from final data frames: column 0 is Z_L, column 1 is X_L."""
        zl = np.fromiter(self.patch.logical_z, dtype=int)
        xl = np.fromiter(self.patch.logical_x, dtype=int)
        return np.stack([fx[:, zl].sum(axis=1) % 2 == 1, fz[:, xl].sum(axis=1) % 2 == 1], axis=1)


def syndrome_circuit(patch: CodePatch, rounds: int | None = None, closing_round: bool = True) -> SyndromeCircuit:
    """Build ``rounds`` (default ``d``) noisy rounds plus an optional ideal closing round."""
    rounds = patch.distance if rounds is None else rounds
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    n_data = len(patch.data)
    checks = list(patch.x_checks) + list(patch.z_checks)
    n_x = len(patch.x_checks)
    anc = {c: n_data + k for k, c in enumerate(checks)}
    n_qubits = n_data + len(checks)
    circuit = Circuit(n_qubits)
    total = rounds + (1 if closing_round else 0)
    meas_index = np.zeros((total, len(checks)), dtype=int)
    n_meas = 0

    for r in range(total):
        noisy = r < rounds
        t0 = STEPS_PER_ROUND * r
        for k, c in enumerate(checks):
            circuit.append("RX" if k < n_x else "RZ", [anc[c]], t0, noisy)
        for q in range(n_data):
            circuit.append("I", [q], t0, noisy)
        for s, (di, dj) in enumerate(SCHEDULE, start=1):
            busy = set()
            for k, c in enumerate(checks):
                site = (c[0] + di, c[1] + dj)
                if not patch.contains(site):
                    continue
                q = patch.data_index[site]
                pair = [anc[c], q] if k < n_x else [q, anc[c]]
                circuit.append("CX", pair, t0 + s, noisy)
                busy.update(pair)
            for q in range(n_qubits):
                if q not in busy:
                    circuit.append("I", [q], t0 + s, noisy)
        for k, c in enumerate(checks):
            circuit.append("MX" if k < n_x else "MZ", [anc[c]], t0 + 5, noisy)
            meas_index[r, k] = n_meas
            n_meas += 1
        for q in range(n_data):
            circuit.append("I", [q], t0 + 5, noisy)

    circuit.validate()
    return SyndromeCircuit(patch, circuit, rounds, meas_index)
