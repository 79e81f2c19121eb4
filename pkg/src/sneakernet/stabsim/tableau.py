"""Stabilizer tableau simulator (Aaronson-Gottesman, with destabilizers).

Rows ``0..n-1`` hold destabilizers and rows ``n..2n-1`` stabilizers, each
a binary symplectic vector ``(x | z)`` with a sign bit ``r``. A row with
``x = z = 1`` on a qubit denotes the Hermitian Pauli ``Y`` there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Op

_PAULI_BITS = {"I": (0, 0), "_": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass
class Pauli:
    """Signed Hermitian Pauli string; ``sign`` is 0 for ``+`` and 1 for ``-``."""

    x: np.ndarray
    z: np.ndarray
    sign: int = 0

    @classmethod
    def from_str(cls, text: str) -> "Pauli":
        sign = 0
        if text[:1] in "+-":
            sign = int(text[0] == "-")
            text = text[1:]
        bits = np.array([_PAULI_BITS[c] for c in text.upper()], dtype=bool).reshape(-1, 2)
        return cls(bits[:, 0].copy(), bits[:, 1].copy(), sign)

    @classmethod
    def on(cls, n: int, terms: dict[int, str], sign: int = 0) -> "Pauli":
        """Build an ``n``-qubit Pauli from a sparse ``{qubit: 'X'|'Y'|'Z'}`` map."""
        x = np.zeros(n, dtype=bool)
        z = np.zeros(n, dtype=bool)
        for q, c in terms.items():
            bx, bz = _PAULI_BITS[c]
            x[q] ^= bool(bx)
            z[q] ^= bool(bz)
        return cls(x, z, sign)

    @property
    def n(self) -> int:
        return len(self.x)

    def commutes(self, other: "Pauli") -> bool:
        return not (np.count_nonzero(self.x & other.z) + np.count_nonzero(self.z & other.x)) % 2

    def __str__(self) -> str:
        chars = np.array(["I", "X", "Z", "Y"])[self.x.astype(int) + 2 * self.z.astype(int)]
        return ("-" if self.sign else "+") + "".join(chars)


def _phase_exponent(x1, z1, x2, z2) -> int:
    """Sum over qubits of the exponent of i picked up by multiplying P1 * P2."""
    x1 = x1.astype(np.int8)
    z1 = z1.astype(np.int8)
    x2 = x2.astype(np.int8)
    z2 = z2.astype(np.int8)
    g = np.where(
        (x1 == 1) & (z1 == 1), z2 - x2,
        np.where((x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1),
                 np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0)))
    return int(g.sum())


class Tableau:
    """Stabilizer state on ``n`` qubits, initialised to ``|0...0>``."""

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        idx = np.arange(n)
        self.x[idx, idx] = True
        self.z[n + idx, idx] = True

    def copy(self) -> "Tableau":
        other = Tableau.__new__(Tableau)
        other.n = self.n
        other.x = self.x.copy()
        other.z = self.z.copy()
        other.r = self.r.copy()
        return other

    # -- gates -------------------------------------------------------------

    def h(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]

    def s_dag(self, q: int) -> None:
        self.s(q)
        self.z_gate(q)

    def x_gate(self, q: int) -> None:
        self.r ^= self.z[:, q]

    def z_gate(self, q: int) -> None:
        self.r ^= self.x[:, q]

    def y_gate(self, q: int) -> None:
        self.r ^= self.x[:, q] ^ self.z[:, q]

    def cx(self, c: int, t: int) -> None:
        self.r ^= self.x[:, c] & self.z[:, t] & ~(self.x[:, t] ^ self.z[:, c])
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cx(a, b)
        self.h(b)

    def apply_pauli(self, pauli: Pauli) -> None:
        """Conjugate the state by a Pauli (sign of the Pauli is irrelevant)."""
        anti = (self.x.astype(np.uint8) @ pauli.z.astype(np.uint8)
                + self.z.astype(np.uint8) @ pauli.x.astype(np.uint8)) % 2
        self.r ^= anti.astype(bool)

    # -- row algebra -------------------------------------------------------

    def _rowsum(self, h: int, i: int) -> None:
        total = 2 * int(self.r[h]) + 2 * int(self.r[i]) + _phase_exponent(
            self.x[i], self.z[i], self.x[h], self.z[h])
        self.r[h] = (total % 4) == 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def _anticommuting_rows(self, pauli: Pauli) -> np.ndarray:
        prod = (self.x & pauli.z).sum(axis=1) + (self.z & pauli.x).sum(axis=1)
        return (prod % 2).astype(bool)

    def _deterministic_sign(self, pauli: Pauli, anti: np.ndarray) -> int:
        """Sign bit of +/-pauli in the stabilizer group (pauli must commute with it)."""
        n = self.n
        sx = np.zeros(n, dtype=bool)
        sz = np.zeros(n, dtype=bool)
        sr = 0
        for i in np.flatnonzero(anti[:n]):
            row = n + i
            total = 2 * sr + 2 * int(self.r[row]) + _phase_exponent(
                self.x[row], self.z[row], sx, sz)
            sr = int((total % 4) == 2)
            sx ^= self.x[row]
            sz ^= self.z[row]
        if not (np.array_equal(sx, pauli.x) and np.array_equal(sz, pauli.z)):
            raise AssertionError("tableau lost rank: operator not generated by stabilizers")
        return sr

    # -- measurement -------------------------------------------------------

    def expectation(self, pauli: Pauli) -> int:
        """Return +1/-1 if ``pauli`` has a definite value, else 0. Does not mutate."""
        anti = self._anticommuting_rows(pauli)
        if anti[self.n:].any():
            return 0
        sr = self._deterministic_sign(pauli, anti)
        return -1 if (sr ^ pauli.sign) else 1

    def measure(self, pauli: Pauli, rng: np.random.Generator) -> int:
        """Projectively measure ``pauli`` and return the outcome +1/-1."""
        n = self.n
        anti = self._anticommuting_rows(pauli)
        stab_anti = np.flatnonzero(anti[n:])
        if len(stab_anti) == 0:
            sr = self._deterministic_sign(pauli, anti)
            return -1 if (sr ^ pauli.sign) else 1
        p = n + stab_anti[0]
        for i in np.flatnonzero(anti):
            if i != p:
                self._rowsum(i, p)
        self.x[p - n] = self.x[p]
        self.z[p - n] = self.z[p]
        self.r[p - n] = self.r[p]
        bit = int(rng.integers(2))
        self.x[p] = pauli.x
        self.z[p] = pauli.z
        self.r[p] = bool(bit)
        return -1 if (bit ^ pauli.sign) else 1

    def measure_z(self, q: int, rng: np.random.Generator) -> int:
        return self.measure(Pauli.on(self.n, {q: "Z"}), rng)

    def measure_x(self, q: int, rng: np.random.Generator) -> int:
        return self.measure(Pauli.on(self.n, {q: "X"}), rng)

    def reset_z(self, q: int, rng: np.random.Generator) -> None:
        if self.measure_z(q, rng) < 0:
            self.x_gate(q)

    def reset_x(self, q: int, rng: np.random.Generator) -> None:
        if self.measure_x(q, rng) < 0:
            self.z_gate(q)

    # -- diagnostics -------------------------------------------------------

    def stabilizers(self) -> list[Pauli]:
        n = self.n
        return [Pauli(self.x[n + i].copy(), self.z[n + i].copy(), int(self.r[n + i])) for i in range(n)]

    def check_invariants(self) -> None:
        """Assert the rows form a full-rank symplectic basis (stabilizers + destabilizers)."""
        xi = self.x.astype(np.int64)
        zi = self.z.astype(np.int64)
        omega = (xi @ zi.T + zi @ xi.T) % 2
        n = self.n
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        idx = np.arange(n)
        expected[idx, n + idx] = 1
        expected[n + idx, idx] = 1
        if not np.array_equal(omega, expected):
            raise AssertionError("tableau rows violate canonical commutation relations")


_GATE_METHODS = {
    "I": None,
    "H": "h",
    "S": "s",
    "S_DAG": "s_dag",
    "X": "x_gate",
    "Y": "y_gate",
    "Z": "z_gate",
    "CX": "cx",
    "CZ": "cz",
}


def apply_clifford(tab: Tableau, op: Op) -> Tableau:
    """Apply a unitary Clifford operation in place and return the tableau."""
    if op.name not in _GATE_METHODS:
        raise ValueError(f"{op.name} is not a unitary Clifford gate")
    for q in op.qubits:
        if not 0 <= q < tab.n:
            raise ValueError(f"qubit {q} out of range")
    method = _GATE_METHODS[op.name]
    if method is not None:
        getattr(tab, method)(*op.qubits)
    return tab


def apply_op(tab: Tableau, op: Op, rng: np.random.Generator) -> int | None:
    """Apply any circuit operation; returns the +1/-1 outcome for measurements."""
    q = op.qubits[0]
    if op.name == "RZ":
        tab.reset_z(q, rng)
    elif op.name == "RX":
        tab.reset_x(q, rng)
    elif op.name == "MZ":
        return tab.measure_z(q, rng)
    elif op.name == "MX":
        return tab.measure_x(q, rng)
    else:
        apply_clifford(tab, op)
    return None


def measure_pauli(tab: Tableau, pauli: Pauli, rng: np.random.Generator) -> tuple[int, Tableau]:
    """Functional form of :meth:`Tableau.measure`: returns (outcome, tableau)."""
    return tab.measure(pauli, rng), tab
