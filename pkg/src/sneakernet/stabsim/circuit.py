"""Timed Clifford circuits and their plain-text line format.

A circuit is an ordered list of operations, each tagged with the time step
it occupies. The text format carries one operation per line::

    qubits 5
    0 RZ 1
    1 CX 0 1
    5 MZ 1 ideal

Blank lines and ``#`` comments are ignored. The trailing ``ideal`` marker
excludes an operation from noise insertion.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

SINGLE_QUBIT_GATES = {"I", "H", "S", "S_DAG", "X", "Y", "Z"}
TWO_QUBIT_GATES = {"CX", "CZ"}
RESETS = {"RZ", "RX"}
MEASUREMENTS = {"MZ", "MX"}
ALL_OPS = SINGLE_QUBIT_GATES | TWO_QUBIT_GATES | RESETS | MEASUREMENTS


@dataclass(frozen=True)
class Op:
    name: str
    qubits: tuple[int, ...]
    step: int
    noisy: bool = True

    def __post_init__(self):
        if self.name not in ALL_OPS:
            raise ValueError(f"unsupported operation {self.name!r}")
        arity = 2 if self.name in TWO_QUBIT_GATES else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.name} on repeated qubit {self.qubits[0]}")


@dataclass
class Circuit:
    n_qubits: int
    ops: list[Op] = field(default_factory=list)

    def append(self, name: str, qubits: Iterable[int], step: int, noisy: bool = True) -> Op:
        op = Op(name, tuple(int(q) for q in qubits), int(step), noisy)
        for q in op.qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} out of range for {self.n_qubits} qubits")
        self.ops.append(op)
        return op

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self) -> Iterator[Op]:
        return iter(self.ops)

    @property
    def n_steps(self) -> int:
        return 1 + max((op.step for op in self.ops), default=-1)

    @property
    def n_measurements(self) -> int:
        return sum(op.name in MEASUREMENTS for op in self.ops)

    def by_step(self) -> list[list[Op]]:
        """Operations grouped by time step, preserving insertion order."""
        steps: dict[int, list[Op]] = defaultdict(list)
        for op in self.ops:
            steps[op.step].append(op)
        return [steps[s] for s in sorted(steps)]

    def validate(self) -> None:
        """Raise ``ValueError`` if a qubit is used twice in one step or steps go backwards."""
        seen: dict[int, set[int]] = defaultdict(set)
        last_step = 0
        for op in self.ops:
            if op.step < last_step:
                raise ValueError(f"operation {op} is out of time order")
            last_step = op.step
            for q in op.qubits:
                if q in seen[op.step]:
                    raise ValueError(f"qubit {q} used twice in step {op.step}")
                seen[op.step].add(q)

    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"]
        for op in self.ops:
            qs = " ".join(str(q) for q in op.qubits)
            tail = "" if op.noisy else " ideal"
            lines.append(f"{op.step} {op.name} {qs}{tail}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        circuit = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "qubits":
                    circuit = cls(int(parts[1]))
                    continue
                if circuit is None:
                    raise ValueError("missing 'qubits N' header")
                noisy = True
                if parts[-1] == "ideal":
                    noisy = False
                    parts = parts[:-1]
                circuit.append(parts[1], [int(q) for q in parts[2:]], int(parts[0]), noisy)
            except (ValueError, IndexError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
        if circuit is None:
            raise ValueError("empty circuit text")
        return circuit
