"""Fault tables and detection graphs for a syndrome circuit.

Every noisy operation is a fault location. Because Pauli frames propagate
linearly, the effect of any Pauli at a location is the XOR of the effects
of single ``X`` or ``Z`` kicks on each of its qubits. The table stores those
elementary effects as a sparse matrix with columns
``[detectors | Z_L, X_L | data fx | data fz]``.

X and Z errors never mix under CNOT, init and measurement, so the decoding
problem splits into two independent graphs: Z-check detectors catch X-type
errors (which flip Z_L), and X-check detectors catch Z-type errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pymatching
import scipy.sparse as sp

from ..stabsim.circuit import TWO_QUBIT_GATES
from ..stabsim.frame import NoiseModel, propagate
from .circuits import SyndromeCircuit, syndrome_circuit
from .patch import build_patch

_CHUNK = 8192


@dataclass
class FaultTable:
    sc: SyndromeCircuit
    location_ops: np.ndarray  # op index of each location
    arity: np.ndarray  # 1 or 2 qubits
    offset: np.ndarray  # first elementary row of each location
    effects: sp.csr_matrix  # (n_elementary, n_columns) uint8

    @property
    def n_locations(self) -> int:
        return len(self.location_ops)

    @property
    def n_detectors(self) -> int:
        return self.sc.n_detectors

    @property
    def n_elementary(self) -> int:
        return self.effects.shape[0]

    def elementary(self, loc: int, slot: int, kind: str) -> int:
        """Row of the single ``X`` (kind 'X') or ``Z`` kick on qubit ``slot`` of a location."""
        return int(self.offset[loc]) + 2 * slot + (0 if kind == "X" else 1)

    def column_slices(self) -> dict[str, slice]:
        nd, nq = self.n_detectors, self.sc.n_data
        return {
            "detectors": slice(0, nd),
            "observables": slice(nd, nd + 2),
            "fx": slice(nd + 2, nd + 2 + nq),
            "fz": slice(nd + 2 + nq, nd + 2 + 2 * nq),
        }


def build_fault_table(sc: SyndromeCircuit, noise: NoiseModel | None = None) -> FaultTable:
    """Propagate every elementary kick through the circuit in batches."""
    noise = noise or NoiseModel(p=1.0)
    locs = [i for i, op in enumerate(sc.circuit.ops) if noise.is_location(op)]
    arity = np.array([2 if sc.circuit.ops[i].name in TWO_QUBIT_GATES else 1 for i in locs], dtype=int)
    offset = np.concatenate([[0], np.cumsum(2 * arity)[:-1]]).astype(int)
    n_elem = int(2 * arity.sum())
    # (location, slot, kind) for each elementary row
    owner = np.repeat(np.arange(len(locs)), 2 * arity)
    within = np.arange(n_elem) - offset[owner]
    slot, kind = within // 2, within % 2

    blocks = []
    nq = sc.circuit.n_qubits
    for start in range(0, n_elem, _CHUNK):
        stop = min(start + _CHUNK, n_elem)
        rows = np.arange(stop - start)
        inject: dict[int, tuple] = {}
        for loc in np.unique(owner[start:stop]):
            sel = rows[owner[start:stop] == loc]
            op = sc.circuit.ops[locs[loc]]
            qs = np.array(op.qubits)[slot[start + sel]]
            k = kind[start + sel]
            inject[locs[loc]] = (sel, qs, k == 0, k == 1)
        fx = np.zeros((stop - start, nq), dtype=bool)
        fz = np.zeros((stop - start, nq), dtype=bool)
        flips = propagate(sc.circuit, fx, fz, inject=inject)
        det = sc.detectors(flips)
        obs = sc.observables(fx, fz)
        dense = np.hstack([det, obs, fx[:, : sc.n_data], fz[:, : sc.n_data]])
        blocks.append(sp.csr_matrix(dense.astype(np.uint8)))
    effects = sp.vstack(blocks, format="csr") if blocks else sp.csr_matrix(
        (0, sc.n_detectors + 2 + 2 * sc.n_data), dtype=np.uint8)
    return FaultTable(sc, np.array(locs, dtype=int), arity, offset, effects)


@lru_cache(maxsize=16)
def cached_fault_table(d: int, rounds: int | None = None, idle_noise: bool = True) -> FaultTable:
    sc = syndrome_circuit(build_patch(d), rounds)
    return build_fault_table(sc, NoiseModel(p=1.0, idle_noise=idle_noise))


@dataclass
class DetectionGraph:
    """Matching graph for one error type.

    ``basis`` names the error type corrected: 'X' errors are seen by Z checks.
    Nodes are local detector indices; ``edges[k] = (u, v)`` with ``v = -1`` for
    a boundary edge. ``edge_data[k]`` is the data-qubit error that edge stands for.
    """

    basis: str
    detectors: np.ndarray  # global detector indices of the nodes
    edges: list[tuple[int, int]]
    edge_obs: np.ndarray
    edge_data: np.ndarray
    conflicts: int = 0
    violations: list[tuple[int, ...]] = field(default_factory=list)
    _matching: pymatching.Matching | None = field(default=None, repr=False)
    _edge_lookup: dict | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.detectors)

    @property
    def observable(self) -> int:
        """Column of the logical flip this graph predicts (0: Z_L, 1: X_L)."""
        return 0 if self.basis == "X" else 1

    @property
    def matching(self) -> pymatching.Matching:
        if self._matching is None:
            n = len(self.edges)
            rows, cols = [], []
            for k, (u, v) in enumerate(self.edges):
                rows.append(u)
                cols.append(k)
                if v >= 0:
                    rows.append(v)
                    cols.append(k)
            h = sp.csc_matrix((np.ones(len(rows), dtype=np.uint8), (rows, cols)), shape=(self.n_nodes, n))
            f = sp.csc_matrix(self.edge_obs.reshape(1, -1).astype(np.uint8))
            self._matching = pymatching.Matching(h, faults_matrix=f)
        return self._matching

    def edge_index(self, u: int, v: int) -> int:
        if self._edge_lookup is None:
            self._edge_lookup = {}
            for k, (a, b) in enumerate(self.edges):
                self._edge_lookup[(a, b)] = k
                if b >= 0:
                    self._edge_lookup[(b, a)] = k
        return self._edge_lookup[(u, v)]

    def adjacency(self) -> list[list[int]]:
        """Neighbour lists with the boundary as node ``n_nodes``."""
        b = self.n_nodes
        adj: list[list[int]] = [[] for _ in range(b + 1)]
        for u, v in self.edges:
            w = b if v < 0 else v
            adj[u].append(w)
            adj[w].append(u)
        return adj


def _components(table: FaultTable, kind: str) -> sp.csr_matrix:
    """Effects of every distinct single-type error component at every location."""
    k = 0 if kind == "X" else 1
    rows_a, rows_b = [], []
    for loc in range(table.n_locations):
        a = table.offset[loc] + k
        if table.arity[loc] == 1:
            rows_a.append(a)
            rows_b.append(-1)
        else:
            b = a + 2
            rows_a += [a, b, a]
            rows_b += [-1, -1, b]
    rows_a = np.array(rows_a, dtype=int)
    rows_b = np.array(rows_b, dtype=int)
    comp = table.effects[rows_a]
    pair = rows_b >= 0
    extra = sp.csr_matrix(comp.shape, dtype=np.uint8)
    if pair.any():
        sel = sp.csr_matrix((np.ones(pair.sum(), dtype=np.uint8), (np.flatnonzero(pair), rows_b[pair])),
                            shape=(len(rows_a), table.n_elementary))
        extra = sel @ table.effects
    out = (comp + extra).tocsr()
    out.data %= 2
    out.eliminate_zeros()
    return out


def build_detection_graph(table: FaultTable, basis: str) -> DetectionGraph:
    """Collect every single-fault component of type ``basis`` into a matching graph."""
    if basis not in ("X", "Z"):
        raise ValueError("basis must be 'X' or 'Z'")
    sc = table.sc
    cols = table.column_slices()
    is_x_check = sc.detector_basis()
    node_mask = ~is_x_check if basis == "X" else is_x_check
    detectors = np.flatnonzero(node_mask)
    local = -np.ones(sc.n_detectors, dtype=int)
    local[detectors] = np.arange(len(detectors))
    obs_col = cols["observables"].start + (0 if basis == "X" else 1)
    data_cols = cols["fx"] if basis == "X" else cols["fz"]

    comp = _components(table, basis).tolil()
    seen: dict[tuple[int, int], int] = {}
    edges, obs, data = [], [], []
    conflicts = 0
    violations = []
    for r in range(comp.shape[0]):
        colset = comp.rows[r]
        dets = [local[c] for c in colset if c < sc.n_detectors]
        if any(x < 0 for x in dets):
            raise AssertionError("error component fired a detector of the wrong type")
        flip = obs_col in colset
        if not dets:
            if flip:
                violations.append(tuple(dets))
            continue
        if len(dets) > 2:
            violations.append(tuple(dets))
            continue
        key = (min(dets), max(dets)) if len(dets) == 2 else (dets[0], -1)
        if key in seen:
            conflicts += int(obs[seen[key]] != flip)
            continue
        seen[key] = len(edges)
        edges.append(key)
        obs.append(flip)
        mask = np.zeros(sc.n_data, dtype=bool)
        for c in colset:
            if data_cols.start <= c < data_cols.stop:
                mask[c - data_cols.start] = True
        data.append(mask)
    return DetectionGraph(
        basis=basis,
        detectors=detectors,
        edges=edges,
        edge_obs=np.array(obs, dtype=bool),
        edge_data=np.array(data, dtype=bool).reshape(len(edges), sc.n_data),
        conflicts=conflicts,
        violations=violations,
    )


@lru_cache(maxsize=16)
def cached_graphs(d: int, rounds: int | None = None, idle_noise: bool = True) -> tuple[DetectionGraph, DetectionGraph]:
    table = cached_fault_table(d, rounds, idle_noise)
    return build_detection_graph(table, "X"), build_detection_graph(table, "Z")
