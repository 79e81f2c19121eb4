"""Minimum-weight perfect matching decoding, plus a brute-force oracle.

Matching itself is delegated to PyMatching's blossom implementation. The
oracle computes unit-weight shortest paths by BFS and minimises over every
pairing of the fired events (each may also go to the boundary) with a
bitmask DP, which is exact for the small event sets used in testing.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

from ..stabsim.frame import PauliFrame
from .graph import DetectionGraph


def _local_events(graph: DetectionGraph, events: np.ndarray) -> np.ndarray:
    events = np.asarray(events, dtype=bool)
    if events.shape[-1] != graph.n_nodes:
        events = events[..., graph.detectors]
    return events


def decode_edges(graph: DetectionGraph, events: np.ndarray) -> list[int]:
    """Indices of matched edges for one shot of (local or global) events."""
    ev = _local_events(graph, events)
    if not ev.any():
        return []
    pairs = graph.matching.decode_to_edges_array(ev.astype(np.uint8))
    out = []
    for u, v in pairs:
        u, v = int(u), int(v)
        if u < 0:
            u, v = v, u
        out.append(graph.edge_index(u, v))
    return out


def decode(graph: DetectionGraph, events: np.ndarray) -> PauliFrame:
    """Data-qubit correction for one shot: XOR of the matched edges' errors."""
    n_data = graph.edge_data.shape[1]
    mask = np.zeros(n_data, dtype=bool)
    for k in decode_edges(graph, events):
        mask ^= graph.edge_data[k]
    zero = np.zeros(n_data, dtype=bool)
    return PauliFrame(mask, zero) if graph.basis == "X" else PauliFrame(zero, mask)


def matching_weight(graph: DetectionGraph, events: np.ndarray) -> float:
    ev = _local_events(graph, events)
    if not ev.any():
        return 0.0
    _, weight = graph.matching.decode(ev.astype(np.uint8), return_weight=True)
    return float(weight)


def predict_observable(graph: DetectionGraph, events: np.ndarray) -> np.ndarray:
    """Batch prediction of this graph's logical flip, shape (shots,)."""
    ev = _local_events(graph, events)
    if ev.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    pred = graph.matching.decode_batch(ev.astype(np.uint8))
    return pred[:, 0].astype(bool)


def shortest_paths(graph: DetectionGraph) -> np.ndarray:
    """All-pairs hop distances; the boundary is the last index."""
    adj = graph.adjacency()
    n = len(adj)
    dist = np.full((n, n), np.inf)
    for s in range(n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if dist[s, w] == np.inf:
                    dist[s, w] = dist[s, u] + 1
                    queue.append(w)
    return dist


def brute_force_weight(dist: np.ndarray, fired: list[int]) -> float:
    """Minimum total distance over all pairings of ``fired`` with optional boundary matches."""
    b = dist.shape[0] - 1
    k = len(fired)

    @lru_cache(maxsize=None)
    def best(mask: int) -> float:
        if mask == 0:
            return 0.0
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        u = fired[i]
        value = dist[u, b] + best(rest)
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            j_mask &= j_mask - 1
            value = min(value, dist[u, fired[j]] + best(rest & ~(1 << j)))
        return value

    return float(best((1 << k) - 1))
