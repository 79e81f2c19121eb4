import numpy as np
import pytest
import scipy.sparse as sp

from sneakernet.surface.decoder import (
    brute_force_weight,
    decode,
    decode_edges,
    matching_weight,
    predict_observable,
    shortest_paths,
)
from sneakernet.surface.graph import cached_fault_table, cached_graphs


def all_single_faults(table) -> sp.csr_matrix:
    """Effect rows for every non-identity Pauli at every fault location."""
    rows, cols = [], []
    r = 0
    for loc in range(table.n_locations):
        base = int(table.offset[loc])
        codes = range(1, 16) if table.arity[loc] == 2 else range(1, 4)
        for code in codes:
            paulis = (code // 4, code % 4) if table.arity[loc] == 2 else (code,)
            for slot, c in enumerate(paulis):
                if c in (1, 2):
                    rows.append(r)
                    cols.append(base + 2 * slot)
                if c in (2, 3):
                    rows.append(r)
                    cols.append(base + 2 * slot + 1)
            r += 1
    sel = sp.csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(r, table.n_elementary))
    out = (sel @ table.effects.astype(np.int32)).tocsr()
    out.data %= 2
    out.eliminate_zeros()
    return out


@pytest.mark.parametrize("d", [3, 5])
def test_every_single_fault_flips_one_or_two_nodes(d):
    gx, gz = cached_graphs(d)
    for g in (gx, gz):
        assert g.violations == []
        assert g.conflicts == 0
        for u, v in g.edges:
            assert 0 <= u < g.n_nodes and v < g.n_nodes


def _failures(table, gx, gz, eff: np.ndarray) -> np.ndarray:
    cols = table.column_slices()
    det = eff[:, cols["detectors"]]
    obs = eff[:, cols["observables"]]
    fail = predict_observable(gx, det[:, gx.detectors]) != obs[:, 0]
    fail |= predict_observable(gz, det[:, gz.detectors]) != obs[:, 1]
    return fail


def test_exhaustive_single_fault_injection_d3():
    table = cached_fault_table(3)
    gx, gz = cached_graphs(3)
    eff = all_single_faults(table).toarray().astype(bool)
    assert eff.shape[0] > 1000
    assert not _failures(table, gx, gz, eff).any()


def test_two_fault_failures_are_logical_chains():
    # any pair the decoder gets wrong leaves a residual equivalent to a logical operator
    table = cached_fault_table(3)
    gx, gz = cached_graphs(3)
    singles = all_single_faults(table)
    rng = np.random.default_rng(4)
    n = singles.shape[0]
    picks = rng.integers(0, n, size=(4000, 2))
    pairs = (singles[picks[:, 0]].astype(np.int32) + singles[picks[:, 1]].astype(np.int32)).toarray() % 2
    pairs = pairs.astype(bool)
    cols = table.column_slices()
    patch = table.sc.patch
    fails = _failures(table, gx, gz, pairs)
    for row, failed in zip(pairs, fails):
        det = row[cols["detectors"]]
        fx, fz = row[cols["fx"]].copy(), row[cols["fz"]].copy()
        fx ^= decode(gx, det).x
        fz ^= decode(gz, det).z
        # correction always restores a trivial syndrome
        assert not ((patch.hz.astype(int) @ fx) % 2).any()
        assert not ((patch.hx.astype(int) @ fz) % 2).any()
        logical = bool(fx[list(patch.logical_z)].sum() % 2) or bool(fz[list(patch.logical_x)].sum() % 2)
        assert logical == failed
    assert fails.any()  # distance 3 does not protect against every pair


def test_no_events_identity():
    gx, _ = cached_graphs(3)
    frame = decode(gx, np.zeros(gx.n_nodes, dtype=bool))
    assert frame.is_identity()
    assert matching_weight(gx, np.zeros(gx.n_nodes, dtype=bool)) == 0.0


def test_adjacent_events_single_edge():
    gx, _ = cached_graphs(3)
    u, v = next(e for e in gx.edges if e[1] >= 0)
    ev = np.zeros(gx.n_nodes, dtype=bool)
    ev[[u, v]] = True
    assert decode_edges(gx, ev) == [gx.edge_index(u, v)]
    assert matching_weight(gx, ev) == 1.0


def _matched_syndrome(g, ev):
    out = np.zeros(g.n_nodes, dtype=bool)
    for k in decode_edges(g, ev):
        u, v = g.edges[k]
        out[u] ^= True
        if v >= 0:
            out[v] ^= True
    return out


@pytest.mark.parametrize("basis", [0, 1])
def test_matching_weight_equals_brute_force(basis):
    g = cached_graphs(3)[basis]
    dist = shortest_paths(g)
    rng = np.random.default_rng(2024 + basis)
    for _ in range(500):
        k = int(rng.integers(1, 11))
        fired = sorted(rng.choice(g.n_nodes, size=k, replace=False).tolist())
        ev = np.zeros(g.n_nodes, dtype=bool)
        ev[fired] = True
        assert matching_weight(g, ev) == pytest.approx(brute_force_weight(dist, fired))
        assert np.array_equal(_matched_syndrome(g, ev), ev)


def test_brute_force_oracle_small_cases():
    # path graph 0-1-2 with boundary at index 3 attached to node 0 and 2
    dist = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], dtype=float)
    assert brute_force_weight(dist, [0, 2]) == 2
    assert brute_force_weight(dist, [1]) == 2
    assert brute_force_weight(dist, [0, 1]) == 1
    assert brute_force_weight(dist, []) == 0
