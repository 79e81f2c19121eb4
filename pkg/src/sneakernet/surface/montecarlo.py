"""Monte Carlo estimation of the per-cycle logical failure rate.

Errors are sampled sparsely: positions in the (shots x locations) grid are
drawn by geometric skipping, each hit gets a uniform non-identity Pauli,
and syndromes follow from one sparse product with the elementary-effect
table. Trials run in fixed blocks, each with its own generator derived from
``(seed, block)``, so counts do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import DomainError
from ..stabsim.frame import _XBIT, _ZBIT, NoiseModel, PauliFrame, sample_frame
from .decoder import decode, predict_observable
from .graph import FaultTable, cached_fault_table, cached_graphs
from .patch import CodePatch

BLOCK = 16384
WILSON_Z = 1.96


def wilson_interval(failures: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = failures / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if failures == 0 else max(0.0, centre - half)
    hi = 1.0 if failures == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class TrialStats:
    d: int
    p: float
    trials: int
    failures: int

    def __post_init__(self):
        if not 0 <= self.failures <= self.trials:
            raise ValueError("failures must lie in [0, trials]")

    @property
    def p_l(self) -> float:
        return self.failures / self.trials

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    @property
    def upper_bound_only(self) -> bool:
        return self.failures == 0

    @property
    def upper(self) -> float:
        return self.interval[1]

    def as_row(self) -> dict:
        lo, hi = self.interval
        return {
            "d": self.d,
            "p": self.p,
            "trials": self.trials,
            "failures": self.failures,
            "p_l": None if self.upper_bound_only else self.p_l,
            "ci_low": None if self.upper_bound_only else lo,
            "ci_high": hi,
        }


def _sample_hits(rng: np.random.Generator, p: float, cells: int) -> np.ndarray:
    """Sorted indices in ``range(cells)`` each selected independently with probability ``p``."""
    if p <= 0 or cells == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(cells, dtype=np.int64)
    out = []
    pos = -1
    batch = max(16, int(cells * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        idx = pos + np.cumsum(gaps)
        if idx[-1] >= cells:
            out.append(idx[idx < cells])
            break
        out.append(idx)
        pos = int(idx[-1])
    return np.concatenate(out)


def sample_error_matrix(table: FaultTable, p: float, shots: int, rng: np.random.Generator) -> sp.csr_matrix:
    """Sparse (shots x n_elementary) indicator of the elementary kicks in each shot."""
    n_loc = table.n_locations
    hits = _sample_hits(rng, p, shots * n_loc)
    shot = hits // n_loc
    loc = hits % n_loc
    two = table.arity[loc] == 2
    code = np.where(two, rng.integers(1, 16, size=len(hits)), rng.integers(1, 4, size=len(hits)))
    a = np.where(two, code // 4, code)
    b = np.where(two, code % 4, 0)
    base = table.offset[loc]
    rows, cols = [], []
    for bits, slot in ((a, 0), (b, 1)):
        for kinds, k in ((_XBIT, 0), (_ZBIT, 1)):
            sel = kinds[bits] & ((slot == 0) | two)
            rows.append(shot[sel])
            cols.append(base[sel] + 2 * slot + k)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return sp.csr_matrix((np.ones(len(rows), dtype=np.uint8), (rows, cols)), shape=(shots, table.n_elementary))


def sample_effects(table: FaultTable, p: float, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Dense (shots x columns) effects of sampled noise, mod 2."""
    errors = sample_error_matrix(table, p, shots, rng)
    out = (errors.astype(np.int32) @ table.effects.astype(np.int32)).toarray() % 2
    return out.astype(bool)


def _count_block(d: int, p: float, shots: int, seed: int, block: int, idle_noise: bool) -> int:
    table = cached_fault_table(d, None, idle_noise)
    gx, gz = cached_graphs(d, None, idle_noise)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))
    errors = sample_error_matrix(table, p, shots, rng)
    cols = table.column_slices()
    keep = np.r_[gx.detectors, gz.detectors, cols["observables"].start, cols["observables"].start + 1]
    eff = (errors.astype(np.int32) @ table.effects[:, keep].astype(np.int32)).tocsr()
    eff.data %= 2
    eff.eliminate_zeros()
    dense = eff.toarray().astype(bool)
    nx = gx.n_nodes
    ev_x, ev_z = dense[:, :nx], dense[:, nx:nx + gz.n_nodes]
    obs = dense[:, -2:]
    fail = predict_observable(gx, ev_x) != obs[:, 0]
    fail |= predict_observable(gz, ev_z) != obs[:, 1]
    return int(fail.sum())


def estimate_failure(d: int, p: float, trials: int, seed: int = 0, workers: int = 1,
                     idle_noise: bool = True) -> TrialStats:
    """Per-cycle failure estimate over ``trials`` cycles of ``d`` noisy rounds."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if not 0 <= p < 1:
        raise DomainError(f"physical error rate must lie in [0, 1), got {p}")
    if d < 2:
        raise DomainError("distance must be at least 2")
    n_blocks = -(-trials // BLOCK)
    sizes = [min(BLOCK, trials - b * BLOCK) for b in range(n_blocks)]
    if p == 0:
        return TrialStats(d, p, trials, 0)
    cached_graphs(d, None, idle_noise)[0].matching  # build shared state before threading
    cached_graphs(d, None, idle_noise)[1].matching
    jobs = [(d, p, n, seed, b, idle_noise) for b, n in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda job: _count_block(*job), jobs))
    else:
        counts = [_count_block(*job) for job in jobs]
    return TrialStats(d, p, trials, sum(counts))


@dataclass
class CycleOutcome:
    failed: bool
    events: np.ndarray
    residual: PauliFrame
    correction: PauliFrame


def run_cycle_trial(patch: CodePatch, p: float, rng: np.random.Generator, rounds: int | None = None,
                    noise: NoiseModel | None = None) -> CycleOutcome:
    """One cycle on the explicit frame simulator: sample, decode, correct, compare logicals.

    Slower than :func:`estimate_failure` but exercises the whole chain and
    exposes the corrected residual frame for inspection.
    """
    noise = noise or NoiseModel(p)
    if patch.rows_d != patch.cols_d:
        raise ValueError("memory cycles are defined on square patches")
    table = cached_fault_table(patch.distance, rounds, noise.idle_noise)
    gx, gz = cached_graphs(patch.distance, rounds, noise.idle_noise)
    sc = table.sc
    sample = sample_frame(sc.circuit, noise, rng, shots=1)
    events = sc.detectors(sample.measurement_flips)[0]
    nd = sc.n_data
    residual = PauliFrame(sample.final.x[0, :nd], sample.final.z[0, :nd])
    correction = decode(gx, events) ^ decode(gz, events)
    total = residual ^ correction
    obs = sc.observables(total.x[None, :], total.z[None, :])[0]
    return CycleOutcome(bool(obs.any()), events, residual, correction)


def crossing_point(low: list[TrialStats], high: list[TrialStats]) -> float | None:
    """Physical error rate where two distance curves cross (log-log interpolation).

    ``low`` and ``high`` hold stats for the smaller and larger distance at
    the same p grid. Returns ``None`` if the ratio never changes sign or a
    point has zero failures on either side.
    """
    pairs = sorted(zip(low, high), key=lambda pair: pair[0].p)
    prev = None
    for a, b in pairs:
        if a.p != b.p:
            raise ValueError("curves must share the p grid")
        if a.failures == 0 or b.failures == 0:
            prev = None
            continue
        g = math.log(b.p_l / a.p_l)
        if prev is not None:
            p0, g0 = prev
            if g0 == 0:
                return p0
            if g0 < 0 <= g or g0 > 0 >= g:
                lp = math.log(p0) + (math.log(a.p) - math.log(p0)) * (0 - g0) / (g - g0)
                return math.exp(lp)
        prev = (a.p, g)
    return None
