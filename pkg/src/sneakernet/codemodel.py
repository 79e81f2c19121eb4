"""Closed-form planar-code memory model.

A distance-``d`` memory uses ``N = (2d - 1)**2`` physical qubits and one
error-correction cycle (``d`` rounds of six gate steps) lasts ``6 t d``. The
per-cycle failure follows the power law ``alpha * (beta * p) ** ((d + 1) / 2)``
and the memory time is the number of cycles that fit inside the allowed
link infidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError

DAY = 86_400.0
YEAR = 365.0 * DAY


@dataclass(frozen=True)
class PlatformSpec:
    name: str
    pitch: float  # m
    gate_time: float  # s
    error_rate: float

    def __post_init__(self):
        if not self.pitch > 0:
            raise DomainError(f"{self.name}: pitch must be positive")
        if not self.gate_time > 0:
            raise DomainError(f"{self.name}: gate time must be positive")
        if not 0 <= self.error_rate < 1:
            raise DomainError(f"{self.name}: error rate must lie in [0, 1)")


@dataclass(frozen=True)
class FailureFit:
    alpha: float = 0.3
    beta: float = 70.0
    valid_p_max: float | None = field(default=None)

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError("fit constants must be positive")
        if self.valid_p_max is None:
            object.__setattr__(self, "valid_p_max", 0.5 / self.beta)

    def reliable(self, p: float) -> bool:
        """False once ``beta * p`` leaves the low-p asymptotic regime."""
        return self.beta * p < 0.5


DEFAULT_FIT = FailureFit()


@dataclass(frozen=True)
class LinkTarget:
    link_infidelity: float = 1e-10
    storage_time: float = 40 * DAY

    def __post_init__(self):
        if not 0 < self.link_infidelity < 1:
            raise DomainError("link infidelity must lie in (0, 1)")
        if not self.storage_time > 0:
            raise DomainError("storage time must be positive")


@dataclass(frozen=True)
class MemorySpec:
    distance: int
    qubit_count: int
    cycle_time: float
    per_cycle_failure: float
    memory_time: float = math.nan


def qubit_count(d: int) -> int:
    if d < 1:
        raise DomainError(f"invalid code distance {d}")
    return (2 * d - 1) ** 2


def distance_for_qubits(n: int) -> int | None:
    """Inverse of :func:`qubit_count`, or ``None`` if ``n`` is not an odd square."""
    root = math.isqrt(n)
    if n < 1 or root * root != n or root % 2 == 0:
        return None
    return (root + 1) // 2


def cycle_time(d: int, t: float) -> float:
    return 6.0 * t * d


def per_cycle_failure(p: float, d: float, fit: FailureFit = DEFAULT_FIT) -> float:
    if not 0 <= p < 1:
        raise DomainError(f"physical error rate must lie in [0, 1), got {p}")
    if p == 0:
        return 0.0
    return min(1.0, fit.alpha * (fit.beta * p) ** ((d + 1) / 2))


def memory_time(p: float, d: int, t: float, p_link: float, fit: FailureFit = DEFAULT_FIT) -> float:
    """Storage time before the accumulated failure reaches ``p_link``.

    Returns ``math.inf`` when the per-cycle failure is zero.
    """
    if not 0 < p_link < 1:
        raise DomainError("link infidelity must lie in (0, 1)")
    p_l = per_cycle_failure(p, d, fit)
    if p_l == 0:
        return math.inf
    if p_l >= 1:
        return 0.0
    return math.log1p(-p_link) * cycle_time(d, t) / math.log1p(-p_l)


def memory_time_approx(p: float, n: int, t: float, p_link: float, fit: FailureFit = DEFAULT_FIT) -> float:
    """Small-failure approximation written in terms of the qubit count."""
    root = math.sqrt(n)
    return 6 * t * (root + 1) * p_link / (2 * fit.alpha) * (fit.beta * p) ** (-(root + 3) / 4)


def select_distance(platform: PlatformSpec, target: LinkTarget = LinkTarget(), fit: FailureFit = DEFAULT_FIT,
                    d_max: int = 1000) -> MemorySpec:
    """Smallest ``d >= 2`` whose memory time meets the storage target."""
    if platform.error_rate * fit.beta >= 1:
        raise DomainError(f"{platform.name}: error rate {platform.error_rate} is above the fit regime 1/beta")
    for d in range(2, d_max + 1):
        tm = memory_time(platform.error_rate, d, platform.gate_time, target.link_infidelity, fit)
        if tm >= target.storage_time:
            return MemorySpec(d, qubit_count(d), cycle_time(d, platform.gate_time),
                              per_cycle_failure(platform.error_rate, d, fit), tm)
    raise InfeasibleError(f"{platform.name}: no distance up to {d_max} reaches the storage target")


@dataclass
class MemoryGrid:
    qubit_counts: list[int]  # rows kept
    distances: list[int]
    link_infidelities: list[float]  # columns
    seconds: np.ndarray  # (rows, columns)
    skipped: list[int]
    contour: list[tuple[float, float]]  # (N, P_link) at the contour level
    level: float = YEAR


def _contour(n_values: list[int], p_links: list[float], seconds: np.ndarray, level: float):
    """Per column, the N at which memory time first crosses ``level`` (log-linear in time)."""
    points = []
    for j, pl in enumerate(p_links):
        col = seconds[:, j]
        for i in range(1, len(col)):
            a, b = col[i - 1], col[i]
            if a < level <= b:
                if math.isinf(b) or a <= 0:
                    n = float(n_values[i])
                else:
                    frac = (math.log(level) - math.log(a)) / (math.log(b) - math.log(a))
                    n = n_values[i - 1] + frac * (n_values[i] - n_values[i - 1])
                points.append((n, pl))
                break
    return points


def memory_time_grid(n_values, p_link_values, t: float, p: float, fit: FailureFit = DEFAULT_FIT,
                     snap: bool = False, level: float = YEAR) -> MemoryGrid:
    """Memory time over (N, P_link) with the ``level`` contour (default one year).

    N values that are not ``(2d - 1)**2`` are skipped and reported, or moved
    to the nearest valid count when ``snap`` is set.
    """
    n_values = [int(n) for n in n_values]
    p_links = [float(x) for x in p_link_values]
    if not n_values or not p_links:
        raise DomainError("grid ranges must be nonempty")
    if any(b <= a for a, b in zip(n_values, n_values[1:])) or any(b <= a for a, b in zip(p_links, p_links[1:])):
        raise DomainError("grid ranges must be strictly increasing")
    kept, dists, skipped = [], [], []
    for n in n_values:
        d = distance_for_qubits(n)
        if d is None and snap:
            d = max(1, round((math.sqrt(n) + 1) / 2))
            n = qubit_count(d)
        if d is None:
            skipped.append(n)
            continue
        if kept and n == kept[-1]:
            continue
        kept.append(n)
        dists.append(d)
    seconds = np.array([[memory_time(p, d, t, pl, fit) for pl in p_links] for d in dists], dtype=float)
    seconds = seconds.reshape(len(dists), len(p_links))
    contour = _contour(kept, p_links, seconds, level) if p > 0 else []
    return MemoryGrid(kept, dists, p_links, seconds, skipped, contour, level)
