"""Memorystick capacity and shipping bandwidth arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .codemodel import DAY, DEFAULT_FIT, FailureFit, LinkTarget, MemorySpec, PlatformSpec, select_distance
from .errors import DomainError

TEU_INTERNAL_VOLUME = 40.0  # m^3


@dataclass(frozen=True)
class ShipSpec:
    teu_count: int = 10_000
    qubit_volume_per_teu: float = 1.0  # m^3
    one_way_transit: float = 20 * DAY

    def __post_init__(self):
        if self.teu_count < 0:
            raise DomainError("teu_count must be non-negative")
        if not 0 < self.qubit_volume_per_teu <= TEU_INTERNAL_VOLUME:
            raise DomainError(f"qubit volume per TEU must lie in (0, {TEU_INTERNAL_VOLUME}] m^3")
        if not self.one_way_transit > 0:
            raise DomainError("transit time must be positive")

    @property
    def round_trip(self) -> float:
        return 2 * self.one_way_transit


@dataclass(frozen=True)
class StickSpec:
    platform: PlatformSpec
    memory: MemorySpec
    unit_volume: float
    capacity_per_m3: float

    @property
    def ebits_per_m3(self) -> int:
        return math.floor(self.capacity_per_m3)


def stick_capacity(memory: MemorySpec, platform: PlatformSpec) -> float:
    """Logical qubits per cubic metre: one patch occupies a cube of side sqrt(N) * pitch."""
    return 1.0 / (math.sqrt(memory.qubit_count) * platform.pitch) ** 3


def make_stick(memory: MemorySpec, platform: PlatformSpec) -> StickSpec:
    side = math.sqrt(memory.qubit_count) * platform.pitch
    return StickSpec(platform, memory, side ** 3, stick_capacity(memory, platform))


def container_ebits(capacity_per_m3: float, ship: ShipSpec = ShipSpec()) -> int:
    """Whole Ebits stored in one container's quantum volume."""
    return math.floor(capacity_per_m3 * ship.qubit_volume_per_teu)


def effective_bandwidth(capacity_per_container: float, ship: ShipSpec = ShipSpec()) -> float:
    """Ebits delivered per second by one ship in steady state (Hz)."""
    return capacity_per_container * ship.teu_count / ship.one_way_transit


def stick_entangle_time(capacity: float, bell_time: float, parallel_width: int = 1, slowdown: float = 1.0) -> float:
    """Time to entangle or consume a whole stick through one interface."""
    if parallel_width < 1:
        raise DomainError("parallel width must be at least 1")
    if slowdown < 1:
        raise DomainError("slowdown must be at least 1")
    return capacity * bell_time * slowdown / parallel_width


_PREFIXES = ((1e12, "T"), (1e9, "G"), (1e6, "M"), (1e3, "K"), (1.0, ""))


def format_si(value: float, unit: str = "Eb", sig: int = 3) -> str:
    """``12665 -> '12.7KEb'``: prefix scaling, ``sig`` significant figures, trailing zeros dropped."""
    if value == 0:
        return f"0{unit}"
    value = round_sig(value, sig)
    scale, prefix = next(((s, p) for s, p in _PREFIXES if abs(value) >= s), (1.0, ""))
    scaled = value / scale
    digits = max(0, sig - 1 - int(math.floor(math.log10(abs(scaled)))))
    text = f"{round(scaled, digits):.{digits}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return f"{text}{prefix}{unit}"


def round_sig(value: float, sig: int = 2) -> float:
    if value == 0 or not math.isfinite(value):
        return value
    return float(f"{value:.{sig - 1}e}")


def agrees(a: float, b: float, sig: int = 2) -> bool:
    return round_sig(a, sig) == round_sig(b, sig)


@dataclass(frozen=True)
class ReferenceRow:
    distance: int
    qubit_count: int
    capacity: float
    capacity_label: str
    bandwidth: float


# Expected figures for the bundled platforms, used only to annotate agreement.
REFERENCE_TABLE1: dict[str, ReferenceRow] = {
    "NV- (optical)": ReferenceRow(33, 4225, 12.7e3, "12.7KEb", 7.3e1),
    "trapped ions": ReferenceRow(11, 441, 32e3, "32KEb", 1.9e2),
    "transmons": ReferenceRow(13, 625, 2.4e6, "2.4MEb", 1.4e4),
    "quantum dots": ReferenceRow(36, 5041, 2.8e12, "2.8TEb", 1.6e10),
    "NV-": ReferenceRow(29, 3249, 200e12, "200TEb", 1.6e12),
    "silicon": ReferenceRow(36, 5041, 350e12, "350TEb", 2.0e12),
}


@dataclass
class Table1Row:
    name: str
    platform: PlatformSpec
    memory: MemorySpec | None = None
    capacity: float = math.nan
    ebits: int = 0
    bandwidth: float = math.nan
    error: str | None = None
    reference: ReferenceRow | None = None
    matches: dict[str, bool] = field(default_factory=dict)

    @property
    def capacity_label(self) -> str:
        return format_si(self.capacity) if self.memory else ""

    @property
    def all_match(self) -> bool | None:
        return None if not self.matches else all(self.matches.values())


def build_table1(catalog: Sequence[PlatformSpec], target: LinkTarget = LinkTarget(), ship: ShipSpec = ShipSpec(),
                 fit: FailureFit = DEFAULT_FIT) -> list[Table1Row]:
    """Distance, qubit count, stick capacity and bandwidth for each platform.

    Infeasible platforms produce a row carrying ``error`` instead of raising.
    """
    if not catalog:
        raise DomainError("catalog is empty")
    rows = []
    for platform in catalog:
        row = Table1Row(platform.name, platform, reference=REFERENCE_TABLE1.get(platform.name))
        try:
            row.memory = select_distance(platform, target, fit)
        except DomainError as exc:
            row.error = str(exc)
            rows.append(row)
            continue
        row.capacity = stick_capacity(row.memory, platform)
        row.ebits = container_ebits(row.capacity, ship)
        row.bandwidth = effective_bandwidth(row.ebits, ship)
        ref = row.reference
        if ref is not None:
            row.matches = {
                "distance": (row.memory.distance, row.memory.qubit_count) == (ref.distance, ref.qubit_count),
                "capacity": agrees(row.capacity, ref.capacity),
                "bandwidth": agrees(row.bandwidth, ref.bandwidth),
            }
        rows.append(row)
    return rows
