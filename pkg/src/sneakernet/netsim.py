"""Discrete-event simulation of the seven-container shipping protocol.

Each slot on the ship belongs to a group of seven containers: two stationary
units at each terminal and three mobile units. A mobile unit entangles with
a free stationary unit at its terminal, sails, is consumed at the far
terminal (which frees its stationary partner back home), then re-entangles
with a local stationary unit and waits for the next ship.

Every mobile-unit job (entangle or consume) takes one interface lane for
``stick_entangle_time``; each terminal has ``online`` lanes and a FIFO job
queue. The ship departs as soon as it has loaded whatever is ready, so a
one-way trip always takes ``one_way_transit``. Events are ordered by
``(time, sequence)``, which makes runs fully deterministic.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import math
import warnings
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .catalog import default_catalog
from .codemodel import DAY, DEFAULT_FIT, FailureFit, LinkTarget, PlatformSpec, select_distance
from .errors import DeadlockError, DomainError
from .logistics import ShipSpec, container_ebits, effective_bandwidth, stick_capacity, stick_entangle_time
from .surgery import bell_pair_time

TERMINALS = ("A", "B")
ROLES = ("S_A1", "S_A2", "S_B1", "S_B2", "M1", "M2", "M3")
FULL_BANDWIDTH = 0.99


class SteadyStateWarning(UserWarning):
    """A measurement window starts before the fleet reaches steady state."""


def _other(terminal: str) -> str:
    return "B" if terminal == "A" else "A"


@dataclass(frozen=True)
class ScenarioConfig:
    platform: PlatformSpec = field(default_factory=lambda: default_catalog()[0])
    ship: ShipSpec = ShipSpec()
    parallel_width: int = 1
    slowdown: float = 1.0
    online: int = 1
    horizon: float = 200 * DAY
    loss_probability: float = 0.0
    seed: int = 0
    warm_start: bool = True
    capacity: int | None = None  # Ebits per container; derived from the platform when None
    target: LinkTarget = LinkTarget()
    fit: FailureFit = DEFAULT_FIT

    def __post_init__(self):
        if self.parallel_width < 1 or self.online < 1:
            raise DomainError("parallel width and online lanes must be at least 1")
        if self.slowdown < 1:
            raise DomainError("slowdown must be at least 1")
        if not 0 <= self.loss_probability <= 1:
            raise DomainError("loss probability must lie in [0, 1]")
        if self.capacity is not None and self.capacity < 0:
            raise DomainError("capacity must be non-negative")
        if self.horizon < 3 * self.ship.round_trip:
            raise DomainError("horizon must cover at least three round trips")

    @property
    def groups(self) -> int:
        return self.ship.teu_count

    @property
    def memory(self):
        return select_distance(self.platform, self.target, self.fit)

    @property
    def ebits(self) -> int:
        if self.capacity is not None:
            return self.capacity
        return container_ebits(stick_capacity(self.memory, self.platform), self.ship)

    @property
    def bell_time(self) -> float:
        return bell_pair_time(self.memory.distance, self.platform.gate_time)

    @property
    def job_time(self) -> float:
        return stick_entangle_time(self.ebits, self.bell_time, self.parallel_width, self.slowdown)

    @property
    def analytic_bandwidth(self) -> float:
        return effective_bandwidth(self.ebits, self.ship)

    def to_dict(self) -> dict:
        return {
            "platform": asdict(self.platform),
            "teu_count": self.ship.teu_count,
            "qubit_volume_per_teu": self.ship.qubit_volume_per_teu,
            "one_way_days": self.ship.one_way_transit / DAY,
            "parallel_width": self.parallel_width,
            "slowdown": self.slowdown,
            "online": self.online,
            "horizon_days": self.horizon / DAY,
            "loss_probability": self.loss_probability,
            "seed": self.seed,
            "warm_start": self.warm_start,
            "capacity": self.capacity,
            "link_infidelity": self.target.link_infidelity,
            "storage_days": self.target.storage_time / DAY,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {"platform", "teu_count", "qubit_volume_per_teu", "one_way_days", "parallel_width", "slowdown",
                 "online", "horizon_days", "loss_probability", "seed", "warm_start", "capacity",
                 "link_infidelity", "storage_days"}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown scenario keys: {', '.join(sorted(unknown))}")
        plat = data.get("platform")
        if plat is None:
            platform = default_catalog()[0]
        elif isinstance(plat, str):
            matches = [p for p in default_catalog() if p.name == plat]
            if not matches:
                raise DomainError(f"unknown platform {plat!r}")
            platform = matches[0]
        else:
            platform = PlatformSpec(plat["name"], float(plat["pitch"]), float(plat["gate_time"]),
                                    float(plat["error_rate"]))
        ship = ShipSpec(int(data.get("teu_count", 10_000)), float(data.get("qubit_volume_per_teu", 1.0)),
                        float(data.get("one_way_days", 20)) * DAY)
        target = LinkTarget(float(data.get("link_infidelity", 1e-10)), float(data.get("storage_days", 40)) * DAY)
        cap = data.get("capacity")
        return cls(platform, ship, int(data.get("parallel_width", 1)), float(data.get("slowdown", 1.0)),
                   int(data.get("online", 1)), float(data.get("horizon_days", 200)) * DAY,
                   float(data.get("loss_probability", 0.0)), int(data.get("seed", 0)),
                   bool(data.get("warm_start", True)), None if cap is None else int(cap), target)


class Container:
    __slots__ = ("id", "name", "role", "location", "phase", "ebits", "partner", "stored_at")

    def __init__(self, cid: int, name: str, role: str, location: str):
        self.id = cid
        self.name = name
        self.role = role  # stationary-A, stationary-B or mobile
        self.location = location
        self.phase = "idle"
        self.ebits = 0
        self.partner = -1
        self.stored_at = math.nan


@dataclass
class Terminal:
    name: str
    lanes: int
    busy: int = 0
    jobs: deque = field(default_factory=deque)  # (kind, mobile id, stationary id or -1)
    free_stationary: deque = field(default_factory=deque)
    waiting: deque = field(default_factory=deque)  # mobiles needing a stationary partner
    ready: deque = field(default_factory=deque)  # entangled mobiles awaiting the ship
    busy_time: float = 0.0
    max_ready: int = 0


@dataclass
class Counters:
    created: int = 0
    consumed: int = 0
    stored: int = 0
    in_transit: int = 0
    discarded: int = 0

    def balanced(self) -> bool:
        return self.created == self.consumed + self.stored + self.in_transit + self.discarded


class FleetState:
    """Containers, terminals, ship and the event queue."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.ebits = config.ebits
        self.job_time = config.job_time
        self.one_way = config.ship.one_way_transit
        self.containers: list[Container] = []
        self.terminals = {t: Terminal(t, config.online) for t in TERMINALS}
        self.ship_location = "A"
        self.cargo: list[int] = []
        self.ship_waiting = False
        self.heap: list = []
        self.seq = 0
        self.clock = 0.0
        self.counters = Counters()
        self.log: list[tuple[float, str, str, str, int]] = []
        self.consumptions: list[tuple[float, float, int]] = []
        self.first_arrival: float | None = None
        self.first_departure: float | None = None
        self.max_age = 0.0
        self.rng = np.random.default_rng(config.seed)
        self.deadlock: str | None = None

    # -- bookkeeping -------------------------------------------------------

    def push(self, time: float, kind: str, *args) -> None:
        heapq.heappush(self.heap, (time, self.seq, kind, args))
        self.seq += 1

    def record(self, event: str, container: Container | None, location: str, ebits: int) -> None:
        self.log.append((self.clock, event, container.name if container else "ship", location, ebits))

    def add(self, name: str, role: str, location: str) -> Container:
        c = Container(len(self.containers), name, role, location)
        self.containers.append(c)
        return c

    def check_balance(self) -> None:
        if not self.counters.balanced():
            raise AssertionError(f"Ebit conservation violated at t={self.clock}: {self.counters}")

    # -- jobs --------------------------------------------------------------

    def enqueue(self, terminal: str, kind: str, mobile: int, stationary: int = -1) -> None:
        self.terminals[terminal].jobs.append((kind, mobile, stationary))
        self.dispatch(terminal)

    def dispatch(self, terminal: str) -> None:
        term = self.terminals[terminal]
        while term.busy < term.lanes and term.jobs:
            kind, m, s = term.jobs.popleft()
            term.busy += 1
            mob = self.containers[m]
            mob.phase = "entangling" if kind == "entangle" else "consuming"
            if s >= 0:
                self.containers[s].phase = "entangling"
            self.record(f"{kind}-start", mob, terminal, mob.ebits)
            term.busy_time += self.job_time
            self.push(self.clock + self.job_time, f"{kind}-complete", terminal, m, s)

    def pair_up(self, terminal: str) -> None:
        term = self.terminals[terminal]
        while term.waiting and term.free_stationary:
            m = term.waiting.popleft()
            s = term.free_stationary.popleft()
            self.containers[m].partner = s
            self.containers[s].partner = m
            self.enqueue(terminal, "entangle", m, s)

    def need_partner(self, terminal: str, m: int) -> None:
        self.terminals[terminal].waiting.append(m)
        self.pair_up(terminal)

    def free_stationary(self, s: int) -> None:
        st = self.containers[s]
        st.ebits = 0
        st.partner = -1
        st.phase = "idle"
        self.terminals[st.location].free_stationary.append(s)
        self.pair_up(st.location)

    # -- event handlers ----------------------------------------------------

    def on_entangle_complete(self, terminal: str, m: int, s: int) -> None:
        term = self.terminals[terminal]
        term.busy -= 1
        mob, st = self.containers[m], self.containers[s]
        if self.ebits > 0:
            mob.ebits = st.ebits = self.ebits
            mob.phase = st.phase = "entangled-stored"
            mob.stored_at = self.clock
            self.counters.created += self.ebits
            self.counters.stored += self.ebits
            term.ready.append(m)
            term.max_ready = max(term.max_ready, len(term.ready))
        else:
            # nothing to store: release both units
            mob.phase, mob.partner = "idle", -1
            st.phase, st.partner = "idle", -1
            term.free_stationary.append(s)
        self.record("entangle-complete", mob, terminal, mob.ebits)
        self.check_balance()
        self.dispatch(terminal)
        if self.ship_waiting and self.ship_location == terminal:
            self.try_depart()

    def on_consume_complete(self, terminal: str, m: int, s: int) -> None:
        term = self.terminals[terminal]
        term.busy -= 1
        mob = self.containers[m]
        n = mob.ebits
        self.counters.consumed += n
        self.counters.stored -= n
        self.consumptions.append((self.clock - self.job_time, self.clock, n))
        self.max_age = max(self.max_age, self.clock - mob.stored_at)
        mob.ebits = 0
        mob.phase = "idle"
        partner = mob.partner
        mob.partner = -1
        self.record("consume-complete", mob, terminal, n)
        self.check_balance()
        if partner >= 0:
            self.free_stationary(partner)
        self.dispatch(terminal)
        self.need_partner(terminal, m)

    def on_ship_arrive(self, terminal: str) -> None:
        self.ship_location = terminal
        if self.first_arrival is None:
            self.first_arrival = self.clock
        self.record("ship-arrive", None, terminal, sum(self.containers[c].ebits for c in self.cargo))
        cargo, self.cargo = self.cargo, []
        q = self.config.loss_probability
        for c in cargo:
            mob = self.containers[c]
            self.counters.in_transit -= mob.ebits
            if q > 0 and self.rng.random() < q:
                self.counters.discarded += mob.ebits
                self.record("lost", mob, "sea", mob.ebits)
                mob.location, mob.phase, mob.ebits = "lost", "idle", 0
                partner, mob.partner = mob.partner, -1
                if partner >= 0:
                    self.free_stationary(partner)
                continue
            mob.location = terminal
            mob.phase = "entangled-stored"
            self.counters.stored += mob.ebits
            self.record("unload", mob, terminal, mob.ebits)
            self.enqueue(terminal, "consume", c, -1)
        self.check_balance()
        self.try_depart()

    def try_depart(self) -> None:
        term = self.terminals[self.ship_location]
        teu = self.config.ship.teu_count
        if not self.config.warm_start and self.first_departure is None and len(term.ready) < teu:
            self.ship_waiting = True
            return
        self.ship_waiting = False
        while term.ready and len(self.cargo) < teu:
            c = term.ready.popleft()
            mob = self.containers[c]
            if mob.ebits <= 0:
                raise AssertionError("attempted to ship an unentangled unit")
            mob.location, mob.phase = "sea", "in-transit"
            self.cargo.append(c)
            self.counters.stored -= mob.ebits
            self.counters.in_transit += mob.ebits
            self.record("load", mob, self.ship_location, mob.ebits)
        for c in self.cargo:
            if self.containers[c].ebits <= 0:
                raise AssertionError("ship-cargo invariant violated")
        self.check_balance()
        if self.first_departure is None:
            self.first_departure = self.clock
        dest = _other(self.ship_location)
        self.record("ship-depart", None, self.ship_location, sum(self.containers[c].ebits for c in self.cargo))
        self.ship_location = "sea"
        self.push(self.clock + self.one_way, "ship-arrive", dest)


def init_fleet(config: ScenarioConfig) -> FleetState:
    """Seven containers per ship slot, placed for a warm or cold start."""
    state = FleetState(config)
    g = config.groups
    cap = state.ebits
    sa1, sa2, sb1, sb2, m1, m2, m3 = ([] for _ in range(7))
    for k in range(g):
        sa1.append(state.add(f"g{k}.S_A1", "stationary-A", "A"))
        sa2.append(state.add(f"g{k}.S_A2", "stationary-A", "A"))
        sb1.append(state.add(f"g{k}.S_B1", "stationary-B", "B"))
        sb2.append(state.add(f"g{k}.S_B2", "stationary-B", "B"))
        m1.append(state.add(f"g{k}.M1", "mobile", "A"))
        m2.append(state.add(f"g{k}.M2", "mobile", "A"))
        m3.append(state.add(f"g{k}.M3", "mobile", "A"))
    a, b = state.terminals["A"], state.terminals["B"]

    if config.warm_start and cap > 0:
        half = config.ship.one_way_transit / 2
        for k in range(g):
            # at sea towards B, entangled with S_A1
            mob, st = m1[k], sa1[k]
            mob.location, mob.phase, mob.ebits, mob.partner, mob.stored_at = "sea", "in-transit", cap, st.id, -half
            st.phase, st.ebits, st.partner = "entangled-stored", cap, mob.id
            state.cargo.append(mob.id)
            state.counters.created += cap
            state.counters.in_transit += cap
            # ready at B, entangled with S_B1
            mob, st = m2[k], sb1[k]
            mob.location, mob.phase, mob.ebits, mob.partner, mob.stored_at = "B", "entangled-stored", cap, st.id, 0.0
            st.phase, st.ebits, st.partner = "entangled-stored", cap, mob.id
            b.ready.append(mob.id)
            state.counters.created += cap
            state.counters.stored += cap
            a.free_stationary.append(sa2[k].id)
            b.free_stationary.append(sb2[k].id)
            a.waiting.append(m3[k].id)
        b.max_ready = len(b.ready)
        state.ship_location = "sea"
        state.first_departure = -half
        state.push(half, "ship-arrive", "B")
        state.pair_up("A")
    else:
        for k in range(g):
            a.free_stationary.extend([sa1[k].id, sa2[k].id])
            b.free_stationary.extend([sb1[k].id, sb2[k].id])
        for group in (m1, m2, m3):
            a.waiting.extend(c.id for c in group)
        if config.warm_start:
            # zero capacity: the ship still sails its schedule, empty
            state.ship_location = "sea"
            state.first_departure = -config.ship.one_way_transit / 2
            state.push(config.ship.one_way_transit / 2, "ship-arrive", "B")
        else:
            state.try_depart()
        state.pair_up("A")
    state.check_balance()
    return state


@dataclass
class SimReport:
    config: ScenarioConfig
    analytic_bandwidth: float
    realized_bandwidth: float
    window: tuple[float, float]
    steady_start: float
    counters: Counters
    utilization: dict[str, float]
    max_buffer: dict[str, int]
    max_storage_age: float
    first_departure: float | None
    events: int
    digest: str
    deadlock: str | None = None
    consumptions: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)), repr=False)
    log: list = field(default_factory=list, repr=False)

    @property
    def fraction(self) -> float:
        if self.analytic_bandwidth == 0:
            return 1.0 if self.realized_bandwidth == 0 else math.inf
        return self.realized_bandwidth / self.analytic_bandwidth

    def summary(self) -> dict:
        return {
            "analytic_bandwidth_hz": self.analytic_bandwidth,
            "realized_bandwidth_hz": self.realized_bandwidth,
            "fraction_of_analytic": self.fraction,
            "window_days": [self.window[0] / DAY, self.window[1] / DAY],
            "steady_start_days": self.steady_start / DAY,
            "created": self.counters.created,
            "consumed": self.counters.consumed,
            "stored": self.counters.stored,
            "in_transit": self.counters.in_transit,
            "discarded": self.counters.discarded,
            "utilization": self.utilization,
            "max_buffer": self.max_buffer,
            "max_storage_age_days": self.max_storage_age / DAY,
            "first_departure_days": None if self.first_departure is None else self.first_departure / DAY,
            "stick_time_s": self.config.job_time,
            "shipload_consume_days": self.config.groups * self.config.job_time / self.config.online / DAY,
            "events": self.events,
            "log_sha256": self.digest,
            "deadlock": self.deadlock,
        }


def log_csv(log) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", "event", "container", "location", "ebits"])
    for t, ev, name, loc, n in log:
        writer.writerow([f"{t:.6f}", ev, name, loc, n])
    return buf.getvalue()


def integrate_consumption(consumptions: np.ndarray, start: float, end: float) -> float:
    """Ebits consumed in ``[start, end]``, counting partial jobs pro rata."""
    if len(consumptions) == 0:
        return 0.0
    s, e, n = consumptions[:, 0], consumptions[:, 1], consumptions[:, 2]
    overlap = np.clip(np.minimum(e, end) - np.maximum(s, start), 0, None)
    dur = e - s
    frac = np.where(dur > 0, overlap / np.where(dur > 0, dur, 1), ((e >= start) & (e <= end)).astype(float))
    return float((n * frac).sum())


def measure_bandwidth(report: SimReport, start: float | None = None, end: float | None = None) -> float:
    """Consumed Ebits per second over a window (defaults to the headline window)."""
    start = report.window[0] if start is None else start
    end = report.window[1] if end is None else end
    if not end > start:
        raise DomainError("measurement window is empty")
    if start < report.steady_start:
        warnings.warn(f"window starts at {start / DAY:.2f} d, before steady state at {report.steady_start / DAY:.2f} d",
                      SteadyStateWarning, stacklevel=2)
    return integrate_consumption(report.consumptions, start, end) / (end - start)


def run(state: FleetState, until: float | None = None, keep_log: bool = True, strict: bool = False) -> SimReport:
    """Process events up to ``until`` (default: the configured horizon)."""
    config = state.config
    until = config.horizon if until is None else until
    handlers = {
        "entangle-complete": state.on_entangle_complete,
        "consume-complete": state.on_consume_complete,
        "ship-arrive": state.on_ship_arrive,
    }
    count = 0
    while state.heap and state.heap[0][0] <= until:
        time, _, kind, args = heapq.heappop(state.heap)
        state.clock = time
        handlers[kind](*args)
        count += 1
    if not state.heap and state.clock < until:
        waiting = {t: len(term.waiting) for t, term in state.terminals.items()}
        ready = {t: len(term.ready) for t, term in state.terminals.items()}
        state.deadlock = (f"no enabled events after t={state.clock / DAY:.3f} d; ship at {state.ship_location} "
                          f"waiting={state.ship_waiting}, ready={ready}, awaiting partners={waiting}")
        if strict:
            raise DeadlockError(state.deadlock)
    state.clock = until

    one_way = config.ship.one_way_transit
    first = state.first_arrival if state.first_arrival is not None else until
    steady = first + config.ship.round_trip
    n = max(0, math.floor((until - steady) / one_way + 1e-9))
    window = (steady, steady + n * one_way) if n else (steady, until)
    cons = np.array(state.consumptions, dtype=float).reshape(-1, 3)
    realized = integrate_consumption(cons, *window) / (window[1] - window[0]) if window[1] > window[0] else math.nan
    text = log_csv(state.log)
    elapsed = until
    util = {t: term.busy_time / (term.lanes * elapsed) for t, term in state.terminals.items()}
    return SimReport(
        config=config,
        analytic_bandwidth=config.analytic_bandwidth,
        realized_bandwidth=realized,
        window=window,
        steady_start=steady,
        counters=replace(state.counters),
        utilization=util,
        max_buffer={t: term.max_ready for t, term in state.terminals.items()},
        max_storage_age=state.max_age,
        first_departure=state.first_departure,
        events=count,
        digest=hashlib.sha256(text.encode()).hexdigest(),
        deadlock=state.deadlock,
        consumptions=cons,
        log=state.log if keep_log else [],
    )


def simulate(config: ScenarioConfig, keep_log: bool = False) -> SimReport:
    return run(init_fleet(config), keep_log=keep_log)


def _fraction(config: ScenarioConfig) -> float:
    return simulate(config).fraction


def _map(fn, configs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, configs))
    return [fn(c) for c in configs]


@dataclass
class SweepResult:
    slowdowns: list[float]
    widths: list[int]
    onlines: list[int]
    bandwidth: np.ndarray  # (online, width, slowdown)
    analytic: float

    @property
    def fraction(self) -> np.ndarray:
        return self.bandwidth / self.analytic if self.analytic else np.ones_like(self.bandwidth)

    def max_full_slowdown(self, width_index: int = 0) -> dict[int, float | None]:
        """Per online count, the largest grid slowdown keeping >= 99% of analytic bandwidth."""
        out = {}
        for i, online in enumerate(self.onlines):
            ok = [s for s, f in zip(self.slowdowns, self.fraction[i, width_index]) if f >= FULL_BANDWIDTH]
            out[online] = max(ok) if ok else None
        return out

    def monotone(self, tol: float = 1e-9) -> bool:
        b = self.bandwidth
        scale = tol * max(self.analytic, 1.0)
        return bool(
            (np.diff(b, axis=2) <= scale).all()
            and (np.diff(b, axis=1) >= -scale).all()
            and (np.diff(b, axis=0) >= -scale).all()
        )


def sweep_interface(config: ScenarioConfig, slowdowns, widths=(1,), onlines=None, workers: int = 1) -> SweepResult:
    """Realized bandwidth over a grid of (online lanes, parallel width, slowdown)."""
    slowdowns = sorted(float(s) for s in slowdowns)
    widths = sorted(int(w) for w in widths)
    onlines = sorted(int(o) for o in (onlines or [config.online]))
    if not slowdowns or not widths or not onlines:
        raise DomainError("sweep ranges must be nonempty")
    configs = [replace(config, online=o, parallel_width=w, slowdown=s)
               for o in onlines for w in widths for s in slowdowns]
    reports = _map(simulate, configs, workers)
    bw = np.array([r.realized_bandwidth for r in reports]).reshape(len(onlines), len(widths), len(slowdowns))
    return SweepResult(slowdowns, widths, onlines, bw, config.analytic_bandwidth)


def slack_ratio(config: ScenarioConfig) -> float:
    """Closed-form slack: available turnaround per container over full-speed stick time."""
    base = replace(config, slowdown=1.0, parallel_width=1)
    per_container = config.ship.one_way_transit / config.ship.teu_count
    return per_container / base.job_time * config.online


def max_sustainable_slowdown(config: ScenarioConfig, lo: float = 1.0, hi: float | None = None,
                             tol: float = 0.01) -> float:
    """Bisect for the largest slowdown that keeps >= 99% of analytic bandwidth."""
    if _fraction(replace(config, slowdown=lo)) < FULL_BANDWIDTH:
        return lo
    hi = hi if hi is not None else 2 * slack_ratio(config) + 1
    while _fraction(replace(config, slowdown=hi)) >= FULL_BANDWIDTH:
        lo, hi = hi, 2 * hi
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        if _fraction(replace(config, slowdown=mid)) >= FULL_BANDWIDTH:
            lo = mid
        else:
            hi = mid
    return lo


def required_online(config: ScenarioConfig, slowdown: float, max_online: int = 1000) -> int:
    """Fewest online lanes per terminal that sustain full bandwidth at ``slowdown``."""
    base = replace(config, slowdown=slowdown)

    def ok(online: int) -> bool:
        return _fraction(replace(base, online=online)) >= FULL_BANDWIDTH

    online = min(max_online, max(1, math.ceil(slowdown / slack_ratio(replace(config, online=1)))))
    if ok(online):
        while online > 1 and ok(online - 1):
            online -= 1
        return online
    while online < max_online:
        online += 1
        if ok(online):
            return online
    raise DomainError(f"no online count up to {max_online} sustains slowdown {slowdown}")
