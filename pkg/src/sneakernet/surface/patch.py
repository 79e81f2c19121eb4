"""Planar-code layout on a (2R-1) x (2C-1) nearest-neighbour grid.

Sites ``(i, j)`` with ``i + j`` even hold data qubits. Ancillas at
``(even i, odd j)`` measure X-type checks and ancillas at ``(odd i, even j)``
measure Z-type checks. The logical Z chain runs along row 0 (left to right)
and the logical X chain along column 0 (top to bottom); they meet at the
corner ``(0, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

Coord = tuple[int, int]

# CNOT interleaving relative to the ancilla: north, west, east, south.
SCHEDULE = ((-1, 0), (0, -1), (0, 1), (1, 0))


@dataclass(frozen=True)
class CodePatch:
    rows_d: int
    cols_d: int
    origin: Coord = (0, 0)
    data: tuple[Coord, ...] = field(init=False)
    x_checks: tuple[Coord, ...] = field(init=False)
    z_checks: tuple[Coord, ...] = field(init=False)

    def __post_init__(self):
        if self.rows_d < 1 or self.cols_d < 1:
            raise ValueError("patch dimensions must be positive")
        r0, c0 = self.origin
        data, xs, zs = [], [], []
        for i in range(2 * self.rows_d - 1):
            for j in range(2 * self.cols_d - 1):
                site = (r0 + i, c0 + j)
                if (i + j) % 2 == 0:
                    data.append(site)
                elif i % 2 == 0:
                    xs.append(site)
                else:
                    zs.append(site)
        object.__setattr__(self, "data", tuple(data))
        object.__setattr__(self, "x_checks", tuple(xs))
        object.__setattr__(self, "z_checks", tuple(zs))

    @property
    def distance(self) -> int:
        return min(self.rows_d, self.cols_d)

    @property
    def shape(self) -> tuple[int, int]:
        return 2 * self.rows_d - 1, 2 * self.cols_d - 1

    @property
    def n_sites(self) -> int:
        h, w = self.shape
        return h * w

    @cached_property
    def data_index(self) -> dict[Coord, int]:
        return {c: k for k, c in enumerate(self.data)}

    def contains(self, site: Coord) -> bool:
        h, w = self.shape
        return 0 <= site[0] - self.origin[0] < h and 0 <= site[1] - self.origin[1] < w

    def neighbours(self, check: Coord) -> tuple[Coord | None, ...]:
        """Data neighbours of an ancilla in schedule order; ``None`` where absent."""
        out = []
        for di, dj in SCHEDULE:
            site = (check[0] + di, check[1] + dj)
            out.append(site if self.contains(site) else None)
        return tuple(out)

    def support(self, check: Coord) -> tuple[int, ...]:
        return tuple(self.data_index[s] for s in self.neighbours(check) if s is not None)

    @cached_property
    def hx(self) -> np.ndarray:
        """X-check incidence matrix, shape (n_x_checks, n_data)."""
        return self._incidence(self.x_checks)

    @cached_property
    def hz(self) -> np.ndarray:
        return self._incidence(self.z_checks)

    def _incidence(self, checks) -> np.ndarray:
        h = np.zeros((len(checks), len(self.data)), dtype=bool)
        for r, c in enumerate(checks):
            h[r, list(self.support(c))] = True
        return h

    @cached_property
    def logical_z(self) -> tuple[int, ...]:
        r0, c0 = self.origin
        return tuple(self.data_index[(r0, c0 + j)] for j in range(0, 2 * self.cols_d - 1, 2))

    @cached_property
    def logical_x(self) -> tuple[int, ...]:
        r0, c0 = self.origin
        return tuple(self.data_index[(r0 + i, c0)] for i in range(0, 2 * self.rows_d - 1, 2))

    def logical_mask(self, which: str) -> np.ndarray:
        mask = np.zeros(len(self.data), dtype=bool)
        mask[list(self.logical_x if which == "X" else self.logical_z)] = True
        return mask


def build_patch(d: int, cols_d: int | None = None, origin: Coord = (0, 0)) -> CodePatch:
    """Distance-``d`` planar code patch (rectangular when ``cols_d`` is given)."""
    if d < 2 or (cols_d is not None and cols_d < 2):
        raise ValueError(f"planar code distance must be at least 2, got {d}")
    return CodePatch(d, d if cols_d is None else cols_d, origin)
