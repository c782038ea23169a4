"""Time series of S/I/R fractions, shared by the simulator and the ODE solvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(eq=False)
class Trajectory:
    """Fractions of all nodes on a time grid.

    ``class_i``/``class_r`` have shape ``(len(grid), len(classes))`` and hold
    the share of *all* nodes that are infected/recovered and belong to each
    class.  They are optional (a CSV without per-class columns carries only
    the aggregates).
    """

    grid: np.ndarray
    i: np.ndarray
    r: np.ndarray
    classes: Optional[list] = None
    class_i: Optional[np.ndarray] = None
    class_r: Optional[np.ndarray] = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.i = np.asarray(self.i, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        if self.grid.ndim != 1 or self.i.shape != self.grid.shape or self.r.shape != self.grid.shape:
            raise ValueError("grid, i and r must be 1-d arrays of equal length")
        if len(self.grid) > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError("time grid must be strictly increasing")

    @classmethod
    def from_classes(cls, grid, classes, class_i, class_r) -> "Trajectory":
        class_i = np.asarray(class_i, dtype=float)
        class_r = np.asarray(class_r, dtype=float)
        return cls(
            grid,
            class_i.sum(axis=1),
            class_r.sum(axis=1),
            [tuple(c) for c in classes],
            class_i,
            class_r,
        )

    @property
    def s(self) -> np.ndarray:
        return 1.0 - self.i - self.r

    @property
    def has_classes(self) -> bool:
        return self.class_i is not None

    def class_series(self, k: int, l: int) -> tuple[np.ndarray, np.ndarray]:
        j = self.classes.index((k, l))
        return self.class_i[:, j], self.class_r[:, j]
