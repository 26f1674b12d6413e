"""Uniform one-dimensional grids."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    npoints: int
    spacing: float = field(init=False)

    def __post_init__(self):
        if int(self.npoints) != self.npoints or self.npoints < 3:
            raise ValueError(f"npoints must be an integer >= 3, got {self.npoints!r}")
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")
        object.__setattr__(self, "npoints", int(self.npoints))
        object.__setattr__(self, "spacing", (self.x_max - self.x_min) / (self.npoints - 1))

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.npoints)

    @property
    def interior(self) -> np.ndarray:
        return self.points[1:-1]

    @property
    def center(self) -> float:
        return 0.5 * (self.x_min + self.x_max)
