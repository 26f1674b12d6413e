"""Physical constants and box geometry shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PhysicalUnits:
    """Reduced constants. ``h`` is always derived as ``2*pi*hbar``."""

    hbar: float = 1.0
    mass: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "kB"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar


@dataclass(frozen=True)
class BoxGeometry:
    """Box of length ``L``; each particle owns one half of size ``d = L/2``."""

    L: float
    d: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"box length must be finite and > 0, got {self.L!r}")
        object.__setattr__(self, "d", self.L / 2.0)

    @classmethod
    def from_half_length(cls, d: float) -> "BoxGeometry":
        if not (math.isfinite(d) and d > 0):
            raise ValueError(f"half-length must be finite and > 0, got {d!r}")
        return cls(2.0 * d)


def eps0(geometry: BoxGeometry, units: PhysicalUnits = PhysicalUnits()) -> float:
    """Ground energy h^2/8md^2 of one particle in a box of size d."""
    return units.h**2 / (8.0 * units.mass * geometry.d**2)
