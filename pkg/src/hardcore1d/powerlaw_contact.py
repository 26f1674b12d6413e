"""Contact energy for a strength that diverges as a power of the separation.

With ``A(x) = B x^-(1+alpha)`` the contact term of a hard-core pair state
reduces to ``2B sin^2(kx/2) / x^(1+alpha)`` evaluated as ``x -> 0``, which
behaves like ``B k^2 x^(1-alpha) / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from hardcore1d.units import PhysicalUnits

DEFAULT_X_LADDER = tuple(10.0 ** -e for e in range(1, 10))
SMALL_KX = 1e-2


class Regime(enum.Enum):
    ZERO = "zero"
    FINITE = "finite"
    DIVERGENT = "divergent"


@dataclass(frozen=True)
class PowerLawStrength:
    B: float
    alpha: float

    def __post_init__(self):
        if not self.B > 0:
            raise ValueError("B must be > 0")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class DeltaRegime:
    regime: Regime
    value: float | None = None
    # the finite value is treated as fictitious; a measurement could give anything in [0, value]
    fictitious: bool = False

    @property
    def bounds(self) -> tuple[float, float] | None:
        if self.regime is Regime.FINITE:
            return (0.0, self.value)
        return None

    def __str__(self):
        if self.regime is Regime.FINITE:
            return f"Finite({self.value:g})"
        return self.regime.value.capitalize()


def integrand_eval(p: PowerLawStrength, k: float, x):
    x = np.asarray(x, float)
    if np.any(x <= 0):
        raise ValueError("x must be > 0")
    out = 2.0 * p.B * np.sin(0.5 * k * x) ** 2 / x ** (1.0 + p.alpha)
    return out if out.ndim else float(out)


def small_x_form(p: PowerLawStrength, k: float, x):
    x = np.asarray(x, float)
    out = 0.5 * p.B * k * k * x ** (1.0 - p.alpha)
    return out if out.ndim else float(out)


def classify_limit(p: PowerLawStrength, k: float) -> DeltaRegime:
    # exact comparison: the divide is a single point in alpha
    if p.alpha < 1:
        return DeltaRegime(Regime.ZERO, 0.0)
    if p.alpha == 1:
        return DeltaRegime(Regime.FINITE, 0.5 * p.B * k * k, fictitious=True)
    return DeltaRegime(Regime.DIVERGENT, math.inf)


def ladder_slope(p: PowerLawStrength, k: float, x_ladder=DEFAULT_X_LADDER) -> float:
    """Log-log slope of the integrand over the ladder points with ``k x < 1e-2``."""
    x = np.asarray([v for v in x_ladder if abs(k) * v < SMALL_KX])
    if len(x) < 2:
        raise ValueError("x ladder has fewer than two points in the small-kx regime")
    y = integrand_eval(p, k, x)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def confirm_regime(p: PowerLawStrength, k: float, x_ladder=DEFAULT_X_LADDER, slope_tol: float = 0.02) -> bool:
    """Check the exact classification against the numeric trend on the ladder."""
    regime = classify_limit(p, k)
    slope = ladder_slope(p, k, x_ladder)
    if regime.regime is Regime.ZERO:
        return slope > 0 and abs(slope - (1 - p.alpha)) < slope_tol
    if regime.regime is Regime.DIVERGENT:
        return slope < 0 and abs(slope - (1 - p.alpha)) < slope_tol
    tail = integrand_eval(p, k, min(x_ladder))
    return abs(slope) < slope_tol and math.isclose(tail, regime.value, rel_tol=1e-6)


@dataclass(frozen=True)
class EffectiveMass:
    B: float
    units: PhysicalUnits
    m_star: float

    def e_star(self, k: float) -> float:
        """hbar^2 k^2 / 4 m*."""
        return self.units.hbar**2 * k * k / (4.0 * self.m_star)

    def e_kinetic(self, k: float) -> float:
        """hbar^2 k^2 / 4 m, the kinetic-only view with the contact term dropped."""
        return self.units.hbar**2 * k * k / (4.0 * self.units.mass)

    def e_star_sum(self, k: float) -> float:
        """Kinetic energy plus the finite contact term B k^2 / 2."""
        return self.e_kinetic(k) + 0.5 * self.B * k * k

    def identity_error(self, k: float) -> float:
        ref = self.e_star_sum(k)
        return abs(self.e_star(k) - ref) / ref if ref else abs(self.e_star(k))


def effective_mass(B: float, units: PhysicalUnits = PhysicalUnits()) -> EffectiveMass:
    if B < 0:
        raise ValueError("B must be >= 0")
    m = units.mass
    return EffectiveMass(B, units, m / (1.0 + 2.0 * B * m / units.hbar**2))
