"""Boltzmann occupation of the pair's relative levels and the mean zero-point force.

Only the relative quantum number ``n`` is thermally weighted by default,
with excitation energies ``((n+1)^2 - 1) * 2 eps0``. The CM ladder can be
added for comparison; because the spectrum is separable, tracing it out
leaves the relative probabilities unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hardcore1d.analytic import cm_energy, exact_energy_fractions, quantized_K
from hardcore1d.units import BoxGeometry, PhysicalUnits, eps0

DEFAULT_UNITS = PhysicalUnits()
TAIL_TOL = 1e-12
MAX_LEVELS = 1_000_000


@dataclass(frozen=True)
class ThermalOccupation:
    T: float
    probabilities: np.ndarray
    n_cutoff: int
    truncated_tail: float
    cm_probabilities: np.ndarray | None = None

    @property
    def ratio_first_excited(self) -> float:
        return float(self.probabilities[1] / self.probabilities[0])


def characteristic_temperature(geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    return eps0(geometry, units) / units.kB


def _weights(beta_gap: float, count: int, power_offset: int = 1) -> np.ndarray:
    n = np.arange(count, dtype=float)
    return np.exp(-((n + power_offset) ** 2 - power_offset**2) * beta_gap)


def _tail(beta_gap: float, n_cutoff: int) -> float:
    """Weight beyond the cutoff relative to the kept sum."""
    kept = _weights(beta_gap, n_cutoff + 1).sum()
    tail, n = 0.0, n_cutoff + 1
    while n < MAX_LEVELS:
        term = math.exp(-((n + 1) ** 2 - 1) * beta_gap)
        tail += term
        if term <= 1e-20 * kept:
            break
        n += 1
    return tail / kept


def auto_cutoff(beta_gap: float, tol: float = TAIL_TOL) -> int:
    n = 1
    while _tail(beta_gap, n) >= tol * 1e-3:
        n *= 2
        if n > MAX_LEVELS:
            raise ValueError("temperature too high for a finite level cutoff")
    return n


def occupations(T: float, geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS,
                n_cutoff: int | None = None, include_cm: bool = False) -> ThermalOccupation:
    if not T > 0:
        raise ValueError("temperature must be > 0")
    beta_gap = 2.0 * eps0(geometry, units) / (units.kB * T)
    if n_cutoff is None:
        n_cutoff = auto_cutoff(beta_gap)
    tail = _tail(beta_gap, n_cutoff)
    if tail >= TAIL_TOL:
        raise ValueError(f"n_cutoff={n_cutoff} truncates a tail of {tail:.2e} (needs < {TAIL_TOL:g})")
    w = _weights(beta_gap, n_cutoff + 1)
    probs = w / w.sum()
    cm = None
    if include_cm:
        # E_K(N) = eps0 (N+1)^2 / 8, same cutoff rule on its own ladder
        beta_cm = eps0(geometry, units) / (8.0 * units.kB * T)
        N_cut = auto_cutoff(beta_cm)
        wc = _weights(beta_cm, N_cut + 1)
        cm = wc / wc.sum()
        joint = np.outer(probs, cm)
        probs = joint.sum(axis=1)
    return ThermalOccupation(T, probs, n_cutoff, tail, cm)


def ratio_temperature(ratio: float, geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    """Temperature at which P1/P0 equals ``ratio``: 6 eps0 / (kB ln(1/ratio))."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    return 6.0 * eps0(geometry, units) / (units.kB * math.log(1.0 / ratio))


def ground_force(geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    return units.h**2 / (2.0 * units.mass * geometry.d**3)


def thermal_force(T: float, geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS,
                  n_cutoff: int | None = None) -> float:
    """Mean of -dE_n/dd over the relative levels; E_n = 2 eps0 (n+1)^2 gives (n+1)^2 h^2/2md^3."""
    occ = occupations(T, geometry, units, n_cutoff)
    n = np.arange(len(occ.probabilities))
    return ground_force(geometry, units) * float(np.dot(occ.probabilities, (n + 1.0) ** 2))


def thermal_cm_force(T: float, geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    """Separate K-motion contribution: mean of -dE_K/dd with E_K proportional to 1/d^2."""
    occ = occupations(T, geometry, units, include_cm=True)
    N = np.arange(len(occ.cm_probabilities))
    E_K = np.array([cm_energy(quantized_K(int(i), geometry), units) for i in N])
    return float(np.dot(occ.cm_probabilities, 2.0 * E_K / geometry.d))


def km_energy_share(geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> dict:
    """Ground-state K- and k-motion energies in units of eps0, exact and in floating point."""
    e0 = eps0(geometry, units)
    E_K = cm_energy(quantized_K(0, geometry), units)
    E_k = units.hbar**2 * (2.0 * math.pi / geometry.d) ** 2 / (4.0 * units.mass)
    exact = exact_energy_fractions(0, 0)
    return {
        "E_K_over_eps0": E_K / e0,
        "E_k_over_eps0": E_k / e0,
        "E_K_over_total": E_K / (E_K + E_k),
        "exact_E_K_over_eps0": exact["E_K"],
        "exact_E_k_over_eps0": exact["E_k"],
        "exact_E_K_over_total": exact["E_K_over_total"],
    }


__all__ = [
    "ThermalOccupation", "auto_cutoff", "characteristic_temperature", "ground_force",
    "km_energy_share", "occupations", "ratio_temperature", "thermal_cm_force", "thermal_force",
]
