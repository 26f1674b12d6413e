"""Closed-form pair mechanics of two hard-core particles in a 1-D box.

Coordinates: relative ``x = x2 - x1`` with wavenumber ``k = k2 - k1 = 2q``,
centre of mass ``X = (x1 + x2)/2`` with ``K = k1 + k2``. Energies use
``hbar`` directly; formulas quoted in terms of Planck's ``h`` go through
``units.h = 2*pi*hbar``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hardcore1d.grid import Grid
from hardcore1d.quadrature import adaptive_simpson
from hardcore1d.units import BoxGeometry, PhysicalUnits, eps0

DEFAULT_UNITS = PhysicalUnits()


# --------------------------------------------------------------------------
# types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PairQuantumNumbers:
    n: int  # relative
    N: int  # centre of mass

    def __post_init__(self):
        for name in ("n", "N"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class WaveNumbers:
    q: float
    K: float
    k: float
    k1: float
    k2: float
    wavelength: float

    def collided(self) -> "WaveNumbers":
        """Momenta after a collision: k1 and k2 trade their relative parts."""
        return decompose_momenta(-self.q, self.K)


class SymmetryKind(enum.Enum):
    FERMIONIC_ODD = "psi-"      # sqrt2 sin(qx)
    BOSONIC_EVEN_CUSP = "phi+"  # sqrt2 sin(q|x|)
    EVEN_COSINE = "psi+"        # sqrt2 cos(qx), contact-free reference only


@dataclass(frozen=True)
class RelativeWaveform:
    symmetry: SymmetryKind
    q: float
    domain: tuple[float, float] | None = None

    def __post_init__(self):
        if self.domain is None:
            lam = 2.0 * math.pi / self.q if self.q > 0 else 1.0
            object.__setattr__(self, "domain", (0.0, lam))

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.q

    def __call__(self, x):
        return relative_waveform_eval(self, x)


@dataclass(frozen=True)
class MacroOrbital:
    """Single-particle pair waveform ``B zeta_q(x) exp(iKX)``.

    ``normB`` defaults to the value that normalizes ``|xi|^2`` over one
    antinodal loop ``[0, pi/q]``, the half of the pair space the particle
    occupies exclusively.
    """

    q: float
    K: float
    symmetry: SymmetryKind = SymmetryKind.BOSONIC_EVEN_CUSP
    normB: float | None = None

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("macro-orbital needs q > 0")
        if self.normB is None:
            # every variant has |zeta|^2 integrating to pi/q over one loop
            object.__setattr__(self, "normB", math.sqrt(self.q / math.pi))

    @property
    def waveform(self) -> RelativeWaveform:
        return RelativeWaveform(self.symmetry, self.q)

    @property
    def exclusive_domain(self) -> tuple[float, float]:
        return (0.0, math.pi / self.q)


@dataclass(frozen=True)
class PairState:
    numbers: PairQuantumNumbers
    waves: WaveNumbers
    geometry: BoxGeometry
    E_k: float
    E_K: float
    E_total: float
    ratio_to_eps0: float

    @property
    def share_per_particle(self) -> float:
        return 0.5 * self.E_total


class Scheme(enum.Enum):
    MACRO_ORBITAL = "macro-orbital"
    PLANE_WAVE_INTEGER = "plane-wave-integer"
    NON_INTERACTING = "non-interacting"


@dataclass(frozen=True)
class MomentumPair:
    label: str
    k1: float
    k2: float
    energy: float

    def in_units_of(self, unit: float) -> tuple[float, float]:
        return self.k1 / unit, self.k2 / unit


@dataclass(frozen=True)
class SpectrumComparison:
    geometry: BoxGeometry
    schemes: dict = field(default_factory=dict)  # Scheme -> list[MomentumPair]
    illustrative_only: bool = True

    def pairs(self, scheme: Scheme) -> list[MomentumPair]:
        return self.schemes[scheme]

    def ground(self, scheme: Scheme) -> MomentumPair:
        return min(self.schemes[scheme], key=lambda p: p.energy)


# --------------------------------------------------------------------------
# coordinates and momenta
# --------------------------------------------------------------------------

def cm_transform(x1, x2, k1, k2):
    """Return ``(x, X, k, K)`` for the pair."""
    return x2 - x1, 0.5 * (x1 + x2), k2 - k1, k1 + k2


def cm_inverse(x, X, k, K):
    """Inverse of :func:`cm_transform`: ``(x1, x2, k1, k2)``."""
    return X - 0.5 * x, X + 0.5 * x, 0.5 * K - 0.5 * k, 0.5 * K + 0.5 * k


def decompose_momenta(q: float, K: float) -> WaveNumbers:
    k1 = -q + 0.5 * K
    k2 = q + 0.5 * K
    lam = 2.0 * math.pi / abs(q) if q != 0 else math.inf
    return WaveNumbers(q=q, K=K, k=2.0 * q, k1=k1, k2=k2, wavelength=lam)


def quantized_q(n: int, geometry: BoxGeometry) -> float:
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    return (n + 1) * math.pi / geometry.d


def quantized_K(N: int, geometry: BoxGeometry) -> float:
    if int(N) != N or N < 0:
        raise ValueError(f"N must be a non-negative integer, got {N!r}")
    return (N + 1) * math.pi / geometry.L


# --------------------------------------------------------------------------
# energies
# --------------------------------------------------------------------------

def relative_energy(k: float, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    return units.hbar**2 * k**2 / (4.0 * units.mass)


def cm_energy(K: float, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    return units.hbar**2 * K**2 / (4.0 * units.mass)


def box_energy(n: int, N: int, geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    """E(n, N) = (h^2/16mL^2) [16(n+1)^2 + (N+1)^2]."""
    pref = units.h**2 / (16.0 * units.mass * geometry.L**2)
    return pref * (16 * (n + 1) ** 2 + (N + 1) ** 2)


def energy_levels(numbers: PairQuantumNumbers, geometry: BoxGeometry,
                  units: PhysicalUnits = DEFAULT_UNITS) -> PairState:
    q = quantized_q(numbers.n, geometry)
    K = quantized_K(numbers.N, geometry)
    waves = decompose_momenta(q, K)
    E_k = relative_energy(waves.k, units)
    E_K = cm_energy(K, units)
    E_total = box_energy(numbers.n, numbers.N, geometry, units)
    return PairState(numbers, waves, geometry, E_k, E_K, E_total,
                     E_total / eps0(geometry, units))


def exact_energy_fractions(n: int = 0, N: int = 0) -> dict[str, Fraction]:
    """Level energies as exact multiples of eps0: E_k = 2(n+1)^2, E_K = (N+1)^2/8."""
    E_k = Fraction(2 * (n + 1) ** 2)
    E_K = Fraction((N + 1) ** 2, 8)
    return {"E_k": E_k, "E_K": E_K, "E_total": E_k + E_K,
            "E_K_over_total": E_K / (E_k + E_K)}


def noninteracting_comparison(geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS) -> dict:
    eps0_free = units.h**2 / (8.0 * units.mass * geometry.L**2)
    q0_free = math.pi / geometry.L
    e0 = eps0(geometry, units)
    q0 = quantized_q(0, geometry)
    return {"eps0": e0, "q0": q0, "eps0_free": eps0_free, "q0_free": q0_free,
            "eps_ratio": e0 / eps0_free, "q_ratio": q0 / q0_free}


# --------------------------------------------------------------------------
# waveforms
# --------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def relative_waveform_eval(w: RelativeWaveform, x):
    x = np.asarray(x, dtype=float)
    if w.symmetry is SymmetryKind.FERMIONIC_ODD:
        out = _SQRT2 * np.sin(w.q * x)
    elif w.symmetry is SymmetryKind.BOSONIC_EVEN_CUSP:
        # sign(x) sin(qx) == sin(q|x|), written so the density matches psi- bit for bit
        out = _SQRT2 * np.sign(x) * np.sin(w.q * x)
    else:
        out = _SQRT2 * np.cos(w.q * x)
    return out if out.ndim else float(out)


def cm_waveform_eval(K_N: float, N: int, X, geometry: BoxGeometry):
    """Standing CM wave: sine for odd ``N``, cosine for even ``N``."""
    X = np.asarray(X, dtype=float)
    half = 0.5 * geometry.L
    if np.any(np.abs(X) > half * (1.0 + 1e-12)):
        raise ValueError("X lies outside the box walls")
    f = np.sin if N % 2 else np.cos
    out = math.sqrt(2.0 / geometry.L) * f(K_N * X)
    return out if out.ndim else float(out)


def pair_plane_wave_state(k1: float, k2: float, x1, x2, sign: int = +1):
    """Symmetrized (+1) or antisymmetrized (-1) product of two unit plane waves."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    direct = np.exp(1j * (k1 * x1 + k2 * x2))
    exchanged = np.exp(1j * (k2 * x1 + k1 * x2))
    return (direct + sign * exchanged) / _SQRT2


def pair_factorized_state(k1: float, k2: float, x1, x2, sign: int = +1):
    """Same state written as ``psi_k(x)^(+-) exp(iKX)``.

    The imaginary unit carried by the antisymmetric combination is kept
    explicit so both forms agree as complex numbers.
    """
    x, X, k, K = cm_transform(np.asarray(x1, float), np.asarray(x2, float), k1, k2)
    if sign == +1:
        rel = _SQRT2 * np.cos(0.5 * k * x)
    elif sign == -1:
        rel = 1j * _SQRT2 * np.sin(0.5 * k * x)
    else:
        raise ValueError("sign must be +1 or -1")
    return rel * np.exp(1j * K * X)


def macro_orbital_eval(mo: MacroOrbital, x_i, X_i):
    return mo.normB * relative_waveform_eval(mo.waveform, x_i) * np.exp(1j * mo.K * np.asarray(X_i, float))


@dataclass(frozen=True)
class SymmetrizedPair:
    """Two-particle state built from macro-orbitals by permuting their K values."""

    first: MacroOrbital
    second: MacroOrbital
    sign: int

    @property
    def terms(self) -> list[tuple[int, tuple[float, float]]]:
        """(parity sign, K assigned to particle 1 and 2) per permutation."""
        Ks = (self.first.K, self.second.K)
        out = []
        for perm in itertools.permutations(range(2)):
            inversions = sum(1 for i, j in itertools.combinations(perm, 2) if i > j)
            out.append((self.sign**inversions, (Ks[perm[0]], Ks[perm[1]])))
        return out

    def __call__(self, x1, X1, x2, X2):
        X1 = np.asarray(X1, float)
        X2 = np.asarray(X2, float)
        spatial = (self.first.normB * self.second.normB
                   * relative_waveform_eval(self.first.waveform, x1)
                   * relative_waveform_eval(self.second.waveform, x2))
        phase = sum(p * np.exp(1j * (Ka * X1 + Kb * X2)) for p, (Ka, Kb) in self.terms)
        return spatial * phase


def two_body_symmetrized_product(mo1: MacroOrbital, mo2: MacroOrbital, sign: int = +1) -> SymmetrizedPair:
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    return SymmetrizedPair(mo1, mo2, sign)


# --------------------------------------------------------------------------
# expectation values
# --------------------------------------------------------------------------

def _density_moments(kind: SymmetryKind, q: float, a: float, b: float) -> tuple[float, float]:
    """(int |zeta|^2, int x |zeta|^2) over [a, b] by antiderivatives.

    For the cusp form the interval must not straddle 0 with mixed signs of
    sin(q|x|); the density equals that of the odd form anyway, so the odd
    antiderivatives are used for both.
    """
    s = -1.0 if kind is SymmetryKind.EVEN_COSINE else 1.0

    def norm(t):
        return 2.0 * (0.5 * t - s * math.sin(2 * q * t) / (4 * q))

    def first(t):
        return 2.0 * (0.25 * t * t - s * t * math.sin(2 * q * t) / (4 * q)
                      - s * math.cos(2 * q * t) / (8 * q * q))

    return norm(b) - norm(a), first(b) - first(a)


def expectation_x(w: RelativeWaveform, domain: tuple[float, float] | None = None,
                  method: str = "closed") -> float:
    """<x> of the relative waveform over ``domain`` (default ``[0, lambda]``)."""
    a, b = domain if domain is not None else (0.0, w.wavelength)
    if not b > a:
        raise ValueError("empty domain")
    if not w.q > 0:
        raise ValueError("expectation_x needs q > 0")
    if method == "closed":
        m0, m1 = _density_moments(w.symmetry, w.q, a, b)
    elif method == "quadrature":
        dens = lambda t: relative_waveform_eval(w, t) ** 2
        m0 = adaptive_simpson(dens, a, b)
        m1 = adaptive_simpson(lambda t: t * dens(t), a, b)
    else:
        raise ValueError(f"unknown method {method!r}")
    return m1 / m0


def phase_correlation(w: RelativeWaveform, phi):
    """g(phi) = |zeta(x = phi/k)|^2 with k = 2q."""
    return relative_waveform_eval(w, np.asarray(phi, float) / (2.0 * w.q)) ** 2


def mean_phase(w: RelativeWaveform, domain: tuple[float, float] | None = None) -> float:
    """<phi> = <kx> by quadrature of g(phi) over the phase image of ``domain``."""
    a, b = domain if domain is not None else (0.0, w.wavelength)
    k = 2.0 * w.q
    g = lambda p: phase_correlation(w, p)
    return adaptive_simpson(lambda p: p * g(p), k * a, k * b) / adaptive_simpson(g, k * a, k * b)


def expectation_delta_potential(w: RelativeWaveform) -> float:
    """Contact weight |zeta(0)|^2; exactly zero for the hard-core forms."""
    if w.symmetry is SymmetryKind.EVEN_COSINE:
        raise ValueError("cosine waveform does not vanish at contact")
    return relative_waveform_eval(w, 0.0) ** 2


# --------------------------------------------------------------------------
# forces
# --------------------------------------------------------------------------

def ground_relative_energy(d: float, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    """E(0) = 2 eps0 = h^2/4md^2 as a function of the half-length."""
    if not d > 0:
        raise ValueError("half-length must be > 0")
    return units.h**2 / (4.0 * units.mass * d * d)


def zero_point_force(geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS,
                     rel_step: float = 1e-5) -> dict:
    d = geometry.d
    closed = units.h**2 / (2.0 * units.mass * d**3)
    step = rel_step * d
    fd = -(ground_relative_energy(d + step, units) - ground_relative_energy(d - step, units)) / (2 * step)
    return {"closed_form": closed, "finite_difference": fd,
            "rel_error": abs(fd - closed) / closed,
            "L_form": 4.0 * units.h**2 / (units.mass * geometry.L**3)}


# --------------------------------------------------------------------------
# paired kinetic operator
# --------------------------------------------------------------------------

def paired_operator_eigenvalue(mo: MacroOrbital, units: PhysicalUnits = DEFAULT_UNITS) -> float:
    """Half the pair energy: (E_k + E_K)/2 with E_k = hbar^2 k^2/4m, E_K = hbar^2 K^2/4m.

    Equivalently hbar^2 q^2/2m + hbar^2 K^2/8m, the single-particle q- and
    K-motion energies.
    """
    return 0.5 * (relative_energy(2.0 * mo.q, units) + cm_energy(mo.K, units))


def default_eigencheck_grids(mo: MacroOrbital, points_per_loop: int = 400) -> tuple[Grid, Grid]:
    loop = math.pi / mo.q
    x_grid = Grid(-loop, loop, 2 * points_per_loop + 1)
    span = 2.0 * math.pi / mo.K if mo.K > 0 else 2.0 * loop
    X_grid = Grid(-0.5 * span, 0.5 * span, 2 * points_per_loop + 1)
    return x_grid, X_grid


def paired_operator_eigencheck(mo: MacroOrbital, x_grid: Grid | None = None, X_grid: Grid | None = None,
                               units: PhysicalUnits = DEFAULT_UNITS) -> dict:
    """Apply the 3-point discretization of h(i) to sampled xi and measure the residual.

    h(i) = -(hbar^2/8m) d^2/dX^2 - (hbar^2/2m) d^2/dx^2. The residual
    ||h xi - e xi|| / ||xi|| is taken over interior points at least two
    spacings from the grid edges and from the contact point x = 0.
    """
    if x_grid is None or X_grid is None:
        dx_default, dX_default = default_eigencheck_grids(mo)
        x_grid = x_grid or dx_default
        X_grid = X_grid or dX_default
    loop = math.pi / mo.q
    if loop / x_grid.spacing < 50:
        raise ValueError("x grid resolves fewer than 50 points per antinodal loop")
    if mo.K > 0 and (math.pi / mo.K) / X_grid.spacing < 50:
        raise ValueError("X grid resolves fewer than 50 points per CM half-wave")

    x = x_grid.points
    X = X_grid.points
    xx, XX = np.meshgrid(x, X, indexing="ij")
    xi = macro_orbital_eval(mo, xx, XX)
    hx, hX = x_grid.spacing, X_grid.spacing
    c = units.hbar**2 / units.mass
    lap_x = (xi[2:, 1:-1] - 2 * xi[1:-1, 1:-1] + xi[:-2, 1:-1]) / hx**2
    lap_X = (xi[1:-1, 2:] - 2 * xi[1:-1, 1:-1] + xi[1:-1, :-2]) / hX**2
    h_xi = -(c / 8.0) * lap_X - (c / 2.0) * lap_x

    eigenvalue = paired_operator_eigenvalue(mo, units)
    core = xi[1:-1, 1:-1]
    xin = xx[1:-1, 1:-1]
    keep = np.ones(core.shape, dtype=bool)
    keep[:1, :] = keep[-1:, :] = False
    keep[:, :1] = keep[:, -1:] = False
    keep &= np.abs(xin) > 2.0 * hx
    diff = (h_xi - eigenvalue * core)[keep]
    residual = float(np.linalg.norm(diff) / np.linalg.norm(core[keep]))
    rayleigh = float(np.real(np.vdot(core[keep], h_xi[keep]) / np.vdot(core[keep], core[keep])))
    return {"eigenvalue": eigenvalue, "measured": rayleigh, "residual": residual}


# --------------------------------------------------------------------------
# spectrum comparison and validity
# --------------------------------------------------------------------------

def _kinetic(k1: float, k2: float, units: PhysicalUnits) -> float:
    return units.hbar**2 * (k1 * k1 + k2 * k2) / (2.0 * units.mass)


def spectrum_compare(n_max: int, N_max: int, geometry: BoxGeometry,
                     units: PhysicalUnits = DEFAULT_UNITS) -> SpectrumComparison:
    """Enumerate allowed (k1, k2) for three schemes; the result is illustrative only.

    The pair in this framework has no independent-particle states; the
    macro-orbital pairs are just the quantized (q, K) rewritten as k1, k2.
    """
    if n_max < 0 or N_max < 0:
        raise ValueError("bounds must be >= 0")
    unit = math.pi / geometry.L
    macro = []
    for n in range(n_max + 1):
        for N in range(N_max + 1):
            w = decompose_momenta(quantized_q(n, geometry), quantized_K(N, geometry))
            macro.append(MomentumPair(f"n={n},N={N}", w.k1, w.k2, _kinetic(w.k1, w.k2, units)))
    top = n_max + N_max + 2
    plane = [MomentumPair(f"a={a},b={b}", -a * unit, b * unit, _kinetic(a * unit, b * unit, units))
             for a in range(1, top + 1) for b in range(a, top + 1)]
    free = [MomentumPair(f"s1={s1:+d},s2={s2:+d}", s1 * unit, s2 * unit, _kinetic(unit, unit, units))
            for s1 in (-1, 1) for s2 in (-1, 1)]
    return SpectrumComparison(geometry, {Scheme.MACRO_ORBITAL: macro,
                                         Scheme.PLANE_WAVE_INTEGER: plane,
                                         Scheme.NON_INTERACTING: free})


def hc_validity_check(q: float, sigma: float) -> bool:
    """Whether a core of diameter ``sigma`` still fits the loop structure at ``q``."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return sigma == 0 or q <= 2.0 * math.pi / sigma
