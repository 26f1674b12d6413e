"""Invariant suite run by ``hardcore1d selftest``.

Each check returns the measured quantity, the bound it is held to and a
pass flag. ``inject_stencil_fault`` perturbs the finite-difference stencil
so the numeric checks can be seen to fail.
"""

from __future__ import annotations

import contextlib
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from hardcore1d import analytic as an
from hardcore1d import numeric as nm
from hardcore1d import powerlaw_contact as pc
from hardcore1d import thermal as th
from hardcore1d.units import BoxGeometry, PhysicalUnits


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    bound: str
    passed: bool


@contextlib.contextmanager
def inject_stencil_fault(scale: float = 1.01):
    """Temporarily scale the stencil off-diagonal (negative control for the suite)."""
    original = nm.build_hamiltonian

    def faulty(grid, potential=None, units=nm.DEFAULT_UNITS):
        H = original(grid, potential, units)
        return nm.TridiagonalOperator(H.diag, H.off * scale, H.grid)

    nm.build_hamiltonian = faulty
    try:
        yield
    finally:
        nm.build_hamiltonian = original


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_ground_ratio(g, u):
    s = an.energy_levels(an.PairQuantumNumbers(0, 0), g, u)
    err = abs(s.ratio_to_eps0 - 17 / 8)
    return err, "|E00/eps0 - 17/8| < 1e-12 and rounds to 2.12", err < 1e-12 and round(s.ratio_to_eps0, 2) == 2.12


def check_momentum_anchors(g, u):
    w = an.decompose_momenta(an.quantized_q(0, g), an.quantized_K(0, g))
    unit = math.pi / g.L
    errs = [_rel(w.q, math.pi / g.d), _rel(w.K, unit), _rel(w.k1, -1.5 * unit), _rel(w.k2, 2.5 * unit)]
    return max(errs), "q0=pi/d, K0=pi/L, (k1,k2)=(-3,5)pi/2L to 1e-14", max(errs) < 1e-14


def check_oracle_equivalence(g, u):
    worst = 0.0
    for method in ("filter", "barrier"):
        for lvl in nm.box_spectrum_numeric(g, u, 4, method=method):
            worst = max(worst, _rel(lvl.E, an.relative_energy(2 * an.quantized_q(lvl.n, g), u)))
    return worst, "rel err n=0..3 < 1e-3", worst < 1e-3


def check_convergence_order(g, u):
    orders = nm.convergence_order(g.d, 1, units=u)["orders"]
    dev = float(np.max(np.abs(orders - 2.0)))
    return float(orders[-1]), "order 2.0 +- 0.2 on every halving", dev <= 0.2


def check_delta_limit(g, u):
    rows = nm.delta_limit_study(nm.DEFAULT_A_LADDER, g, u)
    eta = [r.eta0_abs for r in rows]
    monotone = all(b < a for a, b in zip(eta, eta[1:]))
    slope = nm.loglog_slope([r.A for r in rows[-3:]], [r.V_expect for r in rows[-3:]])
    dist = rows[-1].l2_dist_to_phi_plus
    ok = monotone and dist < 1e-3 and abs(slope + 1) <= 0.1
    return dist, "|eta(0)| decreasing, L2 dist < 1e-3 at A=1e6, <V> slope -1 +- 0.1", ok


def check_expectation_x(g, u):
    q = an.quantized_q(0, g)
    worst = 0.0
    for kind in (an.SymmetryKind.FERMIONIC_ODD, an.SymmetryKind.BOSONIC_EVEN_CUSP):
        w = an.RelativeWaveform(kind, q)
        worst = max(worst, abs(an.expectation_x(w, method="quadrature") - g.d),
                    abs(an.expectation_x(w) - g.d))
    bound_ok = all(2 * an.quantized_q(n, g) * an.expectation_x(an.RelativeWaveform(an.SymmetryKind.FERMIONIC_ODD,
                   an.quantized_q(n, g))) >= 2 * math.pi * (1 - 1e-12) for n in range(6))
    return worst, "|<x> - d| < 1e-3 and k<x> >= 2pi", worst < 1e-3 and bound_ok


def check_zero_point_force(g, u):
    f = an.zero_point_force(g, u)
    cold = th.thermal_force(1e-3 * th.characteristic_temperature(g, u), g, u, n_cutoff=20)
    cold_err = _rel(cold, f["closed_form"])
    return f["rel_error"], "FD vs closed < 1e-6, T->0 force < 1e-10", f["rel_error"] < 1e-6 and cold_err < 1e-10


def check_macro_orbital(g, u):
    mo = an.MacroOrbital(an.quantized_q(0, g), an.quantized_K(0, g))
    r = an.paired_operator_eigencheck(mo, units=u)
    return r["residual"], "interior residual < 1e-4", r["residual"] < 1e-4


def check_appendix(g, u):
    k = 2.0
    labels = [str(pc.classify_limit(pc.PowerLawStrength(1.0, a), k)) for a in (0.5, 1.0, 1.5)]
    slopes = [abs(pc.ladder_slope(pc.PowerLawStrength(1.0, a), k) - (1 - a)) for a in (0.5, 1.0, 1.5)]
    em = pc.effective_mass(0.37, u)
    ident = max(em.identity_error(kk) for kk in (0.1, 1.0, 7.0))
    ok = labels == ["Zero", "Finite(2)", "Divergent"] and max(slopes) < 0.02 and ident < 1e-12
    return max(slopes), "regimes Zero/Finite(2)/Divergent, slope err < 0.02, E* identity < 1e-12", ok


def check_thermal(g, u):
    T0 = th.characteristic_temperature(g, u)
    occ = th.occupations(T0, g, u)
    ratio_err = _rel(occ.ratio_first_excited, math.exp(-6))
    sums = max(abs(th.occupations(t * T0, g, u).probabilities.sum() - 1) for t in np.logspace(-2, 2, 9))
    share = th.km_energy_share(g, u)
    exact = share["exact_E_K_over_eps0"] == Fraction(1, 8) and share["exact_E_K_over_total"] == Fraction(1, 17)
    ok = ratio_err < 1e-12 and sums < 1e-12 and exact
    return ratio_err, "P1/P0 = e^-6 to 1e-12, sum P = 1 +- 1e-12, shares 1/8 and 1/17", ok


def check_properties(g, u):
    rng = np.random.default_rng(7)
    x = rng.uniform(-10, 10, 1000)
    q = rng.uniform(0.1, 10)
    dens = np.max(np.abs(an.relative_waveform_eval(an.RelativeWaveform(an.SymmetryKind.FERMIONIC_ODD, q), x) ** 2
                         - an.relative_waveform_eval(an.RelativeWaveform(an.SymmetryKind.BOSONIC_EVEN_CUSP, q), x) ** 2))
    k1, k2, x1, x2 = (rng.uniform(-5, 5, 1000) for _ in range(4))
    fact = max(np.max(np.abs(an.pair_plane_wave_state(k1, k2, x1, x2, s) - an.pair_factorized_state(k1, k2, x1, x2, s)))
               for s in (+1, -1))
    mo1, mo2 = an.MacroOrbital(1.3, 0.4), an.MacroOrbital(1.3, 1.1)
    anti = an.two_body_symmetrized_product(mo1, mo2, -1)
    a, b, c, d_ = (rng.uniform(0.05, 2, 50) for _ in range(4))
    swap = np.max(np.abs(anti(a, b, c, d_) + anti(c, d_, a, b)))
    equal = np.max(np.abs(an.two_body_symmetrized_product(mo1, mo1, -1)(a, b, c, d_)))
    worst = max(dens, fact, swap, equal)
    ok = dens < 1e-14 and fact < 1e-12 and swap < 1e-12 and equal < 1e-12
    return float(worst), "density 1e-14, factorization 1e-12, antisymmetry 1e-12", ok


CHECKS: list[tuple[str, Callable]] = [
    ("ground_state_ratio", check_ground_ratio),
    ("momentum_anchors", check_momentum_anchors),
    ("oracle_equivalence", check_oracle_equivalence),
    ("convergence_order", check_convergence_order),
    ("delta_limit", check_delta_limit),
    ("expectation_x", check_expectation_x),
    ("zero_point_force", check_zero_point_force),
    ("macro_orbital_operator", check_macro_orbital),
    ("appendix_classification", check_appendix),
    ("thermal", check_thermal),
    ("property_suites", check_properties),
]


def run_selftest(geometry: BoxGeometry = BoxGeometry(2.0), units: PhysicalUnits = PhysicalUnits(),
                 time_budget: float = 60.0) -> list[CheckResult]:
    start = time.perf_counter()
    results = []
    for name, fn in CHECKS:
        try:
            measured, bound, passed = fn(geometry, units)
        except (nm.EigenSolverError, ValueError) as exc:
            measured, bound, passed = math.nan, f"raised {type(exc).__name__}: {exc}", False
        results.append(CheckResult(name, float(measured), bound, bool(passed)))
    elapsed = time.perf_counter() - start
    results.append(CheckResult("runtime_seconds", elapsed, f"< {time_budget:g}", elapsed < time_budget))
    return results
