import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hardcore1d import analytic as an
from hardcore1d.analytic import SymmetryKind as S
from hardcore1d.units import BoxGeometry, PhysicalUnits, eps0

PI = math.pi
finite = st.floats(-50, 50, allow_nan=False)
positive = st.floats(0.05, 20, allow_nan=False)


# -- coordinates and momenta ------------------------------------------------

def test_cm_transform_examples():
    assert an.cm_transform(0, 0, 0, 0) == (0, 0, 0, 0)
    assert an.cm_transform(-1.0, 1.0, -2.0, 2.0) == (2.0, 0.0, 4.0, 0.0)
    L = 2.0
    _, _, k, K = an.cm_transform(0, 0, -3 * PI / (2 * L), 5 * PI / (2 * L))
    assert k == pytest.approx(4 * PI / L, rel=1e-15)
    assert K == pytest.approx(PI / L, rel=1e-15)


@given(finite, finite, finite, finite)
def test_cm_transform_round_trip(x1, x2, k1, k2):
    back = an.cm_inverse(*an.cm_transform(x1, x2, k1, k2))
    np.testing.assert_allclose(back, (x1, x2, k1, k2), rtol=1e-13, atol=1e-12)


def test_decompose_momenta_examples(box):
    w = an.decompose_momenta(PI / box.d, PI / box.L)
    assert w.k1 == pytest.approx(-3 * PI / (2 * box.L), rel=1e-15)
    assert w.k2 == pytest.approx(5 * PI / (2 * box.L), rel=1e-15)
    w = an.decompose_momenta(1.0, 0.0)
    assert (w.k1, w.k2) == (-1.0, 1.0)
    w = an.decompose_momenta(0.0, 2.0)
    assert (w.k1, w.k2) == (1.0, 1.0)
    assert w.wavelength == math.inf


@given(positive, finite)
def test_wavenumber_invariants(q, K):
    w = an.decompose_momenta(q, K)
    assert w.k == 2 * q
    assert w.k1 + w.k2 == pytest.approx(K, abs=1e-12)
    assert w.k2 - w.k1 == pytest.approx(w.k, rel=1e-12, abs=1e-12)
    assert w.wavelength == pytest.approx(2 * PI / q)
    c = w.collided()
    assert abs(c.k) == pytest.approx(abs(w.k)) and c.K == w.K
    assert (c.k1, c.k2) == pytest.approx((w.k2, w.k1))


def test_quantized_values():
    assert an.quantized_q(0, BoxGeometry(2.0)) == pytest.approx(PI)
    assert an.quantized_q(1, BoxGeometry(2.0)) == pytest.approx(2 * PI)
    assert an.quantized_q(0, BoxGeometry(4.0)) == pytest.approx(PI / 2)
    assert an.quantized_K(0, BoxGeometry(2.0)) == pytest.approx(PI / 2)
    assert an.quantized_K(3, BoxGeometry(1.0)) == pytest.approx(4 * PI)
    assert an.quantized_K(0, BoxGeometry(4.0)) == pytest.approx(an.quantized_K(0, BoxGeometry(2.0)) / 2)
    for f in (an.quantized_q, an.quantized_K):
        with pytest.raises(ValueError):
            f(-1, BoxGeometry(1.0))


# -- energies ---------------------------------------------------------------

def test_ground_energy_ratio(box, units):
    s = an.energy_levels(an.PairQuantumNumbers(0, 0), box, units)
    assert s.ratio_to_eps0 == pytest.approx(17 / 8, rel=1e-15)
    assert round(s.ratio_to_eps0, 2) == 2.12
    assert s.E_K / s.E_total == pytest.approx(1 / 17, rel=1e-14)


def test_first_excited_relative_level(box, units):
    # (h^2/16mL^2)(16*4 + 1) with h = 2pi, L = 2
    s = an.energy_levels(an.PairQuantumNumbers(1, 0), box, units)
    assert s.E_total == pytest.approx(65 * PI**2 / 16, rel=1e-14)


@settings(max_examples=60)
@given(st.integers(0, 30), st.integers(0, 30), st.floats(0.1, 10), st.floats(0.2, 5), st.floats(0.2, 5))
def test_energy_additivity_and_shares(n, N, L, hbar, m):
    g, u = BoxGeometry(L), PhysicalUnits(hbar, m)
    s = an.energy_levels(an.PairQuantumNumbers(n, N), g, u)
    # box form written with h against hbar^2 k^2/4m + hbar^2 K^2/4m
    assert s.E_total == pytest.approx(s.E_k + s.E_K, rel=1e-12)
    assert s.E_k == pytest.approx(hbar**2 * s.waves.k**2 / (4 * m), rel=1e-14)
    assert s.share_per_particle * 2 == s.E_total


def test_energy_scaling_ladder(units):
    base = an.energy_levels(an.PairQuantumNumbers(2, 1), BoxGeometry(1.0), units).E_total
    for scale in (0.5, 2.0, 4.0):
        g = BoxGeometry(scale)
        assert an.energy_levels(an.PairQuantumNumbers(2, 1), g, units).E_total * scale**2 == pytest.approx(base)
        assert an.quantized_q(0, g) * g.d == pytest.approx(PI)


def test_pair_quantum_numbers_reject_negative():
    with pytest.raises(ValueError):
        an.PairQuantumNumbers(-1, 0)


def test_exact_fractions():
    fr = an.exact_energy_fractions()
    assert fr["E_total"] == an.Fraction(17, 8)
    assert fr["E_K_over_total"] == an.Fraction(1, 17)


def test_noninteracting_comparison(units):
    r = an.noninteracting_comparison(BoxGeometry(2.0), units)
    assert r["eps_ratio"] == pytest.approx(4.0, rel=1e-15)
    assert r["q_ratio"] == pytest.approx(2.0, rel=1e-15)
    r2 = an.noninteracting_comparison(BoxGeometry(4.0), units)
    assert r2["eps0_free"] == pytest.approx(r["eps0_free"] / 4)


# -- waveforms --------------------------------------------------------------

def test_relative_waveform_contact_values():
    assert an.RelativeWaveform(S.FERMIONIC_ODD, 1.7)(0.0) == 0.0
    assert an.RelativeWaveform(S.BOSONIC_EVEN_CUSP, 1.7)(0.0) == 0.0
    assert an.RelativeWaveform(S.EVEN_COSINE, 1.7)(0.0) == pytest.approx(math.sqrt(2))


@given(positive, st.lists(finite, min_size=1, max_size=50))
def test_density_equality(q, xs):
    x = np.array(xs)
    a = an.RelativeWaveform(S.FERMIONIC_ODD, q)(x) ** 2
    b = an.RelativeWaveform(S.BOSONIC_EVEN_CUSP, q)(x) ** 2
    assert np.max(np.abs(a - b)) <= 1e-14


@given(positive)
def test_cusp_form_is_even(q):
    x = np.linspace(-5, 5, 101)
    w = an.RelativeWaveform(S.BOSONIC_EVEN_CUSP, q)
    np.testing.assert_array_equal(w(x), w(-x))


@pytest.mark.parametrize("kind", [S.FERMIONIC_ODD, S.BOSONIC_EVEN_CUSP])
def test_node_structure(kind):
    q = 2.3
    w = an.RelativeWaveform(kind, q)
    for s in range(1, 6):
        node = s * PI / q
        eps = 1e-6
        assert abs(w(node)) < 1e-12
        assert w(node - eps) * w(node + eps) < 0
    # no extra sign changes between nodes
    x = np.linspace(1e-9, 5 * PI / q - 1e-9, 20001)
    assert np.count_nonzero(np.diff(np.sign(w(x))) != 0) == 4


def test_cm_waveform_walls_and_parity(box):
    K0 = an.quantized_K(0, box)
    assert an.cm_waveform_eval(K0, 0, box.L / 2, box) == pytest.approx(0.0, abs=1e-15)
    assert an.cm_waveform_eval(K0, 0, -box.L / 2, box) == pytest.approx(0.0, abs=1e-15)
    assert an.cm_waveform_eval(an.quantized_K(1, box), 1, 0.0, box) == 0.0
    with pytest.raises(ValueError):
        an.cm_waveform_eval(K0, 0, box.L, box)


@pytest.mark.parametrize("N", range(5))
def test_cm_waveform_normalization(box, N):
    K = an.quantized_K(N, box)
    val, _ = quad(lambda X: an.cm_waveform_eval(K, N, X, box) ** 2, -box.L / 2, box.L / 2, epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)
    for X in (-box.L / 2, box.L / 2):
        assert abs(an.cm_waveform_eval(K, N, X, box)) < 1e-14


def test_pair_plane_wave_symmetry():
    assert abs(an.pair_plane_wave_state(1.1, 2.3, 0.7, 0.7, -1)) < 1e-15
    a = an.pair_plane_wave_state(1.1, 2.3, 0.4, -0.9, +1)
    b = an.pair_plane_wave_state(1.1, 2.3, -0.9, 0.4, +1)
    assert a == pytest.approx(b, abs=1e-15)


def test_pair_factorization_random():
    rng = np.random.default_rng(2024)
    k1, k2, x1, x2 = (rng.uniform(-6, 6, 1000) for _ in range(4))
    for sign in (+1, -1):
        diff = an.pair_plane_wave_state(k1, k2, x1, x2, sign) - an.pair_factorized_state(k1, k2, x1, x2, sign)
        assert np.max(np.abs(diff)) < 1e-12
    with pytest.raises(ValueError):
        an.pair_plane_wave_state(1, 1, 0, 0, 0)


# -- expectation values -----------------------------------------------------

@pytest.mark.parametrize("kind", list(S))
def test_expectation_x_one_wavelength(box, kind):
    q = an.quantized_q(0, box)
    w = an.RelativeWaveform(kind, q)
    assert an.expectation_x(w) == pytest.approx(box.d, abs=1e-14)
    assert an.expectation_x(w, method="quadrature") == pytest.approx(box.d, abs=1e-3)


def test_expectation_x_extended_domain(box):
    w = an.RelativeWaveform(S.BOSONIC_EVEN_CUSP, an.quantized_q(0, box))
    lam = w.wavelength
    assert an.expectation_x(w, (0, 3 * lam), method="quadrature") == pytest.approx(1.5 * lam, abs=1e-8)
    assert an.expectation_x(w, (0, 3 * lam)) >= lam / 2


def test_expectation_x_closed_matches_quadrature_on_odd_domain():
    w = an.RelativeWaveform(S.FERMIONIC_ODD, 1.9)
    dom = (0.3, 4.1)
    assert an.expectation_x(w, dom) == pytest.approx(an.expectation_x(w, dom, method="quadrature"), abs=1e-9)
    with pytest.raises(ValueError):
        an.expectation_x(w, (1.0, 1.0))


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("loops", [1, 2, 3, 4])
def test_uncertainty_style_bound(box, n, loops):
    q = an.quantized_q(n, box)
    w = an.RelativeWaveform(S.FERMIONIC_ODD, q)
    x = an.expectation_x(w, (0, loops * w.wavelength))
    assert x >= w.wavelength / 2 * (1 - 1e-12)
    assert 2 * q * x >= 2 * PI * (1 - 1e-12)


def test_phase_correlation():
    w = an.RelativeWaveform(S.BOSONIC_EVEN_CUSP, 1.3)
    assert an.phase_correlation(w, 0.0) == 0.0
    phis = np.linspace(0, 2 * PI, 2001)
    assert phis[np.argmax(an.phase_correlation(w, phis))] == pytest.approx(PI, abs=1e-2)
    np.testing.assert_allclose(an.phase_correlation(w, phis + 2 * PI), an.phase_correlation(w, phis), atol=1e-12)
    for s in range(1, 4):
        assert an.phase_correlation(w, 2 * PI * s) < 1e-28
    assert an.mean_phase(w) == pytest.approx(2 * PI, abs=1e-9)
    assert an.mean_phase(w, (0, 2 * w.wavelength)) > 2 * PI


def test_expectation_delta_potential():
    assert an.expectation_delta_potential(an.RelativeWaveform(S.FERMIONIC_ODD, 3.0)) == 0.0
    assert an.expectation_delta_potential(an.RelativeWaveform(S.BOSONIC_EVEN_CUSP, 3.0)) == 0.0
    with pytest.raises(ValueError):
        an.expectation_delta_potential(an.RelativeWaveform(S.EVEN_COSINE, 3.0))


# -- forces -----------------------------------------------------------------

def test_zero_point_force(box, units):
    f = an.zero_point_force(box, units)
    assert f["closed_form"] * 2 * units.mass * box.d**3 / units.h**2 == pytest.approx(1.0, rel=1e-15)
    assert f["L_form"] == pytest.approx(f["closed_form"], rel=1e-15)
    assert f["rel_error"] < 1e-6


def test_zero_point_force_scaling(units):
    values = [an.zero_point_force(BoxGeometry.from_half_length(d), units)["closed_form"] * d**3
              for d in (0.5, 1.0, 2.0)]
    assert values == pytest.approx([values[0]] * 3, rel=1e-14)
    with pytest.raises(ValueError):
        an.ground_relative_energy(0.0)


# -- macro-orbitals ---------------------------------------------------------

def test_macro_orbital_node_and_modulus():
    mo = an.MacroOrbital(PI, PI / 2)
    assert an.macro_orbital_eval(mo, 0.0, 0.3) == 0
    a = an.macro_orbital_eval(mo, 0.37, -0.8)
    b = an.macro_orbital_eval(mo, 0.37, 5.1)
    assert abs(a) == pytest.approx(abs(b), rel=1e-15)


@pytest.mark.parametrize("kind", list(S))
def test_macro_orbital_normalization(kind):
    mo = an.MacroOrbital(2.2, 0.7, kind)
    lo, hi = mo.exclusive_domain
    val, _ = quad(lambda x: abs(an.macro_orbital_eval(mo, x, 0.4)) ** 2, lo, hi, epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_paired_operator_eigencheck(units):
    r = an.paired_operator_eigencheck(an.MacroOrbital(PI, 0.0), units=units)
    assert r["residual"] < 1e-4
    assert r["eigenvalue"] == pytest.approx(0.5 * an.relative_energy(2 * PI, units))

    mo = an.MacroOrbital(PI, PI / 2)
    r = an.paired_operator_eigencheck(mo, units=units)
    assert r["residual"] < 1e-4
    # single-particle q- and K-motion energies hbar^2q^2/2m + hbar^2K^2/8m
    assert r["eigenvalue"] == pytest.approx(PI**2 / 2 + (PI / 2) ** 2 / 8, rel=1e-14)
    assert r["measured"] == pytest.approx(r["eigenvalue"], rel=1e-4)


def test_paired_operator_rejects_coarse_grid():
    mo = an.MacroOrbital(PI, 0.0)
    from hardcore1d.grid import Grid
    with pytest.raises(ValueError):
        an.paired_operator_eigencheck(mo, Grid(-1, 1, 41), Grid(-1, 1, 401))


def test_symmetrized_product():
    mo1, mo2 = an.MacroOrbital(1.5, 0.3), an.MacroOrbital(1.5, 0.9)
    rng = np.random.default_rng(3)
    a, b, c, d = (rng.uniform(0.01, 2, 100) for _ in range(4))
    plus = an.two_body_symmetrized_product(mo1, mo2, +1)
    minus = an.two_body_symmetrized_product(mo1, mo2, -1)
    np.testing.assert_allclose(plus(a, b, c, d), plus(c, d, a, b), atol=1e-13)
    np.testing.assert_allclose(minus(a, b, c, d), -minus(c, d, a, b), atol=1e-13)
    assert np.max(np.abs(an.two_body_symmetrized_product(mo1, mo1, -1)(a, b, c, d))) == 0
    assert len(plus.terms) == 2
    assert [p for p, _ in minus.terms] == [1, -1]


# -- spectrum comparison and validity --------------------------------------

def test_spectrum_compare(box):
    cmp_ = an.spectrum_compare(4, 4, box)
    unit = PI / box.L
    assert cmp_.illustrative_only
    g = cmp_.ground(an.Scheme.MACRO_ORBITAL)
    assert g.in_units_of(unit) == pytest.approx((-1.5, 2.5))
    pw = cmp_.ground(an.Scheme.PLANE_WAVE_INTEGER)
    assert pw.in_units_of(unit) == pytest.approx((-1.0, 1.0))
    free = cmp_.pairs(an.Scheme.NON_INTERACTING)
    assert sorted(abs(v) for p in free for v in p.in_units_of(unit)) == pytest.approx([1.0] * 8)
    for p in cmp_.pairs(an.Scheme.MACRO_ORBITAL):
        for v in p.in_units_of(unit):
            assert 2 * v == pytest.approx(round(2 * v), abs=1e-12)
    for p in cmp_.pairs(an.Scheme.PLANE_WAVE_INTEGER):
        for v in p.in_units_of(unit):
            assert v == pytest.approx(round(v), abs=1e-12)
    with pytest.raises(ValueError):
        an.spectrum_compare(-1, 0, box)


def test_hc_validity_check():
    assert an.hc_validity_check(123.0, 0.0)
    assert an.hc_validity_check(2 * PI / 0.5, 0.5)
    assert not an.hc_validity_check(3 * PI / 0.5, 0.5)
    with pytest.raises(ValueError):
        an.hc_validity_check(1.0, -0.1)


def test_eps0_consistency(box, units):
    assert an.relative_energy(2 * an.quantized_q(0, box), units) == pytest.approx(2 * eps0(box, units), rel=1e-15)
