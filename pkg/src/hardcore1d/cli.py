"""Command-line front end: each subcommand emits one result table.

Exit codes: 0 success, 2 invalid configuration, 3 numeric non-convergence,
4 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from hardcore1d import __version__
from hardcore1d import analytic as an
from hardcore1d import numeric as nm
from hardcore1d import powerlaw_contact as pc
from hardcore1d import thermal as th
from hardcore1d.selftest import inject_stencil_fault, run_selftest
from hardcore1d.table import FORMATS, ResultTable
from hardcore1d.units import BoxGeometry, PhysicalUnits, eps0

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SELFTEST = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    L: float = 2.0
    hbar: float = 1.0
    mass: float = 1.0
    kB: float = 1.0
    npoints: int = nm.DEFAULT_NPOINTS
    n_max: int = 3
    N_max: int = 3
    A_ladder: list = field(default_factory=lambda: [0.0, *nm.DEFAULT_A_LADDER])
    w_factor: float = nm.DEFAULT_W_FACTOR
    alpha: list = field(default_factory=lambda: [0.5, 1.0, 1.5])
    B: float = 1.0
    k: float = 2.0
    T_ladder: list = field(default_factory=lambda: [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0])  # units of T0
    format: str = "csv"
    out: str | None = None
    deterministic: bool = True

    def validate(self):
        for name in ("L", "hbar", "mass", "kB", "w_factor", "B"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive number, got {value!r}")
        if not math.isfinite(self.k):
            raise ConfigError("k must be finite")
        for name in ("npoints", "n_max", "N_max"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ConfigError(f"{name} must be an integer")
        if self.npoints < 5:
            raise ConfigError("npoints must be >= 5")
        if self.n_max < 0 or self.N_max < 0:
            raise ConfigError("n_max and N_max must be >= 0")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if any(a < 0 for a in self.A_ladder):
            raise ConfigError("A ladder values must be >= 0")
        if any(b <= a for a, b in zip(self.A_ladder, self.A_ladder[1:])):
            raise ConfigError("A ladder must be strictly ascending")
        if self.deterministic is not True:
            raise ConfigError("runs are always deterministic")
        return self

    @property
    def geometry(self) -> BoxGeometry:
        return BoxGeometry(self.L)

    @property
    def units(self) -> PhysicalUnits:
        return PhysicalUnits(self.hbar, self.mass, self.kB)

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k != "out"}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Flat JSON object with RunConfig keys; command-line values win."""
    values = {}
    if path:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError("config file must hold a flat object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig) -> ResultTable:
    g, u = cfg.geometry, cfg.units
    t = ResultTable([("n", "1"), ("N", "1"), ("q_n", "1/length"), ("K_N", "1/length"),
                     ("E_k", "energy"), ("E_K", "energy"), ("E", "energy"), ("E_over_eps0", "1")])
    for n in range(cfg.n_max + 1):
        for N in range(cfg.N_max + 1):
            s = an.energy_levels(an.PairQuantumNumbers(n, N), g, u)
            t.add(n, N, s.waves.q, s.waves.K, s.E_k, s.E_K, s.E_total, s.ratio_to_eps0)
    ref = an.noninteracting_comparison(g, u)
    # non-interacting reference: n = N = -1 marks the row, q holds q0', E holds eps0'
    t.add(-1, -1, ref["q0_free"], float("nan"), float("nan"), float("nan"), ref["eps0_free"],
          ref["eps0_free"] / ref["eps0"])
    return t


def cmd_eigenfunction(cfg: RunConfig) -> ResultTable:
    g, u = cfg.geometry, cfg.units
    n, N = cfg.n_max, cfg.N_max
    q, K = an.quantized_q(n, g), an.quantized_K(N, g)
    t = ResultTable([("x", "length"), ("psi_minus", "1"), ("phi_plus", "1"), ("X", "length"),
                     ("zeta_K", "length^-1/2"), ("xi_re", "length^-1/2"), ("xi_im", "length^-1/2")])
    npts = min(cfg.npoints, 2001)
    xs = np.linspace(0.0, g.L, npts)
    Xs = np.linspace(-0.5 * g.L, 0.5 * g.L, npts)
    odd = an.RelativeWaveform(an.SymmetryKind.FERMIONIC_ODD, q)
    cusp = an.RelativeWaveform(an.SymmetryKind.BOSONIC_EVEN_CUSP, q)
    mo = an.MacroOrbital(q, K)
    psi, phi = odd(xs), cusp(xs)
    cmw = an.cm_waveform_eval(K, N, Xs, g)
    xi = an.macro_orbital_eval(mo, xs, Xs)
    for row in zip(xs, psi, phi, Xs, cmw, xi.real, xi.imag):
        t.add(*map(float, row))
    return t


def cmd_expectation(cfg: RunConfig) -> ResultTable:
    g = cfg.geometry
    t = ResultTable([("n", "1"), ("loops", "1"), ("q", "1/length"), ("lambda", "length"),
                     ("x_closed", "length"), ("x_quadrature", "length"), ("k_x", "rad"),
                     ("mean_phase", "rad")])
    for n in range(cfg.n_max + 1):
        q = an.quantized_q(n, g)
        w = an.RelativeWaveform(an.SymmetryKind.BOSONIC_EVEN_CUSP, q)
        for s in (1, 2, 3):
            dom = (0.0, s * w.wavelength)
            xc = an.expectation_x(w, dom)
            xq = an.expectation_x(w, dom, method="quadrature")
            t.add(n, s, q, w.wavelength, xc, xq, 2 * q * xc, an.mean_phase(w, dom))
    return t


def cmd_delta_limit(cfg: RunConfig) -> ResultTable:
    g, u = cfg.geometry, cfg.units
    rows = nm.delta_limit_study(cfg.A_ladder, g, u, cfg.npoints, cfg.w_factor)
    two_eps0 = 2.0 * eps0(g, u)
    t = ResultTable([("A", "energy*length"), ("eta0_abs", "length^-1/2"), ("l2_dist_to_phi_plus", "1"),
                     ("V_expect", "energy"), ("E0_numeric", "energy"), ("E0_over_2eps0", "1"),
                     ("reference", "flag")])
    for r in rows:
        t.add(r.A, r.eta0_abs, r.l2_dist_to_phi_plus, r.V_expect, r.E0_numeric, r.E0_numeric / two_eps0,
              r.reference)
    return t


def cmd_alpha_scan(cfg: RunConfig) -> ResultTable:
    t = ResultTable([("alpha", "1"), ("regime", "label"), ("finite_value", "energy"),
                     ("slope", "1"), ("expected_slope", "1"), ("confirmed", "flag")])
    for a in cfg.alpha:
        if not a > 0:
            raise ConfigError(f"alpha={a!r} rejected: alpha must be > 0")
        p = pc.PowerLawStrength(cfg.B, a)
        reg = pc.classify_limit(p, cfg.k)
        value = reg.value if reg.regime is pc.Regime.FINITE else float("nan")
        t.add(float(a), str(reg), value, pc.ladder_slope(p, cfg.k), 1.0 - a, pc.confirm_regime(p, cfg.k))
    return t


def cmd_thermal(cfg: RunConfig) -> ResultTable:
    g, u = cfg.geometry, cfg.units
    T0 = th.characteristic_temperature(g, u)
    F0 = th.ground_force(g, u)
    t = ResultTable([("T", "temperature"), ("T_over_T0", "1"), ("P0", "1"), ("P1_over_P0", "1"),
                     ("force", "force"), ("force_over_F0", "1"), ("cm_force", "force")])
    for ratio in sorted(cfg.T_ladder):
        if not ratio > 0:
            raise ConfigError(f"T={ratio!r} rejected: temperature must be > 0")
        T = ratio * T0
        occ = th.occupations(T, g, u)
        f = th.thermal_force(T, g, u)
        t.add(T, ratio, float(occ.probabilities[0]), occ.ratio_first_excited, f, f / F0,
              th.thermal_cm_force(T, g, u))
    return t


def cmd_force(cfg: RunConfig) -> ResultTable:
    u = cfg.units
    t = ResultTable([("L", "length"), ("d", "length"), ("F_closed", "force"), ("F_L_form", "force"),
                     ("F_finite_difference", "force"), ("rel_error", "1"), ("F_d3", "force*length^3")])
    for scale in (0.5, 1.0, 2.0):
        g = BoxGeometry(cfg.L * scale)
        f = an.zero_point_force(g, u)
        t.add(g.L, g.d, f["closed_form"], f["L_form"], f["finite_difference"], f["rel_error"],
              f["closed_form"] * g.d**3)
    return t


def cmd_compare(cfg: RunConfig) -> ResultTable:
    g, u = cfg.geometry, cfg.units
    cmp_ = an.spectrum_compare(cfg.n_max, cfg.N_max, g, u)
    unit = math.pi / g.L
    t = ResultTable([("scheme", "label"), ("label", "label"), ("k1_over_pi_L", "1"), ("k2_over_pi_L", "1"),
                     ("energy", "energy"), ("ground", "flag")])
    for scheme in an.Scheme:
        ground = cmp_.ground(scheme)
        for p in cmp_.pairs(scheme):
            a, b = p.in_units_of(unit)
            t.add(scheme.value, p.label, a, b, p.energy, p == ground)
    return t


def cmd_selftest(cfg: RunConfig, inject_fault: bool = False) -> ResultTable:
    t = ResultTable([("check", "label"), ("measured", "mixed"), ("bound", "label"), ("passed", "flag")])
    if inject_fault:
        with inject_stencil_fault():
            results = run_selftest(cfg.geometry, cfg.units)
    else:
        results = run_selftest(cfg.geometry, cfg.units)
    for r in results:
        t.add(r.name, r.measured, r.bound, r.passed)
    return t


COMMANDS = {
    "spectrum": cmd_spectrum,
    "eigenfunction": cmd_eigenfunction,
    "expectation": cmd_expectation,
    "delta-limit": cmd_delta_limit,
    "alpha-scan": cmd_alpha_scan,
    "thermal": cmd_thermal,
    "force": cmd_force,
    "compare": cmd_compare,
    "selftest": cmd_selftest,
}


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    defaults = RunConfig()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file with run-config keys")
    common.add_argument("--L", type=float, help=f"box length (default {defaults.L})")
    common.add_argument("--npoints", type=int, help=f"grid points (default {defaults.npoints})")
    common.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    common.add_argument("--out", help="write the table here instead of stdout")
    common.add_argument("--n-max", dest="n_max", type=int, help=f"largest relative number (default {defaults.n_max})")
    common.add_argument("--N-max", dest="N_max", type=int, help=f"largest CM number (default {defaults.N_max})")
    common.add_argument("--A-ladder", dest="A_ladder", type=_floats,
                        help="ascending barrier strengths (default 0,1e1,...,1e6)")
    common.add_argument("--w-factor", dest="w_factor", type=float,
                        help=f"barrier width in grid spacings (default {defaults.w_factor:g}, min 2)")
    common.add_argument("--alpha", type=_floats, help="exponents for alpha-scan (default 0.5,1,1.5)")
    common.add_argument("--B", type=float, help="power-law scale for alpha-scan (default 1)")
    common.add_argument("--k", type=float, help="relative wavenumber for alpha-scan (default 2)")
    common.add_argument("--T-ladder", dest="T_ladder", type=_floats,
                        help="temperatures in units of T0 (default 0.01,...,10)")

    parser = argparse.ArgumentParser(prog="hardcore1d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "selftest":
            p.add_argument("--inject-fault", action="store_true",
                           help="perturb the stencil to confirm the suite catches it")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "inject_fault")}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "selftest":
            table = cmd_selftest(cfg, args.inject_fault)
        else:
            table = COMMANDS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except nm.EigenSolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    table.stamp(args.command, cfg.echo(), __version__)
    text = table.render(cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "selftest" and not all(table.column("passed")):
        return EXIT_SELFTEST
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
