"""Finite-difference oracle for the relative-motion equation.

The operator ``-(hbar^2/m) d^2/dx^2 + V(x)`` is discretized with the 3-point
stencil on the interior of a uniform grid (Dirichlet ends), giving a
symmetric tridiagonal matrix. Eigenvalues come from Sturm-sequence
bisection, eigenvectors from inverse iteration.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from hardcore1d.grid import Grid
from hardcore1d.units import BoxGeometry, PhysicalUnits

DEFAULT_UNITS = PhysicalUnits()
DEFAULT_NPOINTS = 4000
DEFAULT_A_LADDER = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
DEFAULT_W_FACTOR = 2.0
HARD_WALL_A = 1e8
RESIDUAL_TOL = 1e-8
WORKERS_ENV = "HARDCORE1D_WORKERS"


class EigenSolverError(RuntimeError):
    """Raised when bisection or inverse iteration fails to converge."""


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix acting on the interior grid points."""

    diag: np.ndarray
    off: np.ndarray
    grid: Grid | None = None

    def __post_init__(self):
        if len(self.off) != len(self.diag) - 1:
            raise ValueError("off-diagonal must have length n - 1")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def norm(self) -> float:
        """Infinity norm (max absolute row sum)."""
        a = np.abs(self.off)
        rows = np.abs(self.diag).copy()
        rows[:-1] += a
        rows[1:] += a
        return float(rows.max())

    def gershgorin(self) -> tuple[float, float]:
        a = np.abs(self.off)
        radius = np.zeros_like(self.diag)
        radius[:-1] += a
        radius[1:] += a
        return float((self.diag - radius).min()), float((self.diag + radius).max())

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True)
class RegularizedDelta:
    """Square barrier of total area ``A`` and width ``w`` standing in for A*delta(x - center)."""

    A: float
    w: float
    center: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.A) and self.A >= 0):
            raise ValueError("barrier strength must be finite and >= 0")
        if not self.w > 0:
            raise ValueError("barrier width must be > 0")

    def __call__(self, x):
        x = np.asarray(x, float)
        return np.where(np.abs(x - self.center) < 0.5 * self.w, self.A / self.w, 0.0)

    def cell_averaged(self, grid: Grid) -> np.ndarray:
        """Barrier averaged over each grid cell; keeps the area exactly A."""
        x = grid.points
        h = grid.spacing
        lo = np.maximum(x - 0.5 * h, self.center - 0.5 * self.w)
        hi = np.minimum(x + 0.5 * h, self.center + 0.5 * self.w)
        overlap = np.clip(hi - lo, 0.0, None)
        return (self.A / self.w) * overlap / h


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (count, npoints), full grid incl. zero ends
    residuals: np.ndarray
    grid: Grid | None = None

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class DeltaLimitRow:
    A: float
    eta0_abs: float
    l2_dist_to_phi_plus: float
    V_expect: float
    E0_numeric: float
    reference: bool = False


@dataclass(frozen=True)
class NumericLevel:
    n: int
    q: float
    E: float


# --------------------------------------------------------------------------
# operator assembly
# --------------------------------------------------------------------------

def build_hamiltonian(grid: Grid, potential: Callable | np.ndarray | float | None = None,
                      units: PhysicalUnits = DEFAULT_UNITS) -> TridiagonalOperator:
    """Discretize ``-(hbar^2/m) d^2/dx^2 + V`` on the grid interior.

    ``potential`` may be a callable of x, an array sampled on the full grid
    (endpoints ignored) or on the interior, a constant, or None.
    """
    m = grid.npoints - 2
    if potential is None:
        V = np.zeros(m)
    elif callable(potential):
        V = np.asarray(potential(grid.interior), float) * np.ones(m)
    else:
        V = np.asarray(potential, float)
        if V.ndim == 0:
            V = np.full(m, float(V))
        elif V.shape == (grid.npoints,):
            V = V[1:-1]
        elif V.shape != (m,):
            raise ValueError("potential array does not match the grid")
    if not np.all(np.isfinite(V)):
        raise ValueError("potential has non-finite samples")
    t = units.hbar**2 / (units.mass * grid.spacing**2)
    return TridiagonalOperator(2.0 * t + V, np.full(m - 1, -t), grid)


# --------------------------------------------------------------------------
# eigensolver
# --------------------------------------------------------------------------

def sturm_count(diag: Sequence[float], off_sq: Sequence[float], x: float, pivmin: float) -> int:
    """Number of eigenvalues strictly below ``x`` (LDL^T pivot signs)."""
    count = 0
    p = diag[0] - x
    if abs(p) < pivmin:
        p = -pivmin
    if p < 0:
        count += 1
    for i in range(1, len(diag)):
        p = diag[i] - x - off_sq[i - 1] / p
        if abs(p) < pivmin:
            p = -pivmin
        if p < 0:
            count += 1
    return count


def bisect_eigenvalues(H: TridiagonalOperator, count: int, max_iter: int = 200) -> np.ndarray:
    """Lowest ``count`` eigenvalues by bisection on the Sturm count."""
    diag = H.diag.tolist()
    off_sq = (H.off**2).tolist()
    lo0, hi0 = H.gershgorin()
    scale = max(abs(lo0), abs(hi0), 1e-300)
    eps = np.finfo(float).eps
    pivmin = max(float(np.max(H.off**2, initial=0.0)) * 1e-300, np.finfo(float).tiny)
    abstol = 2.0 * eps * scale
    values = np.empty(count)
    lo_hint = lo0
    for j in range(count):
        lo, hi = lo_hint, hi0
        for _ in range(max_iter):
            if hi - lo <= abstol + 2.0 * eps * max(abs(lo), abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if sturm_count(diag, off_sq, mid, pivmin) > j:
                hi = mid
            else:
                lo = mid
        else:
            raise EigenSolverError(f"bisection did not converge for eigenvalue {j}")
        values[j] = 0.5 * (lo + hi)
        lo_hint = lo
    return values


def _shifted_banded(H: TridiagonalOperator, shift: float) -> np.ndarray:
    ab = np.zeros((3, H.size))
    ab[0, 1:] = H.off
    ab[1] = H.diag - shift
    ab[2, :-1] = H.off
    return ab


def inverse_iteration(H: TridiagonalOperator, values: np.ndarray, max_iter: int = 8,
                      tol: float = RESIDUAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors for known eigenvalues; returns (vectors, residuals) on the interior."""
    n = H.size
    norm = H.norm()
    eps = np.finfo(float).eps
    rng = np.random.default_rng(12345)  # fixed start vectors keep runs reproducible
    vecs = np.empty((len(values), n))
    res = np.empty(len(values))
    for j, lam in enumerate(values):
        shift = lam + 10.0 * eps * norm  # keep the shifted system numerically nonsingular
        ab = _shifted_banded(H, shift)
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        r = math.inf
        for _ in range(max_iter):
            v = solve_banded((1, 1), ab, v, check_finite=False)
            # Gram-Schmidt against earlier vectors separates clustered eigenvalues
            for i in range(j):
                v -= np.dot(vecs[i], v) * vecs[i]
            v /= np.linalg.norm(v)
            r = np.linalg.norm(H.matvec(v) - lam * v) / norm
            if r < tol:
                break
        if not r < tol:
            raise EigenSolverError(f"inverse iteration stalled at residual {r:.3e} for eigenvalue {j}")
        vecs[j] = v
        res[j] = r
    return vecs, res


def _embed(grid: Grid | None, interior: np.ndarray) -> np.ndarray:
    full = np.zeros(interior.shape[:-1] + (interior.shape[-1] + 2,))
    full[..., 1:-1] = interior
    if grid is not None:
        full /= np.sqrt(np.sum(full**2, axis=-1, keepdims=True) * grid.spacing)
    else:
        full /= np.linalg.norm(full, axis=-1, keepdims=True)
    return full


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Make the first interior lobe positive."""
    big = np.flatnonzero(np.abs(v) > 1e-3 * np.abs(v).max())
    return -v if v[big[0]] < 0 else v


def solve_lowest(H: TridiagonalOperator, count: int) -> EigenResult:
    if not 1 <= count <= H.size:
        raise ValueError(f"count must lie in [1, {H.size}]")
    values = bisect_eigenvalues(H, count)
    vecs, res = inverse_iteration(H, values)
    full = _embed(H.grid, vecs)
    full = np.array([_fix_sign(v) for v in full])
    return EigenResult(values, full, res, H.grid)


# --------------------------------------------------------------------------
# parity sectors
# --------------------------------------------------------------------------

def parity_sector(H: TridiagonalOperator, parity: int) -> tuple[TridiagonalOperator, Callable]:
    """Restrict a mirror-symmetric operator to its even (+1) or odd (-1) sector.

    Returns the reduced operator on the left half and a function mapping its
    interior vectors back to full-grid vectors.
    """
    if parity not in (+1, -1):
        raise ValueError("parity must be +1 or -1")
    d, e = H.diag, H.off
    scale = max(np.abs(d).max(), 1.0)
    if not (np.allclose(d, d[::-1], rtol=1e-12, atol=1e-12 * scale) and np.allclose(e, e[::-1])):
        raise ValueError("operator is not mirror-symmetric")
    m = H.size
    if m % 2 == 0:
        half = m // 2
        dd = d[:half].copy()
        dd[-1] += parity * e[half - 1]
        reduced = TridiagonalOperator(dd, e[: half - 1].copy())

        def unfold(u):
            return np.concatenate([u, parity * u[::-1]])
    else:
        c = (m - 1) // 2
        if parity == -1:
            reduced = TridiagonalOperator(d[:c].copy(), e[: c - 1].copy())

            def unfold(u):
                return np.concatenate([u, [0.0], -u[::-1]])
        else:
            ee = e[:c].copy()
            ee[-1] *= math.sqrt(2.0)
            reduced = TridiagonalOperator(d[: c + 1].copy(), ee)

            def unfold(u):
                mid = u[-1] * math.sqrt(2.0)
                return np.concatenate([u[:-1], [mid], u[:-1][::-1]])
    return reduced, unfold


def solve_sector(H: TridiagonalOperator, parity: int, count: int) -> EigenResult:
    reduced, unfold = parity_sector(H, parity)
    values = bisect_eigenvalues(reduced, count)
    vecs, _ = inverse_iteration(reduced, values)
    interior = np.array([unfold(v) for v in vecs])
    norm = H.norm()
    res = np.array([np.linalg.norm(H.matvec(v) - lam * v) / (norm * np.linalg.norm(v))
                    for v, lam in zip(interior, values)])
    full = _embed(H.grid, interior)
    full = np.array([_fix_sign(v) for v in full])
    return EigenResult(values, full, res, H.grid)


# --------------------------------------------------------------------------
# quadrature on grids
# --------------------------------------------------------------------------

def expectation_numeric(vector: np.ndarray, grid: Grid, weight: Callable | np.ndarray | None = None) -> float:
    """Trapezoid value of int weight(x) |v(x)|^2 dx over the full grid."""
    x = grid.points
    v2 = np.abs(np.asarray(vector)) ** 2
    if weight is None:
        w = 1.0
    elif callable(weight):
        w = np.asarray(weight(x), float)
    else:
        w = np.asarray(weight, float)
    return float(np.trapezoid(w * v2, x))


def free_box_stencil_eigenvalues(length: float, npoints: int, count: int,
                                 units: PhysicalUnits = DEFAULT_UNITS) -> np.ndarray:
    """Exact eigenvalues of the 3-point Dirichlet stencil on an interval."""
    h = length / (npoints - 1)
    s = np.arange(1, count + 1)
    return units.hbar**2 / units.mass * (4.0 / h**2) * np.sin(s * math.pi * h / (2.0 * length)) ** 2


# --------------------------------------------------------------------------
# studies
# --------------------------------------------------------------------------

def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _delta_row(A: float, w_factor: float, geometry: BoxGeometry, units: PhysicalUnits,
               npoints: int) -> DeltaLimitRow:
    d = geometry.d
    grid = Grid(-d, d, npoints)
    barrier = RegularizedDelta(A, w_factor * grid.spacing)
    V = barrier.cell_averaged(grid)
    H = build_hamiltonian(grid, V, units)
    res = solve_sector(H, +1, 1)
    eta = res.eigenvectors[0]
    x = grid.points
    q0 = math.pi / d
    phi = np.sin(q0 * np.abs(x)) / math.sqrt(d)
    dist = math.sqrt(np.trapezoid((eta - phi) ** 2, x))
    return DeltaLimitRow(A=A, eta0_abs=abs(float(np.interp(0.0, x, eta))),
                         l2_dist_to_phi_plus=dist,
                         V_expect=expectation_numeric(eta, grid, V),
                         E0_numeric=float(res.eigenvalues[0]), reference=(A == 0))


def delta_limit_study(A_ladder: Sequence[float] = DEFAULT_A_LADDER, geometry: BoxGeometry = BoxGeometry(2.0),
                      units: PhysicalUnits = DEFAULT_UNITS, npoints: int = DEFAULT_NPOINTS,
                      w_factor: float = DEFAULT_W_FACTOR) -> list[DeltaLimitRow]:
    """Lowest even state on ``[-d, d]`` with a regularized contact barrier, per strength.

    ``w_factor`` is the barrier width in grid spacings. The A = 0 row is the
    contact-free cosine reference.
    """
    if w_factor < 2.0 - 1e-12:
        raise ValueError("barrier narrower than 2 grid spacings is under-resolved")
    ladder = [float(a) for a in A_ladder]
    if any(a < 0 for a in ladder):
        raise ValueError("negative barrier strengths are not supported")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("A ladder must be strictly ascending")
    workers = min(_worker_count(), len(ladder))
    args = [(a, w_factor, geometry, units, npoints) for a in ladder]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_delta_row, *zip(*args)))
    else:
        rows = [_delta_row(*a) for a in args]
    return sorted(rows, key=lambda r: r.A)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


def has_midpoint_node(vector: np.ndarray, grid: Grid, rel_tol: float = 1e-6) -> bool:
    value = float(np.interp(grid.center, grid.points, vector))
    return abs(value) <= rel_tol * float(np.abs(vector).max())


def box_spectrum_numeric(geometry: BoxGeometry, units: PhysicalUnits = DEFAULT_UNITS, n_levels: int = 4,
                         npoints: int = DEFAULT_NPOINTS, method: str = "filter",
                         hard_wall_A: float = HARD_WALL_A) -> list[NumericLevel]:
    """Relative-motion levels of the pair in the box, with the CM node at ``L/2``.

    ``method="filter"`` keeps the Dirichlet states on ``[0, L]`` that have a
    node at the midpoint (the even-numbered ones). ``method="barrier"``
    instead puts a near-impenetrable barrier at the midpoint and takes the
    even-parity states, which acquire the node through the barrier.
    """
    grid = Grid(0.0, geometry.L, npoints)
    if method == "filter":
        H = build_hamiltonian(grid, None, units)
        res = solve_lowest(H, 2 * n_levels)
        keep = [i for i, v in enumerate(res.eigenvectors) if has_midpoint_node(v, grid)]
        expected = list(range(1, 2 * n_levels, 2))
        if keep != expected:
            raise EigenSolverError(f"midpoint-node states at indices {keep}, expected {expected}")
        values = res.eigenvalues[keep]
    elif method == "barrier":
        barrier = RegularizedDelta(hard_wall_A, DEFAULT_W_FACTOR * grid.spacing, center=grid.center)
        H = build_hamiltonian(grid, barrier.cell_averaged(grid), units)
        values = solve_sector(H, +1, n_levels).eigenvalues
    else:
        raise ValueError(f"unknown method {method!r}")
    return [NumericLevel(n, math.sqrt(E * units.mass) / units.hbar, float(E))
            for n, E in enumerate(values)]


def convergence_order(length: float = 1.0, level: int = 1, npoints_ladder: Sequence[int] = (251, 501, 1001, 2001),
                      units: PhysicalUnits = DEFAULT_UNITS) -> dict:
    """Measured order of the eigenvalue error under grid halving on a free interval.

    Reports orders against the exact value and the reference-free
    three-grid Richardson estimate.
    """
    exact = units.hbar**2 / units.mass * (level * math.pi / length) ** 2
    E = []
    for n in npoints_ladder:
        H = build_hamiltonian(Grid(0.0, length, n), None, units)
        E.append(bisect_eigenvalues(H, level)[-1])
    E = np.array(E)
    err = np.abs(E - exact)
    exact_orders = np.log2(err[:-1] / err[1:])
    richardson = np.log2(np.abs(E[:-2] - E[1:-1]) / np.abs(E[1:-1] - E[2:]))
    return {"eigenvalues": E, "errors": err, "orders": exact_orders, "richardson_orders": richardson}
