"""Shooting solvers for the radial annulus problem.

Everything here reduces a boundary-value question on the annulus
1 < r < R to scanning the inner log-profile value s = xi(0): the inner
Robin condition fixes xi_t(0) = c1 * exp(-s) exactly, the trajectory is
integrated across the annulus, and the outer Robin residual becomes a
scalar function of s whose zeros are the solutions.

On top of the basic solver sit three investigations:

* ``find_r_star``    -- smallest outer radius at which the problem with
                        negative-total boundary data becomes solvable;
* ``verify_bifurcation`` -- locates the radius where the rotationally
                        symmetric branch count jumps (1 -> 3) and compares
                        it against the closed-form prediction;
* ``counterexample_sweep`` -- one-parameter family of solutions whose
                        C^1 data stays bounded on a fixed annulus while
                        the Hessian at the inner boundary blows up.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .radial import (
    AnnulusProblem,
    RadialState,
    integrate,
    ode_rhs,
    outer_bc_residual,
    theta_constant,
    u_from_xi,
)
from . import schouten, symfn

__all__ = [
    "ScanSpec",
    "AnnulusSolution",
    "ShootingDiagnostics",
    "ShootingResult",
    "solve_annulus",
    "cylinder_solution",
    "bifurcation_threshold",
    "BifurcationResult",
    "verify_bifurcation",
    "RStarResult",
    "find_r_star",
    "CounterexampleRow",
    "CounterexampleSweep",
    "counterexample_sweep",
    "SWEEP_COLUMNS",
]

# Seeds are clipped slightly inside the ellipticity guard so the very
# first integrator step is well-posed.
SEED_MARGIN = 1e-9


def resolve_threads(threads: int | None = None) -> int:
    """Worker count for scan evaluation: explicit arg, else SYL_THREADS."""
    if threads is not None:
        return max(1, int(threads))
    raw = os.environ.get("SYL_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return 1


def cylinder_solution(n: int, k: int) -> tuple[float, float]:
    """Equilibrium of the radial ODE and the matching profile scale.

    Returns (xi_cyl, scale) where xi = xi_cyl is the constant trajectory
    and scale = u(1) = exp(-(n-2) xi_cyl / 2) is the profile value at the
    inner boundary.  Exists only for n > 2k.
    """
    if not n > 2 * k:
        raise ValueError(f"no cylinder equilibrium for n={n}, k={k}")
    th = theta_constant(n, k)
    xi_cyl = math.log(2.0 * k * th / (n - 2.0 * k)) / (2.0 * k)
    scale = math.exp(-0.5 * (n - 2.0) * xi_cyl)
    # The equilibrium spectrum must have sigma_k exactly one.
    lam = schouten.radial_spectrum(xi_cyl, 0.0, 0.0, n)
    if abs(symfn.sigma_k(lam, k) - 1.0) > 1e-10:
        raise AssertionError("cylinder equilibrium failed its sigma_k check")
    return xi_cyl, scale


def bifurcation_threshold(n: int, k: int) -> float:
    """Outer radius at which the symmetric branch first multiplies.

    The linearization around the cylinder equilibrium oscillates with
    angular frequency sqrt(n-2k); a half-period fits the annulus exactly
    when ln R = pi / sqrt(n-2k).
    """
    if not n > 2 * k:
        raise ValueError(f"no cylinder equilibrium for n={n}, k={k}")
    return math.exp(math.pi / math.sqrt(n - 2.0 * k))


@dataclass(frozen=True)
class ScanSpec:
    """Uniform grid of inner values s = xi(0) for the shooting scan."""

    lo: float
    hi: float
    num: int = 2000

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("scan window must have lo < hi")
        if self.num < 2:
            raise ValueError("scan needs at least two points")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.num)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.num - 1)


def default_scan(n: int, k: int, *, half_width: float = 5.0,
                 num: int = 2000) -> ScanSpec:
    """Scan window centred on the cylinder value (or 0 when there is none)."""
    center = cylinder_solution(n, k)[0] if n > 2 * k else 0.0
    return ScanSpec(center - half_width, center + half_width, num)


@dataclass(frozen=True)
class AnnulusSolution:
    """One shooting solution: inner data, outer residual, trajectory."""

    xi0: float
    xi_t0: float
    residual: float
    trajectory: object

    @property
    def inner_u(self) -> float:
        return float(u_from_xi(self.xi0, 0.0, self.trajectory.n))


@dataclass
class ShootingDiagnostics:
    """Scan-level evidence backing a shooting verdict."""

    grid: np.ndarray
    residuals: np.ndarray
    brackets: list = field(default_factory=list)
    gap_runs: list = field(default_factory=list)
    truncated_low: int = 0
    truncated_high: int = 0
    rejected: list = field(default_factory=list)


@dataclass(frozen=True)
class ShootingResult:
    problem: AnnulusProblem
    solutions: tuple
    status: str  # "ok" | "empty" | "inconclusive"
    diagnostics: ShootingDiagnostics

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)


class _Gap(Exception):
    """Raised when a root refinement steps onto an unevaluable seed."""


def _seed_state(s: float, c1: float) -> RadialState | None:
    xi_t0 = c1 * math.exp(-s)
    if abs(xi_t0) > 1.0 - SEED_MARGIN:
        return None
    return RadialState(0.0, float(s), xi_t0)


def _make_residual(problem: AnnulusProblem, rtol: float, atol: float,
                   want_trajectory: bool = False):
    """Outer-residual-of-inner-value map; nan marks unevaluable seeds."""
    T = problem.T

    def fn(s: float):
        seed = _seed_state(s, problem.c1)
        if seed is None:
            return (math.nan, None) if want_trajectory else math.nan
        traj = integrate(seed, T, problem.n, problem.k,
                         rtol=rtol, atol=atol)
        if traj.termination != "reached_T":
            return (math.nan, traj) if want_trajectory else math.nan
        res = outer_bc_residual(traj.final_state, problem.c2, problem.R)
        return (res, traj) if want_trajectory else res

    return fn


def _nan_runs(values: np.ndarray):
    """(interior_runs, leading, trailing): maximal nan runs in the scan."""
    isnan = np.isnan(values)
    runs = []
    i = 0
    m = values.size
    while i < m:
        if isnan[i]:
            j = i
            while j < m and isnan[j]:
                j += 1
            runs.append((i, j - 1))
            i = j
        else:
            i += 1
    leading = trailing = 0
    interior = []
    for (a, b) in runs:
        if a == 0:
            leading = b - a + 1
        elif b == m - 1:
            trailing = b - a + 1
        else:
            interior.append((a, b))
    return interior, leading, trailing


def solve_annulus(
    problem: AnnulusProblem,
    *,
    scan: ScanSpec | None = None,
    scan_rtol: float = 1e-7,
    scan_atol: float = 1e-9,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    residual_bound: float = 1e-10,
    merge_tol: float = 1e-6,
    gap_limit: int = 10,
    polish: bool = True,
    threads: int | None = None,
) -> ShootingResult:
    """Find every rotationally symmetric solution on the annulus.

    Stage one evaluates the outer residual on the scan grid at relaxed
    integrator tolerance and brackets its sign changes; stage two refines
    each bracket with brentq and, when ``polish`` is set, re-brackets and
    re-solves at tight tolerance until the outer residual is below
    ``residual_bound``.  Nearby roots (within ``merge_tol``) are merged.

    Unevaluable seeds -- ellipticity breakdown before the outer boundary,
    cone exit, or an inadmissible seed velocity -- appear as nan entries
    in the scan.  Runs of nans at the scan edges are only truncation;
    a run strictly inside the scan longer than ``gap_limit`` cells makes
    an empty result ``inconclusive`` rather than ``empty``, because a
    root could hide inside the unevaluated band.
    """
    if scan is None:
        scan = default_scan(problem.n, problem.k)
    grid = scan.grid
    coarse = _make_residual(problem, scan_rtol, scan_atol)

    workers = resolve_threads(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            residuals = np.fromiter(pool.map(coarse, grid),
                                    dtype=float, count=grid.size)
    else:
        residuals = np.fromiter((coarse(s) for s in grid),
                                dtype=float, count=grid.size)

    diag = ShootingDiagnostics(grid=grid, residuals=residuals)
    interior, lead, trail = _nan_runs(residuals)
    diag.gap_runs = interior
    diag.truncated_low = lead
    diag.truncated_high = trail

    # Bracket sign changes between adjacent evaluated cells.
    for i in range(grid.size - 1):
        a, b = residuals[i], residuals[i + 1]
        if math.isnan(a) or math.isnan(b):
            continue
        if a == 0.0:
            diag.brackets.append((grid[i], grid[i]))
        elif a * b < 0.0:
            diag.brackets.append((grid[i], grid[i + 1]))
    if grid.size and residuals[-1] == 0.0:
        diag.brackets.append((grid[-1], grid[-1]))

    def guarded(fn):
        def wrapped(s):
            v = fn(s)
            if math.isnan(v):
                raise _Gap(s)
            return v
        return wrapped

    tight = _make_residual(problem, rtol, atol)
    tight_full = _make_residual(problem, rtol, atol, want_trajectory=True)
    coarse_full = _make_residual(problem, scan_rtol, scan_atol,
                                 want_trajectory=True)

    found = []
    for (a, b) in diag.brackets:
        if a == b:
            root = a
        else:
            try:
                root = brentq(guarded(coarse), a, b, xtol=1e-10)
            except (_Gap, ValueError) as exc:
                diag.rejected.append(("coarse_refine_failed", a, b, repr(exc)))
                continue
        if not polish:
            res, traj = coarse_full(root)
            if math.isnan(res):
                diag.rejected.append(("coarse_root_unevaluable", root))
                continue
            found.append(AnnulusSolution(float(root),
                                         problem.c1 * math.exp(-root),
                                         float(res), traj))
            continue

        # Re-bracket around the coarse root at tight tolerance, then solve.
        h = max(scan.spacing * 0.05, 1e-9)
        lo_lim = min(a, b) if a != b else root - scan.spacing
        hi_lim = max(a, b) if a != b else root + scan.spacing
        refined = None
        try:
            for _ in range(9):
                p, q = max(root - h, lo_lim), min(root + h, hi_lim)
                fp, fq = tight(p), tight(q)
                if math.isnan(fp) or math.isnan(fq):
                    raise _Gap(root)
                if fp == 0.0:
                    refined = p
                    break
                if fq == 0.0:
                    refined = q
                    break
                if fp * fq < 0.0:
                    refined = brentq(guarded(tight), p, q, xtol=1e-13)
                    break
                if p == lo_lim and q == hi_lim:
                    break
                h *= 4.0
        except (_Gap, ValueError) as exc:
            diag.rejected.append(("tight_refine_failed", root, repr(exc)))
            continue
        if refined is None:
            refined = root  # residual check below decides its fate
        res, traj = tight_full(refined)
        if math.isnan(res) or abs(res) > residual_bound:
            diag.rejected.append(("residual_bound", refined, res))
            continue
        found.append(AnnulusSolution(float(refined),
                                     problem.c1 * math.exp(-refined),
                                     float(res), traj))

    # Merge near-duplicates, keeping the better residual.
    found.sort(key=lambda sol: sol.xi0)
    merged = []
    for sol in found:
        if merged and sol.xi0 - merged[-1].xi0 < merge_tol:
            if abs(sol.residual) < abs(merged[-1].residual):
                merged[-1] = sol
        else:
            merged.append(sol)

    if merged:
        status = "ok"
    elif any(b - a + 1 > gap_limit for (a, b) in interior):
        status = "inconclusive"
    else:
        status = "empty"
    return ShootingResult(problem, tuple(merged), status, diag)


@dataclass(frozen=True)
class RStarResult:
    """Outcome of the threshold-radius search."""

    n: int
    k: int
    c1: float
    c2: float
    status: str  # "ok" | "anomaly" | "unresolved" | "inconclusive"
    r_star: float | None
    bracket: tuple | None
    history: tuple  # (R, scan status, solution count) per probe


def find_r_star(
    n: int,
    k: int,
    c1: float,
    c2: float,
    *,
    r_init: float = 1.01,
    R_max: float = 64.0,
    rel_tol: float = 1e-4,
    growth: float = 2.0,
    shrink_limit: float = 1e-6,
    scan: ScanSpec | None = None,
    scan_rtol: float = 1e-7,
    scan_atol: float = 1e-9,
    threads: int | None = None,
) -> RStarResult:
    """Smallest outer radius at which the annulus problem is solvable.

    Requires mean-convex-sum data c1 + c2 < 0 and 2 <= k < n/2, the regime
    in which thin annuli are expected to admit no solution.  The search
    grows R geometrically in R - 1 until a solvable radius appears, then
    bisects the (unsolvable, solvable) bracket to relative width
    ``rel_tol`` and reports the midpoint.

    Statuses: ``ok`` (threshold bracketed), ``anomaly`` (solvable all the
    way down to R - 1 = ``shrink_limit``, contradicting the thin-annulus
    expectation), ``unresolved`` (unsolvable all the way up to ``R_max``),
    ``inconclusive`` (a probe scan had a disqualifying interior gap).
    """
    if not c1 + c2 < 0.0:
        raise ValueError("threshold search needs c1 + c2 < 0")
    if not (2 <= k and 2 * k < n):
        raise ValueError("threshold search needs 2 <= k < n/2")
    if not 1.0 < r_init < R_max:
        raise ValueError("need 1 < r_init < R_max")

    history = []

    def solvable(R: float) -> bool | None:
        result = solve_annulus(
            AnnulusProblem(n, k, R, c1, c2), scan=scan,
            scan_rtol=scan_rtol, scan_atol=scan_atol,
            polish=False, threads=threads)
        history.append((R, result.status, len(result.solutions)))
        if result.status == "inconclusive":
            return None
        return result.status == "ok"

    def finish(status, r_star=None, bracket=None):
        return RStarResult(n, k, c1, c2, status, r_star, bracket,
                           tuple(history))

    verdict = solvable(r_init)
    if verdict is None:
        return finish("inconclusive")

    if verdict:
        # Solvable immediately: walk down toward R = 1 looking for the
        # unsolvable side of the bracket.
        hi = r_init
        gap = (r_init - 1.0) / 4.0
        lo = None
        while gap >= shrink_limit:
            R = 1.0 + gap
            v = solvable(R)
            if v is None:
                return finish("inconclusive")
            if v:
                hi = R
                gap /= 4.0
            else:
                lo = R
                break
        if lo is None:
            return finish("anomaly")
    else:
        lo = r_init
        hi = None
        gap = (r_init - 1.0) * growth
        while 1.0 + gap <= R_max:
            R = 1.0 + gap
            v = solvable(R)
            if v is None:
                return finish("inconclusive")
            if v:
                hi = R
                break
            lo = R
            gap *= growth
        if hi is None:
            if history[-1][0] < R_max:
                v = solvable(R_max)
                if v is None:
                    return finish("inconclusive")
                if v:
                    hi = R_max
            if hi is None:
                return finish("unresolved")

    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        v = solvable(mid)
        if v is None:
            return finish("inconclusive")
        if v:
            hi = mid
        else:
            lo = mid
    return finish("ok", r_star=0.5 * (lo + hi), bracket=(lo, hi))


@dataclass(frozen=True)
class BifurcationResult:
    n: int
    k: int
    predicted: float
    located: float | None
    relative_error: float | None
    status: str  # "ok" | "failed"
    history: tuple  # (R, branch count) per probe


def verify_bifurcation(
    n: int,
    k: int,
    *,
    window: float = 0.5,
    num: int = 400,
    scan_rtol: float = 1e-9,
    scan_atol: float = 1e-11,
    span: float = 0.1,
    rel_tol: float = 2e-4,
    threads: int | None = None,
) -> BifurcationResult:
    """Locate the branch-count jump of the zero-Robin annulus problem.

    Scans a window of half-width ``window`` around the cylinder value and
    counts shooting solutions as the outer radius varies; bisects the
    interval [(1-span) thr, (1+span) thr] on the predicate "more than one
    branch" and compares the located transition with the closed form.
    """
    thr = bifurcation_threshold(n, k)
    xi_c = cylinder_solution(n, k)[0]
    scan = ScanSpec(xi_c - window, xi_c + window, num)

    history = []

    def count(R: float) -> int:
        result = solve_annulus(
            AnnulusProblem(n, k, R, 0.0, 0.0), scan=scan,
            scan_rtol=scan_rtol, scan_atol=scan_atol,
            polish=False, threads=threads)
        history.append((R, len(result.solutions)))
        return len(result.solutions)

    lo, hi = (1.0 - span) * thr, (1.0 + span) * thr
    if not (count(lo) <= 1 < count(hi)):
        return BifurcationResult(n, k, thr, None, None, "failed",
                                 tuple(history))
    while hi - lo > rel_tol * thr:
        mid = 0.5 * (lo + hi)
        if count(mid) > 1:
            hi = mid
        else:
            lo = mid
    located = 0.5 * (lo + hi)
    return BifurcationResult(n, k, thr, located, abs(located - thr) / thr,
                             "ok", tuple(history))


SWEEP_COLUMNS = ["eps", "xi0", "xi_t0", "xi_tt0", "T_window", "termination",
                 "sup_u", "sup_u_inv", "sup_grad", "sup_c1", "hessian_inner"]


@dataclass(frozen=True)
class CounterexampleRow:
    """One member of the bounded-C1, unbounded-C2 family.

    ``sup_c1`` is the window supremum of the pointwise sum
    |u| + 1/u + |u'|, the quantity that stays uniformly bounded while
    ``hessian_inner`` diverges.
    """

    eps: float
    xi0: float
    xi_t0: float
    xi_tt0: float
    T_window: float
    termination: str
    sup_u: float
    sup_u_inv: float
    sup_grad: float
    sup_c1: float
    hessian_inner: float

    def as_list(self):
        return [getattr(self, c) for c in SWEEP_COLUMNS]


@dataclass(frozen=True)
class CounterexampleSweep:
    n: int
    k: int
    c: float
    delta: float
    rows: tuple
    R0: float

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SWEEP_COLUMNS)
            for row in self.rows:
                out = []
                for v in row.as_list():
                    out.append(v if isinstance(v, str) else f"{v:.17g}")
                writer.writerow(out)


def counterexample_sweep(
    n: int,
    k: int,
    c: float,
    delta: float,
    eps_values,
    *,
    T_max: float = 10.0,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    num_window: int = 256,
) -> CounterexampleSweep:
    """Sweep the near-degenerate seed family and measure its blow-up.

    Each eps launches the trajectory xi(0) = eps + ln|c|,
    xi_t(0) = -exp(-eps), which starts close to the ellipticity boundary
    with a large positive xi_tt of order eps^(1-k).  Integration stops
    when the trajectory leaves its control window (xi_t reaching
    -1 + delta, or xi_tt falling to zero).  Each row reports the window
    length T and the C^0/C^1/C^2 magnitudes of the reconstructed profile:
    sup |u|, sup 1/u, sup |u'| over the window, and the Hessian scale
    max(|u''|, |u'|) at the inner boundary r = 1.

    The returned R0 = exp(min T) is an annulus radius on which every
    member of the family lives: the C^1 data stays uniformly bounded as
    eps -> 0 while the inner Hessian diverges.
    """
    if k < 2:
        raise ValueError("the blow-up mechanism needs k >= 2")
    if not k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    if not c < 0.0:
        raise ValueError("needs a negative inner Robin constant c")
    if not 0.0 < delta < 0.5:
        raise ValueError("needs 0 < delta < 1/2")
    eps_values = [float(e) for e in eps_values]
    if not eps_values:
        raise ValueError("needs at least one eps")
    for eps in eps_values:
        if not 0.0 < eps < delta:
            raise ValueError(f"eps={eps} violates 0 < eps < delta")
        if not math.exp(-eps) > 1.0 - 0.5 * delta:
            raise ValueError(f"eps={eps} starts outside the control window")

    m = 0.5 * (n - 2.0)
    rows = []
    for eps in eps_values:
        xi0 = eps + math.log(abs(c))
        xi_t0 = -math.exp(-eps)
        xi_tt0 = ode_rhs(xi0, xi_t0, n, k)

        def window_exit(t, y):
            return y[1] - (delta - 1.0)

        window_exit.terminal = True

        def accel_zero(t, y):
            return ode_rhs(y[0], y[1], n, k)

        accel_zero.terminal = True

        traj = integrate((xi0, xi_t0), T_max, n, k, rtol=rtol, atol=atol,
                         extra_events=(window_exit, accel_zero))
        termination = {"event:0": "window_exit", "event:1": "accel_zero"}.get(
            traj.termination, traj.termination)

        pts = traj.sample(num_window)
        ts, xi, xi_t = pts[:, 0], pts[:, 1], pts[:, 2]
        r = np.exp(ts)
        u = u_from_xi(xi, ts, n)
        du = -m * (xi_t + 1.0) * u / r
        u0 = float(u[0])
        du0 = float(du[0])
        d2u0 = m * u0 * (-xi_tt0 + m * (xi_t0 + 1.0) ** 2 + (xi_t0 + 1.0))
        rows.append(CounterexampleRow(
            eps=eps, xi0=xi0, xi_t0=xi_t0, xi_tt0=float(xi_tt0),
            T_window=traj.t_end, termination=termination,
            sup_u=float(np.max(u)), sup_u_inv=float(np.max(1.0 / u)),
            sup_grad=float(np.max(np.abs(du))),
            sup_c1=float(np.max(np.abs(u) + 1.0 / u + np.abs(du))),
            hessian_inner=max(abs(d2u0), abs(du0))))

    R0 = math.exp(min(row.T_window for row in rows))
    return CounterexampleSweep(n, k, float(c), float(delta), tuple(rows), R0)
