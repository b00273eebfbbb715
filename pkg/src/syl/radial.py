"""Radial reduction of the curvature-one equation on an annulus.

In logarithmic coordinates t = ln r the substitution
``u = exp(-(n-2)(xi+t)/2)`` turns the radial sigma_k curvature-one
equation into the autonomous second-order ODE

    xi_tt = theta * exp(-2k xi) * (1-xi_t^2)^(1-k) - (n-2k)/(2k) * (1-xi_t^2)

valid while |xi_t| < 1 (the elliptic branch; the equation degenerates at
the endpoints when k >= 2).  This module provides the coordinate maps,
the right-hand side with its guards, an adaptive integrator with event
truncation, Robin boundary residuals in xi-form, and reconstruction of
the annulus profile u(r) together with its Schouten eigenvalues.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import schouten, symfn

__all__ = [
    "ETA_GUARD",
    "theta_constant",
    "AnnulusProblem",
    "RadialState",
    "Trajectory",
    "xi_from_u",
    "u_from_xi",
    "ode_rhs",
    "ode_invariant",
    "integrate",
    "inner_bc_residual",
    "outer_bc_residual",
    "reconstruct",
    "RadialProfile",
    "CSV_COLUMNS",
]

# Ellipticity guard on 1 - xi_t^2: trajectories are truncated by event
# before the degenerate set is reached, never stepped across it.
ETA_GUARD = 1e-12


def theta_constant(n: int, k: int) -> float:
    """Normalizing constant of the radial ODE: 2^(k-1) / binom(n-1, k-1)."""
    if n < 3 or not 1 <= k <= n:
        raise ValueError(f"bad cone indices n={n}, k={k}")
    return 2.0 ** (k - 1) / math.comb(n - 1, k - 1)


@dataclass(frozen=True)
class AnnulusProblem:
    """Annulus 1 < r < R with Robin constants c1 (inner) and c2 (outer)."""

    n: int
    k: int
    R: float
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("dimension must be at least 3")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k={self.k} out of range for n={self.n}")
        if not self.R > 1.0:
            raise ValueError("outer radius must exceed 1")

    @property
    def theta(self) -> float:
        return theta_constant(self.n, self.k)

    @property
    def T(self) -> float:
        return math.log(self.R)


@dataclass(frozen=True)
class RadialState:
    t: float
    xi: float
    xi_t: float

    @property
    def admissible(self) -> bool:
        return 1.0 - self.xi_t ** 2 > ETA_GUARD


def xi_from_u(u, t, n: int):
    """Logarithmic profile xi = -(2/(n-2)) ln u - t.  Accepts arrays."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("profile must be positive")
    out = -(2.0 / (n - 2.0)) * np.log(u) - np.asarray(t, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def u_from_xi(xi, t, n: int):
    """Inverse of :func:`xi_from_u`: u = exp(-(n-2)(xi+t)/2)."""
    out = np.exp(-0.5 * (n - 2.0)
                 * (np.asarray(xi, dtype=float) + np.asarray(t, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def ode_rhs(xi, xi_t, n: int, k: int, theta: float | None = None):
    """Second derivative xi_tt prescribed by the radial ODE.

    Pure evaluation: callers own the ellipticity guard.  Vectorizes over
    (xi, xi_t) arrays.
    """
    th = theta_constant(n, k) if theta is None else theta
    w = 1.0 - np.asarray(xi_t, dtype=float) ** 2
    out = th * np.exp(-2.0 * k * np.asarray(xi, dtype=float)) * w ** (1 - k) \
        - (n - 2.0 * k) / (2.0 * k) * w
    return float(out) if np.ndim(out) == 0 else out


def ode_invariant(xi, xi_t, n: int, k: int):
    """Conserved quantity of the radial ODE.

    (1-xi_t^2)^k satisfies a linear first-order equation in xi along
    trajectories, which integrates to the constant

        E = (1-xi_t^2)^k exp(-(n-2k) xi) - (2k theta / n) exp(-n xi).

    Orbits with E > 0 never reach |xi_t| = 1; orbits with E < 0 do.  Used
    as an integrator-accuracy oracle.
    """
    th = theta_constant(n, k)
    xi = np.asarray(xi, dtype=float)
    w = 1.0 - np.asarray(xi_t, dtype=float) ** 2
    out = w ** k * np.exp(-(n - 2.0 * k) * xi) \
        - (2.0 * k * th / n) * np.exp(-n * xi)
    return float(out) if np.ndim(out) == 0 else out


class Trajectory:
    """Integrated radial trajectory with dense output.

    Samples are available through :meth:`state`, :meth:`xi` and friends at
    any t in [0, t_end]; ``termination`` records why integration stopped:
    ``reached_T``, ``ellipticity_breakdown``, ``cone_exit`` or
    ``step_failure``.
    """

    def __init__(self, n, k, sol, termination, t_end):
        self.n = n
        self.k = k
        self._sol = sol
        self.termination = termination
        self.t_end = float(t_end)
        self.t_grid = np.asarray(sol.t, dtype=float)

    def xi(self, t):
        return self._eval(t)[0]

    def xi_t(self, t):
        return self._eval(t)[1]

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.t_end + 1e-12):
            raise ValueError("query time outside the integrated range")
        vals = self._sol.sol(np.clip(t, 0.0, self.t_end))
        return vals

    def xi_tt(self, t):
        xi, xi_t = self._eval(t)
        return ode_rhs(xi, xi_t, self.n, self.k)

    def state(self, t) -> RadialState:
        xi, xi_t = self._eval(t)
        return RadialState(float(t), float(xi), float(xi_t))

    @property
    def initial_state(self) -> RadialState:
        return self.state(0.0)

    @property
    def final_state(self) -> RadialState:
        return self.state(self.t_end)

    def sample(self, num: int = 200) -> np.ndarray:
        """(num, 3) array of (t, xi, xi_t) equally spaced on [0, t_end]."""
        ts = np.linspace(0.0, self.t_end, num)
        xi, xi_t = self._eval(ts)
        return np.column_stack([ts, xi, xi_t])


def integrate(
    initial,
    T_max: float,
    n: int,
    k: int,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    extra_events=(),
) -> Trajectory:
    """Integrate the radial ODE from t = 0 until T_max or a terminal event.

    ``initial`` is a RadialState or an (xi, xi_t) pair at t = 0 and must be
    admissible.  Built-in terminal events: ellipticity breakdown
    (1 - xi_t^2 falls to the guard) and, for k >= 2, exit of the eigenvalue
    vector from its cone.  ``extra_events`` are passed through to the
    integrator (scipy event protocol) and, when terminal, produce
    termination cause ``event:<index>``.

    For k >= 2 the right-hand side has a pole on the degenerate set, so
    adaptive steps can underflow slightly before the guard event becomes
    locatable.  When that happens the conserved quantity decides the cause:
    a negative invariant certifies that the orbit reaches |xi_t| = 1 in
    finite time, and such step failures are reported as
    ``ellipticity_breakdown`` (truncated at the last resolvable state).
    """
    if isinstance(initial, RadialState):
        y0 = (initial.xi, initial.xi_t)
    else:
        y0 = (float(initial[0]), float(initial[1]))
    if not 1.0 - y0[1] ** 2 > ETA_GUARD:
        raise ValueError("initial state is not admissible")
    if not T_max > 0.0:
        raise ValueError("T_max must be positive")
    th = theta_constant(n, k)
    beta = (n - 2.0 * k) / (2.0 * k)

    def rhs(t, y):
        # Trial steps may overshoot the degenerate set or fling the state
        # far out; clamping the inputs keeps the evaluation finite so the
        # error estimator rejects the step instead of raising or warning.
        v = y[1] if -1e150 < y[1] < 1e150 else 1e150
        w = max(1.0 - v * v, 1e-30)
        growth = math.exp(min(-2.0 * k * y[0], 700.0))
        return (y[1], th * growth * w ** (1 - k) - beta * w)

    def ellipticity(t, y):
        v = y[1] if -1e150 < y[1] < 1e150 else 1e150
        return 1.0 - v * v - ETA_GUARD

    ellipticity.terminal = True

    events = [ellipticity]
    if k >= 2:
        # sigma_k of the trajectory spectrum is identically one, so cone
        # exit can only announce itself through a lower-order sigma_l.
        # Trajectory spectra are one radial eigenvalue plus an isotropic
        # tangential block, for which sigma_l factors as
        #   C(n-1, l-1) * lam_tan^(l-1) * [lam_rad + (n-l)/l * lam_tan]
        # with a positive prefactor (lam_tan has the sign of 1 - xi_t^2,
        # kept positive by the guard).  Only the bracket can change sign,
        # and evaluating it directly stays exact where sigma_l itself
        # cancels catastrophically once the radial/tangential spread
        # exceeds 1/eps.  The common factor e^{2 xi} is dropped the same
        # way, which also keeps the event finite for runaway states.
        def cone_exit(t, y):
            v = y[1] if -1e150 < y[1] < 1e150 else 1e150
            w = max(1.0 - v * v, 1e-30)
            growth = math.exp(min(-2.0 * k * y[0], 700.0))
            xtt = th * growth * w ** (1 - k) - beta * w
            mu_rad = xtt - 0.5 * w
            mu_tan = 0.5 * w
            return min(mu_rad + (n - l) / l * mu_tan
                       for l in range(1, k + 1))

        cone_exit.terminal = True
        events.append(cone_exit)
    events.extend(extra_events)

    sol = solve_ivp(rhs, (0.0, float(T_max)), y0, method="RK45",
                    rtol=rtol, atol=atol, dense_output=True, events=events)

    if sol.status == -1:
        w_end = 1.0 - float(sol.y[1, -1]) ** 2
        if ode_invariant(y0[0], y0[1], n, k) < 0.0 and w_end < 1e-4:
            termination = "ellipticity_breakdown"
        else:
            termination = "step_failure"
        t_end = float(sol.t[-1])
    elif sol.status == 1:
        hit = [i for i, te in enumerate(sol.t_events) if te.size > 0]
        first = min(hit, key=lambda i: sol.t_events[i][0])
        if first == 0:
            termination = "ellipticity_breakdown"
        elif k >= 2 and first == 1:
            termination = "cone_exit"
        else:
            termination = f"event:{first - (2 if k >= 2 else 1)}"
        t_end = float(sol.t_events[first][0])
    else:
        termination = "reached_T"
        t_end = float(T_max)
    return Trajectory(n, k, sol, termination, t_end)


def inner_bc_residual(state: RadialState, c1: float) -> float:
    """Robin residual at r = 1 in xi-form: xi_t(0) - c1 * exp(-xi(0))."""
    return state.xi_t - c1 * math.exp(-state.xi)


def outer_bc_residual(state: RadialState, c2: float, R: float) -> float:
    """Robin residual at r = R in xi-form: xi_t(T) + c2 * exp(-xi(T)) / R."""
    return state.xi_t + c2 * math.exp(-state.xi) / R


CSV_COLUMNS = ["t", "xi", "xi_t", "xi_tt", "r", "u", "du", "d2u",
               "lam_rad", "lam_tan", "sigma_k_residual"]


@dataclass(frozen=True)
class RadialProfile:
    """Reconstructed annulus profile sampled along a trajectory."""

    n: int
    k: int
    t: np.ndarray
    xi: np.ndarray
    xi_t: np.ndarray
    xi_tt: np.ndarray
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    lam_rad: np.ndarray
    lam_tan: np.ndarray
    sigma_k_residual: np.ndarray

    def rows(self):
        cols = [getattr(self, name) for name in CSV_COLUMNS]
        for i in range(self.t.size):
            yield [float(c[i]) for c in cols]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in self.rows():
                writer.writerow([f"{v:.17g}" for v in row])


def reconstruct(traj: Trajectory, num: int = 200) -> RadialProfile:
    """Sample u, u', u'' and the Schouten eigenvalues along a trajectory.

    The chain rule through u = exp(-(n-2)(xi+t)/2), r = e^t gives

        u'  = -(n-2)/2 * (xi_t + 1) * u / r
        u'' = (n-2)/2 * u / r^2 * [ -xi_tt + (n-2)/2 (xi_t+1)^2 + (xi_t+1) ]

    The sigma_k residual column reports sigma_k(spectrum) - 1, which
    vanishes identically along exact trajectories.
    """
    n, k = traj.n, traj.k
    m = 0.5 * (n - 2.0)
    ts = np.linspace(0.0, traj.t_end, num)
    xi, xi_t = traj._eval(ts)
    xi_tt = ode_rhs(xi, xi_t, n, k)
    r = np.exp(ts)
    u = u_from_xi(xi, ts, n)
    du = -m * (xi_t + 1.0) * u / r
    d2u = m * u / r ** 2 * (-xi_tt + m * (xi_t + 1.0) ** 2 + (xi_t + 1.0))
    lam_rad, lam_tan = schouten.radial_eigenvalues(xi, xi_t, xi_tt, n)
    res = np.empty(ts.size)
    for i in range(ts.size):
        lam = np.full(n, lam_tan[i])
        lam[0] = lam_rad[i]
        res[i] = symfn.sigma_k(lam, k) - 1.0
    return RadialProfile(n=n, k=k, t=ts, xi=xi, xi_t=xi_t, xi_tt=xi_tt,
                         r=r, u=u, du=du, d2u=d2u,
                         lam_rad=lam_rad, lam_tan=lam_tan,
                         sigma_k_residual=res)
