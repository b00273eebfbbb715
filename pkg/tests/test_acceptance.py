"""Acceptance suite: one end-to-end check per advertised capability.

Every test prints a single ``[acceptance] <label>: PASS/FAIL (<time>)``
line on the real stdout (outside pytest's capture) and enforces both its
numerical tolerances and its runtime budget.
"""

import contextlib
import math
import time

import numpy as np
import pytest

from syl import fd, mobius, radial, schouten, shooting, symfn


@pytest.fixture
def announce(capsys):
    """Context manager printing the uncaptured pass/fail line per check."""

    @contextlib.contextmanager
    def check(label: str, budget: float):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException:
            dt = time.perf_counter() - t0
            with capsys.disabled():
                print(f"[acceptance] {label}: FAIL ({dt:.1f}s)", flush=True)
            raise
        dt = time.perf_counter() - t0
        ok = dt < budget
        with capsys.disabled():
            print(f"[acceptance] {label}: {'PASS' if ok else 'FAIL'} "
                  f"({dt:.1f}s)", flush=True)
        assert ok, f"{label}: runtime {dt:.1f}s exceeded its {budget}s budget"

    return check


def test_equilibrium_profile_fixed_point(announce):
    with announce("equilibrium-profile-fixed-point", 1.0):
        xi_cyl, scale = shooting.cylinder_solution(5, 2)
        assert abs(xi_cyl - 0.25 * math.log(2.0)) <= 1e-10
        # the constant trajectory keeps its curvature constraint satisfied
        traj = radial.integrate((xi_cyl, 0.0), math.log(5.0), 5, 2)
        assert traj.termination == "reached_T"
        profile = radial.reconstruct(traj, num=200)
        assert np.abs(profile.sigma_k_residual).max() <= 1e-10
        assert np.abs(profile.xi - xi_cyl).max() <= 1e-10


@pytest.mark.parametrize("n,k", [(5, 2), (7, 2), (7, 3)])
def test_branch_count_transition(n, k, announce):
    with announce(f"branch-count-transition-{n}-{k}", 120.0):
        result = shooting.verify_bifurcation(n, k)
        assert result.status == "ok"
        # below the window: a single branch; above it: several
        assert result.history[0][1] == 1
        assert result.history[1][1] >= 2
        assert result.relative_error <= 1e-3


def test_wide_annulus_solvable_grid(announce):
    with announce("wide-annulus-solvable-grid", 300.0):
        misses = []
        for n, k in ((5, 2), (7, 3)):
            xi_c = shooting.cylinder_solution(n, k)[0]
            scan = shooting.ScanSpec(xi_c - 5.0, xi_c + 5.0, 301)
            for R in (1.5, 2.0, 5.0, 10.0, 50.0):
                for c1, c2 in ((0.0, 0.0), (0.3, 0.0), (0.5, -0.2)):
                    result = shooting.solve_annulus(
                        radial.AnnulusProblem(n, k, R, c1, c2), scan=scan)
                    if result.status != "ok" or not result.solutions:
                        misses.append(((n, k), R, (c1, c2), result.status))
        assert misses == []


def test_thin_annulus_threshold_dichotomy(announce):
    with announce("thin-annulus-threshold-dichotomy", 300.0):
        found = shooting.find_r_star(5, 2, -0.3, 0.0)
        assert found.status == "ok"
        assert found.r_star is not None and found.r_star > 1.0
        lo, hi = found.bracket
        assert 1.0 < lo < found.r_star < hi
        below = shooting.solve_annulus(
            radial.AnnulusProblem(5, 2, found.r_star * (1.0 - 1e-3),
                                  -0.3, 0.0))
        above = shooting.solve_annulus(
            radial.AnnulusProblem(5, 2, found.r_star * (1.0 + 1e-3),
                                  -0.3, 0.0))
        assert below.status == "empty" and len(below.solutions) == 0
        assert above.status == "ok" and len(above.solutions) >= 1
        for sol in above:
            assert abs(sol.residual) <= 1e-10


def test_bounded_gradient_with_hessian_blowup(announce):
    with announce("bounded-gradient-hessian-blowup", 60.0):
        n, k, c, delta = 5, 2, -1.0, 0.05
        eps = np.geomspace(1e-4, 1e-2, 9)
        sweep = shooting.counterexample_sweep(n, k, c, delta, list(eps))
        assert all(row.termination == "window_exit" for row in sweep.rows)

        # the seed curvature scales like eps^(1-k) = 1/eps
        xi_tt0 = np.array([row.xi_tt0 for row in sweep.rows])
        slope = np.polyfit(np.log(eps), np.log(np.abs(xi_tt0)), 1)[0]
        assert abs(slope - (1 - k)) <= 0.05 * abs(1 - k)

        # pointwise |u| + 1/u + |u'| stays uniformly bounded on the window
        sup_c1 = np.array([row.sup_c1 for row in sweep.rows])
        assert sup_c1.max() / sup_c1.min() < 2.0

        # the window length has an eps-independent positive floor
        T = np.array([row.T_window for row in sweep.rows])
        assert T.min() > 1e-3
        assert T.max() / T.min() <= 2.0

        # while the inner Hessian scale diverges as eps -> 0
        hess = np.array([row.hessian_inner for row in sweep.rows])
        assert np.all(np.diff(hess) < 0.0)
        assert hess[0] / hess[-1] > 50.0

        # spot value of the seed curvature at eps = 0.01, from the
        # right-hand side evaluated by hand at the seed
        e0 = 1e-2
        w0 = 1.0 - math.exp(-2.0 * e0)
        th = 2.0 ** (k - 1) / math.comb(n - 1, k - 1)
        expected = (th * math.exp(-2.0 * k * e0) * w0 ** (1 - k)
                    - (n - 2.0 * k) / (2.0 * k) * w0)
        assert abs(expected - 24.255783659451218) < 1e-12
        assert abs(xi_tt0[-1] - expected) <= 1e-6

        assert sweep.R0 > 1.0
        assert sweep.R0 == math.exp(T.min())


def test_curvature_spectrum_oracles(announce):
    with announce("curvature-spectrum-oracles", 30.0):
        rng = np.random.default_rng(20260819)

        # (i) closed-form derivative path on the round-sphere factor
        bubble = schouten.Bubble(5, 1.0)
        pts = rng.normal(0.0, 1.5, size=(1000, 5))
        worst = 0.0
        for y in pts:
            lam = schouten.eigenvalues(schouten.schouten_matrix(
                bubble.sample(y)))
            worst = max(worst, float(np.abs(lam - 2.0).max()))
        assert worst <= 1e-8

        # (i cont.) finite-difference path: second differences carry an
        # eps/h^2 noise floor, so judge on a bounded cloud at step 1e-4
        fd_pts = []
        while len(fd_pts) < 1000:
            y = rng.normal(0.0, 0.7, size=5)
            if np.linalg.norm(y) <= 2.0:
                fd_pts.append(y)
        worst = 0.0
        for y in fd_pts:
            smpl = schouten.ConformalFactorSample(
                y, float(bubble.u(y)), fd.gradient(bubble.u, y, 1e-4),
                fd.hessian(bubble.u, y, 1e-4))
            lam = schouten.eigenvalues(schouten.schouten_matrix(smpl),
                                       sym_tol=1e-4)
            worst = max(worst, float(np.abs(lam - 2.0).max()))
        assert worst <= 1e-5

        # (ii) the product-cylinder spectrum
        for n in (3, 5, 7):
            spec = schouten.Cylinder(n).spectrum()
            expect = np.r_[0.5 * np.ones(n - 1), -0.5]
            assert np.abs(np.sort(spec) - np.sort(expect)).max() <= 1e-12

        # (iii) rotationally symmetric eigenvalues against the dense path
        worst = 0.0
        for _ in range(500):
            n = int(rng.integers(3, 9))
            xi = float(rng.normal(0.0, 0.4))
            xi_t = float(rng.uniform(-0.9, 0.9))
            xi_tt = float(rng.normal(0.0, 1.0))
            t = float(rng.uniform(-0.5, 0.5))
            r = math.exp(t)
            m = 0.5 * (n - 2)
            u = math.exp(-m * (xi + t))
            du = -m * (xi_t + 1.0) * u / r
            d2u = m * u / r ** 2 * (-xi_tt + m * (xi_t + 1.0) ** 2
                                    + (xi_t + 1.0))
            d = rng.normal(size=n)
            d /= np.linalg.norm(d)
            hess = (d2u * np.outer(d, d)
                    + (du / r) * (np.eye(n) - np.outer(d, d)))
            smpl = schouten.ConformalFactorSample(r * d, u, du * d, hess)
            dense = schouten.eigenvalues(schouten.schouten_matrix(smpl))
            closed = schouten.radial_spectrum(xi, xi_t, xi_tt, n)
            worst = max(worst, float(np.abs(dense - closed).max()))
        assert worst <= 1e-6

        # (iv) the curvature constraint holds along every solved profile
        xi52 = shooting.cylinder_solution(5, 2)[0]
        xi73 = shooting.cylinder_solution(7, 3)[0]
        solves = [
            shooting.solve_annulus(
                radial.AnnulusProblem(5, 2, 2.0),
                scan=shooting.ScanSpec(xi52 - 2.0, xi52 + 2.0, 201)),
            shooting.solve_annulus(
                radial.AnnulusProblem(7, 3, 5.0, 0.5, -0.2),
                scan=shooting.ScanSpec(xi73 - 3.0, xi73 + 3.0, 301)),
        ]
        checked = 0
        for result in solves:
            assert result.status == "ok" and result.solutions
            for sol in result:
                profile = radial.reconstruct(sol.trajectory, 128)
                assert np.abs(profile.sigma_k_residual).max() <= 1e-8
                checked += 1
        assert checked >= 2


def test_reflection_and_critical_radius(announce):
    with announce("reflection-and-critical-radius", 60.0):
        n = 5
        rng = np.random.default_rng(20260819)
        bubble = schouten.Bubble(n, 1.0)
        cloud = rng.normal(0.0, 1.0, size=(500, n))

        # the profile is its own reflection in the unit sphere
        reflected = mobius.kelvin(bubble.u, np.zeros(n), 1.0, n)
        assert np.abs(reflected(cloud) - bubble.u(cloud)).max() <= 1e-10

        # and the critical reflection radius at the origin is one
        ms = mobius.moving_sphere_radius(bubble.u, np.zeros(n), cloud, n=n)
        assert ms.status == "bracketed"
        assert abs(ms.lam_bar - 1.0) <= 1e-4

        # interior gradient estimate implied by the critical radius
        def grad_log(Y):
            Y = np.asarray(Y, dtype=float)
            den = 1.0 + np.einsum("ij,ij->i", Y, Y)
            return -(n - 2.0) * Y / den[:, None]

        report = mobius.gradient_bound_check(grad_log, np.zeros(n),
                                             ms.lam_bar, cloud, n=n)
        assert report.satisfied
        assert report.n_points > 0


def test_sphere_point_inequalities(announce):
    with announce("sphere-point-inequalities", 10.0):
        worst = mobius.sphere_identity_sweep(5, 10000, tol=1e-12)
        assert worst >= -1e-12

        # constructed equality cases
        rng = np.random.default_rng(8)
        for _ in range(100):
            x = rng.normal(size=5)
            r = float(np.exp(rng.normal(scale=0.5)))
            ydir = rng.normal(size=5)
            y = x + r * ydir / np.linalg.norm(ydir)
            zdir = rng.normal(size=5)
            z_on = x + r * zdir / np.linalg.norm(zdir)
            # rounding may land the on-sphere point a hair inside, so the
            # case label is free; equality must hold either way
            res = mobius.sphere_identity_check(x, r, z_on, y, tol=1e-12)
            assert res.equality
            assert abs(res.lhs - res.rhs) <= 1e-12
            res = mobius.sphere_identity_check(x, r, x, y, tol=1e-12)
            assert res.case == "b" and res.equality
            assert abs(res.lhs - res.rhs) <= 1e-12


def test_boundary_jet_reduction_invariance(announce):
    with announce("boundary-jet-reduction-invariance", 30.0):
        report = mobius.verify_reduction_identities(n=4, count=1000,
                                                    seed=0, tol=1e-9)
        assert report.passed
        assert max(report.max_violation.values()) <= 1e-9
        assert set(report.max_violation) == set(mobius.REDUCTION_NAMES)


def test_homogenized_concave_builder(announce):
    with announce("homogenized-concave-builder", 30.0):
        rng = np.random.default_rng(20260819)
        cone = symfn.ConeSpec(2, 4)

        def h(x):
            return math.sqrt(symfn.sigma_k(x, 2))

        def grad_h(x):
            x = np.asarray(x, dtype=float)
            return (x.sum() - x) / (2.0 * math.sqrt(symfn.sigma_k(x, 2)))

        built = symfn.build_concave_f(h, 0.5, n=4, in_cone=cone.contains,
                                      grad_h=grad_h)
        expected_delta = 4.0 * h(np.full(4, 0.25)) ** 2
        assert built.delta == expected_delta
        assert abs(built.delta - 1.5) <= 1e-12

        samples = list(rng.lognormal(0.0, 0.7, size=(200, 4)))
        while len(samples) < 300:
            lam = rng.normal(0.5, 1.0, size=4)
            if cone.contains(lam) and lam.min() < 0.0:
                samples.append(lam)

        def hessian(lam):
            # Richardson-extrapolated jacobian of the analytic gradient:
            # kills the h^2 truncation term that dominates near the
            # cone boundary
            J1 = fd.jacobian(built.gradient, lam, 1e-4)
            J2 = fd.jacobian(built.gradient, lam, 5e-5)
            H = (4.0 * J2 - J1) / 3.0
            return 0.5 * (H + H.T)

        for lam in samples:
            g = built.gradient(lam)
            assert g.min() > 0.0
            assert g.sum() >= built.delta - 1e-8
            assert abs(g @ np.asarray(lam) - built.value(lam)) <= 1e-8
            assert np.linalg.eigvalsh(hessian(lam)).max() <= 1e-8

        # degenerate constant h: the builder returns the plain trace
        flat = symfn.build_concave_f(lambda x: 1.0, 0.5, n=4,
                                     in_cone=symfn.ConeSpec(1, 4).contains)
        assert flat.delta == 4.0
        lam = rng.lognormal(size=4)
        assert flat.value(lam) == float(lam.sum())
        assert np.array_equal(flat.gradient(lam), np.ones(4))


def test_signed_eigenvector_constant(announce):
    with announce("signed-eigenvector-constant", 1.0):
        for n in range(3, 9):
            lam = np.array([-0.5] + [0.5] * (n - 1))
            for k in range(1, n + 1):
                expected = (0.5 ** k * math.comb(n - 1, k - 1)
                            * (n - 2 * k) / k)
                assert symfn.sigma_k_bruteforce(lam, k) == expected
                assert abs(symfn.sigma_k(lam, k) - expected) <= (
                    1e-14 * max(1.0, abs(expected)))
                assert (expected > 0.0) == (n > 2 * k)


def test_cone_homotopy_continuity(announce):
    with announce("cone-homotopy-continuity", 10.0):
        rng = np.random.default_rng(20260819)

        # at t = 0 the deformation reduces membership to a positive trace
        cone3 = symfn.ConeSpec(3, 5)
        lams = rng.normal(0.0, 1.0, size=(10000, 5))
        for lam in lams:
            member = symfn.homotopy_membership(lam, 0.0, cone3.contains)
            assert member == (lam.sum() > 0.0)
            assert symfn.in_gamma_k(lam, 1) == (lam.sum() > 0.0)

        # and the deformed function varies continuously in t
        f = symfn.sigma_root(3, 5)
        worst = 0.0
        for _ in range(50):
            lam = np.exp(rng.normal(0.0, 1.0, size=5))
            ts = np.linspace(0.0, 1.0, 201)
            vals = np.array([symfn.homotopy_f(lam, t, f) for t in ts])
            spread = vals.max() - vals.min()
            step = np.abs(np.diff(vals)).max()
            worst = max(worst, step / (spread / 200.0 + 1e-30))
        assert worst <= 6.0
