import numpy as np
import pytest
from scipy.integrate import quad

from moyalgw import algebra as alg
from moyalgw import gw
from moyalgw import hamiltonian as ham
from moyalgw.errors import DomainError, SpecMismatchError

GRID = ham.LambdaGrid(extent=2 * np.pi, points=1024)
TOY = ham.NonlocalLagrangianSpec("toy", GRID, h=0.5, mass=1.0)


def toy_state(fn):
    s = GRID.axis()
    q = fn(s)
    return ham.PhasePoint(q, ham.constraint_surface_momentum(q, TOY))


def gw_setup(trunc=6):
    aspec = alg.AlgebraSpec(4.0, 2, trunc)
    p = gw.GWParams(4.0, 1.0, 0.0, 6.0, aspec)
    ggrid = ham.LambdaGrid(2.0, 128)
    spec = ham.NonlocalLagrangianSpec("gw", ggrid, h=0.35, params=p)
    return p, spec


class TestHamiltonianEval:
    def test_trivial_state(self):
        z = np.zeros(GRID.points)
        assert ham.hamiltonian_eval(ham.PhasePoint(z, z), TOY) == 0.0

    def test_evaluation_functional_limit(self):
        # Ltilde on cos approaches -1/2 quadratically as h shrinks
        s = GRID.axis()
        q = np.cos(s)
        errs = []
        for h in (0.4, 0.2, 0.1):
            spec = ham.NonlocalLagrangianSpec("toy", GRID, h=h, mass=1.0)
            errs.append(abs(ham.evaluation_functional(q, spec) + 0.5))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] <= 0.4 * 0.1**2

    def test_linear_in_momentum(self, rng):
        s = GRID.axis()
        q = np.cos(s)
        p1 = rng.standard_normal(GRID.points)
        h0 = ham.hamiltonian_eval(ham.PhasePoint(q, np.zeros_like(q)), TOY)
        h1 = ham.hamiltonian_eval(ham.PhasePoint(q, p1), TOY)
        h2 = ham.hamiltonian_eval(ham.PhasePoint(q, 2.0 * p1), TOY)
        assert abs((h2 - h1) - (h1 - h0)) <= 1e-10


class TestEvolve:
    def test_identity_step(self):
        pt = toy_state(np.sin)
        out = ham.evolve(pt, 0.0, TOY)
        assert np.array_equal(out.q, pt.q) and np.array_equal(out.p, pt.p)

    def test_half_step_composition(self):
        pt = toy_state(np.sin)
        dt = 0.3
        one = ham.evolve(pt, dt, TOY)
        two = ham.evolve(ham.evolve(pt, dt / 2, TOY), dt / 2, TOY)
        assert np.max(np.abs(one.q - two.q)) <= 1e-10

    def test_shift_matches_closed_form(self):
        pt = toy_state(np.sin)
        dt = 0.3
        out = ham.evolve(pt, dt, TOY)
        j0 = int(np.argmin(np.abs(GRID.axis())))
        assert abs(out.q[j0] - np.sin(dt)) <= 1e-8

    def test_transport_preserves_norm(self):
        pt = toy_state(lambda s: np.cos(2 * s) + 0.3 * np.sin(s))
        out = ham.evolve(pt, 0.37, TOY)
        assert abs(ham.state_norm(out.q, TOY) - ham.state_norm(pt.q, TOY)) <= 1e-12

    def test_window_error(self):
        pt = toy_state(np.sin)
        with pytest.raises(DomainError):
            ham.evolve(pt, 10.0, TOY)


class TestPrimaryConstraint:
    def test_zero_state(self):
        z = np.zeros(GRID.points)
        gam = ham.primary_constraint(ham.PhasePoint(z, z), TOY)
        assert ham.state_norm(gam, TOY) == 0.0

    def test_surface_construction(self):
        pt = toy_state(np.cos)
        gam = ham.primary_constraint(pt, TOY)
        assert ham.state_norm(gam, TOY) == 0.0

    def test_direct_quadrature_oracle(self):
        # independent evaluation of the sign-kernel integral defining the
        # constraint-surface momentum, on a subsampled set of nodes
        h = TOY.h
        ext = GRID.extent
        s = GRID.axis()
        q = np.cos(s)
        got = ham.constraint_surface_momentum(q, TOY)

        c1 = 2.252283621043579  # frozen unit-mass constant

        def w_scaled(u):
            v = u / h
            return (c1 / h) * np.exp(1.0 / (v * v - 1.0)) if abs(v) < 1.0 else 0.0

        def wprime(u):
            v = u / h
            if abs(v) >= 1.0:
                return 0.0
            return (c1 / h**2) * np.exp(1.0 / (v * v - 1.0)) * (-2.0 * v) / (v * v - 1.0) ** 2

        def eps_plain(lam):
            val, _ = quad(w_scaled, 0.0, np.clip(lam, -h, h), limit=100)
            return 2.0 * val

        def eps_per(lam):
            base = eps_plain(lam)
            if lam >= 0:
                return base - (eps_plain(lam - ext) + 1.0)
            return base - (eps_plain(lam + ext) - 1.0)

        def wrap(d):
            return (d + ext) % (2.0 * ext) - ext

        qs = np.cos(s)
        dqs = -np.sin(s)
        ds = GRID.spacing
        eps_all = np.array([eps_per(v) for v in s])
        for j in range(0, GRID.points, 97):
            lam = s[j]
            tot = 0.0
            for a in range(GRID.points):
                gfac = 0.5 * (eps_all[j] - eps_all[a])
                if gfac == 0.0:
                    continue
                d = wrap(s[a] - lam)
                tot += gfac * (-(qs[a]) * w_scaled(d) + dqs[a] * wprime(d)) * ds
            assert abs(got[j] - tot) <= 1e-6, j

    def test_gw_static_surface(self):
        p, spec = gw_setup()
        phi = gw.exact_solution(0, 0, p)
        k = spec.lam_grid.points
        q = np.broadcast_to(phi.coeff, (k,) + phi.coeff.shape).copy()
        pt = ham.PhasePoint(q, ham.constraint_surface_momentum(q, spec))
        gam = ham.primary_constraint(pt, spec)
        assert ham.state_norm(gam, spec) <= 1e-5


class TestSecondaryConstraint:
    def test_zero_state(self):
        z = np.zeros(GRID.points)
        assert ham.secondary_constraint(ham.PhasePoint(z, z), TOY) == 0.0

    def test_oscillator_solution(self):
        pt = toy_state(np.cos)
        assert abs(ham.secondary_constraint(pt, TOY)) <= 1e-6

    def test_detects_violation(self):
        s = GRID.axis()
        q = np.cos(s) + 0.5 * np.cos(2 * s)
        pt = ham.PhasePoint(q, np.zeros_like(q))
        assert abs(ham.secondary_constraint(pt, TOY)) > 1e-3

    def test_gw_static_solution(self):
        p, spec = gw_setup()
        phi = gw.exact_solution(0, 0, p)
        k = spec.lam_grid.points
        q = np.broadcast_to(phi.coeff, (k,) + phi.coeff.shape).copy()
        pt = ham.PhasePoint(q, np.zeros_like(q))
        assert ham.secondary_constraint(pt, spec).norm() <= 1e-10


class TestStability:
    def test_toy_oscillator(self):
        pt = toy_state(np.cos)
        res = ham.constraint_stability_check(pt, TOY, dt=1e-3)
        assert res["defect"] <= 1e-6

    def test_gw_static(self):
        p, spec = gw_setup()
        phi = gw.exact_solution(0, 0, p)
        k = spec.lam_grid.points
        q = np.broadcast_to(phi.coeff, (k,) + phi.coeff.shape).copy()
        pt = ham.PhasePoint(q, ham.constraint_surface_momentum(q, spec))
        res = ham.constraint_stability_check(pt, spec, dt=1e-3)
        assert res["defect"] <= 1e-5

    def test_off_shell_tracks_secondary(self):
        s = GRID.axis()
        q = np.cos(s) + 0.4 * np.sin(2 * s) + 0.2 * np.cos(3 * s)
        pt = ham.PhasePoint(q, ham.constraint_surface_momentum(q, TOY))
        res = ham.constraint_stability_check(pt, TOY, dt=1e-3)
        ratio = res["step_change_norm"] / res["predicted_secondary"]
        assert 0.5 <= ratio <= 2.0


class TestTotalHamiltonian:
    def test_zero_multipliers(self):
        pt = toy_state(np.cos)
        lam1 = np.zeros(GRID.points)
        assert ham.total_hamiltonian(pt, lam1, 0.0, TOY) == ham.hamiltonian_eval(pt, TOY)

    def test_multiplier_linearity(self, rng):
        pt = toy_state(np.cos)
        lam1 = rng.standard_normal(GRID.points)
        h0 = ham.total_hamiltonian(pt, np.zeros_like(lam1), 0.0, TOY)
        h1 = ham.total_hamiltonian(pt, lam1, 0.3, TOY)
        h2 = ham.total_hamiltonian(pt, 2.0 * lam1, 0.6, TOY)
        assert abs((h2 - h1) - (h1 - h0)) <= 1e-9

    def test_bounded_on_constraint_surface(self, rng):
        p, spec = gw_setup()
        phi = gw.exact_solution(0, 0, p)
        k = spec.lam_grid.points
        q = np.broadcast_to(phi.coeff, (k,) + phi.coeff.shape).copy()
        pt = ham.PhasePoint(q, ham.constraint_surface_momentum(q, spec))
        lam1 = rng.standard_normal(q.shape)
        lam2 = alg.random_hermitian(p.spec, rng)
        h_plain = ham.hamiltonian_eval(pt, spec)
        h_total = ham.total_hamiltonian(pt, lam1, lam2, spec)
        assert abs(h_total - h_plain) <= 1e-5

    def test_shape_mismatch(self):
        pt = toy_state(np.cos)
        with pytest.raises(SpecMismatchError):
            ham.total_hamiltonian(pt, np.zeros(3), 0.0, TOY)


class TestPoissonBracket:
    def test_kernel_autocorrelation(self):
        res = ham.poisson_bracket_check(GRID, 0.5)
        assert res["max_defect_vs_autocorrelation"] <= 1e-4
        assert res["max_outside_support"] == 0.0
        assert res["antisymmetry_defect"] == 0.0

    def test_diagonal_scale(self):
        res = ham.poisson_bracket_check(GRID, 0.5)
        # the convolution square at zero is of the kernel's own scale
        assert 0.5 <= res["diagonal_value"] / res["kernel_at_zero"] <= 1.5
        assert abs(res["diagonal_value"] - res["autocorrelation_at_zero"]) <= 1e-4


class TestMollifierFamilyConvergence:
    def test_secondary_constraint_cauchy(self):
        # Xi_h on a fixed smooth off-shell state converges as h -> 0
        s = GRID.axis()
        q = np.cos(s) + 0.3 * np.cos(2 * s)
        vals = []
        for h in (0.2, 0.1, 0.05):
            spec = ham.NonlocalLagrangianSpec("toy", GRID, h=h, mass=1.0)
            pt = ham.PhasePoint(q, np.zeros_like(q))
            vals.append(ham.secondary_constraint(pt, spec))
        d1 = abs(vals[1] - vals[0])
        d2 = abs(vals[2] - vals[1])
        assert d2 < d1

    def test_primary_constraint_weak_cauchy(self):
        # Gamma_h paired against a fixed smooth test function
        s = GRID.axis()
        q = np.cos(s) + 0.3 * np.cos(2 * s)
        test_fn = np.exp(-(s**2))
        vals = []
        for h in (0.2, 0.1, 0.05):
            spec = ham.NonlocalLagrangianSpec("toy", GRID, h=h, mass=1.0)
            ups = ham.constraint_surface_momentum(q, spec)
            vals.append(float(np.sum(ups * test_fn) * GRID.spacing))
        d1 = abs(vals[1] - vals[0])
        d2 = abs(vals[2] - vals[1])
        assert d2 < d1
