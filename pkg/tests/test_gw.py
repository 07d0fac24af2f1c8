import numpy as np
import pytest

from moyalgw import algebra as alg
from moyalgw import grid as gr
from moyalgw import gw
from moyalgw.errors import DomainError, UnsupportedRegimeError

SPEC4 = alg.AlgebraSpec(4.0, 2, 8)
P4 = gw.GWParams(theta=4.0, omega=1.0, msq=0.0, lam=6.0, spec=SPEC4)


def params(theta=2.0, omega=1.0, msq=0.0, lam=6.0, dim=2, trunc=8):
    return gw.GWParams(theta, omega, msq, lam, alg.AlgebraSpec(theta, dim, trunc))


class TestAction:
    def test_zero_field(self):
        z = alg.MatrixField(SPEC4, np.zeros((8, 8)))
        assert gw.action(z, P4) == 0.0

    def test_rejects_non_hermitian(self):
        m = alg.basis_cell(SPEC4, 0, 1)
        with pytest.raises(DomainError):
            gw.action(m, P4)

    def test_reality(self, rng):
        p = params(omega=0.7, msq=0.3, lam=2.0)
        phi = alg.random_hermitian(p.spec, rng)
        val = gw._action_value(phi, p)
        assert abs(np.imag(val)) <= 1e-12

    def test_cross_representation(self, rng):
        p = params(theta=2.0, omega=0.8, msq=0.5, lam=3.0)
        phi = alg.random_hermitian(p.spec, rng, interior_margin=3)
        gspec = gr.GridSpec(2, 10.0, 128)
        s_mat = gw.action(phi, p)
        s_grid = np.real(gw.grid_action(gr.reconstruct(phi, gspec), p, gspec))
        assert abs(s_mat - s_grid) / max(1.0, abs(s_mat)) <= 1e-5

    def test_density_integrates_to_action(self, rng):
        p = params(theta=2.0, omega=0.8, msq=0.5, lam=3.0)
        phi = alg.random_hermitian(p.spec, rng, interior_margin=3)
        dens = gw.lagrangian_density(phi, p)
        assert abs(alg.integrate(dens).real - gw.action(phi, p)) <= 1e-10


class TestEomResidual:
    def test_zero_field(self):
        z = alg.MatrixField(SPEC4, np.zeros((8, 8)))
        assert gw.eom_residual(z, P4).norm == 0.0

    def test_exact_solution_ground(self):
        phi = gw.exact_solution(0, 0, P4)
        assert gw.eom_residual(phi, P4).norm <= 1e-12

    def test_gradient_oracle(self, rng):
        p = params(theta=2.0, omega=0.6, msq=0.4, lam=2.5)
        phi = alg.random_hermitian(p.spec, rng)
        eps = 1e-5
        for _ in range(20):
            eta = alg.random_hermitian(p.spec, rng)
            fd = (gw.action(phi + eps * eta, p) - gw.action(phi - eps * eta, p)) / (2 * eps)
            an = gw.eom_gradient_pairing(phi, eta, p)
            assert abs(fd - an) / max(1.0, abs(an)) <= 1e-6

    def test_stationarity_all_interior_cells(self):
        n = SPEC4.trunc
        for k in range(n - 2):
            for l in range(n - 2):
                phi = gw.exact_solution(k, l, P4)
                assert gw.eom_residual(phi, P4).norm <= 1e-12, (k, l)


class TestCellCoefficients:
    def test_self_dual_diagonalizes(self):
        lower, upper, diag = gw.eom_cell_coefficients(2, 1, P4, tau=1.0)
        assert lower == 0.0 and upper == 0.0
        want = -(4.0 / 4.0) * (2 + 1 + 1) + 0.0 + 1.0
        assert abs(diag - want) <= 1e-14

    def test_ground_coefficient_vanishes_at_tau(self):
        tau = gw.solve_tau(0, 0, P4)
        _, _, diag = gw.eom_cell_coefficients(0, 0, P4, tau)
        assert abs(diag) <= 1e-14

    def test_matches_residual_off_self_dual(self):
        p = params(theta=2.0, omega=0.5, msq=0.3, lam=4.0)
        k, l, tau = 2, 2, 0.7
        lower, upper, diag = gw.eom_cell_coefficients(k, l, p, tau)
        phi = tau * alg.basis_cell(p.spec, k, l)
        res = gw.eom_residual(phi, p).value
        assert abs(res.coeff[k - 1, l - 1] - tau * lower) <= 1e-12
        assert abs(res.coeff[k + 1, l + 1] - tau * upper) <= 1e-12
        assert abs(res.coeff[k, l] - tau * diag) <= 1e-12

    def test_omega_continuity(self):
        base = gw.eom_cell_coefficients(1, 2, P4, 0.5)
        for om in (1.0 - 1e-6, 1.0 + 1e-6):
            p = gw.GWParams(4.0, om, 0.0, 6.0, SPEC4)
            pert = gw.eom_cell_coefficients(1, 2, p, 0.5)
            assert max(abs(a - b) for a, b in zip(base, pert)) <= 1e-4


class TestSolveTau:
    def test_unit_tau(self):
        assert gw.solve_tau(0, 0, P4) == 1.0

    def test_boundary_of_domain(self):
        p = params(theta=4.0, msq=1.0)
        assert gw.solve_tau(0, 0, p) == 0.0

    def test_massive_case(self):
        p = params(theta=1.0, msq=1.0, lam=6.0)
        assert abs(gw.solve_tau(0, 0, p) - np.sqrt(3.0)) <= 1e-14
        phi = gw.exact_solution(0, 0, p)
        assert gw.eom_residual(phi, p).norm <= 1e-12

    def test_domain_error(self):
        p = params(theta=4.0, msq=2.0)
        with pytest.raises(DomainError):
            gw.solve_tau(0, 0, p)

    def test_unsupported_regime(self):
        p = params(omega=0.5)
        with pytest.raises(UnsupportedRegimeError):
            gw.solve_tau(0, 0, p)

    def test_four_dimensional_unit_norm(self):
        p = params(theta=4.0, dim=4, trunc=4)
        # |1| = 2 in four dimensions
        assert abs(gw.solve_tau((0, 0), (0, 0), p) - np.sqrt(2.0)) <= 1e-14
        phi = gw.exact_solution((0, 0), (0, 0), p)
        assert gw.eom_residual(phi, p).norm <= 1e-12


class TestXtildeConstraint:
    def test_omega_zero(self, rng):
        p = params(omega=0.0)
        phi = alg.random_hermitian(p.spec, rng)
        assert max(c.norm() for c in gw.xtilde_constraint(phi, p)) == 0.0

    def test_zero_field(self):
        z = alg.MatrixField(SPEC4, np.zeros((8, 8)))
        assert max(c.norm() for c in gw.xtilde_constraint(z, P4)) == 0.0

    def test_grid_oracle(self):
        p = params(theta=2.0, omega=1.0)
        phi = alg.basis_cell(p.spec, 0, 0)
        gspec = gr.GridSpec(2, 10.0, 128)
        fv = gr.reconstruct(phi, gspec)
        f2 = gr.star(fv, fv, p.theta)
        cons = gw.xtilde_constraint(phi, p)
        th = p.theta
        for nu in range(2):
            c = gr.xtilde_coeffs(2, nu, th)
            want = (
                2.0 * gr.star(fv, gr.linear_star(c, fv, th, "left"), th).values
                + gr.linear_star(c, f2, th, "left").values
                + gr.linear_star(c, f2, th, "right").values
            )
            got = gr.reconstruct(cons[nu], gspec)
            rel = np.linalg.norm(got.values - want) / max(np.linalg.norm(want), 1e-300)
            assert rel <= 1e-6


class TestDuality:
    def test_self_dual_point(self):
        phi = gw.exact_solution(0, 0, P4)
        assert gw.ls_duality_gap(phi, P4, "matrix") <= 1e-8

    def test_identity_map_tautology(self):
        e00 = alg.basis_cell(SPEC4, 0, 0)
        assert gw.ls_duality_gap(e00, P4, "matrix") <= 1e-10

    def test_omega_two(self):
        p = params(theta=2.0, omega=2.0, msq=0.5, lam=3.0)
        e00 = alg.basis_cell(p.spec, 0, 0)
        assert gw.ls_duality_gap(e00, p, "matrix") <= 1e-6

    def test_omega_zero_rejected(self):
        p = params(omega=0.0)
        with pytest.raises(DomainError):
            gw.ls_duality_gap(alg.basis_cell(p.spec, 0, 0), p)

    def test_grid_backend(self):
        p = params(theta=2.0, omega=2.0, msq=0.5, lam=3.0)
        e00 = alg.basis_cell(p.spec, 0, 0)
        gspec = gr.GridSpec(2, 6.0 * np.sqrt(2.0), 128)
        assert gw.ls_duality_gap(e00, p, "grid", gspec) <= 1e-6

    def test_backends_agree_on_dual_map(self, rng):
        p = params(theta=2.0)
        gspec = gr.GridSpec(2, 6.0 * np.sqrt(2.0), 128)
        m = alg.random_hermitian(p.spec, rng, interior_margin=3)
        lhs = gr.symplectic_fourier(gr.reconstruct(m, gspec), p.theta)
        rhs = gr.reconstruct(alg.parity_dual(m), gspec)
        rel = np.linalg.norm(lhs.values - rhs.values) / np.linalg.norm(rhs.values)
        assert rel <= 1e-6
