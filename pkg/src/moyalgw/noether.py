"""Energy-momentum and angular-momentum tensors, breaking terms, deformed
generator brackets and the generalized current.

All derivatives here are the plain coordinate-commutator derivative;
coordinate multiplications use the linear ladder realization.  The tensor
components are matrix fields; integrals of total derivatives vanish
identically because the trace of a commutator is zero in the truncated
algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as alg
from . import grid as gr
from . import gw
from .algebra import AlgebraSpec, MatrixField
from .errors import DomainError

__all__ = [
    "TensorField",
    "GeneratorSpec",
    "energy_momentum",
    "angular_momentum",
    "breaking_term",
    "ward_translation_check",
    "generator_bracket_check",
    "generator_cross",
    "noether_current",
    "translation_generator",
    "lorentz_generator",
]


@dataclass
class TensorField:
    """Components indexed by coordinate tuples, all in one representation."""

    components: dict
    rank: int

    def __getitem__(self, idx) -> MatrixField:
        return self.components[idx]

    def indices(self):
        return self.components.keys()


@dataclass
class GeneratorSpec:
    """Infinitesimal transformation data: rotation + translation parts and
    optional internal parts (exercised only at calX = xi = 0)."""

    omega: np.ndarray | None = None
    eps: np.ndarray | None = None
    calX: MatrixField | None = None
    xi: MatrixField | None = None

    def validate(self, dim: int):
        if self.omega is not None:
            w = np.asarray(self.omega, dtype=float)
            if w.shape != (dim, dim) or np.max(np.abs(w + w.T)) > 0:
                raise DomainError("omega must be exactly antisymmetric DxD")
        if self.eps is not None and len(np.asarray(self.eps)) != dim:
            raise DomainError("eps must be a D-vector")


def _anticomm(a: MatrixField, b: MatrixField) -> MatrixField:
    return alg.star(a, b) + alg.star(b, a)


def energy_momentum(phi: MatrixField, p: gw.GWParams) -> TensorField:
    """T_rho_mu = 1/2 {d_rho phi, d_mu phi} - delta_rho_mu L."""
    if not phi.is_hermitian(tol=1e-10):
        raise DomainError("energy_momentum requires a Hermitian input")
    dim = phi.spec.dim
    dens = gw.lagrangian_density(phi, p)
    d = [alg.partial_derivative(phi, mu) for mu in range(dim)]
    comps = {}
    for rho in range(dim):
        for mu in range(rho, dim):
            t = 0.5 * _anticomm(d[rho], d[mu])
            if rho == mu:
                t = t - dens
            comps[(rho, mu)] = t
            comps[(mu, rho)] = t
    return TensorField(comps, rank=2)


def angular_momentum(phi: MatrixField, p: gw.GWParams) -> TensorField:
    """M_nu_rho_mu = x_nu * T_rho_mu - x_mu * T_rho_nu."""
    T = energy_momentum(phi, p)
    dim = phi.spec.dim
    comps = {}
    for nu in range(dim):
        for rho in range(dim):
            for mu in range(dim):
                comps[(nu, rho, mu)] = alg.coordinate_apply(
                    T[(rho, mu)], nu, "left"
                ) - alg.coordinate_apply(T[(rho, nu)], mu, "left")
    return TensorField(comps, rank=3)


def breaking_term(phi: MatrixField, omega, p: gw.GWParams) -> float:
    """Integrated rotational-invariance breaking term.

    -omega^{mu nu} \\int x_nu * ( lam/4! [[d_mu phi, phi], phi*phi]
                   + Om^2/8 sum_s [[d_mu phi, {xt_s, phi}], xt^s] ).
    """
    omega = np.asarray(omega, dtype=float)
    dim = phi.spec.dim
    if omega.shape != (dim, dim) or np.max(np.abs(omega + omega.T)) > 0:
        raise DomainError("omega must be exactly antisymmetric DxD")
    if not np.any(omega):
        return 0.0
    phi2 = alg.star(phi, phi)
    total = 0.0 + 0.0j
    for mu in range(dim):
        dphi = alg.partial_derivative(phi, mu)
        term = (p.lam / 24.0) * _comm(_comm(dphi, phi), phi2)
        if p.omega != 0.0:
            for s in range(dim):
                xts_phi = alg.xtilde_apply(phi, s, "left") + alg.xtilde_apply(
                    phi, s, "right"
                )
                inner = _comm(dphi, xts_phi)
                outer = alg.xtilde_apply(inner, s, "right") - alg.xtilde_apply(
                    inner, s, "left"
                )
                term = term + (p.omega**2 / 8.0) * outer
        for nu in range(dim):
            if omega[mu, nu]:
                total -= omega[mu, nu] * alg.integrate(
                    alg.coordinate_apply(term, nu, "left")
                )
    return float(np.real(total))


def _comm(a: MatrixField, b: MatrixField) -> MatrixField:
    return alg.star(a, b) - alg.star(b, a)


def ward_translation_check(
    phi: MatrixField,
    eps,
    p: gw.GWParams,
    grid_spec: gr.GridSpec | None = None,
) -> tuple[float, float]:
    """(divergence integral, action shift gap) for a rigid translation.

    The first entry is |\\int eps^mu d^rho T_rho_mu| (vanishes by the trace
    of a commutator).  The second compares the grid action of the shifted
    field, with the harmonic coordinate co-translated, against the original
    action (change-of-variables invariance).
    """
    eps = np.asarray(eps, dtype=float)
    dim = phi.spec.dim
    T = energy_momentum(phi, p)
    div = 0.0 + 0.0j
    for mu in range(dim):
        if eps[mu] == 0.0:
            continue
        for rho in range(dim):
            div += eps[mu] * alg.integrate(
                alg.partial_derivative(T[(rho, mu)], rho)
            )
    if grid_spec is None:
        grid_spec = gr.GridSpec(dim, 6.0 * np.sqrt(p.theta), 128 if dim == 2 else 16)
    f = gr.reconstruct(phi, grid_spec)
    base = np.real(gw.grid_action(f, p, grid_spec))
    shifted = gr.spectral_shift(f, eps)
    moved = np.real(_grid_action_offset(shifted, p, grid_spec, offset=-eps))
    return float(abs(div)), float(abs(moved - base))


def _grid_action_offset(f: gr.GridField, p: gw.GWParams, grid_spec: gr.GridSpec, offset) -> float:
    """Grid action with the harmonic coordinate evaluated at x - offset."""
    kin = np.zeros_like(f.values)
    harm = np.zeros_like(f.values)
    for mu in range(grid_spec.dim):
        d = gr.spectral_derivative(f, mu).values
        kin = kin + d * d
        xt = gr.xtilde_field(grid_spec, mu, p.theta, offset=offset).values
        h = xt * f.values
        harm = harm + h * h
    f2 = gr.star(f, f, p.theta).values
    dens = (
        -0.5 * kin
        - 0.5 * p.omega**2 * harm
        + 0.5 * p.msq * f.values * f.values
        + p.lam / 24.0 * f2 * f2
    )
    return complex(np.sum(dens) * grid_spec.spacing**grid_spec.dim)


def energy_momentum_grid(f: gr.GridField, p: gw.GWParams, grid_spec: gr.GridSpec) -> dict:
    """Grid-backend tensor components (star products on the grid)."""
    th = p.theta
    dim = grid_spec.dim
    d = [gr.spectral_derivative(f, mu) for mu in range(dim)]
    dens = np.zeros_like(f.values)
    for mu in range(dim):
        dens = dens - 0.5 * gr.star(d[mu], d[mu], th).values
        xt = gr.xtilde_field(grid_spec, mu, th).values
        h = gr.GridField(grid_spec, xt * f.values)
        dens = dens - 0.5 * p.omega**2 * gr.star(h, h, th).values
    f2 = gr.star(f, f, th)
    dens = dens + 0.5 * p.msq * f2.values + p.lam / 24.0 * gr.star(f2, f2, th).values
    comps = {}
    for rho in range(dim):
        for mu in range(rho, dim):
            t = 0.5 * (
                gr.star(d[rho], d[mu], th).values + gr.star(d[mu], d[rho], th).values
            )
            if rho == mu:
                t = t - dens
            comps[(rho, mu)] = t
            comps[(mu, rho)] = t
    return comps


# ---------------------------------------------------------------------------
# deformed generators


def _rotation_apply(omega: np.ndarray, phi: MatrixField, sign: str) -> MatrixField:
    """m_pm(omega) phi = sum omega[mu, nu] (x^nu * d_mu phi)_pm."""
    out = MatrixField(phi.spec, np.zeros_like(phi.coeff))
    side = "left" if sign == "+" else "right"
    for mu in range(phi.spec.dim):
        for nu in range(phi.spec.dim):
            if omega[mu, nu]:
                d = alg.partial_derivative(phi, mu)
                out = out + omega[mu, nu] * alg.coordinate_apply(d, nu, side)
    return out


def generator_cross(omega, omega2) -> np.ndarray:
    """Structure constants of the deformed rotation bracket:
    [m(w), m(w')] = m(w x w') with (w x w') = w' w - w w'."""
    w = np.asarray(omega, dtype=float)
    w2 = np.asarray(omega2, dtype=float)
    return w2 @ w - w @ w2


def generator_bracket_check(
    omega, omega2, phi: MatrixField, sign: str = "+"
) -> dict:
    """Defects of the deformed bracket relations applied to phi.

    Returns the Frobenius defects of [m(w), m(w')] phi = m(w x w') phi and
    of [p_mu, m(w)] phi = omega[., mu]-contracted p phi, plus a
    self-consistency defect of the structure-constant formula.

    The plain rotation bracket closes exactly only when the rotation
    matrices commute; in general the deformation adds a second-derivative
    term, and ``rotation_bracket_extended`` is the defect of the exact
    operator identity

        [m(w), m(w')] = m(w x w') + i (w Theta w'^T)^{mu rho} d_mu d_rho.
    """
    w = np.asarray(omega, dtype=float)
    w2 = np.asarray(omega2, dtype=float)
    dim = phi.spec.dim
    if w.shape != (dim, dim) or np.max(np.abs(w + w.T)) > 0:
        raise DomainError("omega must be exactly antisymmetric DxD")
    if w2.shape != (dim, dim) or np.max(np.abs(w2 + w2.T)) > 0:
        raise DomainError("omega2 must be exactly antisymmetric DxD")

    m1 = lambda f: _rotation_apply(w, f, sign)
    m2 = lambda f: _rotation_apply(w2, f, sign)
    lhs = m1(m2(phi)) - m2(m1(phi))
    rhs = _rotation_apply(generator_cross(w, w2), phi, sign)
    rot_defect = (lhs - rhs).norm()

    theta_mat = _theta_block(dim, phi.spec.theta)
    corr_mat = w @ theta_mat @ w2.T
    corr = MatrixField(phi.spec, np.zeros_like(phi.coeff))
    for mu in range(dim):
        for rho in range(dim):
            if abs(corr_mat[mu, rho]) > 1e-300:
                corr = corr + corr_mat[mu, rho] * alg.partial_derivative(
                    alg.partial_derivative(phi, rho), mu
                )
    ext_defect = (lhs - rhs - 1j * corr).norm()

    trans_defect = 0.0
    for rho in range(dim):
        d = alg.partial_derivative(m1(phi), rho) - m1(alg.partial_derivative(phi, rho))
        want = MatrixField(phi.spec, np.zeros_like(phi.coeff))
        for mu in range(dim):
            if w[mu, rho]:
                want = want + w[mu, rho] * alg.partial_derivative(phi, mu)
        trans_defect = max(trans_defect, (d - want).norm())

    # antisymmetrized-product identity for the structure constants
    cross = generator_cross(w, w2)
    alt = -(w @ w2 - w2 @ w)
    formula_defect = float(np.max(np.abs(cross - alt)))
    return {
        "rotation_bracket": float(rot_defect),
        "rotation_bracket_extended": float(ext_defect),
        "translation_bracket": float(trans_defect),
        "structure_formula": formula_defect,
    }


def _theta_block(dim: int, theta: float) -> np.ndarray:
    j2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((dim, dim))
    for pnum in range(dim // 2):
        out[2 * pnum : 2 * pnum + 2, 2 * pnum : 2 * pnum + 2] = theta * j2
    return out


# ---------------------------------------------------------------------------
# generalized current


def translation_generator(spec: AlgebraSpec, eps) -> tuple[list[MatrixField], None]:
    """Anticommutator-realized generator fields for a rigid translation."""
    eps = np.asarray(eps, dtype=float)
    acx = [2.0 * eps[nu] * alg.identity(spec) for nu in range(spec.dim)]
    return acx, None


def lorentz_generator(phi: MatrixField, omega) -> tuple[list[MatrixField], MatrixField]:
    """Generator fields for a rotation: acx^nu = 2 omega[nu, s] x_s and the
    field-variation part acf = -omega[nu, s] {x_s, d_nu phi}."""
    w = np.asarray(omega, dtype=float)
    spec = phi.spec
    acx = []
    for nu in range(spec.dim):
        g = MatrixField(spec, np.zeros_like(phi.coeff))
        for s in range(spec.dim):
            if w[nu, s]:
                g = g + 2.0 * w[nu, s] * alg.coordinate_apply(
                    alg.identity(spec), s, "left"
                )
        acx.append(g)
    acf = MatrixField(spec, np.zeros_like(phi.coeff))
    for nu in range(spec.dim):
        for s in range(spec.dim):
            if w[nu, s]:
                d = alg.partial_derivative(phi, nu)
                acf = acf - w[nu, s] * (
                    alg.coordinate_apply(d, s, "left")
                    + alg.coordinate_apply(d, s, "right")
                )
    return acx, acf


def noether_current(
    phi: MatrixField,
    p: gw.GWParams,
    acx: list[MatrixField],
    acf: MatrixField | None = None,
) -> list[MatrixField]:
    """J_mu = 1/4 {acx^nu, T_mu_nu} - 1/4 {acf, d_mu phi}.

    acx^nu and acf are the anticommutator-realized generator fields
    ({parameter, dx^nu/dparameter} and {parameter, dF/dparameter}).
    """
    T = energy_momentum(phi, p)
    dim = phi.spec.dim
    out = []
    for mu in range(dim):
        j = MatrixField(phi.spec, np.zeros_like(phi.coeff))
        for nu in range(dim):
            j = j + 0.25 * _anticomm(acx[nu], T[(mu, nu)])
        if acf is not None:
            j = j - 0.25 * _anticomm(acf, alg.partial_derivative(phi, mu))
        out.append(j)
    return out
