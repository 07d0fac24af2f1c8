"""Truncated matrix base of the Moyal algebra.

Fields on R^D (D even) are represented by coefficient matrices g_kl in the
harmonic-oscillator eigenbasis b_kl, where the star product becomes ordinary
matrix multiplication.  Indices k, l are multi-indices with D/2 entries,
flattened row-major; |k| denotes the sum of the entries.

Ladder actions follow

    a  * b_kl = sqrt(|k| theta)     b_{k-1,l}
    b_kl *  a = sqrt(theta |l+1|)   b_{k,l+1}
    abar * b_kl = sqrt(theta |k+1|) b_{k+1,l}
    b_kl * abar = sqrt(|l| theta)   b_{k,l-1}

with results pushed past the truncation dropped (orthogonal projection onto
the truncated subspace).  The quadratic coordinate operators follow the
convention

    xtsq  : b_kl -> -(8/theta)(|k| + D/4) b_kl            (left; mirrored right)
    xtsand: b_kl -> -(4/theta^2)(a b abar + abar b a)

whose negative signs are definitional for this model family; the linear
coordinate multiplications (coordinate_apply / xtilde_apply) and the
derivative built from them are the ordinary, signature-free ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import IndexRangeError, SpecMismatchError

__all__ = [
    "AlgebraSpec",
    "MatrixField",
    "star",
    "ladder_apply",
    "harmonic_apply",
    "xtilde_square_apply",
    "xtilde_sandwich",
    "coordinate_apply",
    "xtilde_apply",
    "partial_derivative",
    "integrate",
    "adjoint",
    "star_exp",
    "basis_cell",
    "identity",
    "random_hermitian",
    "parity_dual",
]


@dataclass(frozen=True)
class AlgebraSpec:
    """Truncated matrix-base algebra on R^dim with deformation scale theta."""

    theta: float
    dim: int = 2
    trunc: int = 8

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.dim not in (2, 4):
            raise ValueError(f"dim must be 2 or 4, got {self.dim}")
        if self.trunc < 2:
            raise ValueError(f"trunc must be >= 2, got {self.trunc}")

    @property
    def pairs(self) -> int:
        return self.dim // 2

    @property
    def size(self) -> int:
        """Side length of the coefficient matrix (trunc per oscillator pair)."""
        return self.trunc**self.pairs

    def multi_index(self, flat: int) -> tuple[int, ...]:
        """Unflatten a row/column index into the per-pair multi-index."""
        if self.pairs == 1:
            return (flat,)
        return (flat // self.trunc, flat % self.trunc)

    def flat_index(self, multi) -> int:
        multi = _as_tuple(multi, self.pairs)
        for m in multi:
            if not 0 <= m < self.trunc:
                raise IndexRangeError(f"index {multi} outside truncation {self.trunc}")
        if self.pairs == 1:
            return multi[0]
        return multi[0] * self.trunc + multi[1]

    def norms(self) -> np.ndarray:
        """|k| for every flattened index, in flattening order."""
        if self.pairs == 1:
            return np.arange(self.trunc, dtype=float)
        k1, k2 = np.meshgrid(np.arange(self.trunc), np.arange(self.trunc), indexing="ij")
        return (k1 + k2).reshape(-1).astype(float)


def _as_tuple(idx, pairs: int) -> tuple[int, ...]:
    if np.isscalar(idx):
        if pairs != 1:
            raise IndexRangeError("scalar index given for a multi-index algebra")
        return (int(idx),)
    t = tuple(int(i) for i in idx)
    if len(t) != pairs:
        raise IndexRangeError(f"multi-index {t} has wrong length for D={2 * pairs}")
    return t


@dataclass
class MatrixField:
    """A Moyal-algebra element as its matrix-base coefficient array."""

    spec: AlgebraSpec
    coeff: np.ndarray

    def __post_init__(self):
        self.coeff = np.asarray(self.coeff, dtype=np.complex128)
        n = self.spec.size
        if self.coeff.shape != (n, n):
            raise SpecMismatchError(
                f"coefficient shape {self.coeff.shape} does not match spec size {n}"
            )

    def copy(self) -> "MatrixField":
        return MatrixField(self.spec, self.coeff.copy())

    def norm(self) -> float:
        """Frobenius norm of the coefficient matrix."""
        return float(np.linalg.norm(self.coeff))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeff - self.coeff.conj().T)) <= tol)

    def __add__(self, other: "MatrixField") -> "MatrixField":
        _check_same_spec(self, other)
        return MatrixField(self.spec, self.coeff + other.coeff)

    def __sub__(self, other: "MatrixField") -> "MatrixField":
        _check_same_spec(self, other)
        return MatrixField(self.spec, self.coeff - other.coeff)

    def __mul__(self, scalar) -> "MatrixField":
        return MatrixField(self.spec, self.coeff * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "MatrixField":
        return MatrixField(self.spec, -self.coeff)


def _check_same_spec(a: MatrixField, b: MatrixField):
    if a.spec != b.spec:
        raise SpecMismatchError(f"algebra specs differ: {a.spec} vs {b.spec}")


# ---------------------------------------------------------------------------
# cached operator matrices


@lru_cache(maxsize=64)
def _ladder_matrix(theta: float, dim: int, trunc: int) -> np.ndarray:
    """Matrix of a (annihilation, scaled by sqrt(theta)); abar is its adjoint."""
    a1 = np.diag(np.sqrt(theta * np.arange(1, trunc)), k=1)
    if dim == 2:
        return a1
    eye = np.eye(trunc)
    return np.kron(a1, eye) + np.kron(eye, a1)


@lru_cache(maxsize=64)
def _coordinate_matrices(theta: float, dim: int, trunc: int) -> tuple[np.ndarray, ...]:
    """x_mu as truncated matrices; pairs are (x_0,x_1), (x_2,x_3)."""
    a1 = np.diag(np.sqrt(theta * np.arange(1, trunc)), k=1)
    xs = []
    per_pair = (
        (a1 + a1.conj().T) / np.sqrt(2),
        (a1 - a1.conj().T) / (1j * np.sqrt(2)),
    )
    if dim == 2:
        return per_pair
    eye = np.eye(trunc)
    for p in range(2):
        for m in per_pair:
            xs.append(np.kron(m, eye) if p == 0 else np.kron(eye, m))
    return tuple(xs)


@lru_cache(maxsize=64)
def _xtilde_matrices(theta: float, dim: int, trunc: int) -> tuple[np.ndarray, ...]:
    """xtilde_mu = 2 (Theta^-1 x)_mu with Theta = theta J per pair."""
    xs = _coordinate_matrices(theta, dim, trunc)
    out = []
    for p in range(dim // 2):
        x_even, x_odd = xs[2 * p], xs[2 * p + 1]
        out.append(-(2.0 / theta) * x_odd)
        out.append((2.0 / theta) * x_even)
    return tuple(out)


def _spec_matrices(spec: AlgebraSpec):
    return (
        _ladder_matrix(spec.theta, spec.dim, spec.trunc),
        _coordinate_matrices(spec.theta, spec.dim, spec.trunc),
        _xtilde_matrices(spec.theta, spec.dim, spec.trunc),
    )


# ---------------------------------------------------------------------------
# operations


def star(a: MatrixField, b: MatrixField) -> MatrixField:
    """Moyal product; matrix multiplication of the coefficient arrays."""
    _check_same_spec(a, b)
    return MatrixField(a.spec, a.coeff @ b.coeff)


def ladder_apply(f: MatrixField, which: str, side: str) -> MatrixField:
    """Apply a or abar by star multiplication from the given side."""
    amat = _ladder_matrix(f.spec.theta, f.spec.dim, f.spec.trunc)
    op = {"a": amat, "abar": amat.conj().T}[which]
    if side == "left":
        return MatrixField(f.spec, op @ f.coeff)
    if side == "right":
        return MatrixField(f.spec, f.coeff @ op)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def harmonic_apply(f: MatrixField, side: str) -> MatrixField:
    """Star multiplication by the oscillator Hamiltonian: rows/columns scale
    by theta(|k| + D/4)."""
    spec = f.spec
    eig = spec.theta * (spec.norms() + spec.dim / 4.0)
    if side == "left":
        return MatrixField(spec, eig[:, None] * f.coeff)
    if side == "right":
        return MatrixField(spec, f.coeff * eig[None, :])
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def xtilde_square_apply(f: MatrixField, side: str = "left") -> MatrixField:
    """Star multiplication by the squared rescaled coordinate,
    -(8/theta)(|k| + D/4) on rows (left) or columns (right)."""
    return MatrixField(f.spec, (-8.0 / f.spec.theta**2) * harmonic_apply(f, side).coeff)


def xtilde_sandwich(f: MatrixField) -> MatrixField:
    """xtilde * f * xtilde = -(4/theta^2)(a f abar + abar f a), truncated."""
    amat = _ladder_matrix(f.spec.theta, f.spec.dim, f.spec.trunc)
    ad = amat.conj().T
    g = amat @ f.coeff @ ad + ad @ f.coeff @ amat
    return MatrixField(f.spec, (-4.0 / f.spec.theta**2) * g)


def coordinate_apply(f: MatrixField, mu: int, side: str) -> MatrixField:
    """Star multiplication by the coordinate function x_mu."""
    _check_direction(f.spec, mu)
    xm = _coordinate_matrices(f.spec.theta, f.spec.dim, f.spec.trunc)[mu]
    if side == "left":
        return MatrixField(f.spec, xm @ f.coeff)
    if side == "right":
        return MatrixField(f.spec, f.coeff @ xm)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def xtilde_apply(f: MatrixField, mu: int, side: str) -> MatrixField:
    """Star multiplication by the rescaled coordinate xtilde_mu."""
    _check_direction(f.spec, mu)
    xm = _xtilde_matrices(f.spec.theta, f.spec.dim, f.spec.trunc)[mu]
    if side == "left":
        return MatrixField(f.spec, xm @ f.coeff)
    if side == "right":
        return MatrixField(f.spec, f.coeff @ xm)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def partial_derivative(f: MatrixField, mu: int) -> MatrixField:
    """d_mu f = (1/2i) [xtilde_mu, f]."""
    _check_direction(f.spec, mu)
    xm = _xtilde_matrices(f.spec.theta, f.spec.dim, f.spec.trunc)[mu]
    return MatrixField(f.spec, (xm @ f.coeff - f.coeff @ xm) / 2j)


def _check_direction(spec: AlgebraSpec, mu: int):
    if not 0 <= mu < spec.dim:
        raise IndexRangeError(f"direction {mu} outside 0..{spec.dim - 1}")


def integrate(f: MatrixField) -> complex:
    """Integral over R^D: (2 pi theta)^(D/2) tr(coeff)."""
    w = (2.0 * np.pi * f.spec.theta) ** f.spec.pairs
    return complex(w * np.trace(f.coeff))


def adjoint(f: MatrixField) -> MatrixField:
    """Complex conjugation of the represented function: coeff -> coeff^dagger."""
    return MatrixField(f.spec, f.coeff.conj().T)


def star_exp(f: MatrixField) -> MatrixField:
    """Star exponential of i f (matrix exponential in this basis)."""
    return MatrixField(f.spec, expm(1j * f.coeff))


def star_exp_series(f: MatrixField, order: int = 20) -> MatrixField:
    """Truncated power series for the star exponential; slow reference route."""
    n = f.spec.size
    acc = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for j in range(1, order + 1):
        term = term @ (1j * f.coeff) / j
        acc = acc + term
    return MatrixField(f.spec, acc)


# ---------------------------------------------------------------------------
# constructors


def basis_cell(spec: AlgebraSpec, k, l) -> MatrixField:
    """The basis element e_kl (coefficient 1 in cell (k, l))."""
    g = np.zeros((spec.size, spec.size), dtype=np.complex128)
    g[spec.flat_index(k), spec.flat_index(l)] = 1.0
    return MatrixField(spec, g)


def identity(spec: AlgebraSpec) -> MatrixField:
    """Unit of the truncated algebra."""
    return MatrixField(spec, np.eye(spec.size, dtype=np.complex128))


def random_hermitian(
    spec: AlgebraSpec, rng: np.random.Generator, interior_margin: int = 0
) -> MatrixField:
    """Random Hermitian field, optionally supported away from the truncation
    edge: every per-pair index stays below trunc - interior_margin."""
    n = spec.size
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    g = (g + g.conj().T) / 2.0
    if interior_margin > 0:
        cut = spec.trunc - interior_margin
        keep = np.array(
            [all(m < cut for m in spec.multi_index(i)) for i in range(n)]
        )
        g = g * keep[:, None] * keep[None, :]
    return MatrixField(spec, g)


def parity_dual(f: MatrixField) -> MatrixField:
    """Duality rotation induced by the rescaled Fourier transform that swaps
    xtilde_mu with the derivative: g_kl -> (-1)^|k| g_kl (fixes f_00)."""
    sign = (-1.0) ** f.spec.norms()
    return MatrixField(f.spec, sign[:, None] * f.coeff)
