"""Shared fixtures and independent oracle implementations.

The oracles here deliberately avoid the implementation's code paths: the
star-product oracle discretizes the two-point kernel integral directly, and
the basis-function oracle evaluates the Laguerre series term by term from
binomial coefficients.
"""

import math

import numpy as np
import pytest

from moyalgw import algebra as alg
from moyalgw import grid as gr


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def laguerre_series(n: int, alpha: int, u):
    """L_n^alpha(u) as an explicit binomial sum (independent oracle)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for i in range(n + 1):
        out = out + (-1.0) ** i * math.comb(n + alpha, n - i) * u**i / math.factorial(i)
    return out


def fkl_series_oracle(k: int, l: int, theta: float, x1, x2):
    """Basis function from the polar formula with factorials evaluated
    directly; valid for small k, l only."""
    if k > l:
        return np.conj(fkl_series_oracle(l, k, theta, x1, x2))
    a = l - k
    r2 = x1**2 + x2**2
    u = 2.0 * r2 / theta
    phi = np.arctan2(x2, x1)
    norm = math.sqrt(math.factorial(k) / math.factorial(l))
    return (
        2.0
        * (-1.0) ** k
        * norm
        * np.exp(1j * a * phi)
        * u ** (a / 2.0)
        * laguerre_series(k, a, u)
        * np.exp(-r2 / theta)
    )


def kernel_star_oracle(f: gr.GridField, g: gr.GridField, theta: float) -> np.ndarray:
    """Direct quadrature of the two-point-kernel integral for the star
    product (slow; coarse grids only).

    (f*g)(x) = (pi th)^-2 \\int\\int f(y) g(z) e^{(2i/th)(x-y)^(x-z)} dy dz
    with u^v = u1 v2 - u2 v1.
    """
    spec = f.spec
    assert spec.dim == 2 and spec.points <= 48
    x = spec.axis()
    dx = spec.spacing
    m = spec.points
    # inner transform on the difference grid w = y - x
    w = dx * np.arange(-(m - 1), m)
    ea = np.exp(-2j / theta * np.outer(w, x)) * dx  # [w2, z1]
    eb = np.exp(2j / theta * np.outer(w, x)) * dx   # [w1, z2]
    t1 = g.values @ eb.T          # [z1, w1]
    gt = (ea @ t1).T              # [w1, w2]
    p1 = np.exp(2j / theta * np.outer(x, x))   # [x1, y2]
    p2 = np.exp(-2j / theta * np.outer(x, x))  # [x2, y1]
    out = np.empty((m, m), dtype=np.complex128)
    base = m - 1
    for i1 in range(m):
        gslab = gt[base - i1 : base - i1 + m, :]  # [y1, w2-offset rows]
        for i2 in range(m):
            gblock = gslab[:, base - i2 : base - i2 + m]  # [y1, y2]
            phase = np.outer(p2[i2], p1[i1])              # [y1, y2]
            out[i1, i2] = np.sum(f.values * phase * gblock)
    return out * dx**2 / (np.pi * theta) ** 2


def random_interior(spec: alg.AlgebraSpec, rng, margin: int = 3) -> alg.MatrixField:
    return alg.random_hermitian(spec, rng, interior_margin=margin)
