"""NumPy implementations of the hot kernels.

Same signatures and semantics as the compiled ``qsep._kernels`` module; used
when the extension is not built or when ``QSEP_BACKEND=python``.
"""

import numpy as np

_BLOCK = 512


def family_coefficients(a1, a2, u, v, mu, nu):
    """Return ``(alpha, beta, gamma)`` for every family ``(u, v, mu, nu)``.

    ``a1``/``a2`` are flat amplitude vectors of E1/E2; index arrays are flat
    positions.
    """
    a1u, a1v, a1m, a1n = a1[u], a1[v], a1[mu], a1[nu]
    a2u, a2v, a2m, a2n = a2[u], a2[v], a2[mu], a2[nu]
    alpha = a2u * a2v - a2m * a2n
    beta = a2u * a1v + a1u * a2v - a2m * a1n - a1m * a2n
    gamma = a1u * a1v - a1m * a1n
    return alpha, beta, gamma


def minor_norm_sq(a, u, v, mu, nu):
    m = a[u] * a[v] - a[mu] * a[nu]
    return float(np.sum(m.real * m.real + m.imag * m.imag))


def biquadratic(mat):
    g = mat @ mat.conj().T
    return float(np.sum(g.real * g.real + g.imag * g.imag))


def pair_cross_norm_sq(x, y):
    """``sum_{i,j} |x_i y_j - y_i x_j|^2`` over all ordered pairs."""
    n = len(x)
    total = 0.0
    for start in range(0, n, _BLOCK):
        xi = x[start:start + _BLOCK, None]
        yi = y[start:start + _BLOCK, None]
        d = xi * y[None, :] - yi * x[None, :]
        total += float(np.sum(d.real * d.real + d.imag * d.imag))
    return total
