# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled loops for family coefficients, minor sums and pairwise residuals.

Complex products are spelled out in real arithmetic: the C99 ``*`` on
``double complex`` goes through ``__muldc3`` for inf/nan handling and is
several times slower. Reductions run in a fixed order (plain sums inside a
block, Neumaier compensation across blocks), so results are reproducible
bit-for-bit for a given input.
"""

import numpy as np

ctypedef double complex cplx

DEF BLOCK = 256


cdef inline void _kadd(double x, double* s, double* c) noexcept nogil:
    cdef double t = s[0] + x
    if (s[0] if s[0] >= 0 else -s[0]) >= (x if x >= 0 else -x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


cdef inline double _minor_abs2(cplx p, cplx q, cplx r, cplx s) noexcept nogil:
    """``|p q - r s|^2``."""
    cdef double re = (p.real * q.real - p.imag * q.imag) - (r.real * s.real - r.imag * s.imag)
    cdef double im = (p.real * q.imag + p.imag * q.real) - (r.real * s.imag + r.imag * s.real)
    return re * re + im * im


def family_coefficients(const cplx[::1] a1, const cplx[::1] a2,
                        const Py_ssize_t[::1] u, const Py_ssize_t[::1] v,
                        const Py_ssize_t[::1] mu, const Py_ssize_t[::1] nu):
    cdef Py_ssize_t n = u.shape[0], f
    alpha = np.empty(n, dtype=np.complex128)
    beta = np.empty(n, dtype=np.complex128)
    gamma = np.empty(n, dtype=np.complex128)
    cdef double[::1] al = alpha.view(np.float64), be = beta.view(np.float64), ga = gamma.view(np.float64)
    cdef double xu, yu, xv, yv, xm, ym, xn, yn  # E1 parts
    cdef double pu, qu, pv, qv, pm, qm, pn, qn  # E2 parts
    with nogil:
        for f in range(n):
            xu = a1[u[f]].real; yu = a1[u[f]].imag; xv = a1[v[f]].real; yv = a1[v[f]].imag
            xm = a1[mu[f]].real; ym = a1[mu[f]].imag; xn = a1[nu[f]].real; yn = a1[nu[f]].imag
            pu = a2[u[f]].real; qu = a2[u[f]].imag; pv = a2[v[f]].real; qv = a2[v[f]].imag
            pm = a2[mu[f]].real; qm = a2[mu[f]].imag; pn = a2[nu[f]].real; qn = a2[nu[f]].imag
            al[2 * f] = (pu * pv - qu * qv) - (pm * pn - qm * qn)
            al[2 * f + 1] = (pu * qv + qu * pv) - (pm * qn + qm * pn)
            ga[2 * f] = (xu * xv - yu * yv) - (xm * xn - ym * yn)
            ga[2 * f + 1] = (xu * yv + yu * xv) - (xm * yn + ym * xn)
            be[2 * f] = ((pu * xv - qu * yv) + (xu * pv - yu * qv)
                         - (pm * xn - qm * yn) - (xm * pn - ym * qn))
            be[2 * f + 1] = ((pu * yv + qu * xv) + (xu * qv + yu * pv)
                             - (pm * yn + qm * xn) - (xm * qn + ym * pn))
    return alpha, beta, gamma


def minor_norm_sq(const cplx[::1] a,
                  const Py_ssize_t[::1] u, const Py_ssize_t[::1] v,
                  const Py_ssize_t[::1] mu, const Py_ssize_t[::1] nu):
    cdef Py_ssize_t n = u.shape[0], f, start, stop
    cdef double s = 0.0, c = 0.0, block
    with nogil:
        start = 0
        while start < n:
            stop = start + BLOCK if start + BLOCK < n else n
            block = 0.0
            for f in range(start, stop):
                block += _minor_abs2(a[u[f]], a[v[f]], a[mu[f]], a[nu[f]])
            _kadd(block, &s, &c)
            start = stop
    return s + c


def biquadratic(const cplx[:, ::1] mat):
    """``sum_{t,t'} |sum_s A[t,s] conj(A[t',s])|^2``, using the Hermitian symmetry of the Gram matrix."""
    cdef Py_ssize_t rows = mat.shape[0], cols = mat.shape[1], t, t2, s
    cdef double diag = 0.0, cd = 0.0, off = 0.0, co = 0.0, gr, gi
    with nogil:
        for t in range(rows):
            for t2 in range(t, rows):
                gr = 0.0
                gi = 0.0
                for s in range(cols):
                    gr = gr + mat[t, s].real * mat[t2, s].real + mat[t, s].imag * mat[t2, s].imag
                    gi = gi + mat[t, s].imag * mat[t2, s].real - mat[t, s].real * mat[t2, s].imag
                if t2 == t:
                    _kadd(gr * gr + gi * gi, &diag, &cd)
                else:
                    _kadd(gr * gr + gi * gi, &off, &co)
    return (diag + cd) + 2.0 * (off + co)


def pair_cross_norm_sq(const cplx[::1] x, const cplx[::1] y):
    """``sum_{i,j} |x_i y_j - y_i x_j|^2`` over all ordered pairs (twice the ``i < j`` sum)."""
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double acc = 0.0, c = 0.0, row, xr, xi, yr, yi, re, im
    with nogil:
        for i in range(n):
            xr = x[i].real; xi = x[i].imag; yr = y[i].real; yi = y[i].imag
            row = 0.0
            for j in range(i + 1, n):
                re = (xr * y[j].real - xi * y[j].imag) - (yr * x[j].real - yi * x[j].imag)
                im = (xr * y[j].imag + xi * y[j].real) - (yr * x[j].imag + yi * x[j].real)
                row += re * re + im * im
            _kadd(row, &acc, &c)
    return 2.0 * (acc + c)
