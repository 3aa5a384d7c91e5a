# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scattering kernels.

Same interface and semantics as ``czscatter._kernels_py``; see that module for
the contract.  Draw loops run without the GIL-level overhead of batched array
assembly, which is what makes the 10^3..10^5-draw suites cheap.
"""
import numpy as np

from libc.math cimport INFINITY, NAN

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex cexp(double complex)
    double complex conj(double complex)

BACKEND_NAME = "cython"


cdef int _gauss(double complex *a, double complex *b, double complex *u, int n) nogil:
    """In-place Gaussian elimination with partial pivoting; returns 0 on success."""
    cdef int i, j, p, piv
    cdef double best, mag
    cdef double complex f
    for i in range(n):
        piv = i
        best = cabs(a[i * n + i])
        for p in range(i + 1, n):
            mag = cabs(a[p * n + i])
            if mag > best:
                best = mag
                piv = p
        if best == 0.0:
            return 1
        if piv != i:
            for j in range(i, n):
                f = a[i * n + j]
                a[i * n + j] = a[piv * n + j]
                a[piv * n + j] = f
            f = b[i]
            b[i] = b[piv]
            b[piv] = f
        for p in range(i + 1, n):
            f = a[p * n + i] / a[i * n + i]
            a[p * n + i] = 0
            for j in range(i + 1, n):
                a[p * n + j] = a[p * n + j] - f * a[i * n + j]
            b[p] = b[p] - f * b[i]
    for i in range(n - 1, -1, -1):
        f = b[i]
        for j in range(i + 1, n):
            f = f - a[i * n + j] * u[j]
        u[i] = f / a[i * n + i]
    return 0


cdef double _residual(double complex *a0, double complex *b0, double complex *u, int n) nogil:
    """Componentwise relative backward error max_i |a0 u - b0|_i / (|a0||u| + |b0|)_i."""
    cdef int i, j
    cdef double num, den, worst = 0.0
    cdef double complex acc
    for i in range(n):
        acc = -b0[i]
        den = cabs(b0[i])
        for j in range(n):
            acc = acc + a0[i * n + j] * u[j]
            den = den + cabs(a0[i * n + j]) * cabs(u[j])
        if den < 1e-300:
            den = 1e-300
        num = cabs(acc) / den
        if num > worst:
            worst = num
    return worst


def solve_mirrored(double[::1] g1, double[::1] g2, double[::1] x2, double[::1] x3,
                   double[::1] k):
    """Batched 5x5 boundary-condition solve for the mirrored two-center line."""
    cdef Py_ssize_t n = k.shape[0], d
    amps_arr = np.empty((n, 5), dtype=np.complex128)
    res_arr = np.empty(n, dtype=np.float64)
    cdef double complex[:, ::1] amps = amps_arr
    cdef double[::1] res = res_arr
    cdef double complex a[25]
    cdef double complex a0[25]
    cdef double complex b[5]
    cdef double complex b0[5]
    cdef double complex u[5]
    cdef double complex ik, e2p, e2m, e3p, e3m
    cdef int i, fail
    with nogil:
        for d in range(n):
            ik = 1j * k[d]
            e2p = cexp(ik * x2[d])
            e2m = conj(e2p)
            e3p = cexp(ik * x3[d])
            e3m = conj(e3p)
            for i in range(25):
                a[i] = 0
            for i in range(5):
                b[i] = 0
            # continuity at x1 = 0
            a[0] = -1; a[1] = 1; a[2] = 1
            b[0] = 1
            # continuity at x2
            a[6] = e2p; a[7] = e2m; a[8] = -e2p; a[9] = -e2m
            # hard wall at x3
            a[13] = e3p; a[14] = e3m
            # derivative jump at x1
            a[15] = ik - g1[d]; a[16] = ik; a[17] = -ik
            b[3] = ik + g1[d]
            # derivative jump at x2
            a[21] = -ik * e2p; a[22] = ik * e2m
            a[23] = (ik - g2[d]) * e2p; a[24] = -(ik + g2[d]) * e2m
            for i in range(25):
                a0[i] = a[i]
            for i in range(5):
                b0[i] = b[i]
            fail = _gauss(a, b, u, 5)
            if fail:
                for i in range(5):
                    amps[d, i] = NAN + 1j * NAN
                res[d] = INFINITY
            else:
                for i in range(5):
                    amps[d, i] = u[i]
                res[d] = _residual(a0, b0, u, 5)
    return amps_arr, res_arr


def solve_open(double[::1] g1, double[::1] g2, double[::1] x2, double[::1] k):
    """Batched 4x4 boundary-condition solve for the open two-center line."""
    cdef Py_ssize_t n = k.shape[0], d
    amps_arr = np.empty((n, 4), dtype=np.complex128)
    res_arr = np.empty(n, dtype=np.float64)
    cdef double complex[:, ::1] amps = amps_arr
    cdef double[::1] res = res_arr
    cdef double complex a[16]
    cdef double complex a0[16]
    cdef double complex b[4]
    cdef double complex b0[4]
    cdef double complex u[4]
    cdef double complex ik, e2p, e2m
    cdef int i, fail
    with nogil:
        for d in range(n):
            ik = 1j * k[d]
            e2p = cexp(ik * x2[d])
            e2m = conj(e2p)
            for i in range(16):
                a[i] = 0
            for i in range(4):
                b[i] = 0
            a[0] = -1; a[1] = 1; a[2] = 1
            b[0] = 1
            a[4] = ik - g1[d]; a[5] = ik; a[6] = -ik
            b[1] = ik + g1[d]
            a[9] = e2p; a[10] = e2m; a[11] = -e2p
            a[13] = -ik * e2p; a[14] = ik * e2m; a[15] = (ik - g2[d]) * e2p
            for i in range(16):
                a0[i] = a[i]
            for i in range(4):
                b0[i] = b[i]
            fail = _gauss(a, b, u, 4)
            if fail:
                for i in range(4):
                    amps[d, i] = NAN + 1j * NAN
                res[d] = INFINITY
            else:
                for i in range(4):
                    amps[d, i] = u[i]
                res[d] = _residual(a0, b0, u, 4)
    return amps_arr, res_arr


def eval_psi(double[::1] k, double complex[:, ::1] amps, double x2, double x3,
             double[::1] x):
    """Stationary states on a grid: (n states) x (m points), prefactor-free."""
    cdef Py_ssize_t n = k.shape[0], m = x.shape[0], j, i
    out_arr = np.empty((n, m), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex ap, am, e
    cdef double xi
    with nogil:
        for j in range(n):
            for i in range(m):
                xi = x[i]
                if xi < 0.0:
                    ap = 1.0
                    am = amps[j, 0]
                elif xi < x2:
                    ap = amps[j, 1]
                    am = amps[j, 2]
                else:
                    ap = amps[j, 3]
                    am = amps[j, 4]
                e = cexp(1j * k[j] * xi)
                out[j, i] = ap * e + am * conj(e)
    return out_arr


def synthesize(double complex[::1] coeff, double[::1] k, double complex[:, ::1] amps,
               double x2, double x3, double[::1] x):
    """Coefficient-weighted sum of stationary states evaluated on a grid."""
    cdef Py_ssize_t n = k.shape[0], m = x.shape[0], j, i
    out_arr = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex ap, am, e, acc
    cdef double xi
    with nogil:
        for i in range(m):
            xi = x[i]
            acc = 0
            if xi < 0.0:
                for j in range(n):
                    e = cexp(1j * k[j] * xi)
                    acc = acc + coeff[j] * (e + amps[j, 0] * conj(e))
            elif xi < x2:
                for j in range(n):
                    e = cexp(1j * k[j] * xi)
                    acc = acc + coeff[j] * (amps[j, 1] * e + amps[j, 2] * conj(e))
            else:
                for j in range(n):
                    e = cexp(1j * k[j] * xi)
                    acc = acc + coeff[j] * (amps[j, 3] * e + amps[j, 4] * conj(e))
            out[i] = acc
    return out_arr
