"""Pure-numpy scattering kernels.

Fallback implementation of the backend interface (see ``czscatter._backend``).
The compiled module ``czscatter._kernels`` provides the same four functions
with identical semantics; parity is enforced by tests.

Unknown ordering for the mirrored geometry is ``(r, a1, b1, a2, b2)``:
coefficients of ``e^{ikx}`` / ``e^{-ikx}`` in the three regions ``x < x1``,
``x1 < x < x2`` and ``x2 < x < x3``, with the incident coefficient fixed to 1
and ``x1 = 0``.  For the open line the ordering is ``(r, a, b, t)``.

Singular draws are marked with NaN amplitudes and an infinite residual rather
than raising; wrappers in :mod:`czscatter.core` translate them into errors.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _assemble_mirrored(g1, g2, x2, x3, k):
    n = k.shape[0]
    ik = 1j * k
    e2p = np.exp(ik * x2)
    e2m = np.conj(e2p)
    e3p = np.exp(ik * x3)
    e3m = np.conj(e3p)
    zero = np.zeros(n, dtype=complex)
    one = np.ones(n, dtype=complex)

    rows = [
        # continuity at x1 = 0
        [-one, one, one, zero, zero],
        # continuity at x2
        [zero, e2p, e2m, -e2p, -e2m],
        # hard wall at x3
        [zero, zero, zero, e3p, e3m],
        # derivative jump at x1
        [ik - g1, ik, -ik, zero, zero],
        # derivative jump at x2
        [zero, -ik * e2p, ik * e2m, (ik - g2) * e2p, -(ik + g2) * e2m],
    ]
    a = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
    b = np.zeros((n, 5), dtype=complex)
    b[:, 0] = 1.0
    b[:, 3] = ik + g1
    return a, b


def _assemble_open(g1, g2, x2, k):
    n = k.shape[0]
    ik = 1j * k
    e2p = np.exp(ik * x2)
    e2m = np.conj(e2p)
    zero = np.zeros(n, dtype=complex)
    one = np.ones(n, dtype=complex)

    rows = [
        [-one, one, one, zero],
        [ik - g1, ik, -ik, zero],
        [zero, e2p, e2m, -e2p],
        [zero, -ik * e2p, ik * e2m, (ik - g2) * e2p],
    ]
    a = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
    b = np.zeros((n, 4), dtype=complex)
    b[:, 0] = 1.0
    b[:, 1] = ik + g1
    return a, b


def _solve_batch(a, b):
    n = a.shape[0]
    try:
        u = np.linalg.solve(a, b[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError:
        # isolate the singular draws; keep the rest
        u = np.full_like(b, np.nan)
        for i in range(n):
            try:
                u[i] = np.linalg.solve(a[i], b[i])
            except np.linalg.LinAlgError:
                pass
    # componentwise relative backward error: scale-free, ~eps for a sound solve
    num = np.abs(np.einsum("nij,nj->ni", a, u) - b)
    den = np.einsum("nij,nj->ni", np.abs(a), np.abs(u)) + np.abs(b)
    res = np.max(num / np.maximum(den, 1e-300), axis=1)
    bad = ~np.isfinite(u).all(axis=1)
    if bad.any():
        u[bad] = np.nan
        res[bad] = np.inf
    return u, res


def solve_mirrored(g1, g2, x2, x3, k):
    """Batched 5x5 boundary-condition solve for the mirrored two-center line."""
    a, b = _assemble_mirrored(g1, g2, x2, x3, k)
    return _solve_batch(a, b)


def solve_open(g1, g2, x2, k):
    """Batched 4x4 boundary-condition solve for the open two-center line."""
    a, b = _assemble_open(g1, g2, x2, k)
    return _solve_batch(a, b)


def _region_index(x, x2):
    return (x >= 0.0).astype(np.intp) + (x >= x2).astype(np.intp)


def eval_psi(k, amps, x2, x3, x):
    """Stationary states on a grid: (n states) x (m points), prefactor-free."""
    ri = _region_index(x, x2)
    aplus = np.stack([np.ones(k.shape[0], dtype=complex), amps[:, 1], amps[:, 3]], axis=1)
    aminus = np.stack([amps[:, 0], amps[:, 2], amps[:, 4]], axis=1)
    ep = np.exp(1j * np.outer(k, x))
    return aplus[:, ri] * ep + aminus[:, ri] * np.conj(ep)


def synthesize(coeff, k, amps, x2, x3, x):
    """Coefficient-weighted sum of stationary states evaluated on a grid."""
    return coeff @ eval_psi(k, amps, x2, x3, x)
